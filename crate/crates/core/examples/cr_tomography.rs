// Recovers the effective cross-resonance rates from simulated target
// trajectories, with exact expectations and with 1024 shots.

use pulseforge::analysis::{cr_tomography, default_durations, TomographySettings};
use pulseforge::device::{effective_cr, DeviceConfig};
use pulseforge::dynamics::SimOptions;

/// `(model, exact fit, sampled fit)` coefficient arrays.
pub fn run_example() -> pulseforge::Result<[[f64; 6]; 3]> {
    let cfg = DeviceConfig::line(2);
    let amp = 0.2;
    let model = effective_cr(&cfg, amp, cfg.cr_duration)?;
    let exact = cr_tomography(&cfg, amp, &default_durations(), &SimOptions::default(), &TomographySettings::default())?;
    let sampled = cr_tomography(
        &cfg,
        amp,
        &default_durations(),
        &SimOptions::default(),
        &TomographySettings {
            shots: Some(1024),
            seed: 11,
            tolerance: None,
        },
    )?;
    Ok([model.as_array(), exact.coefficients.as_array(), sampled.coefficients.as_array()])
}

fn main() -> pulseforge::Result<()> {
    let [m, e, s] = run_example()?;
    for (i, name) in ["a_x", "a_y", "a_z", "b_x", "b_y", "b_z"].iter().enumerate() {
        println!("{name}  model {:>12.4e}  exact {:>12.4e}  1024 shots {:>12.4e}", m[i], e[i], s[i]);
    }
    Ok(())
}
