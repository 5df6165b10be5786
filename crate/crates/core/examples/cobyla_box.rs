// Bound-constrained minimization of a shifted quadratic whose optimum lies
// on the box edge.

use pulseforge::optimizer::{minimize_cobyla, Bounds, CobylaSettings, OptimizerReport};

pub fn run_example() -> pulseforge::Result<OptimizerReport> {
    let bounds = Bounds::new([(0.0, 0.4), (-2e6, 2e6), (0.0, 0.4)])?;
    // the second variable lives on a MHz scale; the optimizer rescales each
    // box to a common span, so this term is as well conditioned as the others
    let f = |x: &[f64]| (x[0] - 0.25).powi(2) + (x[1] / 1e7 - 0.05).powi(2) + (x[2] - 0.7).powi(2);
    minimize_cobyla(
        f,
        &[0.0, 0.0, 0.0],
        &bounds,
        &CobylaSettings {
            max_evals: 100,
            ..Default::default()
        },
    )
}

fn main() -> pulseforge::Result<()> {
    let r = run_example()?;
    println!("x = {:?}", r.best_x);
    println!("f = {:.3e} after {} evaluations ({:?})", r.best_f, r.n_evals, r.termination);
    Ok(())
}
