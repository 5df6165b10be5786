//! Properties of genome growth, freezing and pruning.

use proptest::prelude::*;
use pulseforge::device::{load_device, DeviceConfig};
use pulseforge::dynamics::{propagate_unitary, SimOptions};
use pulseforge::problems::{
    approximation_ratio, best_bitstring, final_state, load_molecule, maxcut_to_ising, EstimatorConfig, Graph,
};
use pulseforge::trainer::{grow, prune, AnsatzGenome, EnergyObjective, GrowthPolicy, LayerKind};

fn device() -> DeviceConfig {
    load_device(concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/devices/two_qubit.json")).unwrap()
}

fn policy(steps: usize) -> GrowthPolicy {
    GrowthPolicy {
        max_steps: steps,
        first: LayerKind::Snp,
        train_detuning: true,
    }
}

/// Grows `steps` layers and assigns `vals` (cycled) to the parameters,
/// scaled into each parameter's box. Zero-valued draws stay exactly zero.
fn genome(steps: usize, vals: &[f64], cfg: &DeviceConfig) -> AnsatzGenome {
    let mut g = AnsatzGenome::new(cfg.n_qubits);
    for _ in 0..steps {
        g = grow(&g, &policy(steps), cfg).unwrap();
    }
    for (i, p) in g.params.iter_mut().enumerate() {
        let u = vals[i % vals.len()];
        p.value = if u == 0.0 { 0.0 } else { p.lo + u * (p.hi - p.lo) };
    }
    g
}

fn unit() -> impl Strategy<Value = f64> {
    prop_oneof![Just(0.0), 0.0..=1.0f64]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn growth_preserves_the_unitary(vals in prop::collection::vec(unit(), 4)) {
        let cfg = device();
        let sim = SimOptions::default();
        let g = genome(1, &vals, &cfg);
        let before = propagate_unitary(&g.render_bound(&cfg).unwrap(), &cfg, &sim).unwrap();
        let grown = grow(&g, &policy(3), &cfg).unwrap();
        let after = propagate_unitary(&grown.render_bound(&cfg).unwrap(), &cfg, &sim).unwrap();
        prop_assert!(before.max_abs_diff(&after) <= 1e-9);
    }

    #[test]
    fn growth_freezes_every_earlier_value(vals in prop::collection::vec(unit(), 4)) {
        let cfg = device();
        let g = genome(1, &vals, &cfg);
        let grown = grow(&g, &policy(2), &cfg).unwrap();
        for (a, b) in g.params.iter().zip(&grown.params) {
            prop_assert_eq!(a.value.to_bits(), b.value.to_bits());
            prop_assert!(b.frozen);
        }
        prop_assert!(grown.partial_indices().iter().all(|&i| i >= g.params.len()));
        prop_assert!(grown.partial_indices().iter().all(|&i| grown.params[i].value == 0.0));
    }

    #[test]
    fn pruning_never_lengthens_a_schedule(
        vals in prop::collection::vec(unit(), 6),
        eps in 0.0..0.4f64,
    ) {
        let cfg = device();
        let g = genome(3, &vals, &cfg);
        let p = prune(&g, eps).unwrap();
        let d0 = g.render_bound(&cfg).unwrap().duration();
        let d1 = p.render_bound(&cfg).unwrap().duration();
        prop_assert!(d1 <= d0);
        let (s0, c0) = g.pulse_counts();
        let (s1, c1) = p.pulse_counts();
        prop_assert!(s1 <= s0 && c1 <= c0);
    }

    #[test]
    fn zero_threshold_prune_keeps_the_energy(vals in prop::collection::vec(unit(), 6)) {
        let cfg = device();
        let h = load_molecule(concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/molecules/h2_0.75.ham"), false)
            .unwrap()
            .hamiltonian;
        let obj = EnergyObjective::new(&h, &cfg, SimOptions::default(), EstimatorConfig::exact());
        let g = genome(2, &vals, &cfg);
        let e0 = obj.energy(&g.render_bound(&cfg).unwrap()).unwrap();
        let e1 = obj.energy(&prune(&g, 0.0).unwrap().render_bound(&cfg).unwrap()).unwrap();
        prop_assert!((e0 - e1).abs() <= 1e-9, "{} vs {}", e0, e1);
    }
}

#[test]
fn injected_optimum_on_a_triangle_reaches_ratio_one() {
    let graph = Graph::complete(3);
    let cfg = DeviceConfig::line(3);
    let mut g = grow(&AnsatzGenome::new(3), &policy(1), &cfg).unwrap();
    g.set_value("s1_q0_amp", cfg.amp_max).unwrap();
    let state = final_state(&g.render_bound(&cfg).unwrap(), &cfg, &SimOptions::default()).unwrap();
    let bits = best_bitstring(&state, &EstimatorConfig::exact()).unwrap();
    assert_eq!(bits, "100");
    assert_eq!(approximation_ratio(&graph, &bits).unwrap(), 1.0);
    let h = maxcut_to_ising(&graph).unwrap();
    let obj = EnergyObjective::new(&h, &cfg, SimOptions::default(), EstimatorConfig::exact());
    let e = obj.energy(&g.render_bound(&cfg).unwrap()).unwrap();
    assert!((e + 2.0).abs() < 1e-2, "energy {e}");
}
