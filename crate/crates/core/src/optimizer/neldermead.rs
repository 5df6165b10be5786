//! Nelder–Mead simplex search with box handling by clipping.

use serde::{Deserialize, Serialize};

use super::{Bounds, OptimizerReport, Recorder, Termination};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NelderMeadSettings {
    pub max_evals: usize,
    /// Stop when the simplex is this small in every coordinate...
    pub xatol: f64,
    /// ...and its values agree this closely.
    pub fatol: f64,
    /// Penalty per unit distance between a vertex and its clipped copy.
    pub penalty: f64,
}

impl Default for NelderMeadSettings {
    fn default() -> Self {
        NelderMeadSettings {
            max_evals: 1000,
            xatol: 1e-9,
            fatol: 1e-12,
            penalty: 1e3,
        }
    }
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

/// Minimizes `f` from `x0`. Trial vertices may leave the box; the objective
/// is only ever called at the clipped point and the vertex is charged the
/// clipped distance times `penalty`. Infinite bounds are allowed.
pub fn minimize_neldermead(
    f: impl FnMut(&[f64]) -> f64,
    x0: &[f64],
    bounds: &Bounds,
    s: &NelderMeadSettings,
) -> Result<OptimizerReport> {
    if s.max_evals == 0 {
        return Err(Error::Validation("max_evals must be positive".into()));
    }
    bounds.check_start(x0)?;
    let n = x0.len();
    let mut rec = Recorder::new(f);
    let value = |rec: &mut Recorder<_>, x: &[f64]| -> f64 {
        let c = bounds.clip(x);
        let dist: f64 = x.iter().zip(&c).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        match rec.eval(&c) {
            Some(v) => v + s.penalty * dist,
            None => f64::INFINITY,
        }
    };
    let f0 = value(&mut rec, x0);
    if !f0.is_finite() {
        return Err(Error::Evaluation("objective is not finite at the start point".into()));
    }
    if n == 0 {
        return rec.finish(Termination::Stall);
    }

    let mut simplex: Vec<(Vec<f64>, f64)> = vec![(x0.to_vec(), f0)];
    for i in 0..n {
        if rec.n_evals >= s.max_evals {
            return rec.finish(Termination::MaxEvals);
        }
        let (lo, hi) = (bounds.lo()[i], bounds.hi()[i]);
        let step = if (hi - lo).is_finite() {
            0.1 * (hi - lo)
        } else if x0[i] != 0.0 {
            0.05 * x0[i]
        } else {
            0.00025
        };
        let mut p = x0.to_vec();
        // step inward if the upper side has no room
        p[i] = if x0[i] + step <= hi || hi - x0[i] >= x0[i] - lo { x0[i] + step } else { x0[i] - step };
        let v = value(&mut rec, &p);
        simplex.push((p, v));
    }

    loop {
        // stable sort keeps lower indices first among ties
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread_x = simplex[1..]
            .iter()
            .flat_map(|(p, _)| p.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        let spread_f = simplex[1..].iter().map(|(_, v)| (v - simplex[0].1).abs()).fold(0.0, f64::max);
        if spread_x <= s.xatol && spread_f <= s.fatol {
            return rec.finish(Termination::TrustRadiusConverged);
        }
        if rec.n_evals >= s.max_evals {
            return rec.finish(Termination::MaxEvals);
        }
        let centroid: Vec<f64> = (0..n)
            .map(|i| simplex[..n].iter().map(|(p, _)| p[i]).sum::<f64>() / n as f64)
            .collect();
        let along = |t: f64, worst: &[f64]| -> Vec<f64> {
            centroid.iter().zip(worst).map(|(c, w)| c + t * (c - w)).collect()
        };
        let worst = simplex[n].clone();
        let xr = along(REFLECT, &worst.0);
        let fr = value(&mut rec, &xr);
        if fr < simplex[0].1 {
            if rec.n_evals >= s.max_evals {
                simplex[n] = (xr, fr);
                continue;
            }
            let xe = along(EXPAND, &worst.0);
            let fe = value(&mut rec, &xe);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
            continue;
        }
        if rec.n_evals >= s.max_evals {
            continue;
        }
        // outside contraction when the reflection beat the worst vertex
        let xc = along(if fr < worst.1 { CONTRACT } else { -CONTRACT }, &worst.0);
        let fc = value(&mut rec, &xc);
        if fc < worst.1.min(fr) {
            simplex[n] = (xc, fc);
            continue;
        }
        let best = simplex[0].0.clone();
        for v in simplex.iter_mut().skip(1) {
            if rec.n_evals >= s.max_evals {
                break;
            }
            let p: Vec<f64> = best.iter().zip(&v.0).map(|(b, x)| b + SHRINK * (x - b)).collect();
            let fv = value(&mut rec, &p);
            *v = (p, fv);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optimizer::tests::guarded;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::cell::RefCell;

    fn run(f: impl Fn(&[f64]) -> f64, x0: &[f64], b: &Bounds, max_evals: usize) -> OptimizerReport {
        let calls = RefCell::new(0);
        let s = NelderMeadSettings {
            max_evals,
            ..Default::default()
        };
        let r = minimize_neldermead(guarded(b, &calls, f), x0, b, &s).unwrap();
        assert!(r.n_evals <= max_evals);
        assert_eq!(*calls.borrow(), r.n_evals);
        let bsf = r.best_so_far();
        assert!(bsf.windows(2).all(|w| w[1] <= w[0]));
        r
    }

    #[test]
    fn one_dimensional_parabola() {
        let r = run(|x| (x[0] - 1.0).powi(2), &[0.0], &Bounds::unbounded(1), 500);
        assert!((r.best_x[0] - 1.0).abs() < 1e-6, "{:?}", r.best_x);
    }

    #[test]
    fn rosenbrock() {
        let f = |x: &[f64]| 100.0 * (x[1] - x[0] * x[0]).powi(2) + (1.0 - x[0]).powi(2);
        let r = run(f, &[-1.2, 1.0], &Bounds::unbounded(2), 2000);
        assert!(r.best_f <= 1e-4, "{}", r.best_f);
    }

    #[test]
    fn noisy_sphere() {
        let rng = RefCell::new(ChaCha8Rng::seed_from_u64(17));
        let f = |x: &[f64]| {
            let noise: f64 = rng.borrow_mut().gen_range(-1.0..1.0) * 1e-3 * 3f64.sqrt();
            x.iter().map(|v| v * v).sum::<f64>() + noise
        };
        let r = run(f, &[0.8, -0.5, 0.3], &Bounds::uniform(3, -1.0, 1.0).unwrap(), 600);
        assert!(r.best_f <= 1e-2);
    }

    #[test]
    fn optimum_outside_box_is_clipped() {
        let b = Bounds::uniform(2, 0.0, 0.4).unwrap();
        let r = run(|x| (x[0] - 1.0).powi(2) + (x[1] + 1.0).powi(2), &[0.2, 0.2], &b, 400);
        assert!((r.best_x[0] - 0.4).abs() < 1e-4 && r.best_x[1].abs() < 1e-4, "{:?}", r.best_x);
    }

    #[test]
    fn deterministic_and_budgeted() {
        let b = Bounds::uniform(2, -2.0, 2.0).unwrap();
        let f = |x: &[f64]| (x[0] - 0.5).abs() + (x[1] * x[0]).powi(2);
        let a = run(f, &[1.0, 1.0], &b, 37);
        assert_eq!(a, run(f, &[1.0, 1.0], &b, 37));
        assert_eq!(a.n_evals, 37);
        assert_eq!(a.termination, Termination::MaxEvals);
    }
}
