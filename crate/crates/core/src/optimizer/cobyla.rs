//! Linear-model trust-region minimization over a box.
//!
//! The method keeps `n + 1` interpolation points, fits the linear model
//! through them, and minimizes the model over the intersection of the trust
//! ball and the bounds. Since bound constraints are linear, their models are
//! exact and each trial point is feasible by construction.
//!
//! Two radii are kept. The resolution `rho` only shrinks, and only once a
//! step fails on a well-poised simplex with the trust radius already down to
//! `rho`. The trust radius `delta >= rho` bounds each step and follows the
//! usual ratio test, so it can grow again after a run of good steps.
//!
//! Variables are rescaled so each bound span is `SCALED_SPAN` wide, which
//! makes one `rhobeg` meaningful for amplitudes and detunings alike.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{Bounds, OptimizerReport, Recorder, Termination};
use crate::error::{Error, Result};

/// Width of every scaled bound span. Matches the amplitude range, so
/// amplitude variables are left unscaled.
const SCALED_SPAN: f64 = 0.4;
/// Vertices farther than this many radii from the best point are replaced.
const FAR: f64 = 2.1;
/// Vertices closer than this many radii to the opposite face are replaced.
const FLAT: f64 = 0.25;
/// Length of a geometry step, in radii.
const GEOMETRY_STEP: f64 = 0.5;
/// Steps achieving less than this fraction of the predicted decrease fail.
const POOR_RATIO: f64 = 0.1;
/// Steps achieving more than this fraction may enlarge the trust radius.
const GOOD_RATIO: f64 = 0.7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CobylaSettings {
    pub rhobeg: f64,
    pub rhoend: f64,
    pub max_evals: usize,
    /// Optional cap on trust-region iterations.
    pub max_trust_steps: Option<usize>,
}

impl Default for CobylaSettings {
    fn default() -> Self {
        CobylaSettings {
            rhobeg: 0.1,
            rhoend: 1e-5,
            max_evals: 50,
            max_trust_steps: None,
        }
    }
}

/// Affine map between the free variables and scaled coordinates `[0, SCALED_SPAN]`.
struct Scaling {
    template: Vec<f64>,
    active: Vec<usize>,
    lo: Vec<f64>,
    hi: Vec<f64>,
    unit: Vec<f64>,
}

impl Scaling {
    fn new(bounds: &Bounds, x0: &[f64]) -> Self {
        let active: Vec<usize> = (0..bounds.len()).filter(|&i| bounds.hi()[i] > bounds.lo()[i]).collect();
        let unit = active
            .iter()
            .map(|&i| (bounds.hi()[i] - bounds.lo()[i]) / SCALED_SPAN)
            .collect();
        Scaling {
            template: x0.to_vec(),
            lo: bounds.lo().to_vec(),
            hi: bounds.hi().to_vec(),
            active,
            unit,
        }
    }

    fn dim(&self) -> usize {
        self.active.len()
    }

    fn to_x(&self, u: &DVector<f64>) -> Vec<f64> {
        let mut x = self.template.clone();
        for (k, &i) in self.active.iter().enumerate() {
            x[i] = (self.lo[i] + u[k] * self.unit[k]).clamp(self.lo[i], self.hi[i]);
        }
        x
    }

    fn to_u(&self, x: &[f64]) -> DVector<f64> {
        DVector::from_iterator(
            self.dim(),
            self.active.iter().zip(&self.unit).map(|(&i, s)| (x[i] - self.lo[i]) / s),
        )
    }
}

/// Minimizer of `g·d` over `|d| ≤ rho` and `lo ≤ d ≤ hi` (componentwise).
/// The solution is `clamp(−t g)` for the `t` that meets the ball.
fn trust_step(g: &DVector<f64>, lo: &DVector<f64>, hi: &DVector<f64>, rho: f64) -> DVector<f64> {
    let at = |t: f64| DVector::from_iterator(g.len(), (0..g.len()).map(|i| (-t * g[i]).clamp(lo[i], hi[i])));
    if g.norm() == 0.0 {
        return DVector::zeros(g.len());
    }
    // beyond t_max every moving component sits on its bound
    let t_max = (0..g.len())
        .filter(|&i| g[i] != 0.0)
        .map(|i| if g[i] < 0.0 { hi[i] / -g[i] } else { -lo[i] / g[i] })
        .fold(0.0, f64::max);
    let corner = at(t_max);
    if corner.norm() <= rho {
        return corner;
    }
    let (mut a, mut b) = (0.0, t_max);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if at(m).norm() < rho {
            a = m;
        } else {
            b = m;
        }
        if b - a <= 1e-15 * b {
            break;
        }
    }
    at(a)
}

/// Trust radius `delta`, snapped to the resolution `rho` when within 1.5 of it.
fn shrink(delta: f64, rho: f64) -> f64 {
    if delta <= 1.5 * rho {
        rho
    } else {
        delta
    }
}

struct Simplex {
    points: Vec<DVector<f64>>,
    values: Vec<f64>,
}

struct Model {
    best: usize,
    /// Vertex index of each edge (column of the edge matrix).
    others: Vec<usize>,
    inv: DMatrix<f64>,
    grad: DVector<f64>,
}

impl Simplex {
    fn best(&self) -> usize {
        let mut b = 0;
        for (i, &v) in self.values.iter().enumerate() {
            if v < self.values[b] {
                b = i;
            }
        }
        b
    }

    fn edges(&self, pivot: &DVector<f64>, skip: usize) -> DMatrix<f64> {
        let cols: Vec<DVector<f64>> = self
            .points
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != skip)
            .map(|(_, p)| p - pivot)
            .collect();
        DMatrix::from_columns(&cols)
    }

    fn model(&self) -> Option<Model> {
        let best = self.best();
        let pivot = &self.points[best];
        let others: Vec<usize> = (0..self.points.len()).filter(|&j| j != best).collect();
        let a = self.edges(pivot, best);
        let inv = a.clone().try_inverse()?;
        let df = DVector::from_iterator(others.len(), others.iter().map(|&j| self.values[j] - self.values[best]));
        let grad = inv.transpose() * df;
        Some(Model { best, others, inv, grad })
    }

    /// Volume-like score of the simplex with vertex `j` replaced by `p`.
    fn volume_without(&self, j: usize, p: &DVector<f64>) -> f64 {
        let keep: Vec<&DVector<f64>> = self
            .points
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != j)
            .map(|(_, q)| q)
            .collect();
        let pivot = keep[0];
        let cols: Vec<DVector<f64>> = keep[1..].iter().map(|q| *q - pivot).chain(std::iter::once(p - pivot)).collect();
        DMatrix::from_columns(&cols).determinant().abs()
    }
}

/// Bounded minimization from a feasible `x0`. Every call of `f` is inside
/// `bounds`. Non-finite values are counted as rejected and the point is
/// discarded.
pub fn minimize_cobyla(
    f: impl FnMut(&[f64]) -> f64,
    x0: &[f64],
    bounds: &Bounds,
    s: &CobylaSettings,
) -> Result<OptimizerReport> {
    if !(s.rhobeg > s.rhoend && s.rhoend > 0.0 && s.rhobeg.is_finite()) {
        return Err(Error::Validation(format!(
            "need rhobeg > rhoend > 0, got {} and {}",
            s.rhobeg, s.rhoend
        )));
    }
    if !bounds.is_finite() {
        return Err(Error::Validation("the trust-region method needs finite bounds".into()));
    }
    if s.max_evals == 0 {
        return Err(Error::Validation("max_evals must be positive".into()));
    }
    bounds.check_start(x0)?;
    let scaling = Scaling::new(bounds, x0);
    let n = scaling.dim();
    let mut rec = Recorder::new(f);
    let f0 = rec
        .eval(x0)
        .ok_or_else(|| Error::Evaluation("objective is not finite at the start point".into()))?;
    if n == 0 {
        return rec.finish(Termination::Stall);
    }
    let lo_u = DVector::zeros(n);
    let hi_u = DVector::from_element(n, SCALED_SPAN);
    let u0 = scaling.to_u(x0);
    let mut rho = s.rhobeg;
    let mut delta = rho;
    let max_delta = SCALED_SPAN * (n as f64).sqrt();
    let mut simplex = Simplex {
        points: vec![u0.clone()],
        values: vec![f0],
    };

    // initial vertices along the axes, flipped inward at an upper bound
    for k in 0..n {
        if rec.n_evals >= s.max_evals {
            return rec.finish(Termination::MaxEvals);
        }
        let up = SCALED_SPAN - u0[k];
        let down = u0[k];
        let mut steps = if up >= rho || up >= down {
            vec![rho.min(up), -rho.min(down)]
        } else {
            vec![-rho.min(down), rho.min(up)]
        };
        steps.retain(|v| *v != 0.0);
        let mut placed = false;
        for step in steps {
            if rec.n_evals >= s.max_evals {
                return rec.finish(Termination::MaxEvals);
            }
            let mut p = u0.clone();
            p[k] += step;
            if let Some(v) = rec.eval(&scaling.to_x(&p)) {
                simplex.points.push(p);
                simplex.values.push(v);
                placed = true;
                break;
            }
        }
        if !placed {
            return rec.finish(Termination::Stall);
        }
    }

    let converged = |rho: &mut f64| -> bool {
        if *rho <= s.rhoend * (1.0 + 1e-12) {
            return true;
        }
        *rho *= 0.5;
        if *rho <= 1.5 * s.rhoend {
            *rho = s.rhoend;
        }
        false
    };

    let mut trust_steps = 0usize;
    let mut check_geometry = false;
    loop {
        if rec.n_evals >= s.max_evals {
            return rec.finish(Termination::MaxEvals);
        }
        let Some(model) = simplex.model() else {
            // degenerate simplex: rebuild it around the best point
            let b = simplex.best();
            let pivot = simplex.points[b].clone();
            let fb = simplex.values[b];
            simplex = Simplex {
                points: vec![pivot],
                values: vec![fb],
            };
            for k in 0..n {
                if rec.n_evals >= s.max_evals {
                    return rec.finish(Termination::MaxEvals);
                }
                let base = &simplex.points[0];
                let step = if SCALED_SPAN - base[k] >= base[k] { rho.min(SCALED_SPAN - base[k]) } else { -rho.min(base[k]) };
                let mut p = base.clone();
                p[k] += step;
                match rec.eval(&scaling.to_x(&p)) {
                    Some(v) => {
                        simplex.points.push(p);
                        simplex.values.push(v);
                    }
                    None => return rec.finish(Termination::Stall),
                }
            }
            continue;
        };
        let pivot = simplex.points[model.best].clone();
        let fb = simplex.values[model.best];

        // poorest-placed vertex, if any is too far or too flat
        let mut bad: Option<(usize, f64)> = None;
        for (col, &j) in model.others.iter().enumerate() {
            let dist = (&simplex.points[j] - &pivot).norm();
            if dist > FAR * delta && bad.is_none_or(|(_, d)| dist > d) {
                bad = Some((col, dist));
            }
        }
        if bad.is_none() {
            for col in 0..model.others.len() {
                let vsig = 1.0 / model.inv.row(col).norm();
                if vsig < FLAT * delta && bad.is_none_or(|(_, v)| vsig < v) {
                    bad = Some((col, vsig));
                }
            }
        }

        if check_geometry {
            check_geometry = false;
            match bad {
                Some((col, _)) => {
                    let j = model.others[col];
                    let r: DVector<f64> = model.inv.row(col).transpose();
                    let len = GEOMETRY_STEP * delta;
                    let dir = r.normalize();
                    let first = if model.grad.dot(&dir) <= 0.0 { 1.0 } else { -1.0 };
                    let feasible = |d: &DVector<f64>| {
                        let p = &pivot + d;
                        (0..n).all(|i| p[i] >= -1e-15 && p[i] <= SCALED_SPAN + 1e-15)
                    };
                    let mut step = [first, -first].into_iter().map(|sg| &dir * (sg * len)).find(feasible);
                    if step.is_none() {
                        let i = r.iamax();
                        let up = SCALED_SPAN - pivot[i];
                        let mut d = DVector::zeros(n);
                        d[i] = if up >= pivot[i] { len.min(up) } else { -len.min(pivot[i]) };
                        step = Some(d);
                    }
                    let p = (&pivot + step.expect("set above")).zip_map(&hi_u, |v, h| v.clamp(0.0, h));
                    match rec.eval(&scaling.to_x(&p)) {
                        Some(v) => {
                            simplex.points[j] = p;
                            simplex.values[j] = v;
                        }
                        None => return rec.finish(Termination::Stall),
                    }
                }
                None if delta <= rho => {
                    if converged(&mut rho) {
                        return rec.finish(Termination::TrustRadiusConverged);
                    }
                    delta = (0.5 * delta).max(rho);
                }
                // the trust radius was cut by the failed step; retry with it
                None => {}
            }
            continue;
        }

        let d = trust_step(&model.grad, &(&lo_u - &pivot), &(&hi_u - &pivot), delta);
        let dn = d.norm();
        if dn < 0.5 * rho {
            delta = shrink(0.1 * delta, rho);
            check_geometry = true;
            continue;
        }
        if s.max_trust_steps.is_some_and(|m| trust_steps >= m) {
            return rec.finish(Termination::MaxEvals);
        }
        trust_steps += 1;
        let p = (&pivot + &d).zip_map(&hi_u, |v, h| v.clamp(0.0, h));
        let Some(v) = rec.eval(&scaling.to_x(&p)) else {
            delta = shrink(0.5 * delta, rho);
            check_geometry = true;
            continue;
        };
        let pred = -model.grad.dot(&d);
        let ratio = if pred > 0.0 { (fb - v) / pred } else { -1.0 };
        delta = if ratio <= POOR_RATIO {
            shrink(0.5 * delta, rho)
        } else if ratio <= GOOD_RATIO {
            shrink((0.5 * delta).max(dn), rho)
        } else {
            shrink((0.5 * delta).max(2.0 * dn), rho).min(max_delta.max(rho))
        };

        // replace the vertex whose removal keeps the simplex fullest,
        // favouring vertices far from the new best point
        let new_best = if v < fb { &p } else { &pivot };
        let mut pick: Option<(usize, f64)> = None;
        for j in 0..simplex.points.len() {
            if j == model.best && v >= fb {
                continue;
            }
            let far = ((&simplex.points[j] - new_best).norm() / delta).max(1.0);
            let score = simplex.volume_without(j, &p) * far * far;
            if pick.is_none_or(|(_, sc)| score > sc) {
                pick = Some((j, score));
            }
        }
        if let Some((j, score)) = pick {
            if score > 0.0 {
                simplex.points[j] = p;
                simplex.values[j] = v;
            }
        }
        if ratio < POOR_RATIO {
            check_geometry = true;
        }
    }
}
