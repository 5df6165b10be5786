//! Derivative-free bound-constrained minimization.
//!
//! [`minimize_cobyla`] is a linear-model trust-region method in the style of
//! Powell's COBYLA, with the box bounds treated as exact linear constraints
//! so that every evaluation is feasible. [`minimize_neldermead`] is a
//! simplex fallback that clips to the box and penalizes the clipped
//! distance.

mod cobyla;
mod neldermead;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use cobyla::{minimize_cobyla, CobylaSettings};
pub use neldermead::{minimize_neldermead, NelderMeadSettings};

/// Per-variable `[lo, hi]` box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl Bounds {
    pub fn new(pairs: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let (lo, hi): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        for (i, (&l, &h)) in lo.iter().zip(&hi).enumerate() {
            if l.is_nan() || h.is_nan() || l > h {
                return Err(Error::Validation(format!("invalid bounds [{l}, {h}] for variable {i}")));
            }
        }
        Ok(Bounds { lo, hi })
    }

    /// `n` variables with no bounds (Nelder–Mead only).
    pub fn unbounded(n: usize) -> Self {
        Bounds {
            lo: vec![f64::NEG_INFINITY; n],
            hi: vec![f64::INFINITY; n],
        }
    }

    pub fn uniform(n: usize, lo: f64, hi: f64) -> Result<Self> {
        Bounds::new(std::iter::repeat_n((lo, hi), n))
    }

    pub fn len(&self) -> usize {
        self.lo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lo.is_empty()
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn is_finite(&self) -> bool {
        self.lo.iter().chain(&self.hi).all(|v| v.is_finite())
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.len() && x.iter().zip(&self.lo).zip(&self.hi).all(|((v, l), h)| v >= l && v <= h)
    }

    pub fn clip(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.lo).zip(&self.hi).map(|((v, l), h)| v.clamp(*l, *h)).collect()
    }

    fn check_start(&self, x0: &[f64]) -> Result<()> {
        if x0.len() != self.len() {
            return Err(Error::Validation(format!(
                "start point has {} entries for {} bounds",
                x0.len(),
                self.len()
            )));
        }
        for (i, &v) in x0.iter().enumerate() {
            if !(v >= self.lo[i] && v <= self.hi[i]) {
                return Err(Error::Bounds {
                    name: format!("x[{i}]"),
                    value: v,
                    lo: self.lo[i],
                    hi: self.hi[i],
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    MaxEvals,
    /// Trust radius (or simplex size) reached its final value.
    TrustRadiusConverged,
    /// No further progress was possible, e.g. with no free variables.
    Stall,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerReport {
    pub best_x: Vec<f64>,
    pub best_f: f64,
    /// Objective calls, including rejected ones.
    pub n_evals: usize,
    /// Accepted evaluations in call order.
    pub trace: Vec<(Vec<f64>, f64)>,
    pub termination: Termination,
    /// Calls that returned a non-finite value.
    pub rejected: usize,
}

impl OptimizerReport {
    /// Running minimum of the trace.
    pub fn best_so_far(&self) -> Vec<f64> {
        self.trace
            .iter()
            .scan(f64::INFINITY, |m, (_, f)| {
                *m = m.min(*f);
                Some(*m)
            })
            .collect()
    }
}

/// What the per-step budget counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IterationMeaning {
    /// Objective evaluations.
    #[default]
    Evals,
    /// Trust-region iterations of COBYLA.
    TrustSteps,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    #[default]
    Cobyla,
    NelderMead,
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "cobyla" => Ok(Method::Cobyla),
            "neldermead" | "nm" => Ok(Method::NelderMead),
            other => Err(Error::Validation(format!("unknown optimizer `{other}`"))),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Cobyla => "cobyla",
            Method::NelderMead => "nelder_mead",
        })
    }
}

/// Optimizer choice and budget as configured for a training step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerSettings {
    pub method: Method,
    pub rhobeg: f64,
    /// Defaults to `1e-4 · rhobeg`.
    pub rhoend: Option<f64>,
    pub max_evals: usize,
    pub iters_mean: IterationMeaning,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        OptimizerSettings {
            method: Method::Cobyla,
            rhobeg: 0.1,
            rhoend: None,
            max_evals: 50,
            iters_mean: IterationMeaning::Evals,
        }
    }
}

impl OptimizerSettings {
    pub fn minimize(&self, f: impl FnMut(&[f64]) -> f64, x0: &[f64], bounds: &Bounds) -> Result<OptimizerReport> {
        match self.method {
            Method::Cobyla => {
                let mut s = CobylaSettings {
                    rhobeg: self.rhobeg,
                    rhoend: self.rhoend.unwrap_or(1e-4 * self.rhobeg),
                    max_evals: self.max_evals,
                    max_trust_steps: None,
                };
                if self.iters_mean == IterationMeaning::TrustSteps {
                    // each trust step may be preceded by geometry repairs
                    s.max_evals = self.max_evals * (x0.len() + 2) + x0.len() + 1;
                    s.max_trust_steps = Some(self.max_evals);
                }
                minimize_cobyla(f, x0, bounds, &s)
            }
            Method::NelderMead => minimize_neldermead(
                f,
                x0,
                bounds,
                &NelderMeadSettings {
                    max_evals: self.max_evals,
                    ..Default::default()
                },
            ),
        }
    }
}

/// Shared bookkeeping: counts calls, keeps the trace and the best point.
pub(crate) struct Recorder<F> {
    f: F,
    pub trace: Vec<(Vec<f64>, f64)>,
    pub n_evals: usize,
    pub rejected: usize,
    pub best: Option<(Vec<f64>, f64)>,
}

impl<F: FnMut(&[f64]) -> f64> Recorder<F> {
    pub fn new(f: F) -> Self {
        Recorder {
            f,
            trace: Vec::new(),
            n_evals: 0,
            rejected: 0,
            best: None,
        }
    }

    /// Evaluates `x`; `None` when the value is not finite.
    pub fn eval(&mut self, x: &[f64]) -> Option<f64> {
        self.n_evals += 1;
        let v = (self.f)(x);
        if !v.is_finite() {
            self.rejected += 1;
            log::debug!("rejected non-finite objective value at {x:?}");
            return None;
        }
        self.trace.push((x.to_vec(), v));
        if self.best.as_ref().is_none_or(|(_, b)| v < *b) {
            self.best = Some((x.to_vec(), v));
        }
        Some(v)
    }

    pub fn finish(self, termination: Termination) -> Result<OptimizerReport> {
        let (best_x, best_f) = self
            .best
            .ok_or_else(|| Error::Evaluation("no finite objective value was obtained".into()))?;
        Ok(OptimizerReport {
            best_x,
            best_f,
            n_evals: self.n_evals,
            trace: self.trace,
            termination,
            rejected: self.rejected,
        })
    }
}
