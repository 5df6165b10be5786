use serde::{Deserialize, Serialize};

use super::Value;
use crate::error::{Error, Result};
use crate::qcore::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnvelopeKind {
    Gaussian,
    Drag,
    GaussianSquare,
}

/// Parametric pulse shape. `duration`, `sigma`, `beta` and `width` are in
/// samples; `amp` is a fraction of full drive and may be a parameter
/// reference until bound. `angle` rotates the complex envelope.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Envelope {
    pub kind: EnvelopeKind,
    pub duration: usize,
    pub sigma: f64,
    pub amp: Value,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub beta: f64,
    #[serde(default, skip_serializing_if = "is_zero_usize")]
    pub width: usize,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub angle: f64,
}

fn is_zero(x: &f64) -> bool {
    *x == 0.0
}

fn is_zero_usize(x: &usize) -> bool {
    *x == 0
}

impl Envelope {
    pub fn gaussian(duration: usize, sigma: f64, amp: impl Into<Value>) -> Self {
        Envelope {
            kind: EnvelopeKind::Gaussian,
            duration,
            sigma,
            amp: amp.into(),
            beta: 0.0,
            width: 0,
            angle: 0.0,
        }
    }

    pub fn drag(duration: usize, sigma: f64, beta: f64, amp: impl Into<Value>) -> Self {
        Envelope {
            kind: EnvelopeKind::Drag,
            beta,
            ..Self::gaussian(duration, sigma, amp)
        }
    }

    pub fn gaussian_square(duration: usize, sigma: f64, width: usize, amp: impl Into<Value>) -> Self {
        Envelope {
            kind: EnvelopeKind::GaussianSquare,
            width,
            ..Self::gaussian(duration, sigma, amp)
        }
    }

    pub fn with_angle(mut self, angle: f64) -> Self {
        self.angle = angle;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.duration == 0 {
            return Err(Error::Validation("envelope duration must be positive".into()));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::Validation(format!("envelope sigma must be positive, got {}", self.sigma)));
        }
        if self.kind == EnvelopeKind::GaussianSquare && self.width >= self.duration {
            return Err(Error::Validation(format!(
                "flat-top width {} must be shorter than duration {}",
                self.width, self.duration
            )));
        }
        if !self.beta.is_finite() || !self.angle.is_finite() {
            return Err(Error::Validation("envelope beta/angle must be finite".into()));
        }
        Ok(())
    }

    /// Unit-amplitude real profile at sample `k` (peak 1) and its derivative
    /// with respect to `k`.
    fn profile(&self, k: usize) -> (f64, f64) {
        let s2 = self.sigma * self.sigma;
        match self.kind {
            EnvelopeKind::Gaussian | EnvelopeKind::Drag => {
                let c = (self.duration as f64 - 1.0) / 2.0;
                let x = k as f64 - c;
                let g = (-x * x / (2.0 * s2)).exp();
                (g, -x / s2 * g)
            }
            EnvelopeKind::GaussianSquare => {
                // sample centres at k + 1/2 so the shape is symmetric in time
                let x = k as f64 + 0.5;
                let rise = (self.duration - self.width) as f64 / 2.0;
                let fall = rise + self.width as f64;
                let d = if x < rise {
                    x - rise
                } else if x > fall {
                    x - fall
                } else {
                    0.0
                };
                let g = (-d * d / (2.0 * s2)).exp();
                (g, -d / s2 * g)
            }
        }
    }

    /// Sum of the unit profile over all samples, the pulse area in samples
    /// per unit amplitude.
    pub fn unit_area(&self) -> f64 {
        (0..self.duration).map(|k| self.profile(k).0).sum()
    }
}

/// Complex envelope value at sample `k` of a bound envelope.
pub fn sample_envelope(e: &Envelope, k: usize) -> Result<C64> {
    if k >= e.duration {
        return Err(Error::Validation(format!(
            "sample index {k} outside envelope of duration {}",
            e.duration
        )));
    }
    let amp = e.amp.fixed().ok_or_else(|| {
        Error::Binding(format!("envelope amplitude `{}` is unbound", e.amp))
    })?;
    Ok(sample_unchecked(e, amp, k))
}

pub(crate) fn sample_unchecked(e: &Envelope, amp: f64, k: usize) -> C64 {
    let (g, dg) = e.profile(k);
    let base = match e.kind {
        EnvelopeKind::Drag => C64::new(g, e.beta * dg),
        _ => C64::new(g, 0.0),
    };
    let rotated = if e.angle == 0.0 {
        base
    } else {
        base * C64::from_polar(1.0, e.angle)
    };
    rotated * amp
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_peaks_at_centre() {
        let e = Envelope::gaussian(161, 40.0, 0.3);
        let v = sample_envelope(&e, 80).unwrap();
        assert!((v.re - 0.3).abs() < 1e-15 && v.im == 0.0);
    }

    #[test]
    fn drag_quadrature_vanishes_at_centre() {
        let e = Envelope::drag(161, 40.0, 1.5, 0.2);
        assert_eq!(sample_envelope(&e, 80).unwrap().im, 0.0);
        assert!(sample_envelope(&e, 10).unwrap().im > 0.0);
    }

    #[test]
    fn gaussian_square_is_flat_on_top() {
        let e = Envelope::gaussian_square(736, 64.0, 480, 0.25);
        for k in [128, 300, 500, 607] {
            assert_eq!(sample_envelope(&e, k).unwrap(), C64::new(0.25, 0.0));
        }
        assert!(sample_envelope(&e, 0).unwrap().re < 0.25);
    }

    #[test]
    fn profiles_are_time_symmetric() {
        for e in [Envelope::gaussian(160, 40.0, 1.0), Envelope::gaussian_square(448, 64.0, 192, 1.0)] {
            for k in 0..e.duration {
                let a = sample_envelope(&e, k).unwrap();
                let b = sample_envelope(&e, e.duration - 1 - k).unwrap();
                assert!((a - b).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn out_of_range_and_unbound() {
        let e = Envelope::gaussian(10, 2.0, 1.0);
        assert!(sample_envelope(&e, 10).is_err());
        let p = Envelope::gaussian(10, 2.0, Value::param("a"));
        assert!(matches!(sample_envelope(&p, 0), Err(Error::Binding(_))));
    }

    #[test]
    fn invalid_shapes_rejected() {
        assert!(Envelope::gaussian(0, 1.0, 0.1).validate().is_err());
        assert!(Envelope::gaussian(10, 0.0, 0.1).validate().is_err());
        assert!(Envelope::gaussian_square(10, 1.0, 10, 0.1).validate().is_err());
    }

    #[test]
    fn angle_rotates_envelope() {
        let e = Envelope::gaussian(11, 2.0, 1.0).with_angle(std::f64::consts::FRAC_PI_2);
        let v = sample_envelope(&e, 5).unwrap();
        assert!(v.re.abs() < 1e-15 && (v.im - 1.0).abs() < 1e-15);
    }
}
