//! Inexact information: `f~ = f + p` with `norm1(p) <= delta` at every call.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::rng::RngStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NoiseKind {
    None,
    /// `+delta * e_1`
    ConstPlus,
    /// `-delta * e_1`
    ConstMinus,
    /// Independent coordinates, uniform on `[-delta/d, delta/d]`.
    Uniform,
    /// Scalar relative error `delta * alpha * value`, `alpha` uniform, clamped to `[-delta, delta]`.
    Relative,
}

impl NoiseKind {
    pub fn name(self) -> &'static str {
        match self {
            NoiseKind::None => "none",
            NoiseKind::ConstPlus => "const+",
            NoiseKind::ConstMinus => "const-",
            NoiseKind::Uniform => "uniform",
            NoiseKind::Relative => "relative",
        }
    }
}

impl fmt::Display for NoiseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NoiseKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "none" => NoiseKind::None,
            "const+" | "const_plus" => NoiseKind::ConstPlus,
            "const-" | "const_minus" => NoiseKind::ConstMinus,
            "uniform" => NoiseKind::Uniform,
            "relative" => NoiseKind::Relative,
            other => return Err(Error::InvalidParameter(format!("unknown noise kind `{other}`"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    kind: NoiseKind,
    delta: f64,
    alpha_bound: f64,
    perturb_initial: bool,
}

impl NoiseSpec {
    pub fn new(kind: NoiseKind, delta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&delta) {
            return Err(Error::InvalidParameter(format!("delta {delta} not in [0, 1]")));
        }
        Ok(Self {
            kind,
            delta,
            alpha_bound: 1.0,
            perturb_initial: false,
        })
    }

    /// Exact information.
    pub fn none() -> Self {
        Self {
            kind: NoiseKind::None,
            delta: 0.0,
            alpha_bound: 1.0,
            perturb_initial: false,
        }
    }

    pub fn with_alpha_bound(mut self, alpha_bound: f64) -> Result<Self> {
        if !(alpha_bound >= 0.0 && alpha_bound.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "alpha bound {alpha_bound} must be finite and >= 0"
            )));
        }
        self.alpha_bound = alpha_bound;
        Ok(self)
    }

    /// Also perturb the initial value at the start of a trajectory. Off by default:
    /// only right-hand-side evaluations are noisy.
    pub fn with_initial_perturbation(mut self, on: bool) -> Self {
        self.perturb_initial = on;
        self
    }

    /// Same kind at another level.
    pub fn at_level(self, delta: f64) -> Result<Self> {
        let mut spec = Self::new(self.kind, delta)?;
        spec.alpha_bound = self.alpha_bound;
        spec.perturb_initial = self.perturb_initial;
        Ok(spec)
    }

    pub fn kind(&self) -> NoiseKind {
        self.kind
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn alpha_bound(&self) -> f64 {
        self.alpha_bound
    }

    pub fn perturbs_initial(&self) -> bool {
        self.perturb_initial
    }

    /// True when no draw is ever consumed and the perturbation is identically zero.
    pub fn is_exact(&self) -> bool {
        self.kind == NoiseKind::None || self.delta == 0.0
    }

    pub fn check_dimension(&self, dim: usize) -> Result<()> {
        if dim == 0 {
            return Err(Error::Domain("perturbation of an empty vector".into()));
        }
        if self.kind == NoiseKind::Relative && dim > 1 {
            return Err(Error::Unsupported(format!("relative noise in dimension {dim}")));
        }
        Ok(())
    }

    /// Writes a perturbation for `value` into `out`. Uniform noise consumes
    /// `dim` draws, relative noise one, the other kinds none.
    pub fn sample_into(&self, value: &[f64], stream: &mut RngStream, out: &mut [f64]) {
        let delta = self.delta;
        match self.kind {
            NoiseKind::None => out.fill(0.0),
            NoiseKind::ConstPlus | NoiseKind::ConstMinus => {
                out.fill(0.0);
                out[0] = if self.kind == NoiseKind::ConstPlus {
                    delta
                } else {
                    -delta
                };
            }
            NoiseKind::Uniform => {
                let d = out.len();
                // shrink by a few ulps so that the rounded 1-norm stays within delta
                let half_width = if d == 1 {
                    delta
                } else {
                    delta / d as f64 * (1.0 - 2.0 * d as f64 * f64::EPSILON)
                };
                for p in out.iter_mut() {
                    *p = stream.uniform_in(-half_width, half_width);
                }
            }
            NoiseKind::Relative => {
                let alpha = stream.uniform_in(-self.alpha_bound, self.alpha_bound);
                out[0] = (delta * alpha * value[0]).clamp(-delta, delta);
            }
        }
    }

    /// The perturbation vector alone.
    pub fn sample(&self, value: &[f64], stream: &mut RngStream) -> Result<Vec<f64>> {
        self.check_dimension(value.len())?;
        let mut p = vec![0.0; value.len()];
        self.sample_into(value, stream, &mut p);
        Ok(p)
    }

    /// Adds a fresh perturbation to `value` in place.
    #[inline]
    pub(crate) fn apply(&self, value: &mut [f64], stream: &mut RngStream) {
        match self.kind {
            NoiseKind::None => {}
            NoiseKind::ConstPlus => value[0] += self.delta,
            NoiseKind::ConstMinus => value[0] -= self.delta,
            NoiseKind::Uniform | NoiseKind::Relative => {
                let mut p = [0.0; 8];
                if value.len() <= p.len() {
                    let p = &mut p[..value.len()];
                    self.sample_into(value, stream, p);
                    value.iter_mut().zip(p.iter()).for_each(|(v, q)| *v += q);
                } else {
                    let mut p = vec![0.0; value.len()];
                    self.sample_into(value, stream, &mut p);
                    value.iter_mut().zip(p).for_each(|(v, q)| *v += q);
                }
            }
        }
    }
}

impl Default for NoiseSpec {
    fn default() -> Self {
        Self::none()
    }
}

/// `value + p` for a fresh perturbation `p`.
pub fn perturb(value: &[f64], spec: &NoiseSpec, stream: &mut RngStream) -> Result<Vec<f64>> {
    spec.check_dimension(value.len())?;
    let mut v = value.to_vec();
    spec.apply(&mut v, stream);
    Ok(v)
}

/// Perturbed initial value, with the same semantics as [`perturb`].
pub fn perturb_initial(eta: &[f64], spec: &NoiseSpec, stream: &mut RngStream) -> Result<Vec<f64>> {
    perturb(eta, spec, stream)
}
