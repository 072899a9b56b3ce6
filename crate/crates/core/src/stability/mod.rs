//! Stability regions of the randomized scheme on the linear test equation
//! `z' = λ z`, where one step multiplies the state by `p(hλ) = tau (hλ)^2 + hλ + 1`.
//!
//! | region | membership of `z = hλ` |
//! |--------|------------------------|
//! | MS (mean-square) | `E|p_1(z)|^2 < 1` |
//! | AS (almost sure) | `E ln|p_1(z)| < 0`, i.e. `F(Re z, Im z) < 0` |
//! | SP (in probability) | same set as AS |
//! | Mid (deterministic midpoint) | `|z^2/2 + z + 1| < 1` |

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};

mod closed_form;
mod functional;
mod quadrature;
mod region;
mod verify;

pub use closed_form::{f_value, g_antiderivative, ln_moment2, NEAR_LOCUS};
pub use functional::{
    discriminant, f_ab, ms_moment, p_eval, phi_mid, phi_ms, quadratic_coefficients, singular_case, SingularCase,
    CIRCLE_TOL,
};
pub use quadrature::{f_quadrature, integrate, ln_moment2_quadrature, QuadResult, QUAD_TOL};
pub use region::{
    in_region, indicator, interval_endpoints, region_area, region_grid, AreaEstimate, PlotBox, RegionGrid, AREA_RADIUS,
};
pub use verify::{mc_verify, Outcome, Verdict, CONFIDENCE_Z};

/// `z = a + bi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexPoint {
    pub a: f64,
    pub b: f64,
}

impl ComplexPoint {
    pub const fn new(a: f64, b: f64) -> Self {
        Self { a, b }
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.a, self.b)
    }

    pub fn norm_sqr(self) -> f64 {
        self.a * self.a + self.b * self.b
    }

    pub fn conj(self) -> Self {
        Self::new(self.a, -self.b)
    }
}

impl From<Complex64> for ComplexPoint {
    fn from(z: Complex64) -> Self {
        Self::new(z.re, z.im)
    }
}

impl FromStr for ComplexPoint {
    type Err = Error;

    /// Parses `"a,b"`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("expected `re,im`, got `{s}`"));
        let (re, im) = s.split_once(',').ok_or_else(bad)?;
        let a: f64 = re.trim().parse().map_err(|_| bad())?;
        let b: f64 = im.trim().parse().map_err(|_| bad())?;
        if !(a.is_finite() && b.is_finite()) {
            return Err(bad());
        }
        Ok(Self::new(a, b))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegionKind {
    MeanSquare,
    Asymptotic,
    /// Stability in probability; the same set as [`RegionKind::Asymptotic`].
    InProbability,
    Midpoint,
}

impl RegionKind {
    pub const ALL: [RegionKind; 4] = [
        RegionKind::MeanSquare,
        RegionKind::Asymptotic,
        RegionKind::InProbability,
        RegionKind::Midpoint,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RegionKind::MeanSquare => "ms",
            RegionKind::Asymptotic => "as",
            RegionKind::InProbability => "sp",
            RegionKind::Midpoint => "mid",
        }
    }

    /// The kind whose indicator is actually evaluated.
    pub fn canonical(self) -> Self {
        match self {
            RegionKind::InProbability => RegionKind::Asymptotic,
            k => k,
        }
    }
}

impl fmt::Display for RegionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RegionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ms" => Ok(RegionKind::MeanSquare),
            "as" => Ok(RegionKind::Asymptotic),
            "sp" => Ok(RegionKind::InProbability),
            "mid" => Ok(RegionKind::Midpoint),
            other => Err(Error::InvalidParameter(format!("unknown region kind `{other}`"))),
        }
    }
}
