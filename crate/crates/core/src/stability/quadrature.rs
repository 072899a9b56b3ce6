//! Globally adaptive 15-point Gauss-Kronrod quadrature, and the integral
//! definitions of `F` and of the second moment of `ln f_{a,b}` evaluated with it.
//!
//! Logarithmic singularities are only ever placed at subinterval endpoints
//! (the vertex of `f_{a,b}` is a breakpoint), where the Kronrod nodes never
//! land; bisection towards the endpoint then converges geometrically.

#![allow(clippy::excessive_precision)] // published Kronrod constants

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::functional::{f_ab_squares, quadratic_coefficients};
use crate::error::{Error, Result};

/// Absolute tolerance used for `F` and the log second moment.
pub const QUAD_TOL: f64 = 1e-10;
const MAX_INTERVALS: usize = 20_000;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
}

#[derive(Clone, Copy)]
struct Piece {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}

impl Eq for Piece {}

impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> Piece {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Piece {
        lo,
        hi,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    }
}

/// `∫ f` over `[breaks[0], breaks[last]]`, splitting at every breakpoint first.
pub fn integrate<F: Fn(f64) -> f64>(f: F, breaks: &[f64], abs_tol: f64) -> Result<QuadResult> {
    if breaks.len() < 2 || breaks.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Domain("breakpoints must be strictly increasing".into()));
    }
    let mut heap: BinaryHeap<Piece> = breaks.windows(2).map(|w| gauss_kronrod(&f, w[0], w[1])).collect();
    loop {
        let (value, error) = heap.iter().fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error));
        if !value.is_finite() || !error.is_finite() {
            return Err(Error::QuadratureFailure {
                estimate: value,
                error,
                tolerance: abs_tol,
            });
        }
        if error <= abs_tol {
            return Ok(QuadResult {
                value,
                error,
                intervals: heap.len(),
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.lo + worst.hi);
        if heap.len() + 2 > MAX_INTERVALS || !(worst.lo < mid && mid < worst.hi) {
            return Err(Error::QuadratureFailure {
                estimate: value,
                error,
                tolerance: abs_tol,
            });
        }
        heap.push(gauss_kronrod(&f, worst.lo, mid));
        heap.push(gauss_kronrod(&f, mid, worst.hi));
    }
}

/// Breakpoints of `[0, 1]` for `f_{a,b}`: the vertex, when interior.
fn breaks_for(a: f64, b: f64) -> Vec<f64> {
    let (qa, qb, _) = quadratic_coefficients(a, b);
    let vertex = if qa > 0.0 { -qb / (2.0 * qa) } else { f64::NAN };
    if vertex > 0.0 && vertex < 1.0 {
        vec![0.0, vertex, 1.0]
    } else {
        vec![0.0, 1.0]
    }
}

/// `F(a, b) = 1/2 ∫_0^1 ln f_{a,b}(t) dt` by adaptive quadrature.
pub fn f_quadrature(a: f64, b: f64) -> Result<f64> {
    let b = b.abs();
    if a == 0.0 && b == 0.0 {
        return Ok(0.0);
    }
    let r = integrate(|t| 0.5 * f_ab_squares(a, b, t).ln(), &breaks_for(a, b), QUAD_TOL)?;
    Ok(r.value)
}

/// `∫_0^1 (ln f_{a,b}(t))^2 dt` by adaptive quadrature.
pub fn ln_moment2_quadrature(a: f64, b: f64) -> Result<f64> {
    let b = b.abs();
    if a == 0.0 && b == 0.0 {
        return Ok(0.0);
    }
    let r = integrate(
        |t| {
            let l = f_ab_squares(a, b, t).ln();
            l * l
        },
        &breaks_for(a, b),
        QUAD_TOL,
    )?;
    Ok(r.value)
}
