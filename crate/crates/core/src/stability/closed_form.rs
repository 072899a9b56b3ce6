//! Closed forms for `F(a, b) = 1/2 E ln f_{a,b}(tau)` and `E (ln f_{a,b}(tau))^2`.
//!
//! `F` has three explicit branches: the real axis, the circle
//! `b^2 = -a^2 - 2a` (where `f_{a,b}` is a perfect square), and everything
//! else. The generic branch degenerates as the vertex value `Q` tends to 0, so
//! within [`NEAR_LOCUS`] of the axis, the circle or the origin the integral is
//! evaluated by quadrature instead.

use super::functional::{circle_residual, on_circle, singular_case, SingularCase};
use super::quadrature::{f_quadrature, ln_moment2_quadrature};
use crate::error::Result;

/// Distance to a degenerate locus below which quadrature replaces the generic branch.
pub const NEAR_LOCUS: f64 = 1e-6;

const HALF_SQRT3: f64 = 0.866_025_403_784_438_6;

/// `F(a, 0)` for `a` not in `{-1, 0}`.
fn f_axis(a: f64) -> f64 {
    let a2 = a * a;
    let q = a2 + a + 1.0;
    q / a2 * q.ln() - (a + 1.0) / a2 * (a + 1.0).abs().ln() - 1.0
}

/// `F(a, b)` on the circle `b^2 = -a^2 - 2a`, `a` not in `{-2, -1/2, 0}`.
fn f_circle(a: f64) -> f64 {
    (2.0 * a + 1.0) / (2.0 * a) * (2.0 * a + 1.0).abs().ln() - 1.0
}

/// Generic branch, `b > 0` off the circle.
fn f_generic(a: f64, b: f64) -> f64 {
    let r2 = a * a + b * b;
    let qa = r2 * r2;
    let qb = 2.0 * (a * a + a * a * a + a * b * b - b * b);
    let qc = (a + 1.0) * (a + 1.0) + b * b;
    // f(1) = |z^2 + z + 1|^2, kept as a sum of squares
    let re = a * a - b * b + a + 1.0;
    let im = 2.0 * a * b + b;
    let f1 = re * re + im * im;
    let p = -qb / (2.0 * qa);
    // sqrt(Q / A) = b |2a + a^2 + b^2| / (a^2 + b^2)^2
    let s = b * (2.0 * a + r2).abs() / qa;
    0.5 * (1.0 - p) * f1.ln() - 1.0 + 0.5 * p * qc.ln() + s * (((1.0 - p) / s).atan() - (-p / s).atan())
}

fn near_degenerate(a: f64, b: f64) -> bool {
    b < NEAR_LOCUS || circle_residual(a, b).abs() < NEAR_LOCUS || a * a + b * b < NEAR_LOCUS
}

/// `F(a, b)`, finite everywhere; `z = a + bi` is asymptotically stable iff `F < 0`.
pub fn f_value(a: f64, b: f64) -> f64 {
    let b = b.abs();
    if b == 0.0 {
        if a == 0.0 {
            return 0.0;
        }
        if a == -1.0 {
            return -1.0;
        }
    }
    if (a + 0.5).abs() <= 1e-12 && (b - HALF_SQRT3).abs() <= 1e-12 {
        return -1.0;
    }
    if a * a + b * b < NEAR_LOCUS {
        return quadrature_or_generic(a, b);
    }
    if b == 0.0 {
        return f_axis(a);
    }
    if a > -2.0 && a < 0.0 && on_circle(a, b) {
        return f_circle(a);
    }
    if near_degenerate(a, b) {
        return quadrature_or_generic(a, b);
    }
    f_generic(a, b)
}

fn quadrature_or_generic(a: f64, b: f64) -> f64 {
    // the quadrature converges on all of these inputs; the fallback only guards totality
    f_quadrature(a, b).unwrap_or_else(|_| f_generic(a, b))
}

/// `G(x) = x (ln x)^2 - 2 x ln x + 2 x`, extended by `G(0) = 0`.
pub fn g_antiderivative(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let l = x.ln();
    x * l * l - 2.0 * x * l + 2.0 * x
}

/// `E (ln f_{a,b}(tau))^2`: closed form on the two singular families, quadrature elsewhere.
pub fn ln_moment2(a: f64, b: f64) -> Result<f64> {
    let b = b.abs();
    if a == 0.0 && b == 0.0 {
        return Ok(0.0);
    }
    match singular_case(a, b) {
        SingularCase::AxisRoot => Ok(4.0 / (a * a) * (g_antiderivative(-a - 1.0) + g_antiderivative(a * a + a + 1.0))),
        // f = (2a (t - t0))^2 on the circle, so the prefactor is 4 / |2a|
        SingularCase::CircleRoot => Ok(-2.0 / a * (g_antiderivative(1.0) + g_antiderivative(-2.0 * a - 1.0))),
        SingularCase::Regular => ln_moment2_quadrature(a, b),
    }
}
