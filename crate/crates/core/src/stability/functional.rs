//! Amplification polynomial `p(z) = tau z^2 + z + 1` and the algebraic
//! indicators built from it.

use num_complex::Complex64;

use super::ComplexPoint;

/// Relative tolerance for membership of the circle `b^2 = -a^2 - 2a`.
pub const CIRCLE_TOL: f64 = 1e-12;

pub fn p_eval(z: ComplexPoint, tau: f64) -> Complex64 {
    let z = z.to_complex();
    tau * z * z + z + 1.0
}

/// `E|p_1(z)|^2` for `tau ~ U[0, 1]`.
pub fn ms_moment(z: ComplexPoint) -> f64 {
    1.0 + phi_ms(z)
}

/// `E|p_1(z)|^2 - 1`; negative exactly on the mean-square region.
pub fn phi_ms(z: ComplexPoint) -> f64 {
    let re = z.a;
    let m2 = z.norm_sqr();
    2.0 * re * (1.0 + 0.5 * m2) + 2.0 * re * re + m2 * m2 / 3.0
}

/// `|z^2/2 + z + 1|^2 - 1`; negative exactly on the midpoint region.
pub fn phi_mid(z: ComplexPoint) -> f64 {
    let re = z.a;
    let m2 = z.norm_sqr();
    2.0 * re * (1.0 + 0.5 * m2) + 2.0 * re * re + 0.25 * m2 * m2
}

/// Coefficients `(A, B, C)` of `f_{a,b}(t) = A t^2 + B t + C`.
pub fn quadratic_coefficients(a: f64, b: f64) -> (f64, f64, f64) {
    let r2 = a * a + b * b;
    (
        r2 * r2,
        2.0 * (a * a + a * a * a + a * b * b - b * b),
        (a + 1.0) * (a + 1.0) + b * b,
    )
}

/// `f_{a,b}(t) = |t (a+bi)^2 + a + bi + 1|^2` as a real quadratic in `t`.
pub fn f_ab(a: f64, b: f64, t: f64) -> f64 {
    let (qa, qb, qc) = quadratic_coefficients(a, b);
    (qa * t + qb) * t + qc
}

/// Same value as [`f_ab`], computed as a sum of two squares so it never
/// rounds below zero near a root.
#[inline]
pub(crate) fn f_ab_squares(a: f64, b: f64, t: f64) -> f64 {
    let re = t * (a * a - b * b) + a + 1.0;
    let im = t * 2.0 * a * b + b;
    re * re + im * im
}

/// Discriminant of `f_{a,b}`: `-4 b^2 (2a + a^2 + b^2)^2 <= 0`.
pub fn discriminant(a: f64, b: f64) -> f64 {
    let s = 2.0 * a + a * a + b * b;
    -4.0 * b * b * s * s
}

/// Residual of the circle `b^2 = -a^2 - 2a` (center -1, radius 1).
#[inline]
pub(crate) fn circle_residual(a: f64, b: f64) -> f64 {
    b * b + a * a + 2.0 * a
}

#[inline]
pub(crate) fn on_circle(a: f64, b: f64) -> bool {
    circle_residual(a, b).abs() <= CIRCLE_TOL * (a * a + b * b).max(1.0)
}

/// Where `f_{a,b}` vanishes somewhere on `[0, 1]`, making `ln f_{a,b}` singular.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SingularCase {
    /// `f_{a,b} > 0` on `[0, 1]`.
    Regular,
    /// `b = 0`, `a <= -1`: root `t0 = -(a+1)/a^2`.
    AxisRoot,
    /// `b^2 = -a^2 - 2a`, `a` in `(-2, -1/2]`: root `t0 = -1/(2a)`.
    CircleRoot,
}

pub fn singular_case(a: f64, b: f64) -> SingularCase {
    if b == 0.0 && a <= -1.0 {
        SingularCase::AxisRoot
    } else if a > -2.0 && a <= -0.5 && on_circle(a, b) {
        SingularCase::CircleRoot
    } else {
        SingularCase::Regular
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(a: f64, b: f64) -> ComplexPoint {
        ComplexPoint::new(a, b)
    }

    #[test]
    fn polynomial_values() {
        assert_eq!(p_eval(z(0.0, 0.0), 0.7), Complex64::new(1.0, 0.0));
        assert_eq!(p_eval(z(-1.0, 0.0), 0.0), Complex64::new(0.0, 0.0));
        assert_eq!(p_eval(z(-1.0, 0.0), 0.5), Complex64::new(0.5, 0.0));
    }

    #[test]
    fn moments_and_indicators() {
        assert_eq!(ms_moment(z(0.0, 0.0)), 1.0);
        assert!((ms_moment(z(-1.0, 0.0)) - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(phi_ms(z(0.0, 0.0)), 0.0);
        assert_eq!(phi_mid(z(0.0, 0.0)), 0.0);
        assert!((phi_mid(z(-1.0, 0.0)) + 0.75).abs() < 1e-15);
        assert_eq!(phi_mid(z(-2.0, 0.0)), 0.0);
        let w = z(-0.7, 1.3);
        let diff = phi_ms(w) - phi_mid(w);
        assert!((diff - w.norm_sqr().powi(2) / 12.0).abs() < 1e-14);
        assert_eq!(ms_moment(w) - 1.0, phi_ms(w));
    }

    #[test]
    fn ms_moment_by_monte_carlo_at_minus_one() {
        // |p_1(-1)|^2 = tau^2
        let mut s = crate::rng::RngStream::new(1, 0);
        let n = 1_000_000;
        let mean = (0..n).map(|_| s.uniform().powi(2)).sum::<f64>() / n as f64;
        assert!((mean - 1.0 / 3.0).abs() < 5.0 * (4.0f64 / 45.0).sqrt() / (n as f64).sqrt());
    }

    #[test]
    fn quadratic_form_special_cases() {
        for t in [0.0, 0.3, 1.0, 2.5] {
            assert_eq!(f_ab(0.0, 0.0, t), 1.0);
            assert_eq!(f_ab(-1.0, 0.0, t), t * t);
        }
    }

    #[test]
    fn discriminant_cases() {
        assert_eq!(discriminant(-3.0, 0.0), 0.0);
        assert_eq!(discriminant(-1.0, 1.0), 0.0);
        let a = -0.3f64;
        assert!(discriminant(a, (-a * a - 2.0 * a).sqrt()).abs() < 1e-15);
        assert!(discriminant(0.4, 0.9) < 0.0);
    }

    #[test]
    fn singular_classification() {
        assert_eq!(singular_case(-1.0, 0.0), SingularCase::AxisRoot);
        assert_eq!(singular_case(-5.0, 0.0), SingularCase::AxisRoot);
        assert_eq!(singular_case(-0.5, 3f64.sqrt() / 2.0), SingularCase::CircleRoot);
        assert_eq!(singular_case(-1.0, 1.0), SingularCase::CircleRoot);
        assert_eq!(singular_case(1.0, 1.0), SingularCase::Regular);
        assert_eq!(singular_case(-0.5, 0.0), SingularCase::Regular);
        assert_eq!(singular_case(-0.25, (0.25f64 * 1.75).sqrt()), SingularCase::Regular);
        assert_eq!(singular_case(-1.0, 1.0 + 1e-6), SingularCase::Regular);
    }

    #[test]
    fn roots_lie_in_unit_interval_exactly_in_singular_cases() {
        let a = -3.0;
        let t0 = -(a + 1.0) / (a * a);
        assert!(f_ab(a, 0.0, t0).abs() < 1e-14);
        let a = -1.5f64;
        let b = (-a * a - 2.0 * a).sqrt();
        let t0 = -1.0 / (2.0 * a);
        assert!(f_ab_squares(a, b, t0) < 1e-14);
    }
}
