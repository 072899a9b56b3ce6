//! Monte-Carlo check of region membership by simulating `V^k = prod_j p_j(z)`, `V^0 = 1`.
//!
//! Paths are tracked in log space. The AS/SP statistic is the mean of
//! `ln|p_j(z)|` over all `k_max * reps` factors, with a normal confidence band
//! whose variance comes from the closed-form second moment. The MS statistic
//! is the growth factor `m = E|p_1(z)|^2` of `E|V^k|^2 = m^k`, estimated by the
//! sample mean of `|p_j(z)|^2` with its sample variance.

use rayon::prelude::*;

use super::closed_form::{f_value, ln_moment2};
use super::functional::{ms_moment, p_eval};
use super::region::in_region;
use super::{ComplexPoint, RegionKind};
use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Half-width of the confidence band in standard errors.
pub const CONFIDENCE_Z: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Agree,
    Disagree,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Verdict {
    pub z: ComplexPoint,
    pub kind: RegionKind,
    /// Estimated log growth rate per step: mean `ln|p|` (AS/SP/Mid) or `ln m` (MS).
    pub drift: f64,
    /// Confidence band for `drift`.
    pub ci: (f64, f64),
    /// The same quantity from the closed form.
    pub expected_drift: f64,
    /// Closed-form membership.
    pub member: bool,
    /// Paths whose `|V^k_max|` exceeds the largest finite double.
    pub diverged_paths: usize,
    /// Paths with `|V^k_max| < |V^(k_max/2)|`.
    pub decaying_paths: usize,
    pub outcome: Outcome,
}

struct PathStats {
    sum_log: f64,
    sum_sq: f64,
    sum_sq2: f64,
    log_half: f64,
    log_end: f64,
}

fn simulate(z: ComplexPoint, tau_fixed: Option<f64>, k_max: usize, seed: u64, path: usize) -> PathStats {
    let mut stream = RngStream::new(seed, path as u64);
    let mut s = PathStats {
        sum_log: 0.0,
        sum_sq: 0.0,
        sum_sq2: 0.0,
        log_half: 0.0,
        log_end: 0.0,
    };
    for k in 1..=k_max {
        let tau = tau_fixed.unwrap_or_else(|| stream.uniform());
        let m2 = p_eval(z, tau).norm_sqr();
        s.sum_log += 0.5 * m2.ln();
        s.sum_sq += m2;
        s.sum_sq2 += m2 * m2;
        if k == k_max / 2 {
            s.log_half = s.sum_log;
        }
    }
    s.log_end = s.sum_log;
    s
}

pub fn mc_verify(z: ComplexPoint, kind: RegionKind, k_max: usize, reps: usize, seed: u64) -> Result<Verdict> {
    if k_max == 0 || reps == 0 {
        return Err(Error::InvalidParameter("k_max and reps must be at least 1".into()));
    }
    let tau_fixed = (kind == RegionKind::Midpoint).then_some(0.5);
    let paths: Vec<PathStats> = (0..reps)
        .into_par_iter()
        .map(|i| simulate(z, tau_fixed, k_max, seed, i))
        .collect();
    let draws = (k_max * reps) as f64;
    let (mut sum_log, mut sum_sq, mut sum_sq2) = (0.0, 0.0, 0.0);
    for p in &paths {
        sum_log += p.sum_log;
        sum_sq += p.sum_sq;
        sum_sq2 += p.sum_sq2;
    }
    let overflow = f64::MAX.ln();
    let diverged_paths = paths.iter().filter(|p| p.log_end > overflow).count();
    let decaying_paths = paths.iter().filter(|p| p.log_end < p.log_half).count();

    let (drift, ci, expected_drift) = match kind.canonical() {
        RegionKind::MeanSquare => {
            let m = sum_sq / draws;
            let var = (sum_sq2 / draws - m * m).max(0.0);
            let half = CONFIDENCE_Z * (var / draws).sqrt();
            (m.ln(), ((m - half).max(0.0).ln(), (m + half).ln()), ms_moment(z).ln())
        }
        RegionKind::Midpoint => {
            let mean = sum_log / draws;
            (mean, (mean, mean), 0.5 * p_eval(z, 0.5).norm_sqr().ln())
        }
        _ => {
            let mean = sum_log / draws;
            let f = f_value(z.a, z.b);
            let var = (0.25 * ln_moment2(z.a, z.b)? - f * f).max(0.0);
            let half = CONFIDENCE_Z * (var / draws).sqrt();
            (mean, (mean - half, mean + half), f)
        }
    };
    let member = in_region(z, kind);
    let outcome = if ci.1 < 0.0 {
        if member {
            Outcome::Agree
        } else {
            Outcome::Disagree
        }
    } else if ci.0 > 0.0 {
        if member {
            Outcome::Disagree
        } else {
            Outcome::Agree
        }
    } else {
        Outcome::Inconclusive
    };
    Ok(Verdict {
        z,
        kind,
        drift,
        ci,
        expected_drift,
        member,
        diverged_paths,
        decaying_paths,
        outcome,
    })
}
