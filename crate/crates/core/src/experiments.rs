//! Monte-Carlo L^p errors, worst-case-over-noise protocols and convergence studies.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::mesh::Mesh;
use crate::noise::{NoiseKind, NoiseSpec};
use crate::norm::dist1;
use crate::problem::IVProblem;
use crate::reference::reference_into;
use crate::rng::{mix_seed, RngStream};
use crate::solver::{interpolate_into, trajectory, Scheme};

/// Default number of replicates for the constant-noise protocols.
pub const DEFAULT_REPS_CONST: usize = 1000;
/// Default number of replicates per realization for the random-noise protocol.
pub const DEFAULT_REPS_RANDOM: usize = 100;
/// Independent uniform-noise realizations in the random protocol.
pub const RANDOM_REALIZATIONS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ErrorMode {
    /// Error at `t = b` only.
    Terminal,
    /// Maximum over mesh points and cell midpoints.
    Uniform,
}

impl ErrorMode {
    pub fn name(self) -> &'static str {
        match self {
            ErrorMode::Terminal => "terminal",
            ErrorMode::Uniform => "uniform",
        }
    }
}

impl fmt::Display for ErrorMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ErrorMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "terminal" => Ok(ErrorMode::Terminal),
            "uniform" => Ok(ErrorMode::Uniform),
            other => Err(Error::InvalidParameter(format!("unknown error mode `{other}`"))),
        }
    }
}

/// How replicates are sampled and aggregated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sampling {
    /// Moment order, at least 2.
    pub p: f64,
    /// Replicates `M`.
    pub reps: usize,
    pub mode: ErrorMode,
    pub master_seed: u64,
}

impl Sampling {
    pub fn new(p: f64, reps: usize, mode: ErrorMode, master_seed: u64) -> Result<Self> {
        let s = Self {
            p,
            reps,
            mode,
            master_seed,
        };
        s.validate()?;
        Ok(s)
    }

    fn validate(&self) -> Result<()> {
        if !(self.p >= 2.0 && self.p.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "moment order p = {} must be >= 2",
                self.p
            )));
        }
        if self.reps == 0 {
            return Err(Error::InvalidParameter("at least one replicate is required".into()));
        }
        Ok(())
    }

    fn with_seed(self, master_seed: u64) -> Self {
        Self { master_seed, ..self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorEstimate {
    pub n: usize,
    pub h: f64,
    pub delta: f64,
    pub p: f64,
    pub mode: ErrorMode,
    /// `(mean_i e_i^p)^(1/p)`
    pub value: f64,
    pub reps: usize,
}

/// Reference values at the times where errors are measured.
struct Targets {
    times: Vec<f64>,
    values: Vec<f64>,
}

impl Targets {
    fn new(problem: &IVProblem, mesh: &Mesh, mode: ErrorMode) -> Result<Self> {
        let times: Vec<f64> = match mode {
            ErrorMode::Terminal => vec![mesh.b()],
            ErrorMode::Uniform => {
                let mut ts = Vec::with_capacity(2 * mesh.n() + 1);
                for j in 0..mesh.n() {
                    ts.push(mesh.point(j));
                    ts.push(0.5 * (mesh.point(j) + mesh.point(j + 1)));
                }
                ts.push(mesh.b());
                ts
            }
        };
        let d = problem.dim();
        let mut values = vec![0.0; times.len() * d];
        for (t, v) in times.iter().zip(values.chunks_exact_mut(d)) {
            reference_into(problem, *t, v)?;
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::ReferenceOverflow { t: *t });
            }
        }
        Ok(Self { times, values })
    }
}

fn replicate_error(
    problem: &IVProblem,
    scheme: Scheme,
    n: usize,
    noise: &NoiseSpec,
    targets: &Targets,
    master_seed: u64,
    replicate: usize,
) -> Result<f64> {
    let mut stream = RngStream::new(master_seed, replicate as u64);
    let traj = trajectory(scheme, problem, n, noise, &mut stream)?;
    let d = problem.dim();
    let mut approx = vec![0.0; d];
    let mut worst: f64 = 0.0;
    for (t, z) in targets.times.iter().zip(targets.values.chunks_exact(d)) {
        interpolate_into(&traj, *t, &mut approx)?;
        worst = worst.max(dist1(z, &approx));
    }
    Ok(worst)
}

/// Monte-Carlo estimate of the L^p error over `sampling.reps` replicates.
/// Replicate `i` runs on stream `(master_seed, i)`.
pub fn lp_error(
    problem: &IVProblem,
    scheme: Scheme,
    n: usize,
    noise: &NoiseSpec,
    sampling: &Sampling,
) -> Result<ErrorEstimate> {
    sampling.validate()?;
    noise.check_dimension(problem.dim())?;
    let mesh = Mesh::new(problem.a(), problem.b(), n)?;
    let targets = Targets::new(problem, &mesh, sampling.mode)?;
    let errors = (0..sampling.reps)
        .into_par_iter()
        .map(|i| replicate_error(problem, scheme, n, noise, &targets, sampling.master_seed, i))
        .collect::<Result<Vec<f64>>>()?;
    // reduction in replicate order
    let mean = errors.iter().map(|e| e.powf(sampling.p)).sum::<f64>() / sampling.reps as f64;
    Ok(ErrorEstimate {
        n,
        h: mesh.h(),
        delta: noise.delta(),
        p: sampling.p,
        mode: sampling.mode,
        value: mean.powf(1.0 / sampling.p),
        reps: sampling.reps,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WorstCaseProtocol {
    /// Worse of the constant noises `+delta e_1` and `-delta e_1`.
    ConstPair,
    /// Worst of [`RANDOM_REALIZATIONS`] independent uniform-noise realizations.
    RandomReps,
}

/// Maximum L^p error over a family of noise realizations at level `delta`.
pub fn worst_case_error(
    problem: &IVProblem,
    scheme: Scheme,
    n: usize,
    delta: f64,
    protocol: WorstCaseProtocol,
    sampling: &Sampling,
) -> Result<ErrorEstimate> {
    match protocol {
        WorstCaseProtocol::ConstPair => {
            let plus = lp_error(
                problem,
                scheme,
                n,
                &NoiseSpec::new(NoiseKind::ConstPlus, delta)?,
                sampling,
            )?;
            let minus = lp_error(
                problem,
                scheme,
                n,
                &NoiseSpec::new(NoiseKind::ConstMinus, delta)?,
                sampling,
            )?;
            Ok(if minus.value > plus.value { minus } else { plus })
        }
        WorstCaseProtocol::RandomReps => random_reps_error(problem, scheme, n, delta, RANDOM_REALIZATIONS, sampling),
    }
}

/// [`WorstCaseProtocol::RandomReps`] with an explicit number of realizations.
/// Realization `r` uses master seed `mix_seed(master_seed, r)`.
pub fn random_reps_error(
    problem: &IVProblem,
    scheme: Scheme,
    n: usize,
    delta: f64,
    realizations: usize,
    sampling: &Sampling,
) -> Result<ErrorEstimate> {
    if realizations == 0 {
        return Err(Error::InvalidParameter(
            "at least one noise realization is required".into(),
        ));
    }
    let noise = NoiseSpec::new(NoiseKind::Uniform, delta)?;
    let mut worst: Option<ErrorEstimate> = None;
    for r in 0..realizations {
        let seed = mix_seed(sampling.master_seed, r as u64);
        let e = lp_error(problem, scheme, n, &noise, &sampling.with_seed(seed))?;
        if worst.is_none_or(|w| e.value > w.value) {
            worst = Some(e);
        }
    }
    Ok(worst.expect("at least one realization"))
}

/// Noise level per row of a convergence study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DeltaPolicy {
    Fixed(f64),
    /// `delta = c * h^q`
    StepPower {
        c: f64,
        q: f64,
    },
}

impl DeltaPolicy {
    pub fn delta(&self, h: f64) -> f64 {
        match *self {
            DeltaPolicy::Fixed(d) => d,
            DeltaPolicy::StepPower { c, q } => c * h.powf(q),
        }
    }
}

/// Which noise realizations an error is taken over.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseProtocol {
    /// One noise model; its level is replaced by the policy's delta.
    Single(NoiseSpec),
    Worst(WorstCaseProtocol),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTable {
    pub rows: Vec<ErrorEstimate>,
    /// Least-squares slope of `log10(error)` against `log10(n)`; `None` when an error is 0.
    pub slope: Option<f64>,
    pub intercept: Option<f64>,
}

impl ConvergenceTable {
    pub fn from_rows(mut rows: Vec<ErrorEstimate>) -> Self {
        rows.sort_by_key(|r| r.n);
        let (slope, intercept) = if rows.len() >= 2 && rows.iter().all(|r| r.value > 0.0 && r.value.is_finite()) {
            let xs: Vec<f64> = rows.iter().map(|r| (r.n as f64).log10()).collect();
            let ys: Vec<f64> = rows.iter().map(|r| r.value.log10()).collect();
            let (s, i) = least_squares(&xs, &ys);
            (Some(s), Some(i))
        } else {
            (None, None)
        };
        Self { rows, slope, intercept }
    }

    /// `n,h,delta,p,mode,error` rows followed by `#slope=` and `#intercept=` lines.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,h,delta,p,mode,error\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.n,
                fmt_num(r.h),
                fmt_num(r.delta),
                fmt_num(r.p),
                r.mode,
                fmt_num(r.value)
            ));
        }
        let opt = |v: Option<f64>| v.map(fmt_num).unwrap_or_else(|| "undefined".into());
        out.push_str(&format!(
            "#slope={}\n#intercept={}\n",
            opt(self.slope),
            opt(self.intercept)
        ));
        out
    }
}

/// Shortest representation that round-trips to the same `f64`.
pub fn fmt_num(x: f64) -> String {
    format!("{x:?}")
}

/// Ordinary least squares `y = slope * x + intercept`.
pub fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// One error estimate per `n`, with `delta` recomputed from `policy` on each row.
pub fn convergence_study(
    problem: &IVProblem,
    scheme: Scheme,
    n_list: &[usize],
    policy: DeltaPolicy,
    protocol: NoiseProtocol,
    sampling: &Sampling,
) -> Result<ConvergenceTable> {
    if n_list.len() < 3 {
        return Err(Error::InvalidParameter(
            "a convergence study needs at least 3 mesh sizes".into(),
        ));
    }
    if n_list.windows(2).any(|w| w[0] >= w[1]) || n_list[0] == 0 {
        return Err(Error::InvalidParameter(
            "mesh sizes must be positive and strictly increasing".into(),
        ));
    }
    let rows = n_list
        .iter()
        .map(|&n| {
            let h = (problem.b() - problem.a()) / n as f64;
            let delta = policy.delta(h);
            match protocol {
                NoiseProtocol::Single(spec) => lp_error(problem, scheme, n, &spec.at_level(delta)?, sampling),
                NoiseProtocol::Worst(w) => worst_case_error(problem, scheme, n, delta, w, sampling),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConvergenceTable::from_rows(rows))
}

/// Maximum 1-norm deviation between the exact-information and the noisy
/// trajectory of the randomized scheme, both driven by the same step times.
pub fn coupled_deviation(
    problem: &IVProblem,
    n: usize,
    noise: &NoiseSpec,
    master_seed: u64,
    replicate: u64,
) -> Result<f64> {
    let exact = trajectory(
        Scheme::Rrk2,
        problem,
        n,
        &NoiseSpec::none(),
        &mut RngStream::new(master_seed, replicate),
    )?;
    let noisy = trajectory(
        Scheme::Rrk2,
        problem,
        n,
        noise,
        &mut RngStream::new(master_seed, replicate),
    )?;
    Ok(exact
        .states()
        .zip(noisy.states())
        .map(|(x, y)| dist1(x, y))
        .fold(0.0, f64::max))
}

/// Localization radius `R̄(a, b, K)` for the Lipschitz and Hölder conditions.
pub fn compute_rbar(a: f64, b: f64, k: f64) -> Result<f64> {
    if !(a.is_finite() && b.is_finite() && k.is_finite()) {
        return Err(Error::Domain("non-finite input".into()));
    }
    if !(a < b && k > 0.0) {
        return Err(Error::Domain(format!(
            "need a < b and K > 0, got a = {a}, b = {b}, K = {k}"
        )));
    }
    let len = b - a;
    let first = k * (1.0 + len) * (1.0 + (k * len).exp() * (1.0 + k * len));
    let second =
        k + len * (1.0 + k) + (1.0 / k + 1.0) * (1.0 + k * len) * ((k * len * (1.0 + k * len)).exp() * (1.0 + k) - 1.0);
    Ok(first.max(second))
}
