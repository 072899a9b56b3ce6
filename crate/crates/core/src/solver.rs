//! Randomized two-stage Runge-Kutta scheme and deterministic baselines.
//!
//! One step of the randomized scheme, with `tau ~ U[0, 1]` drawn fresh:
//!
//! ```text
//! v_tau  = v + h * tau * f~(t, v)
//! v_next = v + h * f~(t + tau * h, v_tau)
//! ```
//!
//! Step times `tau_j` come from the caller's stream; noise draws come from the
//! [`NOISE_LANE`] fork of that stream. Runs that differ only in their noise
//! therefore see the same `tau` sequence. Within a step the order is
//! `tau_j`, first-stage noise, second-stage noise.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::mesh::Mesh;
use crate::noise::NoiseSpec;
use crate::problem::IVProblem;
use crate::rng::{RngStream, NOISE_LANE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    Rrk2,
    Euler,
    Midpoint,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Rrk2 => "rrk2",
            Scheme::Euler => "euler",
            Scheme::Midpoint => "midpoint",
        }
    }

    /// Noisy right-hand-side evaluations per step.
    pub fn evaluations_per_step(self) -> usize {
        match self {
            Scheme::Euler => 1,
            Scheme::Rrk2 | Scheme::Midpoint => 2,
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rrk2" => Ok(Scheme::Rrk2),
            "euler" => Ok(Scheme::Euler),
            "midpoint" => Ok(Scheme::Midpoint),
            other => Err(Error::InvalidParameter(format!("unknown scheme `{other}`"))),
        }
    }
}

/// Access to a (possibly noisy) right-hand side.
pub trait Oracle {
    fn eval(&mut self, t: f64, y: &[f64], out: &mut [f64]);
}

impl<F: FnMut(f64, &[f64], &mut [f64])> Oracle for F {
    fn eval(&mut self, t: f64, y: &[f64], out: &mut [f64]) {
        self(t, y, out)
    }
}

/// `f~ = f + p`, drawing each `p` from its own stream.
pub struct NoisyRhs<'a> {
    problem: &'a IVProblem,
    noise: NoiseSpec,
    stream: RngStream,
    calls: usize,
}

impl<'a> NoisyRhs<'a> {
    pub fn new(problem: &'a IVProblem, noise: NoiseSpec, stream: RngStream) -> Result<Self> {
        noise.check_dimension(problem.dim())?;
        Ok(Self {
            problem,
            noise,
            stream,
            calls: 0,
        })
    }

    /// Number of evaluations served so far.
    pub fn calls(&self) -> usize {
        self.calls
    }
}

impl Oracle for NoisyRhs<'_> {
    #[inline]
    fn eval(&mut self, t: f64, y: &[f64], out: &mut [f64]) {
        self.calls += 1;
        self.problem.eval(t, y, out);
        self.noise.apply(out, &mut self.stream);
    }
}

/// Mesh, states `V^0..V^n` and the realized step times of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    mesh: Mesh,
    dim: usize,
    states: Vec<f64>,
    taus: Vec<f64>,
    scheme: Scheme,
}

impl Trajectory {
    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    /// Realized `tau_1..tau_n`; empty for deterministic schemes.
    pub fn taus(&self) -> &[f64] {
        &self.taus
    }

    pub fn len(&self) -> usize {
        self.mesh.n() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn state(&self, j: usize) -> &[f64] {
        &self.states[j * self.dim..(j + 1) * self.dim]
    }

    pub fn states(&self) -> impl Iterator<Item = &[f64]> {
        self.states.chunks_exact(self.dim)
    }

    pub fn terminal(&self) -> &[f64] {
        self.state(self.mesh.n())
    }
}

/// Piecewise-linear interpolant through the mesh states.
pub fn interpolate(traj: &Trajectory, t: f64) -> Result<Vec<f64>> {
    let mut out = vec![0.0; traj.dim];
    interpolate_into(traj, t, &mut out)?;
    Ok(out)
}

pub(crate) fn interpolate_into(traj: &Trajectory, t: f64, out: &mut [f64]) -> Result<()> {
    let mesh = &traj.mesh;
    if !(t >= mesh.a() && t <= mesh.b()) {
        return Err(Error::Domain(format!("t = {t} outside [{}, {}]", mesh.a(), mesh.b())));
    }
    let j = mesh.cell(t);
    let (t0, t1) = (mesh.point(j), mesh.point(j + 1));
    if t == t0 {
        out.copy_from_slice(traj.state(j));
    } else if t == t1 {
        out.copy_from_slice(traj.state(j + 1));
    } else {
        let (v0, v1) = (traj.state(j), traj.state(j + 1));
        let w = t - t0;
        let dt = t1 - t0;
        for k in 0..out.len() {
            out[k] = (v1[k] - v0[k]) / dt * w + v0[k];
        }
    }
    Ok(())
}

#[inline]
fn all_finite(v: &[f64]) -> bool {
    v.iter().all(|x| x.is_finite())
}

/// Buffers for one step, reused along a trajectory.
struct StepWork {
    k: Vec<f64>,
    v_tau: Vec<f64>,
}

impl StepWork {
    fn new(dim: usize) -> Self {
        Self {
            k: vec![0.0; dim],
            v_tau: vec![0.0; dim],
        }
    }

    /// Writes `v_next` into `next`; `v_tau` is left in `self.v_tau`.
    #[inline]
    fn rrk2<O: Oracle + ?Sized>(
        &mut self,
        prev: &[f64],
        next: &mut [f64],
        t_prev: f64,
        h: f64,
        tau: f64,
        oracle: &mut O,
    ) {
        oracle.eval(t_prev, prev, &mut self.k);
        let step = h * tau;
        for ((vt, v), k) in self.v_tau.iter_mut().zip(prev).zip(&self.k) {
            *vt = v + step * k;
        }
        oracle.eval(t_prev + tau * h, &self.v_tau, &mut self.k);
        for ((vn, v), k) in next.iter_mut().zip(prev).zip(&self.k) {
            *vn = v + h * k;
        }
    }

    #[inline]
    fn euler<O: Oracle + ?Sized>(&mut self, prev: &[f64], next: &mut [f64], t_prev: f64, h: f64, oracle: &mut O) {
        oracle.eval(t_prev, prev, &mut self.k);
        for ((vn, v), k) in next.iter_mut().zip(prev).zip(&self.k) {
            *vn = v + h * k;
        }
    }
}

/// A single step of the randomized scheme; returns `(v_next, v_tau)`.
///
/// `step` is only used to label an overflow error.
pub fn rrk2_step<O: Oracle + ?Sized>(
    v_prev: &[f64],
    t_prev: f64,
    h: f64,
    tau: f64,
    oracle: &mut O,
    step: usize,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if !(h > 0.0) {
        return Err(Error::Domain(format!("step size {h} must be positive")));
    }
    if !(0.0..=1.0).contains(&tau) {
        return Err(Error::Domain(format!("tau = {tau} not in [0, 1]")));
    }
    if v_prev.is_empty() {
        return Err(Error::Domain("empty state".into()));
    }
    let mut work = StepWork::new(v_prev.len());
    let mut next = vec![0.0; v_prev.len()];
    work.rrk2(v_prev, &mut next, t_prev, h, tau, oracle);
    if !all_finite(&work.v_tau) || !all_finite(&next) {
        return Err(Error::Overflow { step });
    }
    Ok((next, work.v_tau))
}

fn run(problem: &IVProblem, n: usize, noise: &NoiseSpec, stream: &mut RngStream, scheme: Scheme) -> Result<Trajectory> {
    let mesh = Mesh::new(problem.a(), problem.b(), n)?;
    let dim = problem.dim();
    let mut noise_stream = stream.fork(NOISE_LANE);

    let mut states = vec![0.0; (n + 1) * dim];
    states[..dim].copy_from_slice(problem.eta());
    if noise.perturbs_initial() {
        noise.check_dimension(dim)?;
        noise.apply(&mut states[..dim], &mut noise_stream);
    }
    let mut oracle = NoisyRhs::new(problem, *noise, noise_stream)?;

    let mut taus = Vec::with_capacity(if scheme == Scheme::Rrk2 { n } else { 0 });
    let mut work = StepWork::new(dim);
    let h = mesh.h();
    for j in 1..=n {
        let (done, rest) = states.split_at_mut(j * dim);
        let prev = &done[(j - 1) * dim..];
        let next = &mut rest[..dim];
        let t_prev = mesh.point(j - 1);
        match scheme {
            Scheme::Rrk2 => {
                let tau = stream.uniform();
                taus.push(tau);
                work.rrk2(prev, next, t_prev, h, tau, &mut oracle);
            }
            Scheme::Midpoint => work.rrk2(prev, next, t_prev, h, 0.5, &mut oracle),
            Scheme::Euler => work.euler(prev, next, t_prev, h, &mut oracle),
        }
        if !all_finite(next) || (scheme != Scheme::Euler && !all_finite(&work.v_tau)) {
            return Err(Error::Overflow { step: j });
        }
    }
    Ok(Trajectory {
        mesh,
        dim,
        states,
        taus,
        scheme,
    })
}

/// Randomized two-stage Runge-Kutta on `n` equal steps.
pub fn rrk2_trajectory(problem: &IVProblem, n: usize, noise: &NoiseSpec, stream: &mut RngStream) -> Result<Trajectory> {
    run(problem, n, noise, stream, Scheme::Rrk2)
}

/// Explicit Euler; draws nothing from `stream` itself.
pub fn euler_trajectory(
    problem: &IVProblem,
    n: usize,
    noise: &NoiseSpec,
    stream: &mut RngStream,
) -> Result<Trajectory> {
    run(problem, n, noise, stream, Scheme::Euler)
}

/// The randomized scheme with every `tau` fixed at 1/2; draws nothing from `stream` itself.
pub fn midpoint_trajectory(
    problem: &IVProblem,
    n: usize,
    noise: &NoiseSpec,
    stream: &mut RngStream,
) -> Result<Trajectory> {
    run(problem, n, noise, stream, Scheme::Midpoint)
}

pub fn trajectory(
    scheme: Scheme,
    problem: &IVProblem,
    n: usize,
    noise: &NoiseSpec,
    stream: &mut RngStream,
) -> Result<Trajectory> {
    run(problem, n, noise, stream, scheme)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::NoiseKind;
    use crate::problem::{make_problem, Params};

    fn linear(lambda: f64) -> IVProblem {
        make_problem("linear", &Params::new().with("lambda", lambda)).unwrap()
    }

    #[test]
    fn step_on_zero_field_is_identity() {
        let mut zero = |_t: f64, _y: &[f64], out: &mut [f64]| out.fill(0.0);
        for tau in [0.0, 0.3, 1.0] {
            let (next, _) = rrk2_step(&[1.5, -2.0], 0.0, 0.1, tau, &mut zero, 1).unwrap();
            assert_eq!(next, vec![1.5, -2.0]);
        }
    }

    #[test]
    fn step_on_linear_field_by_hand() {
        let mut f = |_t: f64, y: &[f64], out: &mut [f64]| out[0] = -y[0];
        let (next, v_tau) = rrk2_step(&[1.0], 0.0, 0.1, 0.5, &mut f, 1).unwrap();
        assert!((v_tau[0] - 0.95).abs() < 1e-15);
        assert!((next[0] - 0.905).abs() < 1e-15);
        // p(z) = tau z^2 + z + 1 at z = -0.1
        assert!((next[0] - (0.5 * 0.01 - 0.1 + 1.0)).abs() < 1e-15);
    }

    #[test]
    fn step_with_constant_noise_on_zero_field() {
        let problem = make_problem("zero", &Params::new().with("dim", 2.0)).unwrap();
        let delta = 1e-3;
        let noise = NoiseSpec::new(NoiseKind::ConstPlus, delta).unwrap();
        let mut oracle = NoisyRhs::new(&problem, noise, RngStream::new(0, 0)).unwrap();
        let (next, _) = rrk2_step(&[0.25, 0.5], 0.0, 0.1, 0.7, &mut oracle, 1).unwrap();
        assert_eq!(next, vec![0.25 + 0.1 * delta, 0.5]);
        assert_eq!(oracle.calls(), 2);
    }

    #[test]
    fn step_rejects_bad_arguments_and_reports_overflow() {
        let mut f = |_t: f64, y: &[f64], out: &mut [f64]| out[0] = y[0] * y[0];
        assert!(matches!(
            rrk2_step(&[1.0], 0.0, 0.0, 0.5, &mut f, 1),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            rrk2_step(&[1.0], 0.0, 0.1, 1.5, &mut f, 1),
            Err(Error::Domain(_))
        ));
        assert_eq!(
            rrk2_step(&[1e200], 0.0, 1.0, 0.5, &mut f, 9),
            Err(Error::Overflow { step: 9 })
        );
    }

    #[test]
    fn trajectory_overflow_carries_step_index() {
        let problem = linear(1e300);
        let err = rrk2_trajectory(&problem, 4, &NoiseSpec::none(), &mut RngStream::new(0, 0)).unwrap_err();
        assert!(matches!(err, Error::Overflow { step: 1 }));
    }

    #[test]
    fn zero_field_trajectories_are_constant() {
        let problem = make_problem("zero", &Params::new().with("eta", 1.0)).unwrap();
        for scheme in [Scheme::Rrk2, Scheme::Euler, Scheme::Midpoint] {
            let traj = trajectory(scheme, &problem, 17, &NoiseSpec::none(), &mut RngStream::new(1, 0)).unwrap();
            assert!(traj.states().all(|s| s == [1.0]));
        }
    }

    #[test]
    fn euler_growth_factor() {
        // f(t, y) = y on [0, 1] with h = 0.5
        let problem = linear(1.0);
        let traj = euler_trajectory(&problem, 2, &NoiseSpec::none(), &mut RngStream::new(0, 0)).unwrap();
        let states: Vec<f64> = traj.states().map(|s| s[0]).collect();
        assert_eq!(states, vec![1.0, 1.5, 2.25]);
        assert!(traj.taus().is_empty());
    }

    #[test]
    fn euler_converges_first_order() {
        let problem = linear(-1.0);
        let exact = (-1.0f64).exp();
        let err = |n| {
            let traj = euler_trajectory(&problem, n, &NoiseSpec::none(), &mut RngStream::new(0, 0)).unwrap();
            (traj.terminal()[0] - exact).abs()
        };
        let (e1, e2) = (err(1000), err(2000));
        assert!(e1 < 1e-3);
        assert!((e1 / e2 - 2.0).abs() < 0.01);
    }

    #[test]
    fn midpoint_is_power_of_amplification_factor() {
        let lambda = -3.0;
        let n = 50;
        let problem = linear(lambda);
        let mut stream = RngStream::new(9, 4);
        let traj = midpoint_trajectory(&problem, n, &NoiseSpec::none(), &mut stream).unwrap();
        assert_eq!(stream.position(), 0);
        let z = lambda / n as f64;
        let factor = 0.5 * z * z + z + 1.0;
        for (k, s) in traj.states().enumerate() {
            let want = factor.powi(k as i32);
            assert!(((s[0] - want) / want).abs() < 1e-12);
        }
    }

    #[test]
    fn rrk2_matches_product_formula() {
        let problem = linear(-1.0);
        let n = 200;
        let traj = rrk2_trajectory(&problem, n, &NoiseSpec::none(), &mut RngStream::new(2, 3)).unwrap();
        let z = -1.0 / n as f64;
        let mut prod = 1.0;
        assert_eq!(traj.taus().len(), n);
        for (k, s) in traj.states().enumerate().skip(1) {
            let tau = traj.taus()[k - 1];
            assert!((0.0..=1.0).contains(&tau));
            prod *= tau * z * z + z + 1.0;
            assert!(((s[0] - prod) / prod).abs() < 1e-12);
        }
    }

    #[test]
    fn sir_mass_is_conserved() {
        let problem = make_problem("sir", &Params::new()).unwrap();
        let traj = rrk2_trajectory(&problem, 1000, &NoiseSpec::none(), &mut RngStream::new(7, 0)).unwrap();
        for s in traj.states() {
            assert!((s.iter().sum::<f64>() - 51.0).abs() < 1e-9);
        }
    }

    #[test]
    fn noise_does_not_shift_step_times() {
        let problem = make_problem("sir", &Params::new()).unwrap();
        let noisy = NoiseSpec::new(NoiseKind::Uniform, 1e-2)
            .unwrap()
            .with_initial_perturbation(true);
        let a = rrk2_trajectory(&problem, 64, &NoiseSpec::none(), &mut RngStream::new(3, 1)).unwrap();
        let b = rrk2_trajectory(&problem, 64, &noisy, &mut RngStream::new(3, 1)).unwrap();
        assert_eq!(a.taus(), b.taus());
        assert_ne!(a.terminal(), b.terminal());
        assert!(crate::norm::dist1(a.state(0), b.state(0)) <= 1e-2);
    }

    #[test]
    fn initial_value_is_exact_by_default() {
        let problem = make_problem("zero", &Params::new()).unwrap();
        let noise = NoiseSpec::new(NoiseKind::ConstMinus, 0.5).unwrap();
        let traj = rrk2_trajectory(&problem, 4, &noise, &mut RngStream::new(0, 0)).unwrap();
        assert_eq!(traj.state(0), &[0.0]);
        let traj = rrk2_trajectory(
            &problem,
            4,
            &noise.with_initial_perturbation(true),
            &mut RngStream::new(0, 0),
        )
        .unwrap();
        assert_eq!(traj.state(0), &[-0.5]);
    }

    #[test]
    fn interpolation_nodes_and_midpoints() {
        let problem = make_problem("sir", &Params::new()).unwrap();
        let traj = rrk2_trajectory(&problem, 37, &NoiseSpec::none(), &mut RngStream::new(4, 4)).unwrap();
        let mesh = *traj.mesh();
        for j in 0..=mesh.n() {
            assert_eq!(interpolate(&traj, mesh.point(j)).unwrap(), traj.state(j));
        }
        assert_eq!(interpolate(&traj, mesh.a()).unwrap(), traj.state(0));
        for j in 0..mesh.n() {
            let mid = 0.5 * (mesh.point(j) + mesh.point(j + 1));
            let got = interpolate(&traj, mid).unwrap();
            for (k, g) in got.iter().enumerate() {
                let want = 0.5 * (traj.state(j)[k] + traj.state(j + 1)[k]);
                assert!((g - want).abs() <= 1e-12 * want.abs().max(1.0));
            }
        }
        assert!(interpolate(&traj, -0.1).is_err());
        assert!(interpolate(&traj, 30.0 + 1e-9).is_err());
    }
}
