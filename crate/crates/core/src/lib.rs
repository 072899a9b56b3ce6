//! Randomized two-stage Runge-Kutta for initial-value problems with noisy
//! right-hand-side information.
//!
//! * [`solver`]: the randomized scheme, Euler and midpoint baselines, the
//!   piecewise-linear interpolant.
//! * [`noise`]: perturbation oracles with `norm1(p) <= delta`.
//! * [`experiments`]: Monte-Carlo L^p errors, worst-case protocols,
//!   convergence studies.
//! * [`stability`]: mean-square, asymptotic and midpoint stability regions.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod experiments;
pub mod mesh;
pub mod noise;
pub mod norm;
pub mod problem;
pub mod reference;
pub mod rng;
pub mod solver;
pub mod stability;

pub use error::{Error, Result};
pub use experiments::{
    compute_rbar, convergence_study, coupled_deviation, lp_error, random_reps_error, worst_case_error,
    ConvergenceTable, DeltaPolicy, ErrorEstimate, ErrorMode, NoiseProtocol, Sampling, WorstCaseProtocol,
};
pub use mesh::Mesh;
pub use noise::{perturb, perturb_initial, NoiseKind, NoiseSpec};
pub use norm::norm1;
pub use problem::{make_problem, IVProblem, Params};
pub use reference::reference_solution;
pub use rng::RngStream;
pub use solver::{
    euler_trajectory, interpolate, midpoint_trajectory, rrk2_step, rrk2_trajectory, trajectory, Oracle, Scheme,
    Trajectory,
};
pub use stability::{ComplexPoint, RegionKind};
