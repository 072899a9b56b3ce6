//! Initial-value problems and the built-in problem registry.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::reference::ReferenceSolution;

/// Right-hand side `f(t, y)`, written into `out` (same length as `y`).
pub type Rhs = Arc<dyn Fn(f64, &[f64], &mut [f64]) + Send + Sync>;
pub type ExactSolution = Arc<dyn Fn(f64) -> Vec<f64> + Send + Sync>;

/// `z'(t) = f(t, z(t))` on `[a, b]`, `z(a) = eta`.
#[derive(Clone)]
pub struct IVProblem {
    name: String,
    a: f64,
    b: f64,
    eta: Vec<f64>,
    rhs: Rhs,
    holder_rho: Option<f64>,
    exact: Option<ExactSolution>,
    reference: Arc<OnceLock<ReferenceSolution>>,
}

impl fmt::Debug for IVProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("IVProblem")
            .field("name", &self.name)
            .field("a", &self.a)
            .field("b", &self.b)
            .field("eta", &self.eta)
            .field("holder_rho", &self.holder_rho)
            .field("exact", &self.exact.is_some())
            .finish()
    }
}

impl IVProblem {
    pub fn new(
        name: impl Into<String>,
        a: f64,
        b: f64,
        eta: Vec<f64>,
        rhs: Rhs,
        holder_rho: Option<f64>,
        exact: Option<ExactSolution>,
    ) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::InvalidParameter(format!("interval [{a}, {b}] is empty")));
        }
        if eta.is_empty() {
            return Err(Error::InvalidParameter("initial value has dimension 0".into()));
        }
        if let Some(rho) = holder_rho {
            if !(rho > 0.0 && rho <= 1.0) {
                return Err(Error::InvalidParameter(format!("Hölder exponent {rho} not in (0, 1]")));
            }
        }
        Ok(Self {
            name: name.into(),
            a,
            b,
            eta,
            rhs,
            holder_rho,
            exact,
            reference: Arc::new(OnceLock::new()),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn dim(&self) -> usize {
        self.eta.len()
    }

    pub fn eta(&self) -> &[f64] {
        &self.eta
    }

    /// Informational only; no algorithm reads it.
    pub fn holder_rho(&self) -> Option<f64> {
        self.holder_rho
    }

    #[inline]
    pub fn eval(&self, t: f64, y: &[f64], out: &mut [f64]) {
        (self.rhs)(t, y, out)
    }

    pub fn exact_solution(&self, t: f64) -> Option<Vec<f64>> {
        self.exact.as_ref().map(|z| z(t))
    }

    pub fn has_exact_solution(&self) -> bool {
        self.exact.is_some()
    }

    /// Lazily computed fine-mesh reference, shared by all clones of this problem.
    pub(crate) fn reference(&self) -> &ReferenceSolution {
        self.reference.get_or_init(|| ReferenceSolution::compute(self))
    }
}

/// Named real parameters for [`make_problem`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Params(BTreeMap<String, f64>);

impl Params {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.0.insert(key.to_string(), value);
        self
    }

    pub fn insert(&mut self, key: &str, value: f64) {
        self.0.insert(key.to_string(), value);
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.0.get(key).copied()
    }

    fn get_or(&self, key: &str, default: f64) -> f64 {
        self.get(key).unwrap_or(default)
    }

    fn reject_unknown(&self, problem: &str, allowed: &[&str]) -> Result<()> {
        match self.0.keys().find(|k| !allowed.contains(&k.as_str())) {
            Some(k) => Err(Error::InvalidParameter(format!(
                "`{k}` is not a parameter of `{problem}` (expected one of {allowed:?})"
            ))),
            None => Ok(()),
        }
    }
}

pub const PROBLEM_NAMES: [&str; 4] = ["example1", "sir", "linear", "zero"];

/// Builds one of the registered problems.
///
/// * `example1`: `z' = 1 + z cos(10 (2-t)^{1/γ} |z|^{3/2})` on `[0, 2]`, `z(0) = -1`;
///   parameter `gamma` (> 0, default 3). Hölder exponent `1/γ` (capped at 1).
/// * `sir`: Kermack-McKendrick model on `[0, 30]`; parameters `beta` (1/768),
///   `gamma` (1/120), `s0`, `i0`, `r0` (50, 1, 0).
/// * `linear`: `z' = λ z`, real `lambda` required; `eta` (1), `a` (0), `b` (1).
/// * `zero`: `z' = 0`; `dim` (1), `eta` (0, every component), `a` (0), `b` (1).
pub fn make_problem(name: &str, params: &Params) -> Result<IVProblem> {
    match name {
        "example1" => {
            params.reject_unknown(name, &["gamma"])?;
            example1(params.get_or("gamma", 3.0))
        }
        "sir" => {
            params.reject_unknown(name, &["beta", "gamma", "s0", "i0", "r0"])?;
            sir(
                params.get_or("beta", 1.0 / 768.0),
                params.get_or("gamma", 1.0 / 120.0),
                [
                    params.get_or("s0", 50.0),
                    params.get_or("i0", 1.0),
                    params.get_or("r0", 0.0),
                ],
            )
        }
        "linear" => {
            params.reject_unknown(name, &["lambda", "eta", "a", "b"])?;
            let lambda = params
                .get("lambda")
                .ok_or_else(|| Error::InvalidParameter("`linear` requires `lambda`".into()))?;
            linear(
                lambda,
                params.get_or("eta", 1.0),
                params.get_or("a", 0.0),
                params.get_or("b", 1.0),
            )
        }
        "zero" => {
            params.reject_unknown(name, &["dim", "eta", "a", "b"])?;
            let dim = params.get_or("dim", 1.0);
            if !(dim >= 1.0 && dim.fract() == 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "dimension {dim} is not a positive integer"
                )));
            }
            zero(
                dim as usize,
                params.get_or("eta", 0.0),
                params.get_or("a", 0.0),
                params.get_or("b", 1.0),
            )
        }
        other => Err(Error::UnknownProblem(other.to_string())),
    }
}

fn example1(gamma: f64) -> Result<IVProblem> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidParameter(format!("gamma must be positive, got {gamma}")));
    }
    let inv_gamma = 1.0 / gamma;
    let rhs: Rhs = Arc::new(move |t, y, out| {
        let s = (2.0 - t).max(0.0).powf(inv_gamma);
        let z = y[0];
        out[0] = 1.0 + z * (10.0 * s * z.abs().powf(1.5)).cos();
    });
    IVProblem::new("example1", 0.0, 2.0, vec![-1.0], rhs, Some(inv_gamma.min(1.0)), None)
}

fn sir(beta: f64, gamma: f64, init: [f64; 3]) -> Result<IVProblem> {
    if !(beta.is_finite() && gamma.is_finite() && init.iter().all(|x| x.is_finite())) {
        return Err(Error::InvalidParameter("non-finite SIR parameter".into()));
    }
    let rhs: Rhs = Arc::new(move |_t, y, out| {
        let infection = beta * y[0] * y[1];
        let recovery = gamma * y[1];
        out[0] = -infection;
        out[1] = infection - recovery;
        out[2] = recovery;
    });
    IVProblem::new("sir", 0.0, 30.0, init.to_vec(), rhs, Some(1.0), None)
}

fn linear(lambda: f64, eta: f64, a: f64, b: f64) -> Result<IVProblem> {
    if !lambda.is_finite() || !eta.is_finite() {
        return Err(Error::InvalidParameter("non-finite lambda or eta".into()));
    }
    let rhs: Rhs = Arc::new(move |_t, y, out| out[0] = lambda * y[0]);
    let exact: ExactSolution = Arc::new(move |t| vec![eta * (lambda * (t - a)).exp()]);
    IVProblem::new("linear", a, b, vec![eta], rhs, Some(1.0), Some(exact))
}

fn zero(dim: usize, eta: f64, a: f64, b: f64) -> Result<IVProblem> {
    let rhs: Rhs = Arc::new(|_t, _y, out| out.fill(0.0));
    let exact: ExactSolution = Arc::new(move |_t| vec![eta; dim]);
    IVProblem::new("zero", a, b, vec![eta; dim], rhs, Some(1.0), Some(exact))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sir_defaults() {
        let p = make_problem("sir", &Params::new()).unwrap();
        assert_eq!(p.eta(), &[50.0, 1.0, 0.0]);
        assert_eq!((p.a(), p.b()), (0.0, 30.0));
        assert_eq!(p.dim(), 3);
        let mut out = [0.0; 3];
        p.eval(0.0, &[50.0, 1.0, 0.0], &mut out);
        assert!((out[0] + 50.0 / 768.0).abs() < 1e-16);
        assert!(out.iter().sum::<f64>().abs() < 1e-16);
    }

    #[test]
    fn example1_gamma_three() {
        let p = make_problem("example1", &Params::new().with("gamma", 3.0)).unwrap();
        assert_eq!(p.holder_rho(), Some(1.0 / 3.0));
        assert_eq!((p.a(), p.b()), (0.0, 2.0));
        assert_eq!(p.eta(), &[-1.0]);
        // at t = 2 the cosine argument vanishes
        let mut out = [0.0];
        p.eval(2.0, &[-1.0], &mut out);
        assert_eq!(out[0], 0.0);
    }

    #[test]
    fn linear_exact_solution() {
        let p = make_problem("linear", &Params::new().with("lambda", 0.0).with("eta", 1.0)).unwrap();
        for t in [0.0, 0.25, 1.0] {
            assert_eq!(p.exact_solution(t).unwrap(), vec![1.0]);
        }
        let p = make_problem(
            "linear",
            &Params::new().with("lambda", -1.7).with("eta", 2.5).with("b", 3.0),
        )
        .unwrap();
        let want = 2.5 * (-1.7f64 * 3.0).exp();
        let got = p.exact_solution(3.0).unwrap()[0];
        assert!(((got - want) / want).abs() < 1e-14);
    }

    #[test]
    fn parameter_errors() {
        assert!(matches!(
            make_problem("lorenz", &Params::new()),
            Err(Error::UnknownProblem(_))
        ));
        assert!(make_problem("example1", &Params::new().with("gamma", 0.0)).is_err());
        assert!(make_problem("example1", &Params::new().with("gamma", -2.0)).is_err());
        assert!(make_problem("linear", &Params::new()).is_err());
        assert!(make_problem("sir", &Params::new().with("lambda", 1.0)).is_err());
        assert!(make_problem("zero", &Params::new().with("dim", 1.5)).is_err());
    }
}
