use rrk_core::experiments::worst_case_error;
use rrk_core::{
    convergence_study, lp_error, make_problem, DeltaPolicy, ErrorMode, NoiseKind, NoiseProtocol, NoiseSpec, Params,
    Sampling, Scheme, WorstCaseProtocol,
};

fn slope(scheme: Scheme) -> f64 {
    let problem = make_problem("example1", &Params::new().with("gamma", 2.0)).unwrap();
    let sampling = Sampling::new(2.0, 200, ErrorMode::Terminal, 5).unwrap();
    let n_list: Vec<usize> = (0..6).map(|k| 100 << k).collect();
    convergence_study(
        &problem,
        scheme,
        &n_list,
        DeltaPolicy::Fixed(0.0),
        NoiseProtocol::Single(NoiseSpec::none()),
        &sampling,
    )
    .unwrap()
    .slope
    .unwrap()
}

#[test]
fn randomized_scheme_beats_euler_on_holder_field() {
    let (r, e) = (slope(Scheme::Rrk2), slope(Scheme::Euler));
    assert!(r <= e - 0.35, "rrk2 {r}, euler {e}");
}

#[test]
fn plateau_is_monotone_in_delta() {
    let problem = make_problem("sir", &Params::new()).unwrap();
    let sampling = Sampling::new(2.0, 100, ErrorMode::Terminal, 1).unwrap();
    let errs: Vec<f64> = [1e-4, 1e-3, 1e-2]
        .iter()
        .map(|&d| {
            worst_case_error(
                &problem,
                Scheme::Rrk2,
                10_000,
                d,
                WorstCaseProtocol::ConstPair,
                &sampling,
            )
            .unwrap()
            .value
        })
        .collect();
    assert!(errs.windows(2).all(|w| w[0] <= w[1]), "{errs:?}");
}

#[test]
fn study_is_bitwise_reproducible() {
    let problem = make_problem("example1", &Params::new()).unwrap();
    let sampling = Sampling::new(3.0, 50, ErrorMode::Uniform, 9).unwrap();
    let run = || {
        convergence_study(
            &problem,
            Scheme::Rrk2,
            &[50, 100, 200],
            DeltaPolicy::StepPower { c: 0.5, q: 1.0 },
            NoiseProtocol::Single(NoiseSpec::new(NoiseKind::Uniform, 0.0).unwrap()),
            &sampling,
        )
        .unwrap()
        .to_csv()
    };
    assert_eq!(run(), run());
}

#[test]
fn uniform_error_dominates_terminal_error() {
    let problem = make_problem("sir", &Params::new()).unwrap();
    let noise = NoiseSpec::new(NoiseKind::Uniform, 1e-2).unwrap();
    for n in [20, 200] {
        let t = lp_error(
            &problem,
            Scheme::Rrk2,
            n,
            &noise,
            &Sampling::new(2.0, 40, ErrorMode::Terminal, 2).unwrap(),
        )
        .unwrap();
        let u = lp_error(
            &problem,
            Scheme::Rrk2,
            n,
            &noise,
            &Sampling::new(2.0, 40, ErrorMode::Uniform, 2).unwrap(),
        )
        .unwrap();
        assert!(u.value >= t.value);
    }
}

#[test]
fn linear_exact_solution_at_end_point() {
    for lambda in [-3.0, -1.0, 0.5, 2.0] {
        let p = make_problem("linear", &Params::new().with("lambda", lambda)).unwrap();
        let got = p.exact_solution(p.b()).unwrap()[0];
        let want = (lambda * (p.b() - p.a())).exp();
        assert!(((got - want) / want).abs() <= 1e-14);
    }
}
