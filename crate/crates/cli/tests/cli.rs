use std::process::{Command, Output};

fn rrk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rrk"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = rrk(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn slope(csv: &str) -> f64 {
    csv.lines()
        .find_map(|l| l.strip_prefix("#slope="))
        .expect("slope line")
        .parse()
        .unwrap()
}

#[test]
fn midpoint_interval() {
    assert_eq!(stdout(&["stability", "interval", "--kind", "mid"]), "-2.0,0.0\n");
}

#[test]
fn in_probability_is_reported_as_alias() {
    let out = stdout(&["stability", "interval", "--kind", "sp"]);
    assert!(out.starts_with("#note=sp is evaluated as as\n"));
    assert!(out.ends_with("-2.181927863266568,0.0\n"), "{out}");
}

#[test]
fn eval_at_minus_one() {
    let out = stdout(&["stability", "eval", "--z", "-1,0"]);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("a,b,phi_ms,phi_mid,F,ln_moment2"));
    let f: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(f[4], "-1.0");
}

#[test]
fn mean_square_area() {
    let out = stdout(&["stability", "area", "--kind", "ms", "--resolution", "1000"]);
    let f: Vec<&str> = out.trim().split(',').collect();
    assert_eq!(f[0], "ms");
    assert_eq!(f[3], "1000");
    let area: f64 = f[1].parse().unwrap();
    assert!((area - 3.92).abs() <= 0.05, "{area}");
}

#[test]
fn region_grid_schema() {
    let out = stdout(&[
        "stability",
        "region",
        "--kind",
        "ms",
        "--box",
        "-3,1,-2,2",
        "--nx",
        "4",
        "--ny",
        "3",
    ]);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "x,y,value,member");
    assert_eq!(lines.len(), 1 + 12);
}

#[test]
fn verify_agrees_at_minus_one() {
    let out = stdout(&[
        "stability",
        "verify",
        "--z",
        "-1,0",
        "--kind",
        "as",
        "--kmax",
        "500",
        "--reps",
        "50",
    ]);
    assert!(out.lines().nth(1).unwrap().contains(",agree,"), "{out}");
}

#[test]
fn euler_on_linear_is_first_order() {
    let out = stdout(&[
        "convergence",
        "--problem",
        "linear",
        "--param",
        "lambda=-1",
        "--scheme",
        "euler",
        "--delta",
        "0",
        "--reps",
        "3",
    ]);
    let s = slope(&out);
    assert!((s + 1.0).abs() < 0.05, "{s}");
}

#[test]
fn error_follows_delta_policy() {
    let out = stdout(&[
        "convergence",
        "--problem",
        "sir",
        "--delta-policy",
        "h^1.5:1",
        "--protocol",
        "const-pair",
        "--reps",
        "20",
        "--n-list",
        "100,200,400,800",
    ]);
    let s = slope(&out);
    assert!((-1.65..=-1.35).contains(&s), "{s}");
    let ratios: Vec<f64> = out
        .lines()
        .skip(1)
        .filter(|l| !l.starts_with('#'))
        .map(|row| {
            let f: Vec<&str> = row.split(',').collect();
            f[5].parse::<f64>().unwrap() / f[2].parse::<f64>().unwrap()
        })
        .collect();
    let c = (ratios.iter().map(|r| r.ln()).sum::<f64>() / ratios.len() as f64).exp();
    assert!(ratios.iter().all(|r| *r >= c / 3.0 && *r <= 3.0 * c), "{ratios:?}");
}

#[test]
fn reruns_are_byte_identical() {
    let args = [
        "--seed",
        "17",
        "convergence",
        "--problem",
        "example1",
        "--param",
        "gamma=2",
        "--n-list",
        "50,100,200",
        "--reps",
        "40",
        "--mode",
        "uniform",
        "--noise",
        "uniform",
        "--delta",
        "0.01",
    ];
    let a = rrk(&args);
    let b = rrk(&args);
    let c = rrk(&[&["--threads", "1"], &args[..]].concat());
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
    let v1 = stdout(&[
        "--seed",
        "3",
        "stability",
        "verify",
        "--z",
        "-0.5,0.5",
        "--kmax",
        "300",
        "--reps",
        "20",
    ]);
    let v2 = stdout(&[
        "--seed",
        "3",
        "stability",
        "verify",
        "--z",
        "-0.5,0.5",
        "--kmax",
        "300",
        "--reps",
        "20",
    ]);
    assert_eq!(v1, v2);
}

#[test]
fn writes_to_out_file() {
    let path = std::env::temp_dir().join(format!("rrk-cli-test-{}.csv", std::process::id()));
    let out = rrk(&[
        "--out",
        path.to_str().unwrap(),
        "stability",
        "interval",
        "--kind",
        "mid",
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), "-2.0,0.0\n");
    std::fs::remove_file(path).unwrap();
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        &["convergence"][..],
        &["convergence", "--problem", "nope"],
        &["convergence", "--problem", "sir", "--delta", "2"],
        &[
            "convergence",
            "--problem",
            "sir",
            "--delta",
            "0.1",
            "--delta-policy",
            "h^1:1",
        ],
        &["convergence", "--problem", "sir", "--delta-policy", "h1.5"],
        &["convergence", "--problem", "sir", "--n-list", "200,100,400"],
        &["convergence", "--problem", "sir", "--p", "1"],
        &["convergence", "--problem", "sir", "--scheme", "rk4"],
        &["stability", "area", "--kind", "xx"],
        &["stability", "eval", "--z", "1"],
        &["stability", "region", "--kind", "ms", "--box", "1,0,0,1"],
    ] {
        assert_eq!(rrk(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn numerical_failures_exit_with_one() {
    let overflow = rrk(&[
        "convergence",
        "--problem",
        "linear",
        "--param",
        "lambda=-1e300",
        "--n-list",
        "1,2,3",
        "--reps",
        "1",
    ]);
    assert_eq!(overflow.status.code(), Some(1));
    let reference = rrk(&[
        "convergence",
        "--problem",
        "linear",
        "--param",
        "lambda=1e6",
        "--n-list",
        "1,2,3",
        "--reps",
        "1",
    ]);
    assert_eq!(reference.status.code(), Some(1));
}
