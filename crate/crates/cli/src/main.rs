//! `rrk`: convergence experiments and stability regions of the randomized
//! two-stage Runge-Kutta scheme, written as CSV.

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rrk_core::experiments::{fmt_num, DEFAULT_REPS_CONST, DEFAULT_REPS_RANDOM};
use rrk_core::stability::{
    f_value, interval_endpoints, ln_moment2, mc_verify, phi_mid, phi_ms, region_area, region_grid, Outcome, PlotBox,
};
use rrk_core::{
    convergence_study, make_problem, ComplexPoint, DeltaPolicy, Error, ErrorMode, NoiseKind, NoiseProtocol, NoiseSpec,
    Params, RegionKind, Sampling, Scheme, WorstCaseProtocol,
};

#[derive(Parser, Debug)]
#[command(
    name = "rrk",
    version,
    about = "Randomized Runge-Kutta experiments and stability regions"
)]
struct Cli {
    /// Master seed for every random stream.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output file; standard output when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (default: RAYON_NUM_THREADS, else all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Error against mesh size, with a log-log slope.
    Convergence(ConvergenceArgs),
    /// Stability regions of the scheme on the linear test equation.
    #[command(subcommand)]
    Stability(StabilityCommand),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Protocol {
    /// Noise of the --noise kind at the given level.
    Single,
    /// Worse of the constant noises +delta and -delta.
    ConstPair,
    /// Worst of 100 uniform-noise realizations.
    RandomReps,
}

#[derive(Args, Debug)]
struct ConvergenceArgs {
    #[arg(long)]
    problem: String,
    /// Problem parameter, repeatable (e.g. --param gamma=2).
    #[arg(long = "param", value_name = "KEY=VALUE")]
    params: Vec<String>,
    #[arg(long, default_value = "rrk2")]
    scheme: Scheme,
    /// Comma-separated, strictly increasing mesh sizes.
    #[arg(long, value_delimiter = ',', default_values_t = [100usize, 200, 400, 800, 1600])]
    n_list: Vec<usize>,
    /// Moment order of the error.
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    /// Replicates per estimate (default 1000, or 100 with random-reps).
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long, default_value = "terminal")]
    mode: ErrorMode,
    #[arg(long, default_value = "none")]
    noise: NoiseKind,
    #[arg(long, value_enum, default_value_t = Protocol::Single)]
    protocol: Protocol,
    /// Fixed noise level.
    #[arg(long, conflicts_with = "delta_policy")]
    delta: Option<f64>,
    /// Noise level c*h^q per row, written "h^q:c".
    #[arg(long, value_name = "h^q:c")]
    delta_policy: Option<String>,
    /// Also perturb the initial value.
    #[arg(long)]
    perturb_initial: bool,
    /// Bound on the relative noise factor.
    #[arg(long, default_value_t = 1.0)]
    alpha_bound: f64,
}

#[derive(Subcommand, Debug)]
enum StabilityCommand {
    /// Indicator value and membership on a pixel grid.
    Region {
        #[arg(long)]
        kind: RegionKind,
        /// xmin,xmax,ymin,ymax
        #[arg(long = "box", allow_hyphen_values = true, default_value = "-3.3,0.5,-3.3,3.3")]
        bounds: String,
        #[arg(long, default_value_t = 381)]
        nx: usize,
        #[arg(long, default_value_t = 661)]
        ny: usize,
    },
    /// Area of a region by pixel counting.
    Area {
        #[arg(long)]
        kind: RegionKind,
        /// Pixels per unit length.
        #[arg(long, default_value_t = 1000)]
        resolution: usize,
    },
    /// Intersection of a region with the real axis.
    Interval {
        #[arg(long)]
        kind: RegionKind,
    },
    /// Monte-Carlo check of membership at one point.
    Verify {
        /// re,im
        #[arg(long, allow_hyphen_values = true)]
        z: ComplexPoint,
        /// Region kind; all kinds when omitted.
        #[arg(long)]
        kind: Option<RegionKind>,
        #[arg(long, default_value_t = 2000)]
        kmax: usize,
        #[arg(long, default_value_t = 200)]
        reps: usize,
    },
    /// Indicator functionals at one point.
    Eval {
        /// re,im
        #[arg(long, allow_hyphen_values = true)]
        z: ComplexPoint,
    },
}

fn parse_params(raw: &[String]) -> Result<Params, Error> {
    let mut params = Params::new();
    for kv in raw {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::InvalidParameter(format!("expected KEY=VALUE, got `{kv}`")))?;
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("parameter `{k}` is not a number: `{v}`")))?;
        params.insert(k.trim(), v);
    }
    Ok(params)
}

fn parse_delta_policy(s: &str) -> Result<DeltaPolicy, Error> {
    let bad = || Error::InvalidParameter(format!("expected a delta policy like `h^1.5:1`, got `{s}`"));
    let (power, c) = s.split_once(':').ok_or_else(bad)?;
    let q = power.trim().strip_prefix("h^").ok_or_else(bad)?;
    let q: f64 = q.parse().map_err(|_| bad())?;
    let c: f64 = c.trim().parse().map_err(|_| bad())?;
    if !(q.is_finite() && c.is_finite() && c >= 0.0) {
        return Err(bad());
    }
    Ok(DeltaPolicy::StepPower { c, q })
}

fn convergence(args: &ConvergenceArgs, seed: u64) -> Result<String, Error> {
    let problem = make_problem(&args.problem, &parse_params(&args.params)?)?;
    let policy = match (&args.delta, &args.delta_policy) {
        (Some(d), None) => DeltaPolicy::Fixed(*d),
        (None, Some(p)) => parse_delta_policy(p)?,
        (None, None) => DeltaPolicy::Fixed(0.0),
        (Some(_), Some(_)) => unreachable!("rejected by the parser"),
    };
    if args.protocol != Protocol::Single && args.noise != NoiseKind::None {
        return Err(Error::InvalidParameter(
            "--noise applies to the single protocol only".into(),
        ));
    }
    let protocol = match args.protocol {
        Protocol::Single => {
            let spec = NoiseSpec::new(args.noise, 0.0)?
                .with_alpha_bound(args.alpha_bound)?
                .with_initial_perturbation(args.perturb_initial);
            NoiseProtocol::Single(spec)
        }
        Protocol::ConstPair => NoiseProtocol::Worst(WorstCaseProtocol::ConstPair),
        Protocol::RandomReps => NoiseProtocol::Worst(WorstCaseProtocol::RandomReps),
    };
    if args.perturb_initial && args.protocol != Protocol::Single {
        return Err(Error::InvalidParameter(
            "--perturb-initial applies to the single protocol only".into(),
        ));
    }
    let reps = args.reps.unwrap_or(match args.protocol {
        Protocol::RandomReps => DEFAULT_REPS_RANDOM,
        _ => DEFAULT_REPS_CONST,
    });
    let sampling = Sampling::new(args.p, reps, args.mode, seed)?;
    let table = convergence_study(&problem, args.scheme, &args.n_list, policy, protocol, &sampling)?;
    Ok(table.to_csv())
}

fn parse_box(s: &str) -> Result<PlotBox, Error> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::InvalidParameter(format!("expected xmin,xmax,ymin,ymax, got `{s}`")))?;
    if v.len() != 4 {
        return Err(Error::InvalidParameter(format!(
            "expected 4 box coordinates, got {}",
            v.len()
        )));
    }
    PlotBox::new(v[0], v[1], v[2], v[3])
}

fn alias_note(kind: RegionKind) -> String {
    if kind.canonical() != kind {
        format!("#note={} is evaluated as {}\n", kind.name(), kind.canonical().name())
    } else {
        String::new()
    }
}

fn outcome_name(o: Outcome) -> &'static str {
    match o {
        Outcome::Agree => "agree",
        Outcome::Disagree => "disagree",
        Outcome::Inconclusive => "inconclusive",
    }
}

fn stability(cmd: &StabilityCommand, seed: u64) -> Result<String, Error> {
    match cmd {
        StabilityCommand::Region { kind, bounds, nx, ny } => {
            let grid = region_grid(*kind, parse_box(bounds)?, *nx, *ny)?;
            let mut out = alias_note(*kind);
            if !grid.singular_pixels().is_empty() {
                out.push_str(&format!("#singular_pixels={}\n", grid.singular_pixels().len()));
            }
            out.push_str(&grid.to_csv());
            Ok(out)
        }
        StabilityCommand::Area { kind, resolution } => {
            let est = region_area(*kind, *resolution)?;
            Ok(format!("{}{}\n", alias_note(*kind), est.to_csv_line()))
        }
        StabilityCommand::Interval { kind } => {
            let (l, r) = interval_endpoints(*kind)?;
            Ok(format!("{}{},{}\n", alias_note(*kind), fmt_num(l), fmt_num(r)))
        }
        StabilityCommand::Verify { z, kind, kmax, reps } => {
            let kinds: Vec<RegionKind> = match kind {
                Some(k) => vec![*k],
                None => RegionKind::ALL.to_vec(),
            };
            let mut out = String::from(
                "kind,a,b,member,drift,ci_low,ci_high,expected_drift,outcome,diverged_paths,decaying_paths\n",
            );
            for k in kinds {
                let v = mc_verify(*z, k, *kmax, *reps, seed)?;
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{},{},{}\n",
                    k.name(),
                    fmt_num(z.a),
                    fmt_num(z.b),
                    u8::from(v.member),
                    fmt_num(v.drift),
                    fmt_num(v.ci.0),
                    fmt_num(v.ci.1),
                    fmt_num(v.expected_drift),
                    outcome_name(v.outcome),
                    v.diverged_paths,
                    v.decaying_paths
                ));
            }
            Ok(out)
        }
        StabilityCommand::Eval { z } => {
            let m2 = ln_moment2(z.a, z.b)?;
            Ok(format!(
                "a,b,phi_ms,phi_mid,F,ln_moment2\n{},{},{},{},{},{}\n",
                fmt_num(z.a),
                fmt_num(z.b),
                fmt_num(phi_ms(*z)),
                fmt_num(phi_mid(*z)),
                fmt_num(f_value(z.a, z.b)),
                fmt_num(m2)
            ))
        }
    }
}

fn write_output(path: Option<&PathBuf>, text: &str) -> io::Result<()> {
    match path {
        Some(p) => File::create(p)?.write_all(text.as_bytes()),
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let result = match &cli.command {
        Command::Convergence(args) => convergence(args, cli.seed),
        Command::Stability(cmd) => stability(cmd, cli.seed),
    };
    match result {
        Ok(text) => match write_output(cli.out.as_ref(), &text) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: writing output: {e}");
                ExitCode::from(1)
            }
        },
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { 1 } else { 2 })
        }
    }
}
