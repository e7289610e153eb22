//! Command-line front end: parse a function, estimate a slope bound, choose
//! the relaxation weight, run a solver, and emit machine-readable traces.
//!
//! Exit codes mirror the outcome classification so shell pipelines can branch
//! on the mathematical result: 0 converged, 2 diverged, 3 exited the
//! interval, 4 budget exhausted, 5 hypothesis check failed, 6 vanishing
//! derivative, 1 usage or evaluation error.

mod output;

use std::process::exit;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use krasno::engine;
use krasno::expr;
use krasno::lipschitz;
use krasno::newton::{self, Side};
use krasno::oracle;
use krasno::{
    Error, Interval, IterationConfig, Outcome, Provenance, RealFunction, SlopeBound, SolveError,
};
use output::{
    build_records, render_csv, render_json, FixedPointConfig, Mode, RootConfig, TraceDocument,
};

const EXIT_USAGE: i32 = 1;
const EXIT_DIVERGED: i32 = 2;
const EXIT_EXITED: i32 = 3;
const EXIT_BUDGET: i32 = 4;
const EXIT_HYPOTHESES: i32 = 5;
const EXIT_ZERO_DERIVATIVE: i32 = 6;

const DEFAULT_SAFETY: f64 = 0.8;
const DEFAULT_DIVERGENCE_THRESHOLD: f64 = 1e12;
const ESTIMATE_GRID: usize = 1024;
/// Sampling window half-width around x0 when estimating on an unbounded
/// domain.
const UNBOUNDED_ESTIMATE_HALF_WIDTH: f64 = 10.0;

#[derive(Parser)]
#[command(
    name = "krasno",
    version,
    about = "Fixed-point and root finding for scalar functions, with honest outcome classification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Damped fixed-point iteration x_{n+1} = (1-t) x_n + t h(x_n)
    FixedPoint(FixedPointArgs),
    /// Newton-Raphson root finding with optional global-convergence checks
    RootNewton(RootNewtonArgs),
    /// Sample a slope bound and recommend a relaxation weight
    Estimate(EstimateArgs),
    /// List fixed points located by the grid-scan oracle
    FixedPoints(FixedPointsArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum SideArg {
    #[value(name = "root_above")]
    RootAbove,
    #[value(name = "root_below")]
    RootBelow,
}

impl From<SideArg> for Side {
    fn from(side: SideArg) -> Side {
        match side {
            SideArg::RootAbove => Side::RootAbove,
            SideArg::RootBelow => Side::RootBelow,
        }
    }
}

#[derive(Args)]
struct FixedPointArgs {
    /// Function expression in x, e.g. "cos(x)"
    #[arg(long = "fn", value_name = "EXPR")]
    function: String,

    /// Domain interval endpoints
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_negative_numbers = true)]
    domain: Option<Vec<f64>>,

    /// Iterate over the whole real line
    #[arg(long, conflicts_with = "domain")]
    unbounded: bool,

    /// Starting point
    #[arg(long, allow_negative_numbers = true)]
    x0: f64,

    /// Relaxation weight in (0, 1]; chosen from the slope bound when absent
    #[arg(long)]
    t: Option<f64>,

    /// Lipschitz constant; estimated by sampling when absent and needed
    #[arg(long = "L", value_name = "VAL")]
    lipschitz: Option<f64>,

    /// Convergence tolerance
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,

    /// Step budget
    #[arg(long = "max-iter", default_value_t = 10_000)]
    max_iter: usize,

    /// Trace format
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Guaranteed monotone mode: requires a bounded domain, a self-map, and
    /// t <= 1/(1+L); exits nonzero on any outcome other than convergence
    #[arg(long)]
    guaranteed: bool,
}

#[derive(Args)]
struct RootNewtonArgs {
    /// Function expression in x, e.g. "x^2 - 2"
    #[arg(long = "fn", value_name = "EXPR")]
    function: String,

    /// Interval confining the iteration
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_negative_numbers = true, required = true)]
    domain: Vec<f64>,

    /// Starting point
    #[arg(long, allow_negative_numbers = true)]
    x0: f64,

    /// Convergence tolerance on |h(x)|
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,

    /// Step budget
    #[arg(long = "max-iter", default_value_t = 10_000)]
    max_iter: usize,

    /// Trace format
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Check the global-convergence sign conditions for this side before
    /// running; refuses to run (exit 5) when they fail, unless --force
    #[arg(long = "check-hypotheses", value_enum, value_name = "SIDE")]
    check_hypotheses: Option<SideArg>,

    /// Run even when the hypothesis check fails
    #[arg(long)]
    force: bool,

    /// Sample count for the hypothesis check
    #[arg(long, default_value_t = 1024)]
    grid: usize,
}

#[derive(Args)]
struct EstimateArgs {
    /// Function expression in x
    #[arg(long = "fn", value_name = "EXPR")]
    function: String,

    /// Sampling interval endpoints
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_negative_numbers = true, required = true)]
    domain: Vec<f64>,

    /// Grid resolution
    #[arg(long, default_value_t = ESTIMATE_GRID)]
    grid: usize,

    /// Estimate the weaker one-sided lower slope bound instead
    #[arg(long)]
    one_sided: bool,
}

#[derive(Args)]
struct FixedPointsArgs {
    /// Function expression in x
    #[arg(long = "fn", value_name = "EXPR")]
    function: String,

    /// Scan interval endpoints
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_negative_numbers = true, required = true)]
    domain: Vec<f64>,

    /// Grid resolution of the sign-change scan
    #[arg(long, default_value_t = oracle::ORACLE_GRID)]
    grid: usize,

    /// Refinement and deduplication tolerance
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::usage(e.to_string())
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help and --version print to stdout and exit 0; everything
            // else is a usage error
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            exit(code);
        }
    };
    let result = match cli.command {
        Command::FixedPoint(args) => cmd_fixed_point(args),
        Command::RootNewton(args) => cmd_root_newton(args),
        Command::Estimate(args) => cmd_estimate(args),
        Command::FixedPoints(args) => cmd_fixed_points(args),
    };
    match result {
        Ok(code) => exit(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            exit(f.code);
        }
    }
}

fn parse_interval(endpoints: &[f64]) -> Result<Interval, Failure> {
    Interval::new(endpoints[0], endpoints[1]).map_err(Failure::from)
}

fn exit_code(outcome: &Outcome) -> i32 {
    match outcome {
        Outcome::Converged { .. } => 0,
        Outcome::Diverged { .. } => EXIT_DIVERGED,
        Outcome::ExitedInterval { .. } => EXIT_EXITED,
        Outcome::BudgetExhausted { .. } => EXIT_BUDGET,
    }
}

fn solve_failure(e: SolveError, zero_derivative_code: i32) -> Failure {
    let code = match e.error {
        Error::ZeroDerivative { .. } => zero_derivative_code,
        _ => EXIT_USAGE,
    };
    Failure {
        code,
        message: format!("{} (after {} accepted iterates)", e.error, e.iterates.len()),
    }
}

fn emit<C: Serialize>(format: Format, doc: &TraceDocument<C>) {
    let rendered = match format {
        Format::Json => render_json(doc),
        Format::Csv => render_csv(doc),
    };
    print!("{rendered}");
}

fn cmd_fixed_point(args: FixedPointArgs) -> Result<i32, Failure> {
    let ast = expr::parse(&args.function).map_err(|e| Failure::usage(e.to_string()))?;
    let domain = if args.unbounded {
        Interval::unbounded()
    } else {
        let endpoints = args
            .domain
            .as_ref()
            .ok_or_else(|| Failure::usage("one of --domain or --unbounded is required"))?;
        parse_interval(endpoints)?
    };
    if args.guaranteed && !domain.is_bounded() {
        return Err(Failure::usage("--guaranteed requires a bounded --domain"));
    }
    if !domain.contains(args.x0) {
        return Err(Failure::usage(format!(
            "--x0 {} is outside the domain {domain}",
            args.x0
        )));
    }
    let h = expr::to_real_function(&ast, domain);

    // Resolve the slope bound, then t. A user t without --guaranteed needs no
    // bound at all.
    let need_bound = args.lipschitz.is_some() || args.t.is_none() || args.guaranteed;
    let bound: Option<SlopeBound> = if let Some(value) = args.lipschitz {
        Some(SlopeBound::lipschitz(value)?)
    } else if need_bound {
        let window = if domain.is_bounded() {
            domain
        } else {
            Interval::new(
                domain.lo().max(args.x0 - UNBOUNDED_ESTIMATE_HALF_WIDTH),
                domain.hi().min(args.x0 + UNBOUNDED_ESTIMATE_HALF_WIDTH),
            )?
        };
        Some(lipschitz::estimate_lipschitz(&h, window, ESTIMATE_GRID)?.bound)
    } else {
        None
    };
    let t = match args.t {
        Some(t) => t,
        None => engine::choose_t(bound.as_ref().expect("bound resolved"), DEFAULT_SAFETY),
    };
    let cfg = IterationConfig::new(t, args.tol, args.max_iter, DEFAULT_DIVERGENCE_THRESHOLD)?;

    let trace = if args.guaranteed {
        engine::iterate_hillam(&h, bound.as_ref().expect("bound resolved"), args.x0, &cfg)
    } else {
        engine::iterate(&h, args.x0, &cfg)
    }
    .map_err(|e| solve_failure(e, EXIT_USAGE))?;

    let config = FixedPointConfig {
        t,
        tol: cfg.tol,
        max_iter: cfg.max_iter,
        divergence_threshold: cfg.divergence_threshold,
        guaranteed: args.guaranteed,
        l: bound.map(|b| b.value),
        l_provenance: bound.map(|b| match b.provenance {
            Provenance::User => "user",
            Provenance::Estimated => "estimated",
        }),
    };
    let doc = TraceDocument {
        mode: Mode::FixedPoint.name(),
        config,
        trace: build_records(&h, &trace, Mode::FixedPoint)?,
        outcome: trace.outcome.clone(),
    };
    emit(args.format, &doc);
    Ok(exit_code(&trace.outcome))
}

fn cmd_root_newton(args: RootNewtonArgs) -> Result<i32, Failure> {
    let ast = expr::parse(&args.function).map_err(|e| Failure::usage(e.to_string()))?;
    if expr::contains_abs(&ast) {
        return Err(Failure::usage(
            "abs(...) is not differentiable; Newton needs a smooth expression",
        ));
    }
    let interval = parse_interval(&args.domain)?;
    if !interval.contains(args.x0) {
        return Err(Failure::usage(format!(
            "--x0 {} is outside the interval {interval}",
            args.x0
        )));
    }
    if expr::contains_nonliteral_pow(&ast) {
        eprintln!(
            "note: a^b with a non-constant exponent differentiates via exp(b*log(a)), \
             which requires a > 0"
        );
    }
    // The expression itself evaluates anywhere; the interval confines the
    // iteration.
    let h = expr::to_real_function(&ast, Interval::unbounded());
    if !h.has_derivative() {
        return Err(Failure::usage("expression could not be differentiated"));
    }

    if let Some(side) = args.check_hypotheses {
        let report = newton::check_global_hypotheses(&h, interval, side.into(), args.grid)?;
        if !report.overall && !args.force {
            let mut rendered = serde_json::to_string_pretty(&report).expect("report serializes");
            rendered.push('\n');
            print!("{rendered}");
            return Ok(EXIT_HYPOTHESES);
        }
        eprintln!(
            "hypotheses: {}",
            serde_json::to_string(&report).expect("report serializes")
        );
    }

    let cfg = IterationConfig::new(0.5, args.tol, args.max_iter, DEFAULT_DIVERGENCE_THRESHOLD)?;
    let trace = newton::newton_solve(&h, interval, args.x0, &cfg)
        .map_err(|e| solve_failure(e, EXIT_ZERO_DERIVATIVE))?;

    let doc = TraceDocument {
        mode: Mode::Root.name(),
        config: RootConfig {
            tol: cfg.tol,
            max_iter: cfg.max_iter,
        },
        trace: build_records(&h, &trace, Mode::Root)?,
        outcome: trace.outcome.clone(),
    };
    emit(args.format, &doc);
    Ok(exit_code(&trace.outcome))
}

#[derive(Serialize)]
struct EstimateReport {
    kind: &'static str,
    value: f64,
    provenance: &'static str,
    n_samples: usize,
    seed: u64,
    refinement_history: Vec<f64>,
    recommended_t: f64,
}

fn cmd_estimate(args: EstimateArgs) -> Result<i32, Failure> {
    let ast = expr::parse(&args.function).map_err(|e| Failure::usage(e.to_string()))?;
    let interval = parse_interval(&args.domain)?;
    let h = expr::to_real_function(&ast, interval);
    let estimate = if args.one_sided {
        lipschitz::estimate_lower_slope(&h, interval, args.grid)?
    } else {
        lipschitz::estimate_lipschitz(&h, interval, args.grid)?
    };
    let report = EstimateReport {
        kind: if args.one_sided {
            "lower_only"
        } else {
            "two_sided_lipschitz"
        },
        value: estimate.bound.value,
        provenance: "estimated",
        n_samples: estimate.n_samples,
        seed: estimate.seed,
        refinement_history: estimate.refinement_history.clone(),
        recommended_t: engine::choose_t(&estimate.bound, DEFAULT_SAFETY),
    };
    let mut rendered = serde_json::to_string_pretty(&report).expect("report serializes");
    rendered.push('\n');
    print!("{rendered}");
    Ok(0)
}

fn cmd_fixed_points(args: FixedPointsArgs) -> Result<i32, Failure> {
    let ast = expr::parse(&args.function).map_err(|e| Failure::usage(e.to_string()))?;
    let interval = parse_interval(&args.domain)?;
    let h: RealFunction = expr::to_real_function(&ast, interval);
    let set = oracle::find_fixed_points(&h, interval, args.grid, args.tol)?;
    println!(
        "{}",
        serde_json::to_string(&set.points).expect("points serialize")
    );
    Ok(0)
}
