//! Acceptance suite: one test per release criterion, each enforced at its
//! stated tolerance and printing a PASS line (visible with `--nocapture`).
//!
//! Run with: `cargo test -p krasno-cli --test acceptance -- --nocapture`

use std::process::Command;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use krasno::engine::{classify_start, iterate, iterate_hillam, Direction};
use krasno::expr;
use krasno::lipschitz::estimate_lipschitz;
use krasno::newton::{g_transform, g_transform_function, newton_solve, newton_step};
use krasno::oracle::{bisect_root, nearest_fixed_point, SearchDirection};
use krasno::testing::random_self_map;
use krasno::{
    max_relaxation, DivergenceDirection, Interval, IterationConfig, Outcome, RealFunction,
    SlopeBound,
};

fn parabola() -> RealFunction {
    RealFunction::new(Interval::unbounded(), |x| x * x - 2.0)
        .with_derivative(|x| 2.0 * x)
        .with_second_derivative(|_| 2.0)
}

fn exp_decay() -> RealFunction {
    RealFunction::new(Interval::unbounded(), |x| (-x).exp() - 1.0)
        .with_derivative(|x| -(-x).exp())
        .with_second_derivative(|x| (-x).exp())
}

fn converged_point(outcome: &Outcome, context: &str) -> f64 {
    match outcome {
        Outcome::Converged { point, .. } => *point,
        other => panic!("{context}: expected convergence, got {other:?}"),
    }
}

/// Strictly monotone until the first repeated value, constant afterwards.
fn assert_monotone(iterates: &[f64], increasing: bool, context: &str) {
    let mut constant = false;
    for (i, w) in iterates.windows(2).enumerate() {
        let (a, b) = (w[0], w[1]);
        if increasing {
            assert!(b >= a, "{context}: decreasing step at index {i}");
        } else {
            assert!(b <= a, "{context}: increasing step at index {i}");
        }
        if constant {
            assert!(
                b == a,
                "{context}: trace moved again after repeating at {i}"
            );
        }
        if a == b {
            constant = true;
        }
    }
}

#[test]
fn criterion_01_hillam_guarantee() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC1);
    for instance in 0..500 {
        let pl = random_self_map(&mut rng, 5.0);
        let h = pl.to_function();
        let bound = SlopeBound::lipschitz(pl.lipschitz_bound()).unwrap();
        assert!(bound.value <= 5.0 * (1.0 + 1e-12));
        let cfg = IterationConfig::new(max_relaxation(&bound), 1e-10, 50_000, 1e12).unwrap();
        for run in 0..5 {
            let x0: f64 = rng.random_range(0.0..=1.0);
            let context = format!("instance {instance} run {run} x0 {x0}");
            let report = classify_start(&h, x0, cfg.tol).unwrap();
            let trace =
                iterate_hillam(&h, &bound, x0, &cfg).unwrap_or_else(|e| panic!("{context}: {e}"));
            let point = converged_point(&trace.outcome, &context);
            let direction = match report.direction {
                Direction::Increasing => {
                    assert_monotone(&trace.iterates, true, &context);
                    SearchDirection::Up
                }
                Direction::Decreasing => {
                    assert_monotone(&trace.iterates, false, &context);
                    SearchDirection::Down
                }
                Direction::Stationary => {
                    assert_eq!(point, x0, "{context}");
                    continue;
                }
            };
            let expected = nearest_fixed_point(&h, h.domain(), x0, direction, 4096, 1e-10)
                .unwrap()
                .unwrap_or_else(|| panic!("{context}: oracle found no fixed point"));
            assert!(
                (point - expected).abs() <= 1e-8,
                "{context}: limit {point} vs oracle {expected}"
            );
        }
    }
    println!("criterion 1 (Hillam guarantee, 2500 runs, zero failures): PASS");
}

#[test]
fn criterion_02_barrier_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC2);
    let mut checked = 0;
    while checked < 500 {
        let pl = random_self_map(&mut rng, 5.0);
        let h = pl.to_function();
        let bound = SlopeBound::lipschitz(pl.lipschitz_bound()).unwrap();
        let cfg = IterationConfig::new(max_relaxation(&bound), 1e-10, 50_000, 1e12).unwrap();
        let x0: f64 = rng.random_range(0.0..=1.0);
        let report = classify_start(&h, x0, cfg.tol).unwrap();
        if report.direction != Direction::Increasing {
            continue;
        }
        // the target fixed point, known in closed form
        let c = match pl.crossings().into_iter().find(|c| *c > x0) {
            Some(c) => c,
            None => continue,
        };
        let trace = iterate_hillam(&h, &bound, x0, &cfg).unwrap();
        for (i, x) in trace.iterates.iter().enumerate() {
            assert!(
                *x <= c + 1e-12,
                "iterate {i} = {x} passed the barrier {c} (x0 {x0})"
            );
        }
        checked += 1;
    }
    println!("criterion 2 (barrier x_n <= c + 1e-12, 500 increasing runs): PASS");
}

#[test]
fn criterion_03_threshold_honesty() {
    let h = RealFunction::new(Interval::new(-1.0, 1.0).unwrap(), |x| -3.0 * x);
    for x0 in [0.9, -0.7, 0.31, 1.0, -1.0] {
        // at the bound t = 1/(1+3) the trace is monotone and converges to 0
        let cfg = IterationConfig::new(0.25, 1e-9, 10_000, 1e12).unwrap();
        let trace = iterate(&h, x0, &cfg).unwrap();
        let point = converged_point(&trace.outcome, &format!("t=0.25 x0={x0}"));
        assert!(
            point.abs() <= 1e-8,
            "limit {point} not at the fixed point 0"
        );
        assert!(
            trace.is_nondecreasing() || trace.is_nonincreasing(),
            "trace not monotone at t = 0.25 from {x0}: {:?}",
            trace.iterates
        );

        // slightly above the bound nothing is promised except honesty
        let cfg = IterationConfig::new(0.3, 1e-9, 10_000, 1e12).unwrap();
        let trace = iterate(&h, x0, &cfg).unwrap();
        if let Outcome::Converged {
            point, residual, ..
        } = trace.outcome
        {
            assert!(residual <= cfg.tol);
            assert!(
                (h.eval(point).unwrap() - point).abs() <= cfg.tol,
                "dishonest convergence report at t = 0.3 from {x0}"
            );
        }
    }
    println!("criterion 3 (threshold honesty for h = -3x): PASS");
}

#[test]
fn criterion_04_real_line_trichotomy() {
    let cfg = IterationConfig::new(0.5, 1e-9, 100_000, 1e8).unwrap();

    let up = RealFunction::new(Interval::unbounded(), |x| x + 1.0);
    let trace = iterate(&up, 0.0, &cfg).unwrap();
    assert!(
        matches!(
            trace.outcome,
            Outcome::Diverged {
                direction: DivergenceDirection::PositiveInfinity,
                ..
            }
        ),
        "x + 1 should diverge to +inf, got {:?}",
        trace.outcome
    );

    let down = RealFunction::new(Interval::unbounded(), |x| x - 1.0);
    let trace = iterate(&down, 0.0, &cfg).unwrap();
    assert!(
        matches!(
            trace.outcome,
            Outcome::Diverged {
                direction: DivergenceDirection::NegativeInfinity,
                ..
            }
        ),
        "x - 1 should diverge to -inf, got {:?}",
        trace.outcome
    );

    let cos = RealFunction::new(Interval::unbounded(), f64::cos);
    for x0 in [-10.0, 0.0, 10.0] {
        let trace = iterate(&cos, x0, &cfg).unwrap();
        let point = converged_point(&trace.outcome, &format!("cos from {x0}"));
        assert!(
            (point - 0.7390851332).abs() <= 1e-8,
            "cos from {x0} landed at {point}"
        );
    }
    println!("criterion 4 (real-line trichotomy): PASS");
}

#[test]
fn criterion_05_newton_global_convergence() {
    let cfg = IterationConfig::new(0.5, 1e-12, 200, 1e12).unwrap();

    let h = parabola();
    let root = bisect_root(&h, 1.0, 2.0, 1e-12).unwrap();
    let interval = Interval::new(std::f64::consts::SQRT_2, 3.0).unwrap();
    for i in 0..=100 {
        let x0 = interval.lo() + interval.width() * i as f64 / 100.0;
        let trace = newton_solve(&h, interval, x0, &cfg).unwrap();
        let point = converged_point(&trace.outcome, &format!("x^2-2 from {x0}"));
        assert!(
            (point - root).abs() <= 1e-10,
            "x^2-2 from {x0}: {point} vs oracle {root}"
        );
    }

    let h = exp_decay();
    let root = bisect_root(&h, -1.0, 0.0, 1e-12).unwrap();
    assert!(root.abs() <= 1e-12);
    let interval = Interval::new(-1.0, 0.0).unwrap();
    for i in 0..=100 {
        let x0 = interval.lo() + interval.width() * i as f64 / 100.0;
        let trace = newton_solve(&h, interval, x0, &cfg).unwrap();
        let point = converged_point(&trace.outcome, &format!("exp(-x)-1 from {x0}"));
        assert!(
            (point - root).abs() <= 1e-10,
            "exp(-x)-1 from {x0}: {point} vs oracle {root}"
        );
    }
    println!("criterion 5 (Newton global convergence from 2 x 101 starts): PASS");
}

fn half_step_cases() -> Vec<(RealFunction, f64, f64)> {
    vec![
        (parabola(), std::f64::consts::SQRT_2, 3.0),
        (exp_decay(), -1.0, 0.0),
        (
            RealFunction::new(Interval::unbounded(), |x| x * x * x - 2.0)
                .with_derivative(|x| 3.0 * x * x),
            1.3,
            3.0,
        ),
        (
            RealFunction::new(Interval::unbounded(), |x| x.cos() - x)
                .with_derivative(|x| -x.sin() - 1.0),
            0.0,
            1.0,
        ),
        (
            RealFunction::new(Interval::new(0.01, 10.0).unwrap(), f64::ln)
                .with_derivative(|x| 1.0 / x),
            0.5,
            2.0,
        ),
    ]
}

#[test]
fn criterion_06_half_step_identity() {
    for (case, (h, lo, hi)) in half_step_cases().iter().enumerate() {
        for i in 0..1000 {
            let x = lo + (hi - lo) * (i as f64 + 0.5) / 1000.0;
            let newton = newton_step(h, x).unwrap();
            let averaged = (x + g_transform(h, x).unwrap()) / 2.0;
            assert!(
                (newton - averaged).abs() <= 1e-12 * x.abs().max(1.0),
                "case {case} at x = {x}: {newton} vs {averaged}"
            );
        }
    }
    println!("criterion 6 (half-step identity, 5 x 1000 points): PASS");
}

#[test]
fn criterion_07_engine_newton_equivalence() {
    let cases = [
        (
            parabola(),
            Interval::new(std::f64::consts::SQRT_2, 3.0).unwrap(),
            (1.0, 2.0),
        ),
        (exp_decay(), Interval::new(-1.0, 0.0).unwrap(), (-1.0, 0.5)),
    ];
    let cfg = IterationConfig::new(0.5, 1e-12, 200, 1e12).unwrap();
    for (h, interval, bracket) in &cases {
        let g = g_transform_function(h).unwrap();
        let oracle_root = bisect_root(h, bracket.0, bracket.1, 1e-12).unwrap();
        for i in 0..=20 {
            let x0 = interval.lo() + interval.width() * i as f64 / 20.0;
            let newton_trace = newton_solve(h, *interval, x0, &cfg).unwrap();
            let engine_trace = iterate(&g, x0, &cfg).unwrap();
            let shared = engine_trace.iterates.len().min(newton_trace.iterates.len());
            for k in 0..shared {
                let a = engine_trace.iterates[k];
                let b = newton_trace.iterates[k];
                let scale = a
                    .abs()
                    .max(b.abs())
                    .max(if k > 0 {
                        engine_trace.iterates[k - 1].abs()
                    } else {
                        0.0
                    })
                    .max(f64::MIN_POSITIVE);
                // two ulps of drift allowed per step taken
                let allowance = 2.0 * k.max(1) as f64 * f64::EPSILON * scale;
                assert!(
                    (a - b).abs() <= allowance,
                    "x0 {x0} step {k}: engine {a} vs newton {b} (allowance {allowance})"
                );
            }
            let newton_point = converged_point(&newton_trace.outcome, "newton");
            let engine_point = converged_point(&engine_trace.outcome, "engine on g");
            assert!((newton_point - oracle_root).abs() <= 1e-10);
            assert!((engine_point - oracle_root).abs() <= 1e-10);
        }
    }
    println!("criterion 7 (engine on g with t = 1/2 reproduces Newton): PASS");
}

#[test]
fn criterion_08_lipschitz_estimator_soundness() {
    let h = RealFunction::new(Interval::new(0.0, 1.0).unwrap(), f64::cos);
    let true_l = 1f64.sin();
    let mut previous = 0.0;
    for grid in [64, 256, 1024] {
        let estimate = estimate_lipschitz(&h, h.domain(), grid).unwrap();
        assert!(
            estimate.bound.value >= previous,
            "estimate regressed at grid {grid}"
        );
        assert!(
            estimate.bound.value <= true_l + 1e-9,
            "estimate {} above sin(1)",
            estimate.bound.value
        );
        previous = estimate.bound.value;
    }
    assert!(
        previous >= true_l - 0.01,
        "grid-1024 estimate {previous} more than 0.01 below sin(1)"
    );
    println!("criterion 8 (estimator monotone in [sin 1 - 0.01, sin 1]): PASS");
}

#[test]
fn criterion_09_symbolic_derivatives_match_finite_differences() {
    // one representative per supported function family, plus compositions
    let cases: [(&str, f64, f64); 11] = [
        ("sin(x)", -2.0, 2.0),
        ("cos(x)", -2.0, 2.0),
        ("tan(x)", -1.0, 1.0),
        ("exp(x)", -2.0, 2.0),
        ("log(x)", 0.5, 3.0),
        ("sqrt(x)", 0.25, 4.0),
        ("x^3 - 2*x + 1", -2.0, 2.0),
        ("x^2.5", 0.5, 2.0),
        ("1 / (1 + x^2)", -2.0, 2.0),
        ("exp(-x) - 1", -2.0, 2.0),
        ("sin(cos(x))", -2.0, 2.0),
    ];
    for (src, lo, hi) in cases {
        let ast = expr::parse(src).unwrap();
        let d1 = expr::differentiate(&ast).unwrap();
        let d2 = expr::differentiate(&d1).unwrap();
        for i in 0..100 {
            let x = lo + (hi - lo) * (i as f64 + 0.5) / 100.0;
            let step = 1e-6 * x.abs().max(1.0);
            let fd1 = (ast.eval(x + step).unwrap() - ast.eval(x - step).unwrap()) / (2.0 * step);
            let sym1 = d1.eval(x).unwrap();
            assert!(
                (sym1 - fd1).abs() <= 1e-5 * sym1.abs().max(1.0),
                "{src} first derivative at {x}: {sym1} vs {fd1}"
            );
            let step2 = 1e-4;
            let fd2 = (ast.eval(x + step2).unwrap() - 2.0 * ast.eval(x).unwrap()
                + ast.eval(x - step2).unwrap())
                / (step2 * step2);
            let sym2 = d2.eval(x).unwrap();
            assert!(
                (sym2 - fd2).abs() <= 1e-5 * sym2.abs().max(1.0),
                "{src} second derivative at {x}: {sym2} vs {fd2}"
            );
        }
    }
    println!("criterion 9 (symbolic derivatives vs central differences): PASS");
}

struct GoldenCase {
    name: &'static str,
    args: &'static [&'static str],
    expected_exit: i32,
}

const GOLDEN_CASES: [GoldenCase; 6] = [
    GoldenCase {
        name: "fixed_point_cos_guaranteed",
        args: &[
            "fixed-point",
            "--fn",
            "cos(x)",
            "--domain",
            "0",
            "1",
            "--x0",
            "0",
            "--guaranteed",
        ],
        expected_exit: 0,
    },
    GoldenCase {
        name: "fixed_point_diverges",
        args: &["fixed-point", "--fn", "x + 1", "--unbounded", "--x0", "0"],
        expected_exit: 2,
    },
    GoldenCase {
        name: "fixed_point_exits",
        args: &[
            "fixed-point",
            "--fn",
            "x + 1",
            "--domain",
            "0",
            "1",
            "--x0",
            "0.5",
        ],
        expected_exit: 3,
    },
    GoldenCase {
        name: "root_newton_sqrt2",
        args: &[
            "root-newton",
            "--fn",
            "x^2 - 2",
            "--domain",
            "1.4142135624",
            "3",
            "--x0",
            "3",
            "--check-hypotheses",
            "root_below",
        ],
        expected_exit: 0,
    },
    GoldenCase {
        name: "root_newton_exp",
        args: &[
            "root-newton",
            "--fn",
            "exp(-x) - 1",
            "--domain",
            "-1",
            "0",
            "--x0",
            "-1",
            "--check-hypotheses",
            "root_above",
        ],
        expected_exit: 0,
    },
    GoldenCase {
        name: "root_newton_hypotheses_fail",
        args: &[
            "root-newton",
            "--fn",
            "x^2 - 2",
            "--domain",
            "0",
            "1.4142135624",
            "--x0",
            "0.5",
            "--check-hypotheses",
            "root_above",
        ],
        expected_exit: 5,
    },
];

fn run_cli(args: &[&str]) -> (Vec<u8>, i32) {
    let output = Command::new(env!("CARGO_BIN_EXE_krasno"))
        .args(args)
        .output()
        .expect("binary runs");
    (output.stdout, output.status.code().expect("exit code"))
}

#[test]
fn criterion_10_cli_golden_traces() {
    for case in &GOLDEN_CASES {
        let (first, code) = run_cli(case.args);
        let (second, code2) = run_cli(case.args);
        assert_eq!(
            code, case.expected_exit,
            "{}: unexpected exit code",
            case.name
        );
        assert_eq!(
            code2, case.expected_exit,
            "{}: exit code not stable",
            case.name
        );
        assert_eq!(
            first, second,
            "{}: consecutive runs are not byte-identical",
            case.name
        );
        let golden_path = format!(
            "{}/tests/golden/{}.json",
            env!("CARGO_MANIFEST_DIR"),
            case.name
        );
        let golden = std::fs::read(&golden_path)
            .unwrap_or_else(|e| panic!("{}: missing golden file {golden_path}: {e}", case.name));
        assert_eq!(
            first, golden,
            "{}: output no longer matches the committed golden file",
            case.name
        );
    }
    println!("criterion 10 (six golden CLI traces, byte-identical): PASS");
}
