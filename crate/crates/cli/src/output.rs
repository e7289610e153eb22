//! Machine-readable trace rendering.
//!
//! JSON and CSV traces of the same run carry identical numeric sequences:
//! every float is formatted through the same shortest-round-trip writer.

use serde::Serialize;

use krasno::{DivergenceDirection, Error, ExitSide, IterationTrace, Outcome, RealFunction};

#[derive(Debug, Clone, Copy)]
pub enum Mode {
    FixedPoint,
    Root,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::FixedPoint => "fixed_point",
            Mode::Root => "root",
        }
    }
}

#[derive(Debug, Serialize)]
pub struct TraceRecord {
    pub n: usize,
    pub x: f64,
    pub hx: f64,
    pub residual: f64,
}

#[derive(Debug, Serialize)]
pub struct TraceDocument<C: Serialize> {
    pub mode: &'static str,
    pub config: C,
    pub trace: Vec<TraceRecord>,
    pub outcome: Outcome,
}

#[derive(Debug, Serialize)]
pub struct FixedPointConfig {
    pub t: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub divergence_threshold: f64,
    pub guaranteed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l_provenance: Option<&'static str>,
}

#[derive(Debug, Serialize)]
pub struct RootConfig {
    pub tol: f64,
    pub max_iter: usize,
}

/// Re-evaluates `h` along the trace; evaluators are pure, so the recomputed
/// values match the run bit for bit.
pub fn build_records(
    h: &RealFunction,
    trace: &IterationTrace,
    mode: Mode,
) -> Result<Vec<TraceRecord>, Error> {
    trace
        .iterates
        .iter()
        .enumerate()
        .map(|(n, &x)| {
            let hx = h.eval(x)?;
            let residual = match mode {
                Mode::FixedPoint => (hx - x).abs(),
                Mode::Root => hx.abs(),
            };
            Ok(TraceRecord { n, x, hx, residual })
        })
        .collect()
}

pub fn render_json<C: Serialize>(doc: &TraceDocument<C>) -> String {
    let mut out = serde_json::to_string_pretty(doc).expect("trace document serializes");
    out.push('\n');
    out
}

pub fn render_csv<C: Serialize>(doc: &TraceDocument<C>) -> String {
    let mut out = String::from("n,x,hx,residual\n");
    for r in &doc.trace {
        out.push_str(&r.n.to_string());
        for v in [r.x, r.hx, r.residual] {
            out.push(',');
            out.push_str(&fmt_f64(v));
        }
        out.push('\n');
    }
    out.push_str("# outcome: ");
    out.push_str(&outcome_line(&doc.outcome));
    out.push('\n');
    out
}

/// Shortest representation that round-trips, identical to the JSON encoding.
pub fn fmt_f64(v: f64) -> String {
    serde_json::to_string(&v).expect("finite float serializes")
}

fn outcome_line(outcome: &Outcome) -> String {
    match outcome {
        Outcome::Converged {
            point,
            residual,
            iterations,
        } => format!(
            "converged point={} residual={} iterations={}",
            fmt_f64(*point),
            fmt_f64(*residual),
            iterations
        ),
        Outcome::Diverged { direction, last } => {
            let dir = match direction {
                DivergenceDirection::PositiveInfinity => "+inf",
                DivergenceDirection::NegativeInfinity => "-inf",
            };
            format!("diverged direction={dir} last={}", fmt_f64(*last))
        }
        Outcome::ExitedInterval { side, last } => {
            let side = match side {
                ExitSide::BelowLo => "below_lo",
                ExitSide::AboveHi => "above_hi",
            };
            format!("exited_interval side={side} last={}", fmt_f64(*last))
        }
        Outcome::BudgetExhausted { last } => {
            format!("budget_exhausted last={}", fmt_f64(*last))
        }
    }
}
