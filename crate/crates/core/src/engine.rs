//! Damped fixed-point iteration with outcome classification.
//!
//! The engine iterates `x_{n+1} = (1 - t) x_n + t h(x_n)`, computed in this
//! exact algebraic form so traces reproduce bit for bit. With `t = 1/2` the
//! step is bit-identical to the plain average `(x_n + h(x_n)) / 2`.
//!
//! Every run ends in exactly one of four outcomes: convergence to a fixed
//! point, divergence toward an unbounded domain side, exit through a finite
//! endpoint, or budget exhaustion. For an L-Lipschitz self-map of a bounded
//! interval and `t <= 1/(1+L)`, [`iterate_hillam`] additionally guarantees a
//! monotone trace converging to the nearest fixed point in the travel
//! direction.

use serde::Serialize;

use crate::error::{Error, SolveError};
use crate::function::{
    max_relaxation, DivergenceDirection, ExitSide, Interval, IterationConfig, IterationTrace,
    Outcome, RealFunction, SlopeBound,
};
use crate::oracle;

/// Grid resolution of the fixed-point candidate scan that backs divergence
/// classification on unbounded domains.
const DIVERGENCE_SCAN_GRID: usize = 4096;

/// Monotone steps required before the escape rule may declare divergence. A
/// single large step past every candidate is still trivially monotone; an
/// oscillating run reveals itself by the second step.
const ESCAPE_MIN_STEPS: usize = 3;

/// Sign of `h(x0) - x0`, which fixes the travel direction of the whole run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialSign {
    /// `h(x0) > x0`
    Above,
    /// `h(x0) < x0`
    Below,
    /// `|h(x0) - x0| <= tol`
    Fixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Increasing,
    Decreasing,
    Stationary,
}

/// How a run will behave from its starting point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeReport {
    pub initial_sign: InitialSign,
    /// True when monotone convergence is guaranteed: `t <= 1/(1+L)` and the
    /// function is (asserted to be) a self-map of a bounded interval.
    pub guaranteed: bool,
    pub direction: Direction,
}

/// One damped step `(1 - t) x + t h(x)`.
///
/// Panics if `t` is outside `(0, 1]`; evaluation and domain errors come from
/// `h` itself.
pub fn kras_step(h: &RealFunction, x: f64, t: f64) -> Result<f64, Error> {
    assert!(t > 0.0 && t <= 1.0, "relaxation t = {t} outside (0, 1]");
    let hx = h.eval(x)?;
    Ok((1.0 - t) * x + t * hx)
}

/// Classifies the starting point by the sign of `h(x0) - x0`.
///
/// The report's `guaranteed` flag is false here because no slope bound is
/// supplied; see [`classify_start_bounded`].
pub fn classify_start(h: &RealFunction, x0: f64, tol: f64) -> Result<ModeReport, Error> {
    let hx = h.eval(x0)?;
    let d = hx - x0;
    let (initial_sign, direction) = if d.abs() <= tol {
        (InitialSign::Fixed, Direction::Stationary)
    } else if d > 0.0 {
        (InitialSign::Above, Direction::Increasing)
    } else {
        (InitialSign::Below, Direction::Decreasing)
    };
    Ok(ModeReport {
        initial_sign,
        guaranteed: false,
        direction,
    })
}

/// Like [`classify_start`], but also reports whether the guaranteed-convergence
/// hypotheses hold for the given bound and relaxation weight. The self-map
/// property is asserted by the caller, not checked.
pub fn classify_start_bounded(
    h: &RealFunction,
    x0: f64,
    tol: f64,
    bound: &SlopeBound,
    t: f64,
) -> Result<ModeReport, Error> {
    let mut report = classify_start(h, x0, tol)?;
    report.guaranteed = h.domain().is_bounded() && t > 0.0 && t <= max_relaxation(bound);
    Ok(report)
}

/// Relaxation weight with a safety margin: `safety * 1/(1+L)`.
///
/// Panics if `safety` is outside `(0, 1]`.
pub fn choose_t(bound: &SlopeBound, safety: f64) -> f64 {
    assert!(
        safety > 0.0 && safety <= 1.0,
        "safety factor {safety} outside (0, 1]"
    );
    safety * max_relaxation(bound)
}

/// Runs the damped iteration from `x0` and classifies the outcome.
///
/// Stopping is two-sided: the run converges at `x` once `|h(x) - x| <= tol`
/// and the step the engine would take from `x` is at most
/// `tol * max(1, |x|)`. A starting point that is already fixed within `tol`
/// converges with zero steps.
///
/// On a domain with an unbounded side, divergence is declared when an iterate
/// exceeds `divergence_threshold` in magnitude toward that side, or when a
/// monotone run has moved past every fixed-point candidate found by a grid
/// scan of the region around `x0`. Both are finite proxies for "diverges to
/// infinity"; the scan is sampling-based and can in principle miss a distant
/// fixed point, in which case the run is classified divergent early.
///
/// # Examples
///
/// ```
/// use krasno::engine::iterate;
/// use krasno::{Interval, IterationConfig, Outcome, RealFunction};
///
/// let h = RealFunction::new(Interval::new(0.0, 1.0).unwrap(), f64::cos);
/// let cfg = IterationConfig::new(0.543, 1e-9, 10_000, 1e12).unwrap();
/// let trace = iterate(&h, 0.0, &cfg).unwrap();
/// match trace.outcome {
///     Outcome::Converged { point, .. } => assert!((point - 0.7390851332).abs() < 1e-8),
///     other => panic!("expected convergence, got {other:?}"),
/// }
/// ```
pub fn iterate(
    h: &RealFunction,
    x0: f64,
    cfg: &IterationConfig,
) -> Result<IterationTrace, SolveError> {
    run(h, x0, cfg, false)
}

/// Guaranteed-convergence mode for an L-Lipschitz self-map of a bounded
/// interval with `t <= 1/(1+L)`.
///
/// The caller asserts the self-map property; the bound and relaxation weight
/// are checked. Under these hypotheses the trace is monotone and the outcome
/// is `Converged` (or `BudgetExhausted` when `max_iter` is too small) — never
/// `Diverged` or `ExitedInterval`. If a computed iterate does leave the
/// domain, the self-map assertion or the bound was false and the run fails
/// with a precondition error carrying the partial trace.
pub fn iterate_hillam(
    h: &RealFunction,
    bound: &SlopeBound,
    x0: f64,
    cfg: &IterationConfig,
) -> Result<IterationTrace, SolveError> {
    let dom = h.domain();
    if !dom.is_bounded() {
        return Err(SolveError::new(
            Error::Precondition("guaranteed mode requires a bounded domain".into()),
            vec![],
        ));
    }
    let t_max = max_relaxation(bound);
    if cfg.t > t_max {
        return Err(SolveError::new(
            Error::Precondition(format!(
                "t = {} exceeds the safe relaxation bound 1/(1+L) = {t_max}",
                cfg.t
            )),
            vec![],
        ));
    }
    run(h, x0, cfg, true)
}

fn run(
    h: &RealFunction,
    x0: f64,
    cfg: &IterationConfig,
    strict_self_map: bool,
) -> Result<IterationTrace, SolveError> {
    cfg.validate().map_err(|e| SolveError::new(e, vec![]))?;
    let dom = h.domain();
    if !dom.contains(x0) {
        return Err(SolveError::new(
            Error::OutsideDomain {
                x: x0,
                lo: dom.lo(),
                hi: dom.hi(),
            },
            vec![],
        ));
    }

    // Candidate fixed points ahead of the run, for the divergence proxy.
    // None means the scan failed and only the magnitude threshold applies.
    let scan = if !strict_self_map && !dom.is_bounded() {
        scan_candidates(h, x0, cfg)
    } else {
        Some(Vec::new())
    };

    let mut xs = vec![x0];
    let mut monotone_up = true;
    let mut monotone_down = true;

    for n in 0..=cfg.max_iter {
        let x = *xs.last().unwrap();
        let hx = match h.eval(x) {
            Ok(v) => v,
            Err(e) => return Err(SolveError::new(e, xs)),
        };
        let residual = (hx - x).abs();
        // Forward step the engine would take from x; with t <= 1 this rule is
        // implied by the residual rule, but it is part of the stopping
        // contract and stays explicit.
        if residual <= cfg.tol && cfg.t * residual <= cfg.tol * x.abs().max(1.0) {
            return Ok(IterationTrace {
                iterates: xs,
                outcome: Outcome::Converged {
                    point: x,
                    residual,
                    iterations: n,
                },
            });
        }
        if n == cfg.max_iter {
            return Ok(IterationTrace {
                iterates: xs,
                outcome: Outcome::BudgetExhausted { last: x },
            });
        }

        let next = (1.0 - cfg.t) * x + cfg.t * hx;
        if !next.is_finite() {
            return Err(SolveError::new(Error::NonFinite { x, value: next }, xs));
        }

        if next < dom.lo() || next > dom.hi() {
            let side = if next < dom.lo() {
                ExitSide::BelowLo
            } else {
                ExitSide::AboveHi
            };
            if strict_self_map {
                return Err(SolveError::new(
                    Error::Precondition(format!(
                        "iterate {next} left the domain {dom}; the self-map assertion or the slope bound does not hold",
                    )),
                    xs,
                ));
            }
            return Ok(IterationTrace {
                iterates: xs,
                outcome: Outcome::ExitedInterval { side, last: next },
            });
        }

        if next > x {
            monotone_down = false;
        } else if next < x {
            monotone_up = false;
        }

        if !strict_self_map {
            if let Some(direction) =
                diverged(next, x, n, dom, cfg, &scan, monotone_up, monotone_down)
            {
                xs.push(next);
                return Ok(IterationTrace {
                    iterates: xs,
                    outcome: Outcome::Diverged {
                        direction,
                        last: next,
                    },
                });
            }
        }

        xs.push(next);
    }
    unreachable!("loop returns at n == max_iter");
}

#[allow(clippy::too_many_arguments)]
fn diverged(
    next: f64,
    x: f64,
    n: usize,
    dom: Interval,
    cfg: &IterationConfig,
    scan: &Option<Vec<f64>>,
    monotone_up: bool,
    monotone_down: bool,
) -> Option<DivergenceDirection> {
    // Magnitude threshold toward an unbounded side.
    if next.abs() > cfg.divergence_threshold {
        if next > 0.0 && dom.hi().is_infinite() {
            return Some(DivergenceDirection::PositiveInfinity);
        }
        if next < 0.0 && dom.lo().is_infinite() {
            return Some(DivergenceDirection::NegativeInfinity);
        }
    }
    // Monotone escape: the run has moved past every scanned fixed-point
    // candidate, with a margin absorbing candidate imprecision.
    if n + 1 < ESCAPE_MIN_STEPS {
        return None;
    }
    if let Some(candidates) = scan {
        if monotone_up && next > x && dom.hi().is_infinite() {
            let beyond = candidates.iter().all(|&c| next > c + escape_margin(c));
            if beyond {
                return Some(DivergenceDirection::PositiveInfinity);
            }
        }
        if monotone_down && next < x && dom.lo().is_infinite() {
            let beyond = candidates.iter().all(|&c| next < c - escape_margin(c));
            if beyond {
                return Some(DivergenceDirection::NegativeInfinity);
            }
        }
    }
    None
}

fn escape_margin(candidate: f64) -> f64 {
    1.0 + 1e-6 * candidate.abs()
}

fn scan_candidates(h: &RealFunction, x0: f64, cfg: &IterationConfig) -> Option<Vec<f64>> {
    let dom = h.domain();
    let r = cfg.divergence_threshold;
    let lo = (x0 - r).max(dom.lo()).max(-1e300);
    let hi = (x0 + r).min(dom.hi()).min(1e300);
    if lo >= hi {
        return Some(Vec::new());
    }
    let window = Interval::new(lo, hi).ok()?;
    match oracle::find_fixed_points(h, window, DIVERGENCE_SCAN_GRID, cfg.tol) {
        Ok(set) => Some(set.points),
        // Evaluation failed somewhere in the window: disable the escape
        // proxy and fall back to the magnitude threshold alone.
        Err(_) => None,
    }
}
