//! Globally convergent Newton-Raphson for scalar roots.
//!
//! The transform `g(x) = x - 2 h(x) / h'(x)` reduces Newton's method to the
//! damped iteration with `t = 1/2`: the Newton step is exactly the average of
//! `x` and `g(x)`. Where the sign conditions checked by
//! [`check_global_hypotheses`] hold (`h h'' >= 0`, `h h'` of fixed sign,
//! `h'` nonvanishing, nonzero one-sided derivative limits at the endpoints),
//! `g'` stays at or above -1 and the iteration converges to the unique root
//! from every starting point of the interval.

use serde::Serialize;

use crate::error::{Error, SolveError};
use crate::function::{ExitSide, Interval, IterationConfig, IterationTrace, Outcome, RealFunction};

/// Derivative magnitudes below this are treated as an exact zero. No damping
/// or pseudo-inverse is applied above it; masking a vanishing derivative
/// would hide hypothesis violations.
pub const DERIVATIVE_FLOOR: f64 = 1e-300;

/// Default sampling resolution for hypothesis checking.
pub const HYPOTHESIS_GRID: usize = 1024;

/// Log-spaced samples approaching each endpoint; one-sided behaviour is
/// approached, never evaluated at the endpoint itself.
const ENDPOINT_APPROACH_POINTS: usize = 64;

/// Relative offset of the endpoint-derivative probes.
const ENDPOINT_LIMIT_OFFSET: f64 = 1e-6;

/// Which end of the interval holds the root.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// Interval `[a, c]` with the unique root `c` at the top; requires
    /// `h h' < 0` approaching the root from below.
    RootAbove,
    /// Interval `[c, b]` with the unique root `c` at the bottom; requires
    /// `h h' > 0` above the root.
    RootBelow,
}

/// One sampled sign condition.
#[derive(Debug, Clone, Serialize)]
pub struct HypothesisCheck {
    pub condition: String,
    pub passed: bool,
    /// Up to three sample points where the condition failed (or could not be
    /// evaluated, which also counts as a failure).
    pub witnesses: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct HypothesisReport {
    pub side: Side,
    pub checks: Vec<HypothesisCheck>,
    pub overall: bool,
}

fn checked_derivative(h: &RealFunction, x: f64) -> Result<f64, Error> {
    let d = h.derivative(x)?;
    if d.abs() < DERIVATIVE_FLOOR {
        return Err(Error::ZeroDerivative { x });
    }
    Ok(d)
}

/// `g(x) = x - 2 h(x) / h'(x)`; roots of `h` are fixed points of `g`.
pub fn g_transform(h: &RealFunction, x: f64) -> Result<f64, Error> {
    let v = h.eval(x)?;
    let d = checked_derivative(h, x)?;
    Ok(x - 2.0 * v / d)
}

/// One Newton step `x - h(x) / h'(x)`, equal to `(x + g(x)) / 2` up to a few
/// ulps.
pub fn newton_step(h: &RealFunction, x: f64) -> Result<f64, Error> {
    let v = h.eval(x)?;
    let d = checked_derivative(h, x)?;
    Ok(x - v / d)
}

/// Packages the g-transform as a function sharing `h`'s evaluators, so the
/// fixed-point engine can run on it directly. Attaches
/// `g'(x) = -1 + 2 h(x) h''(x) / h'(x)^2` when `h` carries a second
/// derivative.
pub fn g_transform_function(h: &RealFunction) -> Result<RealFunction, Error> {
    if !h.has_derivative() {
        return Err(Error::MissingDerivative { order: 1 });
    }
    let hf = h.clone();
    let mut g = RealFunction::new_fallible(h.domain(), move |x| {
        let v = hf.eval(x)?;
        let d = hf.derivative(x)?;
        if d.abs() < DERIVATIVE_FLOOR {
            return Err(Error::ZeroDerivative { x });
        }
        Ok(x - 2.0 * v / d)
    });
    if h.has_second_derivative() {
        let hg = h.clone();
        g = g.with_derivative_fallible(move |x| {
            let v = hg.eval(x)?;
            let d1 = hg.derivative(x)?;
            let d2 = hg.second_derivative(x)?;
            if d1.abs() < DERIVATIVE_FLOOR {
                return Err(Error::ZeroDerivative { x });
            }
            Ok(-1.0 + 2.0 * (d2 * v) / (d1 * d1))
        });
    }
    Ok(g)
}

/// Samples the global-convergence sign conditions on `interval` and reports
/// each one with failing witnesses.
///
/// Conditions are sampled on `n_grid` interior points plus log-spaced points
/// approaching each endpoint; the endpoint derivative limits are probed at a
/// relative offset of 1e-6 of the width. An evaluation error at a sample
/// point marks the affected condition as failed (indeterminate) and makes the
/// overall verdict false. A passing report certifies the conditions at sample
/// resolution only.
pub fn check_global_hypotheses(
    h: &RealFunction,
    interval: Interval,
    side: Side,
    n_grid: usize,
) -> Result<HypothesisReport, Error> {
    if !interval.is_bounded() {
        return Err(Error::InvalidConfig(
            "hypothesis checking requires a bounded interval".into(),
        ));
    }
    if n_grid < 16 {
        return Err(Error::InvalidConfig(format!(
            "n_grid = {n_grid} below the minimum of 16"
        )));
    }
    if !h.has_derivative() {
        return Err(Error::MissingDerivative { order: 1 });
    }
    if !h.has_second_derivative() {
        return Err(Error::MissingDerivative { order: 2 });
    }

    let (lo, hi) = (interval.lo(), interval.hi());
    let width = hi - lo;

    let mut samples = Vec::with_capacity(n_grid + 2 * ENDPOINT_APPROACH_POINTS);
    for i in 1..=n_grid {
        samples.push(lo + width * i as f64 / (n_grid + 1) as f64);
    }
    for j in 0..ENDPOINT_APPROACH_POINTS {
        let exponent = -(1.0 + 8.0 * j as f64 / (ENDPOINT_APPROACH_POINTS - 1) as f64);
        let offset = width * 10f64.powf(exponent);
        samples.push(lo + offset);
        samples.push(hi - offset);
    }
    samples.retain(|x| *x > lo && *x < hi);
    samples.sort_by(f64::total_cmp);
    samples.dedup();

    struct Acc {
        condition: String,
        passed: bool,
        witnesses: Vec<f64>,
    }
    impl Acc {
        fn new(condition: &str) -> Self {
            Self {
                condition: condition.into(),
                passed: true,
                witnesses: Vec::new(),
            }
        }
        fn fail(&mut self, x: f64) {
            self.passed = false;
            if self.witnesses.len() < 3 {
                self.witnesses.push(x);
            }
        }
        fn into_check(self) -> HypothesisCheck {
            HypothesisCheck {
                condition: self.condition,
                passed: self.passed,
                witnesses: self.witnesses,
            }
        }
    }

    let slope_condition = match side {
        Side::RootAbove => "h*h' < 0",
        Side::RootBelow => "h*h' > 0",
    };
    let mut curvature = Acc::new("h*h'' >= 0");
    let mut slope_sign = Acc::new(slope_condition);
    let mut nonvanishing = Acc::new("h' != 0 on the open interval");
    let mut endpoint_limits = Acc::new("h' != 0 approaching both endpoints");

    for &x in &samples {
        let v = h.eval(x);
        let d1 = h.derivative(x);
        let d2 = h.second_derivative(x);

        match (&v, &d2) {
            (Ok(v), Ok(d2)) => {
                if v * d2 < 0.0 {
                    curvature.fail(x);
                }
            }
            _ => curvature.fail(x),
        }
        match (&v, &d1) {
            (Ok(v), Ok(d1)) => {
                let product = v * d1;
                let ok = match side {
                    Side::RootAbove => product < 0.0,
                    Side::RootBelow => product > 0.0,
                };
                if !ok {
                    slope_sign.fail(x);
                }
            }
            _ => slope_sign.fail(x),
        }
        match &d1 {
            Ok(d1) => {
                if d1.abs() < DERIVATIVE_FLOOR {
                    nonvanishing.fail(x);
                }
            }
            Err(_) => nonvanishing.fail(x),
        }
    }

    let eps = width * ENDPOINT_LIMIT_OFFSET;
    for probe in [lo + eps, hi - eps] {
        match h.derivative(probe) {
            Ok(d) => {
                if d.abs() < DERIVATIVE_FLOOR {
                    endpoint_limits.fail(probe);
                }
            }
            Err(_) => endpoint_limits.fail(probe),
        }
    }

    let checks: Vec<HypothesisCheck> = [curvature, slope_sign, nonvanishing, endpoint_limits]
        .into_iter()
        .map(Acc::into_check)
        .collect();
    let overall = checks.iter().all(|c| c.passed);
    Ok(HypothesisReport {
        side,
        checks,
        overall,
    })
}

/// Newton iteration confined to `interval`, in root mode.
///
/// Converges at `x` once `|h(x)| <= tol` and the Newton step from `x` is at
/// most `tol * max(1, |x|)`; a starting point that is already a root within
/// `tol` converges with zero steps. A step that leaves the interval while
/// already meeting the residual rule is accepted as a converged boundary
/// root; otherwise the run is classified `ExitedInterval`. A vanishing
/// derivative fails the run with the partial trace attached. `cfg.t` and
/// `cfg.divergence_threshold` are not used: the Newton update has no
/// relaxation weight and exits are always classified against the interval.
///
/// When [`check_global_hypotheses`] passes for the interval and side, the
/// outcome from any starting point of the interval is convergence to the
/// unique root.
pub fn newton_solve(
    h: &RealFunction,
    interval: Interval,
    x0: f64,
    cfg: &IterationConfig,
) -> Result<IterationTrace, SolveError> {
    cfg.validate().map_err(|e| SolveError::new(e, vec![]))?;
    if !interval.contains(x0) {
        return Err(SolveError::new(
            Error::OutsideDomain {
                x: x0,
                lo: interval.lo(),
                hi: interval.hi(),
            },
            vec![],
        ));
    }
    if !h.has_derivative() {
        return Err(SolveError::new(
            Error::MissingDerivative { order: 1 },
            vec![],
        ));
    }

    let mut xs = vec![x0];
    for n in 0..=cfg.max_iter {
        let x = *xs.last().unwrap();
        let v = match h.eval(x) {
            Ok(v) => v,
            Err(e) => return Err(SolveError::new(e, xs)),
        };
        let d = match checked_derivative(h, x) {
            Ok(d) => d,
            Err(e) => return Err(SolveError::new(e, xs)),
        };
        let newton = v / d;
        let residual = v.abs();
        if residual <= cfg.tol && newton.abs() <= cfg.tol * x.abs().max(1.0) {
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

        let next = x - newton;
        if !next.is_finite() {
            return Err(SolveError::new(Error::NonFinite { x, value: next }, xs));
        }
        if next < interval.lo() || next > interval.hi() {
            // Terminal grace: a root can sit exactly on an endpoint, and the
            // final step may land a rounding error beyond it.
            if let Ok(v_next) = h.eval(next) {
                if v_next.abs() <= cfg.tol {
                    xs.push(next);
                    return Ok(IterationTrace {
                        iterates: xs,
                        outcome: Outcome::Converged {
                            point: next,
                            residual: v_next.abs(),
                            iterations: n + 1,
                        },
                    });
                }
            }
            let side = if next < interval.lo() {
                ExitSide::BelowLo
            } else {
                ExitSide::AboveHi
            };
            return Ok(IterationTrace {
                iterates: xs,
                outcome: Outcome::ExitedInterval { side, last: next },
            });
        }
        xs.push(next);
    }
    unreachable!("loop returns at n == max_iter");
}
