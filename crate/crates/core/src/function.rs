//! Core value types shared by all solvers: intervals, real functions, slope
//! bounds, iteration configuration, traces, and outcomes.
//!
//! Everything here is an immutable value after construction and safe to share
//! across threads. Function evaluators are expected to be pure.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::Error;

type EvalFn = Arc<dyn Fn(f64) -> Result<f64, Error> + Send + Sync>;

/// A closed real interval, possibly unbounded on either side.
///
/// An endpoint of `-inf`/`+inf` means the interval is unbounded on that side;
/// infinite values themselves are never members.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self, Error> {
        if lo.is_nan() || hi.is_nan() || lo >= hi {
            return Err(Error::InvalidInterval { lo, hi });
        }
        Ok(Self { lo, hi })
    }

    /// The whole real line.
    pub fn unbounded() -> Self {
        Self {
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
        }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    /// Membership test, exact for finite doubles. NaN and infinities are
    /// never members.
    pub fn contains(&self, x: f64) -> bool {
        x.is_finite() && x >= self.lo && x <= self.hi
    }

    /// True when both endpoints are finite.
    pub fn is_bounded(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    /// `hi - lo`; infinite for unbounded intervals.
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// An evaluatable scalar map with a declared domain and optional first and
/// second derivative evaluators.
///
/// `eval` rejects points outside the domain and turns any non-finite value
/// (NaN or infinity) into an error; NaN never propagates silently.
#[derive(Clone)]
pub struct RealFunction {
    f: EvalFn,
    d1: Option<EvalFn>,
    d2: Option<EvalFn>,
    domain: Interval,
}

impl RealFunction {
    /// Wraps an infallible evaluator. Non-finite results become errors.
    pub fn new(domain: Interval, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self::new_fallible(domain, move |x| Ok(f(x)))
    }

    /// Wraps an evaluator that can signal its own evaluation errors.
    pub fn new_fallible(
        domain: Interval,
        f: impl Fn(f64) -> Result<f64, Error> + Send + Sync + 'static,
    ) -> Self {
        Self {
            f: Arc::new(f),
            d1: None,
            d2: None,
            domain,
        }
    }

    pub fn with_derivative(self, d: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.with_derivative_fallible(move |x| Ok(d(x)))
    }

    pub fn with_derivative_fallible(
        mut self,
        d: impl Fn(f64) -> Result<f64, Error> + Send + Sync + 'static,
    ) -> Self {
        self.d1 = Some(Arc::new(d));
        self
    }

    pub fn with_second_derivative(self, d: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.with_second_derivative_fallible(move |x| Ok(d(x)))
    }

    pub fn with_second_derivative_fallible(
        mut self,
        d: impl Fn(f64) -> Result<f64, Error> + Send + Sync + 'static,
    ) -> Self {
        self.d2 = Some(Arc::new(d));
        self
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn has_derivative(&self) -> bool {
        self.d1.is_some()
    }

    pub fn has_second_derivative(&self) -> bool {
        self.d2.is_some()
    }

    pub fn eval(&self, x: f64) -> Result<f64, Error> {
        self.check_domain(x)?;
        finite(x, (self.f)(x)?)
    }

    /// First derivative; `MissingDerivative` when none was attached.
    pub fn derivative(&self, x: f64) -> Result<f64, Error> {
        self.check_domain(x)?;
        match &self.d1 {
            Some(d) => finite(x, d(x)?),
            None => Err(Error::MissingDerivative { order: 1 }),
        }
    }

    /// Second derivative; `MissingDerivative` when none was attached.
    pub fn second_derivative(&self, x: f64) -> Result<f64, Error> {
        self.check_domain(x)?;
        match &self.d2 {
            Some(d) => finite(x, d(x)?),
            None => Err(Error::MissingDerivative { order: 2 }),
        }
    }

    fn check_domain(&self, x: f64) -> Result<(), Error> {
        if !self.domain.contains(x) {
            return Err(Error::OutsideDomain {
                x,
                lo: self.domain.lo,
                hi: self.domain.hi,
            });
        }
        Ok(())
    }
}

impl fmt::Debug for RealFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RealFunction")
            .field("domain", &self.domain)
            .field("d1", &self.d1.is_some())
            .field("d2", &self.d2.is_some())
            .finish()
    }
}

fn finite(x: f64, value: f64) -> Result<f64, Error> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite { x, value })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SlopeBoundKind {
    /// `|h(x) - h(y)| <= L |x - y|` for all x, y in the domain.
    TwoSidedLipschitz,
    /// The weaker one-sided condition `(h(x) - h(y)) / (x - y) >= -L`.
    LowerOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    User,
    Estimated,
}

/// A Lipschitz constant or one-sided lower slope bound with provenance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlopeBound {
    pub kind: SlopeBoundKind,
    pub value: f64,
    pub provenance: Provenance,
}

impl SlopeBound {
    /// User-supplied two-sided Lipschitz constant.
    pub fn lipschitz(value: f64) -> Result<Self, Error> {
        Self::with_provenance(SlopeBoundKind::TwoSidedLipschitz, value, Provenance::User)
    }

    /// User-supplied one-sided bound: slope >= -value everywhere.
    pub fn lower_only(value: f64) -> Result<Self, Error> {
        Self::with_provenance(SlopeBoundKind::LowerOnly, value, Provenance::User)
    }

    pub fn with_provenance(
        kind: SlopeBoundKind,
        value: f64,
        provenance: Provenance,
    ) -> Result<Self, Error> {
        if !value.is_finite() || value < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "slope bound must be a finite nonnegative real, got {value}"
            )));
        }
        Ok(Self {
            kind,
            value,
            provenance,
        })
    }
}

/// Largest safe relaxation weight `1 / (1 + L)` for a slope bound `L`.
///
/// Strictly decreasing in `L` and always in `(0, 1]`.
pub fn max_relaxation(bound: &SlopeBound) -> f64 {
    1.0 / (1.0 + bound.value)
}

/// Parameters of an iteration run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationConfig {
    /// Relaxation weight on `h` in `(0, 1]`; `t = 1` is Picard iteration.
    pub t: f64,
    /// Convergence tolerance for the two-sided stopping rule.
    pub tol: f64,
    /// Maximum number of steps before the budget is exhausted.
    pub max_iter: usize,
    /// Magnitude beyond which an iterate on an unbounded domain side is
    /// declared divergent.
    pub divergence_threshold: f64,
}

impl IterationConfig {
    pub fn new(
        t: f64,
        tol: f64,
        max_iter: usize,
        divergence_threshold: f64,
    ) -> Result<Self, Error> {
        let cfg = Self {
            t,
            tol,
            max_iter,
            divergence_threshold,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.t.is_nan() || self.t <= 0.0 || self.t > 1.0 {
            return Err(Error::InvalidConfig(format!(
                "relaxation t = {} outside (0, 1]",
                self.t
            )));
        }
        if !self.tol.is_finite() || self.tol <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "tolerance must be a positive real, got {}",
                self.tol
            )));
        }
        if self.max_iter < 1 {
            return Err(Error::InvalidConfig("max_iter must be at least 1".into()));
        }
        if !self.divergence_threshold.is_finite() || self.divergence_threshold <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "divergence threshold must be a positive real, got {}",
                self.divergence_threshold
            )));
        }
        Ok(())
    }
}

impl Default for IterationConfig {
    fn default() -> Self {
        Self {
            t: 0.5,
            tol: 1e-10,
            max_iter: 10_000,
            divergence_threshold: 1e12,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DivergenceDirection {
    #[serde(rename = "+inf")]
    PositiveInfinity,
    #[serde(rename = "-inf")]
    NegativeInfinity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExitSide {
    BelowLo,
    AboveHi,
}

/// Terminal classification of an iteration run.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Outcome {
    /// Both stopping rules held at `point`; `residual` is `|h(point) - point|`
    /// in fixed-point mode or `|h(point)|` in root mode.
    Converged {
        point: f64,
        residual: f64,
        iterations: usize,
    },
    /// The iterate escaped toward an unbounded domain side.
    Diverged {
        direction: DivergenceDirection,
        last: f64,
    },
    /// A computed step left a finite domain endpoint; `last` is the exiting
    /// point, which is not part of the trace.
    ExitedInterval { side: ExitSide, last: f64 },
    /// `max_iter` steps were taken without meeting any other terminal rule.
    BudgetExhausted { last: f64 },
}

/// Ordered iterate list starting at `x0`, plus the terminal outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationTrace {
    /// Every in-domain point the run visited, in order. Consecutive entries
    /// satisfy the engine's step equation exactly as computed.
    pub iterates: Vec<f64>,
    pub outcome: Outcome,
}

impl IterationTrace {
    pub fn last(&self) -> f64 {
        *self.iterates.last().expect("trace is never empty")
    }

    pub fn is_nondecreasing(&self) -> bool {
        self.iterates.windows(2).all(|w| w[1] >= w[0])
    }

    pub fn is_nonincreasing(&self) -> bool {
        self.iterates.windows(2).all(|w| w[1] <= w[0])
    }
}
