//! One-dimensional fixed-point and root-finding toolkit.
//!
//! The damped iteration `x_{n+1} = (1 - t) x_n + t h(x_n)` converges
//! monotonically to a fixed point of any L-Lipschitz self-map of a bounded
//! interval whenever `t <= 1/(1+L)`. On unbounded domains it either converges
//! or diverges toward infinity; for maps that are not self-maps it may
//! instead exit the interval. The [`engine`] module classifies every run into
//! exactly one of those outcomes.
//!
//! [`newton`] builds on the same machinery: the transform
//! `g(x) = x - 2 h(x)/h'(x)` turns Newton's method into the damped iteration
//! with `t = 1/2`, and sampled sign conditions certify global convergence of
//! the root iteration over an interval. [`lipschitz`] estimates slope bounds
//! from samples, [`oracle`] provides independent bisection-based ground
//! truth, and [`expr`] parses and differentiates expression text so functions
//! can come from the command line.
//!
//! ```
//! use krasno::engine::{choose_t, iterate_hillam};
//! use krasno::lipschitz::estimate_lipschitz;
//! use krasno::{Interval, IterationConfig, Outcome, RealFunction};
//!
//! let h = RealFunction::new(Interval::new(0.0, 1.0).unwrap(), f64::cos);
//! let estimate = estimate_lipschitz(&h, h.domain(), 1024).unwrap();
//! let t = choose_t(&estimate.bound, 0.8);
//! let cfg = IterationConfig::new(t, 1e-10, 10_000, 1e12).unwrap();
//! let trace = iterate_hillam(&h, &estimate.bound, 0.0, &cfg).unwrap();
//! match trace.outcome {
//!     Outcome::Converged { point, .. } => assert!((point - 0.7390851332).abs() < 1e-8),
//!     other => panic!("unexpected outcome {other:?}"),
//! }
//! ```

pub mod engine;
mod error;
pub mod expr;
mod function;
pub mod lipschitz;
pub mod newton;
pub mod oracle;
pub mod testing;

pub use error::{Error, SolveError};
pub use function::{
    max_relaxation, DivergenceDirection, ExitSide, Interval, IterationConfig, IterationTrace,
    Outcome, Provenance, RealFunction, SlopeBound, SlopeBoundKind,
};
