//! Sampling-based estimation of slope bounds.
//!
//! Estimates are lower bounds on the true constant: sampling can only ever
//! observe slopes, not bound them. Callers wanting a guarantee apply a safety
//! factor, e.g. `choose_t(bound, 0.8)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Error;
use crate::function::{Interval, Provenance, RealFunction, SlopeBound, SlopeBoundKind};

/// Seed of the pseudorandom pair stream. Fixed so estimates reproduce and so
/// the pair set for a smaller grid is a prefix of the set for a larger one.
pub const PAIR_STREAM_SEED: u64 = 0x4b52_4153;

/// Minimum pair separation relative to the interval width; closer pairs would
/// amplify evaluation rounding into the slope quotient.
const MIN_PAIR_SEPARATION: f64 = 1e-6;

/// A sampled slope bound together with its refinement history.
#[derive(Debug, Clone, Serialize)]
pub struct SlopeEstimate {
    pub bound: SlopeBound,
    /// Number of slope pairs evaluated.
    pub n_samples: usize,
    /// Running estimate after each refinement stage; non-decreasing because
    /// every stage adds pairs to the pool.
    pub refinement_history: Vec<f64>,
    pub seed: u64,
}

struct SlopeSweep {
    max_abs_stages: Vec<f64>,
    neg_min_stages: Vec<f64>,
    n_samples: usize,
}

/// Samples `|h(x) - h(y)| / |x - y|` over doubling uniform grids up to
/// `n_grid` plus `n_grid` fixed pseudorandom pairs, tracking the running
/// extremes. The stage grids for a smaller `n_grid` are a subset of those for
/// a larger one (for powers of two), which makes estimates monotone across
/// grid refinement as well as within one call.
fn sweep(h: &RealFunction, interval: Interval, n_grid: usize) -> Result<SlopeSweep, Error> {
    if !interval.is_bounded() {
        return Err(Error::InvalidConfig(
            "slope estimation requires a bounded interval".into(),
        ));
    }
    if n_grid < 2 {
        return Err(Error::InvalidConfig(format!(
            "n_grid = {n_grid} below the minimum of 2"
        )));
    }
    let (lo, hi) = (interval.lo(), interval.hi());
    let width = hi - lo;

    let mut stage_sizes = Vec::new();
    let mut m = 2;
    while m < n_grid {
        stage_sizes.push(m);
        m *= 2;
    }
    stage_sizes.push(n_grid);

    let mut max_abs = 0.0f64;
    let mut min_signed = f64::INFINITY;
    let mut max_abs_stages = Vec::with_capacity(stage_sizes.len() + 1);
    let mut neg_min_stages = Vec::with_capacity(stage_sizes.len() + 1);
    let mut n_samples = 0;

    for &m in &stage_sizes {
        let mut prev_x = lo;
        let mut prev_v = h.eval(lo)?;
        for i in 1..m {
            let x = if i == m - 1 {
                hi
            } else {
                lo + width * (i as f64 / (m - 1) as f64)
            };
            let v = h.eval(x)?;
            let slope = (v - prev_v) / (x - prev_x);
            max_abs = max_abs.max(slope.abs());
            min_signed = min_signed.min(slope);
            n_samples += 1;
            prev_x = x;
            prev_v = v;
        }
        max_abs_stages.push(max_abs);
        neg_min_stages.push((-min_signed).max(0.0));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(PAIR_STREAM_SEED);
    let min_sep = width * MIN_PAIR_SEPARATION;
    for _ in 0..n_grid {
        let (x, y) = loop {
            let x = lo + width * rng.random::<f64>();
            let y = lo + width * rng.random::<f64>();
            if (x - y).abs() >= min_sep {
                break (x, y);
            }
        };
        let slope = (h.eval(y)? - h.eval(x)?) / (y - x);
        max_abs = max_abs.max(slope.abs());
        min_signed = min_signed.min(slope);
        n_samples += 1;
    }
    max_abs_stages.push(max_abs);
    neg_min_stages.push((-min_signed).max(0.0));

    Ok(SlopeSweep {
        max_abs_stages,
        neg_min_stages,
        n_samples,
    })
}

/// Sampled two-sided Lipschitz constant: the largest observed slope magnitude.
/// This is a lower bound on the true constant.
pub fn estimate_lipschitz(
    h: &RealFunction,
    interval: Interval,
    n_grid: usize,
) -> Result<SlopeEstimate, Error> {
    let sweep = sweep(h, interval, n_grid)?;
    let value = *sweep.max_abs_stages.last().unwrap();
    Ok(SlopeEstimate {
        bound: SlopeBound::with_provenance(
            SlopeBoundKind::TwoSidedLipschitz,
            value,
            Provenance::Estimated,
        )?,
        n_samples: sweep.n_samples,
        refinement_history: sweep.max_abs_stages,
        seed: PAIR_STREAM_SEED,
    })
}

/// Sampled one-sided lower slope bound: `max(0, -min observed slope)`, so a
/// monotone increasing function reports 0. Also a lower bound on the true
/// constant, and never larger than [`estimate_lipschitz`] on the same grid.
pub fn estimate_lower_slope(
    h: &RealFunction,
    interval: Interval,
    n_grid: usize,
) -> Result<SlopeEstimate, Error> {
    let sweep = sweep(h, interval, n_grid)?;
    let value = *sweep.neg_min_stages.last().unwrap();
    Ok(SlopeEstimate {
        bound: SlopeBound::with_provenance(
            SlopeBoundKind::LowerOnly,
            value,
            Provenance::Estimated,
        )?,
        n_samples: sweep.n_samples,
        refinement_history: sweep.neg_min_stages,
        seed: PAIR_STREAM_SEED,
    })
}
