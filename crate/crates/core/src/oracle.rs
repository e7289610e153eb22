//! Independent ground-truth machinery: bisection root finding and grid-based
//! fixed-point enumeration, used by tests and by verification workflows.

use serde::Serialize;

use crate::error::Error;
use crate::function::{Interval, RealFunction};

/// Default grid resolution for oracle duties.
pub const ORACLE_GRID: usize = 4096;

/// Fixed points located by a grid scan, sorted increasing.
///
/// Tangential fixed points (where `h(x) - x` touches zero without a sign
/// change) may be missed; that is inherent to sampling.
#[derive(Debug, Clone, Serialize)]
pub struct FixedPointSet {
    pub points: Vec<f64>,
    pub grid_resolution: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchDirection {
    Up,
    Down,
}

/// Bisection on a bracketing interval `[a, b]` with `f(a) f(b) <= 0`.
///
/// Halves the bracket until its width is at most `tol` and returns the final
/// midpoint. The contract is bracket width: `|f|` at the returned point can
/// still be large for steep functions.
pub fn bisect_root(f: &RealFunction, a: f64, b: f64, tol: f64) -> Result<f64, Error> {
    bisect_impl(|x| f.eval(x), a, b, tol)
}

pub(crate) fn bisect_impl(
    f: impl Fn(f64) -> Result<f64, Error>,
    mut a: f64,
    mut b: f64,
    tol: f64,
) -> Result<f64, Error> {
    if !a.is_finite() || !b.is_finite() || a >= b {
        return Err(Error::InvalidInterval { lo: a, hi: b });
    }
    if !tol.is_finite() || tol <= 0.0 {
        return Err(Error::InvalidConfig(format!(
            "bisection tolerance must be a positive real, got {tol}"
        )));
    }
    let mut fa = f(a)?;
    let fb = f(b)?;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::NoBracket { a, b, fa, fb });
    }

    // Fixed halving count, so the width contract holds by construction:
    // after k steps the bracket is (b - a) / 2^k wide, up to rounding.
    let halvings = (((b - a) / tol).log2().ceil()).max(0.0) as usize;
    for _ in 0..halvings {
        if b - a <= tol {
            break;
        }
        let mid = a + (b - a) / 2.0;
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    Ok(a + (b - a) / 2.0)
}

/// Scans `h(x) - x` for sign changes on a uniform grid over `interval` and
/// refines each bracket by bisection to `tol`, deduplicating within `tol`.
///
/// Grid points where `h(x) - x` is exactly zero are taken as fixed points
/// directly; for `h` identical to `x` this degenerates to the grid itself and
/// callers must treat that case specially.
pub fn find_fixed_points(
    h: &RealFunction,
    interval: Interval,
    n_grid: usize,
    tol: f64,
) -> Result<FixedPointSet, Error> {
    if !interval.is_bounded() {
        return Err(Error::InvalidConfig(
            "fixed-point scan requires a bounded interval".into(),
        ));
    }
    if n_grid < 2 {
        return Err(Error::InvalidConfig(format!(
            "n_grid = {n_grid} below the minimum of 2"
        )));
    }
    let (lo, hi) = (interval.lo(), interval.hi());
    let pitch = (hi - lo) / n_grid as f64;
    let g = |x: f64| Ok(h.eval(x)? - x);

    let mut points = Vec::new();
    let mut prev_x = lo;
    let mut prev_g = g(lo)?;
    if prev_g == 0.0 {
        points.push(lo);
    }
    for i in 1..=n_grid {
        let x = if i == n_grid {
            hi
        } else {
            lo + pitch * i as f64
        };
        let gx = g(x)?;
        if gx == 0.0 {
            points.push(x);
        } else if prev_g != 0.0 && gx.signum() != prev_g.signum() {
            points.push(bisect_impl(g, prev_x, x, tol)?);
        }
        prev_x = x;
        prev_g = gx;
    }

    points.sort_by(f64::total_cmp);
    points.dedup_by(|a, b| (*a - *b).abs() <= tol);
    Ok(FixedPointSet {
        points,
        grid_resolution: pitch,
    })
}

/// The fixed point nearest `x0` strictly in the given direction, if any.
pub fn nearest_fixed_point(
    h: &RealFunction,
    interval: Interval,
    x0: f64,
    direction: SearchDirection,
    n_grid: usize,
    tol: f64,
) -> Result<Option<f64>, Error> {
    if !interval.contains(x0) {
        return Err(Error::OutsideDomain {
            x: x0,
            lo: interval.lo(),
            hi: interval.hi(),
        });
    }
    let set = find_fixed_points(h, interval, n_grid, tol)?;
    Ok(match direction {
        SearchDirection::Up => set.points.iter().copied().find(|p| *p > x0),
        SearchDirection::Down => set.points.iter().rev().copied().find(|p| *p < x0),
    })
}
