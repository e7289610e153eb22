//! Deterministic test families with analytically known structure.
//!
//! Property and acceptance tests need instances whose fixed points and slope
//! bounds are known by construction, independently of the solvers under test.
//! Piecewise-linear maps provide exactly that: slopes are explicit and every
//! diagonal crossing has a closed form.

use rand::Rng;

use crate::function::{Interval, RealFunction};

/// Continuous piecewise-linear function given by its nodes.
#[derive(Debug, Clone)]
pub struct PiecewiseLinear {
    xs: Vec<f64>,
    ys: Vec<f64>,
    slopes: Vec<f64>,
}

impl PiecewiseLinear {
    /// Panics on malformed nodes; this is a test helper, not an API surface.
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Self {
        assert!(
            xs.len() == ys.len() && xs.len() >= 2,
            "need at least 2 nodes"
        );
        assert!(
            xs.windows(2).all(|w| w[0] < w[1]),
            "node abscissae must increase strictly"
        );
        assert!(
            xs.iter().chain(ys.iter()).all(|v| v.is_finite()),
            "nodes must be finite"
        );
        let slopes = xs
            .windows(2)
            .zip(ys.windows(2))
            .map(|(x, y)| (y[1] - y[0]) / (x[1] - x[0]))
            .collect();
        Self { xs, ys, slopes }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if x <= self.xs[0] {
            return self.ys[0];
        }
        if x >= self.xs[n - 1] {
            return self.ys[n - 1];
        }
        let i = self.xs.partition_point(|&t| t <= x) - 1;
        self.ys[i] + (x - self.xs[i]) * self.slopes[i]
    }

    pub fn max_abs_slope(&self) -> f64 {
        self.slopes.iter().fold(0.0, |acc, s| acc.max(s.abs()))
    }

    pub fn min_slope(&self) -> f64 {
        self.slopes.iter().fold(f64::INFINITY, |acc, s| acc.min(*s))
    }

    /// A Lipschitz constant valid for the floating-point evaluation, not just
    /// the real function: tiny inflation absorbs interpolation rounding.
    pub fn lipschitz_bound(&self) -> f64 {
        self.max_abs_slope() * (1.0 + 1e-12)
    }

    /// Diagonal crossings `h(x) = x`, segment by segment in closed form.
    /// Segments lying exactly on the diagonal are not representable as a
    /// point set and are skipped; the random generators below never produce
    /// them.
    pub fn crossings(&self) -> Vec<f64> {
        let mut out: Vec<f64> = Vec::new();
        for i in 0..self.slopes.len() {
            let s = self.slopes[i];
            if s == 1.0 {
                continue;
            }
            let c = (self.ys[i] - s * self.xs[i]) / (1.0 - s);
            // tolerate roundoff for crossings that sit on a shared node
            let eps = 1e-9 * (1.0 + c.abs());
            if c >= self.xs[i] - eps && c <= self.xs[i + 1] + eps {
                out.push(c.clamp(self.xs[i], self.xs[i + 1]));
            }
        }
        out.sort_by(f64::total_cmp);
        out.dedup_by(|a, b| (*a - *b).abs() <= 1e-8);
        out
    }

    pub fn domain(&self) -> Interval {
        Interval::new(self.xs[0], *self.xs.last().unwrap()).unwrap()
    }

    pub fn to_function(&self) -> RealFunction {
        let f = self.clone();
        RealFunction::new(self.domain(), move |x| f.eval(x))
    }
}

/// Random piecewise-linear map of `[0, 1]` with node values in
/// `[y_lo, y_hi]` and every segment slope of magnitude at most `max_slope`.
///
/// Instances are conditioned so oracle checks stay reliable: slopes keep a
/// distance of at least 0.05 from 1 (crossings are transversal and
/// iteration near them contracts), diagonal crossings are separated by at
/// least 1e-3, and no crossing hugs a domain endpoint closer than 1e-3.
pub fn random_map(rng: &mut impl Rng, max_slope: f64, y_lo: f64, y_hi: f64) -> PiecewiseLinear {
    assert!(max_slope > 0.0 && y_lo < y_hi);
    'outer: loop {
        let segments = rng.random_range(2..=6usize);
        let mut xs = vec![0.0];
        for _ in 1..segments {
            xs.push(rng.random_range(0.0..=1.0));
        }
        xs.push(1.0);
        xs.sort_by(f64::total_cmp);
        if xs.windows(2).any(|w| w[1] - w[0] < 0.02) {
            continue;
        }

        let mut ys = vec![rng.random_range(y_lo..=y_hi)];
        for i in 1..xs.len() {
            let dx = xs[i] - xs[i - 1];
            let dy = rng.random_range(-1.0..=1.0) * max_slope * dx;
            ys.push((ys[i - 1] + dy).clamp(y_lo, y_hi));
        }

        let pl = PiecewiseLinear::new(xs, ys);
        if pl.slopes.iter().any(|s| (s - 1.0).abs() < 0.05) {
            continue;
        }
        if pl.max_abs_slope() > max_slope {
            continue;
        }
        let crossings = pl.crossings();
        for w in crossings.windows(2) {
            if w[1] - w[0] < 1e-3 {
                continue 'outer;
            }
        }
        if crossings.iter().any(|c| *c < 1e-3 || *c > 1.0 - 1e-3) {
            continue;
        }
        return pl;
    }
}

/// Random L-Lipschitz self-map of `[0, 1]`, the guaranteed-convergence
/// setting.
pub fn random_self_map(rng: &mut impl Rng, max_slope: f64) -> PiecewiseLinear {
    random_map(rng, max_slope, 0.0, 1.0)
}
