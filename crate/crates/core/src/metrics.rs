//! Kolmogorov and Levy distances between distribution functions.
//!
//! Distributions are handled through [`Cdf`]: a right-continuous
//! nondecreasing function that is piecewise constant between its `knots`
//! (step functions) or continuous with no knots (the semicircle law).
//! Comparisons are exact whenever at least one side is a step function.

use crate::semicircle::{self, SemicircleLaw};
use crate::spectra::{AveragedEsd, SpectralDistribution};

/// A distribution function on the real line.
pub trait Cdf {
    /// `F(x)`, right-continuous.
    fn eval(&self, x: f64) -> f64;
    /// `F(x-)`.
    fn eval_left(&self, x: f64) -> f64;
    /// Sorted discontinuity points. Empty for continuous distributions.
    fn knots(&self) -> Vec<f64>;
    /// `F(+inf)`; one for probability distributions.
    fn total(&self) -> f64 {
        1.0
    }
    /// Bounded interval outside which `F` is constant, if known.
    fn support(&self) -> Option<(f64, f64)> {
        let k = self.knots();
        Some((*k.first()?, *k.last()?))
    }
}

impl Cdf for SpectralDistribution {
    fn eval(&self, x: f64) -> f64 {
        SpectralDistribution::eval(self, x)
    }
    fn eval_left(&self, x: f64) -> f64 {
        SpectralDistribution::eval_left(self, x)
    }
    fn knots(&self) -> Vec<f64> {
        let mut k = self.lambdas().to_vec();
        k.dedup();
        k
    }
}

impl Cdf for AveragedEsd {
    fn eval(&self, x: f64) -> f64 {
        AveragedEsd::eval(self, x)
    }
    fn eval_left(&self, x: f64) -> f64 {
        AveragedEsd::eval_left(self, x)
    }
    fn knots(&self) -> Vec<f64> {
        self.grid().to_vec()
    }
    fn total(&self) -> f64 {
        *self.values().last().unwrap_or(&0.0)
    }
}

impl Cdf for SemicircleLaw {
    fn eval(&self, x: f64) -> f64 {
        semicircle::cdf(x)
    }
    fn eval_left(&self, x: f64) -> f64 {
        semicircle::cdf(x)
    }
    fn knots(&self) -> Vec<f64> {
        Vec::new()
    }
    fn support(&self) -> Option<(f64, f64)> {
        Some((-2.0, 2.0))
    }
}

fn merged_knots(a: &dyn Cdf, b: &dyn Cdf) -> Vec<f64> {
    let mut k = a.knots();
    k.extend(b.knots());
    k.sort_by(f64::total_cmp);
    k.dedup();
    k
}

/// `sup_x |F1(x) - F2(x)|`, using both one-sided values at every knot and
/// the limits at `+-inf`.
pub fn kolmogorov(f1: &dyn Cdf, f2: &dyn Cdf) -> f64 {
    let mut sup = (f1.total() - f2.total()).abs();
    for x in merged_knots(f1, f2) {
        sup = sup
            .max((f1.eval(x) - f2.eval(x)).abs())
            .max((f1.eval_left(x) - f2.eval_left(x)).abs());
    }
    sup
}

/// Kolmogorov distance to the standard semicircle law.
pub fn kolmogorov_to_semicircle(d: &dyn Cdf) -> f64 {
    kolmogorov(d, &SemicircleLaw)
}

/// Absolute tolerance of the Levy bisection.
pub const LEVY_TOLERANCE: f64 = 1e-9;

/// Levy distance
/// `inf { eps : F1(x - eps) - eps <= F2(x) <= F1(x + eps) + eps for all x }`
/// by bisection on `eps`.
pub fn levy(f1: &dyn Cdf, f2: &dyn Cdf) -> f64 {
    let (lo1, hi1) = f1.support().unwrap_or((-2.0, 2.0));
    let (lo2, hi2) = f2.support().unwrap_or((-2.0, 2.0));
    let span = hi1.max(hi2) - lo1.min(lo2);
    let (mut lo, mut hi) = (0.0, 1.0 + span);
    if levy_feasible(f1, f2, 0.0) {
        return 0.0;
    }
    while hi - lo > LEVY_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        if levy_feasible(f1, f2, mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Levy distance to the standard semicircle law.
pub fn levy_to_semicircle(d: &dyn Cdf) -> f64 {
    levy(d, &SemicircleLaw)
}

/// Range of `f(x + shift)` over `x in [a, b)` when the interval contains no
/// knot of `f(. + shift)`. Step functions are evaluated at an interior point;
/// continuous ones at the endpoints.
fn range_on(f: &dyn Cdf, continuous: bool, a: f64, b: f64, shift: f64) -> (f64, f64) {
    if continuous {
        let lo = if a.is_finite() { f.eval(a + shift) } else { 0.0 };
        let hi = if b.is_finite() {
            f.eval_left(b + shift)
        } else {
            f.total()
        };
        return (lo, hi);
    }
    let x = match (a.is_finite(), b.is_finite()) {
        (true, true) => 0.5 * (a + b),
        (false, true) => b - 1.0,
        (true, false) => a + 1.0,
        (false, false) => 0.0,
    };
    let v = f.eval(x + shift);
    (v, v)
}

/// Whether both defining inequalities hold at `eps`.
///
/// Between consecutive points of `knots(F2) u (knots(F1) +- eps)` the step
/// parts are constant and the continuous parts monotone, so checking the
/// extreme values on each interval is exact.
fn levy_feasible(f1: &dyn Cdf, f2: &dyn Cdf, eps: f64) -> bool {
    let k1 = f1.knots();
    let mut cuts = f2.knots();
    let (c1, c2) = (k1.is_empty(), cuts.is_empty());
    cuts.extend(k1.iter().map(|x| x - eps));
    cuts.extend(k1.iter().map(|x| x + eps));
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let slack = 1e-12;
    let bounds = std::iter::once(f64::NEG_INFINITY)
        .chain(cuts.iter().copied())
        .zip(cuts.iter().copied().chain(std::iter::once(f64::INFINITY)));
    for (a, b) in bounds {
        let (f2_low, f2_high) = range_on(f2, c2, a, b, 0.0);
        let (_, f1_back_high) = range_on(f1, c1, a, b, -eps);
        let (f1_fwd_low, _) = range_on(f1, c1, a, b, eps);
        if f1_back_high - eps > f2_low + slack || f2_high > f1_fwd_low + eps + slack {
            return false;
        }
    }
    true
}
