//! The standard semicircle law on `[-2, 2]`.

use num_complex::Complex64;

use crate::error::{ensure, Result};

/// Density `g(x) = sqrt(4 - x^2) / (2 pi)` on `[-2, 2]`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SemicircleLaw;

impl SemicircleLaw {
    pub fn density(&self, x: f64) -> f64 {
        density(x)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        cdf(x)
    }
}

pub fn density(x: f64) -> f64 {
    if x.abs() >= 2.0 {
        0.0
    } else {
        (4.0 - x * x).sqrt() / (2.0 * std::f64::consts::PI)
    }
}

/// `G(x) = 1/2 + x sqrt(4 - x^2) / (4 pi) + arcsin(x/2) / pi` on `[-2, 2]`.
pub fn cdf(x: f64) -> f64 {
    if x <= -2.0 {
        0.0
    } else if x >= 2.0 {
        1.0
    } else {
        let pi = std::f64::consts::PI;
        (0.5 + x * (4.0 - x * x).sqrt() / (4.0 * pi) + (x / 2.0).asin() / pi).clamp(0.0, 1.0)
    }
}

/// Catalan number `C_m = binom(2m, m) / (m + 1)`, exact for `m <= 33`.
pub fn catalan(m: u32) -> u128 {
    // C_{j+1} = C_j * 2(2j+1) / (j+2), each step divides exactly
    (0..m as u128).fold(1u128, |c, j| c * 2 * (2 * j + 1) / (j + 2))
}

/// Moments `beta_k`: `C_{k/2}` for even `k`, zero for odd `k`.
pub fn catalan_moment(k: u32) -> f64 {
    if k % 2 == 1 {
        0.0
    } else {
        catalan(k / 2) as f64
    }
}

/// Stieltjes transform `s(z) = (-z + sqrt(z^2 - 4)) / 2`, on the branch with
/// `Im s > 0` for `Im z > 0`.
pub fn stieltjes(z: Complex64) -> Result<Complex64> {
    ensure!(z.im > 0.0, Domain, "Im z must be positive, got {}", z.im);
    // The two roots of s^2 + z s + 1 = 0 multiply to one. Take the larger
    // root without cancellation and invert it for the other.
    let r = (z * z - 4.0).sqrt();
    let a = (-z + r) / 2.0;
    let b = (-z - r) / 2.0;
    let big = if a.norm() >= b.norm() { a } else { b };
    let s = 1.0 / big;
    Ok(if s.im > 0.0 { s } else { big })
}
