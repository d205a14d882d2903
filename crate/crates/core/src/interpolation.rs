//! Interpolation between two independent ensembles along
//! `Z(phi) = X cos(phi) + Y sin(phi)`, `phi in [0, pi/2]`, and the
//! Stieltjes-transform gap between the endpoints.
//!
//! Seed `s` of a Monte-Carlo run draws `X` from root
//! `derive_seed(s, x_tag)` and `Y` from `derive_seed(s, y_tag)`, so the two
//! matrices are independent and each endpoint coincides bit-for-bit with the
//! standalone estimate for its ensemble.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::ensembles::EnsembleSpec;
use crate::error::{ensure, Result};
use crate::exec::Exec;
use crate::matrix::SymmetricMatrix;
use crate::rng::{derive_seed, tags};
use crate::spectra::{esd, SpectralDistribution};

/// Stream tags used to derive the X and Y roots from a run seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedPairing {
    pub x_tag: u64,
    pub y_tag: u64,
}

impl Default for SeedPairing {
    fn default() -> Self {
        Self {
            x_tag: tags::X,
            y_tag: tags::Y,
        }
    }
}

impl SeedPairing {
    pub fn swapped(self) -> Self {
        Self {
            x_tag: self.y_tag,
            y_tag: self.x_tag,
        }
    }
}

/// Monte-Carlo estimate of `S(z, phi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathSample {
    pub phi: f64,
    pub z: Complex64,
    pub s: Complex64,
    /// Standard error of the mean `s` (complex modulus).
    pub stderr: f64,
    pub seeds: usize,
}

/// `cos(phi) x + sin(phi) y`. The endpoints return `x` and `y` exactly.
pub fn z_matrix(x: &SymmetricMatrix, y: &SymmetricMatrix, phi: f64) -> Result<SymmetricMatrix> {
    ensure!(x.n() == y.n(), Size, "dimension mismatch: {} vs {}", x.n(), y.n());
    ensure!(
        (0.0..=FRAC_PI_2).contains(&phi),
        Domain,
        "phi must lie in [0, pi/2], got {phi}"
    );
    if phi == 0.0 {
        return Ok(x.clone());
    }
    if phi == FRAC_PI_2 {
        return Ok(y.clone());
    }
    let (s, c) = phi.sin_cos();
    x.linear_combination(c, y, s)
}

/// Default evaluation points: `Im z = 1`, `Re z in {-2, -1, 0, 1, 2}`.
pub fn default_z_grid() -> Vec<Complex64> {
    (-2..=2).map(|re| Complex64::new(re as f64, 1.0)).collect()
}

fn check_z(zs: &[Complex64]) -> Result<()> {
    ensure!(!zs.is_empty(), Size, "z grid must be nonempty");
    for z in zs {
        ensure!(z.im > 0.0, Domain, "Im z must be positive, got {}", z.im);
    }
    Ok(())
}

fn mean_and_stderr(vals: &[Complex64]) -> (Complex64, f64) {
    let k = vals.len() as f64;
    let mean = vals.iter().sum::<Complex64>() / k;
    let stderr = if vals.len() > 1 {
        let ss: f64 = vals.iter().map(|v| (v - mean).norm_sqr()).sum();
        (ss / (k * (k - 1.0))).sqrt()
    } else {
        0.0
    };
    (mean, stderr)
}

/// Evaluates `(1/n) Tr R(z)` for every `z` on every seed's ESD and reduces
/// per `z`, in seed order.
fn reduce(per_seed: &[Vec<Complex64>], nz: usize) -> Vec<(Complex64, f64)> {
    (0..nz)
        .map(|iz| {
            let col: Vec<Complex64> = per_seed.iter().map(|row| row[iz]).collect();
            mean_and_stderr(&col)
        })
        .collect()
}

fn transforms(d: &SpectralDistribution, zs: &[Complex64]) -> Result<Vec<Complex64>> {
    zs.iter().map(|&z| d.stieltjes(z)).collect()
}

/// Mean Stieltjes transform of `spec` over `seeds`, drawing each matrix
/// from root `derive_seed(seed, tag)`. Returns `(mean, stderr)` per `z`.
pub fn stieltjes_mean(
    spec: &EnsembleSpec,
    tag: u64,
    zs: &[Complex64],
    seeds: &[u64],
    exec: Exec,
) -> Result<Vec<(Complex64, f64)>> {
    ensure!(!seeds.is_empty(), Validation, "at least one seed is required");
    check_z(zs)?;
    let per_seed: Vec<Vec<Complex64>> = exec
        .map(seeds, |&s| {
            let m = spec.with_seed(derive_seed(s, tag)).sample_with(Exec::Sequential)?;
            transforms(&esd(&m)?, zs)
        })
        .into_iter()
        .collect::<Result<_>>()?;
    Ok(reduce(&per_seed, zs.len()))
}

/// Sweeps the path: one [`PathSample`] per `(phi, z)`, ordered by `phi`
/// then `z`. Each seed's X and Y are drawn once and reused for every `phi`.
pub fn path_sweep(
    spec_x: &EnsembleSpec,
    spec_y: &EnsembleSpec,
    phis: &[f64],
    zs: &[Complex64],
    seeds: &[u64],
    pairing: SeedPairing,
    exec: Exec,
) -> Result<Vec<PathSample>> {
    ensure!(
        spec_x.n() == spec_y.n(),
        Size,
        "ensembles must share n: {} vs {}",
        spec_x.n(),
        spec_y.n()
    );
    ensure!(!seeds.is_empty(), Validation, "at least one seed is required");
    check_z(zs)?;
    for &phi in phis {
        ensure!(
            (0.0..=FRAC_PI_2).contains(&phi),
            Domain,
            "phi must lie in [0, pi/2], got {phi}"
        );
    }
    // per seed: [phi][z]
    let per_seed: Vec<Vec<Vec<Complex64>>> = exec
        .map(seeds, |&s| -> Result<Vec<Vec<Complex64>>> {
            let x = spec_x
                .with_seed(derive_seed(s, pairing.x_tag))
                .sample_with(Exec::Sequential)?;
            let y = spec_y
                .with_seed(derive_seed(s, pairing.y_tag))
                .sample_with(Exec::Sequential)?;
            phis.iter()
                .map(|&phi| transforms(&esd(&z_matrix(&x, &y, phi)?)?, zs))
                .collect()
        })
        .into_iter()
        .collect::<Result<_>>()?;

    let mut out = Vec::with_capacity(phis.len() * zs.len());
    for (ip, &phi) in phis.iter().enumerate() {
        let rows: Vec<Vec<Complex64>> = per_seed.iter().map(|r| r[ip].clone()).collect();
        for (iz, (s, stderr)) in reduce(&rows, zs.len()).into_iter().enumerate() {
            out.push(PathSample {
                phi,
                z: zs[iz],
                s,
                stderr,
                seeds: seeds.len(),
            });
        }
    }
    Ok(out)
}

/// Monte-Carlo estimate of `S(z, phi) = (1/n) E Tr R(z, phi)`.
pub fn stieltjes_at(
    spec_x: &EnsembleSpec,
    spec_y: &EnsembleSpec,
    phi: f64,
    z: Complex64,
    seeds: &[u64],
) -> Result<PathSample> {
    let mut v = path_sweep(
        spec_x,
        spec_y,
        &[phi],
        &[z],
        seeds,
        SeedPairing::default(),
        Exec::default(),
    )?;
    Ok(v.pop().expect("one sample"))
}

/// `max_z |mean S^X(z) - mean S^Y(z)|` with the default seed pairing.
pub fn universality_gap(spec_x: &EnsembleSpec, spec_y: &EnsembleSpec, zs: &[Complex64], seeds: &[u64]) -> Result<f64> {
    universality_gap_with(spec_x, spec_y, zs, seeds, SeedPairing::default(), Exec::default())
}

pub fn universality_gap_with(
    spec_x: &EnsembleSpec,
    spec_y: &EnsembleSpec,
    zs: &[Complex64],
    seeds: &[u64],
    pairing: SeedPairing,
    exec: Exec,
) -> Result<f64> {
    ensure!(
        spec_x.n() == spec_y.n(),
        Size,
        "ensembles must share n: {} vs {}",
        spec_x.n(),
        spec_y.n()
    );
    let sx = stieltjes_mean(spec_x, pairing.x_tag, zs, seeds, exec)?;
    let sy = stieltjes_mean(spec_y, pairing.y_tag, zs, seeds, exec)?;
    Ok(sx
        .iter()
        .zip(&sy)
        .map(|((a, _), (b, _))| (a - b).norm())
        .fold(0.0, f64::max))
}
