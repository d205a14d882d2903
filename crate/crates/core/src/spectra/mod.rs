//! Eigenvalues, empirical spectral distributions and the statistics built
//! on them.

mod eigen;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::ensembles::EnsembleSpec;
use crate::error::{ensure, Result};
use crate::exec::Exec;
use crate::matrix::SymmetricMatrix;

/// Sorted eigenvalues of a symmetric matrix (unscaled).
pub fn eigenvalues(m: &SymmetricMatrix) -> Result<Vec<f64>> {
    Ok(eigen::decompose(m.as_slice(), m.n(), false)?.values)
}

/// Full eigendecomposition `(values, vectors)`, vectors row-major with one
/// eigenvector per column. Exposed for residual checks.
#[doc(hidden)]
pub fn eigen_decomposition(m: &SymmetricMatrix) -> Result<(Vec<f64>, Vec<f64>)> {
    let d = eigen::decompose(m.as_slice(), m.n(), true)?;
    Ok((d.values, d.vectors.expect("vectors requested")))
}

/// Empirical spectral distribution: eigenvalues of `n^{-1/2} X`, sorted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralDistribution {
    lambdas: Vec<f64>,
}

impl SpectralDistribution {
    /// Sorts `values`; they must be finite and nonempty.
    pub fn from_values(mut values: Vec<f64>) -> Result<Self> {
        ensure!(!values.is_empty(), Size, "distribution needs at least one atom");
        ensure!(values.iter().all(|x| x.is_finite()), Validation, "atoms must be finite");
        values.sort_by(f64::total_cmp);
        Ok(Self { lambdas: values })
    }

    pub fn n(&self) -> usize {
        self.lambdas.len()
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    /// `(1/n) #{lambda_i <= x}`.
    pub fn eval(&self, x: f64) -> f64 {
        self.lambdas.partition_point(|&l| l <= x) as f64 / self.n() as f64
    }

    /// `(1/n) #{lambda_i < x}`, the left limit at `x`.
    pub fn eval_left(&self, x: f64) -> f64 {
        self.lambdas.partition_point(|&l| l < x) as f64 / self.n() as f64
    }

    /// `(1/n) sum lambda_i^k`.
    pub fn moment(&self, k: u32) -> f64 {
        self.lambdas.iter().map(|l| l.powi(k as i32)).sum::<f64>() / self.n() as f64
    }

    /// `(1/n) sum 1/(lambda_i - z)`.
    pub fn stieltjes(&self, z: Complex64) -> Result<Complex64> {
        ensure!(z.im > 0.0, Domain, "Im z must be positive, got {}", z.im);
        let s: Complex64 = self.lambdas.iter().map(|&l| 1.0 / (l - z)).sum();
        Ok(s / self.n() as f64)
    }
}

/// ESD of `m`: its eigenvalues divided by `sqrt(n)`.
pub fn esd(m: &SymmetricMatrix) -> Result<SpectralDistribution> {
    let scale = 1.0 / (m.n() as f64).sqrt();
    let lambdas = eigenvalues(m)?.into_iter().map(|l| l * scale).collect();
    // eigenvalues are already sorted and finite
    Ok(SpectralDistribution { lambdas })
}

pub fn esd_eval(d: &SpectralDistribution, x: f64) -> f64 {
    d.eval(x)
}

pub fn empirical_moment(d: &SpectralDistribution, k: u32) -> f64 {
    d.moment(k)
}

pub fn empirical_stieltjes(d: &SpectralDistribution, z: Complex64) -> Result<Complex64> {
    d.stieltjes(z)
}

/// `points` equispaced values from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let step = (hi - lo) / (points - 1) as f64;
            (0..points)
                .map(|i| if i == points - 1 { hi } else { lo + step * i as f64 })
                .collect()
        }
    }
}

/// Default evaluation grid: 401 points on `[-3, 3]`.
pub fn default_grid() -> Vec<f64> {
    linspace(-3.0, 3.0, 401)
}

/// One ESD per seed, in seed order.
pub fn sample_spectra(spec: &EnsembleSpec, seeds: &[u64], exec: Exec) -> Result<Vec<SpectralDistribution>> {
    ensure!(!seeds.is_empty(), Validation, "at least one seed is required");
    // Seeds fan out across threads; each matrix is generated and
    // diagonalized on one thread.
    exec.map(seeds, |&s| esd(&spec.with_seed(s).sample_with(Exec::Sequential)?))
        .into_iter()
        .collect()
}

/// Pointwise mean of per-seed ESDs on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AveragedEsd {
    grid: Vec<f64>,
    values: Vec<f64>,
    seeds: usize,
}

impl AveragedEsd {
    /// Averages already-computed distributions on `grid`.
    pub fn from_spectra(dists: &[SpectralDistribution], grid: &[f64]) -> Result<Self> {
        ensure!(!dists.is_empty(), Validation, "at least one distribution is required");
        ensure!(!grid.is_empty(), Size, "grid must be nonempty");
        ensure!(
            grid.iter().all(|x| x.is_finite()) && grid.windows(2).all(|w| w[0] < w[1]),
            Validation,
            "grid must be finite and strictly increasing"
        );
        let mut values = vec![0.0; grid.len()];
        for d in dists {
            for (v, &x) in values.iter_mut().zip(grid) {
                *v += d.eval(x);
            }
        }
        let k = dists.len() as f64;
        values.iter_mut().for_each(|v| *v /= k);
        Ok(Self {
            grid: grid.to_vec(),
            values,
            seeds: dists.len(),
        })
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn seeds(&self) -> usize {
        self.seeds
    }

    /// Step interpolation: value at the last grid point `<= x`, zero before
    /// the grid.
    pub fn eval(&self, x: f64) -> f64 {
        match self.grid.partition_point(|&g| g <= x) {
            0 => 0.0,
            k => self.values[k - 1],
        }
    }

    pub fn eval_left(&self, x: f64) -> f64 {
        match self.grid.partition_point(|&g| g < x) {
            0 => 0.0,
            k => self.values[k - 1],
        }
    }

    /// CSV with header `x,F`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,F\n");
        for (x, f) in self.grid.iter().zip(&self.values) {
            out.push_str(&format!("{x},{f}\n"));
        }
        out
    }
}

/// Monte-Carlo estimate of `E F^X` on `grid`.
pub fn averaged_esd(spec: &EnsembleSpec, seeds: &[u64], grid: &[f64]) -> Result<AveragedEsd> {
    averaged_esd_with(spec, seeds, grid, Exec::default())
}

pub fn averaged_esd_with(spec: &EnsembleSpec, seeds: &[u64], grid: &[f64], exec: Exec) -> Result<AveragedEsd> {
    ensure!(!seeds.is_empty(), Validation, "at least one seed is required");
    AveragedEsd::from_spectra(&sample_spectra(spec, seeds, exec)?, grid)
}

/// Pooled histogram of all atoms, normalised to a density on `[lo, hi]`.
/// Returns `(bin centre, density)` pairs. Atoms outside the range are
/// counted in the normalisation but not binned.
pub fn histogram(dists: &[SpectralDistribution], lo: f64, hi: f64, bins: usize) -> Vec<(f64, f64)> {
    assert!(bins > 0 && hi > lo);
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    let mut total = 0usize;
    for d in dists {
        for &l in d.lambdas() {
            total += 1;
            if l < lo || l > hi {
                continue;
            }
            let b = (((l - lo) / width) as usize).min(bins - 1);
            counts[b] += 1;
        }
    }
    let norm = if total == 0 { 0.0 } else { 1.0 / (total as f64 * width) };
    counts
        .iter()
        .enumerate()
        .map(|(b, &c)| (lo + (b as f64 + 0.5) * width, c as f64 * norm))
        .collect()
}
