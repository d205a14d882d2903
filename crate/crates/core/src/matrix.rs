//! Dense symmetric matrices, variance profiles and the scalar functionals
//! built on them: the Lindeberg ratio, row-average variances `B_i^2`, the
//! variance-profile conditions, and the split of a matrix into small and
//! large entries.
//!
//! Indices are zero-based throughout.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};
use crate::spectra;

/// Dense real symmetric `n x n` matrix.
///
/// Stored in full row-major form; every constructor writes `(i, j)` and
/// `(j, i)` together, so symmetry holds exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymmetricMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    /// Builds a matrix from its upper triangle (diagonal included), listed
    /// row by row: `(0,0), (0,1), .., (0,n-1), (1,1), ..`.
    pub fn from_upper(n: usize, upper: &[f64]) -> Result<Self> {
        ensure!(n >= 1, Size, "dimension must be positive");
        ensure!(
            upper.len() == n * (n + 1) / 2,
            Size,
            "expected {} upper-triangle values for n={n}, got {}",
            n * (n + 1) / 2,
            upper.len()
        );
        let mut it = upper.iter();
        Self::from_fn(n, |_, _| *it.next().unwrap())
    }

    /// Builds a matrix by evaluating `f(i, j)` for `i <= j` in row-major order.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                ensure!(v.is_finite(), Validation, "entry ({i},{j}) is not finite: {v}");
                m.data[i * n + j] = v;
                m.data[j * n + i] = v;
            }
        }
        Ok(m)
    }

    /// Assembles a matrix from full row-major storage that is already
    /// symmetric. Only the upper triangle is read.
    pub(crate) fn from_full_unchecked(n: usize, mut data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), n * n);
        for i in 0..n {
            for j in (i + 1)..n {
                data[j * n + i] = data[i * n + j];
            }
        }
        Self { n, data }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// Full row-major storage.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Upper triangle in row-major order, the inverse of [`Self::from_upper`].
    pub fn upper(&self) -> Vec<f64> {
        let n = self.n;
        (0..n)
            .flat_map(|i| (i..n).map(move |j| (i, j)))
            .map(|(i, j)| self.get(i, j))
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// `sum_{i,j} x_ij^2` over all ordered pairs, i.e. `Tr X^2`.
    pub fn frobenius_sq(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum()
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    /// Entrywise map; `f` must preserve finiteness.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::from_fn(self.n, |i, j| f(self.get(i, j)))
    }

    /// `a * self + b * other`, entrywise.
    pub fn linear_combination(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        ensure!(self.n == other.n, Size, "dimension mismatch: {} vs {}", self.n, other.n);
        Self::from_fn(self.n, |i, j| a * self.get(i, j) + b * other.get(i, j))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        ensure!(self.n == other.n, Size, "dimension mismatch: {} vs {}", self.n, other.n);
        Self::from_fn(self.n, |i, j| self.get(i, j) + other.get(i, j))
    }
}

/// Entry variances `sigma_ij^2`, symmetric and nonnegative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProfileRepr", into = "ProfileRepr")]
pub struct VarianceProfile {
    n: usize,
    sigma2: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct ProfileRepr {
    n: usize,
    upper: Vec<f64>,
}

impl TryFrom<ProfileRepr> for VarianceProfile {
    type Error = crate::Error;
    fn try_from(r: ProfileRepr) -> Result<Self> {
        VarianceProfile::from_upper(r.n, &r.upper)
    }
}

impl From<VarianceProfile> for ProfileRepr {
    fn from(p: VarianceProfile) -> Self {
        ProfileRepr {
            n: p.n,
            upper: p.upper(),
        }
    }
}

impl VarianceProfile {
    /// Evaluates `f(i, j)` for `i <= j`; values must be finite and nonnegative.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        ensure!(n >= 1, Size, "dimension must be positive");
        let mut sigma2 = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                ensure!(
                    v.is_finite() && v >= 0.0,
                    Validation,
                    "variance ({i},{j}) must be finite and nonnegative, got {v}"
                );
                sigma2[i * n + j] = v;
                sigma2[j * n + i] = v;
            }
        }
        Ok(Self { n, sigma2 })
    }

    pub fn from_upper(n: usize, upper: &[f64]) -> Result<Self> {
        ensure!(
            upper.len() == n * (n + 1) / 2,
            Size,
            "expected {} upper-triangle variances for n={n}, got {}",
            n * (n + 1) / 2,
            upper.len()
        );
        let mut it = upper.iter();
        Self::from_fn(n, |_, _| *it.next().unwrap())
    }

    pub fn constant(n: usize, value: f64) -> Result<Self> {
        Self::from_fn(n, |_, _| value)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn sigma2(&self, i: usize, j: usize) -> f64 {
        self.sigma2[i * self.n + j]
    }

    pub fn upper(&self) -> Vec<f64> {
        let n = self.n;
        (0..n)
            .flat_map(|i| (i..n).map(move |j| (i, j)))
            .map(|(i, j)| self.sigma2(i, j))
            .collect()
    }

    /// Row averages `B_i^2 = (1/n) sum_j sigma_ij^2`.
    pub fn b_values(&self) -> Vec<f64> {
        let n = self.n;
        self.sigma2
            .chunks(n)
            .map(|row| row.iter().sum::<f64>() / n as f64)
            .collect()
    }
}

/// Plug-in Lindeberg ratio of one realization:
/// `n^-2 sum_{i,j} x_ij^2 1(|x_ij| >= tau sqrt(n))` over all ordered pairs.
pub fn lindeberg_ratio(m: &SymmetricMatrix, tau: f64) -> Result<f64> {
    ensure!(tau > 0.0, Domain, "tau must be positive, got {tau}");
    let n = m.n() as f64;
    let cut = tau * n.sqrt();
    let tail: f64 = m.as_slice().iter().filter(|x| x.abs() >= cut).map(|x| x * x).sum();
    Ok(tail / (n * n))
}

/// Truncation level `tau_n = n^(-1/8)`: decreasing, with `tau_n sqrt(n) -> inf`.
pub fn truncation_sequence(n: usize) -> f64 {
    assert!(n >= 1);
    (n as f64).powf(-0.125)
}

/// Split of a matrix into entries below and above `tau sqrt(n)`.
#[derive(Debug, Clone)]
pub struct TruncationResult {
    /// Entries with `|x| < tau sqrt(n)`, others zeroed.
    pub hat: SymmetricMatrix,
    /// Entries with `|x| >= tau sqrt(n)`, others zeroed.
    pub check: SymmetricMatrix,
    /// `hat` with the centering constant subtracted from every entry.
    pub centered: SymmetricMatrix,
    /// The constant that was subtracted.
    pub center: f64,
    pub tau: f64,
}

/// Splits `m` at `tau sqrt(n)` and centers the small part by the empirical
/// mean of its off-diagonal (upper-triangle) entries.
pub fn truncate(m: &SymmetricMatrix, tau: f64) -> Result<TruncationResult> {
    truncate_with_mean(m, tau, None)
}

/// As [`truncate`], but centers by `known_mean` (the analytic mean of the
/// truncated entry law) when the ensemble supplies one.
pub fn truncate_with_mean(m: &SymmetricMatrix, tau: f64, known_mean: Option<f64>) -> Result<TruncationResult> {
    ensure!(tau > 0.0, Domain, "tau must be positive, got {tau}");
    let n = m.n();
    let cut = tau * (n as f64).sqrt();
    let hat = m.map(|x| if x.abs() < cut { x } else { 0.0 })?;
    let check = m.map(|x| if x.abs() < cut { 0.0 } else { x })?;
    let center = match known_mean {
        Some(mu) => mu,
        None if n > 1 => {
            let off: f64 = (0..n)
                .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
                .map(|(i, j)| hat.get(i, j))
                .sum();
            off / (n * (n - 1) / 2) as f64
        }
        None => 0.0,
    };
    let centered = hat.map(|x| x - center)?;
    Ok(TruncationResult {
        hat,
        check,
        centered,
        center,
        tau,
    })
}

/// Compares both sides of the resolvent perturbation bound
/// `|Tr R(z) - Tr R~(z)| <= v^-2 (Tr D^2)^(1/2)`, where `R` resolves
/// `x / sqrt(n)` and `R~` resolves `(x + d) / sqrt(n)`.
///
/// Returns `(lhs, rhs)`.
pub fn truncation_perturbation_check(x: &SymmetricMatrix, d: &SymmetricMatrix, z: Complex64) -> Result<(f64, f64)> {
    ensure!(z.im > 0.0, Domain, "Im z must be positive, got {}", z.im);
    ensure!(x.n() == d.n(), Size, "dimension mismatch: {} vs {}", x.n(), d.n());
    let perturbed = x.add(d)?;
    let tr = |m: &SymmetricMatrix| -> Result<Complex64> {
        let d = spectra::esd(m)?;
        Ok(d.lambdas().iter().map(|&l| 1.0 / (l - z)).sum())
    };
    let lhs = (tr(x)? - tr(&perturbed)?).norm();
    let rhs = d.frobenius_sq().sqrt() / (z.im * z.im);
    Ok((lhs, rhs))
}

/// Pass/fail thresholds for [`check_conditions`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionTolerances {
    /// Bound on `(1/n) sum |B_i^2 - 1|`.
    pub avg_b_deviation: f64,
    /// The constant `C` bounding `max B_i`.
    pub max_b: f64,
    /// Bound on `max |B_i^2 - 1|`.
    pub max_b_deviation: f64,
    /// Bound on the Lindeberg ratio.
    pub lindeberg: f64,
}

impl Default for ConditionTolerances {
    fn default() -> Self {
        Self {
            avg_b_deviation: 0.05,
            max_b: 2.0,
            max_b_deviation: 0.05,
            lindeberg: 0.05,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionVerdicts {
    /// Row averages close to one on average.
    pub avg_b: bool,
    /// Row averages uniformly bounded.
    pub max_b: bool,
    /// Row averages uniformly close to one (implies the two above).
    pub uniform_b: bool,
    /// Negligible large entries.
    pub lindeberg: bool,
}

impl ConditionVerdicts {
    pub fn all(&self) -> bool {
        self.avg_b && self.max_b && self.uniform_b && self.lindeberg
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub n: usize,
    pub tau: f64,
    pub avg_b_deviation: f64,
    pub max_b: f64,
    pub max_b_deviation: f64,
    pub lindeberg: f64,
    pub tolerances: ConditionTolerances,
    pub verdicts: ConditionVerdicts,
}

/// Evaluates the variance-profile conditions exactly from `p` and compares
/// them, together with a caller-supplied Lindeberg estimate, to `tol`.
pub fn check_conditions(
    p: &VarianceProfile,
    tau: f64,
    lindeberg_estimate: f64,
    tol: &ConditionTolerances,
) -> ConditionReport {
    let b2 = p.b_values();
    let n = b2.len();
    let avg_b_deviation = b2.iter().map(|b| (b - 1.0).abs()).sum::<f64>() / n as f64;
    let max_b_deviation = b2.iter().fold(0.0f64, |m, b| m.max((b - 1.0).abs()));
    let max_b = b2.iter().fold(0.0f64, |m, b| m.max(b.sqrt()));
    let lindeberg = lindeberg_estimate.max(0.0);
    ConditionReport {
        n,
        tau,
        avg_b_deviation,
        max_b,
        max_b_deviation,
        lindeberg,
        tolerances: *tol,
        verdicts: ConditionVerdicts {
            avg_b: avg_b_deviation <= tol.avg_b_deviation,
            max_b: max_b <= tol.max_b,
            uniform_b: max_b_deviation <= tol.max_b_deviation,
            lindeberg: lindeberg <= tol.lindeberg,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::{profile_block, profile_smooth, EnsembleKind, EnsembleSpec};
    use crate::Error;
    use proptest::prelude::*;

    #[test]
    fn from_upper_examples() {
        let m = SymmetricMatrix::from_upper(1, &[3.0]).unwrap();
        assert_eq!(m.as_slice(), &[3.0]);
        let m = SymmetricMatrix::from_upper(2, &[0.0, 1.0, 0.0]).unwrap();
        assert_eq!(m.as_slice(), &[0.0, 1.0, 1.0, 0.0]);
        assert!(matches!(
            SymmetricMatrix::from_upper(2, &[1.0, 2.0]),
            Err(Error::Size(_))
        ));
        assert!(matches!(
            SymmetricMatrix::from_upper(2, &[1.0, f64::NAN, 0.0]),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn symmetric_over_all_pairs() {
        for n in [1, 2, 5, 17, 64] {
            let spec = EnsembleSpec::gaussian(VarianceProfile::constant(n, 1.0).unwrap(), n as u64);
            let m = spec.sample().unwrap();
            for i in 0..n {
                for j in 0..n {
                    assert_eq!(m.get(i, j), m.get(j, i));
                }
            }
        }
    }

    #[test]
    fn lindeberg_examples() {
        let m = SymmetricMatrix::from_upper(1, &[2.0]).unwrap();
        assert_eq!(lindeberg_ratio(&m, 1.0).unwrap(), 4.0);
        let m = SymmetricMatrix::from_upper(2, &[0.0, 3.0, 0.0]).unwrap();
        assert_eq!(lindeberg_ratio(&m, 2.0).unwrap(), 4.5);
        let m = SymmetricMatrix::from_upper(2, &[0.1, -0.2, 0.3]).unwrap();
        assert_eq!(lindeberg_ratio(&m, 1.0).unwrap(), 0.0);
        assert!(matches!(lindeberg_ratio(&m, 0.0), Err(Error::Domain(_))));
        assert!(matches!(lindeberg_ratio(&m, -1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn lindeberg_nonincreasing_in_tau() {
        let p = VarianceProfile::constant(32, 1.0).unwrap();
        for seed in 0..5 {
            let m = EnsembleSpec::gaussian(p.clone(), seed).sample().unwrap();
            let vals: Vec<f64> = (1..200)
                .map(|k| lindeberg_ratio(&m, k as f64 * 0.005).unwrap())
                .collect();
            assert!(vals.windows(2).all(|w| w[1] <= w[0]));
        }
    }

    #[test]
    fn truncation_sequence_values() {
        assert_eq!(truncation_sequence(1), 1.0);
        assert_eq!(truncation_sequence(256), 0.5);
        assert_eq!(truncation_sequence(65536), 0.25);
        let mut prev = f64::INFINITY;
        for n in 1..2000 {
            let t = truncation_sequence(n);
            assert!(t < prev || n == 1);
            prev = t;
        }
    }

    #[test]
    fn truncate_examples() {
        let m = SymmetricMatrix::from_upper(1, &[5.0]).unwrap();
        let t = truncate(&m, 1.0).unwrap();
        assert_eq!(t.hat.as_slice(), &[0.0]);
        assert_eq!(t.check.as_slice(), &[5.0]);

        let m = SymmetricMatrix::from_upper(2, &[0.1, 0.5, -0.3]).unwrap();
        let t = truncate(&m, 1.0).unwrap();
        assert_eq!(t.hat, m);
        assert!(t.check.as_slice().iter().all(|&x| x == 0.0));
        assert_eq!(t.center, 0.5);
        assert_eq!(t.centered.get(0, 1), 0.0);

        let t = truncate_with_mean(&m, 1.0, Some(0.0)).unwrap();
        assert_eq!(t.centered, m);
        assert!(matches!(truncate(&m, 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn truncate_reassembles_gaussian_exactly() {
        let n = 64;
        let tau = truncation_sequence(n);
        let cut = tau * (n as f64).sqrt();
        let p = VarianceProfile::constant(n, 1.0).unwrap();
        for seed in 0..100 {
            let m = EnsembleSpec::gaussian(p.clone(), seed).sample().unwrap();
            let t = truncate(&m, tau).unwrap();
            for ((x, h), c) in m.as_slice().iter().zip(t.hat.as_slice()).zip(t.check.as_slice()) {
                assert_eq!(h + c, *x);
                assert!(h.abs() < cut);
                assert!(*c == 0.0 || c.abs() >= cut);
            }
        }
    }

    #[test]
    fn perturbation_check_examples() {
        let x = SymmetricMatrix::from_upper(1, &[0.0]).unwrap();
        let d = SymmetricMatrix::from_upper(1, &[1.0]).unwrap();
        let (lhs, rhs) = truncation_perturbation_check(&x, &d, Complex64::i()).unwrap();
        // |1/(0 - i) - 1/(1 - i)| = |i - (1 + i)/2| = 1/sqrt(2)
        assert!((lhs - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert_eq!(rhs, 1.0);

        let zero = SymmetricMatrix::zeros(3);
        let x = SymmetricMatrix::from_upper(3, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        let (lhs, rhs) = truncation_perturbation_check(&x, &zero, Complex64::new(0.3, 0.2)).unwrap();
        assert_eq!((lhs, rhs), (0.0, 0.0));

        assert!(matches!(
            truncation_perturbation_check(&x, &zero, Complex64::new(0.0, 0.0)),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            truncation_perturbation_check(&x, &SymmetricMatrix::zeros(2), Complex64::i()),
            Err(Error::Size(_))
        ));
    }

    #[test]
    fn b_values_examples() {
        let p = VarianceProfile::constant(5, 1.0).unwrap();
        assert_eq!(p.b_values(), vec![1.0; 5]);
        let p = VarianceProfile::from_upper(2, &[0.0, 2.0, 0.0]).unwrap();
        assert_eq!(p.b_values(), vec![1.0, 1.0]);
        let p = profile_block(8).unwrap();
        assert_eq!(p.b_values(), vec![1.0, 1.0, 1.0, 1.0, 0.625, 0.625, 0.625, 0.625]);
        assert!(VarianceProfile::from_upper(1, &[-1.0]).is_err());
    }

    #[test]
    fn condition_examples() {
        let tol = ConditionTolerances::default();
        let r = check_conditions(&VarianceProfile::constant(16, 1.0).unwrap(), 0.5, 0.0, &tol);
        assert_eq!(r.avg_b_deviation, 0.0);
        assert_eq!(r.max_b, 1.0);
        assert!(r.verdicts.all());

        // (1/2)(1/2 - 1/n) with n = 64
        let r = check_conditions(&profile_block(64).unwrap(), 0.5, 0.0, &tol);
        assert!((r.avg_b_deviation - 0.2421875).abs() < 1e-15);
        assert!(!r.verdicts.avg_b);
        assert!(r.avg_b_deviation <= r.max_b_deviation);

        for n in [64, 100, 256] {
            let r = check_conditions(&profile_smooth(n, 0.5).unwrap(), 0.5, 0.0, &tol);
            assert!(r.avg_b_deviation <= 2.0 / n as f64);
            assert!(r.verdicts.all(), "{r:?}");
        }
    }

    #[test]
    fn dependent_kind_matrix_is_finite() {
        let p = VarianceProfile::constant(6, 1.0).unwrap();
        let m = EnsembleSpec::new(EnsembleKind::Dependent, p, 0.5, 1)
            .unwrap()
            .sample()
            .unwrap();
        assert!(m.as_slice().iter().all(|x| x.is_finite()));
    }

    proptest! {
        #[test]
        fn avg_deviation_bounded_by_max(n in 1usize..12, vals in proptest::collection::vec(0.0f64..3.0, 78)) {
            let p = VarianceProfile::from_upper(n, &vals[..n * (n + 1) / 2]).unwrap();
            let r = check_conditions(&p, 1.0, 0.0, &ConditionTolerances::default());
            prop_assert!(r.avg_b_deviation <= r.max_b_deviation + 1e-15);
            prop_assert!(r.avg_b_deviation >= 0.0 && r.max_b >= 0.0);
        }

        #[test]
        fn upper_roundtrip(n in 1usize..10, vals in proptest::collection::vec(-5.0f64..5.0, 55)) {
            let up = &vals[..n * (n + 1) / 2];
            prop_assert_eq!(SymmetricMatrix::from_upper(n, up).unwrap().upper(), up.to_vec());
        }
    }
}
