//! Seeded matrix ensembles and the variance profiles they are built on.
//!
//! Every sampler is a pure function of its [`EnsembleSpec`]. Entry `(i, j)`
//! draws only from its own streams (see [`crate::rng`]), so generation is
//! bit-identical under any thread count.
//!
//! The dependent ensemble couples every entry to all the others through the
//! mean square of a field of independent magnitudes:
//!
//! ```text
//! rho_kl ~ |N(0,1)|,  eps_ij = +-1 fair and independent of everything else
//! M_ij   = mean of rho_kl^2 over the other upper-triangle entries (k,l) != (i,j)
//! X_ij   = eps_ij * sigma_ij * sqrt(max(0, 1 + delta (M_ij - 1)))
//! ```
//!
//! The independent signs make `E(X_ij | rest) = 0`, while the conditional
//! variance `sigma_ij^2 (1 + delta (M_ij - 1))` fluctuates around
//! `sigma_ij^2` by `O(delta / n)`.

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};
use crate::exec::Exec;
use crate::matrix::{SymmetricMatrix, VarianceProfile};
use crate::rng::{upper_index, StreamFactory};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnsembleKind {
    /// Independent centered Gaussians with variance `sigma_ij^2`.
    Gaussian,
    /// Independent `sigma_ij * (+-1)`.
    Rademacher,
    /// Sign-coupled dependent entries (module docs).
    Dependent,
}

impl EnsembleKind {
    /// Mean of the law of an entry truncated symmetrically at any level.
    /// All shipped kinds are sign-symmetric, so this is zero.
    pub fn truncated_mean(self) -> Option<f64> {
        Some(0.0)
    }
}

impl std::str::FromStr for EnsembleKind {
    type Err = crate::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" => Ok(Self::Gaussian),
            "rademacher" => Ok(Self::Rademacher),
            "dependent" => Ok(Self::Dependent),
            _ => Err(crate::Error::Validation(format!("unknown ensemble kind '{s}'"))),
        }
    }
}

/// A fully specified random matrix law plus its root seed.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSpec {
    kind: EnsembleKind,
    profile: VarianceProfile,
    delta: f64,
    seed: u64,
}

impl EnsembleSpec {
    pub fn new(kind: EnsembleKind, profile: VarianceProfile, delta: f64, seed: u64) -> Result<Self> {
        ensure!(
            (0.0..1.0).contains(&delta),
            Validation,
            "delta must lie in [0, 1), got {delta}"
        );
        ensure!(
            delta == 0.0 || kind == EnsembleKind::Dependent,
            Validation,
            "delta is only meaningful for the dependent ensemble"
        );
        Ok(Self {
            kind,
            profile,
            delta,
            seed,
        })
    }

    pub fn gaussian(profile: VarianceProfile, seed: u64) -> Self {
        Self::new(EnsembleKind::Gaussian, profile, 0.0, seed).unwrap()
    }

    pub fn rademacher(profile: VarianceProfile, seed: u64) -> Self {
        Self::new(EnsembleKind::Rademacher, profile, 0.0, seed).unwrap()
    }

    pub fn dependent(profile: VarianceProfile, delta: f64, seed: u64) -> Result<Self> {
        Self::new(EnsembleKind::Dependent, profile, delta, seed)
    }

    pub fn kind(&self) -> EnsembleKind {
        self.kind
    }

    pub fn profile(&self) -> &VarianceProfile {
        &self.profile
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn n(&self) -> usize {
        self.profile.n()
    }

    /// Same law, different root seed.
    pub fn with_seed(&self, seed: u64) -> Self {
        Self { seed, ..self.clone() }
    }

    /// Draws one realization.
    pub fn sample(&self) -> Result<SymmetricMatrix> {
        self.sample_with(Exec::default())
    }

    pub fn sample_with(&self, exec: Exec) -> Result<SymmetricMatrix> {
        Ok(generate(self, exec, None))
    }

    /// Realized conditional-variance deviation
    /// `n^-2 sum_{i,j} |E(X_ij^2 | rest) - sigma_ij^2|` of the dependent
    /// ensemble for this seed; zero for the independent kinds.
    pub fn conditional_variance_deviation(&self) -> f64 {
        if self.kind != EnsembleKind::Dependent || self.delta == 0.0 {
            return 0.0;
        }
        let n = self.n();
        let streams = StreamFactory::new(self.seed);
        let rho2 = magnitudes_squared(n, &streams, Exec::default());
        let total: f64 = rho2.iter().sum();
        let others = (rho2.len() - 1).max(1) as f64;
        let mut acc = 0.0;
        for i in 0..n {
            for j in i..n {
                let e = upper_index(n, i, j);
                let s2 = self.profile.sigma2(i, j);
                let m = if rho2.len() > 1 {
                    (total - rho2[e]) / others
                } else {
                    1.0
                };
                let dev = s2 * ((1.0 + self.delta * (m - 1.0)).max(0.0) - 1.0).abs();
                acc += if i == j { dev } else { 2.0 * dev };
            }
        }
        acc / (n * n) as f64
    }
}

fn magnitudes_squared(n: usize, streams: &StreamFactory, exec: Exec) -> Vec<f64> {
    exec.map_range(n * (n + 1) / 2, |e| {
        let rho = streams.value_stream(e as u64).normal();
        rho * rho
    })
}

/// Core sampler. `flip` negates the sign draw of one upper-triangle entry
/// index; it exists to test the sign-symmetry of the schedule.
pub(crate) fn generate(spec: &EnsembleSpec, exec: Exec, flip: Option<usize>) -> SymmetricMatrix {
    let n = spec.n();
    let p = &spec.profile;
    let streams = StreamFactory::new(spec.seed);
    let sign = |e: usize| {
        let s = streams.sign_stream(e as u64).sign();
        if flip == Some(e) {
            -s
        } else {
            s
        }
    };

    let coupling = if spec.kind == EnsembleKind::Dependent {
        let rho2 = magnitudes_squared(n, &streams, exec);
        let total: f64 = rho2.iter().sum();
        Some((rho2, total))
    } else {
        None
    };

    let mut data = vec![0.0; n * n];
    exec.for_each_chunk_mut(&mut data, n, |i, row| {
        for (j, slot) in row.iter_mut().enumerate().skip(i) {
            let s2 = p.sigma2(i, j);
            if s2 == 0.0 {
                continue;
            }
            let sigma = s2.sqrt();
            let e = upper_index(n, i, j);
            *slot = match spec.kind {
                EnsembleKind::Gaussian => sigma * streams.value_stream(e as u64).normal(),
                EnsembleKind::Rademacher => sign(e) * sigma,
                EnsembleKind::Dependent => {
                    let (rho2, total) = coupling.as_ref().unwrap();
                    let m = if rho2.len() > 1 {
                        (total - rho2[e]) / (rho2.len() - 1) as f64
                    } else {
                        1.0
                    };
                    let scale = (1.0 + spec.delta * (m - 1.0)).max(0.0).sqrt();
                    sign(e) * sigma * scale
                }
            };
        }
    });
    SymmetricMatrix::from_full_unchecked(n, data)
}

/// Classical Wigner profile, all variances one.
pub fn profile_constant(n: usize) -> Result<VarianceProfile> {
    VarianceProfile::constant(n, 1.0)
}

/// All variances zero.
pub fn profile_zero(n: usize) -> Result<VarianceProfile> {
    VarianceProfile::constant(n, 0.0)
}

/// Midpoint-sampled smooth profile
/// `sigma_ij^2 = 1 + alpha f(i) f(j)` with `f(i) = (2i + 1)/n - 1` (zero-based),
/// whose factors sum to zero, so every row average is one.
pub fn profile_smooth(n: usize, alpha: f64) -> Result<VarianceProfile> {
    ensure!(
        (-1.0..=1.0).contains(&alpha),
        Domain,
        "alpha must lie in [-1, 1], got {alpha}"
    );
    ensure!(n >= 1, Size, "dimension must be positive");
    let f = |i: usize| (2 * i + 1) as f64 / n as f64 - 1.0;
    VarianceProfile::from_fn(n, |i, j| 1.0 + alpha * f(i) * f(j))
}

/// Block counterexample with `m = n/2`: unit variance when either index is
/// in the first half or on the diagonal, zero elsewhere.
pub fn profile_block(n: usize) -> Result<VarianceProfile> {
    ensure!(
        n >= 2 && n.is_multiple_of(2),
        Domain,
        "block profile needs even n, got {n}"
    );
    let m = n / 2;
    VarianceProfile::from_fn(n, |i, j| if i < m || j < m || i == j { 1.0 } else { 0.0 })
}

/// Named profile families, as they appear in configuration files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "params", rename_all = "lowercase")]
#[serde(try_from = "RawProfile")]
pub enum ProfileSpec {
    Constant {
        #[serde(default = "one")]
        value: f64,
    },
    Smooth {
        alpha: f64,
    },
    Block,
    Zero,
    /// Explicit upper triangle, row-major.
    Explicit {
        upper: Vec<f64>,
    },
}

fn one() -> f64 {
    1.0
}

/// Accepts `{"type": "constant"}` without `params`.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProfile {
    #[serde(rename = "type")]
    kind: String,
    #[serde(default)]
    params: Option<serde_json::Value>,
}

impl TryFrom<RawProfile> for ProfileSpec {
    type Error = String;

    fn try_from(raw: RawProfile) -> std::result::Result<Self, String> {
        #[derive(Deserialize)]
        #[serde(tag = "type", content = "params", rename_all = "lowercase", deny_unknown_fields)]
        enum Tagged {
            Constant {
                #[serde(default = "one")]
                value: f64,
            },
            Smooth {
                alpha: f64,
            },
            Block,
            Zero,
            Explicit {
                upper: Vec<f64>,
            },
        }
        let params = match (raw.kind.as_str(), raw.params) {
            ("constant", None) => Some(serde_json::json!({})),
            (_, p) => p,
        };
        let mut obj = serde_json::Map::new();
        obj.insert("type".into(), raw.kind.into());
        if let Some(p) = params {
            obj.insert("params".into(), p);
        }
        let tagged: Tagged = serde_json::from_value(obj.into()).map_err(|e| e.to_string())?;
        Ok(match tagged {
            Tagged::Constant { value } => ProfileSpec::Constant { value },
            Tagged::Smooth { alpha } => ProfileSpec::Smooth { alpha },
            Tagged::Block => ProfileSpec::Block,
            Tagged::Zero => ProfileSpec::Zero,
            Tagged::Explicit { upper } => ProfileSpec::Explicit { upper },
        })
    }
}

impl ProfileSpec {
    pub fn build(&self, n: usize) -> Result<VarianceProfile> {
        match self {
            ProfileSpec::Constant { value } => VarianceProfile::constant(n, *value),
            ProfileSpec::Smooth { alpha } => profile_smooth(n, *alpha),
            ProfileSpec::Block => profile_block(n),
            ProfileSpec::Zero => profile_zero(n),
            ProfileSpec::Explicit { upper } => VarianceProfile::from_upper(n, upper),
        }
    }
}

/// Serializable form of an [`EnsembleSpec`]:
/// `{"kind", "n", "profile": {"type", "params"}, "delta", "seed"}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleConfig {
    pub kind: EnsembleKind,
    pub n: usize,
    pub profile: ProfileSpec,
    #[serde(default)]
    pub delta: f64,
    #[serde(default)]
    pub seed: u64,
}

impl EnsembleConfig {
    pub fn build(&self) -> Result<EnsembleSpec> {
        ensure!(self.n >= 1, Validation, "n must be positive");
        EnsembleSpec::new(self.kind, self.profile.build(self.n)?, self.delta, self.seed)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| crate::Error::Validation(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }
}
