use std::path::{Path, PathBuf};

use clap::ValueEnum;
use semicircle_core::ensembles::{EnsembleConfig, EnsembleKind, ProfileSpec};
use semicircle_core::matrix::truncation_sequence;
use serde::{Deserialize, Serialize};

use crate::args::{KindArg, ProfileArg, RunArgs};
use crate::output::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Either a seed count or an explicit list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Seeds {
    Count(usize),
    List(Vec<u64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            min: -3.0,
            max: 3.0,
            points: 401,
        }
    }
}

/// Configuration file contents. Every field is optional; the resolved
/// configuration echoed in reports has all relevant fields filled in and
/// can be fed back through `--config`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subcommand: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ensemble: Option<EnsembleConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ensemble_y: Option<EnsembleConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seeds: Option<Seeds>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text =
            std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

/// Per-command defaults applied when neither flags nor the file say otherwise.
#[derive(Debug, Clone, Copy)]
pub struct Defaults {
    pub n: usize,
    pub seeds: usize,
    pub profile: Option<ProfileArg>,
}

impl Defaults {
    pub const RUN: Defaults = Defaults {
        n: 1024,
        seeds: 20,
        profile: None,
    };
}

const DEFAULT_ALPHA: f64 = 0.5;
const DEFAULT_DELTA: f64 = 0.5;

pub fn kind_of(k: KindArg) -> EnsembleKind {
    match k {
        KindArg::Gaussian => EnsembleKind::Gaussian,
        KindArg::Rademacher => EnsembleKind::Rademacher,
        KindArg::Dependent => EnsembleKind::Dependent,
    }
}

fn profile_of(p: ProfileArg, alpha: f64) -> ProfileSpec {
    match p {
        ProfileArg::Constant => ProfileSpec::Constant { value: 1.0 },
        ProfileArg::Smooth => ProfileSpec::Smooth { alpha },
        ProfileArg::Block => ProfileSpec::Block,
        ProfileArg::Zero => ProfileSpec::Zero,
    }
}

/// Fully merged inputs for one command.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub ensemble: EnsembleConfig,
    pub seeds: Vec<u64>,
    pub grid: GridConfig,
    pub tau: f64,
}

impl Resolved {
    pub fn grid_points(&self) -> Vec<f64> {
        semicircle_core::spectra::linspace(self.grid.min, self.grid.max, self.grid.points)
    }
}

pub fn resolve(args: &RunArgs, file: &RunConfig, defaults: Defaults) -> Result<Resolved, CliError> {
    let explicit = file.ensemble.is_some();
    let mut e = file.ensemble.clone().unwrap_or(EnsembleConfig {
        kind: EnsembleKind::Gaussian,
        n: defaults.n,
        profile: profile_of(defaults.profile.unwrap_or(ProfileArg::Constant), DEFAULT_ALPHA),
        delta: 0.0,
        seed: 0,
    });
    if let Some(k) = args.kind {
        e.kind = kind_of(k);
    }
    if let Some(n) = args.n {
        e.n = n;
    }
    if let Some(p) = args.profile {
        e.profile = profile_of(p, args.alpha.unwrap_or(DEFAULT_ALPHA));
    } else if let Some(a) = args.alpha {
        match &mut e.profile {
            ProfileSpec::Smooth { alpha } => *alpha = a,
            _ => return Err(CliError::Config("--alpha applies only to the smooth profile".into())),
        }
    }
    if let Some(d) = args.delta {
        e.delta = d;
    } else if !explicit && e.kind == EnsembleKind::Dependent {
        e.delta = DEFAULT_DELTA;
    }
    if e.n == 0 {
        return Err(CliError::Config("n must be at least 1".into()));
    }

    let seeds = match (&args.seed_list, args.seeds, &file.seeds) {
        (Some(list), _, _) => list.clone(),
        (None, Some(count), _) => count_seeds(e.seed, count),
        (None, None, Some(Seeds::List(list))) => list.clone(),
        (None, None, Some(Seeds::Count(count))) => count_seeds(e.seed, *count),
        (None, None, None) => count_seeds(e.seed, defaults.seeds),
    };
    if seeds.is_empty() {
        return Err(CliError::Config("at least one seed is required".into()));
    }

    let mut grid = file.grid.unwrap_or_default();
    grid.min = args.grid_min.unwrap_or(grid.min);
    grid.max = args.grid_max.unwrap_or(grid.max);
    grid.points = args.grid_points.unwrap_or(grid.points);
    if !(grid.min.is_finite() && grid.max.is_finite() && grid.min < grid.max && grid.points >= 2) {
        return Err(CliError::Config(format!(
            "invalid grid: need finite min < max and at least 2 points, got [{}, {}] with {}",
            grid.min, grid.max, grid.points
        )));
    }

    let tau = args.tau.or(file.tau).unwrap_or_else(|| truncation_sequence(e.n));
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(CliError::Config(format!("tau must be positive, got {tau}")));
    }

    Ok(Resolved {
        ensemble: e,
        seeds,
        grid,
        tau,
    })
}

fn count_seeds(base: u64, count: usize) -> Vec<u64> {
    (0..count as u64).map(|i| base.wrapping_add(i)).collect()
}
