use std::f64::consts::FRAC_PI_2;

use semicircle_core::ensembles::{EnsembleConfig, EnsembleKind, ProfileSpec};
use semicircle_core::exec::Exec;
use semicircle_core::graphs::{self, category_counts, enumerate_canonical, gaussian_moment_exact};
use semicircle_core::interpolation::{path_sweep, SeedPairing};
use semicircle_core::matrix::{check_conditions, lindeberg_ratio, ConditionReport, ConditionTolerances};
use semicircle_core::metrics::{kolmogorov_to_semicircle, levy_to_semicircle};
use semicircle_core::semicircle::{catalan, catalan_moment, density};
use semicircle_core::spectra::{histogram, linspace, sample_spectra, AveragedEsd, SpectralDistribution};
use semicircle_core::Complex64;
use serde::Serialize;

use crate::args::{KindArg, RunArgs};
use crate::config::{kind_of, resolve, Defaults, Resolved, RunConfig, Seeds};
use crate::output::{blocks, CliError, Header, Report, Table};

/// Default `--assert` thresholds.
pub const SIMULATE_MAX_KOLMOGOROV: f64 = 0.03;
pub const COUNTEREXAMPLE_MIN_KOLMOGOROV: f64 = 0.05;
pub const MOMENT_TOLERANCE: f64 = 0.05;
pub const GAP_MAX: f64 = 0.02;
pub const CONDITIONAL_VARIANCE_TOLERANCE: f64 = 0.05;

pub struct Ctx {
    pub file: RunConfig,
    pub exec: Exec,
    pub reproducible: bool,
    pub threshold: Option<f64>,
}

impl Ctx {
    fn header(&self, command: &'static str, config: RunConfig) -> Header {
        Header::new(command, config, self.reproducible)
    }

    fn threshold(&self, default: f64) -> f64 {
        self.threshold.unwrap_or(default)
    }
}

fn echo(command: &str, r: &Resolved) -> RunConfig {
    RunConfig {
        subcommand: Some(command.to_string()),
        ensemble: Some(r.ensemble.clone()),
        seeds: Some(Seeds::List(r.seeds.clone())),
        grid: Some(r.grid),
        ..RunConfig::default()
    }
}

#[derive(Serialize)]
struct EsdPoint {
    x: f64,
    #[serde(rename = "F")]
    f: f64,
}

#[derive(Serialize)]
struct HistogramBin {
    x: f64,
    density: f64,
    semicircle: f64,
}

fn esd_points(avg: &AveragedEsd) -> Vec<EsdPoint> {
    avg.grid()
        .iter()
        .zip(avg.values())
        .map(|(&x, &f)| EsdPoint { x, f })
        .collect()
}

fn esd_table(avg: &AveragedEsd) -> String {
    let mut t = Table::new(&["x", "F"]);
    for (&x, &f) in avg.grid().iter().zip(avg.values()) {
        t.row(&[x.into(), f.into()]);
    }
    t.finish()
}

fn spectra_for(ctx: &Ctx, r: &Resolved) -> Result<(Vec<SpectralDistribution>, AveragedEsd), CliError> {
    let spec = r.ensemble.build()?;
    let dists = sample_spectra(&spec, &r.seeds, ctx.exec)?;
    let avg = AveragedEsd::from_spectra(&dists, &r.grid_points())?;
    Ok((dists, avg))
}

#[derive(Serialize)]
struct SimulateReport {
    #[serde(flatten)]
    header: Header,
    kolmogorov: f64,
    levy: f64,
    esd: Vec<EsdPoint>,
    histogram: Vec<HistogramBin>,
}

pub fn simulate(ctx: &Ctx, args: &RunArgs) -> Result<Report, CliError> {
    let r = resolve(args, &ctx.file, Defaults::RUN)?;
    let (dists, avg) = spectra_for(ctx, &r)?;
    let kolmogorov = kolmogorov_to_semicircle(&avg);
    let levy = levy_to_semicircle(&avg);
    let bins: Vec<HistogramBin> = histogram(&dists, r.grid.min, r.grid.max, r.grid.points)
        .into_iter()
        .map(|(x, d)| HistogramBin {
            x,
            density: d,
            semicircle: density(x),
        })
        .collect();

    let mut hist = Table::new(&["x", "density", "semicircle"]);
    for b in &bins {
        hist.row(&[b.x.into(), b.density.into(), b.semicircle.into()]);
    }
    let mut summary = Table::new(&["kolmogorov", "levy"]);
    summary.row(&[kolmogorov.into(), levy.into()]);
    let csv = blocks(vec![hist.finish(), esd_table(&avg), summary.finish()]);

    let limit = ctx.threshold(SIMULATE_MAX_KOLMOGOROV);
    let violation = (kolmogorov > limit).then(|| format!("kolmogorov {kolmogorov} exceeds {limit}"));
    let body = SimulateReport {
        header: ctx.header("simulate", echo("simulate", &r)),
        kolmogorov,
        levy,
        esd: esd_points(&avg),
        histogram: bins,
    };
    Ok(Report::new(&body, csv, violation))
}

#[derive(Serialize)]
struct EsdReport {
    #[serde(flatten)]
    header: Header,
    esd: Vec<EsdPoint>,
}

pub fn esd(ctx: &Ctx, args: &RunArgs) -> Result<Report, CliError> {
    let r = resolve(args, &ctx.file, Defaults::RUN)?;
    let (_, avg) = spectra_for(ctx, &r)?;
    let body = EsdReport {
        header: ctx.header("esd", echo("esd", &r)),
        esd: esd_points(&avg),
    };
    Ok(Report::new(&body, esd_table(&avg), None))
}

#[derive(Serialize)]
struct SeedDistance {
    seed: u64,
    kolmogorov: f64,
    levy: f64,
}

#[derive(Serialize)]
struct DistanceReport {
    #[serde(flatten)]
    header: Header,
    kolmogorov: f64,
    levy: f64,
    per_seed: Vec<SeedDistance>,
}

pub fn distance(ctx: &Ctx, args: &RunArgs) -> Result<Report, CliError> {
    let r = resolve(args, &ctx.file, Defaults::RUN)?;
    let (dists, avg) = spectra_for(ctx, &r)?;
    let kolmogorov = kolmogorov_to_semicircle(&avg);
    let levy = levy_to_semicircle(&avg);
    let per_seed: Vec<SeedDistance> = ctx
        .exec
        .map(&dists, |d| (kolmogorov_to_semicircle(d), levy_to_semicircle(d)))
        .into_iter()
        .zip(&r.seeds)
        .map(|((k, l), &seed)| SeedDistance {
            seed,
            kolmogorov: k,
            levy: l,
        })
        .collect();

    let mut t = Table::new(&["target", "kolmogorov", "levy"]);
    t.row(&["averaged".into(), kolmogorov.into(), levy.into()]);
    for s in &per_seed {
        t.row(&[s.seed.into(), s.kolmogorov.into(), s.levy.into()]);
    }
    let limit = ctx.threshold(SIMULATE_MAX_KOLMOGOROV);
    let violation = (kolmogorov > limit).then(|| format!("kolmogorov {kolmogorov} exceeds {limit}"));
    let body = DistanceReport {
        header: ctx.header("distance", echo("distance", &r)),
        kolmogorov,
        levy,
        per_seed,
    };
    Ok(Report::new(&body, t.finish(), violation))
}

#[derive(Serialize)]
struct MomentRow {
    k: u32,
    empirical: f64,
    stderr: Option<f64>,
    catalan: f64,
    exact: Option<f64>,
}

#[derive(Serialize)]
struct MomentsReport {
    #[serde(flatten)]
    header: Header,
    moments: Vec<MomentRow>,
}

pub fn moments(ctx: &Ctx, args: &RunArgs, max_k: u32) -> Result<Report, CliError> {
    if max_k == 0 {
        return Err(CliError::Config("--max-k must be at least 1".into()));
    }
    let r = resolve(args, &ctx.file, Defaults::RUN)?;
    let spec = r.ensemble.build()?;
    let dists = sample_spectra(&spec, &r.seeds, ctx.exec)?;
    let exact_available = spec.kind() == EnsembleKind::Gaussian && spec.n() <= graphs::MAX_EXACT_N;

    let mut rows = Vec::new();
    for k in 1..=max_k {
        let values: Vec<f64> = dists.iter().map(|d| d.moment(k)).collect();
        let s = values.len() as f64;
        let mean = values.iter().sum::<f64>() / s;
        let stderr = (values.len() > 1).then(|| {
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (s - 1.0);
            (var / s).sqrt()
        });
        let exact = if exact_available && k as usize <= graphs::MAX_EXACT_K {
            Some(gaussian_moment_exact(spec.profile(), k as usize)?.total)
        } else {
            None
        };
        rows.push(MomentRow {
            k,
            empirical: mean,
            stderr,
            catalan: catalan_moment(k),
            exact,
        });
    }

    let mut t = Table::new(&["k", "empirical", "stderr", "catalan", "exact"]);
    for m in &rows {
        t.row(&[
            (m.k as usize).into(),
            m.empirical.into(),
            m.stderr.into(),
            m.catalan.into(),
            m.exact.into(),
        ]);
    }
    let limit = ctx.threshold(MOMENT_TOLERANCE);
    let violation = rows.iter().find(|m| (m.empirical - m.catalan).abs() > limit).map(|m| {
        format!(
            "moment {} = {} is farther than {limit} from {}",
            m.k, m.empirical, m.catalan
        )
    });
    let mut config = echo("moments", &r);
    config.grid = None;
    let body = MomentsReport {
        header: ctx.header("moments", config),
        moments: rows,
    };
    Ok(Report::new(&body, t.finish(), violation))
}

#[derive(Serialize)]
struct GraphRow {
    g: String,
    t: usize,
    category: u8,
    contribution: Option<f64>,
}

#[derive(Serialize)]
struct CategoryCounts {
    category_1: usize,
    category_2: usize,
    category_3: usize,
    total: usize,
}

#[derive(Serialize)]
struct GraphsReport {
    #[serde(flatten)]
    header: Header,
    k: usize,
    counts: CategoryCounts,
    /// Exact Gaussian moment split, when the profile is small enough.
    s1: Option<f64>,
    s3: Option<f64>,
    total: Option<f64>,
    graphs: Vec<GraphRow>,
}

pub fn graphs(ctx: &Ctx, args: &RunArgs, k: Option<usize>) -> Result<Report, CliError> {
    let k = k
        .or(ctx.file.k)
        .ok_or_else(|| CliError::Config("graphs needs --k".into()))?;
    let defaults = Defaults {
        n: 4,
        seeds: 1,
        profile: None,
    };
    let r = resolve(args, &ctx.file, defaults)?;
    let canonical = enumerate_canonical(k)?;
    let (c1, c2, c3) = category_counts(k)?;
    let profile = r.ensemble.profile.build(r.ensemble.n)?;
    let breakdown = if k <= graphs::MAX_EXACT_K && profile.n() <= graphs::MAX_EXACT_N {
        Some(gaussian_moment_exact(&profile, k)?)
    } else {
        None
    };
    let rows: Vec<GraphRow> = canonical
        .iter()
        .enumerate()
        .map(|(i, g)| GraphRow {
            g: g.label(),
            t: g.t,
            category: g.category.number(),
            contribution: breakdown.as_ref().map(|b| b.graphs[i].contribution),
        })
        .collect();

    let mut t = Table::new(&["g", "t", "category", "contribution"]);
    for row in &rows {
        t.row(&[
            row.g.as_str().into(),
            row.t.into(),
            (row.category as usize).into(),
            row.contribution.into(),
        ]);
    }
    let expected_c1 = if k % 2 == 0 { catalan(k as u32 / 2) } else { 0 };
    let violation = (c1 as u128 != expected_c1)
        .then(|| format!("category-1 count {c1} differs from the Catalan number {expected_c1}"));
    let config = RunConfig {
        subcommand: Some("graphs".into()),
        ensemble: Some(r.ensemble.clone()),
        k: Some(k),
        ..RunConfig::default()
    };
    let body = GraphsReport {
        header: ctx.header("graphs", config),
        k,
        counts: CategoryCounts {
            category_1: c1,
            category_2: c2,
            category_3: c3,
            total: canonical.len(),
        },
        s1: breakdown.as_ref().map(|b| b.s1),
        s3: breakdown.as_ref().map(|b| b.s3),
        total: breakdown.as_ref().map(|b| b.total),
        graphs: rows,
    };
    Ok(Report::new(&body, t.finish(), violation))
}

#[derive(Serialize)]
struct PathRow {
    phi: f64,
    re_z: f64,
    im_z: f64,
    re_s: f64,
    im_s: f64,
    stderr: f64,
}

#[derive(Serialize)]
struct InterpolateReport {
    #[serde(flatten)]
    header: Header,
    gap: f64,
    samples: Vec<PathRow>,
}

pub struct PathArgs<'a> {
    pub kind_y: Option<KindArg>,
    pub phi_points: usize,
    pub z_re: &'a [f64],
    pub z_im: f64,
}

fn second_ensemble(x: &EnsembleConfig, file: Option<&EnsembleConfig>, kind: Option<KindArg>) -> EnsembleConfig {
    let mut y = file.cloned().unwrap_or_else(|| EnsembleConfig {
        kind: EnsembleKind::Gaussian,
        delta: 0.0,
        ..x.clone()
    });
    if let Some(k) = kind {
        y.kind = kind_of(k);
        if y.kind == EnsembleKind::Dependent && y.delta == 0.0 {
            y.delta = if x.kind == EnsembleKind::Dependent {
                x.delta
            } else {
                0.5
            };
        }
    }
    y
}

pub fn interpolate(ctx: &Ctx, args: &RunArgs, path: PathArgs<'_>) -> Result<Report, CliError> {
    if path.phi_points < 2 {
        return Err(CliError::Config("--phi-points must be at least 2".into()));
    }
    if path.z_re.is_empty() || path.z_im.is_nan() || path.z_im <= 0.0 {
        return Err(CliError::Config("evaluation points need Im z > 0".into()));
    }
    let r = resolve(args, &ctx.file, Defaults::RUN)?;
    let y = second_ensemble(&r.ensemble, ctx.file.ensemble_y.as_ref(), path.kind_y);
    let zs: Vec<Complex64> = path.z_re.iter().map(|&re| Complex64::new(re, path.z_im)).collect();
    let phis = linspace(0.0, FRAC_PI_2, path.phi_points);
    let samples = path_sweep(
        &r.ensemble.build()?,
        &y.build()?,
        &phis,
        &zs,
        &r.seeds,
        SeedPairing::default(),
        ctx.exec,
    )?;
    // samples are ordered by phi then z: the first z-block is phi = 0 (X),
    // the last is phi = pi/2 (Y)
    let nz = zs.len();
    let gap = samples[..nz]
        .iter()
        .zip(&samples[samples.len() - nz..])
        .map(|(a, b)| (a.s - b.s).norm())
        .fold(0.0, f64::max);
    let rows: Vec<PathRow> = samples
        .iter()
        .map(|s| PathRow {
            phi: s.phi,
            re_z: s.z.re,
            im_z: s.z.im,
            re_s: s.s.re,
            im_s: s.s.im,
            stderr: s.stderr,
        })
        .collect();

    let mut t = Table::new(&["phi", "re_z", "im_z", "re_s", "im_s", "stderr"]);
    for row in &rows {
        t.row(&[
            row.phi.into(),
            row.re_z.into(),
            row.im_z.into(),
            row.re_s.into(),
            row.im_s.into(),
            row.stderr.into(),
        ]);
    }
    let limit = ctx.threshold(GAP_MAX);
    let violation = (gap > limit).then(|| format!("universality gap {gap} exceeds {limit}"));
    let config = RunConfig {
        ensemble_y: Some(y),
        grid: None,
        ..echo("interpolate", &r)
    };
    let body = InterpolateReport {
        header: ctx.header("interpolate", config),
        gap,
        samples: rows,
    };
    Ok(Report::new(&body, t.finish(), violation))
}

#[derive(Serialize)]
struct SeedKolmogorov {
    seed: u64,
    kolmogorov: f64,
}

#[derive(Serialize)]
struct CounterexampleReport {
    #[serde(flatten)]
    header: Header,
    /// `(1/n) sum |B_i^2 - 1|` of the profile.
    avg_b_deviation: f64,
    kolmogorov: f64,
    levy: f64,
    min_kolmogorov: f64,
    per_seed: Vec<SeedKolmogorov>,
}

pub fn counterexample(ctx: &Ctx, args: &RunArgs) -> Result<Report, CliError> {
    let defaults = Defaults {
        n: 1024,
        seeds: 10,
        profile: Some(crate::args::ProfileArg::Block),
    };
    let r = resolve(args, &ctx.file, defaults)?;
    if r.ensemble.profile != ProfileSpec::Block {
        return Err(CliError::Config("counterexample uses the block profile".into()));
    }
    let (dists, avg) = spectra_for(ctx, &r)?;
    let b2 = r.ensemble.profile.build(r.ensemble.n)?.b_values();
    let avg_b_deviation = b2.iter().map(|b| (b - 1.0).abs()).sum::<f64>() / b2.len() as f64;
    let per_seed: Vec<SeedKolmogorov> = dists
        .iter()
        .zip(&r.seeds)
        .map(|(d, &seed)| SeedKolmogorov {
            seed,
            kolmogorov: kolmogorov_to_semicircle(d),
        })
        .collect();
    let min_kolmogorov = per_seed.iter().map(|s| s.kolmogorov).fold(f64::INFINITY, f64::min);
    let kolmogorov = kolmogorov_to_semicircle(&avg);
    let levy = levy_to_semicircle(&avg);

    let mut t = Table::new(&["target", "kolmogorov"]);
    t.row(&["averaged".into(), kolmogorov.into()]);
    for s in &per_seed {
        t.row(&[s.seed.into(), s.kolmogorov.into()]);
    }
    let limit = ctx.threshold(COUNTEREXAMPLE_MIN_KOLMOGOROV);
    let violation = per_seed
        .iter()
        .find(|s| s.kolmogorov < limit)
        .map(|s| format!("seed {} has kolmogorov {} below {limit}", s.seed, s.kolmogorov));
    let body = CounterexampleReport {
        header: ctx.header("counterexample", echo("counterexample", &r)),
        avg_b_deviation,
        kolmogorov,
        levy,
        min_kolmogorov,
        per_seed,
    };
    Ok(Report::new(&body, t.finish(), violation))
}

#[derive(Serialize)]
struct CheckReport {
    #[serde(flatten)]
    header: Header,
    conditions: ConditionReport,
    conditional_variance_deviation: f64,
    conditional_variance_tolerance: f64,
    pass: bool,
}

pub fn check(ctx: &Ctx, args: &RunArgs) -> Result<Report, CliError> {
    let r = resolve(args, &ctx.file, Defaults::RUN)?;
    let spec = r.ensemble.build()?;
    let per_seed = ctx
        .exec
        .map(&r.seeds, |&s| -> Result<(f64, f64), CliError> {
            let seeded = spec.with_seed(s);
            let m = seeded.sample_with(Exec::Sequential)?;
            Ok((lindeberg_ratio(&m, r.tau)?, seeded.conditional_variance_deviation()))
        })
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    let s = per_seed.len() as f64;
    let lindeberg = per_seed.iter().map(|p| p.0).sum::<f64>() / s;
    let cvd = per_seed.iter().map(|p| p.1).sum::<f64>() / s;
    let conditions = check_conditions(spec.profile(), r.tau, lindeberg, &ConditionTolerances::default());
    let pass = conditions.verdicts.all() && cvd <= CONDITIONAL_VARIANCE_TOLERANCE;

    let tol = conditions.tolerances;
    let v = conditions.verdicts;
    let mut t = Table::new(&["condition", "value", "tolerance", "pass"]);
    let rows = [
        (
            "avg_b_deviation",
            conditions.avg_b_deviation,
            tol.avg_b_deviation,
            v.avg_b,
        ),
        ("max_b", conditions.max_b, tol.max_b, v.max_b),
        (
            "max_b_deviation",
            conditions.max_b_deviation,
            tol.max_b_deviation,
            v.uniform_b,
        ),
        ("lindeberg", conditions.lindeberg, tol.lindeberg, v.lindeberg),
        (
            "conditional_variance_deviation",
            cvd,
            CONDITIONAL_VARIANCE_TOLERANCE,
            cvd <= CONDITIONAL_VARIANCE_TOLERANCE,
        ),
    ];
    for (name, value, limit, ok) in rows {
        t.row(&[name.into(), value.into(), limit.into(), ok.to_string().into()]);
    }
    let violation = (!pass).then(|| {
        let failed: Vec<&str> = rows.iter().filter(|r| !r.3).map(|r| r.0).collect();
        format!("conditions violated: {}", failed.join(", "))
    });
    let config = RunConfig {
        tau: Some(r.tau),
        grid: None,
        ..echo("check", &r)
    };
    let body = CheckReport {
        header: ctx.header("check", config),
        conditions,
        conditional_variance_deviation: cvd,
        conditional_variance_tolerance: CONDITIONAL_VARIANCE_TOLERANCE,
        pass,
    };
    Ok(Report::new(&body, t.finish(), violation))
}
