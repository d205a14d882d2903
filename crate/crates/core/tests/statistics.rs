//! Monte-Carlo properties of the ensembles and of the block counterexample.

use semicircle_core::ensembles::{profile_block, profile_constant, EnsembleSpec};
use semicircle_core::exec::Exec;
use semicircle_core::metrics::kolmogorov_to_semicircle;
use semicircle_core::spectra::sample_spectra;

#[test]
fn gaussian_entries_have_unit_variance() {
    let n = 1024;
    let spec = EnsembleSpec::gaussian(profile_constant(n).unwrap(), 0);
    for seed in 0..20 {
        let upper = spec.with_seed(seed).sample().unwrap().upper();
        let len = upper.len() as f64;
        let mean = upper.iter().sum::<f64>() / len;
        let var = upper.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (len - 1.0);
        assert!(mean.abs() <= 0.005, "seed {seed}: mean {mean}");
        assert!((var - 1.0).abs() <= 0.01, "seed {seed}: variance {var}");
    }
}

fn correlation(a: &[f64], b: &[f64]) -> Option<f64> {
    let len = a.len() as f64;
    let ma = a.iter().sum::<f64>() / len;
    let mb = b.iter().sum::<f64>() / len;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    if saa == 0.0 || sbb == 0.0 {
        return None;
    }
    Some(sab / (saa * sbb).sqrt())
}

fn martingale_check(spec: &EnsembleSpec) {
    const REALIZATIONS: u64 = 20_000;
    let entries = spec.n() * (spec.n() + 1) / 2;
    // column-major: samples[e] holds every realization of entry e
    let mut samples = vec![Vec::with_capacity(REALIZATIONS as usize); entries];
    for seed in 0..REALIZATIONS {
        let upper = spec.with_seed(seed).sample_with(Exec::Sequential).unwrap().upper();
        for (col, v) in samples.iter_mut().zip(upper) {
            col.push(v);
        }
    }
    type Transform = (&'static str, fn(f64) -> f64);
    let transforms: [Transform; 3] = [("identity", |x| x), ("square", |x| x * x), ("sign", f64::signum)];
    let mut worst = 0.0f64;
    for (name, f) in transforms {
        let mapped: Vec<Vec<f64>> = samples.iter().map(|c| c.iter().map(|&x| f(x)).collect()).collect();
        for (a, xa) in samples.iter().enumerate() {
            for (b, fb) in mapped.iter().enumerate().filter(|&(b, _)| b != a) {
                if let Some(r) = correlation(xa, fb) {
                    assert!(r.abs() <= 0.05, "{name}: corr(X[{a}], f(X[{b}])) = {r}");
                    worst = worst.max(r.abs());
                }
            }
        }
    }
    assert!(worst > 0.0);
}

#[test]
fn dependent_entries_are_martingale_differences() {
    martingale_check(&EnsembleSpec::dependent(profile_constant(8).unwrap(), 0.5, 0).unwrap());
}

#[test]
fn gaussian_entries_are_uncorrelated() {
    martingale_check(&EnsembleSpec::gaussian(profile_constant(8).unwrap(), 0));
}

#[test]
fn block_profile_does_not_approach_semicircle() {
    let seeds: Vec<u64> = (0..4).collect();
    let mean_distance = |spec: EnsembleSpec| {
        let d = sample_spectra(&spec, &seeds, Exec::default()).unwrap();
        d.iter().map(|x| kolmogorov_to_semicircle(x)).sum::<f64>() / d.len() as f64
    };
    let mut previous_control = f64::INFINITY;
    for n in [128, 256, 512] {
        let block = mean_distance(EnsembleSpec::gaussian(profile_block(n).unwrap(), 0));
        let control = mean_distance(EnsembleSpec::gaussian(profile_constant(n).unwrap(), 0));
        assert!(block >= 0.045, "n={n}: block distance {block}");
        assert!(block >= 3.0 * control, "n={n}: block {block} vs control {control}");
        assert!(control < previous_control, "n={n}: control {control} did not shrink");
        previous_control = control;
    }
}
