//! Dense symmetric eigensolver: Householder reduction to tridiagonal form
//! followed by implicit QL iterations with Wilkinson shifts.

use crate::error::{ensure, Error, Result};

/// Eigenvalues (ascending) and, optionally, orthonormal eigenvectors stored
/// row-major with one eigenvector per column.
pub(crate) struct Decomposition {
    pub values: Vec<f64>,
    pub vectors: Option<Vec<f64>>,
}

/// Reduces the row-major symmetric `a` in place. Returns the diagonal `d`,
/// the off-diagonal `e` (`e[i]` couples `i` and `i + 1`, `e[n-1] = 0`) and,
/// when asked, the orthogonal `Q` with `A = Q T Q^T`.
fn tridiagonalize(a: &mut [f64], n: usize, want_q: bool) -> (Vec<f64>, Vec<f64>, Option<Vec<f64>>) {
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    let mut reflectors: Vec<(usize, f64, Vec<f64>)> = Vec::new();
    let mut p = vec![0.0; n];

    for k in 0..n.saturating_sub(2) {
        let m = n - k - 1;
        let off = k + 1;
        let mut v: Vec<f64> = (0..m).map(|i| a[(off + i) * n + k]).collect();
        let x0 = v[0];
        let tail: f64 = v[1..].iter().map(|x| x * x).sum();
        if tail == 0.0 {
            e[k] = x0;
            continue;
        }
        let norm = (x0 * x0 + tail).sqrt();
        let alpha = if x0 >= 0.0 { -norm } else { norm };
        v[0] = x0 - alpha;
        let beta = 2.0 / (v[0] * v[0] + tail);
        e[k] = alpha;

        // p = beta * A22 v
        for i in 0..m {
            let row = &a[(off + i) * n + off..(off + i) * n + n];
            p[i] = beta * row.iter().zip(&v).map(|(x, y)| x * y).sum::<f64>();
        }
        let kk = 0.5 * beta * p[..m].iter().zip(&v).map(|(x, y)| x * y).sum::<f64>();
        for i in 0..m {
            p[i] -= kk * v[i];
        }
        // A22 -= v w^T + w v^T, with w = p
        for i in 0..m {
            let (vi, wi) = (v[i], p[i]);
            let row = &mut a[(off + i) * n + off..(off + i) * n + n];
            for ((x, vj), wj) in row.iter_mut().zip(&v).zip(&p[..m]) {
                *x -= vi * wj + wi * vj;
            }
        }
        if want_q {
            reflectors.push((off, beta, v));
        }
    }
    for k in 0..n {
        d[k] = a[k * n + k];
    }
    if n >= 2 {
        e[n - 2] = a[(n - 1) * n + n - 2];
    }
    e[n - 1] = 0.0;

    let q = want_q.then(|| {
        let mut q = vec![0.0; n * n];
        for i in 0..n {
            q[i * n + i] = 1.0;
        }
        let mut dots = vec![0.0; n];
        for (off, beta, v) in reflectors.iter().rev() {
            // Q[off.., :] -= beta v (v^T Q[off.., :])
            dots.iter_mut().for_each(|x| *x = 0.0);
            for (i, vi) in v.iter().enumerate() {
                let row = &q[(off + i) * n..(off + i + 1) * n];
                for (acc, x) in dots.iter_mut().zip(row) {
                    *acc += vi * x;
                }
            }
            for (i, vi) in v.iter().enumerate() {
                let s = beta * vi;
                let row = &mut q[(off + i) * n..(off + i + 1) * n];
                for (x, dj) in row.iter_mut().zip(&dots) {
                    *x -= s * dj;
                }
            }
        }
        q
    });
    (d, e, q)
}

/// Implicit QL on the tridiagonal `(d, e)`, rotating the columns of `z`
/// when present. Eigenvalues are left unsorted in `d`.
fn tridiagonal_ql(d: &mut [f64], e: &mut [f64], mut z: Option<&mut [f64]>) -> Result<()> {
    let n = d.len();
    let max_sweeps = 30 * n.max(1);
    let mut sweeps = 0;
    for l in 0..n {
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd || e[m].abs() < f64::MIN_POSITIVE {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > max_sweeps {
                return Err(Error::Domain(format!(
                    "tridiagonal QL did not converge within {max_sweeps} sweeps"
                )));
            }
            // Wilkinson shift from the leading 2x2 block.
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(z) = z.as_deref_mut() {
                    for k in 0..n {
                        let zk = &mut z[k * n..(k + 1) * n];
                        let f = zk[i + 1];
                        zk[i + 1] = s * zk[i] + c * f;
                        zk[i] = c * zk[i] - s * f;
                    }
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

pub(crate) fn decompose(matrix: &[f64], n: usize, want_vectors: bool) -> Result<Decomposition> {
    ensure!(n >= 1, Size, "empty matrix");
    ensure!(
        matrix.len() == n * n,
        Size,
        "expected {} entries, got {}",
        n * n,
        matrix.len()
    );
    ensure!(
        matrix.iter().all(|x| x.is_finite()),
        Validation,
        "matrix has non-finite entries"
    );
    let mut a = matrix.to_vec();
    let (mut d, mut e, mut q) = tridiagonalize(&mut a, n, want_vectors);
    tridiagonal_ql(&mut d, &mut e, q.as_deref_mut())?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].total_cmp(&d[j]));
    let values = order.iter().map(|&i| d[i]).collect();
    let vectors = q.map(|q| {
        let mut out = vec![0.0; n * n];
        for r in 0..n {
            for (c, &src) in order.iter().enumerate() {
                out[r * n + c] = q[r * n + src];
            }
        }
        out
    });
    Ok(Decomposition { values, vectors })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reconstruct(values: &[f64], q: &[f64], n: usize) -> Vec<f64> {
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] = (0..n).map(|k| q[i * n + k] * values[k] * q[j * n + k]).sum();
            }
        }
        out
    }

    #[test]
    fn small_analytic_cases() {
        let d = decompose(&[0.0, 1.0, 1.0, 0.0], 2, false).unwrap();
        assert!((d.values[0] + 1.0).abs() < 1e-15 && (d.values[1] - 1.0).abs() < 1e-15);
        let d = decompose(&[2.0, 1.0, 1.0, 2.0], 2, false).unwrap();
        assert!((d.values[0] - 1.0).abs() < 1e-15 && (d.values[1] - 3.0).abs() < 1e-15);
        let d = decompose(&[3.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 2.0], 3, false).unwrap();
        assert_eq!(d.values, vec![1.0, 2.0, 3.0]);
        let d = decompose(&[7.5], 1, true).unwrap();
        assert_eq!(d.values, vec![7.5]);
        assert_eq!(d.vectors.unwrap(), vec![1.0]);
    }

    #[test]
    fn tridiagonal_input_and_repeated_eigenvalues() {
        // 3x3 path graph: eigenvalues -sqrt2, 0, sqrt2
        let a = [0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0];
        let d = decompose(&a, 3, true).unwrap();
        let s = 2f64.sqrt();
        for (x, y) in d.values.iter().zip([-s, 0.0, s]) {
            assert!((x - y).abs() < 1e-14);
        }
        // all-ones 4x4: eigenvalues 0,0,0,4
        let d = decompose(&[1.0; 16], 4, true).unwrap();
        assert!(d.values[..3].iter().all(|x| x.abs() < 1e-14));
        assert!((d.values[3] - 4.0).abs() < 1e-14);
        let r = reconstruct(&d.values, d.vectors.as_ref().unwrap(), 4);
        assert!(r.iter().all(|x| (x - 1.0).abs() < 1e-14));
    }

    #[test]
    fn vectors_orthonormal_and_values_match_values_only_path() {
        let n = 23;
        let mut state = 1u64;
        let mut next = || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let v = next();
                a[i * n + j] = v;
                a[j * n + i] = v;
            }
        }
        let full = decompose(&a, n, true).unwrap();
        let vals = decompose(&a, n, false).unwrap();
        assert_eq!(full.values, vals.values);
        let q = full.vectors.unwrap();
        for c1 in 0..n {
            for c2 in 0..n {
                let dot: f64 = (0..n).map(|r| q[r * n + c1] * q[r * n + c2]).sum();
                let expect = if c1 == c2 { 1.0 } else { 0.0 };
                assert!((dot - expect).abs() < 1e-13);
            }
        }
        let r = reconstruct(&full.values, &q, n);
        assert!(r.iter().zip(&a).all(|(x, y)| (x - y).abs() < 1e-13));
    }

    #[test]
    fn rejects_non_finite() {
        assert!(decompose(&[f64::NAN], 1, false).is_err());
        assert!(decompose(&[1.0, 2.0], 1, false).is_err());
    }
}
