#![allow(dead_code)]

use randskel::rng;
use randskel::DenseMatrix;

pub fn random(rows: usize, cols: usize, seed: u64) -> DenseMatrix {
    rng::gaussian_matrix(rows, cols, 1.0, &mut rng::from_seed(seed))
}

pub fn naive_matmul(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    assert_eq!(a.cols(), b.rows());
    DenseMatrix::from_fn(a.rows(), b.cols(), |i, j| (0..a.cols()).map(|t| a.get(i, t) * b.get(t, j)).sum())
}

pub fn naive_transpose(a: &DenseMatrix) -> DenseMatrix {
    DenseMatrix::from_fn(a.cols(), a.rows(), |i, j| a.get(j, i))
}

pub fn rel_diff(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
    let scale = a.fro_norm().max(b.fro_norm()).max(f64::MIN_POSITIVE);
    a.sub(b).fro_norm() / scale
}

/// Cyclic Jacobi eigensolver for symmetric matrices. Returns eigenvalues
/// in descending order with matching eigenvector columns.
pub fn jacobi_eigh(s: &DenseMatrix) -> (Vec<f64>, DenseMatrix) {
    let n = s.rows();
    let mut a: Vec<Vec<f64>> = (0..n).map(|i| s.row(i).to_vec()).collect();
    let mut v: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| (i == j) as u8 as f64).collect()).collect();
    for _ in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[i][j] * a[i][j]).sum();
        let diag: f64 = (0..n).map(|i| a[i][i] * a[i][i]).sum();
        if off <= 1e-30 * diag.max(f64::MIN_POSITIVE) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q] == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - sn * akq;
                    a[k][q] = sn * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - sn * aqk;
                    a[q][k] = sn * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let (vp, vq) = (row[p], row[q]);
                    row[p] = c * vp - sn * vq;
                    row[q] = sn * vp + c * vq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[j][j].total_cmp(&a[i][i]));
    let vals = order.iter().map(|&i| a[i][i]).collect();
    let vecs = DenseMatrix::from_fn(n, n, |i, j| v[i][order[j]]);
    (vals, vecs)
}

/// Eigenvalues of a symmetric matrix, descending: Householder reduction to
/// tridiagonal form, then implicit QL with Wilkinson shifts.
pub fn sym_eigenvalues(s: &DenseMatrix) -> Vec<f64> {
    let n = s.rows();
    let mut a: Vec<f64> = s.data().to_vec();
    for k in 0..n.saturating_sub(2) {
        let x: Vec<f64> = (k + 1..n).map(|i| a[i * n + k]).collect();
        let nx = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if nx == 0.0 {
            continue;
        }
        let alpha = if x[0] > 0.0 { -nx } else { nx };
        let mut v = x;
        v[0] -= alpha;
        let nv = v.iter().map(|t| t * t).sum::<f64>().sqrt();
        v.iter_mut().for_each(|t| *t /= nv);
        let m = n - k - 1;
        let p: Vec<f64> = (0..m).map(|i| (0..m).map(|j| a[(k + 1 + i) * n + k + 1 + j] * v[j]).sum()).collect();
        let kk: f64 = v.iter().zip(&p).map(|(a, b)| a * b).sum();
        let w: Vec<f64> = p.iter().zip(&v).map(|(p, v)| p - kk * v).collect();
        for i in 0..m {
            for j in 0..m {
                a[(k + 1 + i) * n + k + 1 + j] -= 2.0 * (v[i] * w[j] + w[i] * v[j]);
            }
        }
        for i in k + 1..n {
            a[i * n + k] = 0.0;
            a[k * n + i] = 0.0;
        }
        a[(k + 1) * n + k] = alpha;
        a[k * n + k + 1] = alpha;
    }
    let mut d: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    let mut e: Vec<f64> = (0..n).map(|i| if i + 1 < n { a[(i + 1) * n + i] } else { 0.0 }).collect();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            assert!(iter < 100, "QL iteration did not converge");
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            for i in (l..m).rev() {
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
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d.sort_by(|a, b| b.total_cmp(a));
    d
}

/// Singular values from the eigenvalues of the smaller Gram matrix.
pub fn gram_singular_values(m: &DenseMatrix) -> Vec<f64> {
    let g = if m.rows() >= m.cols() { naive_matmul(&naive_transpose(m), m) } else { naive_matmul(m, &naive_transpose(m)) };
    sym_eigenvalues(&g).into_iter().map(|x| x.max(0.0).sqrt()).collect()
}

/// Gauss-Jordan inverse with full pivoting.
pub fn inverse(a: &DenseMatrix) -> DenseMatrix {
    let n = a.rows();
    assert_eq!(n, a.cols());
    let mut m: Vec<Vec<f64>> = (0..n).map(|i| a.row(i).to_vec()).collect();
    let mut inv: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| (i == j) as u8 as f64).collect()).collect();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs())).unwrap();
        m.swap(c, p);
        inv.swap(c, p);
        let d = m[c][c];
        assert!(d != 0.0, "singular matrix in oracle inverse");
        for j in 0..n {
            m[c][j] /= d;
            inv[c][j] /= d;
        }
        for i in 0..n {
            if i != c {
                let f = m[i][c];
                for j in 0..n {
                    m[i][j] -= f * m[c][j];
                    inv[i][j] -= f * inv[c][j];
                }
            }
        }
    }
    DenseMatrix::from_fn(n, n, |i, j| inv[i][j])
}

/// Pseudo-inverse of a full-column-rank matrix, `(M^T M)^{-1} M^T`.
pub fn pinv_full_column(m: &DenseMatrix) -> DenseMatrix {
    let mt = naive_transpose(m);
    naive_matmul(&inverse(&naive_matmul(&mt, m)), &mt)
}

/// Orthogonal projector onto the column space of a full-column-rank matrix.
pub fn projector(m: &DenseMatrix) -> DenseMatrix {
    naive_matmul(m, &pinv_full_column(m))
}

/// Direct orthonormal discrete Hartley transform.
pub fn direct_dht(x: &[f64]) -> Vec<f64> {
    let m = x.len();
    let s = 1.0 / (m as f64).sqrt();
    (0..m)
        .map(|k| {
            x.iter()
                .enumerate()
                .map(|(j, &v)| {
                    let t = 2.0 * std::f64::consts::PI * ((j * k) % m) as f64 / m as f64;
                    v * (t.cos() + t.sin())
                })
                .sum::<f64>()
                * s
        })
        .collect()
}

/// Sines of canonical angles (ascending) between two full-column-rank
/// matrices from the eigenvalues of `Q_V^T (I - P_U) Q_V`.
pub fn angle_sines_oracle(u: &DenseMatrix, v: &DenseMatrix) -> Vec<f64> {
    let pu = projector(u);
    let pv = projector(v);
    // Nonzero eigenvalues of P_V (I - P_U) P_V are the squared sines.
    let d = u.rows();
    let w = naive_matmul(&naive_matmul(&pv, &DenseMatrix::identity(d).sub(&pu)), &pv);
    let sym = DenseMatrix::from_fn(d, d, |i, j| 0.5 * (w.get(i, j) + w.get(j, i)));
    let (vals, _) = jacobi_eigh(&sym);
    let mut s: Vec<f64> = vals[..v.cols()].iter().map(|x| x.clamp(0.0, 1.0).sqrt()).collect();
    s.reverse();
    s
}

pub fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}
