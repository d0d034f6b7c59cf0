//! Eigenvalues of Hermitian matrices.
//!
//! Small blocks use cyclic Jacobi rotations; larger ones are reduced to
//! tridiagonal form by Householder reflections and finished with implicit
//! QL. Real symmetric input is handled directly. Complex Hermitian input
//! `H = X + iY` is embedded as the real symmetric `[[X, -Y], [Y, X]]`, whose
//! spectrum is that of `H` with every eigenvalue doubled.
//!
//! Exact zeros are exploited first: the matrix is split into the connected
//! components of its nonzero pattern and each block is rotated on its own.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::max_hermitian_deviation;

/// Default off-diagonal Frobenius-norm target.
pub const DEFAULT_TOL: f64 = 1e-12;

/// Inputs further than this from Hermitian are rejected.
pub const HERMITIAN_SLACK: f64 = 1e-10;

const MAX_SWEEPS: usize = 100;

/// Blocks above this size go through the tridiagonal path.
pub const JACOBI_MAX_DIM: usize = 64;

const MAX_QL_ITERATIONS: usize = 60;

/// Ascending eigenvalues of a Hermitian matrix.
///
/// Rotations stop once the off-diagonal Frobenius norm drops below
/// `tol * max(1, ‖m‖_F)`.
pub fn hermitian_eigenvalues(m: &DMatrix<Complex64>, tol: f64) -> Result<Vec<f64>> {
    if m.nrows() != m.ncols() {
        return Err(Error::InvalidFactors(format!(
            "{}x{} matrix is not square",
            m.nrows(),
            m.ncols()
        )));
    }
    let dev = max_hermitian_deviation(m);
    if dev > HERMITIAN_SLACK {
        return Err(Error::NotHermitian(dev));
    }
    let blocks = components(m);
    if blocks.len() == 1 {
        return block_eigenvalues(m, tol);
    }
    let mut eig = Vec::with_capacity(m.nrows());
    for idx in blocks {
        let sub = DMatrix::from_fn(idx.len(), idx.len(), |i, j| m[(idx[i], idx[j])]);
        eig.extend(block_eigenvalues(&sub, tol)?);
    }
    eig.sort_by(f64::total_cmp);
    Ok(eig)
}

/// Index sets of the connected components of the nonzero pattern.
fn components(m: &DMatrix<Complex64>) -> Vec<Vec<usize>> {
    let n = m.nrows();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if m[(i, j)] != Complex64::new(0.0, 0.0) || m[(j, i)] != Complex64::new(0.0, 0.0) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..n {
        let root = find(&mut parent, i);
        groups.entry(root).or_default().push(i);
    }
    groups.into_values().collect()
}

fn block_eigenvalues(m: &DMatrix<Complex64>, tol: f64) -> Result<Vec<f64>> {
    let n = m.nrows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let is_real = m.iter().all(|z| z.im == 0.0);
    if is_real {
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                a[i * n + j] = 0.5 * (m[(i, j)].re + m[(j, i)].re);
            }
        }
        return symmetric_eigenvalues(a, n, tol);
    }

    let n2 = 2 * n;
    let mut a = vec![0.0; n2 * n2];
    for i in 0..n {
        for j in 0..n {
            let h = 0.5 * (m[(i, j)] + m[(j, i)].conj());
            a[i * n2 + j] = h.re;
            a[(i + n) * n2 + j + n] = h.re;
            a[i * n2 + j + n] = -h.im;
            a[(i + n) * n2 + j] = h.im;
        }
    }
    let doubled = symmetric_eigenvalues(a, n2, tol)?;
    Ok(doubled.into_iter().step_by(2).collect())
}

/// Ascending eigenvalues of a real symmetric row-major `n × n` matrix.
pub fn symmetric_eigenvalues(a: Vec<f64>, n: usize, tol: f64) -> Result<Vec<f64>> {
    assert_eq!(a.len(), n * n);
    if n <= JACOBI_MAX_DIM {
        jacobi_eigenvalues(a, n, tol)
    } else {
        tridiagonal_ql_eigenvalues(a, n)
    }
}

/// Cyclic Jacobi. Stops once the off-diagonal Frobenius norm drops below
/// `tol * max(1, ‖a‖_F)`.
pub fn jacobi_eigenvalues(mut a: Vec<f64>, n: usize, tol: f64) -> Result<Vec<f64>> {
    assert_eq!(a.len(), n * n);
    let frob = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let target = tol * frob.max(1.0);
    let target_sq = target * target;

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        if off_diagonal_sq(&a, n) <= target_sq {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq.abs() <= f64::MIN_POSITIVE {
                    continue;
                }
                rotate(&mut a, n, p, q, apq);
            }
        }
    }
    if !converged && off_diagonal_sq(&a, n) > target_sq {
        return Err(Error::EigenNoConvergence(MAX_SWEEPS));
    }

    let mut eig: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    eig.sort_by(f64::total_cmp);
    Ok(eig)
}

/// Householder reduction to tridiagonal form, then implicit QL with
/// Wilkinson-style shifts. Only the lower triangle of `a` is read.
pub fn tridiagonal_ql_eigenvalues(mut a: Vec<f64>, n: usize) -> Result<Vec<f64>> {
    assert_eq!(a.len(), n * n);
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = 0.0;
        let scale: f64 = if l > 0 {
            (0..=l).map(|k| a[i * n + k].abs()).sum()
        } else {
            0.0
        };
        if scale == 0.0 {
            e[i] = a[i * n + l];
        } else {
            for k in 0..=l {
                a[i * n + k] /= scale;
                h += a[i * n + k] * a[i * n + k];
            }
            let f = a[i * n + l];
            let g = if f >= 0.0 { -h.sqrt() } else { h.sqrt() };
            e[i] = scale * g;
            h -= f * g;
            a[i * n + l] = f - g;
            let mut f = 0.0;
            for j in 0..=l {
                let mut g = 0.0;
                for k in 0..=j {
                    g += a[j * n + k] * a[i * n + k];
                }
                for k in j + 1..=l {
                    g += a[k * n + j] * a[i * n + k];
                }
                e[j] = g / h;
                f += e[j] * a[i * n + j];
            }
            let hh = f / (h + h);
            for j in 0..=l {
                let f = a[i * n + j];
                let g = e[j] - hh * f;
                e[j] = g;
                for k in 0..=j {
                    a[j * n + k] -= f * e[k] + g * a[i * n + k];
                }
            }
        }
    }
    for i in 0..n {
        d[i] = a[i * n + i];
    }

    // e[i] now couples d[i] and d[i + 1]
    e.rotate_left(1);
    e[n - 1] = 0.0;
    // couplings below ε‖T‖ are noise from the reduction itself
    let floor = f64::EPSILON * d.iter().zip(&e).map(|(x, y)| x.abs() + y.abs()).fold(0.0, f64::max);
    for l in 0..n {
        let mut iterations = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd || e[m].abs() <= floor {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iterations += 1;
            if iterations > MAX_QL_ITERATIONS {
                return Err(Error::EigenNoConvergence(MAX_QL_ITERATIONS));
            }
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
    d.sort_by(f64::total_cmp);
    Ok(d)
}

fn off_diagonal_sq(a: &[f64], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            s += a[i * n + j] * a[i * n + j];
        }
    }
    2.0 * s
}

/// One similarity rotation zeroing `a[p][q]`.
fn rotate(a: &mut [f64], n: usize, p: usize, q: usize, apq: f64) {
    let app = a[p * n + p];
    let aqq = a[q * n + q];
    let theta = (aqq - app) / (2.0 * apq);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    // rows p and q are contiguous; columns are mirrored afterwards
    let (head, tail) = a.split_at_mut(q * n);
    let row_p = &mut head[p * n..p * n + n];
    let row_q = &mut tail[..n];
    for k in 0..n {
        if k == p || k == q {
            continue;
        }
        let x = row_p[k];
        let y = row_q[k];
        row_p[k] = c * x - s * y;
        row_q[k] = s * x + c * y;
    }
    row_p[p] = app - t * apq;
    row_q[q] = aqq + t * apq;
    row_p[q] = 0.0;
    row_q[p] = 0.0;
    for k in 0..n {
        if k != p && k != q {
            a[k * n + p] = a[p * n + k];
            a[k * n + q] = a[q * n + k];
        }
    }
}
