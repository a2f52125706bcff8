//! Spectral radii of nonnegative matrices.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Above this size the dense eigensolver gives way to power iteration.
pub const DENSE_LIMIT: usize = 512;
pub const POWER_TOL: f64 = 1e-12;
pub const POWER_MAX_ITERS: usize = 1_000_000;
pub(crate) const SCHUR_MAX_ITERS: usize = 10_000;
const JACOBI_MAX_SWEEPS: usize = 100;

/// Spectral radius of a square matrix: dense eigenvalues up to
/// [`DENSE_LIMIT`], shifted power iteration beyond.
pub fn spectral_radius(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    if m.nrows() <= DENSE_LIMIT {
        dense_spectral_radius(m)
    } else {
        perron_power(m)
    }
}

/// Largest eigenvalue modulus from a real Schur decomposition; falls back to
/// power iteration if the decomposition does not converge.
pub fn dense_spectral_radius(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 1 {
        return m[(0, 0)].abs();
    }
    if m.iter().all(|&x| x == 0.0) {
        return 0.0;
    }
    match nalgebra::Schur::try_new(m.clone(), f64::EPSILON, SCHUR_MAX_ITERS) {
        Some(schur) => schur
            .complex_eigenvalues()
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max),
        None => perron_power(m),
    }
}

/// Perron root of a nonnegative matrix by power iteration on `M + I`.
///
/// The shift makes every irreducible block primitive, so the iteration
/// converges even on periodic components. The Collatz–Wielandt quotients
/// `min_i (Ax)_i / x_i <= ρ <= max_i (Ax)_i / x_i` bracket the root on the
/// support of the iterate; iteration stops once the bracket is narrower
/// than [`POWER_TOL`] (relative) or the cap is hit.
pub fn perron_power(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    if n == 0 {
        return 0.0;
    }
    let mut shifted = m.clone();
    for i in 0..n {
        shifted[(i, i)] += 1.0;
    }
    let mut x = nalgebra::DVector::from_element(n, 1.0 / n as f64);
    let mut estimate = 0.0;
    for _ in 0..POWER_MAX_ITERS {
        let y = &shifted * &x;
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for i in 0..n {
            if x[i] > 1e-300 {
                let q = y[i] / x[i];
                lo = lo.min(q);
                hi = hi.max(q);
            }
        }
        let norm = y.sum();
        if norm == 0.0 {
            return 0.0;
        }
        x = y / norm;
        estimate = 0.5 * (lo + hi);
        if hi - lo <= POWER_TOL * hi.max(1.0) {
            break;
        }
    }
    (estimate - 1.0).max(0.0)
}

/// Eigenvalues and orthonormal eigenvectors (as columns) of a real
/// symmetric matrix. The library solver is accepted only when its output
/// is finite and reproduces the matrix; otherwise cyclic Jacobi rotations
/// are used.
pub fn symmetric_eigen(m: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let n = m.nrows();
    if n == 0 {
        return (DVector::zeros(0), DMatrix::zeros(0, 0));
    }
    let sym = (m + m.transpose()) * 0.5;
    let eig = sym.clone().symmetric_eigen();
    let finite = eig
        .eigenvalues
        .iter()
        .chain(eig.eigenvectors.iter())
        .all(|x| x.is_finite());
    if finite {
        let back = &eig.eigenvectors
            * DMatrix::from_diagonal(&eig.eigenvalues)
            * eig.eigenvectors.transpose();
        if (back - &sym).norm() <= 1e-9 * (1.0 + sym.norm()) {
            return (eig.eigenvalues, eig.eigenvectors);
        }
    }
    jacobi_eigen(sym)
}

fn jacobi_eigen(mut a: DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let n = a.nrows();
    let mut v = DMatrix::identity(n, n);
    let total = a.norm_squared();
    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|(i, j)| i != j)
            .map(|(i, j)| a[(i, j)].powi(2))
            .sum();
        if off <= 1e-30 * total.max(f64::MIN_POSITIVE) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    (a.diagonal(), v)
}

/// Eigenvalues of a complex Hermitian matrix, each once, with unit
/// eigenvectors as columns.
pub fn hermitian_eigen(m: &DMatrix<Complex64>) -> (DVector<f64>, DMatrix<Complex64>) {
    let n = m.nrows();
    // [[A, -B], [B, A]] carries every eigenvalue twice, with eigenvectors
    // (x, y) and (-y, x) for the complex eigenvector x + iy.
    let real = DMatrix::from_fn(2 * n, 2 * n, |i, j| {
        let z = m[(i % n, j % n)];
        match (i < n, j < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    });
    let (vals, vecs) = symmetric_eigen(&real);
    let mut order: Vec<usize> = (0..2 * n).collect();
    order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
    let mut values: Vec<f64> = Vec::with_capacity(n);
    let mut vectors: Vec<DVector<Complex64>> = Vec::with_capacity(n);
    for k in order {
        let x = DVector::from_fn(n, |i, _| Complex64::new(vecs[(i, k)], vecs[(n + i, k)]));
        // Keep x unless it lies in the span of the vectors kept for this eigenvalue.
        let mut r = x;
        for (lam, w) in values.iter().zip(&vectors) {
            if (lam - vals[k]).abs() <= 1e-8 * (1.0 + vals[k].abs()) {
                let proj = w.dotc(&r);
                r -= w * proj;
            }
        }
        let norm = r.norm();
        if norm > 0.5 && values.len() < n {
            values.push(vals[k]);
            vectors.push(r / Complex64::new(norm, 0.0));
        }
    }
    let mat = DMatrix::from_columns(&vectors);
    (DVector::from_vec(values), mat)
}
