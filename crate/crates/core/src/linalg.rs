//! Small dense complex/real helpers shared by the model, the schemes and the
//! conic solver.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
#[cfg(not(feature = "std"))]
use num_traits::Float;

pub use num_complex::Complex64;

pub type CVector = DVector<Complex64>;
pub type CMatrix = DMatrix<Complex64>;
pub type RMatrix = DMatrix<f64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `h h^H`.
pub fn outer(h: &CVector) -> CMatrix {
    h * h.adjoint()
}

/// `h^H v`.
pub fn inner(h: &CVector, v: &CVector) -> Complex64 {
    h.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum()
}

/// Real part of `v^H A v`.
pub fn quad_form(a: &CMatrix, v: &CVector) -> f64 {
    let av = a * v;
    inner(v, &av).re
}

pub fn norm_sqr(v: &CVector) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

pub fn frobenius(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest elementwise deviation from Hermitian symmetry.
pub fn hermitian_defect(a: &CMatrix) -> f64 {
    let n = a.nrows();
    if a.ncols() != n {
        return f64::INFINITY;
    }
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in 0..=i {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn is_hermitian(a: &CMatrix, tol: f64) -> bool {
    a.is_square() && hermitian_defect(a) <= tol
}

/// Symmetrizes `(A + A^H) / 2`.
pub fn hermitian_part(a: &CMatrix) -> CMatrix {
    (a + a.adjoint()).scale(0.5)
}

/// Eigenpairs of a Hermitian matrix sorted by descending eigenvalue.
pub fn eigh_desc(a: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = a.nrows();
    let eig = SymmetricEigen::new(hermitian_part(a));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        eig.eigenvalues[j]
            .partial_cmp(&eig.eigenvalues[i])
            .unwrap_or(core::cmp::Ordering::Equal)
    });
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

pub fn min_eigenvalue(a: &CMatrix) -> f64 {
    if a.nrows() == 0 {
        return 0.0;
    }
    let eig = SymmetricEigen::new(hermitian_part(a));
    eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
}

pub fn max_eigenvalue(a: &CMatrix) -> f64 {
    if a.nrows() == 0 {
        return 0.0;
    }
    let eig = SymmetricEigen::new(hermitian_part(a));
    eig.eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

pub fn min_eigenvalue_real(a: &RMatrix) -> f64 {
    if a.nrows() == 0 {
        return 0.0;
    }
    let sym = (a + a.transpose()).scale(0.5);
    let eig = SymmetricEigen::new(sym);
    eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Rotates `v` by a global phase so that its largest-magnitude entry is real
/// and positive.
pub fn normalize_phase(v: &mut CVector) {
    let mut best = 0usize;
    let mut best_mag = -1.0;
    for (i, z) in v.iter().enumerate() {
        // strict comparison keeps the first index on ties
        if z.norm() > best_mag * (1.0 + 1e-12) {
            best_mag = z.norm();
            best = i;
        }
    }
    if best_mag <= 0.0 {
        return;
    }
    let phase = v[best].conj() / v[best].norm();
    for z in v.iter_mut() {
        *z *= phase;
    }
}

/// Unitary matrix whose first column is `u / ||u||`, built from a Householder
/// reflector. The remaining columns are an orthonormal basis of the
/// orthogonal complement of `u`. Returns the identity for a zero vector.
pub fn unitary_with_first_column(u: &CVector) -> CMatrix {
    let n = u.len();
    let norm = norm_sqr(u).sqrt();
    if n == 0 || norm == 0.0 {
        return CMatrix::identity(n, n);
    }
    let alpha = if u[0].norm() > 0.0 { u[0] / u[0].norm() } else { ONE };
    let mut w = u.clone();
    w[0] += alpha * norm;
    let ww = norm_sqr(&w);
    let mut h = CMatrix::identity(n, n);
    if ww > 0.0 {
        h -= (&w * w.adjoint()).scale(2.0 / ww);
    }
    // the reflector's first column is u/||u|| up to a phase
    let first = h.column(0).clone_owned();
    let target = u.unscale(norm);
    let ph = inner(&first, &target);
    let ph = if ph.norm() > 0.0 { ph / ph.norm() } else { ONE };
    let mut col0 = first * ph;
    // remove rounding drift
    let nrm = norm_sqr(&col0).sqrt();
    col0.unscale_mut(nrm);
    h.set_column(0, &col0);
    h
}

/// Orthonormal basis (as columns) of the complement of `u`.
pub fn null_space_basis(u: &CVector) -> CMatrix {
    let q = unitary_with_first_column(u);
    let n = u.len();
    if n <= 1 {
        return CMatrix::zeros(n, 0);
    }
    q.columns(1, n - 1).clone_owned()
}

/// Projects `v` onto the orthogonal complement of `u`.
pub fn project_out(v: &CVector, u: &CVector) -> CVector {
    let uu = norm_sqr(u);
    if uu == 0.0 {
        return v.clone();
    }
    let coeff = inner(u, v) / uu;
    v - u * coeff
}

/// Dense Cholesky factorization of a symmetric positive definite matrix
/// stored row-major in the lower triangle. The factor overwrites the lower
/// triangle. Returns `false` if a nonpositive pivot is met.
pub fn cholesky_in_place(a: &mut [f64], n: usize) -> bool {
    for i in 0..n {
        let (head, tail) = a.split_at_mut(i * n);
        let row_i = &mut tail[..n];
        for j in 0..i {
            let row_j = &head[j * n..j * n + j + 1];
            let s = row_i[j] - dot(&row_i[..j], &row_j[..j]);
            row_i[j] = s / row_j[j];
        }
        let d = row_i[i] - dot(&row_i[..i], &row_i[..i]);
        if !(d > 0.0) || !d.is_finite() {
            return false;
        }
        row_i[i] = d.sqrt();
    }
    true
}

/// Solves `L L^T x = b` in place with the factor from [`cholesky_in_place`].
pub fn cholesky_solve(l: &[f64], n: usize, b: &mut [f64]) {
    for i in 0..n {
        let row = &l[i * n..i * n + i];
        let s = b[i] - dot(row, &b[..i]);
        b[i] = s / l[i * n + i];
    }
    for i in (0..n).rev() {
        let mut s = b[i];
        for k in i + 1..n {
            s -= l[k * n + i] * b[k];
        }
        b[i] = s / l[i * n + i];
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().min(b.len());
    let (a, b) = (&a[..n], &b[..n]);
    let mut acc = [0.0f64; 8];
    let chunks = n / 8;
    for k in 0..chunks {
        let base = k * 8;
        for l in 0..8 {
            acc[l] += a[base + l] * b[base + l];
        }
    }
    let mut s = 0.0;
    for k in chunks * 8..n {
        s += a[k] * b[k];
    }
    s + ((acc[0] + acc[4]) + (acc[1] + acc[5])) + ((acc[2] + acc[6]) + (acc[3] + acc[7]))
}
