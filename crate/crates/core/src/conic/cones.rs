//! Symmetric cones used by the interior-point solver: zero, nonnegative
//! orthant, second-order and complex Hermitian PSD. A Hermitian block of
//! side `n` is stored as `hvec`: column by column, the diagonal entry
//! followed by `√2·Re` and `√2·Im` of each entry below it, so the Euclidean
//! inner product of two `hvec`s equals `Tr(AB)`.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{Cholesky, SymmetricEigen, SVD};
use num_complex::Complex64;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::linalg::CMatrix;

const SQRT2: f64 = core::f64::consts::SQRT_2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Cone {
    Zero(usize),
    NonNeg(usize),
    Soc(usize),
    /// Hermitian PSD of the given side.
    Psd(usize),
}

impl Cone {
    pub fn dim(&self) -> usize {
        match *self {
            Cone::Zero(d) | Cone::NonNeg(d) | Cone::Soc(d) => d,
            Cone::Psd(n) => n * n,
        }
    }

    pub fn degree(&self) -> usize {
        match *self {
            Cone::Zero(_) => 0,
            Cone::NonNeg(d) => d,
            Cone::Soc(_) => 1,
            Cone::Psd(n) => n,
        }
    }

    pub fn identity(&self, out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        match *self {
            Cone::Zero(_) => {}
            Cone::NonNeg(_) => out.iter_mut().for_each(|v| *v = 1.0),
            Cone::Soc(_) => out[0] = 1.0,
            Cone::Psd(n) => {
                for i in 0..n {
                    out[hvec_diag(n, i)] = 1.0;
                }
            }
        }
    }

    /// Smallest "eigenvalue" of `x` in the Jordan-algebra sense.
    pub fn min_eig(&self, x: &[f64]) -> f64 {
        match *self {
            Cone::Zero(_) => 0.0,
            Cone::NonNeg(_) => x.iter().copied().fold(f64::INFINITY, f64::min),
            Cone::Soc(_) => x[0] - norm(&x[1..]),
            Cone::Psd(n) => {
                let e = SymmetricEigen::new(hmat(n, x));
                e.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
            }
        }
    }
}

fn col_start(n: usize, c: usize) -> usize {
    c + 2 * c * (n - 1) - c * c.saturating_sub(1)
}

/// Position of diagonal entry `(i, i)` in `hvec`.
pub(crate) fn hvec_diag(n: usize, i: usize) -> usize {
    col_start(n, i)
}

/// Position of `√2·Re X_rc` for `r > c`; the imaginary part follows it.
pub(crate) fn hvec_pair(n: usize, r: usize, c: usize) -> usize {
    debug_assert!(r > c && r < n);
    col_start(n, c) + 1 + 2 * (r - c - 1)
}

pub(crate) fn hmat(n: usize, x: &[f64]) -> CMatrix {
    let mut a = CMatrix::zeros(n, n);
    for c in 0..n {
        a[(c, c)] = Complex64::new(x[hvec_diag(n, c)], 0.0);
        for r in c + 1..n {
            let k = hvec_pair(n, r, c);
            let z = Complex64::new(x[k], x[k + 1]) / SQRT2;
            a[(r, c)] = z;
            a[(c, r)] = z.conj();
        }
    }
    a
}

/// `hvec` of the Hermitian part of `a`.
pub(crate) fn hvec_into(a: &CMatrix, out: &mut [f64]) {
    let n = a.nrows();
    for c in 0..n {
        out[hvec_diag(n, c)] = a[(c, c)].re;
        for r in c + 1..n {
            let z = (a[(r, c)] + a[(c, r)].conj()) * (0.5 * SQRT2);
            let k = hvec_pair(n, r, c);
            out[k] = z.re;
            out[k + 1] = z.im;
        }
    }
}

pub(crate) fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    crate::linalg::dot(a, b)
}

/// `x0² − ||x1||²` computed as a product of sums for accuracy near the
/// boundary.
fn soc_jdet(x: &[f64]) -> f64 {
    let n1 = norm(&x[1..]);
    (x[0] - n1) * (x[0] + n1)
}

/// Nesterov–Todd scaling `W` with `W z = W^{-T} s = λ`. For the PSD cone
/// `W(Y) = R^H Y R`, and `wm = R R^H` is the scaling point with
/// `wm Z wm = S`.
#[derive(Debug, Clone)]
pub(crate) enum Scaling {
    Zero,
    NonNeg { w: Vec<f64> },
    Soc { eta: f64, w: Vec<f64> },
    Psd { n: usize, r: CMatrix, rti: CMatrix, lam: Vec<f64>, wm: CMatrix },
}

impl Scaling {
    pub fn identity(cone: &Cone) -> Scaling {
        match *cone {
            Cone::Zero(_) => Scaling::Zero,
            Cone::NonNeg(d) => Scaling::NonNeg { w: vec![1.0; d] },
            Cone::Soc(d) => {
                let mut w = vec![0.0; d];
                w[0] = 1.0;
                Scaling::Soc { eta: 1.0, w }
            }
            Cone::Psd(n) => {
                let eye = CMatrix::identity(n, n);
                Scaling::Psd { n, r: eye.clone(), rti: eye, lam: vec![1.0; n], wm: CMatrix::identity(n, n) }
            }
        }
    }

    /// Returns `None` when `s` or `z` is not strictly interior.
    pub fn nt(cone: &Cone, s: &[f64], z: &[f64]) -> Option<Scaling> {
        match *cone {
            Cone::Zero(_) => Some(Scaling::Zero),
            Cone::NonNeg(_) => {
                let mut w = Vec::with_capacity(s.len());
                for (&si, &zi) in s.iter().zip(z) {
                    if !(si > 0.0 && zi > 0.0) {
                        return None;
                    }
                    w.push((si / zi).sqrt());
                }
                Some(Scaling::NonNeg { w })
            }
            Cone::Soc(d) => {
                let sj = soc_jdet(s);
                let zj = soc_jdet(z);
                if !(sj > 0.0 && zj > 0.0 && s[0] > 0.0 && z[0] > 0.0) {
                    return None;
                }
                let (sn, zn) = (sj.sqrt(), zj.sqrt());
                let sb: Vec<f64> = s.iter().map(|v| v / sn).collect();
                let zb: Vec<f64> = z.iter().map(|v| v / zn).collect();
                let gamma = ((1.0 + dot(&sb, &zb)) / 2.0).sqrt();
                let mut w = vec![0.0; d];
                w[0] = (sb[0] + zb[0]) / (2.0 * gamma);
                for k in 1..d {
                    w[k] = (sb[k] - zb[k]) / (2.0 * gamma);
                }
                let eta = (sn / zn).sqrt();
                Some(Scaling::Soc { eta, w })
            }
            Cone::Psd(n) => {
                let ls = Cholesky::new(hmat(n, s))?.unpack();
                let lz = Cholesky::new(hmat(n, z))?.unpack();
                let prod = lz.adjoint() * &ls;
                let svd = SVD::new(prod, true, true);
                let u = svd.u?;
                let vt = svd.v_t?;
                let lam: Vec<f64> = svd.singular_values.iter().copied().collect();
                if lam.iter().any(|&l| !(l > 0.0) || !l.is_finite()) {
                    return None;
                }
                let mut r = ls * vt.adjoint();
                let mut rti = lz * u;
                for (k, &l) in lam.iter().enumerate() {
                    let f = l.sqrt();
                    r.column_mut(k).unscale_mut(f);
                    rti.column_mut(k).unscale_mut(f);
                }
                let wm = &r * r.adjoint();
                Some(Scaling::Psd { n, r, rti, lam, wm })
            }
        }
    }

    /// Scaled point `λ = W z`.
    pub fn lambda(&self, z: &[f64], out: &mut [f64]) {
        match self {
            Scaling::Zero => {}
            Scaling::Psd { n, lam, .. } => {
                out.iter_mut().for_each(|v| *v = 0.0);
                for i in 0..*n {
                    out[hvec_diag(*n, i)] = lam[i];
                }
            }
            _ => self.apply_w(z, out),
        }
    }

    /// `W y`.
    pub fn apply_w(&self, y: &[f64], out: &mut [f64]) {
        match self {
            Scaling::Zero => {}
            Scaling::NonNeg { w } => {
                for k in 0..w.len() {
                    out[k] = w[k] * y[k];
                }
            }
            Scaling::Soc { eta, w } => soc_wbar(w, y, out, false, *eta),
            Scaling::Psd { n, r, .. } => hvec_into(&(r.adjoint() * hmat(*n, y) * r), out),
        }
    }

    /// `W^T y`.
    pub fn apply_wt(&self, y: &[f64], out: &mut [f64]) {
        match self {
            Scaling::Psd { n, r, .. } => hvec_into(&(r * hmat(*n, y) * r.adjoint()), out),
            _ => self.apply_w(y, out),
        }
    }

    /// `W^{-1} y`.
    pub fn apply_winv(&self, y: &[f64], out: &mut [f64]) {
        match self {
            Scaling::Zero => {}
            Scaling::NonNeg { w } => {
                for k in 0..w.len() {
                    out[k] = y[k] / w[k];
                }
            }
            Scaling::Soc { eta, w } => soc_wbar(w, y, out, true, 1.0 / *eta),
            Scaling::Psd { n, rti, .. } => hvec_into(&(rti * hmat(*n, y) * rti.adjoint()), out),
        }
    }

    /// `W^{-T} y`.
    pub fn apply_wit(&self, y: &[f64], out: &mut [f64]) {
        match self {
            Scaling::Psd { n, rti, .. } => hvec_into(&(rti.adjoint() * hmat(*n, y) * rti), out),
            _ => self.apply_winv(y, out),
        }
    }

    /// `H y = W^T W y`.
    pub fn apply_h(&self, y: &[f64], out: &mut [f64]) {
        match self {
            Scaling::Psd { n, wm, .. } => hvec_into(&(wm * hmat(*n, y) * wm), out),
            _ => {
                let mut tmp = vec![0.0; y.len()];
                self.apply_w(y, &mut tmp);
                self.apply_wt(&tmp, out);
            }
        }
    }

    /// `H^{-1} y = W^{-1} W^{-T} y`.
    #[cfg(test)]
    pub fn apply_hinv(&self, y: &[f64], out: &mut [f64]) {
        let mut tmp = vec![0.0; y.len()];
        self.apply_wit(y, &mut tmp);
        self.apply_winv(&tmp, out);
    }
}

/// Applies `eta · W̄` (or `eta · W̄^{-1}` when `inverse`) for the SOC scaling
/// `W̄ = [[w0, w1'], [w1, I + w1 w1'/(1 + w0)]]`.
fn soc_wbar(w: &[f64], y: &[f64], out: &mut [f64], inverse: bool, eta: f64) {
    let d = w.len();
    let sgn = if inverse { -1.0 } else { 1.0 };
    let w1y1 = dot(&w[1..], &y[1..]);
    out[0] = eta * (w[0] * y[0] + sgn * w1y1);
    let coef = sgn * y[0] + w1y1 / (1.0 + w[0]);
    for k in 1..d {
        out[k] = eta * (y[k] + coef * w[k]);
    }
}

/// Jordan product `u ∘ v`.
pub(crate) fn jordan_prod(cone: &Cone, u: &[f64], v: &[f64], out: &mut [f64]) {
    match *cone {
        Cone::Zero(_) => {}
        Cone::NonNeg(_) => {
            for k in 0..u.len() {
                out[k] = u[k] * v[k];
            }
        }
        Cone::Soc(d) => {
            out[0] = dot(u, v);
            for k in 1..d {
                out[k] = u[0] * v[k] + v[0] * u[k];
            }
        }
        Cone::Psd(n) => {
            let (a, b) = (hmat(n, u), hmat(n, v));
            let p = &a * &b;
            hvec_into(&p, out);
        }
    }
}

/// Solves `λ ∘ x = d` for `x`, with `λ` the scaled point (diagonal for PSD).
pub(crate) fn jordan_div(cone: &Cone, lam: &[f64], d: &[f64], out: &mut [f64]) {
    match *cone {
        Cone::Zero(_) => {}
        Cone::NonNeg(_) => {
            for k in 0..lam.len() {
                out[k] = d[k] / lam[k];
            }
        }
        Cone::Soc(dim) => {
            let l0 = lam[0];
            let det = soc_jdet(lam);
            let x0 = (l0 * d[0] - dot(&lam[1..], &d[1..])) / det;
            out[0] = x0;
            for k in 1..dim {
                out[k] = (d[k] - x0 * lam[k]) / l0;
            }
        }
        Cone::Psd(n) => {
            for c in 0..n {
                let lc = lam[hvec_diag(n, c)];
                let k = hvec_diag(n, c);
                out[k] = d[k] / lc;
                for r in c + 1..n {
                    let f = 2.0 / (lam[hvec_diag(n, r)] + lc);
                    let k = hvec_pair(n, r, c);
                    out[k] = f * d[k];
                    out[k + 1] = f * d[k + 1];
                }
            }
        }
    }
}

/// Largest `α` with `λ + α d` in the cone, for `λ` the scaled point.
pub(crate) fn max_step(cone: &Cone, lam: &[f64], d: &[f64]) -> f64 {
    match *cone {
        Cone::Zero(_) => f64::INFINITY,
        Cone::NonNeg(_) => {
            let mut a = f64::INFINITY;
            for k in 0..lam.len() {
                if d[k] < 0.0 {
                    a = a.min(-lam[k] / d[k]);
                }
            }
            a
        }
        Cone::Soc(_) => {
            let c = soc_jdet(lam);
            let b = lam[0] * d[0] - dot(&lam[1..], &d[1..]);
            let a = d[0] * d[0] - dot(&d[1..], &d[1..]);
            let disc = b * b - a * c;
            if a < 0.0 || (b < 0.0 && disc >= 0.0) {
                c / (-b + disc.max(0.0).sqrt())
            } else {
                f64::INFINITY
            }
        }
        Cone::Psd(n) => {
            let mut dm = hmat(n, d);
            let isq: Vec<f64> = (0..n).map(|i| 1.0 / lam[hvec_diag(n, i)].sqrt()).collect();
            for r in 0..n {
                for c in 0..n {
                    dm[(r, c)] *= isq[r] * isq[c];
                }
            }
            let e = SymmetricEigen::new(dm);
            let lo = e.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
            if lo < 0.0 {
                -1.0 / lo
            } else {
                f64::INFINITY
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    #[test]
    fn hvec_positions_tile_the_vector() {
        for n in 1..6 {
            let mut seen = vec![false; n * n];
            for col in 0..n {
                seen[hvec_diag(n, col)] = true;
                for r in col + 1..n {
                    let k = hvec_pair(n, r, col);
                    assert!(!seen[k] && !seen[k + 1]);
                    seen[k] = true;
                    seen[k + 1] = true;
                }
            }
            assert!(seen.iter().all(|&b| b));
        }
    }

    #[test]
    fn hvec_preserves_trace_inner_product() {
        let n = 3;
        let a: Vec<f64> = (0..9).map(|k| k as f64 * 0.3 - 0.4).collect();
        let b: Vec<f64> = (0..9).map(|k| (k as f64).sin()).collect();
        let (am, bm) = (hmat(n, &a), hmat(n, &b));
        let direct = (&am * &bm).trace();
        assert!((dot(&a, &b) - direct.re).abs() < 1e-12);
        assert!(direct.im.abs() < 1e-12);
        let mut back = vec![0.0; 9];
        hvec_into(&am, &mut back);
        for k in 0..9 {
            assert!((back[k] - a[k]).abs() < 1e-14);
        }
    }

    fn check_nt(cone: Cone, s: &[f64], z: &[f64]) {
        let w = Scaling::nt(&cone, s, z).unwrap();
        let n = s.len();
        let (mut wz, mut wis, mut lam) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
        w.apply_w(z, &mut wz);
        w.apply_wit(s, &mut wis);
        w.lambda(z, &mut lam);
        for k in 0..n {
            assert!((wz[k] - wis[k]).abs() < 1e-10, "{k}: {wz:?} {wis:?}");
            assert!((wz[k] - lam[k]).abs() < 1e-10);
        }
        let y: Vec<f64> = (0..n).map(|k| (k as f64 + 0.5).cos()).collect();
        let (mut hy, mut back, mut via_w) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
        w.apply_h(&y, &mut hy);
        w.apply_hinv(&hy, &mut back);
        let mut tmp = vec![0.0; n];
        w.apply_w(&y, &mut tmp);
        w.apply_wt(&tmp, &mut via_w);
        for k in 0..n {
            assert!((back[k] - y[k]).abs() < 1e-9);
            assert!((hy[k] - via_w[k]).abs() < 1e-9);
        }
    }

    fn hermitian_pd(n: usize, shift: f64, phase: f64) -> Vec<f64> {
        let g = CMatrix::from_fn(n, n, |i, j| c(((i * 3 + j) as f64 + phase).sin(), ((i + 2 * j) as f64 * phase).cos()));
        let a = &g * g.adjoint() + CMatrix::identity(n, n) * c(shift, 0.0);
        let mut out = vec![0.0; n * n];
        hvec_into(&a, &mut out);
        out
    }

    #[test]
    fn nt_scaling_maps_both_points_to_lambda() {
        check_nt(Cone::NonNeg(3), &[1.0, 2.0, 0.5], &[0.3, 4.0, 1.0]);
        check_nt(Cone::Soc(3), &[3.0, 1.0, -1.5], &[2.0, -0.5, 0.7]);
        check_nt(Cone::Psd(3), &hermitian_pd(3, 0.5, 0.3), &hermitian_pd(3, 0.2, 1.1));
    }

    #[test]
    fn jordan_division_inverts_product() {
        let cases: [(Cone, &[f64], &[f64]); 3] = [
            (Cone::NonNeg(3), &[1.0, 2.0, 3.0], &[0.3, -1.0, 0.8]),
            (Cone::Soc(3), &[2.0, 0.5, -0.3], &[0.3, -1.0, 0.8]),
            (Cone::Psd(2), &[1.5, 0.0, 0.0, 0.7], &[0.3, -1.0, 0.4, 0.8]),
        ];
        for (cone, lam, d) in cases {
            let mut x = vec![0.0; d.len()];
            jordan_div(&cone, lam, d, &mut x);
            let mut back = vec![0.0; d.len()];
            jordan_prod(&cone, lam, &x, &mut back);
            for k in 0..d.len() {
                assert!((back[k] - d[k]).abs() < 1e-12, "{cone:?}");
            }
        }
    }

    #[test]
    fn soc_step_hits_boundary() {
        let lam = [2.0, 0.0, 0.0];
        let d = [-1.0, 1.0, 0.0];
        let a = max_step(&Cone::Soc(3), &lam, &d);
        // (2 - a)^2 = a^2  ->  a = 1
        assert!((a - 1.0).abs() < 1e-12);
        assert_eq!(max_step(&Cone::Soc(3), &lam, &[1.0, 0.5, 0.0]), f64::INFINITY);
    }

    #[test]
    fn psd_step_hits_boundary() {
        // λ = I, d = −diag(2, 1): the first eigenvalue reaches zero at α = 1/2
        let a = max_step(&Cone::Psd(2), &[1.0, 0.0, 0.0, 1.0], &[-2.0, 0.0, 0.0, -1.0]);
        assert!((a - 0.5).abs() < 1e-12);
    }
}
