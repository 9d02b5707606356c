//! Homogeneous self-dual embedding interior-point method with
//! Nesterov–Todd scaling and a Mehrotra predictor-corrector.
//!
//! Standard form: `min c'x  s.t.  Ax + s = b, s ∈ K`, with `K` a product of
//! zero, nonnegative, second-order and PSD cones in that order.

use alloc::vec;
use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use nalgebra::{DMatrix, DVector, Dyn, LU};

use super::cones::{jordan_div, jordan_prod, max_step, Cone, Scaling};
use super::SolveStatus;
use crate::linalg::dot;

pub(crate) struct StandardForm {
    pub n: usize,
    pub cones: Vec<Cone>,
    /// Column-major sparse `A`.
    pub cols: Vec<Vec<(usize, f64)>>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
}

impl StandardForm {
    pub fn m(&self) -> usize {
        self.b.len()
    }

    fn offsets(&self) -> Vec<usize> {
        let mut off = Vec::with_capacity(self.cones.len() + 1);
        let mut o = 0;
        for k in &self.cones {
            off.push(o);
            o += k.dim();
        }
        off.push(o);
        off
    }

    fn mul_a(&self, x: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        for (j, col) in self.cols.iter().enumerate() {
            let xj = x[j];
            if xj != 0.0 {
                for &(i, a) in col {
                    out[i] += a * xj;
                }
            }
        }
    }

    fn mul_at(&self, z: &[f64], out: &mut [f64]) {
        for (j, col) in self.cols.iter().enumerate() {
            out[j] = col.iter().map(|&(i, a)| a * z[i]).sum();
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Settings {
    pub tol: f64,
    pub max_iter: usize,
    /// Extra iterations taken after the tolerance is met, keeping the best
    /// iterate.
    pub polish: usize,
}

pub(crate) struct RawSolution {
    pub status: SolveStatus,
    pub x: Vec<f64>,
    pub z: Vec<f64>,
    pub iterations: usize,
    pub residuals: (f64, f64, f64),
}

struct Equilibration {
    d: Vec<f64>,
    e: Vec<f64>,
    sigma_b: f64,
    sigma_c: f64,
}

/// Ruiz-style scaling `Ã = D A E`, keeping `D` constant on each SOC and PSD
/// block so that cone membership is preserved.
fn equilibrate(p: &StandardForm) -> (StandardForm, Equilibration) {
    let (m, n) = (p.m(), p.n);
    let off = p.offsets();
    let mut d = vec![1.0; m];
    let mut e = vec![1.0; n];
    let mut cols = p.cols.clone();
    for _ in 0..15 {
        // column pass
        for (j, col) in cols.iter_mut().enumerate() {
            let mx = col.iter().fold(0.0_f64, |acc, &(_, a)| acc.max(a.abs()));
            if mx > 0.0 {
                let f = 1.0 / mx.sqrt();
                let f = f.clamp(1e-4, 1e4);
                e[j] *= f;
                col.iter_mut().for_each(|t| t.1 *= f);
            }
        }
        // row pass
        let mut rmax = vec![0.0_f64; m];
        for col in &cols {
            for &(i, a) in col {
                rmax[i] = rmax[i].max(a.abs());
            }
        }
        let mut f = vec![1.0; m];
        for (k, cone) in p.cones.iter().enumerate() {
            let (lo, hi) = (off[k], off[k + 1]);
            match cone {
                Cone::Zero(_) | Cone::NonNeg(_) => {
                    for i in lo..hi {
                        if rmax[i] > 0.0 {
                            f[i] = (1.0 / rmax[i].sqrt()).clamp(1e-4, 1e4);
                        }
                    }
                }
                _ => {
                    let mx = rmax[lo..hi].iter().copied().fold(0.0, f64::max);
                    if mx > 0.0 {
                        let g = (1.0 / mx.sqrt()).clamp(1e-4, 1e4);
                        f[lo..hi].iter_mut().for_each(|v| *v = g);
                    }
                }
            }
        }
        for col in cols.iter_mut() {
            col.iter_mut().for_each(|t| t.1 *= f[t.0]);
        }
        for i in 0..m {
            d[i] *= f[i];
        }
    }
    let b: Vec<f64> = (0..m).map(|i| d[i] * p.b[i]).collect();
    let c: Vec<f64> = (0..n).map(|j| e[j] * p.c[j]).collect();
    let bmax = b.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    let cmax = c.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    let sigma_b = if bmax > 0.0 { 1.0 / bmax } else { 1.0 };
    let sigma_c = if cmax > 0.0 { 1.0 / cmax } else { 1.0 };
    let scaled = StandardForm {
        n,
        cones: p.cones.clone(),
        cols,
        b: b.iter().map(|v| v * sigma_b).collect(),
        c: c.iter().map(|v| v * sigma_c).collect(),
    };
    (scaled, Equilibration { d, e, sigma_b, sigma_c })
}

/// A PSD block of rows. Every hvec position `k` is produced by exactly one
/// parameter `by_pos[k].0` with `s_k = e_k x_j`.
struct PsdRows {
    cone: usize,
    side: usize,
    row0: usize,
    by_pos: Vec<(usize, f64)>,
}

/// KKT solver for `[0 A'; A −H][dx; dz] = [r1; r2]`. The parameters of each
/// PSD block are eliminated in closed form through the block's scaling, and
/// the remaining system over the free variables and non-PSD rows is solved
/// densely.
struct Kkt<'a> {
    p: &'a StandardForm,
    off: Vec<usize>,
    /// Rows before the first PSD block.
    m_l: usize,
    psd: Vec<PsdRows>,
    /// For each parameter: its PSD block and hvec position, if any.
    in_psd: Vec<Option<(usize, usize)>>,
    other: Vec<usize>,
    /// Entries of each non-PSD row on PSD parameters, as `(block, pos, a)`.
    lp_rows: Vec<Vec<(usize, usize, f64)>>,
    /// `G^{-1} a_i` per block for every non-PSD row touching PSD parameters.
    g: Vec<Vec<(usize, Vec<f64>)>>,
    lu: Option<LU<f64, Dyn, Dyn>>,
    scal: Vec<Scaling>,
}

impl<'a> Kkt<'a> {
    fn new(p: &'a StandardForm) -> Self {
        let off = p.offsets();
        let mut m_l = p.m();
        let mut psd = Vec::new();
        for (k, cone) in p.cones.iter().enumerate() {
            if let Cone::Psd(side) = *cone {
                m_l = m_l.min(off[k]);
                psd.push(PsdRows { cone: k, side, row0: off[k], by_pos: vec![(usize::MAX, 0.0); side * side] });
            }
        }
        let mut in_psd = vec![None; p.n];
        let mut other = Vec::new();
        for (j, col) in p.cols.iter().enumerate() {
            let hit = col.iter().find(|t| t.0 >= m_l);
            match hit {
                Some(&(i, a)) => {
                    let b = psd.iter().rposition(|blk| blk.row0 <= i).unwrap();
                    let k = i - psd[b].row0;
                    psd[b].by_pos[k] = (j, -a);
                    in_psd[j] = Some((b, k));
                }
                None => other.push(j),
            }
        }
        let mut lp_rows = vec![Vec::new(); m_l];
        for (j, col) in p.cols.iter().enumerate() {
            if let Some((b, k)) = in_psd[j] {
                for &(i, a) in col {
                    if i < m_l {
                        lp_rows[i].push((b, k, a));
                    }
                }
            }
        }
        Kkt { p, off, m_l, psd, in_psd, other, lp_rows, g: Vec::new(), lu: None, scal: Vec::new() }
    }

    /// `G^{-1} u = E^{-1} H_P E^{-1} u` for block `b`.
    fn ginv(&self, b: usize, u: &[f64]) -> Vec<f64> {
        let blk = &self.psd[b];
        let y: Vec<f64> = u.iter().zip(&blk.by_pos).map(|(v, t)| v / t.1).collect();
        let mut out = vec![0.0; y.len()];
        self.scal[blk.cone].apply_h(&y, &mut out);
        for (v, t) in out.iter_mut().zip(&blk.by_pos) {
            *v /= t.1;
        }
        out
    }

    /// Assembles and factors the reduced system for the scaling `scal`.
    fn factor(&mut self, scal: Vec<Scaling>) -> bool {
        self.scal = scal;
        let p = self.p;
        let (ml, no) = (self.m_l, self.other.len());
        let mut g = Vec::with_capacity(ml);
        for row in &self.lp_rows {
            let mut per: Vec<(usize, Vec<f64>)> = Vec::new();
            for &(b, k, a) in row {
                match per.iter_mut().find(|t| t.0 == b) {
                    Some(t) => t.1[k] += a,
                    None => {
                        let mut u = vec![0.0; self.psd[b].side * self.psd[b].side];
                        u[k] = a;
                        per.push((b, u));
                    }
                }
            }
            for t in per.iter_mut() {
                t.1 = self.ginv(t.0, &t.1);
            }
            g.push(per);
        }
        let dim = no + ml;
        let mut mat = DMatrix::<f64>::zeros(dim, dim);
        // H on the non-PSD cones
        for (k, cone) in p.cones.iter().enumerate() {
            let (lo, hi) = (self.off[k], self.off[k + 1]);
            if hi > ml {
                break;
            }
            match (cone, &self.scal[k]) {
                (Cone::Zero(_), _) => {}
                (Cone::NonNeg(_), Scaling::NonNeg { w }) => {
                    for i in lo..hi {
                        mat[(no + i, no + i)] -= w[i - lo] * w[i - lo];
                    }
                }
                (Cone::Soc(d), sc) => {
                    let mut e = vec![0.0; *d];
                    let mut out = vec![0.0; *d];
                    for c in 0..*d {
                        e.iter_mut().for_each(|v| *v = 0.0);
                        e[c] = 1.0;
                        sc.apply_h(&e, &mut out);
                        for r in 0..*d {
                            mat[(no + lo + r, no + lo + c)] -= out[r];
                        }
                    }
                }
                _ => return false,
            }
        }
        // A_LP G^{-1} A_LP'
        for i in 0..ml {
            for &(b, k, a) in &self.lp_rows[i] {
                for (i2, per) in g.iter().enumerate() {
                    if let Some(t) = per.iter().find(|t| t.0 == b) {
                        mat[(no + i, no + i2)] -= a * t.1[k];
                    }
                }
            }
        }
        for (oi, &j) in self.other.iter().enumerate() {
            for &(i, a) in &p.cols[j] {
                mat[(no + i, oi)] = a;
                mat[(oi, no + i)] = a;
            }
        }
        for i in 0..no {
            mat[(i, i)] += 1e-14;
        }
        for i in no..dim {
            mat[(i, i)] -= 1e-14 * mat[(i, i)].abs().max(1.0);
        }
        if mat.iter().any(|v| !v.is_finite()) {
            return false;
        }
        self.g = g;
        self.lu = Some(LU::new(mat));
        true
    }

    fn apply_h_all(&self, y: &[f64], out: &mut [f64]) {
        for k in 0..self.p.cones.len() {
            let (lo, hi) = (self.off[k], self.off[k + 1]);
            if let Cone::Zero(_) = self.p.cones[k] {
                out[lo..hi].iter_mut().for_each(|v| *v = 0.0);
                continue;
            }
            self.scal[k].apply_h(&y[lo..hi], &mut out[lo..hi]);
        }
    }

    /// One pass of the block-eliminated solve.
    fn solve_once(&self, r1: &[f64], r2: &[f64], dx: &mut [f64], dz: &mut [f64]) -> bool {
        let Some(lu) = &self.lu else { return false };
        let (ml, no) = (self.m_l, self.other.len());
        // t_P = G^{-1}(r1_P − E' H_P^{-1} r2_P) = E^{-1}(H_P E^{-1} r1_P − r2_P)
        let mut t: Vec<Vec<f64>> = Vec::with_capacity(self.psd.len());
        for (b, blk) in self.psd.iter().enumerate() {
            let d = blk.side * blk.side;
            let u: Vec<f64> = (0..d).map(|k| r1[blk.by_pos[k].0]).collect();
            let mut tb = self.ginv(b, &u);
            for k in 0..d {
                tb[k] -= r2[blk.row0 + k] / blk.by_pos[k].1;
            }
            t.push(tb);
        }
        let mut rhs = DVector::<f64>::zeros(no + ml);
        for (oi, &j) in self.other.iter().enumerate() {
            rhs[oi] = r1[j];
        }
        for i in 0..ml {
            let mut v = r2[i];
            for &(b, k, a) in &self.lp_rows[i] {
                v -= a * t[b][k];
            }
            rhs[no + i] = v;
        }
        let Some(sol) = lu.solve(&rhs) else { return false };
        for (oi, &j) in self.other.iter().enumerate() {
            dx[j] = sol[oi];
        }
        dz[..ml].copy_from_slice(&sol.as_slice()[no..]);
        for i in 0..ml {
            let zi = sol[no + i];
            if zi != 0.0 {
                for (b, gv) in &self.g[i] {
                    for (tk, gk) in t[*b].iter_mut().zip(gv) {
                        *tk -= zi * gk;
                    }
                }
            }
        }
        // dz_P from the x rows of the PSD parameters: −E dz_P + A_LP' dz_L = r1_P
        for blk in &self.psd {
            for k in 0..blk.side * blk.side {
                let (j, e) = blk.by_pos[k];
                dz[blk.row0 + k] = -r1[j] / e;
            }
        }
        for i in 0..ml {
            let zi = sol[no + i];
            for &(b, k, a) in &self.lp_rows[i] {
                let blk = &self.psd[b];
                dz[blk.row0 + k] += a * zi / blk.by_pos[k].1;
            }
        }
        for (b, blk) in self.psd.iter().enumerate() {
            for k in 0..blk.side * blk.side {
                dx[blk.by_pos[k].0] = t[b][k];
            }
        }
        debug_assert!(self.in_psd.len() == dx.len());
        true
    }

    /// Solve with iterative refinement against the exact KKT operator.
    fn solve(&self, r1: &[f64], r2: &[f64], dx: &mut [f64], dz: &mut [f64]) -> bool {
        let p = self.p;
        let (n, m) = (p.n, p.m());
        if !self.solve_once(r1, r2, dx, dz) {
            return false;
        }
        let mut e1 = vec![0.0; n];
        let mut e2 = vec![0.0; m];
        let mut hz = vec![0.0; m];
        let mut cx = vec![0.0; n];
        let mut cz = vec![0.0; m];
        let mut last = f64::INFINITY;
        let scale = 1.0 + inf_norm(r1).max(inf_norm(r2));
        for _ in 0..5 {
            p.mul_at(dz, &mut e1);
            for j in 0..n {
                e1[j] = r1[j] - e1[j];
            }
            self.apply_h_all(dz, &mut hz);
            p.mul_a(dx, &mut e2);
            for i in 0..m {
                e2[i] = r2[i] - (e2[i] - hz[i]);
            }
            let res = inf_norm(&e1).max(inf_norm(&e2));
            if res <= 1e-15 * scale || res >= 0.5 * last {
                break;
            }
            last = res;
            if !self.solve_once(&e1, &e2, &mut cx, &mut cz) {
                break;
            }
            for j in 0..n {
                dx[j] += cx[j];
            }
            for i in 0..m {
                dz[i] += cz[i];
            }
        }
        dx.iter().chain(dz.iter()).all(|v| v.is_finite())
    }
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |a, x| a.max(x.abs()))
}

/// Shifts each non-zero cone block of `v` into the interior when needed.
fn shift_into_cones(cones: &[Cone], off: &[usize], v: &mut [f64]) {
    let mut alpha = f64::NEG_INFINITY;
    for (k, cone) in cones.iter().enumerate() {
        if matches!(cone, Cone::Zero(_)) {
            continue;
        }
        alpha = alpha.max(-cone.min_eig(&v[off[k]..off[k + 1]]));
    }
    if alpha == f64::NEG_INFINITY {
        return;
    }
    let shift = if alpha < 0.0 { 0.0 } else { 1.0 + alpha };
    if shift == 0.0 {
        return;
    }
    for (k, cone) in cones.iter().enumerate() {
        if matches!(cone, Cone::Zero(_)) {
            continue;
        }
        let mut e = vec![0.0; cone.dim()];
        cone.identity(&mut e);
        for (t, ei) in e.iter().enumerate() {
            v[off[k] + t] += shift * ei;
        }
    }
}

struct Direction {
    dx: Vec<f64>,
    dz: Vec<f64>,
    ds: Vec<f64>,
    dtau: f64,
    dkap: f64,
}

pub(crate) fn solve(orig: &StandardForm, settings: Settings) -> RawSolution {
    let (p, eq) = equilibrate(orig);
    let (n, m) = (p.n, p.m());
    let off = p.offsets();
    let nu: usize = p.cones.iter().map(|c| c.degree()).sum();
    let me: usize = p.cones.iter().map(|c| if let Cone::Zero(d) = c { *d } else { 0 }).sum();

    let mut kkt = Kkt::new(&p);
    let ident: Vec<Scaling> = p.cones.iter().map(Scaling::identity).collect();
    let fail = |iters: usize| RawSolution {
        status: SolveStatus::NumericalFailure,
        x: vec![0.0; orig.n],
        z: vec![0.0; orig.m()],
        iterations: iters,
        residuals: (f64::INFINITY, f64::INFINITY, f64::INFINITY),
    };
    if !kkt.factor(ident) {
        return fail(0);
    }

    // initial point
    let mut x = vec![0.0; n];
    let mut z = vec![0.0; m];
    let mut s = vec![0.0; m];
    {
        let zero_n = vec![0.0; n];
        let mut tmpz = vec![0.0; m];
        if !kkt.solve(&zero_n, &p.b, &mut x, &mut tmpz) {
            return fail(0);
        }
        let mut ax = vec![0.0; m];
        p.mul_a(&x, &mut ax);
        for i in 0..m {
            s[i] = if i < me { 0.0 } else { p.b[i] - ax[i] };
        }
        shift_into_cones(&p.cones, &off, &mut s);
        let negc: Vec<f64> = p.c.iter().map(|v| -v).collect();
        let zero_m = vec![0.0; m];
        let mut tmpx = vec![0.0; n];
        if !kkt.solve(&negc, &zero_m, &mut tmpx, &mut z) {
            return fail(0);
        }
        shift_into_cones(&p.cones, &off, &mut z);
    }
    let mut tau = 1.0;
    let mut kappa = 1.0;

    let bnorm = inf_norm(&orig.b);
    let cnorm = inf_norm(&orig.c);
    let mut best: Option<(f64, Vec<f64>, Vec<f64>, Vec<f64>, f64, (f64, f64, f64))> = None;
    let mut polish_left = settings.polish;
    let mut status = SolveStatus::NumericalFailure;
    let mut residuals = (f64::INFINITY, f64::INFINITY, f64::INFINITY);
    let mut iterations = 0;

    let mut rx = vec![0.0; n];
    let mut rz = vec![0.0; m];
    for iter in 0..=settings.max_iter {
        iterations = iter;
        // residuals in the scaled space
        p.mul_at(&z, &mut rx);
        for j in 0..n {
            rx[j] += p.c[j] * tau;
        }
        p.mul_a(&x, &mut rz);
        for i in 0..m {
            rz[i] += s[i] - p.b[i] * tau;
        }
        let cx = dot(&p.c, &x);
        let bz = dot(&p.b, &z);
        let rtau = cx + bz + kappa;
        let mu = (dot(&s, &z) + tau * kappa) / (nu as f64 + 1.0);

        // termination on unscaled quantities
        let (xu, su, zu) = unscale(&eq, &x, &s, &z);
        let xr: Vec<f64> = xu.iter().map(|v| v / tau).collect();
        let sr: Vec<f64> = su.iter().map(|v| v / tau).collect();
        let zr: Vec<f64> = zu.iter().map(|v| v / tau).collect();
        let mut pres_v = vec![0.0; orig.m()];
        orig.mul_a(&xr, &mut pres_v);
        for i in 0..orig.m() {
            pres_v[i] += sr[i] - orig.b[i];
        }
        let mut dres_v = vec![0.0; orig.n];
        orig.mul_at(&zr, &mut dres_v);
        for j in 0..orig.n {
            dres_v[j] += orig.c[j];
        }
        let pobj = dot(&orig.c, &xr);
        let dobj = -dot(&orig.b, &zr);
        let pres = inf_norm(&pres_v) / (1.0 + bnorm.max(inf_norm(&xr)).max(inf_norm(&sr)));
        let dres = inf_norm(&dres_v) / (1.0 + cnorm.max(inf_norm(&zr)));
        let gap = (pobj - dobj).abs() / (1.0 + pobj.abs().min(dobj.abs()));
        residuals = (pres, dres, gap);
        let merit = pres.max(dres).max(gap);
        if best.as_ref().map_or(true, |b| merit < b.0) {
            best = Some((merit, x.clone(), s.clone(), z.clone(), tau, residuals));
        }
        if status == SolveStatus::Optimal || (pres <= settings.tol && dres <= settings.tol && gap <= settings.tol) {
            status = SolveStatus::Optimal;
            if polish_left == 0 {
                break;
            }
            polish_left -= 1;
        }
        // infeasibility certificates
        let bz_u = dot(&orig.b, &zu);
        if bz_u < 0.0 && status != SolveStatus::Optimal {
            let mut atz = vec![0.0; orig.n];
            orig.mul_at(&zu, &mut atz);
            if inf_norm(&atz) <= settings.tol * (-bz_u) / bnorm.max(1e-300) && tau < 1e-2 * kappa.max(1e-300) {
                status = SolveStatus::Infeasible;
                break;
            }
        }
        let cx_u = dot(&orig.c, &xu);
        if cx_u < 0.0 && status != SolveStatus::Optimal {
            let mut axs = vec![0.0; orig.m()];
            orig.mul_a(&xu, &mut axs);
            for i in 0..orig.m() {
                axs[i] += su[i];
            }
            if inf_norm(&axs) <= settings.tol * (-cx_u) / cnorm.max(1e-300) && tau < 1e-2 * kappa.max(1e-300) {
                status = SolveStatus::Unbounded;
                break;
            }
        }
        if iter == settings.max_iter {
            break;
        }

        // scaling and factorization
        let mut scal = Vec::with_capacity(p.cones.len());
        let mut ok = true;
        for (k, cone) in p.cones.iter().enumerate() {
            match Scaling::nt(cone, &s[off[k]..off[k + 1]], &z[off[k]..off[k + 1]]) {
                Some(w) => scal.push(w),
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok || !kkt.factor(scal) {
            break;
        }
        let mut lam = vec![0.0; m];
        for k in 0..p.cones.len() {
            kkt.scal[k].lambda(&z[off[k]..off[k + 1]], &mut lam[off[k]..off[k + 1]]);
        }

        // second direction for the tau column
        let negc: Vec<f64> = p.c.iter().map(|v| -v).collect();
        let mut x2 = vec![0.0; n];
        let mut z2 = vec![0.0; m];
        if !kkt.solve(&negc, &p.b, &mut x2, &mut z2) {
            break;
        }
        let denom2 = dot(&p.c, &x2) + dot(&p.b, &z2) - kappa / tau;

        let newton = |eta: f64, ds_rhs: &[f64], dk: f64| -> Direction {
            // W'(λ ∘\ d_s)
            let mut q = vec![0.0; m];
            let mut wq = vec![0.0; m];
            for (k, cone) in p.cones.iter().enumerate() {
                let (lo, hi) = (off[k], off[k + 1]);
                jordan_div(cone, &lam[lo..hi], &ds_rhs[lo..hi], &mut q[lo..hi]);
                kkt.scal[k].apply_wt(&q[lo..hi], &mut wq[lo..hi]);
            }
            let r1: Vec<f64> = rx.iter().map(|v| -eta * v).collect();
            let r2: Vec<f64> = (0..m).map(|i| -eta * rz[i] + wq[i]).collect();
            let mut x1 = vec![0.0; n];
            let mut z1 = vec![0.0; m];
            kkt.solve(&r1, &r2, &mut x1, &mut z1);
            let dtau = (-eta * rtau - dot(&p.c, &x1) - dot(&p.b, &z1) + dk / tau) / denom2;
            let dx: Vec<f64> = (0..n).map(|j| x1[j] + dtau * x2[j]).collect();
            let dz: Vec<f64> = (0..m).map(|i| z1[i] + dtau * z2[i]).collect();
            // ds from the primal rows, so that round-off in the PSD blocks
            // perturbs centrality rather than feasibility
            let mut adx = vec![0.0; m];
            p.mul_a(&dx, &mut adx);
            let mut ds: Vec<f64> = (0..m).map(|i| -eta * rz[i] + dtau * p.b[i] - adx[i]).collect();
            ds[..me].iter_mut().for_each(|v| *v = 0.0);
            let dkap = -(dk + kappa * dtau) / tau;
            Direction { dx, dz, ds, dtau, dkap }
        };

        let step_len = |d: &Direction| -> (f64, Vec<f64>, Vec<f64>) {
            let mut a = 1.0_f64 / 0.0;
            let mut sds = vec![0.0; m];
            let mut wdz = vec![0.0; m];
            for (k, cone) in p.cones.iter().enumerate() {
                let (lo, hi) = (off[k], off[k + 1]);
                if let Cone::Zero(_) = cone {
                    continue;
                }
                kkt.scal[k].apply_wit(&d.ds[lo..hi], &mut sds[lo..hi]);
                kkt.scal[k].apply_w(&d.dz[lo..hi], &mut wdz[lo..hi]);
                a = a.min(max_step(cone, &lam[lo..hi], &sds[lo..hi]));
                a = a.min(max_step(cone, &lam[lo..hi], &wdz[lo..hi]));
            }
            if d.dtau < 0.0 {
                a = a.min(-tau / d.dtau);
            }
            if d.dkap < 0.0 {
                a = a.min(-kappa / d.dkap);
            }
            (a, sds, wdz)
        };

        // predictor
        let mut ds_aff = vec![0.0; m];
        for (k, cone) in p.cones.iter().enumerate() {
            let (lo, hi) = (off[k], off[k + 1]);
            jordan_prod(cone, &lam[lo..hi], &lam[lo..hi], &mut ds_aff[lo..hi]);
        }
        let aff = newton(1.0, &ds_aff, kappa * tau);
        let (alpha_aff, sds, wdz) = step_len(&aff);
        let alpha_aff = alpha_aff.min(1.0);
        let sigma = (1.0 - alpha_aff).powi(3);

        // corrector
        let mut ds_c = vec![0.0; m];
        let mut e = vec![0.0; m];
        for (k, cone) in p.cones.iter().enumerate() {
            let (lo, hi) = (off[k], off[k + 1]);
            jordan_prod(cone, &sds[lo..hi], &wdz[lo..hi], &mut ds_c[lo..hi]);
            cone.identity(&mut e[lo..hi]);
        }
        for i in 0..m {
            ds_c[i] += ds_aff[i] - sigma * mu * e[i];
        }
        let dk = kappa * tau + aff.dkap * aff.dtau - sigma * mu;
        let dir = newton(1.0 - sigma, &ds_c, dk);
        let (alpha_max, _, _) = step_len(&dir);
        let alpha = (0.99 * alpha_max).min(1.0);
        if !(alpha > 1e-12) || !alpha.is_finite() {
            break;
        }
        for j in 0..n {
            x[j] += alpha * dir.dx[j];
        }
        for i in 0..m {
            z[i] += alpha * dir.dz[i];
            s[i] += alpha * dir.ds[i];
        }
        tau += alpha * dir.dtau;
        kappa += alpha * dir.dkap;
        if !(tau > 0.0 && kappa > 0.0) || x.iter().any(|v| !v.is_finite()) {
            break;
        }
    }

    if matches!(status, SolveStatus::Optimal | SolveStatus::NumericalFailure) {
        if let Some((_, bx, bs, bz, bt, br)) = best {
            x = bx;
            s = bs;
            z = bz;
            tau = bt;
            residuals = br;
        }
    }
    let (xu, _, zu) = unscale(&eq, &x, &s, &z);
    let div = match status {
        SolveStatus::Optimal | SolveStatus::NumericalFailure => tau,
        _ => 1.0,
    };
    RawSolution {
        status,
        x: xu.iter().map(|v| v / div).collect(),
        z: zu.iter().map(|v| v / div).collect(),
        iterations,
        residuals,
    }
}

fn unscale(eq: &Equilibration, x: &[f64], s: &[f64], z: &[f64]) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let xu = x.iter().zip(&eq.e).map(|(v, e)| v * e / eq.sigma_b).collect();
    let su = s.iter().zip(&eq.d).map(|(v, d)| v / (d * eq.sigma_b)).collect();
    let zu = z.iter().zip(&eq.d).map(|(v, d)| v * d / eq.sigma_c).collect();
    (xu, su, zu)
}
