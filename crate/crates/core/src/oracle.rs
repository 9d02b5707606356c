//! Brute-force reference solvers for tiny systems (`M, N ≤ 2`), independent
//! of the conic solver.
//!
//! Jamming covariances are enumerated as `Q = p₁u₁u₁^H + p₂u₂u₂^H` over a
//! lattice of unitaries `[u₁ u₂]` and eigenvalues, keeping those inside the
//! per-node budgets. Only the interference pair `(h_cd^H Q h_cd,
//! h_ce^H Q h_ce)` matters, so the lattice is reduced to its Pareto frontier
//! (least destination interference for a given eavesdropper interference).
//!
//! The beamformer lives in `span{h_bd, h_be}`: `v = x b_n + y b_e`, where
//! `b_e ∝ h_be` and `b_n` is the part of `h_bd` orthogonal to it. The lattice
//! has three axes: the share `ℓ` of the admissible eavesdropper leakage
//! spent, so `|y|² = ℓ·y_max`; the power fraction `f` of what is left for
//! `x`; and the phase `φ` of `y`. All three use `k/grid` steps, so a finer
//! grid contains a coarser one. For each `ℓ` the best `f` and `φ` on the
//! lattice are found in closed form: the gain is convex in `√f` and a
//! cosine in `φ`.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{c, inner, norm_sqr, CMatrix, CVector, ONE, ZERO};
use crate::model::{ChannelSet, SystemConfig, TransmitDesign};

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    /// Best destination SINR (SRM) or least BS power (TPM).
    pub value: f64,
    pub design: TransmitDesign,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Jam {
    d: f64,
    e: f64,
    q: [[Complex64; 2]; 2],
}

/// Pareto frontier keyed by eavesdropper interference; destination
/// interference increases strictly along it.
#[derive(Default)]
struct Frontier {
    pts: BTreeMap<u64, Jam>,
}

impl Frontier {
    fn insert(&mut self, j: Jam) {
        let key = j.e.to_bits();
        if let Some((_, s)) = self.pts.range(key..).next() {
            if s.d <= j.d {
                return;
            }
        }
        let drop: Vec<u64> = self.pts.range(..=key).rev().take_while(|(_, p)| p.d >= j.d).map(|(k, _)| *k).collect();
        for k in drop {
            self.pts.remove(&k);
        }
        self.pts.insert(key, j);
    }
}

fn check_size(cfg: &SystemConfig, grid: usize) -> Result<()> {
    cfg.validate()?;
    if cfg.m > 2 || cfg.n > 2 {
        return Err(Error::DimensionTooLarge { m: cfg.m, n: cfg.n });
    }
    if grid == 0 {
        return Err(Error::InvalidConfig("grid must be positive".into()));
    }
    Ok(())
}

fn jam_frontier(ch: &ChannelSet, cfg: &SystemConfig, grid: usize) -> Vec<Jam> {
    let mut fr = Frontier::default();
    let g = grid as f64;
    let p = &cfg.p_harvested;
    if cfg.n == 1 {
        for k in 0..=grid {
            let q = p[0] * k as f64 / g;
            let (hd, he) = (ch.h_cd[0].norm_sqr(), ch.h_ce[0].norm_sqr());
            fr.insert(Jam { d: q * hd, e: q * he, q: [[c(q, 0.0), ZERO], [ZERO, ZERO]] });
        }
    } else {
        let (n_dir, d_dir) = node_basis(&ch.h_cd);
        for bi in 0..=grid {
            let beta = 0.5 * PI * bi as f64 / g;
            let (cb, sb) = (beta.cos(), beta.sin());
            for pi in 0..grid {
                let e = Complex64::from_polar(1.0, 2.0 * PI * pi as f64 / g);
                let u1 = [n_dir[0] * cb + d_dir[0] * e * sb, n_dir[1] * cb + d_dir[1] * e * sb];
                let u2 = [d_dir[0] * cb - n_dir[0] * e.conj() * sb, d_dir[1] * cb - n_dir[1] * e.conj() * sb];
                let gain = |h: &CVector, u: &[Complex64; 2]| (h[0].conj() * u[0] + h[1].conj() * u[1]).norm_sqr();
                let (d1, d2, e1, e2) = (gain(&ch.h_cd, &u1), gain(&ch.h_cd, &u2), gain(&ch.h_ce, &u1), gain(&ch.h_ce, &u2));
                let w1 = [u1[0].norm_sqr(), u1[1].norm_sqr()];
                let w2 = [u2[0].norm_sqr(), u2[1].norm_sqr()];
                let cap = |room: [f64; 2], w: [f64; 2]| {
                    (0..2).map(|i| if w[i] > 0.0 { room[i].max(0.0) / w[i] } else { f64::INFINITY }).fold(f64::INFINITY, f64::min)
                };
                let p1_cap = cap([p[0], p[1]], w1);
                for k1 in 0..=grid {
                    let p1 = p1_cap * k1 as f64 / g;
                    let p2_cap = cap([p[0] - p1 * w1[0], p[1] - p1 * w1[1]], w2);
                    for k2 in 0..=grid {
                        let p2 = p2_cap * k2 as f64 / g;
                        let d = p1 * d1 + p2 * d2;
                        let ee = p1 * e1 + p2 * e2;
                        if let Some((_, s)) = fr.pts.range(ee.to_bits()..).next() {
                            if s.d <= d {
                                continue;
                            }
                        }
                        let q11 = p1 * w1[0] + p2 * w2[0];
                        let q22 = p1 * w1[1] + p2 * w2[1];
                        let q01 = u1[0] * u1[1].conj() * p1 + u2[0] * u2[1].conj() * p2;
                        fr.insert(Jam { d, e: ee, q: [[c(q11, 0.0), q01], [q01.conj(), c(q22, 0.0)]] });
                    }
                }
            }
        }
    }
    fr.pts.into_values().collect()
}

/// Unit vectors orthogonal and parallel to `h_cd` (for `N = 2`).
fn node_basis(h_cd: &CVector) -> ([Complex64; 2], [Complex64; 2]) {
    let n2 = norm_sqr(h_cd);
    if n2 == 0.0 {
        return ([ONE, ZERO], [ZERO, ONE]);
    }
    let d = [h_cd[0].unscale(n2.sqrt()), h_cd[1].unscale(n2.sqrt())];
    ([-d[1].conj(), d[0].conj()], d)
}

/// Orthonormal directions spanning `{h_bd, h_be}` and the destination gains
/// along them.
struct Span {
    b_n: Option<CVector>,
    b_e: Option<CVector>,
    g1: f64,
    g2: Complex64,
    he2: f64,
}

fn span(ch: &ChannelSet) -> Span {
    let he2 = norm_sqr(&ch.h_be);
    let hb2 = norm_sqr(&ch.h_bd);
    if he2 == 0.0 {
        let b_n = (hb2 > 0.0).then(|| ch.h_bd.unscale(hb2.sqrt()));
        return Span { b_n, b_e: None, g1: hb2.sqrt(), g2: ZERO, he2 };
    }
    let b_e = ch.h_be.unscale(he2.sqrt());
    let g2 = inner(&ch.h_bd, &b_e);
    let r = &ch.h_bd - &b_e * inner(&b_e, &ch.h_bd);
    let r2 = norm_sqr(&r);
    let b_n = (r2 > 1e-24 * hb2.max(f64::MIN_POSITIVE)).then(|| r.unscale(r2.sqrt()));
    let g1 = if b_n.is_some() { r2.sqrt() } else { 0.0 };
    Span { b_n, b_e: Some(b_e), g1, g2, he2 }
}

/// Best lattice point for one interference pair: `(gain, x, y)`.
fn best_beam(s: &Span, p_bs: f64, cap: f64, grid: usize) -> (f64, f64, Complex64) {
    let g = grid as f64;
    let y_max = match s.b_e {
        Some(_) => p_bs.min(cap / s.he2),
        None => 0.0,
    };
    // lattice phase nearest to alignment with the b_n term
    let target = (-s.g2.arg()).rem_euclid(2.0 * PI);
    let j = ((target / (2.0 * PI) * g).round() as usize) % grid;
    let phase = Complex64::from_polar(1.0, 2.0 * PI * j as f64 / g);
    let mut best = (-1.0, 0.0, ZERO);
    let l_steps = if s.b_e.is_some() { grid } else { 0 };
    for li in 0..=l_steps {
        let y2 = y_max * li as f64 / g;
        let y = phase.scale(y2.sqrt());
        let x_max = if s.b_n.is_some() { (p_bs - y2).max(0.0).sqrt() } else { 0.0 };
        for x in [0.0, x_max] {
            let gain = (s.g2 * y + x * s.g1).norm_sqr();
            if gain > best.0 {
                best = (gain, x, y);
            }
        }
    }
    best
}

fn assemble(s: &Span, m: usize, x: f64, y: Complex64, jam: &Jam, n: usize) -> TransmitDesign {
    let mut v = CVector::zeros(m);
    if let Some(b) = &s.b_n {
        v += b * ONE.scale(x);
    }
    if let Some(b) = &s.b_e {
        v += b * y;
    }
    let q = CMatrix::from_fn(n, n, |i, k| jam.q[i][k]);
    TransmitDesign { v, q_cov: q, q_vec: None }
}

fn srm_over(cfg: &SystemConfig, frontier: &[Jam], s: &Span, p_bs: f64, grid: usize) -> (f64, TransmitDesign) {
    let mut best = (-1.0, None);
    for jam in frontier {
        let cap = cfg.gamma_e * (jam.e + cfg.sigma2);
        let (gain, x, y) = best_beam(s, p_bs, cap, grid);
        let sinr = gain / (jam.d + cfg.sigma2);
        if sinr > best.0 {
            best = (sinr, Some((x, y, *jam)));
        }
    }
    let (x, y, jam) = best.1.expect("frontier always holds Q = 0");
    (best.0, assemble(s, cfg.m, x, y, &jam, cfg.n))
}

/// Largest γ_e-feasible destination SINR over the lattice.
pub fn oracle_srm(ch: &ChannelSet, cfg: &SystemConfig, grid: usize) -> Result<OracleResult> {
    check_size(cfg, grid)?;
    ch.check_against(cfg)?;
    let frontier = jam_frontier(ch, cfg, grid);
    let (value, design) = srm_over(cfg, &frontier, &span(ch), cfg.p_bs_max, grid);
    Ok(OracleResult { value, design })
}

/// Least BS power for which the lattice holds a design with
/// `sinr_d ≥ γ_d` and `sinr_e ≤ γ_e`, found by bisection to `1e-6`
/// relative.
pub fn oracle_tpm(ch: &ChannelSet, cfg: &SystemConfig, grid: usize) -> Result<OracleResult> {
    check_size(cfg, grid)?;
    ch.check_against(cfg)?;
    let hb = norm_sqr(&ch.h_bd);
    if hb == 0.0 {
        return Err(Error::Infeasible);
    }
    let gamma_d = cfg.gamma_d();
    let frontier = jam_frontier(ch, cfg, grid);
    let s = span(ch);
    let ok = |p: f64| {
        let (sinr, d) = srm_over(cfg, &frontier, &s, p, grid);
        (sinr >= gamma_d, d)
    };
    let mut lo = gamma_d * cfg.sigma2 / hb;
    let mut hi = lo.max(f64::MIN_POSITIVE);
    let mut found = None;
    for _ in 0..60 {
        let (feasible, d) = ok(hi);
        if feasible {
            found = Some(d);
            break;
        }
        lo = hi;
        hi *= 2.0;
    }
    let mut design = found.ok_or(Error::Infeasible)?;
    while hi - lo > 1e-6 * hi {
        let mid = 0.5 * (lo + hi);
        match ok(mid) {
            (true, d) => {
                hi = mid;
                design = d;
            }
            (false, _) => lo = mid,
        }
    }
    Ok(OracleResult { value: design.bs_power(), design })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{rates, sample_channels};

    fn wiretap_free(cfg: &SystemConfig, trial: u64) -> ChannelSet {
        let b = sample_channels(cfg, trial);
        ChannelSet::new(b.h_bd, CVector::zeros(cfg.m), b.h_cd, b.h_ce).unwrap()
    }

    /// Exhaustive lattice over `(ℓ, f, φ)` for one interference pair.
    fn exhaustive_beam(s: &Span, p_bs: f64, cap: f64, grid: usize) -> f64 {
        let g = grid as f64;
        let y_max = if s.b_e.is_some() { p_bs.min(cap / s.he2) } else { 0.0 };
        let mut best = 0.0f64;
        for li in 0..=grid {
            for fi in 0..=grid {
                for pj in 0..grid {
                    let y2 = y_max * li as f64 / g;
                    let x = if s.b_n.is_some() { ((p_bs - y2) * fi as f64 / g).sqrt() } else { 0.0 };
                    let y = Complex64::from_polar(y2.sqrt(), 2.0 * PI * pj as f64 / g);
                    best = best.max((s.g2 * y + x * s.g1).norm_sqr());
                }
            }
        }
        best
    }

    #[test]
    fn closed_form_lattice_max_matches_exhaustive() {
        let cfg = SystemConfig::new(2, 2).unwrap();
        for trial in 0..5 {
            let ch = sample_channels(&cfg, trial);
            let s = span(&ch);
            for cap in [1e-6, 1e-4, 1e-2, 10.0] {
                let fast = best_beam(&s, cfg.p_bs_max, cap, 12).0;
                let slow = exhaustive_beam(&s, cfg.p_bs_max, cap, 12);
                assert!((fast - slow).abs() <= 1e-12 * slow.max(1.0), "{fast} vs {slow}");
            }
        }
    }

    #[test]
    fn no_wiretap_gives_mrt() {
        let cfg = SystemConfig::new(2, 2).unwrap();
        let ch = wiretap_free(&cfg, 0);
        let r = oracle_srm(&ch, &cfg, 8).unwrap();
        let mrt = cfg.p_bs_max * norm_sqr(&ch.h_bd) / cfg.sigma2;
        assert!((r.value - mrt).abs() <= 1e-9 * mrt);
        assert!(crate::linalg::quad_form(&r.design.q_cov, &ch.h_cd) <= 1e-15);
    }

    #[test]
    fn no_wiretap_tpm_is_mrt_power() {
        let cfg = SystemConfig::new(2, 2).unwrap();
        let ch = wiretap_free(&cfg, 1);
        let r = oracle_tpm(&ch, &cfg, 8).unwrap();
        let target = cfg.gamma_d() * cfg.sigma2 / norm_sqr(&ch.h_bd);
        assert!((r.value - target).abs() <= 1e-5 * target);
    }

    #[test]
    fn refinement_never_hurts() {
        let cfg = SystemConfig::new(2, 2).unwrap();
        for trial in 0..3 {
            let ch = sample_channels(&cfg, trial);
            let coarse = oracle_srm(&ch, &cfg, 8).unwrap().value;
            let fine = oracle_srm(&ch, &cfg, 16).unwrap().value;
            assert!(fine >= coarse * (1.0 - 1e-12));
        }
    }

    #[test]
    fn returned_designs_are_feasible() {
        let cfg = SystemConfig::new(2, 2).unwrap();
        let ch = sample_channels(&cfg, 4);
        let r = oracle_srm(&ch, &cfg, 8).unwrap();
        let rt = rates(&r.design, &ch, cfg.sigma2).unwrap();
        assert!((rt.sinr_d - r.value).abs() <= 1e-9 * r.value);
        assert!(rt.sinr_e <= cfg.gamma_e * (1.0 + 1e-9));
        assert!(crate::model::check_feasibility(&r.design, &cfg).feasible());
        let t = oracle_tpm(&ch, &cfg, 8).unwrap();
        let rt = rates(&t.design, &ch, cfg.sigma2).unwrap();
        assert!(rt.sinr_d >= cfg.gamma_d() * (1.0 - 1e-9));
        assert!(rt.sinr_e <= cfg.gamma_e * (1.0 + 1e-9));
    }

    #[test]
    fn unreachable_target_is_infeasible() {
        let cfg = SystemConfig::new(1, 2).unwrap().with_rs_min(20.0).unwrap().with_uniform_harvest(1e-9).unwrap();
        let ch = sample_channels(&cfg, 5);
        assert!(matches!(oracle_tpm(&ch, &cfg, 8), Err(Error::Infeasible)));
    }

    #[test]
    fn large_systems_are_rejected() {
        let cfg = SystemConfig::new(3, 2).unwrap();
        let ch = sample_channels(&cfg, 0);
        assert!(matches!(oracle_srm(&ch, &cfg, 4), Err(Error::DimensionTooLarge { m: 3, n: 2 })));
    }
}
