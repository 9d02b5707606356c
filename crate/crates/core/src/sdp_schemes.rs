//! Globally optimal schemes built on semidefinite relaxation.
//!
//! B-CJ-SRM maximizes the destination SINR under an eavesdropper SINR cap
//! through the Charnes–Cooper form of the fractional program; B-CJ-TPM
//! minimizes BS power subject to a secrecy-rate target. Both relaxations are
//! tight, so the beamformer is read off the dominant eigenvector.
//!
//! The programs are solved in rescaled coordinates
//! `Ṽ = T V̂ T^H`, `Q̃ = s_q Q̂`, `t = s_t τ̂`, where `T` shrinks the
//! eavesdropper direction to the magnitude the SINR cap allows. Constraint
//! rows keep their original units so the reported multipliers are those of
//! the unscaled problem.

use alloc::vec::Vec;

use crate::conic::{self, ConeProgram, ConeSolution, LinExpr, SolveStatus};
use crate::error::{Error, Result};
use crate::linalg::{eigh_desc, frobenius, hermitian_defect, normalize_phase, norm_sqr, unitary_with_first_column, CMatrix, CVector, ONE};
use crate::model::{rates, ChannelSet, SystemConfig, TransmitDesign};
#[cfg(not(feature = "std"))]
use num_traits::Float;

/// Largest accepted `λ₂/λ₁` of the relaxed beamforming matrix.
pub const RANK1_TOL: f64 = 1e-4;
/// Bound on the normalized complementary-slackness residual for a rank-one
/// certificate.
pub const COMP_SLACK_TOL: f64 = 1e-5;
const SOLVE_TOL: f64 = conic::DEFAULT_TOL;
/// Extra interior-point steps after convergence; the complementarity
/// residual shrinks only with the square root of the duality gap.
const POLISH_STEPS: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    Srm,
    Tpm,
}

/// Change of variables between solver coordinates and the physical ones.
#[derive(Debug, Clone, PartialEq)]
pub struct SdpScaling {
    /// `Ṽ = T V̂ T^H`.
    pub t: CMatrix,
    /// `Q̃ = q_scale · Q̂`.
    pub q_scale: f64,
    /// `t = tau_scale · τ̂` (SRM only, 1 for TPM).
    pub tau_scale: f64,
    /// The program's objective is `obj_scale` times the scheme's objective.
    pub obj_scale: f64,
}

impl SdpScaling {
    pub fn v_from_hat(&self, v_hat: &CMatrix) -> CMatrix {
        &self.t * v_hat * self.t.adjoint()
    }

    fn congruent(&self, a: &CMatrix) -> CMatrix {
        self.t.adjoint() * a * &self.t
    }
}

/// A cone program together with the scaling that maps its variables back.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeProgram {
    pub program: ConeProgram,
    pub scaling: SdpScaling,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SrmSolveReport {
    pub design: TransmitDesign,
    /// Charnes–Cooper slack `t*` (1 for TPM).
    pub t_star: f64,
    /// Relaxed beamforming matrix `V*`.
    pub v_big: CMatrix,
    /// Jamming covariance `Q*`.
    pub q_big: CMatrix,
    pub rank1_ratio: f64,
    /// Achieved by the extracted design.
    pub sinr_d: f64,
    pub sinr_e: f64,
    pub r_s: f64,
    /// `Tr(H_BD V*) / (Tr(H_CD Q*) + σ²)` of the relaxed solution.
    pub relaxed_sinr_d: f64,
    /// Optimal value of the program (destination SINR or BS power).
    pub objective: f64,
    pub scaling: SdpScaling,
    pub solution: ConeSolution,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KktReport {
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda3: f64,
    pub mu: Vec<f64>,
    pub comp_slack_residual: f64,
    pub stationarity_residual: f64,
    pub rank1_certified: bool,
}

/// Largest `h^H Q h` over `Q ⪰ 0` with `Q_ii ≤ P_i`.
fn max_jamming(h: &CVector, p: &[f64]) -> f64 {
    let s: f64 = h.iter().zip(p).map(|(z, &pi)| z.norm() * pi.sqrt()).sum();
    s * s
}

/// `T = U diag(a_e, a, …, a)` with `U e₁ ∝ h_be`.
fn beam_scaling(h_be: &CVector, a2: f64, leak2: f64) -> CMatrix {
    let m = h_be.len();
    let u = unitary_with_first_column(h_be);
    let hb = norm_sqr(h_be);
    let a = a2.sqrt();
    let ae = if hb > 0.0 { (leak2 / hb).min(a2).max(a2 * 1e-16).sqrt() } else { a };
    let mut d = CMatrix::identity(m, m) * ONE.scale(a);
    d[(0, 0)] = ONE.scale(ae);
    u * d
}

fn node_scale(cfg: &SystemConfig) -> f64 {
    let p = cfg.p_max_node();
    if p > 0.0 {
        p
    } else {
        1.0
    }
}

fn check_inputs(ch: &ChannelSet, cfg: &SystemConfig) -> Result<()> {
    cfg.validate()?;
    ch.check_against(cfg)
}

/// Charnes–Cooper form of the SINR maximization with the rank constraint
/// dropped.
pub fn build_srm_sdp(ch: &ChannelSet, cfg: &SystemConfig) -> Result<SchemeProgram> {
    check_inputs(ch, cfg)?;
    let (m, n) = (cfg.m, cfg.n);
    let s2 = cfg.sigma2;
    let leak = cfg.gamma_e * (max_jamming(&ch.h_ce, &cfg.p_harvested) + s2) / s2;
    let snr_bound = cfg.p_bs_max * norm_sqr(&ch.h_bd) / s2;
    let scaling = SdpScaling {
        t: beam_scaling(&ch.h_be, cfg.p_bs_max / s2, leak),
        q_scale: node_scale(cfg) / s2,
        tau_scale: 1.0 / s2,
        obj_scale: if snr_bound > 0.0 { 1.0 / snr_bound } else { 1.0 },
    };
    let (h_bd, h_be, eye) = (scaling.congruent(&ch.a()), scaling.congruent(&ch.c()), scaling.congruent(&CMatrix::identity(m, m)));
    let (kq, kt) = (scaling.q_scale, scaling.tau_scale);

    let mut p = ConeProgram::new();
    let v = p.psd_block("V", m);
    let q = p.psd_block("Q", n);
    let t = p.scalar("t");
    p.maximize(LinExpr::new().trace(v, &h_bd, scaling.obj_scale));
    p.less_eq_zero("bs_power", LinExpr::new().trace(v, &eye, 1.0).scalar(t, -cfg.p_bs_max * kt));
    for (i, &pi) in cfg.p_harvested.iter().enumerate() {
        p.less_eq_zero(&alloc::format!("node_{i}"), LinExpr::new().diag(q, i, kq).scalar(t, -pi * kt));
    }
    p.less_eq_zero(
        "eavesdropper",
        LinExpr::new()
            .trace(v, &h_be, 1.0)
            .trace(q, &ch.d(), -cfg.gamma_e * kq)
            .scalar(t, -cfg.gamma_e * s2 * kt),
    );
    p.equal_zero("normalization", LinExpr::constant(-1.0).trace(q, &ch.b(), kq).scalar(t, s2 * kt));
    Ok(SchemeProgram { program: p, scaling })
}

/// Power minimization under the destination and eavesdropper SINR targets.
pub fn build_tpm_sdp(ch: &ChannelSet, cfg: &SystemConfig) -> Result<SchemeProgram> {
    check_inputs(ch, cfg)?;
    let s2 = cfg.sigma2;
    let (m, n) = (cfg.m, cfg.n);
    let gamma_d = cfg.gamma_d();
    let hbd = norm_sqr(&ch.h_bd);
    let jam = max_jamming(&ch.h_ce, &cfg.p_harvested);
    let base = if hbd > 0.0 { (gamma_d.max(1e-3) * s2 / hbd).max(1e-12) } else { 1.0 };
    let scaling = SdpScaling {
        t: beam_scaling(&ch.h_be, base, cfg.gamma_e * (jam + s2)),
        q_scale: node_scale(cfg),
        tau_scale: 1.0,
        obj_scale: 1.0 / base,
    };
    let (h_bd, h_be, eye) = (scaling.congruent(&ch.a()), scaling.congruent(&ch.c()), scaling.congruent(&CMatrix::identity(m, m)));
    let kq = scaling.q_scale;

    let mut p = ConeProgram::new();
    let v = p.psd_block("V", m);
    let q = p.psd_block("Q", n);
    p.minimize(LinExpr::new().trace(v, &eye, scaling.obj_scale));
    p.less_eq_zero(
        "destination",
        LinExpr::constant(gamma_d * s2).trace(q, &ch.b(), gamma_d * kq).trace(v, &h_bd, -1.0),
    );
    p.less_eq_zero(
        "eavesdropper",
        LinExpr::constant(-cfg.gamma_e * s2).trace(v, &h_be, 1.0).trace(q, &ch.d(), -cfg.gamma_e * kq),
    );
    for (i, &pi) in cfg.p_harvested.iter().enumerate() {
        p.less_eq_zero(&alloc::format!("node_{i}"), LinExpr::constant(-pi).diag(q, i, kq));
    }
    Ok(SchemeProgram { program: p, scaling })
}

/// Dominant rank-one factor `v = √λ₁ u₁` of a Hermitian PSD matrix and the
/// ratio `λ₂/λ₁`. The phase of `v` is fixed so its largest entry is real
/// and positive.
pub fn extract_rank_one(v_big: &CMatrix) -> Result<(CVector, f64)> {
    if !v_big.is_square() {
        return Err(Error::NotHermitian(f64::INFINITY));
    }
    let scale = frobenius(v_big).max(1.0);
    let defect = hermitian_defect(v_big);
    if defect > 1e-10 * scale {
        return Err(Error::NotHermitian(defect));
    }
    if v_big.trace().re <= 1e-12 {
        return Err(Error::AllZero);
    }
    let (vals, vecs) = eigh_desc(v_big);
    let l1 = vals[0];
    let ratio = if vals.len() > 1 { vals[1].max(0.0) / l1 } else { 0.0 };
    let mut v = vecs.column(0).clone_owned() * ONE.scale(l1.sqrt());
    normalize_phase(&mut v);
    Ok((v, ratio))
}

fn finish(
    ch: &ChannelSet,
    cfg: &SystemConfig,
    sp: SchemeProgram,
    sol: ConeSolution,
    v_tilde: CMatrix,
    q_tilde: CMatrix,
    t_star: f64,
) -> Result<SrmSolveReport> {
    let v_big = v_tilde.unscale(t_star);
    let q_big = crate::linalg::hermitian_part(&q_tilde.unscale(t_star));
    let (v, ratio) = extract_rank_one(&v_big)?;
    if ratio > RANK1_TOL {
        return Err(Error::Rank1Extraction(ratio));
    }
    let s2 = cfg.sigma2;
    let relaxed_sinr_d = (&ch.a() * &v_big).trace().re / ((&ch.b() * &q_big).trace().re + s2);
    let mut design = TransmitDesign { v, q_cov: q_big.clone(), q_vec: None };
    // clip solver round-off on the per-node budgets
    for (i, &pi) in cfg.p_harvested.iter().enumerate() {
        let qii = design.q_cov[(i, i)].re;
        if qii > pi && qii > 0.0 {
            let f = (pi / qii).sqrt();
            for j in 0..cfg.n {
                design.q_cov[(i, j)] *= f;
                design.q_cov[(j, i)] *= f;
            }
        }
    }
    let r = rates(&design, ch, s2)?;
    Ok(SrmSolveReport {
        design,
        t_star,
        v_big,
        q_big,
        rank1_ratio: ratio,
        sinr_d: r.sinr_d,
        sinr_e: r.sinr_e,
        r_s: r.r_s,
        relaxed_sinr_d,
        objective: sol.objective_value / sp.scaling.obj_scale,
        scaling: sp.scaling,
        solution: sol,
    })
}

fn run(sp: &SchemeProgram) -> Result<ConeSolution> {
    let sol = conic::solve_polished(&sp.program, SOLVE_TOL, POLISH_STEPS)?;
    match sol.status {
        SolveStatus::Optimal => Ok(sol),
        SolveStatus::Infeasible => Err(Error::Infeasible),
        s => Err(Error::Solver(s)),
    }
}

/// B-CJ-SRM: solves the relaxed Charnes–Cooper program and recovers
/// `V* = Ṽ*/t*`, `Q* = Q̃*/t*` and the rank-one beamformer.
pub fn solve_b_cj_srm(ch: &ChannelSet, cfg: &SystemConfig) -> Result<SrmSolveReport> {
    let sp = build_srm_sdp(ch, cfg)?;
    let sol = run(&sp)?;
    let v_hat = sol.hermitian("V").ok_or_else(|| Error::MissingDuals("V".into()))?;
    let q_hat = sol.hermitian("Q").ok_or_else(|| Error::MissingDuals("Q".into()))?;
    let tau = sol.scalar("t").ok_or_else(|| Error::MissingDuals("t".into()))?;
    let t_star = tau * sp.scaling.tau_scale;
    if !(t_star > 0.0) {
        return Err(Error::Solver(SolveStatus::NumericalFailure));
    }
    let v_tilde = sp.scaling.v_from_hat(v_hat);
    let q_tilde = q_hat.scale(sp.scaling.q_scale);
    finish(ch, cfg, sp, sol, v_tilde, q_tilde, t_star)
}

/// B-CJ-TPM: minimum BS power meeting the secrecy-rate target.
pub fn solve_b_cj_tpm(ch: &ChannelSet, cfg: &SystemConfig) -> Result<SrmSolveReport> {
    let sp = build_tpm_sdp(ch, cfg)?;
    let sol = run(&sp)?;
    let v_hat = sol.hermitian("V").ok_or_else(|| Error::MissingDuals("V".into()))?;
    let q_hat = sol.hermitian("Q").ok_or_else(|| Error::MissingDuals("Q".into()))?;
    let v_tilde = sp.scaling.v_from_hat(v_hat);
    let q_tilde = q_hat.scale(sp.scaling.q_scale);
    finish(ch, cfg, sp, sol, v_tilde, q_tilde, 1.0)
}

/// Rebuilds the matrix dual `P₁` of the beamforming block from the scalar
/// multipliers and checks the rank-one argument: `λ₁ > 0`, `P₁ V* ≈ 0` and
/// a negligible second eigenvalue.
///
/// In minimization form `P₁ = λ₁I + λ₂H_BE − H_BD` for SRM and
/// `P₁ = I − λ₁H_BD + λ₂H_BE` for TPM. The complementary-slackness residual
/// is `‖P₁V*‖_F / (‖V*‖_F·s)` with `s = ‖H_BD‖_F` for SRM and 1 for TPM,
/// which makes it dimensionless in both cases.
pub fn verify_kkt_rank_one(report: &SrmSolveReport, sol: &ConeSolution, which: Scheme, ch: &ChannelSet) -> Result<KktReport> {
    if !sol.is_optimal() {
        return Err(Error::Solver(sol.status));
    }
    let m = report.v_big.nrows();
    let eye = CMatrix::identity(m, m);
    let (h_bd, h_be) = (ch.a(), ch.c());
    let os = report.scaling.obj_scale;
    let multiplier = |name: &str| sol.multiplier(name).map(|v| v / os);
    let n_nodes = ch.n();
    let mut mu = Vec::with_capacity(n_nodes);
    for i in 0..n_nodes {
        mu.push(multiplier(&alloc::format!("node_{i}"))?);
    }
    let lambda2 = multiplier("eavesdropper")?;
    let (lambda1, lambda3, p1, unit) = match which {
        Scheme::Srm => {
            let l1 = multiplier("bs_power")?;
            let l3 = multiplier("normalization")?;
            let p1 = eye.scale(l1) + h_be.scale(lambda2) - &h_bd;
            (l1, l3, p1, frobenius(&h_bd).max(f64::MIN_POSITIVE))
        }
        Scheme::Tpm => {
            let l1 = multiplier("destination")?;
            let p1 = &eye - h_bd.scale(l1) + h_be.scale(lambda2);
            (l1, 0.0, p1, 1.0)
        }
    };
    let vn = frobenius(&report.v_big).max(f64::MIN_POSITIVE);
    let comp = frobenius(&(&p1 * &report.v_big)) / (vn * unit);
    let stationarity = match sol.psd_dual.get("V") {
        Some(p_hat) => {
            let lhs = report.scaling.congruent(&p1);
            frobenius(&(lhs - p_hat.unscale(os))) / (unit * frobenius(&report.scaling.congruent(&eye)).max(f64::MIN_POSITIVE))
        }
        None => return Err(Error::MissingDuals("V".into())),
    };
    let tol = 1e-9;
    let rank1_certified = lambda1 > tol && comp <= COMP_SLACK_TOL && report.rank1_ratio <= RANK1_TOL;
    Ok(KktReport {
        lambda1,
        lambda2,
        lambda3,
        mu,
        comp_slack_residual: comp,
        stationarity_residual: stationarity,
        rank1_certified,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, outer, ZERO};
    use crate::model::{check_feasibility, sample_channels};
    use alloc::vec;

    fn cv(v: &[(f64, f64)]) -> CVector {
        CVector::from_iterator(v.len(), v.iter().map(|&(r, i)| c(r, i)))
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn srm_program_shape() {
        let cfg = SystemConfig::new(1, 2).unwrap();
        let ch = sample_channels(&cfg, 0);
        let p = build_srm_sdp(&ch, &cfg).unwrap().program;
        let blocks: Vec<_> = p.psd_blocks().map(|(_, s)| s).collect();
        assert_eq!(blocks, vec![1, 2]);
        assert_eq!(p.scalar_vars().count(), 1);
        assert_eq!(p.ineq_constraints().len(), cfg.n + 2);
        assert_eq!(p.eq_constraints().len(), 1);
        assert_eq!(p.soc_constraints().len(), 0);
    }

    #[test]
    fn srm_zero_point_with_unit_t_is_feasible() {
        let cfg = SystemConfig::new(3, 2).unwrap();
        let ch = sample_channels(&cfg, 1);
        let sp = build_srm_sdp(&ch, &cfg).unwrap();
        let mut x = vec![0.0; sp.program.n_params()];
        let t = sp.program.scalar_var("t").unwrap();
        x[t.index()] = 1.0 / (cfg.sigma2 * sp.scaling.tau_scale);
        assert!(sp.program.max_violation(&x) < 1e-12);
    }

    #[test]
    fn tpm_program_shape() {
        let cfg = SystemConfig::new(2, 2).unwrap();
        let ch = sample_channels(&cfg, 0);
        let p = build_tpm_sdp(&ch, &cfg).unwrap().program;
        assert_eq!(p.psd_blocks().count(), 2);
        assert_eq!(p.ineq_constraints().len(), cfg.n + 2);
        assert_eq!(p.eq_constraints().len(), 0);
        assert_eq!(p.scalar_vars().count(), 0);
    }

    #[test]
    fn tpm_zero_point_violates_destination_target() {
        let cfg = SystemConfig::new(2, 2).unwrap().with_rs_min(0.0).unwrap();
        let ch = sample_channels(&cfg, 3);
        let p = build_tpm_sdp(&ch, &cfg).unwrap().program;
        let x = vec![0.0; p.n_params()];
        let dest = &p.ineq_constraints()[0];
        assert_eq!(dest.name, "destination");
        assert!((dest.expr.eval(&x) - cfg.gamma_e * cfg.sigma2).abs() < 1e-18);
    }

    #[test]
    fn extract_scaled_basis_vector() {
        let mut v = CMatrix::zeros(3, 3);
        v[(0, 0)] = c(4.0, 0.0);
        let (x, ratio) = extract_rank_one(&v).unwrap();
        assert!((x[0] - c(2.0, 0.0)).norm() < 1e-12);
        assert!(x[1].norm() < 1e-12 && x[2].norm() < 1e-12);
        assert_eq!(ratio, 0.0);
    }

    #[test]
    fn extract_identity_is_maximally_ambiguous() {
        let (_, ratio) = extract_rank_one(&CMatrix::identity(2, 2)).unwrap();
        assert!((ratio - 1.0).abs() < 1e-12);
        assert!(ratio > RANK1_TOL);
    }

    #[test]
    fn extract_rejects_zero_and_non_hermitian() {
        assert!(matches!(extract_rank_one(&CMatrix::zeros(2, 2)), Err(Error::AllZero)));
        let mut a = CMatrix::identity(2, 2);
        a[(0, 1)] = c(1.0, 0.0);
        assert!(matches!(extract_rank_one(&a), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn extract_reconstruction_bound() {
        let u = cv(&[(1.0, 0.5), (-0.3, 0.2), (0.0, 1.0)]);
        let w = cv(&[(0.2, 0.0), (1.0, -1.0), (0.1, 0.1)]);
        let v = outer(&u) + outer(&w).scale(1e-3);
        let (x, ratio) = extract_rank_one(&v).unwrap();
        let err = frobenius(&(outer(&x) - &v));
        assert!(err <= 2.0 * ratio * v.trace().re + 1e-9);
    }

    #[test]
    fn srm_without_wiretap_is_mrt_without_jamming() {
        let cfg = SystemConfig::new(2, 2).unwrap();
        let base = sample_channels(&cfg, 4);
        let ch = ChannelSet::new(base.h_bd.clone(), CVector::from_element(2, ZERO), base.h_cd.clone(), base.h_ce.clone()).unwrap();
        let r = solve_b_cj_srm(&ch, &cfg).unwrap();
        let expect = cfg.p_bs_max * norm_sqr(&ch.h_bd) / cfg.sigma2;
        assert!(rel(r.sinr_d, expect) < 1e-6, "{} vs {}", r.sinr_d, expect);
        assert!(rel(r.design.bs_power(), cfg.p_bs_max) < 1e-6);
        // jamming inside the null space of h_cd is also optimal
        assert!(crate::linalg::quad_form(&r.q_big, &ch.h_cd) < 1e-6 * cfg.sigma2);
    }

    #[test]
    fn srm_orthogonal_wiretap_reaches_mrt() {
        let cfg = SystemConfig::new(2, 2).unwrap();
        let base = sample_channels(&cfg, 5);
        let ch = ChannelSet::new(cv(&[(1.0, 0.0), (0.0, 0.0)]), cv(&[(0.0, 0.0), (0.0, 0.8)]), base.h_cd, base.h_ce).unwrap();
        let r = solve_b_cj_srm(&ch, &cfg).unwrap();
        assert!(rel(r.sinr_d, cfg.p_bs_max / cfg.sigma2) < 1e-6);
        assert!(r.sinr_e < 1e-6);
    }

    #[test]
    fn tpm_without_wiretap_is_mrt_power_control() {
        let cfg = SystemConfig::new(3, 2).unwrap();
        let base = sample_channels(&cfg, 6);
        let ch = ChannelSet::new(base.h_bd.clone(), CVector::from_element(3, ZERO), base.h_cd.clone(), base.h_ce.clone()).unwrap();
        let r = solve_b_cj_tpm(&ch, &cfg).unwrap();
        let expect = cfg.gamma_d() * cfg.sigma2 / norm_sqr(&ch.h_bd);
        assert!(rel(r.objective, expect) < 1e-6, "{} vs {}", r.objective, expect);
        assert!(rel(r.design.bs_power(), expect) < 1e-6);
    }

    #[test]
    fn srm_recovery_and_certificate() {
        let cfg = SystemConfig::new(4, 3).unwrap();
        for trial in 0..5 {
            let ch = sample_channels(&cfg, trial);
            let r = solve_b_cj_srm(&ch, &cfg).unwrap();
            assert!(rel(r.sinr_d, r.objective) < 1e-6);
            assert!(rel(r.relaxed_sinr_d, r.objective) < 1e-6);
            assert!(r.sinr_e <= cfg.gamma_e * (1.0 + 1e-6));
            assert!(check_feasibility(&r.design, &cfg).feasible());
            let k = verify_kkt_rank_one(&r, &r.solution, Scheme::Srm, &ch).unwrap();
            assert!(k.lambda1 > 0.0);
            assert!(k.rank1_certified, "{k:?}");
            assert!(k.mu.iter().all(|&m| m >= -1e-9));
        }
    }

    #[test]
    fn tpm_meets_target_and_certifies() {
        let cfg = SystemConfig::new(4, 3).unwrap();
        for trial in 0..5 {
            let ch = sample_channels(&cfg, trial);
            let r = solve_b_cj_tpm(&ch, &cfg).unwrap();
            assert!(r.r_s >= cfg.rs_min - 1e-3);
            assert!(r.sinr_e <= cfg.gamma_e * (1.0 + 1e-6));
            let k = verify_kkt_rank_one(&r, &r.solution, Scheme::Tpm, &ch).unwrap();
            assert!(k.comp_slack_residual <= COMP_SLACK_TOL);
            assert!(k.rank1_certified);
        }
    }

    #[test]
    fn certificate_fails_for_full_rank_matrix() {
        let cfg = SystemConfig::new(2, 2).unwrap();
        let ch = sample_channels(&cfg, 7);
        let mut r = solve_b_cj_tpm(&ch, &cfg).unwrap();
        r.v_big = CMatrix::identity(2, 2);
        r.rank1_ratio = 1.0;
        let k = verify_kkt_rank_one(&r, &r.solution, Scheme::Tpm, &ch).unwrap();
        assert!(!k.rank1_certified);
    }

    #[test]
    fn srm_nondecreasing_in_budget() {
        let cfg = SystemConfig::new(3, 2).unwrap();
        let ch = sample_channels(&cfg, 8);
        let mut last = 0.0;
        for dbm in [30.0, 35.0, 40.0, 45.0, 50.0] {
            let r = solve_b_cj_srm(&ch, &cfg.clone().with_p_bs_dbm(dbm).unwrap()).unwrap();
            assert!(r.sinr_d >= last * (1.0 - 1e-4));
            last = r.sinr_d;
        }
    }

    #[test]
    fn idle_extra_node_changes_nothing() {
        let cfg = SystemConfig::new(3, 2).unwrap();
        let ch = sample_channels(&cfg, 9);
        let base = solve_b_cj_srm(&ch, &cfg).unwrap();
        let mut p = cfg.p_harvested.clone();
        p.push(0.0);
        let cfg3 = cfg.clone().with_n(3).unwrap().with_harvest(p).unwrap();
        let ext = |h: &CVector, z| CVector::from_iterator(3, h.iter().copied().chain(core::iter::once(z)));
        let ch3 = ChannelSet::new(ch.h_bd.clone(), ch.h_be.clone(), ext(&ch.h_cd, c(0.7, -0.2)), ext(&ch.h_ce, c(-1.1, 0.4))).unwrap();
        let r = solve_b_cj_srm(&ch3, &cfg3).unwrap();
        assert!(rel(r.sinr_d, base.sinr_d) < 1e-5);
    }

    #[test]
    fn srm_at_tpm_power_meets_target() {
        let cfg = SystemConfig::new(3, 2).unwrap();
        for trial in 0..4 {
            let ch = sample_channels(&cfg, trial);
            let tpm = solve_b_cj_tpm(&ch, &cfg).unwrap();
            let srm = solve_b_cj_srm(&ch, &cfg.clone().with_p_bs(tpm.design.bs_power()).unwrap()).unwrap();
            assert!(srm.r_s >= cfg.rs_min - 1e-3);
        }
    }

    #[test]
    fn doubling_gamma_e_does_not_raise_power() {
        let cfg = SystemConfig::new(3, 2).unwrap().with_rs_min(0.0).unwrap();
        let ch = sample_channels(&cfg, 10);
        let p1 = solve_b_cj_tpm(&ch, &cfg).unwrap().objective;
        let p2 = solve_b_cj_tpm(&ch, &cfg.clone().with_gamma_e(2.0 * cfg.gamma_e).unwrap()).unwrap().objective;
        assert!(p2 >= p1 * (1.0 - 1e-6));
    }
}
