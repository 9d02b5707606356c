//! Low-complexity schemes built on the convex-concave procedure.
//!
//! Both schemes optimize the beamformer `v` and a jamming weight vector `q`
//! directly (`Q = q q^H`). Each iteration replaces the convex functions that
//! appear on the wrong side of a constraint by their first-order Taylor
//! minorants at the current point and solves the resulting second-order cone
//! program.
//!
//! The cone programs are built in scaled coordinates `v = s_v v̂`,
//! `q = s_q q̂`, `t = s_t t̂` with every row divided by `σ²`, so their
//! coefficients stay within a few orders of magnitude of one.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::conic::{self, complex_inner, ConeProgram, ConeSolution, LinExpr, SolveStatus};
use crate::error::{Error, Result};
use crate::linalg::{inner, norm_sqr, project_out, CMatrix, CVector, ONE};
use crate::model::{rates, ChannelSet, SystemConfig, TransmitDesign};
use crate::sdp_schemes::Scheme;
#[cfg(not(feature = "std"))]
use num_traits::Float;

/// Convergence threshold on `t` for LC-B-CJ-SRM.
pub const THETA1: f64 = 0.01;
/// Convergence threshold in dB on `‖v‖²` for LC-B-CJ-TPM.
pub const THETA2_DB: f64 = 1.0;
pub const I_MAX: usize = 50;
/// Lower bound replacing the strict `t > 0`.
pub const T_MIN: f64 = 1e-9;
/// Accepted relative excess of the true eavesdropper SINR over `γ_e`.
pub const TRUE_CONSTRAINT_TOL: f64 = 1e-4;

/// One row of the per-iteration trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub iter: usize,
    /// `t` (SRM) or `‖v‖²` (TPM) after the iteration.
    pub objective: f64,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub gap: f64,
    /// `max(0, sinr_e/γ_e − 1)` of the iterate.
    pub eavesdropper_excess: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CccpState {
    pub v_cur: CVector,
    pub q_cur: CVector,
    /// Expansion point for `t` (SRM); 1 for TPM.
    pub t_cur: f64,
    pub iter: usize,
    /// Starts with the value at the initial point.
    pub objective_history: Vec<f64>,
    pub trace: Vec<TraceRow>,
    /// Subproblem solutions discarded because solver round-off made them
    /// worse than the current point.
    pub rejected_steps: usize,
    pub converged: bool,
}

impl CccpState {
    fn new(v: CVector, q: CVector, t: f64, objective: f64) -> Self {
        CccpState {
            v_cur: v,
            q_cur: q,
            t_cur: t,
            iter: 0,
            objective_history: alloc::vec![objective],
            trace: Vec::new(),
            rejected_steps: 0,
            converged: false,
        }
    }

    pub fn design(&self) -> TransmitDesign {
        TransmitDesign::from_vectors(self.v_cur.clone(), self.q_cur.clone())
    }

    /// Whitespace-separated trace, one line per iteration, with a header.
    pub fn trace_text(&self) -> String {
        let mut s = String::from("iter objective primal_res dual_res gap eve_excess\n");
        for r in &self.trace {
            let _ = writeln!(
                s,
                "{} {:.9e} {:.3e} {:.3e} {:.3e} {:.3e}",
                r.iter, r.objective, r.primal_residual, r.dual_residual, r.gap, r.eavesdropper_excess
            );
        }
        s
    }
}

/// Linearization of `v^H A v / t` at `(ṽ, t̃)`: returns `a = −(2/t̃) A ṽ` and
/// `b = ṽ^H A ṽ / t̃²`, so the minorant is `−Re{a^H v} − b t`.
pub fn taylor_linearize_ratio(a: &CMatrix, v_pt: &CVector, t_pt: f64) -> Result<(CVector, f64)> {
    if !(t_pt > 0.0) {
        return Err(Error::NonPositiveExpansionPoint(t_pt));
    }
    let av = a * v_pt;
    let b = inner(v_pt, &av).re / (t_pt * t_pt);
    Ok((av * ONE.scale(-2.0 / t_pt), b))
}

/// Evaluates `−Re{a^H v} − b t`.
pub fn ratio_minorant(a: &CVector, b: f64, v: &CVector, t: f64) -> f64 {
    -inner(a, v).re - b * t
}

/// Affine minorant `Re{g^H v} + c` of `v^H A v`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineMinorant {
    pub g: CVector,
    pub c: f64,
}

impl AffineMinorant {
    pub fn eval(&self, v: &CVector) -> f64 {
        inner(&self.g, v).re + self.c
    }
}

/// Linearization `2Re{ṽ^H A v} − ṽ^H A ṽ` of `v^H A v` at `ṽ`.
pub fn taylor_linearize_quadratic(a: &CMatrix, v_pt: &CVector) -> AffineMinorant {
    let av = a * v_pt;
    let c = -inner(v_pt, &av).re;
    AffineMinorant { g: av * ONE.scale(2.0), c }
}

fn node_scale(cfg: &SystemConfig) -> f64 {
    let p = cfg.p_max_node();
    if p > 0.0 {
        p.sqrt()
    } else {
        1.0
    }
}

fn srm_t_scale(ch: &ChannelSet, cfg: &SystemConfig) -> f64 {
    let s = cfg.p_bs_max * norm_sqr(&ch.h_bd) / cfg.sigma2;
    if s > 0.0 {
        s
    } else {
        1.0
    }
}

fn tpm_v_scale(ch: &ChannelSet, cfg: &SystemConfig) -> f64 {
    let hb = norm_sqr(&ch.h_bd);
    if hb > 0.0 {
        (cfg.gamma_d().max(1e-3) * cfg.sigma2 / hb).sqrt()
    } else {
        1.0
    }
}

/// `‖[2x; y − z]‖ ≤ y + z`, i.e. `|x|² ≤ y z` for complex `x`.
fn rotated_cone(p: &mut ConeProgram, name: &str, x: [LinExpr; 2], y: LinExpr, z: LinExpr) {
    let [xr, xi] = x;
    let diff = y.clone().plus(&z.clone().scaled(-1.0));
    p.soc(name, alloc::vec![xr.scaled(2.0), xi.scaled(2.0), diff], y.plus(&z));
}

/// Eavesdropper surrogate `|h_be^H v|² ≤ γ_e(ψ_D(q, q̃) + σ²)` in scaled
/// units. Written directly from the squared form; the second entry of the
/// typeset cone differs only by where `σ²` is folded in.
fn eavesdropper_cone(p: &mut ConeProgram, ch: &ChannelSet, cfg: &SystemConfig, v: conic::VecVar, q: conic::VecVar, sv: f64, sq: f64, q_pt: &CVector) {
    let s2 = cfg.sigma2;
    let psi = taylor_linearize_quadratic(&ch.d(), q_pt);
    let y = LinExpr::constant(1.0 + psi.c / s2).re_inner(q, &psi.g, sq / s2);
    rotated_cone(p, "eavesdropper", complex_inner(v, &ch.h_be, sv / s2.sqrt()), y, LinExpr::constant(cfg.gamma_e));
}

fn node_cones(p: &mut ConeProgram, cfg: &SystemConfig, q: conic::VecVar, sq: f64) {
    for (i, &pi) in cfg.p_harvested.iter().enumerate() {
        let (re, im) = (LinExpr::new().term(q.re_index(i), 1.0), LinExpr::new().term(q.im_index(i), 1.0));
        if pi > 0.0 {
            p.soc(&format!("node_{i}"), alloc::vec![re, im], LinExpr::constant(pi.sqrt() / sq));
        } else {
            p.equal_zero(&format!("node_{i}_re"), re);
            p.equal_zero(&format!("node_{i}_im"), im);
        }
    }
}

/// Scaling of a built subproblem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SocpScaling {
    pub v_scale: f64,
    pub q_scale: f64,
    pub t_scale: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CccpProgram {
    pub program: ConeProgram,
    pub scaling: SocpScaling,
}

/// Convex subproblem of LC-B-CJ-SRM around the state's point.
pub fn build_lc_srm_socp(state: &CccpState, ch: &ChannelSet, cfg: &SystemConfig) -> Result<CccpProgram> {
    cfg.validate()?;
    ch.check_against(cfg)?;
    let s2 = cfg.sigma2;
    let (sv, sq, st) = (cfg.p_bs_max.sqrt(), node_scale(cfg), srm_t_scale(ch, cfg));
    let (a, b) = taylor_linearize_ratio(&ch.a(), &state.v_cur, state.t_cur)?;

    let mut p = ConeProgram::new();
    let v = p.complex_vector("v", cfg.m);
    let q = p.complex_vector("q", cfg.n);
    let t = p.scalar("t");
    p.maximize(LinExpr::new().scalar(t, 1.0));
    // |h_cd^H q|² ≤ ζ_A(v, t) − σ²
    let y = LinExpr::constant(-1.0).re_inner(v, &a, -sv / s2).scalar(t, -b * st / s2);
    rotated_cone(&mut p, "destination", complex_inner(q, &ch.h_cd, sq / s2.sqrt()), y, LinExpr::constant(1.0));
    eavesdropper_cone(&mut p, ch, cfg, v, q, sv, sq, &state.q_cur);
    let all_v: Vec<LinExpr> = (0..cfg.m)
        .flat_map(|k| [LinExpr::new().term(v.re_index(k), 1.0), LinExpr::new().term(v.im_index(k), 1.0)])
        .collect();
    p.soc("bs_power", all_v, LinExpr::constant(1.0));
    node_cones(&mut p, cfg, q, sq);
    p.less_eq_zero("t_positive", LinExpr::constant(T_MIN / st).scalar(t, -1.0));
    Ok(CccpProgram { program: p, scaling: SocpScaling { v_scale: sv, q_scale: sq, t_scale: st } })
}

/// Convex subproblem of LC-B-CJ-TPM around the state's point. The objective
/// `‖v‖²` is minimized through its epigraph `‖v‖ ≤ s`.
pub fn build_lc_tpm_socp(state: &CccpState, ch: &ChannelSet, cfg: &SystemConfig) -> Result<CccpProgram> {
    cfg.validate()?;
    ch.check_against(cfg)?;
    let s2 = cfg.sigma2;
    let gamma_d = cfg.gamma_d();
    let (sv, sq) = (tpm_v_scale(ch, cfg), node_scale(cfg));
    let psi = taylor_linearize_quadratic(&ch.a(), &state.v_cur);

    let mut p = ConeProgram::new();
    let v = p.complex_vector("v", cfg.m);
    let q = p.complex_vector("q", cfg.n);
    let s = p.scalar("s");
    p.minimize(LinExpr::new().scalar(s, 1.0));
    // |h_cd^H q|² ≤ ψ_A(v, ṽ)/γ_d − σ²
    let y = LinExpr::constant(psi.c / (gamma_d * s2) - 1.0).re_inner(v, &psi.g, sv / (gamma_d * s2));
    rotated_cone(&mut p, "destination", complex_inner(q, &ch.h_cd, sq / s2.sqrt()), y, LinExpr::constant(1.0));
    eavesdropper_cone(&mut p, ch, cfg, v, q, sv, sq, &state.q_cur);
    node_cones(&mut p, cfg, q, sq);
    let all_v: Vec<LinExpr> = (0..cfg.m)
        .flat_map(|k| [LinExpr::new().term(v.re_index(k), 1.0), LinExpr::new().term(v.im_index(k), 1.0)])
        .collect();
    p.soc("objective", all_v, LinExpr::new().scalar(s, 1.0));
    Ok(CccpProgram { program: p, scaling: SocpScaling { v_scale: sv, q_scale: sq, t_scale: 1.0 } })
}

fn direction_outside(h_bd: &CVector, h_be: &CVector) -> Option<CVector> {
    let u = project_out(h_bd, h_be);
    let n = norm_sqr(&u);
    if n > 1e-12 * norm_sqr(h_bd) {
        Some(u.unscale(n.sqrt()))
    } else {
        None
    }
}

/// Starting point: `q₀ᵢ = √Pᵢ/2` and `v₀` along the part of `h_bd` orthogonal
/// to `h_be`, at full power (SRM) or at the power meeting `γ_d` (TPM). When
/// that direction does not exist, `v₀` is `h_bd` scaled to the eavesdropper
/// limit.
pub fn initialize_cccp(ch: &ChannelSet, cfg: &SystemConfig, mode: Scheme) -> Result<CccpState> {
    cfg.validate()?;
    ch.check_against(cfg)?;
    let s2 = cfg.sigma2;
    let q0 = CVector::from_iterator(cfg.n, cfg.p_harvested.iter().map(|&p| ONE.scale(p.sqrt() / 2.0)));
    let jam_d = inner(&ch.h_cd, &q0).norm_sqr();
    let jam_e = inner(&ch.h_ce, &q0).norm_sqr();
    let hb = norm_sqr(&ch.h_bd);
    if hb == 0.0 {
        return Err(Error::InitializationInfeasible);
    }
    let eve_cap = cfg.gamma_e * (jam_e + s2);
    let (dir, leak) = match direction_outside(&ch.h_bd, &ch.h_be) {
        Some(u) => (u, 0.0),
        None => {
            let u = ch.h_bd.unscale(hb.sqrt());
            let l = inner(&ch.h_be, &u).norm_sqr();
            (u, l)
        }
    };
    let gain = inner(&ch.h_bd, &dir).norm_sqr();
    let power = match mode {
        Scheme::Srm => {
            let mut p = cfg.p_bs_max;
            if leak > 0.0 {
                p = p.min(eve_cap / leak);
            }
            p
        }
        Scheme::Tpm => {
            let p = cfg.gamma_d() * (jam_d + s2) / gain;
            if leak * p > eve_cap * (1.0 + 1e-12) {
                return Err(Error::InitializationInfeasible);
            }
            p
        }
    };
    let v0 = dir * ONE.scale(power.sqrt());
    let d = TransmitDesign::from_vectors(v0.clone(), q0.clone());
    let r = rates(&d, ch, s2)?;
    match mode {
        Scheme::Srm => {
            if !(r.sinr_d > T_MIN) {
                return Err(Error::InitializationInfeasible);
            }
            Ok(CccpState::new(v0, q0, r.sinr_d, r.sinr_d))
        }
        Scheme::Tpm => Ok(CccpState::new(v0, q0, 1.0, power)),
    }
}

fn solve_sub(cp: &CccpProgram) -> Result<(ConeSolution, CVector, CVector)> {
    let sol = conic::solve(&cp.program, conic::DEFAULT_TOL)?;
    match sol.status {
        SolveStatus::Optimal => {}
        SolveStatus::Infeasible => return Err(Error::Infeasible),
        s => return Err(Error::Solver(s)),
    }
    let v = sol.vector("v").ok_or_else(|| Error::MissingDuals("v".into()))? * ONE.scale(cp.scaling.v_scale);
    let q = sol.vector("q").ok_or_else(|| Error::MissingDuals("q".into()))? * ONE.scale(cp.scaling.q_scale);
    Ok((sol, v, q))
}

fn eavesdropper_excess(ch: &ChannelSet, cfg: &SystemConfig, v: &CVector, q: &CVector) -> f64 {
    let lhs = inner(&ch.h_be, v).norm_sqr();
    let cap = cfg.gamma_e * (inner(&ch.h_ce, q).norm_sqr() + cfg.sigma2);
    if lhs <= cap {
        0.0
    } else if cap > 0.0 {
        lhs / cap - 1.0
    } else {
        f64::INFINITY
    }
}

fn trace_row(iter: usize, objective: f64, sol: &ConeSolution, excess: f64) -> TraceRow {
    TraceRow {
        iter,
        objective,
        primal_residual: sol.residuals.primal,
        dual_residual: sol.residuals.dual,
        gap: sol.residuals.gap,
        eavesdropper_excess: excess,
    }
}

/// Clips per-node round-off above the budgets.
fn clip_nodes(q: &mut CVector, cfg: &SystemConfig) {
    for (z, &p) in q.iter_mut().zip(&cfg.p_harvested) {
        let n = z.norm();
        if n * n > p && n > 0.0 {
            *z *= p.sqrt() / n;
        }
    }
}

fn clip_power(v: &mut CVector, p: f64) {
    let n = norm_sqr(v);
    if n > p {
        *v *= ONE.scale((p / n).sqrt());
    }
}

/// LC-B-CJ-SRM. The expansion point for `t` is the destination SINR achieved
/// by the current `(v, q)`, which is never below the subproblem's `t` and
/// keeps the point feasible for the next subproblem.
pub fn run_lc_b_cj_srm(ch: &ChannelSet, cfg: &SystemConfig, theta1: f64, i_max: usize) -> Result<(TransmitDesign, CccpState)> {
    if !(theta1 > 0.0) {
        return Err(Error::InvalidConfig(format!("theta1 must be positive, got {theta1}")));
    }
    let mut st = initialize_cccp(ch, cfg, Scheme::Srm)?;
    while st.iter < i_max {
        let cp = build_lc_srm_socp(&st, ch, cfg)?;
        let (sol, mut v, mut q) = solve_sub(&cp)?;
        clip_power(&mut v, cfg.p_bs_max);
        clip_nodes(&mut q, cfg);
        let excess = eavesdropper_excess(ch, cfg, &v, &q);
        if excess > TRUE_CONSTRAINT_TOL {
            return Err(Error::Solver(SolveStatus::NumericalFailure));
        }
        let t_new = rates(&TransmitDesign::from_vectors(v.clone(), q.clone()), ch, cfg.sigma2)?.sinr_d;
        st.iter += 1;
        let t_old = st.t_cur;
        if t_new < t_old {
            st.rejected_steps += 1;
            st.trace.push(trace_row(st.iter, t_old, &sol, excess));
            st.objective_history.push(t_old);
            st.converged = true;
            break;
        }
        st.v_cur = v;
        st.q_cur = q;
        st.t_cur = t_new;
        st.objective_history.push(t_new);
        st.trace.push(trace_row(st.iter, t_new, &sol, excess));
        if (t_new - t_old).abs() < theta1 {
            st.converged = true;
            break;
        }
    }
    Ok((st.design(), st))
}

fn db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// LC-B-CJ-TPM.
pub fn run_lc_b_cj_tpm(ch: &ChannelSet, cfg: &SystemConfig, theta2: f64, i_max: usize) -> Result<(TransmitDesign, CccpState)> {
    if !(theta2 > 0.0) {
        return Err(Error::InvalidConfig(format!("theta2 must be positive, got {theta2}")));
    }
    let mut st = initialize_cccp(ch, cfg, Scheme::Tpm)?;
    while st.iter < i_max {
        let cp = build_lc_tpm_socp(&st, ch, cfg)?;
        let (sol, v, mut q) = solve_sub(&cp)?;
        clip_nodes(&mut q, cfg);
        let excess = eavesdropper_excess(ch, cfg, &v, &q);
        if excess > TRUE_CONSTRAINT_TOL {
            return Err(Error::Solver(SolveStatus::NumericalFailure));
        }
        let p_new = norm_sqr(&v);
        let p_old = norm_sqr(&st.v_cur);
        st.iter += 1;
        if p_new > p_old {
            st.rejected_steps += 1;
            st.trace.push(trace_row(st.iter, p_old, &sol, excess));
            st.objective_history.push(p_old);
            st.converged = true;
            break;
        }
        st.v_cur = v;
        st.q_cur = q;
        st.objective_history.push(p_new);
        st.trace.push(trace_row(st.iter, p_new, &sol, excess));
        if (db(p_new) - db(p_old)).abs() < theta2 {
            st.converged = true;
            break;
        }
    }
    Ok((st.design(), st))
}

/// Largest constraint violation of the subproblem at the state's own point.
pub fn expansion_point_violation(cp: &CccpProgram, state: &CccpState) -> f64 {
    let p = &cp.program;
    let mut x = alloc::vec![0.0; p.n_params()];
    let sc = cp.scaling;
    for (name, val, scale) in [("v", &state.v_cur, sc.v_scale), ("q", &state.q_cur, sc.q_scale)] {
        let var = p.vector_var(name).expect("subproblem declares v and q");
        for (k, z) in val.iter().enumerate() {
            x[var.re_index(k)] = z.re / scale;
            x[var.im_index(k)] = z.im / scale;
        }
    }
    if let Some(t) = p.scalar_var("t") {
        x[t.index()] = state.t_cur / sc.t_scale;
    }
    if let Some(s) = p.scalar_var("s") {
        x[s.index()] = norm_sqr(&state.v_cur).sqrt() / sc.v_scale;
    }
    p.max_violation(&x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, quad_form, ZERO};
    use crate::model::{check_feasibility, sample_channels};
    use crate::sdp_schemes::{solve_b_cj_srm, solve_b_cj_tpm};
    use rand_chacha::ChaCha8Rng;
    use rand_core::{RngCore, SeedableRng};
    use rand_distr::{Distribution, StandardNormal, Uniform};

    fn cvec(rng: &mut ChaCha8Rng, n: usize) -> CVector {
        CVector::from_fn(n, |_, _| {
            let (a, b): (f64, f64) = (StandardNormal.sample(rng), StandardNormal.sample(rng));
            c(a, b)
        })
    }

    fn psd(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
        let g = CMatrix::from_fn(n, n, |_, _| {
            let (a, b): (f64, f64) = (StandardNormal.sample(rng), StandardNormal.sample(rng));
            c(a, b)
        });
        &g * g.adjoint()
    }

    #[test]
    fn ratio_linearization_at_identity() {
        let e1 = CVector::from_vec(alloc::vec![ONE, ZERO]);
        let (a, b) = taylor_linearize_ratio(&CMatrix::identity(2, 2), &e1, 1.0).unwrap();
        assert_eq!(a, CVector::from_vec(alloc::vec![c(-2.0, 0.0), ZERO]));
        assert_eq!(b, 1.0);
        assert_eq!(ratio_minorant(&a, b, &e1, 1.0), 1.0);
    }

    #[test]
    fn ratio_linearization_at_zero_vanishes() {
        let z = CVector::zeros(3);
        let (a, b) = taylor_linearize_ratio(&CMatrix::identity(3, 3), &z, 2.0).unwrap();
        assert!(a.iter().all(|x| *x == ZERO));
        assert_eq!(b, 0.0);
    }

    #[test]
    fn ratio_linearization_rejects_nonpositive_t() {
        let e = CVector::from_element(1, ONE);
        assert!(matches!(taylor_linearize_ratio(&CMatrix::identity(1, 1), &e, 0.0), Err(Error::NonPositiveExpansionPoint(_))));
    }

    #[test]
    fn quadratic_linearization_is_tangent() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = psd(&mut rng, 3);
        let v = cvec(&mut rng, 3);
        let m = taylor_linearize_quadratic(&a, &v);
        assert!((m.eval(&v) - quad_form(&a, &v)).abs() < 1e-9 * quad_form(&a, &v));
        let z = taylor_linearize_quadratic(&a, &CVector::zeros(3));
        assert_eq!(z.eval(&v), 0.0);
    }

    #[test]
    fn minorants_hold_on_random_probes() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let ut = Uniform::new(0.01, 10.0);
        for _ in 0..2000 {
            let n = 1 + (rng.next_u32() % 4) as usize;
            let a = psd(&mut rng, n);
            let (vt, v) = (cvec(&mut rng, n), cvec(&mut rng, n));
            let (tt, t) = (ut.sample(&mut rng), ut.sample(&mut rng));
            let (av, b) = taylor_linearize_ratio(&a, &vt, tt).unwrap();
            let exact = quad_form(&a, &v) / t;
            assert!(ratio_minorant(&av, b, &v, t) <= exact + 1e-9 * (1.0 + exact));
            let q = quad_form(&a, &v);
            assert!(taylor_linearize_quadratic(&a, &vt).eval(&v) <= q + 1e-9 * (1.0 + q));
        }
    }

    #[test]
    fn subproblem_cone_counts() {
        let cfg = SystemConfig::new(3, 4).unwrap();
        let ch = sample_channels(&cfg, 0);
        let st = initialize_cccp(&ch, &cfg, Scheme::Srm).unwrap();
        let p = build_lc_srm_socp(&st, &ch, &cfg).unwrap().program;
        assert_eq!(p.soc_constraints().len() + p.ineq_constraints().len(), cfg.n + 4);
        let st = initialize_cccp(&ch, &cfg, Scheme::Tpm).unwrap();
        let p = build_lc_tpm_socp(&st, &ch, &cfg).unwrap().program;
        let constraint_cones = p.soc_constraints().iter().filter(|s| s.name != "objective").count();
        assert_eq!(constraint_cones, cfg.n + 2);
        assert_eq!(p.ineq_constraints().len(), 0);
    }

    #[test]
    fn orthogonal_wiretap_start_is_mrt() {
        let cfg = SystemConfig::new(2, 2).unwrap();
        let base = sample_channels(&cfg, 1);
        let h_bd = CVector::from_vec(alloc::vec![c(0.0, 2.0), ZERO]);
        let ch = ChannelSet::new(h_bd, CVector::from_vec(alloc::vec![ZERO, c(1.0, 1.0)]), base.h_cd, base.h_ce).unwrap();
        let st = initialize_cccp(&ch, &cfg, Scheme::Srm).unwrap();
        assert!((norm_sqr(&st.v_cur) - cfg.p_bs_max).abs() < 1e-12);
        assert!(st.v_cur[1].norm() < 1e-12);
        let q0 = &st.q_cur;
        let expect = cfg.p_bs_max * 4.0 / (inner(&ch.h_cd, q0).norm_sqr() + cfg.sigma2);
        assert!((st.t_cur - expect).abs() < 1e-9 * expect);
    }

    #[test]
    fn single_antenna_start_sits_on_eavesdropper_limit() {
        let cfg = SystemConfig::new(1, 2).unwrap();
        let ch = sample_channels(&cfg, 2);
        let st = initialize_cccp(&ch, &cfg, Scheme::Srm).unwrap();
        let r = rates(&st.design(), &ch, cfg.sigma2).unwrap();
        assert!(r.sinr_e <= cfg.gamma_e * (1.0 + 1e-9));
        assert!(st.t_cur > 0.0);
    }

    #[test]
    fn aligned_channels_without_leakage_cannot_start() {
        let cfg = SystemConfig::new(2, 2).unwrap().with_gamma_e(0.0).unwrap();
        let base = sample_channels(&cfg, 3);
        let ch = ChannelSet::new(base.h_bd.clone(), base.h_bd.scale(0.5), base.h_cd, base.h_ce).unwrap();
        assert!(matches!(initialize_cccp(&ch, &cfg, Scheme::Srm), Err(Error::InitializationInfeasible)));
        assert!(matches!(initialize_cccp(&ch, &cfg, Scheme::Tpm), Err(Error::InitializationInfeasible)));
    }

    #[test]
    fn start_points_are_feasible_for_their_subproblems() {
        let cfg = SystemConfig::new(4, 3).unwrap();
        for trial in 0..20 {
            let ch = sample_channels(&cfg, trial);
            let st = initialize_cccp(&ch, &cfg, Scheme::Srm).unwrap();
            assert!(expansion_point_violation(&build_lc_srm_socp(&st, &ch, &cfg).unwrap(), &st) < 1e-9);
            let st = initialize_cccp(&ch, &cfg, Scheme::Tpm).unwrap();
            assert!(expansion_point_violation(&build_lc_tpm_socp(&st, &ch, &cfg).unwrap(), &st) < 1e-9);
        }
    }

    #[test]
    fn iterates_are_feasible_for_their_subproblems() {
        let cfg = SystemConfig::new(4, 3).unwrap();
        let ch = sample_channels(&cfg, 5);
        let (_, st) = run_lc_b_cj_srm(&ch, &cfg, THETA1, 3).unwrap();
        assert!(expansion_point_violation(&build_lc_srm_socp(&st, &ch, &cfg).unwrap(), &st) < 1e-6);
        let (_, st) = run_lc_b_cj_tpm(&ch, &cfg, THETA2_DB, 3).unwrap();
        assert!(expansion_point_violation(&build_lc_tpm_socp(&st, &ch, &cfg).unwrap(), &st) < 1e-6);
    }

    #[test]
    fn one_iteration_returns_first_solution() {
        let cfg = SystemConfig::new(3, 2).unwrap();
        let ch = sample_channels(&cfg, 6);
        let (d, st) = run_lc_b_cj_srm(&ch, &cfg, THETA1, 1).unwrap();
        assert_eq!(st.iter, 1);
        assert_eq!(st.objective_history.len(), 2);
        assert_eq!(d.v, st.v_cur);
    }

    #[test]
    fn srm_without_wiretap_matches_sdp() {
        let cfg = SystemConfig::new(3, 2).unwrap();
        let base = sample_channels(&cfg, 7);
        let ch = ChannelSet::new(base.h_bd.clone(), CVector::zeros(3), base.h_cd.clone(), base.h_ce.clone()).unwrap();
        let sdp = solve_b_cj_srm(&ch, &cfg).unwrap();
        let (d, st) = run_lc_b_cj_srm(&ch, &cfg, THETA1, I_MAX).unwrap();
        let r = rates(&d, &ch, cfg.sigma2).unwrap();
        assert!(st.iter <= 20);
        assert!(r.sinr_d >= 0.95 * sdp.sinr_d);
    }

    #[test]
    fn srm_histories_and_design() {
        let cfg = SystemConfig::new(4, 3).unwrap();
        for trial in 0..5 {
            let ch = sample_channels(&cfg, trial);
            let (d, st) = run_lc_b_cj_srm(&ch, &cfg, THETA1, I_MAX).unwrap();
            assert!(st.objective_history.windows(2).all(|w| w[1] >= w[0] - 1e-7));
            let r = rates(&d, &ch, cfg.sigma2).unwrap();
            assert!((st.t_cur - r.sinr_d).abs() <= 1e-6 * r.sinr_d);
            assert!(r.sinr_e <= cfg.gamma_e * (1.0 + TRUE_CONSTRAINT_TOL));
            assert!(check_feasibility(&d, &cfg).feasible());
            assert!(crate::model::q_vec_consistent(&d));
            let sdp = solve_b_cj_srm(&ch, &cfg).unwrap();
            assert!(r.r_s <= sdp.r_s + 1e-4);
        }
    }

    #[test]
    fn tpm_histories_and_contract() {
        let cfg = SystemConfig::new(4, 3).unwrap();
        for trial in 0..5 {
            let ch = sample_channels(&cfg, trial);
            let (d, st) = run_lc_b_cj_tpm(&ch, &cfg, THETA2_DB, I_MAX).unwrap();
            assert!(st.objective_history.windows(2).all(|w| w[1] <= w[0] + 1e-7));
            let r = rates(&d, &ch, cfg.sigma2).unwrap();
            assert!(r.r_s >= cfg.rs_min - 1e-2);
            assert!(r.sinr_e <= cfg.gamma_e * (1.0 + TRUE_CONSTRAINT_TOL));
            let sdp = solve_b_cj_tpm(&ch, &cfg).unwrap();
            assert!(d.bs_power() >= sdp.objective - 1e-6);
        }
    }

    #[test]
    fn tpm_without_wiretap_reaches_mrt_power() {
        let cfg = SystemConfig::new(3, 2).unwrap();
        let base = sample_channels(&cfg, 8);
        let ch = ChannelSet::new(base.h_bd.clone(), CVector::zeros(3), base.h_cd.clone(), base.h_ce.clone()).unwrap();
        let (d, _) = run_lc_b_cj_tpm(&ch, &cfg, 0.01, I_MAX).unwrap();
        let target = cfg.gamma_d() * cfg.sigma2 / norm_sqr(&ch.h_bd);
        assert!((d.bs_power() - target).abs() <= 0.05 * target);
    }

    #[test]
    fn converged_point_is_nearly_fixed() {
        let cfg = SystemConfig::new(4, 3).unwrap();
        let ch = sample_channels(&cfg, 9);
        let (_, st) = run_lc_b_cj_srm(&ch, &cfg, THETA1, I_MAX).unwrap();
        assert!(st.converged);
        let (_, v, q) = solve_sub(&build_lc_srm_socp(&st, &ch, &cfg).unwrap()).unwrap();
        let again = rates(&TransmitDesign::from_vectors(v, q), &ch, cfg.sigma2).unwrap().sinr_d;
        assert!((again - st.t_cur).abs() < THETA1, "{again} vs {}", st.t_cur);
    }

    #[test]
    fn trace_has_one_line_per_iteration() {
        let cfg = SystemConfig::new(3, 2).unwrap();
        let ch = sample_channels(&cfg, 10);
        let (_, st) = run_lc_b_cj_tpm(&ch, &cfg, THETA2_DB, I_MAX).unwrap();
        let text = st.trace_text();
        assert_eq!(text.lines().count(), st.iter + 1);
        assert!(text.starts_with("iter objective"));
    }
}
