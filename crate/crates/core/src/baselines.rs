//! Zero-forcing reference scheme: the BS transmits with maximum ratio at
//! full power and the nodes jam the eavesdropper as hard as possible while
//! leaving the destination untouched.

use crate::conic::{self, ConeProgram, LinExpr, SolveStatus};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_part, norm_sqr, null_space_basis, CMatrix, CVector, ONE};
use crate::model::{ChannelSet, SystemConfig, TransmitDesign};
#[cfg(not(feature = "std"))]
use num_traits::Float;

/// Jamming program over `Q = s·U Y U^H`, where the columns of `U` span the
/// null space of `h_cd^H`. Maximizes `Tr(D Q)` under the per-node budgets.
#[derive(Debug, Clone, PartialEq)]
pub struct ZfProgram {
    pub program: ConeProgram,
    pub basis: CMatrix,
    pub scale: f64,
}

pub fn build_zf_program(ch: &ChannelSet, cfg: &SystemConfig) -> Result<ZfProgram> {
    cfg.validate()?;
    ch.check_against(cfg)?;
    let basis = if norm_sqr(&ch.h_cd) > 0.0 { null_space_basis(&ch.h_cd) } else { CMatrix::identity(cfg.n, cfg.n) };
    let k = basis.ncols();
    let scale = if cfg.p_max_node() > 0.0 { cfg.p_max_node() } else { 1.0 };
    let hce = norm_sqr(&ch.h_ce);
    let obj_scale = if hce > 0.0 { 1.0 / hce } else { 1.0 };

    let mut p = ConeProgram::new();
    let y = p.psd_block("Y", k);
    let reduced = basis.adjoint() * ch.d() * &basis;
    p.maximize(LinExpr::new().trace(y, &reduced, obj_scale));
    for (i, &pi) in cfg.p_harvested.iter().enumerate() {
        let r: CVector = basis.row(i).adjoint();
        p.less_eq_zero(&alloc::format!("node_{i}"), LinExpr::constant(-pi / scale).trace(y, &(&r * r.adjoint()), 1.0));
    }
    Ok(ZfProgram { program: p, basis, scale })
}

/// Maximum-ratio beamformer at full power with null-steered jamming.
pub fn zero_forcing(ch: &ChannelSet, cfg: &SystemConfig) -> Result<TransmitDesign> {
    let zp = build_zf_program(ch, cfg)?;
    let hb = norm_sqr(&ch.h_bd);
    let v = if hb > 0.0 { ch.h_bd.clone() * ONE.scale((cfg.p_bs_max / hb).sqrt()) } else { CVector::zeros(cfg.m) };
    let sol = conic::solve(&zp.program, conic::DEFAULT_TOL)?;
    match sol.status {
        SolveStatus::Optimal => {}
        s => return Err(Error::Solver(s)),
    }
    let y = sol.hermitian("Y").ok_or_else(|| Error::MissingDuals("Y".into()))?;
    let mut q = hermitian_part(&(&zp.basis * y * zp.basis.adjoint()).scale(zp.scale));
    for (i, &pi) in cfg.p_harvested.iter().enumerate() {
        let qii = q[(i, i)].re;
        if qii > pi && qii > 0.0 {
            let f = (pi / qii).sqrt();
            for j in 0..cfg.n {
                q[(i, j)] *= f;
                q[(j, i)] *= f;
            }
        }
    }
    Ok(TransmitDesign { v, q_cov: q, q_vec: None })
}
