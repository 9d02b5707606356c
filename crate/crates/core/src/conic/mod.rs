//! Conic programs over Hermitian PSD matrices, second-order cones and
//! linear (in)equalities, with an embedded primal-dual interior-point
//! solver. PSD blocks are complex Hermitian and handled natively.

mod cones;
pub mod dump;
mod ipm;
mod program;

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;


pub use program::{complex_inner, ConeProgram, Constraint, HermVar, LinExpr, ScalarVar, Sense, SocConstraint, VecVar};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_defect, CMatrix, CVector, RMatrix};
use cones::{hmat, hvec_diag, hvec_pair, Cone};
use ipm::{Settings, StandardForm};

pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_MAX_ITER: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    Unbounded,
    NumericalFailure,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residuals {
    pub primal: f64,
    pub dual: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PrimalValue {
    Scalar(f64),
    Vector(CVector),
    Hermitian(CMatrix),
}

/// Result of [`solve`]. Multipliers refer to the minimization form of the
/// program (a maximization is solved as the minimization of its negation):
/// `expr ≤ 0` rows carry `λ ≥ 0`, second-order cones carry a vector in the
/// cone, and each PSD block carries a Hermitian PSD matrix `P` entering the
/// Lagrangian as `−Tr(P X)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConeSolution {
    pub status: SolveStatus,
    pub primal: BTreeMap<String, PrimalValue>,
    pub dual: BTreeMap<String, f64>,
    pub soc_dual: BTreeMap<String, Vec<f64>>,
    pub psd_dual: BTreeMap<String, CMatrix>,
    pub objective_value: f64,
    /// Bound from the dual iterate, in the sense of the original objective.
    pub dual_bound: f64,
    pub iterations: usize,
    pub residuals: Residuals,
    /// Flat parameter vector, see [`ConeProgram::n_params`].
    pub x: Vec<f64>,
}

impl ConeSolution {
    pub fn scalar(&self, name: &str) -> Option<f64> {
        match self.primal.get(name) {
            Some(PrimalValue::Scalar(v)) => Some(*v),
            _ => None,
        }
    }

    pub fn vector(&self, name: &str) -> Option<&CVector> {
        match self.primal.get(name) {
            Some(PrimalValue::Vector(v)) => Some(v),
            _ => None,
        }
    }

    pub fn hermitian(&self, name: &str) -> Option<&CMatrix> {
        match self.primal.get(name) {
            Some(PrimalValue::Hermitian(v)) => Some(v),
            _ => None,
        }
    }

    pub fn multiplier(&self, name: &str) -> Result<f64> {
        self.dual.get(name).copied().ok_or_else(|| Error::MissingDuals(name.into()))
    }

    pub fn is_optimal(&self) -> bool {
        self.status == SolveStatus::Optimal
    }

    /// Fails with [`Error::Solver`] unless the status is optimal.
    pub fn require_optimal(&self) -> Result<()> {
        if self.is_optimal() {
            Ok(())
        } else {
            Err(Error::Solver(self.status))
        }
    }
}

/// `[[Re H, −Im H], [Im H, Re H]]`.
pub fn hermitian_embed(h: &CMatrix) -> Result<RMatrix> {
    if !h.is_square() {
        return Err(Error::NotHermitian(f64::INFINITY));
    }
    let defect = hermitian_defect(h);
    if defect > 1e-10 {
        return Err(Error::NotHermitian(defect));
    }
    let n = h.nrows();
    let mut out = RMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let z = h[(i, j)];
            out[(i, j)] = z.re;
            out[(n + i, n + j)] = z.re;
            out[(i, n + j)] = -z.im;
            out[(n + i, j)] = z.im;
        }
    }
    Ok(out)
}

fn compile(p: &ConeProgram) -> StandardForm {
    let n = p.n_params;
    let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    let mut b = Vec::new();
    let mut cones = Vec::new();
    let mut row = 0;
    let mut push_row = |cols: &mut Vec<Vec<(usize, f64)>>, b: &mut Vec<f64>, e: &LinExpr, sign: f64| {
        for (j, v) in e.canonical() {
            cols[j].push((row, sign * v));
        }
        b.push(-sign * e.constant);
        row += 1;
    };
    if !p.eqs.is_empty() {
        for c in &p.eqs {
            push_row(&mut cols, &mut b, &c.expr, 1.0);
        }
        cones.push(Cone::Zero(p.eqs.len()));
    }
    if !p.ineqs.is_empty() {
        for c in &p.ineqs {
            push_row(&mut cols, &mut b, &c.expr, 1.0);
        }
        cones.push(Cone::NonNeg(p.ineqs.len()));
    }
    for s in &p.socs {
        push_row(&mut cols, &mut b, &s.bound, -1.0);
        for e in &s.vector {
            push_row(&mut cols, &mut b, e, -1.0);
        }
        cones.push(Cone::Soc(s.vector.len() + 1));
    }
    let sq2 = core::f64::consts::SQRT_2;
    for (_, h) in &p.psd_blocks {
        let nb = h.side;
        let base = row;
        for i in 0..nb {
            cols[h.diag_index(i)].push((base + hvec_diag(nb, i), -1.0));
            for k in i + 1..nb {
                let (re, im) = h.pair_index(i, k);
                // the lower entry X_ki is the conjugate of the stored X_ik
                let at = base + hvec_pair(nb, k, i);
                cols[re].push((at, -sq2));
                cols[im].push((at + 1, sq2));
            }
        }
        b.extend(core::iter::repeat(0.0).take(nb * nb));
        row += nb * nb;
        cones.push(Cone::Psd(nb));
    }
    let sign = match p.sense {
        Sense::Minimize => 1.0,
        Sense::Maximize => -1.0,
    };
    let mut c = vec![0.0; n];
    for (j, v) in p.objective.canonical() {
        c[j] = sign * v;
    }
    for col in cols.iter_mut() {
        col.sort_by_key(|t| t.0);
    }
    StandardForm { n, cones, cols, b, c }
}

/// Solves the program to relative accuracy `tol` (clamped to
/// `[1e-10, 1e-4]`) with the default iteration cap.
pub fn solve(p: &ConeProgram, tol: f64) -> Result<ConeSolution> {
    solve_with(p, tol, DEFAULT_MAX_ITER)
}

pub fn solve_with(p: &ConeProgram, tol: f64, max_iter: usize) -> Result<ConeSolution> {
    solve_inner(p, Settings { tol: tol.clamp(1e-10, 1e-4), max_iter, polish: 0 })
}

/// Like [`solve`], but keeps iterating for up to `polish` steps after the
/// tolerance is met and returns the most accurate iterate.
pub fn solve_polished(p: &ConeProgram, tol: f64, polish: usize) -> Result<ConeSolution> {
    solve_inner(p, Settings { tol: tol.clamp(1e-10, 1e-4), max_iter: DEFAULT_MAX_ITER, polish })
}

fn solve_inner(p: &ConeProgram, settings: Settings) -> Result<ConeSolution> {
    p.check_well_formed()?;
    let sf = compile(p);
    let raw = ipm::solve(&sf, settings);
    let x = raw.x;
    let mut primal = BTreeMap::new();
    for (name, v) in &p.psd_blocks {
        primal.insert(name.clone(), PrimalValue::Hermitian(v.unpack(&x)));
    }
    for (name, v) in &p.scalars {
        primal.insert(name.clone(), PrimalValue::Scalar(x[v.offset]));
    }
    for (name, v) in &p.vectors {
        primal.insert(name.clone(), PrimalValue::Vector(v.unpack(&x)));
    }
    let z = &raw.z;
    let mut dual = BTreeMap::new();
    let mut k = 0;
    for c in p.eqs.iter().chain(p.ineqs.iter()) {
        dual.insert(c.name.clone(), z[k]);
        k += 1;
    }
    let mut soc_dual = BTreeMap::new();
    for s in &p.socs {
        let d = s.vector.len() + 1;
        soc_dual.insert(s.name.clone(), z[k..k + d].to_vec());
        k += d;
    }
    let mut psd_dual = BTreeMap::new();
    for (name, h) in &p.psd_blocks {
        let d = h.side * h.side;
        psd_dual.insert(name.clone(), hmat(h.side, &z[k..k + d]));
        k += d;
    }
    let sign = match p.sense {
        Sense::Minimize => 1.0,
        Sense::Maximize => -1.0,
    };
    let k0 = p.objective.constant;
    let objective_value = p.objective.eval(&x);
    let dual_min = -crate::linalg::dot(&sf.b, z) + sign * k0;
    Ok(ConeSolution {
        status: raw.status,
        primal,
        dual,
        soc_dual,
        psd_dual,
        objective_value,
        dual_bound: sign * dual_min,
        iterations: raw.iterations,
        residuals: Residuals { primal: raw.residuals.0, dual: raw.residuals.1, gap: raw.residuals.2 },
        x,
    })
}
