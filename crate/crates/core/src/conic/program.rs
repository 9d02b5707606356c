use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_complex::Complex64;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector};

/// Hermitian PSD matrix variable. Its real parameters are the diagonal
/// followed by `(re, im)` pairs of the strict upper triangle in row-major
/// order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HermVar {
    pub(crate) id: usize,
    pub(crate) side: usize,
    pub(crate) offset: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScalarVar {
    pub(crate) id: usize,
    pub(crate) offset: usize,
}

/// Complex vector variable stored as interleaved `(re, im)` pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VecVar {
    pub(crate) id: usize,
    pub(crate) len: usize,
    pub(crate) offset: usize,
}

impl HermVar {
    pub fn side(&self) -> usize {
        self.side
    }

    pub fn n_params(&self) -> usize {
        self.side * self.side
    }

    pub fn diag_index(&self, i: usize) -> usize {
        self.offset + i
    }

    /// Parameter indices `(re, im)` of entry `(i, j)` with `i < j`.
    pub fn pair_index(&self, i: usize, j: usize) -> (usize, usize) {
        debug_assert!(i < j && j < self.side);
        let n = self.side;
        let k = i * (2 * n - i - 1) / 2 + (j - i - 1);
        let base = self.offset + n + 2 * k;
        (base, base + 1)
    }

    /// Rebuilds the Hermitian matrix from the flat parameter vector.
    pub fn unpack(&self, x: &[f64]) -> CMatrix {
        let n = self.side;
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(x[self.diag_index(i)], 0.0);
            for j in i + 1..n {
                let (r, im) = self.pair_index(i, j);
                let z = Complex64::new(x[r], x[im]);
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
            }
        }
        m
    }
}

impl ScalarVar {
    pub fn index(&self) -> usize {
        self.offset
    }
}

impl VecVar {
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn re_index(&self, k: usize) -> usize {
        self.offset + 2 * k
    }

    pub fn im_index(&self, k: usize) -> usize {
        self.offset + 2 * k + 1
    }

    pub fn unpack(&self, x: &[f64]) -> CVector {
        CVector::from_fn(self.len, |k, _| Complex64::new(x[self.re_index(k)], x[self.im_index(k)]))
    }
}

/// Real affine expression over the flat parameter vector.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LinExpr {
    pub(crate) terms: Vec<(usize, f64)>,
    pub(crate) constant: f64,
}

impl LinExpr {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn constant(c: f64) -> Self {
        LinExpr { terms: Vec::new(), constant: c }
    }

    pub fn add_const(mut self, c: f64) -> Self {
        self.constant += c;
        self
    }

    pub fn term(mut self, index: usize, coef: f64) -> Self {
        if coef != 0.0 {
            self.terms.push((index, coef));
        }
        self
    }

    pub fn scalar(self, v: ScalarVar, coef: f64) -> Self {
        self.term(v.offset, coef)
    }

    /// Adds `coef · Tr(A X)` for Hermitian `A`.
    pub fn trace(mut self, x: HermVar, a: &CMatrix, coef: f64) -> Self {
        let n = x.side;
        for i in 0..n {
            self = self.term(x.diag_index(i), coef * a[(i, i)].re);
            for j in i + 1..n {
                let (r, im) = x.pair_index(i, j);
                let aji = a[(j, i)];
                self = self.term(r, 2.0 * coef * aji.re);
                self = self.term(im, -2.0 * coef * aji.im);
            }
        }
        self
    }

    /// Adds `coef · X_ii`.
    pub fn diag(self, x: HermVar, i: usize, coef: f64) -> Self {
        self.term(x.diag_index(i), coef)
    }

    /// Adds `coef · Re{a^H v}`.
    pub fn re_inner(mut self, v: VecVar, a: &CVector, coef: f64) -> Self {
        for k in 0..v.len {
            self = self.term(v.re_index(k), coef * a[k].re);
            self = self.term(v.im_index(k), coef * a[k].im);
        }
        self
    }

    /// Adds `coef · Im{a^H v}`.
    pub fn im_inner(mut self, v: VecVar, a: &CVector, coef: f64) -> Self {
        for k in 0..v.len {
            self = self.term(v.re_index(k), -coef * a[k].im);
            self = self.term(v.im_index(k), coef * a[k].re);
        }
        self
    }

    pub fn plus(mut self, other: &LinExpr) -> Self {
        self.terms.extend_from_slice(&other.terms);
        self.constant += other.constant;
        self
    }

    pub fn scaled(mut self, s: f64) -> Self {
        for t in self.terms.iter_mut() {
            t.1 *= s;
        }
        self.constant *= s;
        self
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|&(i, c)| c * x[i]).sum::<f64>() + self.constant
    }

    /// Sorted terms with duplicate indices merged and zeros dropped.
    pub fn canonical(&self) -> Vec<(usize, f64)> {
        let mut t = self.terms.clone();
        t.sort_by_key(|p| p.0);
        let mut out: Vec<(usize, f64)> = Vec::with_capacity(t.len());
        for (i, c) in t {
            match out.last_mut() {
                Some(last) if last.0 == i => last.1 += c,
                _ => out.push((i, c)),
            }
        }
        out.retain(|p| p.1 != 0.0);
        out
    }

    pub fn constant_term(&self) -> f64 {
        self.constant
    }
}

/// `Re` and `Im` parts of `coef · a^H v` as two expressions.
pub fn complex_inner(v: VecVar, a: &CVector, coef: f64) -> [LinExpr; 2] {
    [LinExpr::new().re_inner(v, a, coef), LinExpr::new().im_inner(v, a, coef)]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SocConstraint {
    pub name: String,
    /// Entries of the vector whose norm is bounded.
    pub vector: Vec<LinExpr>,
    pub bound: LinExpr,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub name: String,
    pub expr: LinExpr,
}

/// A linear objective over Hermitian PSD matrices, real scalars and complex
/// vectors, with equality (`expr = 0`), inequality (`expr ≤ 0`) and
/// second-order cone constraints.
#[derive(Debug, Clone, PartialEq)]
pub struct ConeProgram {
    pub(crate) psd_blocks: Vec<(String, HermVar)>,
    pub(crate) scalars: Vec<(String, ScalarVar)>,
    pub(crate) vectors: Vec<(String, VecVar)>,
    pub(crate) n_params: usize,
    pub(crate) sense: Sense,
    pub(crate) objective: LinExpr,
    pub(crate) eqs: Vec<Constraint>,
    pub(crate) ineqs: Vec<Constraint>,
    pub(crate) socs: Vec<SocConstraint>,
}

impl Default for ConeProgram {
    fn default() -> Self {
        Self::new()
    }
}

impl ConeProgram {
    pub fn new() -> Self {
        ConeProgram {
            psd_blocks: Vec::new(),
            scalars: Vec::new(),
            vectors: Vec::new(),
            n_params: 0,
            sense: Sense::Minimize,
            objective: LinExpr::new(),
            eqs: Vec::new(),
            ineqs: Vec::new(),
            socs: Vec::new(),
        }
    }

    pub fn psd_block(&mut self, name: &str, side: usize) -> HermVar {
        let v = HermVar { id: self.psd_blocks.len(), side, offset: self.n_params };
        self.n_params += side * side;
        self.psd_blocks.push((name.to_string(), v));
        v
    }

    pub fn scalar(&mut self, name: &str) -> ScalarVar {
        let v = ScalarVar { id: self.scalars.len(), offset: self.n_params };
        self.n_params += 1;
        self.scalars.push((name.to_string(), v));
        v
    }

    pub fn complex_vector(&mut self, name: &str, len: usize) -> VecVar {
        let v = VecVar { id: self.vectors.len(), len, offset: self.n_params };
        self.n_params += 2 * len;
        self.vectors.push((name.to_string(), v));
        v
    }

    pub fn minimize(&mut self, e: LinExpr) {
        self.sense = Sense::Minimize;
        self.objective = e;
    }

    pub fn maximize(&mut self, e: LinExpr) {
        self.sense = Sense::Maximize;
        self.objective = e;
    }

    /// `expr = 0`.
    pub fn equal_zero(&mut self, name: &str, expr: LinExpr) {
        self.eqs.push(Constraint { name: name.to_string(), expr });
    }

    /// `expr ≤ 0`.
    pub fn less_eq_zero(&mut self, name: &str, expr: LinExpr) {
        self.ineqs.push(Constraint { name: name.to_string(), expr });
    }

    /// `||vector|| ≤ bound`.
    pub fn soc(&mut self, name: &str, vector: Vec<LinExpr>, bound: LinExpr) {
        self.socs.push(SocConstraint { name: name.to_string(), vector, bound });
    }

    pub fn psd_blocks(&self) -> impl Iterator<Item = (&str, usize)> {
        self.psd_blocks.iter().map(|(n, v)| (n.as_str(), v.side))
    }

    pub fn scalar_vars(&self) -> impl Iterator<Item = &str> {
        self.scalars.iter().map(|(n, _)| n.as_str())
    }

    pub fn complex_vector_vars(&self) -> impl Iterator<Item = (&str, usize)> {
        self.vectors.iter().map(|(n, v)| (n.as_str(), v.len))
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    pub fn objective(&self) -> &LinExpr {
        &self.objective
    }

    pub fn eq_constraints(&self) -> &[Constraint] {
        &self.eqs
    }

    pub fn ineq_constraints(&self) -> &[Constraint] {
        &self.ineqs
    }

    pub fn soc_constraints(&self) -> &[SocConstraint] {
        &self.socs
    }

    pub fn n_params(&self) -> usize {
        self.n_params
    }

    pub fn hermitian_var(&self, name: &str) -> Option<HermVar> {
        self.psd_blocks.iter().find(|(n, _)| n == name).map(|p| p.1)
    }

    pub fn scalar_var(&self, name: &str) -> Option<ScalarVar> {
        self.scalars.iter().find(|(n, _)| n == name).map(|p| p.1)
    }

    pub fn vector_var(&self, name: &str) -> Option<VecVar> {
        self.vectors.iter().find(|(n, _)| n == name).map(|p| p.1)
    }

    /// Human-readable label of a flat parameter index.
    pub fn param_label(&self, idx: usize) -> String {
        for (name, v) in &self.psd_blocks {
            if idx >= v.offset && idx < v.offset + v.n_params() {
                let n = v.side;
                let local = idx - v.offset;
                if local < n {
                    return alloc::format!("{name}[{local},{local}]");
                }
                let k = (local - n) / 2;
                let part = if (local - n) % 2 == 0 { "re" } else { "im" };
                // invert the row-major upper-triangle numbering
                let mut i = 0;
                let mut start = 0;
                while start + (n - i - 1) <= k {
                    start += n - i - 1;
                    i += 1;
                }
                let j = i + 1 + (k - start);
                return alloc::format!("{name}.{part}[{i},{j}]");
            }
        }
        for (name, v) in &self.scalars {
            if idx == v.offset {
                return name.clone();
            }
        }
        for (name, v) in &self.vectors {
            if idx >= v.offset && idx < v.offset + 2 * v.len {
                let local = idx - v.offset;
                let part = if local % 2 == 0 { "re" } else { "im" };
                return alloc::format!("{name}.{part}[{}]", local / 2);
            }
        }
        alloc::format!("x{idx}")
    }

    pub(crate) fn check_well_formed(&self) -> Result<()> {
        let mut names: Vec<&str> = Vec::new();
        names.extend(self.psd_blocks.iter().map(|p| p.0.as_str()));
        names.extend(self.scalars.iter().map(|p| p.0.as_str()));
        names.extend(self.vectors.iter().map(|p| p.0.as_str()));
        if has_duplicate(&mut names) {
            return Err(Error::MalformedProgram("variable declared twice".into()));
        }
        let mut cons: Vec<&str> = Vec::new();
        cons.extend(self.eqs.iter().map(|c| c.name.as_str()));
        cons.extend(self.ineqs.iter().map(|c| c.name.as_str()));
        cons.extend(self.socs.iter().map(|c| c.name.as_str()));
        if has_duplicate(&mut cons) {
            return Err(Error::MalformedProgram("constraint name used twice".into()));
        }
        let n = self.n_params;
        let all = core::iter::once(&self.objective)
            .chain(self.eqs.iter().map(|c| &c.expr))
            .chain(self.ineqs.iter().map(|c| &c.expr))
            .chain(self.socs.iter().flat_map(|s| s.vector.iter().chain(core::iter::once(&s.bound))));
        for e in all {
            if e.terms.iter().any(|&(i, c)| i >= n || !c.is_finite()) || !e.constant.is_finite() {
                return Err(Error::MalformedProgram("expression references an undeclared variable or is not finite".into()));
            }
        }
        Ok(())
    }

    /// Largest violation of any constraint at the flat point `x`, including
    /// PSD membership of every block (measured by the most negative
    /// eigenvalue).
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst = 0.0_f64;
        for c in &self.eqs {
            worst = worst.max(c.expr.eval(x).abs());
        }
        for c in &self.ineqs {
            worst = worst.max(c.expr.eval(x));
        }
        for s in &self.socs {
            let nrm = s.vector.iter().map(|e| { let v = e.eval(x); v * v }).sum::<f64>().sqrt();
            worst = worst.max(nrm - s.bound.eval(x));
        }
        for (_, v) in &self.psd_blocks {
            worst = worst.max(-crate::linalg::min_eigenvalue(&v.unpack(x)));
        }
        worst
    }
}

fn has_duplicate(v: &mut Vec<&str>) -> bool {
    v.sort_unstable();
    v.windows(2).any(|w| w[0] == w[1])
}
