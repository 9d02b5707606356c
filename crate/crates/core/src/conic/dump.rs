//! Plain-text listing of a [`ConeProgram`] for diffing and for feeding
//! external solvers.
//!
//! ```text
//! conic-program v1
//! sense max
//! psd V 2
//! scalar t
//! vector v 3
//! objective <const>
//!   <label> <coef>
//! eq <name> <const>
//!   <label> <coef>
//! ineq <name> <const>
//!   <label> <coef>
//! soc <name> <len>
//!   bound <const>
//!     <label> <coef>
//!   entry <k> <const>
//!     <label> <coef>
//! end
//! ```
//!
//! Each expression is a constant plus sparse terms sorted by parameter
//! index. Labels are `X[i,i]`, `X.re[i,j]` / `X.im[i,j]` (for `i < j`) for
//! Hermitian blocks, the bare name for scalars and `v.re[k]` / `v.im[k]`
//! for complex vectors. Numbers are printed with 12 significant digits.

use alloc::string::String;
use core::fmt::Write;

use super::{ConeProgram, LinExpr, Sense};

fn num(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    alloc::format!("{x:.11e}")
}

fn expr(out: &mut String, p: &ConeProgram, e: &LinExpr, indent: &str) {
    for (j, v) in e.canonical() {
        let _ = writeln!(out, "{indent}{} {}", p.param_label(j), num(v));
    }
}

pub fn dump(p: &ConeProgram) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "conic-program v1");
    let sense = match p.sense {
        Sense::Minimize => "min",
        Sense::Maximize => "max",
    };
    let _ = writeln!(out, "sense {sense}");
    for (name, v) in &p.psd_blocks {
        let _ = writeln!(out, "psd {name} {}", v.side);
    }
    for (name, _) in &p.scalars {
        let _ = writeln!(out, "scalar {name}");
    }
    for (name, v) in &p.vectors {
        let _ = writeln!(out, "vector {name} {}", v.len);
    }
    let _ = writeln!(out, "objective {}", num(p.objective.constant));
    expr(&mut out, p, &p.objective, "  ");
    for c in &p.eqs {
        let _ = writeln!(out, "eq {} {}", c.name, num(c.expr.constant));
        expr(&mut out, p, &c.expr, "  ");
    }
    for c in &p.ineqs {
        let _ = writeln!(out, "ineq {} {}", c.name, num(c.expr.constant));
        expr(&mut out, p, &c.expr, "  ");
    }
    for s in &p.socs {
        let _ = writeln!(out, "soc {} {}", s.name, s.vector.len());
        let _ = writeln!(out, "  bound {}", num(s.bound.constant));
        expr(&mut out, p, &s.bound, "    ");
        for (k, e) in s.vector.iter().enumerate() {
            let _ = writeln!(out, "  entry {k} {}", num(e.constant));
            expr(&mut out, p, e, "    ");
        }
    }
    let _ = writeln!(out, "end");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::CMatrix;

    #[test]
    fn small_program_listing() {
        let mut p = ConeProgram::new();
        let x = p.psd_block("X", 2);
        let t = p.scalar("t");
        p.minimize(LinExpr::new().trace(x, &CMatrix::identity(2, 2), 1.0));
        p.equal_zero("fix", LinExpr::constant(-1.0).diag(x, 0, 1.0));
        p.less_eq_zero("cap", LinExpr::new().scalar(t, 2.0));
        let text = dump(&p);
        let expect = "conic-program v1\nsense min\npsd X 2\nscalar t\nobjective 0.00000000000e0\n  X[0,0] 1.00000000000e0\n  X[1,1] 1.00000000000e0\neq fix -1.00000000000e0\n  X[0,0] 1.00000000000e0\nineq cap 0.00000000000e0\n  t 2.00000000000e0\nend\n";
        assert_eq!(text, expect);
    }
}
