//! Operation-count model of a symmetric primal-dual interior-point method,
//! `√(1 + Σk_j) · (n³ + n²Σk_j² + nΣk_j³) · ln(1/ε)`, applied to the cone
//! programs of each scheme. The iterative schemes multiply by `I_max`.

use alloc::vec;
use alloc::vec::Vec;
#[cfg(not(feature = "std"))]
use num_traits::Float;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SchemeKind {
    Srm,
    Tpm,
    LcSrm,
    LcTpm,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexityModel {
    pub scheme: SchemeKind,
    pub epsilon: f64,
    /// Number of constraints.
    pub j: usize,
    /// Dimension of each constraint.
    pub k: Vec<usize>,
    /// Total real dimension of the decision variables.
    pub n_dim: usize,
    pub i_max: usize,
}

impl ComplexityModel {
    pub fn new(scheme: SchemeKind, m: usize, n: usize, epsilon: f64, i_max: usize) -> Self {
        let (k, n_dim) = match scheme {
            SchemeKind::Srm => {
                let mut k = vec![1; n + 4];
                k.extend([m, n]);
                (k, m * m + n * n + 1)
            }
            SchemeKind::Tpm => {
                let mut k = vec![1; n + 2];
                k.extend([m, n]);
                (k, m * m + n * n)
            }
            SchemeKind::LcSrm => (vec![1; n + 4], m + n + 1),
            SchemeKind::LcTpm => (vec![1; n + 2], m + n),
        };
        ComplexityModel { scheme, epsilon, j: k.len(), k, n_dim, i_max }
    }

    fn iterations(&self) -> f64 {
        match self.scheme {
            SchemeKind::Srm | SchemeKind::Tpm => 1.0,
            SchemeKind::LcSrm | SchemeKind::LcTpm => self.i_max as f64,
        }
    }

    /// Evaluates the model for its own `(k, n)`.
    pub fn evaluate(&self) -> f64 {
        let sum = |p: i32| self.k.iter().map(|&k| (k as f64).powi(p)).sum::<f64>();
        let n = self.n_dim as f64;
        (1.0 + sum(1)).sqrt() * (n.powi(3) + n * n * sum(2) + n * sum(3)) * (1.0 / self.epsilon).ln() * self.iterations()
    }
}

/// Operation-count proxy of `model.scheme` at `(M, N)`, keeping the model's
/// accuracy and iteration cap.
pub fn complexity_estimate(model: &ComplexityModel, m: usize, n: usize) -> f64 {
    ComplexityModel::new(model.scheme, m, n, model.epsilon, model.i_max).evaluate()
}

/// Least-squares slope of `ln y` against `ln x`, and its `R²`.
pub fn log_log_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let k = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / k;
    let my = ly.iter().sum::<f64>() / k;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    let syy: f64 = ly.iter().map(|b| (b - my) * (b - my)).sum();
    let slope = sxy / sxx;
    let r2 = if syy > 0.0 { sxy * sxy / (sxx * syy) } else { 1.0 };
    (slope, r2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(s: SchemeKind) -> ComplexityModel {
        ComplexityModel::new(s, 8, 4, 1e-8, 50)
    }

    #[test]
    fn dimensions_at_fig2_point() {
        assert_eq!(model(SchemeKind::LcSrm).n_dim, 13);
        assert_eq!(model(SchemeKind::LcTpm).n_dim, 12);
        assert_eq!(model(SchemeKind::Srm).n_dim, 81);
        assert_eq!(model(SchemeKind::Tpm).n_dim, 80);
        assert_eq!(model(SchemeKind::Srm).j, 10);
        assert_eq!(model(SchemeKind::LcSrm).j, 8);
    }

    #[test]
    fn srm_closed_form() {
        let (m, n) = (5.0f64, 3.0f64);
        let n0 = m * m + n * n + 1.0;
        let expect = (m + 2.0 * n + 5.0).sqrt() * (1e8f64).ln() * n0 * (n0 * n0 + n0 * (m * m + n * n + n + 4.0) + m.powi(3) + n.powi(3) + n + 4.0);
        let got = ComplexityModel::new(SchemeKind::Srm, 5, 3, 1e-8, 1).evaluate();
        assert!((got - expect).abs() <= 1e-12 * expect);
    }

    #[test]
    fn lc_srm_closed_form() {
        let (m, n) = (5.0f64, 3.0f64);
        let n2 = m + n + 1.0;
        let expect = (n + 5.0).sqrt() * (1e8f64).ln() * n2 * (n2 * n2 + n2 * (n + 4.0) + n + 4.0) * 7.0;
        let got = ComplexityModel::new(SchemeKind::LcSrm, 5, 3, 1e-8, 7).evaluate();
        assert!((got - expect).abs() <= 1e-12 * expect);
    }

    #[test]
    fn doubling_ratios_approach_exponents() {
        for (s, e) in [(SchemeKind::Srm, 6.5), (SchemeKind::Tpm, 6.5), (SchemeKind::LcSrm, 3.5), (SchemeKind::LcTpm, 3.5)] {
            let md = model(s);
            let r = complexity_estimate(&md, 8, 1024) / complexity_estimate(&md, 8, 512);
            assert!((r / 2f64.powf(e) - 1.0).abs() < 0.1, "{s:?}: {r}");
        }
    }

    #[test]
    fn slopes_over_large_networks() {
        let ns = [64.0, 128.0, 256.0, 512.0, 1024.0];
        for (s, e) in [(SchemeKind::Srm, 6.5), (SchemeKind::LcSrm, 3.5)] {
            let md = model(s);
            let y: Vec<f64> = ns.iter().map(|&n| complexity_estimate(&md, 8, n as usize)).collect();
            let (slope, r2) = log_log_fit(&ns, &y);
            assert!((slope - e).abs() < 0.3 && r2 > 0.99, "{s:?}: {slope} {r2}");
        }
    }

    #[test]
    fn fit_recovers_power_law() {
        let x = [1.0, 2.0, 4.0, 8.0];
        let y: Vec<f64> = x.iter().map(|v: &f64| 3.0 * v.powf(2.5)).collect();
        let (s, r2) = log_log_fit(&x, &y);
        assert!((s - 2.5).abs() < 1e-12 && (r2 - 1.0).abs() < 1e-12);
        let (s, _) = log_log_fit(&x, &[5.0; 4]);
        assert!(s.abs() < 1e-12);
    }
}
