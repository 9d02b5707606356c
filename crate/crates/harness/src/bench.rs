//! Empirical growth of solve time with the number of nodes.

use std::time::Instant;

use wpcj_core::complexity::log_log_fit;
use wpcj_core::model::{sample_channels, SystemConfig};

use crate::error::{HarnessError, Result};
use crate::experiment::{run_scheme, SchemeId};

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingFit {
    /// Exponent of the fitted power law `time ∝ N^slope`.
    pub slope: f64,
    pub r2: f64,
    /// `(N, mean seconds per solve)`.
    pub points: Vec<(usize, f64)>,
}

pub fn fit_scaling(points: Vec<(usize, f64)>) -> Result<ScalingFit> {
    if points.len() < 3 {
        return Err(HarnessError::InvalidSpec(format!("need at least 3 sizes to fit a slope, got {}", points.len())));
    }
    if points.iter().any(|&(n, t)| n == 0 || !(t > 0.0)) {
        return Err(HarnessError::InvalidSpec("sizes and times must be positive".into()));
    }
    let x: Vec<f64> = points.iter().map(|p| p.0 as f64).collect();
    let y: Vec<f64> = points.iter().map(|p| p.1).collect();
    let (slope, r2) = log_log_fit(&x, &y);
    Ok(ScalingFit { slope, r2, points })
}

/// Times `work(n, trial)` for each size and fits the mean time per call.
pub fn measure_scaling<F: FnMut(usize, u64)>(ns: &[usize], trials: usize, mut work: F) -> Result<ScalingFit> {
    if trials == 0 {
        return Err(HarnessError::InvalidSpec("trials must be at least 1".into()));
    }
    let mut points = Vec::with_capacity(ns.len());
    for &n in ns {
        let start = Instant::now();
        for t in 0..trials as u64 {
            work(n, t);
        }
        points.push((n, start.elapsed().as_secs_f64() / trials as f64));
    }
    fit_scaling(points)
}

/// Solve-time scaling of `scheme` over node counts `ns` with `m` antennas.
/// Solves run sequentially so timings are not skewed by contention.
pub fn benchmark_scaling(scheme: SchemeId, ns: &[usize], m: usize, trials: usize, seed: u64) -> Result<ScalingFit> {
    if ns.len() < 3 {
        return Err(HarnessError::InvalidSpec(format!("need at least 3 sizes to fit a slope, got {}", ns.len())));
    }
    let cfgs: Vec<SystemConfig> = ns.iter().map(|&n| Ok(SystemConfig::new(m, n)?.with_seed(seed))).collect::<Result<_>>()?;
    measure_scaling(ns, trials, |n, t| {
        let cfg = cfgs.iter().find(|c| c.n == n).expect("one config per size");
        let ch = sample_channels(cfg, t);
        let _ = run_scheme(scheme, &ch, cfg, wpcj_core::cccp_schemes::THETA1, wpcj_core::cccp_schemes::THETA2_DB);
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::time::Duration;

    #[test]
    fn constant_work_has_flat_slope() {
        let fit = measure_scaling(&[4, 8, 16, 32], 3, |_, _| std::thread::sleep(Duration::from_millis(4))).unwrap();
        assert!(fit.slope.abs() < 0.1, "{fit:?}");
    }

    #[test]
    fn exact_power_law_is_recovered() {
        let fit = fit_scaling(vec![(2, 8.0), (4, 64.0), (8, 512.0)]).unwrap();
        assert!((fit.slope - 3.0).abs() < 1e-12);
        assert!((fit.r2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn too_few_points() {
        assert!(fit_scaling(vec![(2, 1.0), (4, 2.0)]).is_err());
        assert!(benchmark_scaling(SchemeId::Zf, &[4, 8], 2, 1, 0).is_err());
    }

    #[test]
    fn zero_forcing_runs_at_each_size() {
        let fit = benchmark_scaling(SchemeId::Zf, &[2, 3, 4], 2, 1, 0).unwrap();
        assert_eq!(fit.points.iter().map(|p| p.0).collect::<Vec<_>>(), vec![2, 3, 4]);
    }
}
