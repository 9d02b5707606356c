//! Monte-Carlo sweeps over the transmission schemes.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use wpcj_core::baselines::zero_forcing;
use wpcj_core::cccp_schemes::{run_lc_b_cj_srm, run_lc_b_cj_tpm, I_MAX, THETA1, THETA2_DB};
use wpcj_core::linalg::quad_form;
use wpcj_core::model::{check_feasibility, rates, sample_channels, watts_to_dbm, ChannelSet, SystemConfig, TransmitDesign};
use wpcj_core::sdp_schemes::{solve_b_cj_srm, solve_b_cj_tpm};

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SchemeId {
    Srm,
    Tpm,
    LcSrm,
    LcTpm,
    Zf,
}

impl SchemeId {
    pub const ALL: [SchemeId; 5] = [SchemeId::Srm, SchemeId::Tpm, SchemeId::LcSrm, SchemeId::LcTpm, SchemeId::Zf];

    pub fn name(self) -> &'static str {
        match self {
            SchemeId::Srm => "srm",
            SchemeId::Tpm => "tpm",
            SchemeId::LcSrm => "lc-srm",
            SchemeId::LcTpm => "lc-tpm",
            SchemeId::Zf => "zf",
        }
    }

    /// Minimizes BS power under a secrecy target rather than maximizing rate.
    pub fn minimizes_power(self) -> bool {
        matches!(self, SchemeId::Tpm | SchemeId::LcTpm)
    }

    pub fn is_iterative(self) -> bool {
        matches!(self, SchemeId::LcSrm | SchemeId::LcTpm)
    }
}

impl fmt::Display for SchemeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SchemeId {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        SchemeId::ALL
            .into_iter()
            .find(|id| id.name() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| HarnessError::Parse(format!("unknown scheme `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepVariable {
    PBsDbm,
    NJammers,
    MAntennas,
    PiMw,
}

impl SweepVariable {
    pub const ALL: [SweepVariable; 4] = [SweepVariable::PBsDbm, SweepVariable::NJammers, SweepVariable::MAntennas, SweepVariable::PiMw];

    pub fn name(self) -> &'static str {
        match self {
            SweepVariable::PBsDbm => "p_bs_dbm",
            SweepVariable::NJammers => "n_jammers",
            SweepVariable::MAntennas => "m_antennas",
            SweepVariable::PiMw => "p_i_mw",
        }
    }

    /// The template with this variable set to `value`.
    pub fn apply(self, template: &SystemConfig, value: f64) -> Result<SystemConfig> {
        let count = || {
            if value >= 1.0 && value.fract() == 0.0 {
                Ok(value as usize)
            } else {
                Err(HarnessError::InvalidSpec(format!("{} must be a positive integer, got {value}", self.name())))
            }
        };
        let cfg = template.clone();
        Ok(match self {
            SweepVariable::PBsDbm => cfg.with_p_bs_dbm(value)?,
            SweepVariable::NJammers => cfg.with_n(count()?)?,
            SweepVariable::MAntennas => cfg.with_m(count()?)?,
            SweepVariable::PiMw => cfg.with_uniform_harvest(value * 1e-3)?,
        })
    }
}

impl fmt::Display for SweepVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepVariable {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        SweepVariable::ALL
            .into_iter()
            .find(|v| v.name() == s.trim())
            .ok_or_else(|| HarnessError::Parse(format!("unknown sweep variable `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FigureId {
    F2,
    F3,
    F4,
    F5,
    F6,
}

impl FigureId {
    pub fn from_number(n: u32) -> Result<Self> {
        Ok(match n {
            2 => FigureId::F2,
            3 => FigureId::F3,
            4 => FigureId::F4,
            5 => FigureId::F5,
            6 => FigureId::F6,
            _ => return Err(HarnessError::InvalidSpec(format!("no preset for figure {n}"))),
        })
    }
}

pub const DEFAULT_TRIALS: usize = 200;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub figure: FigureId,
    pub schemes: Vec<SchemeId>,
    pub sweep: SweepVariable,
    pub values: Vec<f64>,
    pub template: SystemConfig,
    pub trials: usize,
    pub seed: u64,
    pub theta1: f64,
    /// Stopping threshold of the power-minimizing iteration, in dB.
    pub theta2_db: f64,
    /// Fill the wall-time column. Timings differ between runs, so output
    /// with timing is not reproducible byte for byte.
    pub record_timing: bool,
}

impl ExperimentSpec {
    /// Operating point of each figure. The BS has 8 antennas, 4 nodes harvest
    /// 2.5 mW each and the BS budget is 10 W unless swept.
    pub fn preset(figure: FigureId) -> Self {
        let template = SystemConfig::new(8, 4).expect("reference configuration is valid");
        let sr = vec![SchemeId::Srm, SchemeId::LcSrm, SchemeId::Zf];
        let (schemes, sweep, values) = match figure {
            FigureId::F2 => (sr, SweepVariable::PBsDbm, vec![30.0, 35.0, 40.0, 45.0, 50.0]),
            FigureId::F3 => (sr, SweepVariable::NJammers, vec![4.0, 8.0, 12.0, 16.0, 20.0, 24.0, 28.0, 32.0]),
            FigureId::F4 => (sr, SweepVariable::MAntennas, vec![2.0, 4.0, 6.0, 8.0, 10.0, 12.0]),
            FigureId::F5 => (sr, SweepVariable::PiMw, vec![1.0, 2.0, 4.0, 6.0, 8.0, 10.0, 12.0]),
            FigureId::F6 => (vec![SchemeId::Tpm, SchemeId::LcTpm], SweepVariable::NJammers, vec![4.0, 8.0, 12.0, 16.0, 20.0, 24.0]),
        };
        ExperimentSpec {
            figure,
            schemes,
            sweep,
            values,
            template,
            trials: DEFAULT_TRIALS,
            seed: 0,
            theta1: THETA1,
            theta2_db: THETA2_DB,
            record_timing: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(HarnessError::InvalidSpec(m.into()));
        if self.trials == 0 {
            return bad("trials must be at least 1");
        }
        if self.schemes.is_empty() {
            return bad("no schemes selected");
        }
        if self.values.is_empty() {
            return bad("sweep has no values");
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return bad("sweep values must be finite");
        }
        if self.values.windows(2).any(|w| w[0] >= w[1]) {
            return bad("sweep values must be strictly increasing");
        }
        if !(self.theta1 > 0.0 && self.theta2_db > 0.0) {
            return bad("stopping thresholds must be positive");
        }
        self.template.validate()?;
        Ok(())
    }

    /// System configuration at each sweep point.
    pub fn configs(&self) -> Result<Vec<SystemConfig>> {
        let template = self.template.clone().with_seed(self.seed);
        self.values.iter().map(|&v| self.sweep.apply(&template, v)).collect()
    }
}

/// Aggregate of one scheme at one sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRecord {
    pub scheme: SchemeId,
    pub sweep_variable: SweepVariable,
    pub sweep_value: f64,
    /// Mean of `max(0, r_s)` over successful trials, bits/s/Hz.
    pub mean_sr: Option<f64>,
    pub sr_ci95: Option<f64>,
    /// Mean BS power over successful trials, in dBm. Power-minimizing schemes only.
    pub mean_bs_power_dbm: Option<f64>,
    pub failures: usize,
    pub mean_iterations: Option<f64>,
    pub mean_wall_time_s: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub r_s: f64,
    pub sinr_d: f64,
    pub sinr_e: f64,
    /// Watts.
    pub bs_power: f64,
    pub iterations: Option<usize>,
    pub wall_time_s: f64,
}

/// One scheme on one channel draw. `outcome` is `None` when the scheme failed.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub scheme: SchemeId,
    pub point: usize,
    pub trial: u64,
    pub outcome: Option<TrialOutcome>,
}

/// A per-trial property that did not hold.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub scheme: SchemeId,
    pub sweep_value: f64,
    pub trial: u64,
    pub what: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {} trial {}: {}", self.scheme, self.sweep_value, self.trial, self.what)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub records: Vec<ResultRecord>,
    /// Ordered by point, then trial, then scheme as listed in the spec.
    pub samples: Vec<Sample>,
    pub violations: Vec<Violation>,
}

impl ExperimentReport {
    pub fn sample(&self, scheme: SchemeId, point: usize, trial: u64) -> Option<&Sample> {
        self.samples.iter().find(|s| s.scheme == scheme && s.point == point && s.trial == trial)
    }
}

const ORDER_SLACK_SR: f64 = 1e-4;
const ORDER_SLACK_POWER: f64 = 1e-6;
const RS_SLACK: f64 = 1e-3;
const GAMMA_E_REL: f64 = 1e-6;
const ZF_LEAK_REL: f64 = 1e-9;

/// Runs one scheme and evaluates the resulting design on `ch`.
pub fn run_scheme(scheme: SchemeId, ch: &ChannelSet, cfg: &SystemConfig, theta1: f64, theta2_db: f64) -> wpcj_core::Result<(TransmitDesign, TrialOutcome)> {
    let start = Instant::now();
    let (design, iterations) = match scheme {
        SchemeId::Srm => (solve_b_cj_srm(ch, cfg)?.design, None),
        SchemeId::Tpm => (solve_b_cj_tpm(ch, cfg)?.design, None),
        SchemeId::LcSrm => {
            let (d, st) = run_lc_b_cj_srm(ch, cfg, theta1, I_MAX)?;
            (d, Some(st.iter))
        }
        SchemeId::LcTpm => {
            let (d, st) = run_lc_b_cj_tpm(ch, cfg, theta2_db, I_MAX)?;
            (d, Some(st.iter))
        }
        SchemeId::Zf => (zero_forcing(ch, cfg)?, None),
    };
    let wall_time_s = start.elapsed().as_secs_f64();
    let r = rates(&design, ch, cfg.sigma2)?;
    let outcome = TrialOutcome {
        r_s: r.r_s,
        sinr_d: r.sinr_d,
        sinr_e: r.sinr_e,
        bs_power: design.bs_power(),
        iterations,
        wall_time_s,
    };
    Ok((design, outcome))
}

fn trial_violations(cfg: &SystemConfig, ch: &ChannelSet, results: &[(SchemeId, Option<(TransmitDesign, TrialOutcome)>)], value: f64, trial: u64) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut flag = |scheme, what: String| out.push(Violation { scheme, sweep_value: value, trial, what });
    let find = |id| results.iter().find(|(s, _)| *s == id).and_then(|(_, r)| r.as_ref());
    for (scheme, res) in results {
        let Some((design, o)) = res else { continue };
        let rep = check_feasibility(design, cfg);
        if !rep.feasible() {
            flag(*scheme, format!("design violates its budgets by {:e}", rep.worst_violation()));
        }
        if *scheme == SchemeId::Tpm {
            if o.r_s < cfg.rs_min - RS_SLACK {
                flag(*scheme, format!("secrecy rate {} below target {}", o.r_s, cfg.rs_min));
            }
            if o.sinr_e > cfg.gamma_e * (1.0 + GAMMA_E_REL) {
                flag(*scheme, format!("eavesdropper SINR {} above cap {}", o.sinr_e, cfg.gamma_e));
            }
        }
        if *scheme == SchemeId::Zf {
            let leak = quad_form(&design.q_cov, &ch.h_cd);
            if leak > ZF_LEAK_REL * design.q_cov.trace().re {
                flag(*scheme, format!("destination interference {leak:e}"));
            }
        }
    }
    if let (Some((_, g)), Some((_, l))) = (find(SchemeId::Srm), find(SchemeId::LcSrm)) {
        if l.r_s > g.r_s + ORDER_SLACK_SR {
            flag(SchemeId::LcSrm, format!("secrecy rate {} exceeds the global optimum {}", l.r_s, g.r_s));
        }
    }
    if let (Some((_, g)), Some((_, l))) = (find(SchemeId::Tpm), find(SchemeId::LcTpm)) {
        if l.bs_power < g.bs_power - ORDER_SLACK_POWER {
            flag(SchemeId::LcTpm, format!("power {} below the global optimum {}", l.bs_power, g.bs_power));
        }
    }
    out
}

fn mean(xs: impl Iterator<Item = f64>) -> Option<f64> {
    let (s, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    (n > 0).then(|| s / n as f64)
}

fn ci95(xs: &[f64]) -> Option<f64> {
    let n = xs.len();
    if n < 2 {
        return None;
    }
    let m = xs.iter().sum::<f64>() / n as f64;
    let var = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1) as f64;
    Some(1.96 * (var / n as f64).sqrt())
}

fn aggregate(spec: &ExperimentSpec, scheme: SchemeId, value: f64, outcomes: &[&TrialOutcome], failures: usize) -> ResultRecord {
    let sr: Vec<f64> = outcomes.iter().map(|o| o.r_s.max(0.0)).collect();
    ResultRecord {
        scheme,
        sweep_variable: spec.sweep,
        sweep_value: value,
        mean_sr: mean(sr.iter().copied()),
        sr_ci95: ci95(&sr),
        mean_bs_power_dbm: if scheme.minimizes_power() { mean(outcomes.iter().map(|o| o.bs_power)).map(watts_to_dbm) } else { None },
        failures,
        mean_iterations: if scheme.is_iterative() { mean(outcomes.iter().filter_map(|o| o.iterations.map(|i| i as f64))) } else { None },
        mean_wall_time_s: if spec.record_timing { mean(outcomes.iter().map(|o| o.wall_time_s)) } else { None },
    }
}

/// Runs every scheme on every `(sweep point, trial)` pair. Trial `k` draws
/// the same base channels at every sweep point. Scheme failures are counted,
/// never fatal.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentReport> {
    spec.validate()?;
    let configs = spec.configs()?;
    let jobs: Vec<(usize, u64)> = (0..configs.len()).flat_map(|p| (0..spec.trials as u64).map(move |t| (p, t))).collect();
    let per_job: Vec<(Vec<Sample>, Vec<Violation>)> = jobs
        .par_iter()
        .map(|&(point, trial)| {
            let cfg = &configs[point];
            let ch = sample_channels(cfg, trial);
            let results: Vec<_> = spec.schemes.iter().map(|&s| (s, run_scheme(s, &ch, cfg, spec.theta1, spec.theta2_db).ok())).collect();
            let violations = trial_violations(cfg, &ch, &results, spec.values[point], trial);
            let samples = results
                .into_iter()
                .map(|(scheme, r)| Sample { scheme, point, trial, outcome: r.map(|(_, o)| o) })
                .collect();
            (samples, violations)
        })
        .collect();
    let mut samples = Vec::with_capacity(jobs.len() * spec.schemes.len());
    let mut violations = Vec::new();
    for (s, v) in per_job {
        samples.extend(s);
        violations.extend(v);
    }
    let mut records = Vec::new();
    for (point, &value) in spec.values.iter().enumerate() {
        for &scheme in &spec.schemes {
            let here: Vec<&Sample> = samples.iter().filter(|s| s.point == point && s.scheme == scheme).collect();
            let ok: Vec<&TrialOutcome> = here.iter().filter_map(|s| s.outcome.as_ref()).collect();
            records.push(aggregate(spec, scheme, value, &ok, here.len() - ok.len()));
        }
    }
    Ok(ExperimentReport { records, samples, violations })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mini(trials: usize) -> ExperimentSpec {
        let mut s = ExperimentSpec::preset(FigureId::F2);
        s.template = SystemConfig::new(3, 2).unwrap();
        s.values = vec![30.0, 40.0];
        s.trials = trials;
        s.seed = 5;
        s
    }

    #[test]
    fn names_round_trip() {
        for id in SchemeId::ALL {
            assert_eq!(id.name().parse::<SchemeId>().unwrap(), id);
        }
        for v in SweepVariable::ALL {
            assert_eq!(v.name().parse::<SweepVariable>().unwrap(), v);
        }
        assert!("qosd".parse::<SchemeId>().is_err());
    }

    #[test]
    fn sweep_application() {
        let t = SystemConfig::new(8, 4).unwrap();
        assert!((SweepVariable::PBsDbm.apply(&t, 40.0).unwrap().p_bs_max - 10.0).abs() < 1e-12);
        assert_eq!(SweepVariable::NJammers.apply(&t, 12.0).unwrap().p_harvested.len(), 12);
        assert_eq!(SweepVariable::MAntennas.apply(&t, 2.0).unwrap().m, 2);
        assert!(SweepVariable::PiMw.apply(&t, 8.0).unwrap().p_harvested.iter().all(|&p| (p - 8e-3).abs() < 1e-15));
        assert!(SweepVariable::NJammers.apply(&t, 2.5).is_err());
    }

    #[test]
    fn presets_are_valid() {
        for f in [FigureId::F2, FigureId::F3, FigureId::F4, FigureId::F5, FigureId::F6] {
            let s = ExperimentSpec::preset(f);
            s.validate().unwrap();
            s.configs().unwrap();
        }
        assert_eq!(ExperimentSpec::preset(FigureId::F6).template.rs_min, 2.0);
    }

    #[test]
    fn rejects_bad_specs() {
        let mut s = mini(1);
        s.values = vec![40.0, 30.0];
        assert!(run_experiment(&s).is_err());
        let mut s = mini(1);
        s.trials = 0;
        assert!(run_experiment(&s).is_err());
    }

    #[test]
    fn records_cover_every_scheme_and_point() {
        let s = mini(3);
        let rep = run_experiment(&s).unwrap();
        assert_eq!(rep.records.len(), 6);
        assert_eq!(rep.samples.len(), 18);
        assert!(rep.violations.is_empty(), "{:?}", rep.violations);
        for r in &rep.records {
            assert_eq!(r.failures, 0);
            assert!(r.mean_sr.unwrap() >= 0.0);
            assert!(r.mean_bs_power_dbm.is_none());
            assert_eq!(r.mean_iterations.is_some(), r.scheme == SchemeId::LcSrm);
            assert!(r.mean_wall_time_s.is_none());
        }
    }

    #[test]
    fn power_schemes_report_power() {
        let mut s = mini(2);
        s.schemes = vec![SchemeId::Tpm, SchemeId::LcTpm];
        s.template = s.template.with_rs_min(1.0).unwrap();
        let rep = run_experiment(&s).unwrap();
        assert!(rep.violations.is_empty(), "{:?}", rep.violations);
        for r in &rep.records {
            assert!(r.mean_bs_power_dbm.is_some());
            assert!(r.mean_sr.unwrap() >= 1.0 - 1e-3);
        }
    }

    #[test]
    fn single_trial_has_no_interval() {
        let rep = run_experiment(&mini(1)).unwrap();
        assert!(rep.records.iter().all(|r| r.sr_ci95.is_none()));
    }

    #[test]
    fn interval_of_constant_samples_is_zero() {
        assert_eq!(ci95(&[2.0, 2.0, 2.0]), Some(0.0));
        assert_eq!(mean([].into_iter()), None);
    }
}
