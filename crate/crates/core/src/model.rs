//! Downlink wiretap model with a multi-antenna base station, one destination,
//! one eavesdropper and `N` single-antenna jamming nodes powered by harvested
//! energy.

use alloc::vec::Vec;

use num_complex::Complex64;
#[cfg(not(feature = "std"))]
use num_traits::Float;
use rand_chacha::ChaCha12Rng;
use rand_core::SeedableRng;
use rand_distr::{Distribution, StandardNormal, Uniform};

use crate::error::{Error, Result};
use crate::linalg::{frobenius, hermitian_defect, inner, max_eigenvalue, min_eigenvalue, norm_sqr, quad_form, CMatrix, CVector};

/// Static parameters of one network instance. All powers are in watts.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    /// Base-station antennas.
    pub m: usize,
    /// Cooperative jamming nodes.
    pub n: usize,
    pub p_bs_max: f64,
    pub p_harvested: Vec<f64>,
    pub sigma2: f64,
    pub gamma_e: f64,
    /// Secrecy-rate target in bits/s/Hz, used by the power-minimization schemes.
    pub rs_min: f64,
    pub rician_k: f64,
    pub seed: u64,
}

impl SystemConfig {
    /// Reference operating point: 10 W at the BS, 2.5 mW per node,
    /// noise 1e-5 W, eavesdropper cap 0.1, secrecy target 2 bits/s/Hz, K = 3.
    pub fn new(m: usize, n: usize) -> Result<Self> {
        let cfg = SystemConfig {
            m,
            n,
            p_bs_max: 10.0,
            p_harvested: alloc::vec![2.5e-3; n],
            sigma2: 1e-5,
            gamma_e: 0.1,
            rs_min: 2.0,
            rician_k: 3.0,
            seed: 0,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_p_bs(mut self, watts: f64) -> Result<Self> {
        self.p_bs_max = watts;
        self.validate()?;
        Ok(self)
    }

    pub fn with_p_bs_dbm(self, dbm: f64) -> Result<Self> {
        self.with_p_bs(dbm_to_watts(dbm))
    }

    /// Sets the same harvested power on every node.
    pub fn with_uniform_harvest(mut self, watts: f64) -> Result<Self> {
        self.p_harvested = alloc::vec![watts; self.n];
        self.validate()?;
        Ok(self)
    }

    pub fn with_harvest(mut self, p: Vec<f64>) -> Result<Self> {
        self.p_harvested = p;
        self.validate()?;
        Ok(self)
    }

    pub fn with_sigma2(mut self, sigma2: f64) -> Result<Self> {
        self.sigma2 = sigma2;
        self.validate()?;
        Ok(self)
    }

    pub fn with_gamma_e(mut self, gamma_e: f64) -> Result<Self> {
        self.gamma_e = gamma_e;
        self.validate()?;
        Ok(self)
    }

    pub fn with_rs_min(mut self, rs_min: f64) -> Result<Self> {
        self.rs_min = rs_min;
        self.validate()?;
        Ok(self)
    }

    pub fn with_rician_k(mut self, k: f64) -> Result<Self> {
        self.rician_k = k;
        self.validate()?;
        Ok(self)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Changes the node count, keeping the first node's harvested power for
    /// any added nodes.
    pub fn with_n(mut self, n: usize) -> Result<Self> {
        let fill = self.p_harvested.first().copied().unwrap_or(2.5e-3);
        self.p_harvested.resize(n, fill);
        self.n = n;
        self.validate()?;
        Ok(self)
    }

    pub fn with_m(mut self, m: usize) -> Result<Self> {
        self.m = m;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.into()));
        if self.m == 0 {
            return bad("M must be at least 1");
        }
        if self.n < 2 {
            return bad("at least two jamming nodes are required");
        }
        if self.p_harvested.len() != self.n {
            return Err(Error::DimensionMismatch {
                what: "p_harvested",
                expected: self.n,
                found: self.p_harvested.len(),
            });
        }
        if !(self.p_bs_max > 0.0 && self.p_bs_max.is_finite()) {
            return bad("p_bs_max must be positive");
        }
        if self.p_harvested.iter().any(|&p| !(p >= 0.0 && p.is_finite())) {
            return bad("harvested powers must be nonnegative");
        }
        if !(self.sigma2 > 0.0 && self.sigma2.is_finite()) {
            return bad("sigma2 must be positive");
        }
        if !(self.gamma_e >= 0.0 && self.gamma_e.is_finite()) {
            return bad("gamma_e must be nonnegative");
        }
        if !(self.rs_min >= 0.0 && self.rs_min.is_finite()) {
            return bad("rs_min must be nonnegative");
        }
        if !(self.rician_k >= 0.0 && self.rician_k.is_finite()) {
            return bad("rician_k must be nonnegative");
        }
        Ok(())
    }

    pub fn gamma_d(&self) -> f64 {
        gamma_d_from(self.rs_min, self.gamma_e)
    }

    pub fn p_max_node(&self) -> f64 {
        self.p_harvested.iter().copied().fold(0.0, f64::max)
    }
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn watts_to_dbm(w: f64) -> f64 {
    10.0 * w.log10() + 30.0
}

/// Channel vectors of one realization.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    pub h_bd: CVector,
    pub h_be: CVector,
    pub h_cd: CVector,
    pub h_ce: CVector,
}

impl ChannelSet {
    pub fn new(h_bd: CVector, h_be: CVector, h_cd: CVector, h_ce: CVector) -> Result<Self> {
        let ch = ChannelSet { h_bd, h_be, h_cd, h_ce };
        if ch.h_bd.len() != ch.h_be.len() {
            return Err(Error::DimensionMismatch {
                what: "h_be",
                expected: ch.h_bd.len(),
                found: ch.h_be.len(),
            });
        }
        if ch.h_cd.len() != ch.h_ce.len() {
            return Err(Error::DimensionMismatch {
                what: "h_ce",
                expected: ch.h_cd.len(),
                found: ch.h_ce.len(),
            });
        }
        let all = ch.h_bd.iter().chain(ch.h_be.iter()).chain(ch.h_cd.iter()).chain(ch.h_ce.iter());
        for z in all {
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Err(Error::InvalidConfig("channel entries must be finite".into()));
            }
        }
        Ok(ch)
    }

    pub fn m(&self) -> usize {
        self.h_bd.len()
    }

    pub fn n(&self) -> usize {
        self.h_cd.len()
    }

    pub fn check_against(&self, cfg: &SystemConfig) -> Result<()> {
        if self.m() != cfg.m {
            return Err(Error::DimensionMismatch { what: "h_bd", expected: cfg.m, found: self.m() });
        }
        if self.n() != cfg.n {
            return Err(Error::DimensionMismatch { what: "h_cd", expected: cfg.n, found: self.n() });
        }
        Ok(())
    }

    /// `A = h_bd h_bd^H`.
    pub fn a(&self) -> CMatrix {
        crate::linalg::outer(&self.h_bd)
    }

    /// `B = h_cd h_cd^H`.
    pub fn b(&self) -> CMatrix {
        crate::linalg::outer(&self.h_cd)
    }

    /// `C = h_be h_be^H`.
    pub fn c(&self) -> CMatrix {
        crate::linalg::outer(&self.h_be)
    }

    /// `D = h_ce h_ce^H`.
    pub fn d(&self) -> CMatrix {
        crate::linalg::outer(&self.h_ce)
    }

    /// Swaps the roles of destination and eavesdropper.
    pub fn swapped(&self) -> ChannelSet {
        ChannelSet {
            h_bd: self.h_be.clone(),
            h_be: self.h_bd.clone(),
            h_cd: self.h_ce.clone(),
            h_ce: self.h_cd.clone(),
        }
    }
}

#[derive(Clone, Copy)]
enum ChannelKind {
    Bd = 0,
    Be = 1,
    Cd = 2,
    Ce = 3,
}

fn kind_rng(seed: u64, trial: u64, kind: ChannelKind) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    // each kind gets a disjoint stretch of the keystream
    rng.set_word_pos((kind as u128) << 48);
    rng
}

fn cn01<R: rand_core::RngCore>(rng: &mut R) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im) * core::f64::consts::FRAC_1_SQRT_2
}

fn rician_vec(seed: u64, trial: u64, kind: ChannelKind, len: usize, k: f64) -> CVector {
    let mut rng = kind_rng(seed, trial, kind);
    let phase = Uniform::new(0.0, 2.0 * core::f64::consts::PI);
    let los = k.sqrt();
    let norm = (1.0 + k).sqrt();
    CVector::from_fn(len, |_, _| {
        let phi: f64 = phase.sample(&mut rng);
        let g = cn01(&mut rng);
        (Complex64::from_polar(los, phi) + g) / norm
    })
}

fn rayleigh_vec(seed: u64, trial: u64, kind: ChannelKind, len: usize) -> CVector {
    let mut rng = kind_rng(seed, trial, kind);
    CVector::from_fn(len, |_, _| cn01(&mut rng))
}

/// Draws one channel realization. BS links are Rician with unit second
/// moment, node links are Rayleigh. Entries are drawn sequentially per link,
/// so a realization with more antennas or nodes extends one with fewer.
pub fn sample_channels(cfg: &SystemConfig, trial_index: u64) -> ChannelSet {
    let (s, k) = (cfg.seed, cfg.rician_k);
    ChannelSet {
        h_bd: rician_vec(s, trial_index, ChannelKind::Bd, cfg.m, k),
        h_be: rician_vec(s, trial_index, ChannelKind::Be, cfg.m, k),
        h_cd: rayleigh_vec(s, trial_index, ChannelKind::Cd, cfg.n),
        h_ce: rayleigh_vec(s, trial_index, ChannelKind::Ce, cfg.n),
    }
}

/// Beamformer and jamming covariance.
#[derive(Debug, Clone, PartialEq)]
pub struct TransmitDesign {
    pub v: CVector,
    pub q_cov: CMatrix,
    pub q_vec: Option<CVector>,
}

impl TransmitDesign {
    pub fn new(v: CVector, q_cov: CMatrix) -> Result<Self> {
        check_covariance(&q_cov)?;
        Ok(TransmitDesign { v, q_cov, q_vec: None })
    }

    /// Rank-one jamming `Q = q q^H`.
    pub fn from_vectors(v: CVector, q: CVector) -> Self {
        let q_cov = crate::linalg::outer(&q);
        TransmitDesign { v, q_cov, q_vec: Some(q) }
    }

    pub fn no_jamming(v: CVector, n: usize) -> Self {
        TransmitDesign { v, q_cov: CMatrix::zeros(n, n), q_vec: None }
    }

    pub fn bs_power(&self) -> f64 {
        norm_sqr(&self.v)
    }
}

fn check_covariance(q: &CMatrix) -> Result<()> {
    if !q.is_square() {
        return Err(Error::DimensionMismatch { what: "q_cov", expected: q.nrows(), found: q.ncols() });
    }
    let defect = hermitian_defect(q);
    if defect > 1e-10 {
        return Err(Error::NotHermitian(defect));
    }
    if q.nrows() > 0 {
        let top = max_eigenvalue(q).max(0.0);
        if min_eigenvalue(q) < -1e-9 * top {
            return Err(Error::InvalidConfig("jamming covariance is not PSD".into()));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rates {
    pub r_d: f64,
    pub r_e: f64,
    /// Unclamped: negative when the eavesdropper sees the better channel.
    pub r_s: f64,
    pub sinr_d: f64,
    pub sinr_e: f64,
}

pub fn sinr(h_b: &CVector, h_c: &CVector, design: &TransmitDesign, sigma2: f64) -> f64 {
    let signal = inner(h_b, &design.v).norm_sqr();
    let jam = quad_form(&design.q_cov, h_c).max(0.0);
    signal / (jam + sigma2)
}

pub fn rates(design: &TransmitDesign, ch: &ChannelSet, sigma2: f64) -> Result<Rates> {
    if design.v.len() != ch.m() {
        return Err(Error::DimensionMismatch { what: "v", expected: ch.m(), found: design.v.len() });
    }
    if design.q_cov.nrows() != ch.n() || design.q_cov.ncols() != ch.n() {
        return Err(Error::DimensionMismatch { what: "q_cov", expected: ch.n(), found: design.q_cov.nrows() });
    }
    let sinr_d = sinr(&ch.h_bd, &ch.h_cd, design, sigma2);
    let sinr_e = sinr(&ch.h_be, &ch.h_ce, design, sigma2);
    let r_d = (1.0 + sinr_d).log2();
    let r_e = (1.0 + sinr_e).log2();
    Ok(Rates { r_d, r_e, r_s: r_d - r_e, sinr_d, sinr_e })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityReport {
    pub bs_power_ok: bool,
    pub node_power_ok: bool,
    pub psd_ok: bool,
    /// `max(0, ||v||² − P_BS)`.
    pub bs_violation: f64,
    /// `max(0, Q_ii − P_i)` per node.
    pub node_violation: Vec<f64>,
    /// `max(0, −λ_min(Q))`.
    pub psd_violation: f64,
    pub tol: f64,
}

impl FeasibilityReport {
    pub fn feasible(&self) -> bool {
        self.bs_power_ok && self.node_power_ok && self.psd_ok
    }

    pub fn worst_violation(&self) -> f64 {
        self.node_violation
            .iter()
            .copied()
            .fold(self.bs_violation.max(self.psd_violation), f64::max)
    }
}

pub fn check_feasibility(design: &TransmitDesign, cfg: &SystemConfig) -> FeasibilityReport {
    let tol = 1e-7 * cfg.p_bs_max.max(1.0);
    let bs_violation = (design.bs_power() - cfg.p_bs_max).max(0.0);
    let node_violation: Vec<f64> = cfg
        .p_harvested
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let qii = if i < design.q_cov.nrows() { design.q_cov[(i, i)].re } else { 0.0 };
            (qii - p).max(0.0)
        })
        .collect();
    let psd_violation = (-min_eigenvalue(&design.q_cov)).max(0.0);
    FeasibilityReport {
        bs_power_ok: bs_violation <= tol,
        node_power_ok: node_violation.iter().all(|&v| v <= tol),
        psd_ok: psd_violation <= tol,
        bs_violation,
        node_violation,
        psd_violation,
        tol,
    }
}

/// Destination SINR needed for secrecy rate `rs_min` when the eavesdropper
/// sits exactly at `gamma_e`.
pub fn gamma_d_from(rs_min: f64, gamma_e: f64) -> f64 {
    2f64.powf(rs_min) * (1.0 + gamma_e) - 1.0
}

/// `||q_cov − q q^H||_F` relative check used for rank-one jamming designs.
pub fn q_vec_consistent(design: &TransmitDesign) -> bool {
    match &design.q_vec {
        None => true,
        Some(q) => {
            let diff = &design.q_cov - crate::linalg::outer(q);
            frobenius(&diff) <= 1e-8 * (1.0 + frobenius(&design.q_cov))
        }
    }
}
