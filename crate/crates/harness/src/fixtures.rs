//! Stored channel realizations. A fixture is a key-value file holding the
//! configuration and the four channel vectors as `re,im` pairs.

use std::fmt::Write as _;
use std::path::Path;

use wpcj_core::linalg::{CVector, Complex64};
use wpcj_core::model::{sample_channels, ChannelSet, SystemConfig};

use crate::config::{get, get_list, parse_kv, KeyValues};
use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Fixture {
    pub cfg: SystemConfig,
    pub ch: ChannelSet,
}

fn join(xs: impl Iterator<Item = f64>) -> String {
    xs.map(|x| format!("{x:?}")).collect::<Vec<_>>().join(",")
}

fn vector(kv: &KeyValues, key: &str, len: usize) -> Result<CVector> {
    let xs: Vec<f64> = get_list(kv, key)?.ok_or_else(|| HarnessError::Parse(format!("missing `{key}`")))?;
    if xs.len() != 2 * len {
        return Err(HarnessError::Parse(format!("`{key}` needs {} numbers, found {}", 2 * len, xs.len())));
    }
    Ok(CVector::from_iterator(len, xs.chunks(2).map(|c| Complex64::new(c[0], c[1]))))
}

fn required<T: std::str::FromStr>(kv: &KeyValues, key: &str) -> Result<T> {
    get(kv, key)?.ok_or_else(|| HarnessError::Parse(format!("missing `{key}`")))
}

impl Fixture {
    pub fn to_text(&self) -> String {
        let c = &self.cfg;
        let mut s = String::new();
        writeln!(s, "m = {}", c.m).unwrap();
        writeln!(s, "n = {}", c.n).unwrap();
        writeln!(s, "p-bs-w = {:?}", c.p_bs_max).unwrap();
        writeln!(s, "p-i-w = {}", join(c.p_harvested.iter().copied())).unwrap();
        writeln!(s, "sigma2 = {:?}", c.sigma2).unwrap();
        writeln!(s, "gamma-e = {:?}", c.gamma_e).unwrap();
        writeln!(s, "rs-min = {:?}", c.rs_min).unwrap();
        writeln!(s, "rician-k = {:?}", c.rician_k).unwrap();
        writeln!(s, "seed = {}", c.seed).unwrap();
        for (key, v) in [("h-bd", &self.ch.h_bd), ("h-be", &self.ch.h_be), ("h-cd", &self.ch.h_cd), ("h-ce", &self.ch.h_ce)] {
            writeln!(s, "{key} = {}", join(v.iter().flat_map(|z| [z.re, z.im]))).unwrap();
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let kv = parse_kv(text)?;
        let m: usize = required(&kv, "m")?;
        let n: usize = required(&kv, "n")?;
        let mut cfg = SystemConfig::new(m, n)?
            .with_p_bs(required(&kv, "p-bs-w")?)?
            .with_harvest(get_list(&kv, "p-i-w")?.ok_or_else(|| HarnessError::Parse("missing `p-i-w`".into()))?)?
            .with_sigma2(required(&kv, "sigma2")?)?
            .with_gamma_e(required(&kv, "gamma-e")?)?
            .with_rs_min(required(&kv, "rs-min")?)?
            .with_seed(get(&kv, "seed")?.unwrap_or(0));
        if let Some(k) = get(&kv, "rician-k")? {
            cfg = cfg.with_rician_k(k)?;
        }
        let ch = ChannelSet::new(vector(&kv, "h-bd", m)?, vector(&kv, "h-be", m)?, vector(&kv, "h-cd", n)?, vector(&kv, "h-ce", n)?)?;
        Ok(Fixture { cfg, ch })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::from_text(&text)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text()).map_err(|e| HarnessError::io(path, e))
    }
}

pub const FIXTURE_SEED: u64 = 2024;
pub const FIXTURE_COUNT: usize = 20;

/// The small-network draws used to check the solvers against exhaustive search.
pub fn small_fixtures() -> Vec<Fixture> {
    let cfg = SystemConfig::new(2, 2).expect("valid").with_seed(FIXTURE_SEED);
    (0..FIXTURE_COUNT as u64).map(|t| Fixture { cfg: cfg.clone(), ch: sample_channels(&cfg, t) }).collect()
}

pub fn fixture_file_name(index: usize) -> String {
    format!("m2n2_{index:02}.txt")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip_is_exact() {
        for f in small_fixtures().into_iter().take(3) {
            assert_eq!(Fixture::from_text(&f.to_text()).unwrap(), f);
        }
    }

    #[test]
    fn rejects_short_vectors() {
        let f = &small_fixtures()[0];
        let text = f.to_text().replace("h-cd = ", "h-cd = 1.0,");
        assert!(Fixture::from_text(&text).is_err());
        let text: String = f.to_text().lines().filter(|l| !l.starts_with("h-ce")).map(|l| format!("{l}\n")).collect();
        assert!(Fixture::from_text(&text).is_err());
    }
}
