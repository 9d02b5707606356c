//! Per-trial properties over random draws.

use proptest::prelude::*;
use wpcj_core::model::{sample_channels, SystemConfig};
use wpcj_harness::experiment::{run_scheme, SchemeId};

fn cfg(seed: u64, n: usize) -> SystemConfig {
    SystemConfig::new(4, n).unwrap().with_seed(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn local_never_beats_global(seed in any::<u64>(), n in 2usize..5, p_dbm in 30.0f64..45.0) {
        let c = cfg(seed, n).with_p_bs_dbm(p_dbm).unwrap();
        let ch = sample_channels(&c, 0);
        let (_, g) = run_scheme(SchemeId::Srm, &ch, &c, 0.01, 1.0).unwrap();
        if let Ok((_, l)) = run_scheme(SchemeId::LcSrm, &ch, &c, 0.01, 1.0) {
            prop_assert!(l.r_s <= g.r_s + 1e-4, "{} > {}", l.r_s, g.r_s);
        }
        let (_, z) = run_scheme(SchemeId::Zf, &ch, &c, 0.01, 1.0).unwrap();
        prop_assert!(z.sinr_d <= g.sinr_d * (1.0 + 1e-6) || z.sinr_e > c.gamma_e);
    }

    #[test]
    fn power_minimization_meets_target(seed in any::<u64>(), n in 2usize..5) {
        let c = cfg(seed, n);
        let ch = sample_channels(&c, 1);
        if let Ok((_, g)) = run_scheme(SchemeId::Tpm, &ch, &c, 0.01, 1.0) {
            prop_assert!(g.r_s >= c.rs_min - 1e-3);
            prop_assert!(g.sinr_e <= c.gamma_e * (1.0 + 1e-6));
            if let Ok((_, l)) = run_scheme(SchemeId::LcTpm, &ch, &c, 0.01, 1.0) {
                prop_assert!(l.bs_power >= g.bs_power - 1e-6);
            }
        }
    }
}
