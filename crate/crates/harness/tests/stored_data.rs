//! Checked-in fixtures and the reference result table. Set `UPDATE_GOLDEN=1`
//! to rewrite them.

use std::path::PathBuf;

use wpcj_harness::csv_io::to_csv_string;
use wpcj_harness::experiment::{run_experiment, ExperimentSpec, FigureId};
use wpcj_harness::fixtures::{fixture_file_name, small_fixtures, Fixture};
use wpcj_core::model::SystemConfig;

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn updating() -> bool {
    std::env::var_os("UPDATE_GOLDEN").is_some_and(|v| v == "1")
}

#[test]
fn fixture_files_match_generator() {
    let dir = root().join("fixtures");
    for (i, fx) in small_fixtures().iter().enumerate() {
        let path = dir.join(fixture_file_name(i));
        if updating() {
            std::fs::create_dir_all(&dir).unwrap();
            fx.save(&path).unwrap();
        }
        assert_eq!(&Fixture::load(&path).unwrap(), fx, "{}", path.display());
    }
}

pub fn mini_f2() -> ExperimentSpec {
    let mut s = ExperimentSpec::preset(FigureId::F2);
    s.template = SystemConfig::new(4, 2).unwrap();
    s.values = vec![30.0, 40.0, 50.0];
    s.trials = 4;
    s.seed = 11;
    s
}

#[test]
fn seeded_mini_run_matches_golden_table() {
    let path = root().join("golden").join("f2_mini.csv");
    let text = to_csv_string(&run_experiment(&mini_f2()).unwrap().records).unwrap();
    if updating() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, &text).unwrap();
    }
    assert_eq!(text, std::fs::read_to_string(&path).unwrap());
}

#[test]
fn reruns_are_byte_identical() {
    let s = mini_f2();
    let a = to_csv_string(&run_experiment(&s).unwrap().records).unwrap();
    let b = to_csv_string(&run_experiment(&s).unwrap().records).unwrap();
    assert_eq!(a, b);
    let mut one = s.clone();
    one.trials = 1;
    let c = to_csv_string(&run_experiment(&one).unwrap().records).unwrap();
    assert_eq!(c, to_csv_string(&run_experiment(&one).unwrap().records).unwrap());
    assert!(!c.contains('\r'));
}

#[test]
fn node_sweep_extends_the_same_draw() {
    let mut s = ExperimentSpec::preset(FigureId::F3);
    s.seed = 3;
    s.values = vec![4.0, 8.0, 16.0];
    let cfgs = s.configs().unwrap();
    for t in 0..5 {
        let small = wpcj_core::model::sample_channels(&cfgs[0], t);
        for cfg in &cfgs[1..] {
            let big = wpcj_core::model::sample_channels(cfg, t);
            assert_eq!(small.h_bd, big.h_bd);
            assert_eq!(small.h_cd.as_slice(), &big.h_cd.as_slice()[..4]);
            assert_eq!(small.h_ce.as_slice(), &big.h_ce.as_slice()[..4]);
        }
    }
}
