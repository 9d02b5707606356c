//! Experiment harness for `wpcj-core`: Monte-Carlo sweeps, result tables,
//! solve-time benchmarks, stored channel fixtures and the `wpcj` command.

pub mod bench;
pub mod cli;
pub mod config;
pub mod csv_io;
pub mod error;
pub mod experiment;
pub mod fixtures;

pub use bench::{benchmark_scaling, ScalingFit};
pub use csv_io::{emit_csv, parse_csv};
pub use error::{HarnessError, Result};
pub use experiment::{run_experiment, ExperimentReport, ExperimentSpec, FigureId, ResultRecord, SchemeId, SweepVariable};
pub use wpcj_core::complexity::{complexity_estimate, ComplexityModel, SchemeKind};
pub use wpcj_core::oracle::{oracle_srm, oracle_tpm, OracleResult};
