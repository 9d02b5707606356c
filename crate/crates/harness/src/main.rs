use clap::Parser;
use wpcj_harness::cli::{execute, Cli};

fn main() {
    std::process::exit(execute(&Cli::parse()));
}
