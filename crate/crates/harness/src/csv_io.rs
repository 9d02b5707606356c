//! Result tables. Numbers carry six significant digits and missing values
//! are written as empty fields.

use std::io::Write;
use std::path::Path;

use crate::error::{HarnessError, Result};
use crate::experiment::ResultRecord;

pub const HEADER: [&str; 9] = [
    "scheme",
    "sweep_variable",
    "sweep_value",
    "mean_sr",
    "sr_ci95",
    "mean_bs_power_dbm",
    "failures",
    "mean_iterations",
    "mean_wall_time_s",
];

/// Decimal rendering of `x` rounded to six significant digits.
pub fn format_sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x.is_finite() { "0".into() } else { x.to_string() };
    }
    let sci = format!("{x:.5e}");
    let exp: i32 = sci[sci.find('e').unwrap() + 1..].parse().unwrap();
    let rounded: f64 = sci.parse().unwrap();
    let decimals = (5 - exp).max(0) as usize;
    let s = format!("{rounded:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(format_sig6).unwrap_or_default()
}

pub fn write_csv<W: Write>(records: &[ResultRecord], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(HEADER)?;
    for r in records {
        w.write_record([
            r.scheme.name().to_string(),
            r.sweep_variable.name().to_string(),
            format_sig6(r.sweep_value),
            opt(r.mean_sr),
            opt(r.sr_ci95),
            opt(r.mean_bs_power_dbm),
            r.failures.to_string(),
            opt(r.mean_iterations),
            opt(r.mean_wall_time_s),
        ])?;
    }
    w.flush().map_err(|e| HarnessError::io("<csv>", e))?;
    Ok(())
}

pub fn to_csv_string(records: &[ResultRecord]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(records, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv output is UTF-8"))
}

pub fn emit_csv(records: &[ResultRecord], path: &Path) -> Result<()> {
    if records.is_empty() {
        return Err(HarnessError::InvalidSpec("no records to write".into()));
    }
    let text = to_csv_string(records)?;
    std::fs::write(path, text).map_err(|e| HarnessError::io(path, e))
}

fn field<T: std::str::FromStr>(s: &str, name: &str) -> Result<T> {
    s.parse().map_err(|_| HarnessError::Parse(format!("bad {name} `{s}`")))
}

fn opt_field(s: &str, name: &str) -> Result<Option<f64>> {
    if s.is_empty() {
        Ok(None)
    } else {
        field(s, name).map(Some)
    }
}

pub fn parse_csv(text: &str) -> Result<Vec<ResultRecord>> {
    let mut rd = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let header = rd.headers()?.clone();
    if header.iter().ne(HEADER) {
        return Err(HarnessError::Parse(format!("unexpected header {header:?}")));
    }
    let mut out = Vec::new();
    for row in rd.records() {
        let row = row?;
        let f = |i: usize| row.get(i).unwrap_or("");
        out.push(ResultRecord {
            scheme: f(0).parse()?,
            sweep_variable: f(1).parse()?,
            sweep_value: field(f(2), "sweep_value")?,
            mean_sr: opt_field(f(3), "mean_sr")?,
            sr_ci95: opt_field(f(4), "sr_ci95")?,
            mean_bs_power_dbm: opt_field(f(5), "mean_bs_power_dbm")?,
            failures: field(f(6), "failures")?,
            mean_iterations: opt_field(f(7), "mean_iterations")?,
            mean_wall_time_s: opt_field(f(8), "mean_wall_time_s")?,
        });
    }
    Ok(out)
}

pub fn read_csv(path: &Path) -> Result<Vec<ResultRecord>> {
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    parse_csv(&text)
}
