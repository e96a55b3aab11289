use std::fmt::Write as _;

use super::batch::BatchResult;
use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "scenario,replication,metric,tick,value";

/// `%.6g`-style formatting: six significant digits, trailing zeros
/// stripped, exponent form outside 1e-4..1e6.
pub fn format_g6(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..6).contains(&exp) {
        let m = mantissa.trim_end_matches('0').trim_end_matches('.');
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{m}e{sign}{:02}", exp.abs());
    }
    let decimals = (5 - exp).max(0) as usize;
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Long-format metric series of every replication, sorted by
/// (replication, metric, tick).
pub fn export_csv(batch: &BatchResult) -> String {
    let mut rows: Vec<(u32, &str, u64, f64)> = batch
        .replications
        .iter()
        .flat_map(|r| r.series.iter().map(move |s| (r.replication, s.name.as_str(), s.tick, s.value)))
        .collect();
    rows.sort_by(|a, b| (a.0, a.1, a.2).cmp(&(b.0, b.1, b.2)));
    write_rows(&batch.scenario, rows)
}

fn write_rows<'a>(scenario: &str, rows: impl IntoIterator<Item = (u32, &'a str, u64, f64)>) -> String {
    let name = csv_field(scenario);
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for (rep, metric, tick, value) in rows {
        let _ = writeln!(out, "{name},{rep},{},{tick},{}", csv_field(metric), format_g6(value));
    }
    out
}

/// Writes parsed rows back out unchanged in order.
pub fn rows_to_csv(rows: &[CsvRow]) -> String {
    let scenario = rows.first().map_or("", |r| r.scenario.as_str());
    write_rows(scenario, rows.iter().map(|r| (r.replication, r.metric.as_str(), r.tick, r.value)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct CsvRow {
    pub scenario: String,
    pub replication: u32,
    pub metric: String,
    pub tick: u64,
    pub value: f64,
}

/// Reads back what [`export_csv`] writes.
pub fn parse_csv(text: &str) -> Result<Vec<CsvRow>> {
    let mut lines = text.lines();
    if lines.next() != Some(CSV_HEADER) {
        return Err(Error::Config("missing metrics CSV header".into()));
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let bad = || Error::Config(format!("malformed CSV row {}: {line}", i + 2));
            let f: Vec<&str> = line.rsplitn(4, ',').collect();
            let [value, tick, metric, head] = f[..] else { return Err(bad()) };
            let (scenario, rep) = head.rsplit_once(',').ok_or_else(bad)?;
            Ok(CsvRow {
                scenario: scenario.trim_matches('"').replace("\"\"", "\""),
                replication: rep.parse().map_err(|_| bad())?,
                metric: metric.to_string(),
                tick: tick.parse().map_err(|_| bad())?,
                value: value.parse().map_err(|_| bad())?,
            })
        })
        .collect()
}
