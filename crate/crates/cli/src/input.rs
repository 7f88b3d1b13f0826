//! CSV ingestion in two schemas:
//!
//! * raw: `year,rainfall_mm,temperature_c,maize_yield`
//! * labelled: `year,state,observation` with states `1..=4` and
//!   observations `L`, `M`, `H`
//!
//! Columns may appear in any order but the header must name exactly one of
//! the two sets.

use std::collections::HashMap;
use std::path::Path;

use cropcast_core::estimation::{DiscretizedSeries, N_CLIMATE_STATES, N_YIELD_LEVELS};
use cropcast_core::{ClimateYieldRecord, LabelSet};

use crate::error::{CliError, CliResult, Stage};

const RAW_COLUMNS: [&str; 4] = ["year", "rainfall_mm", "temperature_c", "maize_yield"];
const LABELED_COLUMNS: [&str; 3] = ["year", "state", "observation"];

#[derive(Debug, Clone, PartialEq)]
pub enum InputData {
    Raw(Vec<ClimateYieldRecord>),
    Labeled(DiscretizedSeries),
}

fn err(msg: impl Into<String>) -> CliError {
    CliError::input(Stage::Ingest, msg)
}

pub fn load_csv(path: &Path) -> CliResult<InputData> {
    let text = std::fs::read_to_string(path).map_err(|e| err(format!("cannot read {}: {e}", path.display())))?;
    parse_csv(&text)
}

pub fn parse_csv(text: &str) -> CliResult<InputData> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let header: Vec<String> =
        reader.headers().map_err(|e| err(format!("unreadable header: {e}")))?.iter().map(str::to_string).collect();
    if header.iter().all(String::is_empty) {
        return Err(err("empty file: a header row is required"));
    }
    let index: HashMap<&str, usize> = header.iter().enumerate().map(|(i, h)| (h.as_str(), i)).collect();
    if index.len() != header.len() {
        return Err(err(format!("duplicate column names in header {header:?}")));
    }
    let matches = |cols: &[&str]| cols.len() == header.len() && cols.iter().all(|c| index.contains_key(c));

    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        // header is line 1
        let line = i + 2;
        let rec = rec.map_err(|e| err(format!("line {line}: {e}")))?;
        rows.push((line, rec));
    }
    if rows.is_empty() {
        return Err(err("no data rows"));
    }

    if matches(&RAW_COLUMNS) {
        let col = |name: &str| index[name];
        let mut records = Vec::with_capacity(rows.len());
        for (line, rec) in &rows {
            records.push(ClimateYieldRecord {
                year: parse_year(rec.get(col("year")), *line)?,
                rainfall: parse_num(rec.get(col("rainfall_mm")), "rainfall_mm", *line)?,
                temperature: parse_num(rec.get(col("temperature_c")), "temperature_c", *line)?,
                maize_yield: parse_num(rec.get(col("maize_yield")), "maize_yield", *line)?,
            });
            let r = records.last().expect("just pushed");
            if r.rainfall < 0.0 || r.maize_yield < 0.0 {
                return Err(err(format!("line {line}: rainfall_mm and maize_yield must be non-negative")));
            }
        }
        check_order(rows.iter().map(|(l, _)| *l).zip(records.iter().map(|r| r.year)))?;
        Ok(InputData::Raw(records))
    } else if matches(&LABELED_COLUMNS) {
        let symbols = LabelSet::yield_levels();
        let (mut years, mut states, mut observations) = (Vec::new(), Vec::new(), Vec::new());
        for (line, rec) in &rows {
            years.push(parse_year(rec.get(index["year"]), *line)?);
            let s = rec.get(index["state"]).unwrap_or("");
            let code: usize = s.parse().map_err(|_| err(format!("line {line}: state `{s}` is not an integer")))?;
            if !(1..=N_CLIMATE_STATES).contains(&code) {
                return Err(err(format!("line {line}: state {code} outside 1..={N_CLIMATE_STATES}")));
            }
            states.push(code - 1);
            let o = rec.get(index["observation"]).unwrap_or("");
            let k = symbols
                .index_of(o)
                .ok_or_else(|| err(format!("line {line}: observation `{o}` is not one of L, M, H")))?;
            observations.push(k);
        }
        check_order(rows.iter().map(|(l, _)| *l).zip(years.iter().copied()))?;
        let series = DiscretizedSeries::from_labels(years, states, observations, N_CLIMATE_STATES, N_YIELD_LEVELS)
            .map_err(|e| err(e.to_string()))?;
        Ok(InputData::Labeled(series))
    } else {
        Err(err(format!(
            "unrecognised columns {header:?}; expected [{}] or [{}]",
            RAW_COLUMNS.join(", "),
            LABELED_COLUMNS.join(", ")
        )))
    }
}

fn parse_year(cell: Option<&str>, line: usize) -> CliResult<i32> {
    let s = cell.unwrap_or("");
    s.parse().map_err(|_| err(format!("line {line}: year `{s}` is not an integer")))
}

fn parse_num(cell: Option<&str>, column: &str, line: usize) -> CliResult<f64> {
    let s = cell.unwrap_or("");
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(err(format!("line {line}: {column} `{s}` is not a finite number"))),
    }
}

fn check_order(years: impl Iterator<Item = (usize, i32)>) -> CliResult<()> {
    let mut prev: Option<i32> = None;
    for (line, year) in years {
        if let Some(p) = prev {
            if year == p {
                return Err(err(format!("line {line}: duplicate year {year}")));
            }
            if year < p {
                return Err(err(format!("line {line}: year {year} is out of order (follows {p})")));
            }
        }
        prev = Some(year);
    }
    Ok(())
}

/// Writes a series in the labelled schema.
pub fn write_labeled(series: &DiscretizedSeries) -> String {
    let symbols = LabelSet::yield_levels();
    let mut out = String::from("year,state,observation\n");
    for ((y, s), o) in series.years.iter().zip(&series.states).zip(&series.observations) {
        out.push_str(&format!("{y},{},{}\n", s + 1, symbols.label(*o).unwrap_or("?")));
    }
    out
}
