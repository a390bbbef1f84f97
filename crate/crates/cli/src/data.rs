//! Monthly flux series: CSV ingestion in long or wide layout, writing, and the
//! log transform used before fitting.
//!
//! Long layout: `station,year,month,flux`. Wide layout: `station,year` followed
//! by twelve month columns. The cells `""`, `NA` and `na` are missing values.

use std::collections::HashSet;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use asn_core::sample::MIN_FIT_SIZE;
use asn_core::OrderedSample;
use clap::ValueEnum;
use serde::Serialize;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Layout {
    Long,
    Wide,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Record {
    pub year: i32,
    /// 1 to 12.
    pub month: u8,
    pub flux: Option<f64>,
}

/// One station's records, ordered by `(year, month)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonthlySeries {
    pub station_id: String,
    pub rows: Vec<Record>,
}

/// A skipped input row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowFault {
    /// 1-based line in the file, header included.
    pub line: u64,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LoadReport {
    /// Stations in order of first appearance.
    pub series: Vec<MonthlySeries>,
    pub faults: Vec<RowFault>,
    /// Data rows seen, malformed ones included.
    pub rows_read: usize,
}

pub fn load_csv(path: &Path, layout: Layout, strict: bool) -> Result<LoadReport> {
    let file = File::open(path).map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))?;
    read_csv(file, layout, strict)
}

fn is_missing(cell: &str) -> bool {
    matches!(cell, "" | "NA" | "na")
}

fn parse_flux(cell: &str) -> std::result::Result<Option<f64>, String> {
    if is_missing(cell) {
        return Ok(None);
    }
    match cell.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(Some(v)),
        _ => Err(format!("flux '{cell}' is not a finite number")),
    }
}

fn parse_year(cell: &str) -> std::result::Result<i32, String> {
    cell.parse().map_err(|_| format!("year '{cell}' is not an integer"))
}

fn parse_month(cell: &str) -> std::result::Result<u8, String> {
    match cell.parse::<u8>() {
        Ok(m) if (1..=12).contains(&m) => Ok(m),
        _ => Err(format!("month '{cell}' is not in 1..12")),
    }
}

/// Parses one data row into `(station, records)`.
fn parse_row(rec: &csv::StringRecord, layout: Layout) -> std::result::Result<(String, Vec<Record>), String> {
    let width = match layout {
        Layout::Long => 4,
        Layout::Wide => 14,
    };
    if rec.len() != width {
        return Err(format!("expected {width} fields, found {}", rec.len()));
    }
    let station = rec[0].to_string();
    if station.is_empty() {
        return Err("station is empty".into());
    }
    let year = parse_year(&rec[1])?;
    let rows = match layout {
        Layout::Long => vec![Record { year, month: parse_month(&rec[2])?, flux: parse_flux(&rec[3])? }],
        Layout::Wide => (0..12)
            .map(|m| Ok(Record { year, month: m as u8 + 1, flux: parse_flux(&rec[m + 2])? }))
            .collect::<std::result::Result<_, String>>()?,
    };
    Ok((station, rows))
}

pub fn read_csv<R: Read>(input: R, layout: Layout, strict: bool) -> Result<LoadReport> {
    let mut reader = csv::ReaderBuilder::new().flexible(true).trim(csv::Trim::All).from_reader(input);
    let header = reader.headers().map_err(|e| CliError::Data(format!("cannot read header: {e}")))?.clone();
    let expected = match layout {
        Layout::Long => 4,
        Layout::Wide => 14,
    };
    if header.len() != expected {
        return Err(CliError::Data(format!(
            "{layout:?} layout expects {expected} columns, header has {}",
            header.len()
        )));
    }

    let mut series: Vec<MonthlySeries> = Vec::new();
    let mut seen = HashSet::new();
    let mut faults = Vec::new();
    let mut rows_read = 0;
    for (k, result) in reader.records().enumerate() {
        rows_read += 1;
        let rec = result.map_err(|e| CliError::Data(format!("unreadable CSV: {e}")))?;
        let line = rec.position().map_or(k as u64 + 2, |p| p.line());
        let (station, rows) = match parse_row(&rec, layout) {
            Ok(parsed) => parsed,
            Err(message) => {
                faults.push(RowFault { line, message });
                continue;
            }
        };
        for r in &rows {
            if !seen.insert((station.clone(), r.year, r.month)) {
                return Err(CliError::Data(format!(
                    "duplicate record station={station} year={} month={} at line {line}",
                    r.year, r.month
                )));
            }
        }
        match series.iter_mut().find(|s| s.station_id == station) {
            Some(s) => s.rows.extend(rows),
            None => series.push(MonthlySeries { station_id: station, rows }),
        }
    }
    if strict && faults.len() * 2 > rows_read {
        let first = &faults[0];
        return Err(CliError::Data(format!(
            "{} of {rows_read} rows malformed (first at line {}: {})",
            faults.len(),
            first.line,
            first.message
        )));
    }
    for s in &mut series {
        s.rows.sort_by_key(|r| (r.year, r.month));
    }
    Ok(LoadReport { series, faults, rows_read })
}

fn flux_cell(flux: Option<f64>) -> String {
    flux.map_or_else(|| "NA".to_string(), |v| v.to_string())
}

/// Writes `series` in `layout`. In the wide layout absent months are written
/// as missing.
pub fn write_csv<W: Write>(output: W, series: &[MonthlySeries], layout: Layout) -> Result<()> {
    let io = |e: csv::Error| CliError::Data(format!("cannot write CSV: {e}"));
    let mut w = csv::Writer::from_writer(output);
    match layout {
        Layout::Long => {
            w.write_record(["station", "year", "month", "flux"]).map_err(io)?;
            for s in series {
                for r in &s.rows {
                    w.write_record([s.station_id.clone(), r.year.to_string(), r.month.to_string(), flux_cell(r.flux)])
                        .map_err(io)?;
                }
            }
        }
        Layout::Wide => {
            let mut header = vec!["station".to_string(), "year".to_string()];
            header.extend(crate::summary::MONTHS.iter().map(|m| m.to_string()));
            w.write_record(&header).map_err(io)?;
            for s in series {
                let mut years: Vec<i32> = s.rows.iter().map(|r| r.year).collect();
                years.dedup();
                for year in years {
                    let mut row = vec![s.station_id.clone(), year.to_string()];
                    row.extend((1..=12u8).map(|m| {
                        flux_cell(s.rows.iter().find(|r| r.year == year && r.month == m).and_then(|r| r.flux))
                    }));
                    w.write_record(&row).map_err(io)?;
                }
            }
        }
    }
    w.flush().map_err(|e| CliError::Data(format!("cannot write CSV: {e}")))
}

/// Log-flux sample with counts of the excluded cells.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogSample {
    #[serde(skip)]
    pub sample: OrderedSample<f64>,
    pub used: usize,
    pub zeros: usize,
    pub negatives: usize,
    pub missing: usize,
}

/// Natural log of every strictly positive flux, pooled over all stations and
/// months with equal weight per observation.
pub fn log_transform(series: &[MonthlySeries]) -> Result<LogSample> {
    let (mut zeros, mut negatives, mut missing) = (0, 0, 0);
    let mut values = Vec::new();
    for r in series.iter().flat_map(|s| &s.rows) {
        match r.flux {
            None => missing += 1,
            Some(v) if v > 0.0 => values.push(v.ln()),
            Some(0.0) => zeros += 1,
            Some(_) => negatives += 1,
        }
    }
    if values.len() < MIN_FIT_SIZE {
        return Err(CliError::Data(format!(
            "log transform needs at least {MIN_FIT_SIZE} positive fluxes, found {} ({zeros} zero, {negatives} negative, {missing} missing)",
            values.len()
        )));
    }
    let used = values.len();
    let sample = OrderedSample::new(values)?;
    Ok(LogSample { sample, used, zeros, negatives, missing })
}

/// Every observed flux as-is, pooled.
pub fn raw_values(series: &[MonthlySeries]) -> Vec<f64> {
    series.iter().flat_map(|s| &s.rows).filter_map(|r| r.flux).collect()
}
