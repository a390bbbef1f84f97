//! Per-month summary statistics pooled over stations and years.

use serde::Serialize;

use crate::data::MonthlySeries;

pub const MONTHS: [&str; 12] = ["Jan", "Feb", "Mar", "Apr", "May", "Jun", "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"];

/// Sample quantile with linear interpolation between order statistics at
/// positions `(k - 1) / (n - 1)`. `sorted` must be ascending and nonempty.
pub fn quantile_type7(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Five-number summary plus mean; all `None` when the month has no values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub month: &'static str,
    pub min: Option<f64>,
    pub q1: Option<f64>,
    pub median: Option<f64>,
    pub mean: Option<f64>,
    pub q3: Option<f64>,
    pub max: Option<f64>,
    pub na_count: usize,
}

impl SummaryRow {
    pub fn from_values(month: &'static str, mut values: Vec<f64>, na_count: usize) -> Self {
        if values.is_empty() {
            return Self { month, min: None, q1: None, median: None, mean: None, q3: None, max: None, na_count };
        }
        values.sort_by(f64::total_cmp);
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        Self {
            month,
            min: Some(values[0]),
            q1: Some(quantile_type7(&values, 0.25)),
            median: Some(quantile_type7(&values, 0.5)),
            mean: Some(mean),
            q3: Some(quantile_type7(&values, 0.75)),
            max: Some(values[values.len() - 1]),
            na_count,
        }
    }
}

/// Twelve rows, January first.
pub fn summarize(series: &[MonthlySeries]) -> Vec<SummaryRow> {
    MONTHS
        .iter()
        .enumerate()
        .map(|(i, &label)| {
            let month = i as u8 + 1;
            let rows = series.iter().flat_map(|s| &s.rows).filter(|r| r.month == month);
            let (mut values, mut na) = (Vec::new(), 0);
            for r in rows {
                match r.flux {
                    Some(v) => values.push(v),
                    None => na += 1,
                }
            }
            SummaryRow::from_values(label, values, na)
        })
        .collect()
}
