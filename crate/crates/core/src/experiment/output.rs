use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats;

/// One trial of one arm at one sweep point. Empty cells mean "not
/// applicable" (or, for `completion`, "did not finish within the horizon").
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawRow {
    pub point: String,
    pub arm: String,
    pub trial: u64,
    pub seed: u64,
    pub completion: Option<f64>,
    pub events: u64,
    pub bound_t: Option<u64>,
    pub bound_t_abs: Option<u64>,
    pub within_t: Option<bool>,
    pub within_t_abs: Option<bool>,
    /// Arm-specific measurement (documented per experiment).
    pub aux: Option<f64>,
}

impl RawRow {
    pub fn new(point: &str, arm: &str, trial: u64, seed: u64) -> Self {
        RawRow {
            point: point.into(),
            arm: arm.into(),
            trial,
            seed,
            completion: None,
            events: 0,
            bound_t: None,
            bound_t_abs: None,
            within_t: None,
            within_t_abs: None,
            aux: None,
        }
    }

    /// Completion time with unfinished runs as `+∞`.
    pub fn completion_or_inf(&self) -> f64 {
        self.completion.unwrap_or(f64::INFINITY)
    }
}

/// Per `(point, arm)` statistics, recomputable from the raw rows alone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub point: String,
    pub arm: String,
    pub trials: u64,
    pub completed: u64,
    /// Quantiles count unfinished runs as `+∞`; the mean is over finished runs.
    pub mean: Option<f64>,
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
    pub q90: f64,
    pub max: f64,
    pub frac_within_t: Option<f64>,
    pub frac_within_t_abs: Option<f64>,
    pub aux_mean: Option<f64>,
    pub aux_se: Option<f64>,
}

fn fraction(rows: &[&RawRow], f: impl Fn(&RawRow) -> Option<bool>) -> Option<f64> {
    let vals: Vec<bool> = rows.iter().filter_map(|r| f(r)).collect();
    (!vals.is_empty()).then(|| vals.iter().filter(|&&b| b).count() as f64 / vals.len() as f64)
}

/// Groups rows by `(point, arm)` in first-appearance order.
pub fn group(raw: &[RawRow]) -> Vec<((String, String), Vec<&RawRow>)> {
    let mut order: Vec<(String, String)> = Vec::new();
    let mut groups: BTreeMap<(String, String), Vec<&RawRow>> = BTreeMap::new();
    for r in raw {
        let key = (r.point.clone(), r.arm.clone());
        groups
            .entry(key.clone())
            .or_insert_with(|| {
                order.push(key);
                Vec::new()
            })
            .push(r);
    }
    order.into_iter().map(|k| { let v = groups.remove(&k).expect("grouped"); (k, v) }).collect()
}

pub fn summarize(raw: &[RawRow]) -> Vec<SummaryRow> {
    group(raw)
        .into_iter()
        .map(|((point, arm), rows)| {
            let mut times: Vec<f64> = rows.iter().map(|r| r.completion_or_inf()).collect();
            times.sort_by(f64::total_cmp);
            let finished: Vec<f64> = rows.iter().filter_map(|r| r.completion).collect();
            let aux: Vec<f64> = rows.iter().filter_map(|r| r.aux).collect();
            SummaryRow {
                point,
                arm,
                trials: rows.len() as u64,
                completed: finished.len() as u64,
                mean: (!finished.is_empty()).then(|| stats::mean(&finished)),
                q25: stats::quantile_sorted(&times, 0.25),
                median: stats::quantile_sorted(&times, 0.5),
                q75: stats::quantile_sorted(&times, 0.75),
                q90: stats::quantile_sorted(&times, 0.9),
                max: *times.last().expect("groups are non-empty"),
                frac_within_t: fraction(&rows, |r| r.within_t),
                frac_within_t_abs: fraction(&rows, |r| r.within_t_abs),
                aux_mean: (!aux.is_empty()).then(|| stats::mean(&aux)),
                aux_se: (aux.len() > 1).then(|| stats::std_error(&aux)),
            }
        })
        .collect()
}

/// A pass/fail call with the tolerance it was made at.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub criterion: String,
    pub passed: bool,
    pub observed: f64,
    pub threshold: f64,
    pub slack: f64,
    pub detail: String,
}

pub const RAW_CSV: &str = "raw.csv";
pub const SUMMARY_CSV: &str = "summary.csv";
pub const VERDICTS_JSON: &str = "verdicts.json";

fn to_csv<T: Serialize>(rows: &[T]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    w.into_inner().map_err(|e| Error::Config(format!("csv buffer: {e}")))
}

pub fn raw_csv_bytes(raw: &[RawRow]) -> Result<Vec<u8>> {
    to_csv(raw)
}

pub fn summary_csv_bytes(summary: &[SummaryRow]) -> Result<Vec<u8>> {
    to_csv(summary)
}

pub fn write_all(dir: &Path, raw: &[RawRow], summary: &[SummaryRow], verdicts: &[Verdict]) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let put = |name: &str, bytes: Vec<u8>| {
        let p = dir.join(name);
        fs::write(&p, bytes).map_err(|e| Error::io(p, e))
    };
    put(RAW_CSV, raw_csv_bytes(raw)?)?;
    put(SUMMARY_CSV, summary_csv_bytes(summary)?)?;
    let mut json = serde_json::to_vec_pretty(verdicts)?;
    json.push(b'\n');
    put(VERDICTS_JSON, json)
}

pub fn read_raw(path: &Path) -> Result<Vec<RawRow>> {
    let mut r = csv::Reader::from_path(path)?;
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}

/// Loads `raw.csv`, recomputes the summary and checks it against
/// `summary.csv` byte for byte.
pub fn load_and_verify(dir: &Path) -> Result<(Vec<RawRow>, Vec<SummaryRow>)> {
    let raw = read_raw(&dir.join(RAW_CSV))?;
    let summary = summarize(&raw);
    let expected = summary_csv_bytes(&summary)?;
    let sp = dir.join(SUMMARY_CSV);
    let on_disk = fs::read(&sp).map_err(|e| Error::io(&sp, e))?;
    if on_disk != expected {
        return Err(Error::Config(format!("{} does not match the statistics of {}", sp.display(), RAW_CSV)));
    }
    Ok((raw, summary))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(point: &str, trial: u64, completion: Option<f64>) -> RawRow {
        let mut r = RawRow::new(point, "async", trial, 100 + trial);
        r.completion = completion;
        r.within_t = Some(completion.is_some());
        r
    }

    #[test]
    fn summary_counts_unfinished_as_infinite() {
        let raw = vec![row("a", 0, Some(1.0)), row("a", 1, Some(3.0)), row("a", 2, None), row("b", 0, Some(2.0))];
        let s = summarize(&raw);
        assert_eq!(s.len(), 2);
        assert_eq!((s[0].trials, s[0].completed), (3, 2));
        assert_eq!(s[0].median, 3.0);
        assert_eq!(s[0].max, f64::INFINITY);
        assert_eq!(s[0].mean, Some(2.0));
        assert!((s[0].frac_within_t.unwrap() - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(s[1].point, "b");
    }

    #[test]
    fn round_trip_and_tamper_detection() {
        let dir = tempfile::tempdir().unwrap();
        let raw = vec![row("a", 0, Some(1.5)), row("a", 1, None)];
        write_all(dir.path(), &raw, &summarize(&raw), &[]).unwrap();
        let (back, _) = load_and_verify(dir.path()).unwrap();
        assert_eq!(back, raw);
        let p = dir.path().join(SUMMARY_CSV);
        let text = fs::read_to_string(&p).unwrap().replace("1.5", "1.25");
        fs::write(&p, text).unwrap();
        assert!(load_and_verify(dir.path()).is_err());
    }
}
