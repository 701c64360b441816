//! Trial and summary CSV files.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::learner::{normalization, Shots, TrialRecord};
use crate::stats::MeanAccumulator;

pub const TRIAL_HEADER: [&str; 14] = [
    "n",
    "d",
    "r",
    "m",
    "N",
    "ortho",
    "trial_u",
    "trial_d",
    "k_star",
    "k_hat",
    "error_indicator",
    "risk",
    "normalized_error",
    "seed_hash",
];

pub const AGGREGATE_HEADER: [&str; 11] = [
    "n",
    "d",
    "r",
    "m",
    "N",
    "ortho",
    "trials",
    "mean_risk",
    "stderr_risk",
    "mean_normalized_error",
    "stderr_normalized_error",
];

/// 17 significant digits.
fn real(x: f64) -> String {
    format!("{x:.16e}")
}

/// One parsed row of a trial CSV.
#[derive(Clone, Debug, PartialEq, Deserialize)]
pub struct TrialRow {
    pub n: u32,
    pub d: usize,
    pub r: usize,
    #[serde(deserialize_with = "shots_from_text")]
    pub m: Shots,
    #[serde(rename = "N")]
    pub train_size: usize,
    pub ortho: bool,
    pub trial_u: u32,
    pub trial_d: u32,
    pub k_star: usize,
    pub k_hat: usize,
    pub error_indicator: u8,
    pub risk: f64,
    pub normalized_error: f64,
    pub seed_hash: u64,
}

fn shots_from_text<'de, D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Shots, D::Error> {
    let s = String::deserialize(de)?;
    s.parse().map_err(serde::de::Error::custom)
}

impl From<&TrialRecord> for TrialRow {
    fn from(rec: &TrialRecord) -> Self {
        let c = &rec.config;
        TrialRow {
            n: c.n_qubits,
            d: c.dim(),
            r: c.rank,
            m: c.shots,
            train_size: c.train_size,
            ortho: c.ortho,
            trial_u: rec.trial_u,
            trial_d: rec.trial_d,
            k_star: rec.k_star,
            k_hat: rec.k_hat,
            error_indicator: rec.error_indicator,
            risk: rec.risk,
            normalized_error: rec.normalized_error,
            seed_hash: rec.seed_hash,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line()).unwrap_or(0);
    let message = e.to_string();
    match e.into_kind() {
        csv::ErrorKind::Io(source) => Error::Io {
            path: path.to_path_buf(),
            source,
        },
        _ => Error::MalformedCsv {
            path: path.to_path_buf(),
            line,
            message,
        },
    }
}

pub fn write_trials<W: Write>(out: W, records: &[TrialRecord]) -> std::result::Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRIAL_HEADER)?;
    for rec in records {
        let row = TrialRow::from(rec);
        w.write_record([
            row.n.to_string(),
            row.d.to_string(),
            row.r.to_string(),
            row.m.to_string(),
            row.train_size.to_string(),
            row.ortho.to_string(),
            row.trial_u.to_string(),
            row.trial_d.to_string(),
            row.k_star.to_string(),
            row.k_hat.to_string(),
            row.error_indicator.to_string(),
            real(row.risk),
            real(row.normalized_error),
            row.seed_hash.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_trials_file(path: &Path, records: &[TrialRecord]) -> Result<()> {
    let file = std::fs::File::create(path).map_err(io_err(path))?;
    write_trials(std::io::BufWriter::new(file), records).map_err(|e| csv_err(path, e))
}

/// Parses a trial CSV; `origin` names the source in error messages.
pub fn read_trials<R: Read>(input: R, origin: &Path) -> Result<Vec<TrialRow>> {
    let mut rdr = csv::Reader::from_reader(input);
    let header = rdr.headers().map_err(|e| csv_err(origin, e))?.clone();
    if header.iter().ne(TRIAL_HEADER) {
        return Err(Error::MalformedCsv {
            path: origin.to_path_buf(),
            line: 1,
            message: format!("unexpected header `{}`", header.iter().collect::<Vec<_>>().join(",")),
        });
    }
    rdr.deserialize().map(|row| row.map_err(|e| csv_err(origin, e))).collect()
}

pub fn read_trials_file(path: &Path) -> Result<Vec<TrialRow>> {
    let file = std::fs::File::open(path).map_err(io_err(path))?;
    read_trials(std::io::BufReader::new(file), path)
}

/// Per-grid-point summary.
#[derive(Clone, Debug, PartialEq)]
pub struct AggregateRow {
    pub n: u32,
    pub d: usize,
    pub r: usize,
    pub m: Shots,
    pub train_size: usize,
    pub ortho: bool,
    pub trials: u64,
    pub mean_risk: f64,
    pub stderr_risk: f64,
    pub mean_normalized_error: f64,
    pub stderr_normalized_error: f64,
}

/// Mean and standard error (sample sd / √count) of the risk per
/// `(n, d, r, m, N, ortho)` key, in key order.
pub fn aggregate(rows: &[TrialRow]) -> Vec<AggregateRow> {
    let mut groups: BTreeMap<(u32, usize, usize, Shots, usize, bool), MeanAccumulator> = BTreeMap::new();
    for row in rows {
        groups
            .entry((row.n, row.d, row.r, row.m, row.train_size, row.ortho))
            .or_default()
            .push(row.risk);
    }
    groups
        .into_iter()
        .map(|((n, d, r, m, train_size, ortho), acc)| {
            let est = acc.estimate();
            let scale = normalization(d);
            AggregateRow {
                n,
                d,
                r,
                m,
                train_size,
                ortho,
                trials: est.samples,
                mean_risk: est.mean,
                stderr_risk: est.stderr,
                mean_normalized_error: est.mean * scale,
                stderr_normalized_error: est.stderr * scale,
            }
        })
        .collect()
}

pub fn write_aggregate<W: Write>(out: W, rows: &[AggregateRow]) -> std::result::Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(AGGREGATE_HEADER)?;
    for a in rows {
        w.write_record([
            a.n.to_string(),
            a.d.to_string(),
            a.r.to_string(),
            a.m.to_string(),
            a.train_size.to_string(),
            a.ortho.to_string(),
            a.trials.to_string(),
            real(a.mean_risk),
            real(a.stderr_risk),
            real(a.mean_normalized_error),
            real(a.stderr_normalized_error),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_aggregate_file(path: &Path, rows: &[AggregateRow]) -> Result<()> {
    let file = std::fs::File::create(path).map_err(io_err(path))?;
    write_aggregate(std::io::BufWriter::new(file), rows).map_err(|e| csv_err(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learner::TrialConfig;
    use std::path::PathBuf;

    fn record(k_hat: usize, m: Shots) -> TrialRecord {
        let d = 16.0;
        let err = u8::from(k_hat != 3);
        let risk = 2.0 / (d * (d + 1.0)) * err as f64;
        TrialRecord {
            config: TrialConfig::new(4, 2, m, 8, false),
            trial_u: 1,
            trial_d: 2,
            k_star: 3,
            k_hat,
            error_indicator: err,
            risk,
            normalized_error: risk * d * d / 2.0,
            seed_hash: 12345,
        }
    }

    #[test]
    fn header_and_infinite_shots() {
        let mut buf = Vec::new();
        write_trials(&mut buf, &[record(4, Shots::Infinite)]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "n,d,r,m,N,ortho,trial_u,trial_d,k_star,k_hat,error_indicator,risk,normalized_error,seed_hash"
        );
        let row = lines.next().unwrap();
        assert!(row.starts_with("4,16,2,inf,8,false,1,2,3,4,1,7.3529411764705881e-3,"), "{row}");
    }

    #[test]
    fn round_trip_is_lossless() {
        let recs = vec![record(3, Shots::Finite(10)), record(4, Shots::Infinite)];
        let mut buf = Vec::new();
        write_trials(&mut buf, &recs).unwrap();
        let rows = read_trials(buf.as_slice(), &PathBuf::from("mem")).unwrap();
        let want: Vec<TrialRow> = recs.iter().map(TrialRow::from).collect();
        assert_eq!(rows, want);
    }

    #[test]
    fn malformed_row_reports_line() {
        let text = format!("{}\n4,16,2,10,8,false,0,0,1,1,0,0,0,7\n4,16,2,ten,8,false,0,0,1,1,0,0,0,7\n", TRIAL_HEADER.join(","));
        match read_trials(text.as_bytes(), &PathBuf::from("bad.csv")) {
            Err(Error::MalformedCsv { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            read_trials("a,b\n1,2\n".as_bytes(), &PathBuf::from("x")),
            Err(Error::MalformedCsv { line: 1, .. })
        ));
    }

    #[test]
    fn identical_records_have_zero_stderr() {
        let rows: Vec<TrialRow> = (0..5).map(|_| TrialRow::from(&record(4, Shots::Finite(10)))).collect();
        let agg = aggregate(&rows);
        assert_eq!(agg.len(), 1);
        assert_eq!(agg[0].trials, 5);
        assert_eq!(agg[0].mean_risk, rows[0].risk);
        assert_eq!(agg[0].stderr_risk, 0.0);
        assert!((agg[0].mean_normalized_error - agg[0].mean_risk * 128.0).abs() < 1e-12);
    }

    #[test]
    fn aggregate_groups_by_key() {
        let rows: Vec<TrialRow> = [record(3, Shots::Infinite), record(4, Shots::Finite(10)), record(3, Shots::Finite(10))]
            .iter()
            .map(TrialRow::from)
            .collect();
        let agg = aggregate(&rows);
        assert_eq!(agg.len(), 2);
        assert_eq!(agg[0].m, Shots::Finite(10));
        assert_eq!(agg[0].trials, 2);
        assert!((agg[0].mean_normalized_error - 0.5 * 128.0 / 136.0).abs() < 1e-12);
        assert_eq!(agg[1].m, Shots::Infinite);
        assert_eq!(agg[1].mean_risk, 0.0);
    }
}
