//! Long-format CSV files for traces and aggregates.
//!
//! Floats are written as the shortest decimal that parses back to the same
//! value, so `read(write(x)) == x` exactly.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::run::AggregateResult;
use crate::bandit::RegretTrace;
use crate::error::{Error, Result};

pub const TRACE_HEADER: [&str; 5] = ["agent", "scheme", "rep", "t", "cum_regret"];
pub const AGGREGATE_HEADER: [&str; 5] = ["agent", "scheme", "t", "mean", "stderr"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub agent: String,
    pub scheme: String,
    pub rep: u64,
    pub t: u64,
    pub cum_regret: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub agent: String,
    pub scheme: String,
    pub t: u64,
    pub mean: f64,
    pub stderr: f64,
}

/// Which of the two layouts a CSV file holds, judged by its header.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CsvKind {
    Traces,
    Aggregates,
}

/// One labelled replication, as stored in a trace file.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelledTrace {
    pub agent: String,
    pub scheme: String,
    pub rep: u64,
    pub cum_regret: Vec<f64>,
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> Error + '_ {
    move |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    }
}

fn write_rows<T: Serialize>(path: &Path, header: &[&str; 5], rows: impl Iterator<Item = T>) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .has_headers(false)
        .from_path(path)
        .map_err(csv_err(path))?;
    // Written by hand so an empty file still carries its header.
    w.write_record(header).map_err(csv_err(path))?;
    for row in rows {
        w.serialize(row).map_err(csv_err(path))?;
    }
    w.flush().map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn read_rows<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err(path))?;
    r.deserialize().collect::<std::result::Result<_, _>>().map_err(csv_err(path))
}

/// Writes `traces`, whose replication indices are `0..traces.len()`.
pub fn write_traces(path: &Path, agent: &str, scheme: &str, traces: &[RegretTrace]) -> Result<()> {
    let labelled: Vec<LabelledTrace> = traces
        .iter()
        .enumerate()
        .map(|(rep, tr)| LabelledTrace {
            agent: agent.to_string(),
            scheme: scheme.to_string(),
            rep: rep as u64,
            cum_regret: tr.cum_regret.clone(),
        })
        .collect();
    write_labelled_traces(path, &labelled)
}

pub fn write_labelled_traces(path: &Path, traces: &[LabelledTrace]) -> Result<()> {
    let rows = traces.iter().flat_map(|tr| {
        tr.cum_regret.iter().enumerate().map(move |(i, &v)| TraceRow {
            agent: tr.agent.clone(),
            scheme: tr.scheme.clone(),
            rep: tr.rep,
            t: i as u64 + 1,
            cum_regret: v,
        })
    });
    write_rows(path, &TRACE_HEADER, rows)
}

pub fn read_trace_rows(path: &Path) -> Result<Vec<TraceRow>> {
    read_rows(path)
}

/// Regroups rows into traces, keeping first-appearance order.
pub fn read_traces(path: &Path) -> Result<Vec<LabelledTrace>> {
    let mut out: Vec<LabelledTrace> = Vec::new();
    for row in read_trace_rows(path)? {
        let found = out
            .iter_mut()
            .rev()
            .find(|tr| tr.agent == row.agent && tr.scheme == row.scheme && tr.rep == row.rep);
        match found {
            Some(tr) => tr.cum_regret.push(row.cum_regret),
            None => out.push(LabelledTrace {
                agent: row.agent,
                scheme: row.scheme,
                rep: row.rep,
                cum_regret: vec![row.cum_regret],
            }),
        }
    }
    Ok(out)
}

pub fn write_aggregates(path: &Path, results: &[AggregateResult]) -> Result<()> {
    let rows = results.iter().flat_map(|res| {
        res.mean
            .iter()
            .zip(&res.stderr)
            .enumerate()
            .map(move |(i, (&mean, &stderr))| AggregateRow {
                agent: res.agent.clone(),
                scheme: res.scheme.clone(),
                t: i as u64 + 1,
                mean,
                stderr,
            })
    });
    write_rows(path, &AGGREGATE_HEADER, rows)
}

pub fn read_aggregate_rows(path: &Path) -> Result<Vec<AggregateRow>> {
    read_rows(path)
}

pub fn read_aggregates(path: &Path) -> Result<Vec<AggregateResult>> {
    let mut out: Vec<AggregateResult> = Vec::new();
    for row in read_aggregate_rows(path)? {
        let found = out
            .iter_mut()
            .find(|r| r.agent == row.agent && r.scheme == row.scheme);
        match found {
            Some(r) => {
                r.mean.push(row.mean);
                r.stderr.push(row.stderr);
            }
            None => out.push(AggregateResult {
                agent: row.agent,
                scheme: row.scheme,
                mean: vec![row.mean],
                stderr: vec![row.stderr],
            }),
        }
    }
    Ok(out)
}

pub fn detect_kind(path: &Path) -> Result<CsvKind> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err(path))?;
    let header = r.headers().map_err(csv_err(path))?;
    let fields: Vec<&str> = header.iter().collect();
    if fields == TRACE_HEADER {
        Ok(CsvKind::Traces)
    } else if fields == AGGREGATE_HEADER {
        Ok(CsvKind::Aggregates)
    } else {
        Err(Error::Config {
            line: 1,
            msg: format!("{}: unrecognized CSV header `{}`", path.display(), fields.join(",")),
        })
    }
}

/// Aggregates from either layout; trace files are averaged per (agent, scheme).
pub fn load_for_plot(path: &Path) -> Result<Vec<AggregateResult>> {
    match detect_kind(path)? {
        CsvKind::Aggregates => read_aggregates(path),
        CsvKind::Traces => {
            let traces = read_traces(path)?;
            let mut groups: Vec<(String, String, Vec<RegretTrace>)> = Vec::new();
            for tr in traces {
                let trace = RegretTrace {
                    horizon: tr.cum_regret.len(),
                    cum_regret: tr.cum_regret,
                    pulls: vec![],
                    actions: vec![],
                    seed: 0,
                };
                match groups.iter_mut().find(|g| g.0 == tr.agent && g.1 == tr.scheme) {
                    Some(g) => g.2.push(trace),
                    None => groups.push((tr.agent, tr.scheme, vec![trace])),
                }
            }
            groups
                .iter()
                .map(|(a, s, ts)| super::run::aggregate(a, s, ts))
                .collect()
        }
    }
}
