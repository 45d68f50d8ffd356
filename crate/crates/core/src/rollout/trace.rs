//! CSV trace format.
//!
//! Header `t,v_1..v_n,p_1..p_m,action,reward,terminated,truncated`, one row
//! per transition holding the pre-action state. Floats are written with 17
//! significant digits so every value parses back to the same double. PU
//! availability and the emptied volume are recomputed from the row on import.

use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::Path;

use thiserror::Error;

use super::{StepRecord, Trajectory};
use crate::env::Action;

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("trace I/O failed: {0}")]
    Io(#[from] io::Error),
    #[error("trace CSV error: {0}")]
    Csv(#[from] csv::Error),
    #[error("malformed trace: {0}")]
    Malformed(String),
}

/// Metadata not stored in the CSV body.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TraceMeta {
    pub seed: u64,
    pub config_fingerprint: String,
}

/// `{:.16e}`: 17 significant digits, lossless for doubles.
pub fn format_number(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn trace_header(containers: usize, pus: usize) -> Vec<String> {
    let mut header = vec!["t".to_string()];
    header.extend((1..=containers).map(|i| format!("v_{i}")));
    header.extend((1..=pus).map(|j| format!("p_{j}")));
    header.extend(["action", "reward", "terminated", "truncated"].map(String::from));
    header
}

pub fn write_trace<W: Write>(traj: &Trajectory, out: W) -> Result<(), TraceError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    let (n, m) = traj
        .records
        .first()
        .map_or((0, 0), |r| (r.volumes.len(), r.timers.len()));
    w.write_record(trace_header(n, m))?;
    let mut row = Vec::with_capacity(n + m + 5);
    for rec in &traj.records {
        row.clear();
        row.push(rec.t.to_string());
        row.extend(
            rec.volumes
                .iter()
                .chain(&rec.timers)
                .map(|&x| format_number(x)),
        );
        row.push(rec.action.code().to_string());
        row.push(format_number(rec.reward));
        row.push(rec.terminated.to_string());
        row.push(rec.truncated.to_string());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn export_trace(traj: &Trajectory, path: impl AsRef<Path>) -> Result<(), TraceError> {
    let file = BufWriter::new(File::create(path)?);
    write_trace(traj, file)
}

pub fn read_trace<R: Read>(input: R, meta: TraceMeta) -> Result<Trajectory, TraceError> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(input);
    let header = r.headers()?.clone();
    let cols: Vec<&str> = header.iter().collect();
    let n = cols.iter().filter(|c| c.starts_with("v_")).count();
    let m = cols.iter().filter(|c| c.starts_with("p_")).count();
    if n == 0 || cols != trace_header(n, m) {
        return Err(TraceError::Malformed(format!(
            "unexpected header `{}`",
            cols.join(",")
        )));
    }

    let mut records = Vec::new();
    for (line, row) in r.records().enumerate() {
        let row = row?;
        let bad = |what: &str| TraceError::Malformed(format!("row {}: bad {what}", line + 1));
        let float = |idx: usize| row[idx].parse::<f64>().map_err(|_| bad(cols[idx]));
        let flag = |idx: usize| row[idx].parse::<bool>().map_err(|_| bad(cols[idx]));

        let t = row[0].parse().map_err(|_| bad("t"))?;
        let volumes = (1..=n).map(float).collect::<Result<Vec<_>, _>>()?;
        let timers = (n + 1..=n + m).map(float).collect::<Result<Vec<_>, _>>()?;
        let code: i64 = row[n + m + 1].parse().map_err(|_| bad("action"))?;
        let action = Action::from_code(code, n).map_err(|_| bad("action"))?;
        let pu_available = timers.contains(&0.0);
        let emptied_volume = match action {
            Action::Empty(i) if pu_available => Some(volumes[i]),
            _ => None,
        };
        records.push(StepRecord {
            t,
            volumes,
            timers,
            action,
            reward: float(n + m + 2)?,
            terminated: flag(n + m + 3)?,
            truncated: flag(n + m + 4)?,
            pu_available,
            emptied_volume,
        });
    }
    Ok(Trajectory {
        seed: meta.seed,
        config_fingerprint: meta.config_fingerprint,
        records,
    })
}

pub fn import_trace(path: impl AsRef<Path>, meta: TraceMeta) -> Result<Trajectory, TraceError> {
    read_trace(File::open(path)?, meta)
}
