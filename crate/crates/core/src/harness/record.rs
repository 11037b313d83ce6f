//! One CSV row per (instance, mode) run.

use std::io;
use std::path::Path;

use crate::stats::Stats;

#[derive(Clone, Debug, PartialEq)]
pub struct RunRecord {
    pub instance: String,
    pub mode: String,
    pub workers: usize,
    /// `SAT`, `UNSAT` or `UNKNOWN`.
    pub status: String,
    /// Left empty in deterministic runs so their output is reproducible.
    pub wall_seconds: Option<f64>,
    /// Sum over all workers.
    pub stats: Stats,
}

#[derive(Debug, thiserror::Error)]
pub enum CsvError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("row {row}: bad value {value:?} in column {column}")]
    Value { row: usize, column: &'static str, value: String },
    #[error("unexpected header")]
    Header,
}

const STAT_COLUMNS: [&str; 15] = [
    "propagations_total",
    "propagations_vivify",
    "vivify_attempts",
    "vivify_successes",
    "literals_removed",
    "clauses_learned",
    "clauses_exported",
    "clauses_imported",
    "improvements_published",
    "improvements_adopted",
    "restarts",
    "reductions",
    "conflicts",
    "decisions",
    "buffer_overflows",
];

fn stat_values(s: &Stats) -> [u64; 15] {
    [
        s.propagations_total,
        s.propagations_vivify,
        s.vivify_attempts,
        s.vivify_successes,
        s.literals_removed,
        s.clauses_learned,
        s.clauses_exported,
        s.clauses_imported,
        s.improvements_published,
        s.improvements_adopted,
        s.restarts,
        s.reductions,
        s.conflicts,
        s.decisions,
        s.buffer_overflows,
    ]
}

fn stats_from(v: [u64; 15]) -> Stats {
    Stats {
        propagations_total: v[0],
        propagations_vivify: v[1],
        vivify_attempts: v[2],
        vivify_successes: v[3],
        literals_removed: v[4],
        clauses_learned: v[5],
        clauses_exported: v[6],
        clauses_imported: v[7],
        improvements_published: v[8],
        improvements_adopted: v[9],
        restarts: v[10],
        reductions: v[11],
        conflicts: v[12],
        decisions: v[13],
        buffer_overflows: v[14],
    }
}

/// Column names in output order.
pub fn csv_header() -> Vec<&'static str> {
    let mut h = vec!["instance", "mode", "workers", "status", "wall_seconds"];
    h.extend(STAT_COLUMNS);
    h.extend(["vivify_prop_pct", "success_rate"]);
    h
}

pub fn write_csv<W: io::Write>(records: &[RunRecord], out: W) -> Result<(), CsvError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(csv_header())?;
    for r in records {
        let mut row = vec![
            r.instance.clone(),
            r.mode.clone(),
            r.workers.to_string(),
            r.status.clone(),
            r.wall_seconds.map(|s| s.to_string()).unwrap_or_default(),
        ];
        row.extend(stat_values(&r.stats).iter().map(u64::to_string));
        row.push(format!("{:.2}", r.stats.vivify_prop_pct()));
        row.push(format!("{:.2}", r.stats.success_rate()));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes a header and one row per record to `path`.
pub fn emit_csv(records: &[RunRecord], path: &Path) -> Result<(), CsvError> {
    write_csv(records, std::fs::File::create(path)?)
}

pub fn emit_csv_string(records: &[RunRecord]) -> String {
    let mut buf = Vec::new();
    write_csv(records, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("CSV output is UTF-8")
}

/// Parses CSV produced by [`write_csv`]. Derived percentage columns are ignored.
pub fn read_csv<R: io::Read>(input: R) -> Result<Vec<RunRecord>, CsvError> {
    let mut reader = csv::Reader::from_reader(input);
    if reader.headers()?.iter().ne(csv_header()) {
        return Err(CsvError::Header);
    }
    let mut out = Vec::new();
    for (row, rec) in reader.records().enumerate() {
        let rec = rec?;
        let field = |i: usize| rec.get(i).unwrap_or("");
        let bad = |column: &'static str, value: &str| CsvError::Value {
            row: row + 1,
            column,
            value: value.to_string(),
        };
        let workers = field(2).parse().map_err(|_| bad("workers", field(2)))?;
        let wall_seconds = match field(4) {
            "" => None,
            s => Some(s.parse().map_err(|_| bad("wall_seconds", s))?),
        };
        let mut values = [0u64; 15];
        for (k, name) in STAT_COLUMNS.iter().enumerate() {
            let s = field(5 + k);
            values[k] = s.parse().map_err(|_| bad(name, s))?;
        }
        out.push(RunRecord {
            instance: field(0).to_string(),
            mode: field(1).to_string(),
            workers,
            status: field(3).to_string(),
            wall_seconds,
            stats: stats_from(values),
        });
    }
    Ok(out)
}

pub fn read_csv_file(path: &Path) -> Result<Vec<RunRecord>, CsvError> {
    read_csv(std::fs::File::open(path)?)
}
