//! CSV/JSON outputs. Every CSV starts with `#` lines carrying the tool version
//! and the SHA-256 of the run configuration.

use num_complex::Complex64 as C64;
use serde::de::DeserializeOwned;
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::spectral::EigenvalueSet;
use crate::trace::{Extraction, TraceTable};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Round-trip decimal for a double: 17 significant digits.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn config_hash(config: &impl Serialize) -> Result<String> {
    let bytes = serde_json::to_vec(config)?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

/// Comment lines written ahead of the CSV header.
#[derive(Clone, Debug)]
pub struct Header {
    pub lines: Vec<String>,
}

impl Header {
    pub fn new(config: &impl Serialize) -> Result<Self> {
        Ok(Header {
            lines: vec![
                format!("well-invariants {VERSION}"),
                format!("config-sha256 {}", config_hash(config)?),
            ],
        })
    }
}

pub fn write_csv(path: &Path, header: &Header, columns: &[&str], rows: &[Vec<String>]) -> Result<()> {
    write_csv_to(File::create(path)?, header, columns, rows)
}

pub fn write_csv_to(mut f: impl Write, header: &Header, columns: &[&str], rows: &[Vec<String>]) -> Result<()> {
    for l in &header.lines {
        writeln!(f, "# {l}")?;
    }
    let mut w = csv::Writer::from_writer(f);
    w.write_record(columns)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Rows of a CSV written by [`write_csv`], header comments skipped.
pub fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)?;
    let cols = r.headers()?.iter().map(String::from).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        rows.push(rec?.iter().map(String::from).collect());
    }
    Ok((cols, rows))
}

/// `#` lines at the top of a file.
pub fn read_header(path: &Path) -> Result<Vec<String>> {
    let f = BufReader::new(File::open(path)?);
    let mut out = Vec::new();
    for line in f.lines() {
        let line = line?;
        match line.strip_prefix("# ") {
            Some(rest) => out.push(rest.to_string()),
            None => break,
        }
    }
    Ok(out)
}

pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    std::fs::write(path, s)?;
    Ok(())
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}

/// Gnuplot script plotting columns `y_cols` (1-based) against `x_col`.
pub fn write_gnuplot(csv: &Path, x_col: usize, y_cols: &[(usize, &str)], xlabel: &str) -> Result<PathBuf> {
    let gp = csv.with_extension("gp");
    let name = csv
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let mut s = String::new();
    s.push_str("set datafile separator ','\nset datafile commentschars '#'\nset key autotitle columnhead\n");
    s.push_str(&format!("set xlabel '{xlabel}'\n"));
    let plots: Vec<String> = y_cols
        .iter()
        .map(|(c, t)| format!("'{name}' using {x_col}:{c} with linespoints title '{t}'"))
        .collect();
    s.push_str(&format!("plot {}\n", plots.join(", \\\n     ")));
    std::fs::write(&gp, s)?;
    Ok(gp)
}

pub fn eigenvalue_rows(sets: &[EigenvalueSet]) -> Vec<Vec<String>> {
    sets.iter()
        .flat_map(|s| {
            s.eigenvalues.iter().enumerate().map(move |(i, e)| {
                vec![
                    fmt17(s.hbar),
                    i.to_string(),
                    fmt17(*e),
                    s.solver.to_string(),
                    fmt17(s.estimated_accuracy),
                ]
            })
        })
        .collect()
}

pub const EIGENVALUE_COLUMNS: [&str; 5] = ["hbar", "index", "eigenvalue", "solver", "estimated_accuracy"];
pub const TRACE_COLUMNS: [&str; 4] = ["hbar", "t", "re", "im"];
pub const EXTRACT_COLUMNS: [&str; 6] = ["t", "j", "re", "im", "residual", "condition"];

/// Table as long-format CSV plus a JSON sidecar holding the provenance.
pub fn save_trace_table(table: &TraceTable, csv: &Path, header: &Header) -> Result<()> {
    let mut rows = Vec::new();
    for (i, h) in table.hbar_grid.iter().enumerate() {
        for (k, t) in table.t_grid.iter().enumerate() {
            let v = table.values[i][k];
            rows.push(vec![fmt17(*h), fmt17(*t), fmt17(v.re), fmt17(v.im)]);
        }
    }
    write_csv(csv, header, &TRACE_COLUMNS, &rows)?;
    write_json(&sidecar_path(csv), &table.provenance)
}

fn parse(s: &str) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|e| Error::InvalidArgument(format!("bad number {s:?}: {e}")))
}

pub fn load_trace_table(csv: &Path) -> Result<TraceTable> {
    let provenance = read_json(&sidecar_path(csv))?;
    let (cols, rows) = read_csv(csv)?;
    if cols != TRACE_COLUMNS {
        return Err(Error::InvalidArgument(format!("unexpected columns {cols:?}")));
    }
    let mut hbar_grid: Vec<f64> = Vec::new();
    let mut t_grid: Vec<f64> = Vec::new();
    let mut values: Vec<Vec<C64>> = Vec::new();
    for r in &rows {
        let (h, t) = (parse(&r[0])?, parse(&r[1])?);
        let v = C64::new(parse(&r[2])?, parse(&r[3])?);
        if hbar_grid.last() != Some(&h) {
            hbar_grid.push(h);
            values.push(Vec::new());
        }
        if hbar_grid.len() == 1 {
            t_grid.push(t);
        }
        values.last_mut().expect("pushed").push(v);
    }
    if values.iter().any(|row| row.len() != t_grid.len()) {
        return Err(Error::InvalidArgument("trace table is not rectangular".into()));
    }
    Ok(TraceTable {
        t_grid,
        hbar_grid,
        values,
        provenance,
    })
}

pub fn extraction_rows(ex: &Extraction) -> Vec<Vec<String>> {
    ex.rows
        .iter()
        .flat_map(|r| {
            r.coeffs.iter().enumerate().map(move |(j, c)| {
                vec![
                    fmt17(r.t),
                    j.to_string(),
                    fmt17(c.re),
                    fmt17(c.im),
                    fmt17(r.residual),
                    fmt17(r.condition),
                ]
            })
        })
        .collect()
}
