//! Result rows and their CSV / Markdown renderings.
//!
//! `results.csv` holds only quantities that are reproducible bit for bit from
//! the configuration; wall-clock times go to `timings.csv`.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use glct_core::{Method, Result};
use serde::{Deserialize, Serialize};

use crate::config::Strategy;

/// One (dataset, method, k, snapshot, s) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub dataset: String,
    pub method: Method,
    pub strategy: Strategy,
    pub k: usize,
    /// Time index of the snapshot; 0 for synthetic graphs.
    pub snapshot: usize,
    pub s: f64,
    /// `None` marks a failed cell; `error` then says why.
    pub mse: Option<f64>,
    /// MSE of the unfiltered observation.
    pub baseline_mse: Option<f64>,
    pub paper_mse: Option<f64>,
    /// `(a, b, c, d)`; the rotation matrix for fractional orders.
    pub params: Option<[f64; 4]>,
    pub alpha: Option<f64>,
    pub runtime_ms: f64,
    pub dense_matmuls: u64,
    pub diag_matmuls: u64,
    pub error: Option<String>,
}

impl ResultRow {
    pub fn failed(&self) -> bool {
        self.mse.is_none()
    }
}

fn opt(v: Option<f64>) -> String {
    v.map_or(String::new(), |x| x.to_string())
}

pub fn write_results_csv<W: Write>(rows: &[ResultRow], out: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(out);
    wr.write_record([
        "dataset", "method", "strategy", "k", "snapshot", "s", "mse", "baseline_mse", "paper_mse", "a", "b", "c", "d", "alpha",
        "dense_matmuls", "diag_matmuls", "status", "error",
    ])?;
    for r in rows {
        let p = r.params.map_or([None; 4], |p| p.map(Some));
        let strategy = match r.strategy {
            Strategy::Grid => "grid",
            Strategy::Adam => "adam",
        };
        wr.write_record(&[
            r.dataset.clone(),
            r.method.name().to_string(),
            strategy.to_string(),
            r.k.to_string(),
            r.snapshot.to_string(),
            r.s.to_string(),
            opt(r.mse),
            opt(r.baseline_mse),
            opt(r.paper_mse),
            opt(p[0]),
            opt(p[1]),
            opt(p[2]),
            opt(p[3]),
            opt(r.alpha),
            r.dense_matmuls.to_string(),
            r.diag_matmuls.to_string(),
            if r.failed() { "failed" } else { "ok" }.to_string(),
            r.error.clone().unwrap_or_default(),
        ])?;
    }
    wr.flush()?;
    Ok(())
}

pub fn write_timings_csv<W: Write>(rows: &[ResultRow], out: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(out);
    wr.write_record(["dataset", "method", "k", "snapshot", "s", "runtime_ms"])?;
    for r in rows {
        wr.write_record(&[
            r.dataset.clone(),
            r.method.name().to_string(),
            r.k.to_string(),
            r.snapshot.to_string(),
            r.s.to_string(),
            format!("{:.3}", r.runtime_ms),
        ])?;
    }
    wr.flush()?;
    Ok(())
}

fn cell(v: Option<f64>) -> String {
    v.map_or("FAIL".to_string(), |x| format!("{x:.5}"))
}

fn ordered_unique<K: PartialEq + Clone>(items: impl Iterator<Item = K>) -> Vec<K> {
    let mut out: Vec<K> = Vec::new();
    for k in items {
        if !out.contains(&k) {
            out.push(k);
        }
    }
    out
}

/// One table per dataset, rows in method order, with the published value
/// under each measured row where one exists.
///
/// Datasets evaluated on a single graph and snapshot get one column per noise
/// level; otherwise columns are `(k, snapshot)` and cells list the noise levels
/// separated by `/`.
pub fn markdown(rows: &[ResultRow]) -> String {
    let mut md = String::new();
    for ds in ordered_unique(rows.iter().map(|r| r.dataset.clone())) {
        let sub: Vec<&ResultRow> = rows.iter().filter(|r| r.dataset == ds).collect();
        let methods = ordered_unique(sub.iter().map(|r| r.method));
        let cols = ordered_unique(sub.iter().map(|r| (r.k, r.snapshot)));
        let levels = ordered_unique(sub.iter().map(|r| r.s.to_bits()));
        let find = |m: Method, c: (usize, usize), s: u64| sub.iter().find(|r| r.method == m && (r.k, r.snapshot) == c && r.s.to_bits() == s);
        let _ = writeln!(md, "### {ds}\n");
        let single = cols.len() == 1;
        let headers: Vec<String> = if single {
            levels.iter().map(|s| format!("s = {}", f64::from_bits(*s))).collect()
        } else {
            cols.iter().map(|(k, t)| format!("{k}-nn t={t}")).collect()
        };
        let _ = writeln!(md, "| Method | {} |", headers.join(" | "));
        let _ = writeln!(md, "|---|{}", "---|".repeat(headers.len()));
        let render = |m: Method, pick: &dyn Fn(&ResultRow) -> Option<f64>| -> Vec<String> {
            if single {
                levels.iter().map(|&s| find(m, cols[0], s).map_or("-".into(), |r| cell(pick(r)))).collect()
            } else {
                cols.iter()
                    .map(|&c| levels.iter().map(|&s| find(m, c, s).map_or("-".into(), |r| cell(pick(r)))).collect::<Vec<_>>().join("/"))
                    .collect()
            }
        };
        for m in &methods {
            let _ = writeln!(md, "| {} | {} |", m.label(), render(*m, &|r| r.mse).join(" | "));
            if sub.iter().any(|r| r.method == *m && r.paper_mse.is_some()) {
                let _ = writeln!(md, "| (published) | {} |", render(*m, &|r| r.paper_mse).join(" | "));
            }
        }
        if let Some(m) = methods.first() {
            let _ = writeln!(md, "| noisy input | {} |", render(*m, &|r| r.baseline_mse).join(" | "));
        }
        let failed: Vec<_> = sub.iter().filter(|r| r.failed()).collect();
        if !failed.is_empty() {
            let _ = writeln!(md);
            for r in failed {
                let _ = writeln!(md, "- FAIL {} k={} t={} s={}: {}", r.method, r.k, r.snapshot, r.s, r.error.as_deref().unwrap_or("unknown"));
            }
        }
        let _ = writeln!(md);
    }
    md
}

/// Writes `results.csv`, `timings.csv` and `results.md` under `dir`.
pub fn write_all(rows: &[ResultRow], dir: &Path, title: &str) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    write_results_csv(rows, BufWriter::new(File::create(dir.join("results.csv"))?))?;
    write_timings_csv(rows, BufWriter::new(File::create(dir.join("timings.csv"))?))?;
    let mut f = BufWriter::new(File::create(dir.join("results.md"))?);
    writeln!(f, "## {title}\n\nMSE per cell; published values are shown for comparison only.\n")?;
    f.write_all(markdown(rows).as_bytes())?;
    f.flush()?;
    Ok(())
}
