//! Grid search against Adam training: wall time and matrix-product counts
//! across graph sizes.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use glct_core::graph::{build_random_knn_graph, synthetic_autocorrelation, Weighting};
use glct_core::lct::LctParams;
use glct_core::optimize::{compare_strategies, GridSpec, IterationTiming, Snapshot, TrainConfig};
use glct_core::transforms::{FactoryConfig, TransformFactory};
use glct_core::wiener::{ObservationModel, ObservationSampler};
use glct_core::{Result, Variant};
use serde::{Deserialize, Serialize};

use crate::data::derive_seed;
use crate::reference;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchConfig {
    pub sizes: Vec<usize>,
    pub k: usize,
    /// Values per grid axis; the grid has `grid_count³` points.
    pub grid_count: usize,
    pub iters: usize,
    pub noise: f64,
    pub seed: u64,
    pub variants: Vec<Variant>,
    pub factory: FactoryConfig<f64>,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            sizes: vec![15, 30, 50],
            k: 5,
            grid_count: 20,
            iters: 5000,
            noise: 0.5,
            seed: 0,
            variants: Variant::ALL.to_vec(),
            factory: FactoryConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub n: usize,
    pub variant: Variant,
    pub grid_points: usize,
    pub grid_evaluations: usize,
    pub grid_failures: usize,
    pub grid_wall_ms: f64,
    pub grid_dense: u64,
    pub grid_diag: u64,
    pub grid_mse: f64,
    /// Products spent by one forward transform.
    pub forward_dense: u64,
    pub forward_diag: u64,
    /// Published per-forward tally.
    pub tally_dense: u64,
    pub tally_diag: u64,
    pub adam_iters: usize,
    pub adam_wall_ms: f64,
    pub adam_dense: u64,
    pub adam_dense_per_iter: Option<u64>,
    pub adam_timing: IterationTiming,
    pub adam_mse: f64,
}

impl BenchRow {
    pub fn tally_matches(&self) -> bool {
        (self.forward_dense, self.forward_diag) == (self.tally_dense, self.tally_diag)
    }
}

/// Products of one forward transform of `variant` at a generic parameter point.
pub fn forward_counts(f: &TransformFactory<f64>, variant: Variant) -> Result<(u64, u64)> {
    let m = LctParams::from_abd(0.7, 0.9, 1.3)?;
    let before = f.op_counts();
    f.forward_matrix(variant, &m)?;
    let d = f.op_counts().since(before);
    Ok((d.dense_matmul_count, d.diag_matmul_count))
}

pub fn run_bench(cfg: &BenchConfig) -> Result<Vec<BenchRow>> {
    let grid = GridSpec::cube(cfg.grid_count);
    let mut rows = Vec::new();
    for (i, &n) in cfg.sizes.iter().enumerate() {
        let g = build_random_knn_graph(n, cfg.k.min(n - 1), derive_seed(cfg.seed, &[i as u64]), Weighting::default())?;
        let model = ObservationModel::denoising(synthetic_autocorrelation(&g), cfg.noise)?;
        let mut sampler = ObservationSampler::new(&model, derive_seed(cfg.seed, &[i as u64, 1]))?;
        let (clean, observed) = sampler.draw();
        let data = [Snapshot::new(observed, clean)?];
        let base = TransformFactory::new(&g, cfg.factory)?;
        for &variant in &cfg.variants {
            let f = TransformFactory::from_spectra(base.spectra().clone(), cfg.factory);
            let (forward_dense, forward_diag) = forward_counts(&f, variant)?;
            let tc = TrainConfig { max_iters: cfg.iters, seed: cfg.seed, b_min: cfg.factory.b_min, ..TrainConfig::default() };
            let rep = compare_strategies(&f, variant, &model, &grid, &tc, &data)?;
            let (tally_dense, tally_diag) = reference::matmul_tally(&variant.to_string()).unwrap_or_default();
            log::info!("n={n} {variant}: grid {:.0} ms, adam {:.0} ms", rep.grid.wall_ms, rep.adam.wall_ms);
            rows.push(BenchRow {
                n,
                variant,
                grid_points: rep.grid.points,
                grid_evaluations: rep.grid.evaluations,
                grid_failures: rep.grid.failures,
                grid_wall_ms: rep.grid.wall_ms,
                grid_dense: rep.grid.dense_matmul_count,
                grid_diag: rep.grid.diag_matmul_count,
                grid_mse: rep.grid.mse,
                forward_dense,
                forward_diag,
                tally_dense,
                tally_diag,
                adam_iters: rep.adam.iterations,
                adam_wall_ms: rep.adam.wall_ms,
                adam_dense: rep.adam.dense_matmul_count,
                adam_dense_per_iter: rep.adam.dense_per_iteration,
                adam_timing: rep.adam.timing,
                adam_mse: rep.adam.mse,
            });
        }
    }
    Ok(rows)
}

pub fn write_bench_csv<W: Write>(rows: &[BenchRow], out: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(out);
    wr.write_record([
        "n", "variant", "grid_points", "grid_evaluations", "grid_failures", "grid_wall_ms", "grid_dense", "grid_diag", "grid_mse",
        "forward_dense", "forward_diag", "tally_dense", "tally_diag", "adam_iters", "adam_wall_ms", "adam_dense",
        "adam_dense_per_iter", "iter_mean_ns", "iter_cv", "block_cv", "adam_mse",
    ])?;
    for r in rows {
        wr.write_record(&[
            r.n.to_string(),
            r.variant.to_string(),
            r.grid_points.to_string(),
            r.grid_evaluations.to_string(),
            r.grid_failures.to_string(),
            format!("{:.3}", r.grid_wall_ms),
            r.grid_dense.to_string(),
            r.grid_diag.to_string(),
            r.grid_mse.to_string(),
            r.forward_dense.to_string(),
            r.forward_diag.to_string(),
            r.tally_dense.to_string(),
            r.tally_diag.to_string(),
            r.adam_iters.to_string(),
            format!("{:.3}", r.adam_wall_ms),
            r.adam_dense.to_string(),
            r.adam_dense_per_iter.map_or(String::new(), |v| v.to_string()),
            format!("{:.1}", r.adam_timing.mean_ns),
            format!("{:.4}", r.adam_timing.cv),
            format!("{:.4}", r.adam_timing.block_cv),
            r.adam_mse.to_string(),
        ])?;
    }
    wr.flush()?;
    Ok(())
}

/// Whitespace-separated columns, one gnuplot index block per variant.
pub fn write_bench_dat<W: Write>(rows: &[BenchRow], mut out: W) -> Result<()> {
    let mut variants: Vec<Variant> = rows.iter().map(|r| r.variant).collect();
    variants.sort();
    variants.dedup();
    for (i, v) in variants.iter().enumerate() {
        if i > 0 {
            writeln!(out, "\n")?;
        }
        writeln!(out, "# {v}\n# n grid_wall_ms adam_wall_ms grid_evaluations adam_iters grid_dense adam_dense")?;
        for r in rows.iter().filter(|r| r.variant == *v) {
            writeln!(
                out,
                "{} {:.3} {:.3} {} {} {} {}",
                r.n, r.grid_wall_ms, r.adam_wall_ms, r.grid_evaluations, r.adam_iters, r.grid_dense, r.adam_dense
            )?;
        }
    }
    Ok(())
}

pub fn bench_markdown(rows: &[BenchRow]) -> String {
    let mut md = String::from("## Grid search vs Adam\n\n");
    md.push_str("| n | variant | grid evals | grid ms | Adam iters | Adam ms | dense/iter | iter CV | block CV | forward dense/diag | published dense/diag |\n");
    md.push_str("|---|---|---|---|---|---|---|---|---|---|---|\n");
    for r in rows {
        let _ = writeln!(
            md,
            "| {} | {} | {} | {:.0} | {} | {:.0} | {} | {:.3} | {:.3} | {}/{} | {}/{} |",
            r.n,
            r.variant,
            r.grid_evaluations,
            r.grid_wall_ms,
            r.adam_iters,
            r.adam_wall_ms,
            r.adam_dense_per_iter.map_or("varies".into(), |v| v.to_string()),
            r.adam_timing.cv,
            r.adam_timing.block_cv,
            r.forward_dense,
            r.forward_diag,
            r.tally_dense,
            r.tally_diag
        );
    }
    let mismatched: Vec<_> = rows.iter().filter(|r| !r.tally_matches()).map(|r| r.variant).collect::<std::collections::BTreeSet<_>>().into_iter().collect();
    if !mismatched.is_empty() {
        md.push_str("\nMeasured forward-transform counts differ from the published tally for: ");
        md.push_str(&mismatched.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", "));
        md.push_str(". Every variant is evaluated as one dense product of cached basis matrices plus diagonal scalings.\n");
    }
    md
}

pub fn write_bench_outputs(rows: &[BenchRow], dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    write_bench_csv(rows, BufWriter::new(File::create(dir.join("bench.csv"))?))?;
    write_bench_dat(rows, BufWriter::new(File::create(dir.join("bench.dat"))?))?;
    std::fs::write(dir.join("bench.md"), bench_markdown(rows))?;
    Ok(())
}
