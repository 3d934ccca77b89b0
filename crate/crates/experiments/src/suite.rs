//! Denoising suites over synthetic graphs (closed-form grid search or Adam)
//! and over dataset CSVs (Adam).
//!
//! Cells are independent. Rows come back in cell-key order (graph, k,
//! snapshot, noise level, method) whatever order the work pool finishes them in.

use std::time::Instant;

use glct_core::graph::{build_knn_graph, build_random_knn_graph, build_sensor_graph, build_swiss_roll_graph, synthetic_autocorrelation, Graph};
use glct_core::optimize::{
    adam_train, build_operator, gfrft_search_models, grid_search_models, GridSearchOutcome, Snapshot, TrainState, TransformParams,
};
use glct_core::spectral::OpCounts;
use glct_core::transforms::{GraphSpectra, TransformFactory};
use glct_core::wiener::{mse_closed_form, DiagonalFilter, ObservationModel, ObservationSampler};
use glct_core::{Basis, GlctError, Method, Result, Variant};
use rayon::prelude::*;

use crate::config::{ExperimentConfig, GraphSource, Strategy};
use crate::data::{add_noise, derive_seed, load_snapshots, DATASETS};
use crate::reference;
use crate::report::ResultRow;

fn build_graph(source: &GraphSource, seed: u64) -> Result<Graph<f64>> {
    match *source {
        GraphSource::Knn { n, k, weighting } => build_random_knn_graph(n, k, seed, weighting),
        GraphSource::Sensor { n } => build_sensor_graph(n, seed),
        GraphSource::SwissRoll { n, k } => build_swiss_roll_graph(n, seed, k),
        GraphSource::Dataset { .. } => Err(GlctError::InvalidParameter("dataset sources belong to the real-data suite".into())),
    }
}

fn neighbours(source: &GraphSource) -> usize {
    match *source {
        GraphSource::Knn { k, .. } | GraphSource::SwissRoll { k, .. } => k,
        GraphSource::Sensor { n } => glct_core::graph::SENSOR_NEIGHBORS.min(n.saturating_sub(1)),
        GraphSource::Dataset { .. } => 0,
    }
}

/// Seed of the graph drawn for source `index`.
pub fn graph_seed(cfg: &ExperimentConfig, index: usize) -> u64 {
    derive_seed(cfg.seed, &[index as u64])
}

struct Cell<'a> {
    dataset: &'a str,
    method: Method,
    k: usize,
    snapshot: usize,
    s: f64,
    strategy: Strategy,
}

impl Cell<'_> {
    fn row(&self) -> ResultRow {
        ResultRow {
            dataset: self.dataset.to_string(),
            method: self.method,
            strategy: self.strategy,
            k: self.k,
            snapshot: self.snapshot,
            s: self.s,
            mse: None,
            baseline_mse: None,
            paper_mse: None,
            params: None,
            alpha: None,
            runtime_ms: 0.0,
            dense_matmuls: 0,
            diag_matmuls: 0,
            error: None,
        }
    }

    fn failed(&self, e: &GlctError) -> ResultRow {
        log::warn!("{} {} k={} t={} s={}: {e}", self.dataset, self.method, self.k, self.snapshot, self.s);
        ResultRow { error: Some(e.to_string()), ..self.row() }
    }
}

fn fill(row: &mut ResultRow, params: &TransformParams<f64>, counts: OpCounts) {
    let m = params.matrix();
    row.params = Some([m.a, m.b, m.c, m.d]);
    row.alpha = params.order();
    row.dense_matmuls = counts.dense_matmul_count;
    row.diag_matmuls = counts.diag_matmul_count;
}

/// MSE of the raw observation (`M = I`, `h = 1`).
fn baseline_mse(f: &TransformFactory<f64>, model: &ObservationModel<f64>) -> Result<f64> {
    let id = f.gfrft(Basis::Laplacian, 0.0)?;
    mse_closed_form(&id, &DiagonalFilter::ones(f.n()), model)
}

fn search(f: &TransformFactory<f64>, cfg: &ExperimentConfig, method: Method, models: &[ObservationModel<f64>]) -> Result<GridSearchOutcome<f64>> {
    match method {
        Method::Gfrft(basis) => gfrft_search_models(f, basis, models, &cfg.grid.alphas()?),
        Method::Glct(v) => grid_search_models(f, v, models, &cfg.grid.grid()?),
    }
}

/// Synthetic graphs under the neighbourhood covariance model.
///
/// With the grid strategy every method is searched once for all noise levels,
/// so the rows of one method share its search time and operation counts. With
/// the Adam strategy each (method, s) cell trains on snapshots sampled from the
/// model and reports the closed-form MSE of the trained transform and filter.
pub fn run_synthetic_suite(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    cfg.validate()?;
    if cfg.graphs.iter().any(|g| matches!(g, GraphSource::Dataset { .. })) {
        return Err(GlctError::InvalidParameter("the synthetic suite takes knn, sensor and swiss_roll graphs only".into()));
    }
    let mut rows = Vec::new();
    for (gi, source) in cfg.graphs.iter().enumerate() {
        let label = source.label();
        let k = neighbours(source);
        let cells: Vec<Cell> = cfg
            .methods
            .iter()
            .flat_map(|&method| cfg.noise_levels.iter().map(move |&s| (method, s)))
            .map(|(method, s)| Cell { dataset: &label, method, k, snapshot: 0, s, strategy: cfg.strategy })
            .collect();
        let setup = build_graph(source, graph_seed(cfg, gi)).and_then(|g| {
            let f = TransformFactory::new(&g, cfg.factory)?;
            let cf = synthetic_autocorrelation(&g);
            let models = cfg.noise_levels.iter().map(|&s| ObservationModel::denoising(cf.clone(), s)).collect::<Result<Vec<_>>>()?;
            Ok((f, models))
        });
        let (f, models) = match setup {
            Ok(v) => v,
            Err(e) => {
                rows.extend(cells.iter().map(|c| c.failed(&e)));
                continue;
            }
        };
        let baselines: Vec<Option<f64>> = models.iter().map(|m| baseline_mse(&f, m).ok()).collect();
        let reference_key = source.reference_key();
        let mut graph_rows = match cfg.strategy {
            Strategy::Grid => synthetic_grid(cfg, &f, &models, &cells),
            Strategy::Adam => synthetic_adam(cfg, gi, &f, &models, &cells),
        };
        for r in &mut graph_rows {
            let si = cfg.noise_levels.iter().position(|&s| s == r.s).expect("row noise level comes from config");
            r.baseline_mse = baselines[si];
            r.paper_mse = reference_key.and_then(|key| reference::synthetic(key, r.method.name(), r.s));
        }
        rows.extend(graph_rows);
    }
    Ok(rows)
}

fn synthetic_grid(cfg: &ExperimentConfig, f: &TransformFactory<f64>, models: &[ObservationModel<f64>], cells: &[Cell]) -> Vec<ResultRow> {
    let mut rows = Vec::with_capacity(cells.len());
    // methods in sequence so the factory's counters attribute cleanly
    for chunk in cells.chunks(models.len()) {
        let method = chunk[0].method;
        match search(f, cfg, method, models) {
            Ok(out) => {
                log::info!("{} {method}: {} points in {:.2?}", chunk[0].dataset, out.points.len(), out.elapsed);
                for (cell, opt) in chunk.iter().zip(&out.optima) {
                    let mut row = cell.row();
                    row.mse = Some(opt.mse);
                    row.runtime_ms = out.elapsed.as_secs_f64() * 1e3;
                    fill(&mut row, &opt.params, out.op_counts);
                    rows.push(row);
                }
            }
            Err(e) => rows.extend(chunk.iter().map(|c| c.failed(&e))),
        }
    }
    rows
}

fn synthetic_adam(cfg: &ExperimentConfig, gi: usize, f: &TransformFactory<f64>, models: &[ObservationModel<f64>], cells: &[Cell]) -> Vec<ResultRow> {
    cells
        .par_iter()
        .map(|cell| {
            let si = cfg.noise_levels.iter().position(|&s| s == cell.s).expect("cell noise level comes from config");
            let model = &models[si];
            let run = || -> Result<ResultRow> {
                let factory = TransformFactory::from_spectra(f.spectra().clone(), *f.config());
                let mut sampler = ObservationSampler::new(model, derive_seed(cfg.seed, &[gi as u64, si as u64, 1]))?;
                let data = (0..cfg.train.snapshots)
                    .map(|_| {
                        let (clean, observed) = sampler.draw();
                        Snapshot::new(observed, clean)
                    })
                    .collect::<Result<Vec<_>>>()?;
                let state = train(&factory, cfg, cell.method, &data)?;
                let op = build_operator(&factory, cell.method, &state.params.transform)?;
                let mut row = cell.row();
                row.mse = Some(mse_closed_form(&op, &state.params.filter(), model)?);
                row.runtime_ms = state.elapsed.as_secs_f64() * 1e3;
                fill(&mut row, &state.params.transform, factory.op_counts());
                Ok(row)
            };
            run().unwrap_or_else(|e| cell.failed(&e))
        })
        .collect()
}

fn train(f: &TransformFactory<f64>, cfg: &ExperimentConfig, method: Method, data: &[Snapshot<f64>]) -> Result<TrainState<f64>> {
    let tc = cfg.train.train_config(method, cfg.seed, cfg.factory.b_min);
    adam_train(f, method, data, &tc)
}

/// Dataset CSVs: one k-nn graph per `k`, Adam training per
/// (k, snapshot, s, method) on a single noisy snapshot.
///
/// The noise realization depends on (dataset, snapshot, s) only, so every
/// method and every `k` denoises the same observation. The reported MSE is the
/// squared error `‖f̂ − f‖²` of the returned iterate.
pub fn run_realworld_suite(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    cfg.validate()?;
    if cfg.strategy != Strategy::Adam {
        return Err(GlctError::InvalidParameter("the real-data suite needs strategy \"adam\" (no covariance model for grid search)".into()));
    }
    let mut rows = Vec::new();
    for (di, source) in cfg.graphs.iter().enumerate() {
        let GraphSource::Dataset { name, coords, signals, times, ks, weighting } = source else {
            return Err(GlctError::InvalidParameter("the real-data suite takes dataset sources only".into()));
        };
        let published = DATASETS.iter().find(|d| d.name == name && d.times.as_slice() == times.as_slice()).map(|d| d.name);
        let snaps = load_snapshots(coords, signals, times)?;
        let noisy: Vec<Vec<_>> = snaps
            .signals
            .iter()
            .enumerate()
            .map(|(ti, clean)| {
                cfg.noise_levels.iter().enumerate().map(|(si, &s)| add_noise(clean, s, derive_seed(cfg.seed, &[di as u64, ti as u64, si as u64]))).collect()
            })
            .collect::<Result<_>>()?;

        for &k in ks {
            let cells: Vec<(usize, usize, Cell)> = times
                .iter()
                .enumerate()
                .flat_map(|(ti, &t)| {
                    cfg.noise_levels.iter().enumerate().flat_map(move |(si, &s)| {
                        cfg.methods.iter().map(move |&method| (ti, si, Cell { dataset: name, method, k, snapshot: t, s, strategy: Strategy::Adam }))
                    })
                })
                .collect();
            let spectra = build_knn_graph(&snaps.coords, k, *weighting).and_then(|g| GraphSpectra::new(&g));
            let spectra = match spectra {
                Ok(s) => s,
                Err(e) => {
                    rows.extend(cells.iter().map(|c| c.2.failed(&e)));
                    continue;
                }
            };
            let done: Vec<ResultRow> = cells
                .par_iter()
                .map(|(ti, si, cell)| {
                    let run = || -> Result<ResultRow> {
                        let factory = TransformFactory::from_spectra(spectra.clone(), cfg.factory);
                        let data = [Snapshot::new(noisy[*ti][*si].values().clone(), snaps.signals[*ti].values().clone())?];
                        let clock = Instant::now();
                        let state = train(&factory, cfg, cell.method, &data)?;
                        let mut row = cell.row();
                        row.mse = Some(state.loss);
                        row.baseline_mse = Some(state.baseline_loss);
                        row.runtime_ms = clock.elapsed().as_secs_f64() * 1e3;
                        fill(&mut row, &state.params.transform, factory.op_counts());
                        log::info!("{name} k={k} t={} s={} {}: {:.5} (noisy {:.5}) in {:.0} ms", cell.snapshot, cell.s, cell.method, state.loss, state.baseline_loss, row.runtime_ms);
                        Ok(row)
                    };
                    let mut row = run().unwrap_or_else(|e| cell.failed(&e));
                    row.paper_mse = published.and_then(|p| reference::real(p, cell.method.name(), k, *ti, cell.s));
                    row
                })
                .collect();
            rows.extend(done);
        }
    }
    Ok(rows)
}

/// A GLCT row against the same-basis fractional Fourier row of its cell.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderingCheck {
    pub dataset: String,
    pub variant: Variant,
    pub k: usize,
    pub snapshot: usize,
    pub s: f64,
    pub glct: Option<f64>,
    pub gfrft: Option<f64>,
    pub holds: bool,
}

/// `glct ≤ gfrft + tol` for every GLCT row with a matching baseline row.
pub fn ordering_checks(rows: &[ResultRow], tol: f64) -> Vec<OrderingCheck> {
    rows.iter()
        .filter_map(|r| {
            let Method::Glct(variant) = r.method else { return None };
            let base = rows.iter().find(|b| {
                b.method == Method::Gfrft(variant.basis()) && b.dataset == r.dataset && b.k == r.k && b.snapshot == r.snapshot && b.s == r.s
            })?;
            let holds = matches!((r.mse, base.mse), (Some(g), Some(b)) if g <= b + tol);
            Some(OrderingCheck {
                dataset: r.dataset.clone(),
                variant,
                k: r.k,
                snapshot: r.snapshot,
                s: r.s,
                glct: r.mse,
                gfrft: base.mse,
                holds,
            })
        })
        .collect()
}

/// MSEs of one (dataset, method, k, snapshot) across noise levels.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotonicityCheck {
    pub dataset: String,
    pub method: Method,
    pub k: usize,
    pub snapshot: usize,
    /// `(s, mse)` by ascending `s`.
    pub series: Vec<(f64, Option<f64>)>,
    pub holds: bool,
}

/// MSE nondecreasing in `s` for every method row.
pub fn monotonicity_checks(rows: &[ResultRow]) -> Vec<MonotonicityCheck> {
    let mut keys: Vec<(String, Method, usize, usize)> = Vec::new();
    for r in rows {
        let key = (r.dataset.clone(), r.method, r.k, r.snapshot);
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    keys.into_iter()
        .map(|(dataset, method, k, snapshot)| {
            let mut series: Vec<(f64, Option<f64>)> = rows
                .iter()
                .filter(|r| r.dataset == dataset && r.method == method && r.k == k && r.snapshot == snapshot)
                .map(|r| (r.s, r.mse))
                .collect();
            series.sort_by(|x, y| x.0.total_cmp(&y.0));
            let holds = series.iter().all(|p| p.1.is_some()) && series.windows(2).all(|w| w[0].1 <= w[1].1);
            MonotonicityCheck { dataset, method, k, snapshot, series, holds }
        })
        .collect()
}

/// Markdown list of failed ordering and monotonicity checks.
pub fn checks_markdown(rows: &[ResultRow], tol: f64) -> String {
    let ord = ordering_checks(rows, tol);
    let mono = monotonicity_checks(rows);
    let mut out = format!(
        "### Checks\n\n- GLCT ≤ same-basis GFRFT + {tol:e}: {}/{} cells\n- MSE nondecreasing in s: {}/{} rows\n",
        ord.iter().filter(|c| c.holds).count(),
        ord.len(),
        mono.iter().filter(|c| c.holds).count(),
        mono.len()
    );
    for c in ord.iter().filter(|c| !c.holds) {
        out.push_str(&format!(
            "- ordering fails: {} {} k={} t={} s={}: {:?} vs {:?}\n",
            c.dataset, c.variant, c.k, c.snapshot, c.s, c.glct, c.gfrft
        ));
    }
    for c in mono.iter().filter(|c| !c.holds) {
        out.push_str(&format!("- monotonicity fails: {} {} k={} t={}: {:?}\n", c.dataset, c.method, c.k, c.snapshot, c.series));
    }
    out
}
