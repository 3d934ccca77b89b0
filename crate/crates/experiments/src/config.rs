//! Experiment configuration, read from JSON.
//!
//! ```json
//! {
//!   "graphs": [{ "kind": "knn", "n": 15, "k": 5 }],
//!   "methods": ["gfrft-w", "wadj-cddhfs"],
//!   "strategy": "grid",
//!   "noise_levels": [0.5, 1.0, 1.5],
//!   "seed": 7,
//!   "out_dir": "results"
//! }
//! ```
//!
//! Omitted sections take the defaults of [`GridSettings`], [`TrainSettings`]
//! and `FactoryConfig`.

use std::path::{Path, PathBuf};

use glct_core::graph::Weighting;
use glct_core::transforms::FactoryConfig;
use glct_core::{GlctError, Method, Result};
use serde::{Deserialize, Serialize};

use crate::data::DATASETS;
use crate::reference::{REAL_KS, REAL_NOISE, SYNTHETIC_GRAPHS, SYNTHETIC_NOISE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// Closed-form MSE minimized over a parameter grid.
    #[default]
    Grid,
    /// Joint Adam training on observed snapshots.
    Adam,
}

/// Where a graph, and for datasets the signals, come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GraphSource {
    /// Random points in the unit square joined by a k-nn relation.
    Knn {
        n: usize,
        k: usize,
        #[serde(default)]
        weighting: Weighting,
    },
    Sensor { n: usize },
    SwissRoll { n: usize, k: usize },
    /// Station coordinates plus a node-by-time signal table; one graph per `k`.
    Dataset {
        name: String,
        coords: PathBuf,
        signals: PathBuf,
        /// Signal columns `t_<time>` to evaluate.
        times: Vec<usize>,
        ks: Vec<usize>,
        #[serde(default)]
        weighting: Weighting,
    },
}

impl GraphSource {
    /// Short name used in result rows, e.g. `knn5-15`.
    pub fn label(&self) -> String {
        match self {
            GraphSource::Knn { n, k, .. } => format!("knn{k}-{n}"),
            GraphSource::Sensor { n } => format!("sensor-{n}"),
            GraphSource::SwissRoll { n, k } => format!("swiss{k}-{n}"),
            GraphSource::Dataset { name, .. } => name.clone(),
        }
    }

    /// Key of the published table with the same graph family and size, if any.
    pub fn reference_key(&self) -> Option<&'static str> {
        let (family, n, k) = match *self {
            GraphSource::Knn { n, k, .. } => ("knn5", n, k),
            GraphSource::SwissRoll { n, k } => ("swiss", n, k),
            GraphSource::Sensor { n } => ("sensor", n, glct_core::graph::SENSOR_NEIGHBORS),
            GraphSource::Dataset { .. } => return None,
        };
        SYNTHETIC_GRAPHS.iter().find(|g| g.0 == family && g.1 == n && g.2 == k).map(|g| g.0)
    }

    fn validate(&self) -> Result<()> {
        let knn = |n: usize, k: usize| {
            if n < 2 || k == 0 || k >= n {
                Err(invalid(format!("graph {}: need n >= 2 and 1 <= k < n", self.label())))
            } else {
                Ok(())
            }
        };
        match self {
            GraphSource::Knn { n, k, .. } | GraphSource::SwissRoll { n, k } => knn(*n, *k),
            GraphSource::Sensor { n } => knn(*n, 1),
            GraphSource::Dataset { name, coords, signals, ks, .. } => {
                if name.is_empty() || ks.is_empty() || ks.contains(&0) {
                    return Err(invalid(format!("dataset '{name}': name and a nonzero k list are required")));
                }
                for p in [coords, signals] {
                    if !p.is_file() {
                        return Err(invalid(format!("dataset '{name}': file {} not found", p.display())));
                    }
                }
                Ok(())
            }
        }
    }
}

/// Parameter grid for the grid strategy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSettings {
    /// Spacing of `a, d ∈ [0, 2]`, `b ∈ [step, 2]` and of the fractional orders `α ∈ [0, 2]`.
    pub step: f64,
    /// Append the rotation points of every searched order to GLCT grids.
    pub append_rotations: bool,
}

impl Default for GridSettings {
    fn default() -> Self {
        Self { step: 0.1, append_rotations: true }
    }
}

impl GridSettings {
    /// Number of intervals covering `[0, 2]`.
    fn intervals(&self) -> Result<usize> {
        let m = (2.0 / self.step).round();
        if !(self.step > 0.0) || !self.step.is_finite() || (m * self.step - 2.0).abs() > 1e-9 || m > 1000.0 {
            return Err(invalid("grid step must divide 2 into at most 1000 intervals"));
        }
        Ok(m as usize)
    }

    /// Points `2·k/m` for `k` in `from..=m`; exact tenths when `step = 0.1`.
    fn axis(&self, from: usize) -> Result<Vec<f64>> {
        let m = self.intervals()?;
        Ok((from..=m).map(|k| 2.0 * (k as f64 / m as f64)).collect())
    }

    pub fn alphas(&self) -> Result<Vec<f64>> {
        self.axis(0)
    }

    pub fn grid(&self) -> Result<glct_core::optimize::GridSpec<f64>> {
        let g = glct_core::optimize::GridSpec::new(self.axis(0)?, self.axis(1)?, self.axis(0)?)?;
        Ok(if self.append_rotations { g.with_rotations(&self.alphas()?) } else { g })
    }
}

/// Adam settings for the training strategy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainSettings {
    pub learning_rate: f64,
    pub max_iters: usize,
    pub stop_tol: f64,
    pub fd_step: f64,
    /// Use the closed-form parameter gradient for lap-cmcccm.
    pub analytic_lap_cmcccm: bool,
    /// Snapshots drawn per cell when training on a synthetic graph.
    pub snapshots: usize,
}

impl Default for TrainSettings {
    fn default() -> Self {
        Self { learning_rate: 0.005, max_iters: 5000, stop_tol: 0.0, fd_step: 1e-5, analytic_lap_cmcccm: true, snapshots: 1 }
    }
}

impl TrainSettings {
    pub fn train_config(&self, method: Method, seed: u64, b_min: f64) -> glct_core::optimize::TrainConfig<f64> {
        use glct_core::optimize::{GradMode, TrainConfig};
        let analytic = self.analytic_lap_cmcccm && method == Method::Glct(glct_core::Variant::LapCmcccm);
        TrainConfig {
            learning_rate: self.learning_rate,
            max_iters: self.max_iters,
            stop_tol: self.stop_tol,
            seed,
            grad_mode: if analytic { GradMode::AnalyticLapCmcccm } else { GradMode::FiniteDifference },
            fd_step: self.fd_step,
            b_min,
            ..TrainConfig::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub graphs: Vec<GraphSource>,
    #[serde(default = "all_methods")]
    pub methods: Vec<Method>,
    #[serde(default)]
    pub strategy: Strategy,
    pub noise_levels: Vec<f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
    #[serde(default)]
    pub grid: GridSettings,
    #[serde(default)]
    pub train: TrainSettings,
    #[serde(default)]
    pub factory: FactoryConfig<f64>,
}

fn all_methods() -> Vec<Method> {
    Method::ALL.to_vec()
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("results")
}

fn invalid(msg: impl Into<String>) -> GlctError {
    GlctError::InvalidParameter(msg.into())
}

impl ExperimentConfig {
    /// The three synthetic graphs of the published tables, grid strategy.
    pub fn synthetic_default() -> Self {
        Self {
            graphs: vec![
                GraphSource::Knn { n: 15, k: 5, weighting: Weighting::default() },
                GraphSource::SwissRoll { n: 30, k: 5 },
                GraphSource::Sensor { n: 20 },
            ],
            methods: all_methods(),
            strategy: Strategy::Grid,
            noise_levels: SYNTHETIC_NOISE.to_vec(),
            seed: 0,
            out_dir: default_out_dir(),
            grid: GridSettings::default(),
            train: TrainSettings::default(),
            factory: FactoryConfig::default(),
        }
    }

    /// The three real-data protocols over CSVs in `data_dir`, as written by
    /// [`crate::data::write_stand_ins`].
    pub fn real_default(data_dir: &Path) -> Self {
        let graphs = DATASETS
            .iter()
            .map(|ds| GraphSource::Dataset {
                name: ds.name.to_string(),
                coords: data_dir.join(format!("{}_coords.csv", ds.name)),
                signals: data_dir.join(format!("{}_signals.csv", ds.name)),
                times: ds.times.to_vec(),
                ks: REAL_KS.to_vec(),
                weighting: Weighting::default(),
            })
            .collect();
        Self {
            graphs,
            methods: all_methods(),
            strategy: Strategy::Adam,
            noise_levels: REAL_NOISE.to_vec(),
            seed: 0,
            out_dir: default_out_dir(),
            grid: GridSettings::default(),
            train: TrainSettings::default(),
            factory: FactoryConfig::default(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Checks everything that can be checked before computing.
    pub fn validate(&self) -> Result<()> {
        if self.graphs.is_empty() || self.methods.is_empty() || self.noise_levels.is_empty() {
            return Err(invalid("graphs, methods and noise_levels must be nonempty"));
        }
        if !self.noise_levels.iter().all(|s| s.is_finite() && *s >= 0.0) {
            return Err(invalid("noise levels must be finite and >= 0"));
        }
        let mut seen = self.methods.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.methods.len() {
            return Err(invalid("methods must not repeat"));
        }
        for g in &self.graphs {
            g.validate()?;
        }
        self.grid.intervals()?;
        if self.train.snapshots == 0 {
            return Err(invalid("train.snapshots must be >= 1"));
        }
        self.train.train_config(Method::Glct(glct_core::Variant::LapCmcccm), self.seed, self.factory.b_min).validate(Method::Glct(glct_core::Variant::LapCmcccm))?;
        self.factory.scaling.validate()?;
        if !(self.factory.b_min >= 0.0) || !(self.factory.inverse_tol > 0.0) {
            return Err(invalid("factory.b_min must be >= 0 and factory.inverse_tol > 0"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_json_takes_defaults() {
        let cfg = ExperimentConfig::from_json(r#"{"graphs":[{"kind":"knn","n":15,"k":5}],"noise_levels":[0.5]}"#).unwrap();
        assert_eq!(cfg.methods.len(), 6);
        assert_eq!(cfg.strategy, Strategy::Grid);
        assert_eq!(cfg.train.max_iters, 5000);
        assert_eq!(cfg.train.learning_rate, 0.005);
        assert_eq!(cfg.grid.step, 0.1);
    }

    #[test]
    fn round_trip_is_identity() {
        let cfg = ExperimentConfig::synthetic_default();
        let back: ExperimentConfig = serde_json::from_str(&cfg.to_json()).unwrap();
        assert_eq!(back, cfg);
        let real = ExperimentConfig::real_default(Path::new("data"));
        let back: ExperimentConfig = serde_json::from_str(&real.to_json()).unwrap();
        assert_eq!(back, real);
    }

    #[test]
    fn rejects_bad_input() {
        let bad = [
            r#"{"graphs":[],"noise_levels":[0.5]}"#,
            r#"{"graphs":[{"kind":"knn","n":5,"k":5}],"noise_levels":[0.5]}"#,
            r#"{"graphs":[{"kind":"knn","n":15,"k":5}],"noise_levels":[-1]}"#,
            r#"{"graphs":[{"kind":"knn","n":15,"k":5}],"noise_levels":[0.5],"methods":["gfrft-w","gfrft-w"]}"#,
            r#"{"graphs":[{"kind":"knn","n":15,"k":5}],"noise_levels":[0.5],"bogus":1}"#,
            r#"{"graphs":[{"kind":"knn","n":15,"k":5}],"noise_levels":[0.5],"grid":{"step":0.3}}"#,
            r#"{"graphs":[{"kind":"dataset","name":"x","coords":"/nope.csv","signals":"/nope.csv","times":[1],"ks":[2]}],"noise_levels":[0.5]}"#,
        ];
        for text in bad {
            let err = ExperimentConfig::from_json(text).unwrap_err();
            assert!(err.is_validation(), "{text}: {err}");
        }
    }

    #[test]
    fn standard_grid_matches_core() {
        let g = GridSettings { append_rotations: false, ..GridSettings::default() }.grid().unwrap();
        assert_eq!(g, glct_core::optimize::GridSpec::standard());
        assert_eq!(GridSettings::default().alphas().unwrap(), glct_core::optimize::default_alpha_grid::<f64>());
    }

    #[test]
    fn reference_keys() {
        assert_eq!(GraphSource::Knn { n: 15, k: 5, weighting: Weighting::default() }.reference_key(), Some("knn5"));
        assert_eq!(GraphSource::Knn { n: 16, k: 5, weighting: Weighting::default() }.reference_key(), None);
        assert_eq!(GraphSource::Sensor { n: 20 }.reference_key(), Some("sensor"));
    }
}
