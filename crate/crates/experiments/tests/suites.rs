use glct_core::{Basis, Method, Variant};
use glct_experiments::config::{ExperimentConfig, GraphSource, GridSettings, Strategy, TrainSettings};
use glct_experiments::data::write_stand_ins;
use glct_experiments::report::{write_all, write_results_csv};
use glct_experiments::suite::{monotonicity_checks, ordering_checks, run_realworld_suite, run_synthetic_suite};

fn small_synthetic() -> ExperimentConfig {
    ExperimentConfig {
        graphs: vec![GraphSource::Knn { n: 10, k: 3, weighting: Default::default() }, GraphSource::Sensor { n: 12 }],
        noise_levels: vec![0.5, 1.0],
        grid: GridSettings { step: 0.5, append_rotations: true },
        ..ExperimentConfig::synthetic_default()
    }
}

fn csv(rows: &[glct_experiments::report::ResultRow]) -> Vec<u8> {
    let mut buf = Vec::new();
    write_results_csv(rows, &mut buf).unwrap();
    buf
}

#[test]
fn synthetic_grid_suite_is_reproducible() {
    let cfg = small_synthetic();
    let rows = run_synthetic_suite(&cfg).unwrap();
    assert_eq!(rows.len(), 2 * 6 * 2);
    assert!(rows.iter().all(|r| !r.failed() && r.strategy == Strategy::Grid));
    assert_eq!(csv(&rows), csv(&run_synthetic_suite(&cfg).unwrap()));
    assert!(monotonicity_checks(&rows).iter().all(|c| c.holds));

    let dir = tempfile::tempdir().unwrap();
    write_all(&rows, dir.path(), "small").unwrap();
    let md = std::fs::read_to_string(dir.path().join("results.md")).unwrap();
    assert!(md.contains("### knn3-10") && md.contains("### sensor-12"));
    assert_eq!(std::fs::read(dir.path().join("results.csv")).unwrap(), csv(&rows));
}

#[test]
fn grid_glct_never_loses_to_its_own_rotation_points() {
    // rotations are appended to the grid, so a GLCT optimum can only tie or
    // beat the fractional points that its own factorization reproduces
    let cfg = small_synthetic();
    let rows = run_synthetic_suite(&cfg).unwrap();
    for c in ordering_checks(&rows, 1e-9) {
        if !c.variant.uses_cmcccm() {
            assert!(c.holds, "{:?}", c);
        }
    }
}

#[test]
fn synthetic_adam_suite_reports_closed_form_mse() {
    let cfg = ExperimentConfig {
        graphs: vec![GraphSource::Knn { n: 8, k: 3, weighting: Default::default() }],
        methods: vec![Method::Gfrft(Basis::Laplacian), Method::Glct(Variant::LapCmcccm)],
        strategy: Strategy::Adam,
        noise_levels: vec![0.5],
        train: TrainSettings { max_iters: 30, snapshots: 2, ..TrainSettings::default() },
        ..ExperimentConfig::synthetic_default()
    };
    let rows = run_synthetic_suite(&cfg).unwrap();
    assert_eq!(rows.len(), 2);
    for r in &rows {
        assert_eq!(r.strategy, Strategy::Adam);
        assert!(r.mse.unwrap() >= 0.0, "{r:?}");
    }
    assert_eq!(csv(&rows), csv(&run_synthetic_suite(&cfg).unwrap()));
}

#[test]
fn real_suite_covers_every_cell() {
    let dir = tempfile::tempdir().unwrap();
    write_stand_ins(dir.path(), 0).unwrap();
    let mut cfg = ExperimentConfig::real_default(dir.path());
    cfg.train.max_iters = 2;
    let rows = run_realworld_suite(&cfg).unwrap();
    // 3 datasets × 3 graphs × 3 snapshots × 3 noise levels × 6 methods
    assert_eq!(rows.len(), 486);
    for ds in ["sst", "pm25", "covid"] {
        assert_eq!(rows.iter().filter(|r| r.dataset == ds).count(), 162);
    }
    assert!(rows.iter().all(|r| !r.failed()), "{:?}", rows.iter().find(|r| r.failed()));
    assert!(rows.iter().all(|r| r.mse.unwrap() <= r.baseline_mse.unwrap()));
    assert!(rows.iter().all(|r| r.paper_mse.is_some()));
    assert_eq!(csv(&rows), csv(&run_realworld_suite(&cfg).unwrap()));

    // all methods and graphs share one noisy observation per (dataset, time, s)
    let base: Vec<_> = rows.iter().filter(|r| r.dataset == "pm25" && r.snapshot == 125 && r.s == 0.6).map(|r| r.baseline_mse).collect();
    assert_eq!(base.len(), 18);
    assert!(base.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn real_suite_rejects_grid_strategy() {
    let dir = tempfile::tempdir().unwrap();
    write_stand_ins(dir.path(), 0).unwrap();
    let mut cfg = ExperimentConfig::real_default(dir.path());
    cfg.strategy = Strategy::Grid;
    assert!(run_realworld_suite(&cfg).is_err());
}
