use glct_core::graph::{Weighting, SENSOR_NEIGHBORS};
use glct_core::{GlctError, Method};
use glct_experiments::config::{ExperimentConfig, GraphSource, GridSettings, Strategy as Search, TrainSettings};
use glct_experiments::data::{load_snapshots, read_signal_table, write_stand_ins, DATASETS, STATIONS};
use proptest::prelude::*;

fn source() -> impl Strategy<Value = GraphSource> {
    prop_oneof![
        (3usize..60, 1usize..3).prop_map(|(n, k)| GraphSource::Knn { n, k, weighting: Weighting::default() }),
        (SENSOR_NEIGHBORS + 2..40).prop_map(|n| GraphSource::Sensor { n }),
        (4usize..40, 1usize..4).prop_map(|(n, k)| GraphSource::SwissRoll { n, k }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn config_survives_json(
        graphs in prop::collection::vec(source(), 1..4),
        methods in prop::sample::subsequence(Method::ALL.to_vec(), 1..=6),
        noise in prop::collection::vec(0.0f64..3.0, 1..5),
        seed in any::<u64>(),
        adam in any::<bool>(),
        step in prop::sample::select(vec![0.1, 0.25, 0.5, 1.0]),
        iters in 1usize..10_000,
        lr in 1e-4f64..1.0,
    ) {
        let cfg = ExperimentConfig {
            graphs,
            methods,
            strategy: if adam { Search::Adam } else { Search::Grid },
            noise_levels: noise,
            seed,
            grid: GridSettings { step, append_rotations: !adam },
            train: TrainSettings { max_iters: iters, learning_rate: lr, ..TrainSettings::default() },
            ..ExperimentConfig::synthetic_default()
        };
        let back = ExperimentConfig::from_json(&cfg.to_json()).unwrap();
        prop_assert_eq!(back, cfg);
    }
}

#[test]
fn config_file_loads_with_defaults_filled_in() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("exp.json");
    std::fs::write(&path, r#"{"graphs": [{"kind": "knn", "n": 12, "k": 3}], "noise_levels": [0.5, 1.0]}"#).unwrap();
    let cfg = ExperimentConfig::load(&path).unwrap();
    assert_eq!(cfg.methods, Method::ALL.to_vec());
    assert_eq!(cfg.strategy, Search::Grid);
    assert_eq!(cfg.grid, GridSettings::default());
    assert_eq!(cfg.graphs[0].label(), "knn3-12");

    std::fs::write(&path, r#"{"graphs": [{"kind": "knn", "n": 12, "k": 3}], "noise_levels": [0.5], "colour": 1}"#).unwrap();
    assert!(matches!(ExperimentConfig::load(&path), Err(GlctError::Json(_))));
    assert!(matches!(ExperimentConfig::load(&dir.path().join("absent.json")), Err(GlctError::Io(_))));
}

#[test]
fn stand_ins_load_as_snapshots() {
    let dir = tempfile::tempdir().unwrap();
    let files = write_stand_ins(dir.path(), 3).unwrap();
    assert_eq!(files.len(), DATASETS.len());
    for (ds, (coords, signals)) in DATASETS.iter().zip(&files) {
        let snaps = load_snapshots(coords, signals, &ds.times).unwrap();
        assert_eq!(snaps.coords.len(), STATIONS);
        assert_eq!(snaps.signals.len(), 3);
        assert!(snaps.signals.iter().all(|s| s.len() == STATIONS && s.values().iter().all(|z| z.im == 0.0)));
        assert_ne!(snaps.signals[0], snaps.signals[2]);
    }
    let again = tempfile::tempdir().unwrap();
    write_stand_ins(again.path(), 3).unwrap();
    for name in ["sst_signals.csv", "covid_coords.csv"] {
        assert_eq!(std::fs::read(dir.path().join(name)).unwrap(), std::fs::read(again.path().join(name)).unwrap());
    }
}

#[test]
fn snapshot_loading_rejects_mismatched_files() {
    let dir = tempfile::tempdir().unwrap();
    let coords = dir.path().join("c.csv");
    let signals = dir.path().join("s.csv");
    std::fs::write(&coords, "0,0.1,0.2\n1,0.5,0.5\n2,0.9,0.1\n").unwrap();
    std::fs::write(&signals, "node_id,t_0,t_5\n0,1,2\n1,3,4\n").unwrap();
    assert!(matches!(load_snapshots(&coords, &signals, &[0]), Err(GlctError::DimensionMismatch { expected: 3, found: 2 })));
    std::fs::write(&signals, "node_id,t_0,t_5\n0,1,2\n1,3,4\n2,5,6\n").unwrap();
    assert!(matches!(load_snapshots(&coords, &signals, &[1]), Err(GlctError::InvalidParameter(_))));
    let s = load_snapshots(&coords, &signals, &[5, 0]).unwrap();
    assert_eq!(s.signals[0].values()[2].re, 6.0);
    assert_eq!(s.signals[1].values()[1].re, 3.0);

    let err = read_signal_table("node_id,t_0\n0,1\n1,x\n".as_bytes()).unwrap_err();
    assert!(matches!(err, GlctError::Parse { line: 3, .. }), "{err}");
}
