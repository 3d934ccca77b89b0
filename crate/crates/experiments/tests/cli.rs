use std::path::Path;
use std::process::{Command, Output};

fn glct(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_glct")).args(args).current_dir(cwd).env("RUST_LOG", "warn").output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

#[test]
fn graph_build_then_transform_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = glct(&["graph", "build", "--n", "9", "--k", "3", "--seed", "4", "--out-dir", "g"], d);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json(&out)["n"], 9);
    let summary = json(&glct(&["graph", "import", "--edges", "g/edges.csv"], d));
    assert_eq!(summary["connected"], true);

    std::fs::write(d.join("sig.csv"), (0..9).map(|i| format!("{i},{}\n", i as f64 * 0.5)).collect::<String>()).unwrap();
    let fwd = glct(&["transform", "--edges", "g/edges.csv", "--signal", "sig.csv", "--variant", "lap-cmcccm", "--a", "0.5", "--b", "1.2", "--d", "0.3", "--out-dir", "f", "--matrix"], d);
    assert_eq!(code(&fwd), 0, "{}", String::from_utf8_lossy(&fwd.stderr));
    assert!(json(&fwd)["diagnostics"]["inverse_residual"].as_f64().unwrap() < 1e-6);
    assert!(d.join("f/operator.csv").is_file());
    let back = glct(
        &["transform", "--edges", "g/edges.csv", "--signal", "f/transformed.csv", "--variant", "lap-cmcccm", "--a", "0.5", "--b", "1.2", "--d", "0.3", "--inverse", "--out-dir", "b"],
        d,
    );
    assert_eq!(code(&back), 0);
    let restored = glct_core::io::read_signal_csv::<f64, _>(std::fs::File::open(d.join("b/transformed.csv")).unwrap()).unwrap();
    for (i, z) in restored.iter().enumerate() {
        assert!((z.re - i as f64 * 0.5).abs() < 1e-8 && z.im.abs() < 1e-8, "{i}: {z}");
    }
}

#[test]
fn grid_search_and_train_write_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let grid = glct(&["grid-search", "--n", "8", "--k", "3", "--step", "0.5", "--variant", "wadj-cddhfs", "--out-dir", "r"], d);
    assert_eq!(code(&grid), 0, "{}", String::from_utf8_lossy(&grid.stderr));
    let v = json(&grid);
    assert_eq!(v["points"], 5 * 4 * 5 + 5);
    assert!(v["mse"].as_f64().unwrap() >= 0.0);
    assert_eq!(std::fs::read_to_string(d.join("r/grid.csv")).unwrap().lines().count(), 1 + 105);

    let train = glct(&["train", "--n", "8", "--k", "3", "--iters", "25", "--out-dir", "t"], d);
    assert_eq!(code(&train), 0, "{}", String::from_utf8_lossy(&train.stderr));
    let v = json(&train);
    assert_eq!(v["iterations"], 25);
    assert!(v["loss"].as_f64().unwrap() <= v["baseline_loss"].as_f64().unwrap());
    assert_eq!(std::fs::read_to_string(d.join("t/trace.csv")).unwrap().lines().count(), 26);
}

#[test]
fn suite_from_config_file_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(
        d.join("exp.json"),
        r#"{"graphs": [{"kind": "knn", "n": 8, "k": 3}], "noise_levels": [0.5, 1.0], "grid": {"step": 1.0}, "methods": ["gfrft-l", "lap-cddhfs"]}"#,
    )
    .unwrap();
    for out in ["one", "two"] {
        let o = glct(&["suite", "synthetic", "--config", "exp.json", "--out-dir", out], d);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    let one = std::fs::read(d.join("one/results.csv")).unwrap();
    assert_eq!(one, std::fs::read(d.join("two/results.csv")).unwrap());
    assert_eq!(String::from_utf8(one).unwrap().lines().count(), 1 + 2 * 2);
    assert!(std::fs::read_to_string(d.join("one/results.md")).unwrap().contains("### Checks"));
    assert!(d.join("one/config.json").is_file() && d.join("one/timings.csv").is_file());
}

#[test]
fn exit_codes_separate_input_from_numerical_failures() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(code(&glct(&["frobnicate"], d)), 2);
    assert_eq!(code(&glct(&["transform", "--edges", "missing.csv", "--signal", "x.csv"], d)), 2);
    assert_eq!(code(&glct(&["grid-search", "--n", "8", "--k", "3", "--noise", "-1"], d)), 2);
    assert_eq!(code(&glct(&["grid-search", "--n", "8", "--k", "3", "--step", "0.3"], d)), 2);
    assert_eq!(code(&glct(&["train", "--n", "8", "--k", "3", "--tolerance", "0"], d)), 2);
    std::fs::write(d.join("bad.json"), "{\"graphs\": []}").unwrap();
    assert_eq!(code(&glct(&["suite", "synthetic", "--config", "bad.json"], d)), 2);
    // a 1-nn relation on 60 random points essentially never connects
    let o = glct(&["graph", "build", "--n", "60", "--k", "1"], d);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("construction failure"));
}
