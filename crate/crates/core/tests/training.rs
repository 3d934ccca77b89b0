use glct_core::graph::{build_random_knn_graph, synthetic_autocorrelation, Weighting};
use glct_core::lct::LctParams;
use glct_core::optimize::{
    adam_train, build_operator, grid_search, grid_search_models, loss_and_gradient, training_loss, GradMode, GridSpec,
    Snapshot, TrainConfig, TrainParams, TransformParams,
};
use glct_core::transforms::{FactoryConfig, TransformFactory};
use glct_core::wiener::{assemble_wiener_hopf, build_rank_one_ops, mse_closed_form, solve_filter, ObservationModel, ObservationSampler};
use glct_core::{Method, Variant};
use nalgebra::{Complex, DVector};
use proptest::prelude::*;

fn setup(n: usize, seed: u64, s: f64) -> (TransformFactory<f64>, ObservationModel<f64>) {
    let g = build_random_knn_graph(n, 3, seed, Weighting::default()).unwrap();
    let model = ObservationModel::denoising(synthetic_autocorrelation(&g), s).unwrap();
    (TransformFactory::new(&g, FactoryConfig::default()).unwrap(), model)
}

fn snapshots(model: &ObservationModel<f64>, count: usize, seed: u64) -> Vec<Snapshot<f64>> {
    let mut sampler = ObservationSampler::new(model, seed).unwrap();
    (0..count)
        .map(|_| {
            let (clean, observed) = sampler.draw();
            Snapshot::new(observed, clean).unwrap()
        })
        .collect()
}

fn small_grid() -> GridSpec<f64> {
    GridSpec::new(vec![-1.0, 0.4, 1.5], vec![-0.8, 0.5, 1.2], vec![-0.5, 0.9]).unwrap()
}

#[test]
fn grid_optimum_beats_every_point_rebuilt_independently() {
    let (f, model) = setup(8, 1, 0.5);
    for v in Variant::ALL {
        let best = grid_search(&f, v, &model, &small_grid()).unwrap();
        let fresh = TransformFactory::new(&build_random_knn_graph(8, 3, 1, Weighting::default()).unwrap(), FactoryConfig::default()).unwrap();
        for m in small_grid().points() {
            let Ok(op) = fresh.glct(v, &m) else { continue };
            let sys = assemble_wiener_hopf(&build_rank_one_ops(&op), &model).unwrap();
            let mse = sys.mse(&solve_filter(&sys, 0.0).unwrap().filter).unwrap();
            assert!(best.mse <= mse + 1e-12, "{v}: optimum {} above {mse} at {m:?}", best.mse);
        }
        let op = build_operator(&fresh, Method::Glct(v), &best.params).unwrap();
        assert!((mse_closed_form(&op, &best.filter, &model).unwrap() - best.mse).abs() < 1e-10);
    }
}

#[test]
fn joint_search_matches_separate_searches() {
    let (f, model) = setup(8, 5, 0.5);
    let models: Vec<_> = [0.5, 0.6, 0.7].iter().map(|&s| model.with_noise(s).unwrap()).collect();
    let joint = grid_search_models(&f, Variant::LapCddhfs, &models, &small_grid()).unwrap();
    for (m, opt) in models.iter().zip(&joint.optima) {
        let single = grid_search(&f, Variant::LapCddhfs, m, &small_grid()).unwrap();
        assert_eq!(single.params, opt.params);
        assert_eq!(single.mse, opt.mse);
    }
    assert!(joint.optima.windows(2).all(|w| w[0].mse <= w[1].mse));
}

#[test]
fn adam_improves_on_start_and_baseline_and_repeats() {
    let (f, model) = setup(8, 2, 0.6);
    let data = snapshots(&model, 3, 4);
    for method in Method::ALL {
        let mut cfg = TrainConfig { max_iters: 150, seed: 9, ..TrainConfig::default() };
        if method == Method::Glct(Variant::LapCmcccm) {
            cfg.grad_mode = GradMode::AnalyticLapCmcccm;
        }
        let a = adam_train(&f, method, &data, &cfg).unwrap();
        assert!(a.loss <= a.initial_loss, "{method}");
        assert!(a.loss <= a.baseline_loss, "{method}");
        let recomputed = training_loss(&f, method, &a.params, &data).unwrap();
        assert!((recomputed - a.loss).abs() < 1e-10 * (1.0 + a.loss), "{method}");
        let b = adam_train(&f, method, &data, &cfg).unwrap();
        assert_eq!(a.loss_trace(), b.loss_trace(), "{method}");
        assert_eq!(a.params, b.params);
    }
}

#[test]
fn wiener_filter_is_never_worse_than_trained_filter_at_same_transform() {
    let (f, model) = setup(8, 3, 0.5);
    let data = snapshots(&model, 4, 8);
    for v in Variant::ALL {
        let cfg = TrainConfig { max_iters: 100, seed: 1, ..TrainConfig::default() };
        let state = adam_train(&f, Method::Glct(v), &data, &cfg).unwrap();
        let op = build_operator(&f, Method::Glct(v), &state.params.transform).unwrap();
        let sys = assemble_wiener_hopf(&build_rank_one_ops(&op), &model).unwrap();
        let wiener = sys.mse(&solve_filter(&sys, 0.0).unwrap().filter).unwrap();
        let trained = mse_closed_form(&op, &state.params.filter(), &model).unwrap();
        assert!(wiener <= trained + 1e-9, "{v}: {wiener} > {trained}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 16, ..ProptestConfig::default() })]

    #[test]
    fn analytic_gradient_matches_loss_differences(
        a in -1.5f64..1.5, b in 0.3f64..1.5, d in -1.5f64..1.5,
        hr in prop::collection::vec(-1.0f64..1.0, 6), hi in prop::collection::vec(-1.0f64..1.0, 6), seed in 0u64..100,
    ) {
        let (f, model) = setup(6, seed, 0.5);
        let data = snapshots(&model, 2, seed);
        let method = Method::Glct(Variant::LapCmcccm);
        let m = LctParams::from_abd(a, b, d).unwrap();
        let p = TrainParams { transform: TransformParams::Lct(m), h: DVector::from_fn(6, |i, _| Complex::new(hr[i], hi[i])) };
        let (_, g) = loss_and_gradient(&f, method, &p, &data, GradMode::AnalyticLapCmcccm, 1e-5, 0.1).unwrap();
        let theta = p.to_vec();
        let eps = 1e-6;
        for j in 0..theta.len() {
            let mut up = theta.clone();
            let mut dn = theta.clone();
            up[j] += eps;
            dn[j] -= eps;
            let lu = training_loss(&f, method, &TrainParams::from_vec(method, &up).unwrap(), &data).unwrap();
            let ld = training_loss(&f, method, &TrainParams::from_vec(method, &dn).unwrap(), &data).unwrap();
            let fd = (lu - ld) / (2.0 * eps);
            let tol = if j < 3 { 1e-4 } else { 1e-6 };
            prop_assert!((g[j] - fd).abs() <= tol * fd.abs().max(1.0), "coordinate {}: {} vs {}", j, g[j], fd);
        }
    }
}
