//! Wiener filter checked against formulas that bypass the factorized
//! `T`/`q` assembly.

use glct_core::graph::{build_random_knn_graph, synthetic_autocorrelation, SignalCovariance, Weighting};
use glct_core::lct::LctParams;
use glct_core::transforms::{FactoryConfig, TransformFactory};
use glct_core::wiener::{
    assemble_wiener_hopf, build_rank_one_ops, mse_closed_form, mse_monte_carlo, solve_filter, DiagonalFilter,
    ObservationModel, ObservationSampler,
};
use glct_core::{Basis, GlctOperator64, Variant};
use nalgebra::{Complex, DMatrix, DVector};

type C = Complex<f64>;

fn factory(n: usize, seed: u64) -> (TransformFactory<f64>, SignalCovariance<f64>) {
    let g = build_random_knn_graph(n, 3, seed, Weighting::default()).unwrap();
    let cf = synthetic_autocorrelation(&g);
    (TransformFactory::new(&g, FactoryConfig::default()).unwrap(), cf)
}

/// `E‖W f̃ − f‖²` with `W = F⁻¹ diag(h) F` and `f̃ = f + noise`, expanded term by term.
fn direct_mse(op: &GlctOperator64, h: &DVector<C>, cf: &DMatrix<C>, s: f64) -> f64 {
    let n = h.len();
    let w = op.inverse() * DMatrix::from_diagonal(h) * op.forward();
    let cobs = cf + DMatrix::<C>::identity(n, n) * C::new(s * s, 0.0);
    let quad = (&w * cobs * w.adjoint()).trace().re;
    let cross = (&w * cf).trace().re;
    quad - 2.0 * cross + cf.trace().re
}

fn random_h(n: usize, seed: u64) -> DVector<C> {
    let mut x = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) | 1;
    let mut next = move || {
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        (x >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    DVector::from_fn(n, |_, _| C::new(next(), next()))
}

#[test]
fn quadratic_form_matches_direct_expansion() {
    let (f, cf) = factory(9, 4);
    let model = ObservationModel::denoising(cf.clone(), 0.7).unwrap();
    let m = LctParams::from_abd(0.4, 1.3, -0.6).unwrap();
    for v in Variant::ALL {
        let op = f.glct(v, &m).unwrap();
        for seed in 0..5 {
            let h = random_h(9, seed);
            let got = mse_closed_form(&op, &DiagonalFilter::new(h.clone()).unwrap(), &model).unwrap();
            let want = direct_mse(&op, &h, cf.matrix(), 0.7);
            assert!((got - want).abs() < 1e-10 * (1.0 + want.abs()), "{v}: {got} vs {want}");
        }
    }
}

#[test]
fn solution_is_stationary_for_direct_expansion() {
    let (f, cf) = factory(8, 11);
    let s = 0.5;
    let model = ObservationModel::denoising(cf.clone(), s).unwrap();
    let m = LctParams::from_abd(-0.8, 0.9, 0.3).unwrap();
    for v in Variant::ALL {
        let op = f.glct(v, &m).unwrap();
        let sys = assemble_wiener_hopf(&build_rank_one_ops(&op), &model).unwrap();
        let h = solve_filter(&sys, 0.0).unwrap().filter.h().clone();
        let eps = 1e-5;
        for i in 0..8 {
            for dir in [C::new(1.0, 0.0), C::new(0.0, 1.0)] {
                let mut up = h.clone();
                let mut dn = h.clone();
                up[i] += dir * eps;
                dn[i] -= dir * eps;
                let g = (direct_mse(&op, &up, cf.matrix(), s) - direct_mse(&op, &dn, cf.matrix(), s)) / (2.0 * eps);
                assert!(g.abs() < 1e-6, "{v} coordinate {i}: slope {g}");
            }
        }
    }
}

#[test]
fn identity_transform_gives_per_vertex_shrinkage() {
    // with F = I the filter acts vertex by vertex, so h_i = C_ii / (C_ii + s²)
    let (f, cf) = factory(10, 2);
    let s = 0.6;
    let model = ObservationModel::denoising(cf.clone(), s).unwrap();
    for v in Variant::ALL {
        let op = f.glct(v, &LctParams::identity()).unwrap();
        let sys = assemble_wiener_hopf(&build_rank_one_ops(&op), &model).unwrap();
        let sol = solve_filter(&sys, 0.0).unwrap();
        let mut want_mse = 0.0;
        for i in 0..10 {
            let c = cf.matrix()[(i, i)].re;
            let want = c / (c + s * s);
            assert!((sol.filter.h()[i] - C::new(want, 0.0)).norm() < 1e-9, "{v} {i}");
            want_mse += c * s * s / (c + s * s);
        }
        assert!((sys.mse(&sol.filter).unwrap() - want_mse).abs() < 1e-9);
    }
}

#[test]
fn diagonalizing_transform_gives_spectral_shrinkage() {
    // covariance diagonal in the graph Fourier basis: h_i = c_i / (c_i + s²)
    let (f, _) = factory(10, 8);
    let op = f.gfrft(Basis::Laplacian, 1.0).unwrap();
    let spectrum: Vec<f64> = (0..10).map(|i| 1.0 / (1.0 + i as f64)).collect();
    let fm = op.forward();
    let cf = fm.adjoint() * DMatrix::from_diagonal(&DVector::from_iterator(10, spectrum.iter().map(|&c| C::new(c, 0.0)))) * fm;
    let cf = (&cf + cf.adjoint()) * C::new(0.5, 0.0);
    let s = 0.8;
    let model = ObservationModel::denoising(SignalCovariance::new(cf).unwrap(), s).unwrap();
    let sys = assemble_wiener_hopf(&build_rank_one_ops(&op), &model).unwrap();
    let h = solve_filter(&sys, 0.0).unwrap().filter;
    for (i, &c) in spectrum.iter().enumerate() {
        assert!((h.h()[i] - C::new(c / (c + s * s), 0.0)).norm() < 1e-9, "{i}: {}", h.h()[i]);
    }
    let want: f64 = spectrum.iter().map(|&c| c * s * s / (c + s * s)).sum();
    assert!((sys.mse(&h).unwrap() - want).abs() < 1e-9);
}

#[test]
fn least_squares_fit_over_draws_approaches_solution() {
    let (f, cf) = factory(6, 21);
    let model = ObservationModel::denoising(cf, 0.5).unwrap();
    let op = f.glct(Variant::LapCddhfs, &LctParams::from_abd(0.6, 1.1, 0.2).unwrap()).unwrap();
    let sys = assemble_wiener_hopf(&build_rank_one_ops(&op), &model).unwrap();
    let h = solve_filter(&sys, 0.0).unwrap().filter;

    // F⁻¹ diag(h) F f̃ = F⁻¹ diag(F f̃) h, so h enters linearly
    let mut sampler = ObservationSampler::new(&model, 5).unwrap();
    let mut gram = DMatrix::<C>::zeros(6, 6);
    let mut rhs = DVector::<C>::zeros(6);
    for _ in 0..40_000 {
        let (clean, observed) = sampler.draw();
        let a = op.inverse() * DMatrix::from_diagonal(&(op.forward() * observed));
        gram += a.adjoint() * &a;
        rhs += a.adjoint() * clean;
    }
    let fit = gram.lu().solve(&rhs).unwrap();
    let err = (&fit - h.h()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    assert!(err < 5e-2, "max entry error {err}");
}

#[test]
fn monte_carlo_agrees_with_closed_form() {
    let (f, cf) = factory(8, 3);
    let model = ObservationModel::denoising(cf, 0.6).unwrap();
    let op = f.glct(Variant::WadjCmcccm, &LctParams::from_abd(1.2, 0.7, 0.4).unwrap()).unwrap();
    let h = DiagonalFilter::new(random_h(8, 9)).unwrap();
    let exact = mse_closed_form(&op, &h, &model).unwrap();
    let mc = mse_monte_carlo(&op, &h, &model, 20_000, 17).unwrap();
    assert!((mc.mean - exact).abs() < 3.0 * mc.std_error, "{} ± {} vs {exact}", mc.mean, mc.std_error);
}
