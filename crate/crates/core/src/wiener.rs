//! Transform-domain Wiener filtering.
//!
//! The estimator is `f̂ = F_inv·diag(h)·F·f̃ = Σ_i h_i W_i f̃` with rank-one
//! `W_i = w_i·w̃_iᵀ` (column `i` of `F_inv` times row `i` of `F`). For the
//! observation `f̃ = G·f + n`, `n ~ 𝒩(0, s²I)` independent of `f`:
//!
//! ```text
//! T_ij = tr(W_iᴴ W_j C_f̃),   q_i = tr(W_iᴴ C_ff̃)
//! C_f̃  = G C_f Gᴴ + s²I,     C_ff̃ = C_f Gᴴ
//! MSE(h) = hᴴ T h − 2 Re(hᴴ q) + tr(C_f)
//! ```
//!
//! Because every `W_i` is an outer product the traces factor as
//! `T_ij = (F_invᴴ F_inv)_ij · (F C_f̃ Fᴴ)_ji` and `q_i = (F_invᴴ C_ff̃ Fᴴ)_ii`,
//! which keeps assembly at `O(N³)`.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, GlctError, Result};
use crate::graph::SignalCovariance;
use crate::io::{matrix_pairs, vector_pairs};
use crate::scalar::{cabs, creal, Cplx, Real};
use crate::spectral::to_complex;
use crate::transforms::{GlctOperator, TransformPair};

/// Observation `f̃ = G·f + n` with `C_n = s²I`, `f` and `n` uncorrelated.
#[derive(Debug, Clone)]
pub struct ObservationModel<T: Real> {
    g: DMatrix<T>,
    cf: SignalCovariance<T>,
    noise_std: T,
}

impl<T: Real> ObservationModel<T> {
    pub fn new(g: DMatrix<T>, cf: SignalCovariance<T>, noise_std: T) -> Result<Self> {
        check_dim(cf.n(), g.nrows())?;
        check_dim(cf.n(), g.ncols())?;
        if !(noise_std >= T::zero()) || !noise_std.is_finite() {
            return Err(GlctError::invalid("noise standard deviation must be finite and >= 0"));
        }
        Ok(Self { g, cf, noise_std })
    }

    /// Pure additive noise, `G = I`.
    pub fn denoising(cf: SignalCovariance<T>, noise_std: T) -> Result<Self> {
        let n = cf.n();
        Self::new(DMatrix::identity(n, n), cf, noise_std)
    }

    pub fn n(&self) -> usize {
        self.cf.n()
    }

    pub fn g(&self) -> &DMatrix<T> {
        &self.g
    }

    pub fn cf(&self) -> &SignalCovariance<T> {
        &self.cf
    }

    pub fn noise_std(&self) -> T {
        self.noise_std
    }

    /// Same model with a different noise level.
    pub fn with_noise(&self, noise_std: T) -> Result<Self> {
        Self::new(self.g.clone(), self.cf.clone(), noise_std)
    }

    /// `C_f̃ = G C_f Gᴴ + s²I`.
    pub fn observed_covariance(&self) -> DMatrix<Cplx<T>> {
        let g = to_complex(&self.g);
        let n = self.n();
        let s2 = self.noise_std * self.noise_std;
        &g * self.cf.matrix() * g.adjoint() + DMatrix::from_diagonal_element(n, n, creal(s2))
    }

    /// `C_ff̃ = C_f Gᴴ`.
    pub fn cross_covariance(&self) -> DMatrix<Cplx<T>> {
        self.cf.matrix() * to_complex(&self.g).adjoint()
    }
}

/// Diagonal transform-domain filter `H = diag(h)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalFilter<T: Real> {
    h: DVector<Cplx<T>>,
}

impl<T: Real> DiagonalFilter<T> {
    pub fn new(h: DVector<Cplx<T>>) -> Result<Self> {
        if !h.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(GlctError::invalid("filter coefficients must be finite"));
        }
        Ok(Self { h })
    }

    pub fn ones(n: usize) -> Self {
        Self { h: DVector::from_element(n, creal(T::one())) }
    }

    pub fn zeros(n: usize) -> Self {
        Self { h: DVector::zeros(n) }
    }

    pub fn h(&self) -> &DVector<Cplx<T>> {
        &self.h
    }

    pub fn len(&self) -> usize {
        self.h.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h.is_empty()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({ "h": vector_pairs(&self.h) })
    }
}

/// The rank-one family `W_i`, stored as the two factor matrices.
#[derive(Debug, Clone)]
pub struct RankOneOps<T: Real> {
    columns: DMatrix<Cplx<T>>,
    rows: DMatrix<Cplx<T>>,
}

/// `W_i` for every `i` of an operator.
pub fn build_rank_one_ops<T: Real>(op: &GlctOperator<T>) -> RankOneOps<T> {
    RankOneOps { columns: op.inverse().clone(), rows: op.forward().clone() }
}

impl<T: Real> RankOneOps<T> {
    /// From explicit forward and inverse matrices.
    pub fn from_matrices(forward: DMatrix<Cplx<T>>, inverse: DMatrix<Cplx<T>>) -> Result<Self> {
        check_dim(forward.nrows(), forward.ncols())?;
        check_dim(forward.nrows(), inverse.nrows())?;
        check_dim(forward.nrows(), inverse.ncols())?;
        Ok(Self { columns: inverse, rows: forward })
    }

    pub fn from_pair(pair: &TransformPair<T>) -> Self {
        Self { columns: pair.inverse.clone(), rows: pair.forward.clone() }
    }

    pub fn len(&self) -> usize {
        self.rows.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `W_i = w_i·w̃_iᵀ`.
    pub fn matrix(&self, i: usize) -> DMatrix<Cplx<T>> {
        self.columns.column(i) * self.rows.row(i)
    }

    pub fn to_vec(&self) -> Vec<DMatrix<Cplx<T>>> {
        (0..self.len()).map(|i| self.matrix(i)).collect()
    }

    /// `Σ_i W_i = F_inv·F`.
    pub fn sum(&self) -> DMatrix<Cplx<T>> {
        &self.columns * &self.rows
    }

    pub fn inverse(&self) -> &DMatrix<Cplx<T>> {
        &self.columns
    }

    pub fn forward(&self) -> &DMatrix<Cplx<T>> {
        &self.rows
    }

    /// `Σ_i h_i W_i`.
    pub fn filter_matrix(&self, h: &DiagonalFilter<T>) -> Result<DMatrix<Cplx<T>>> {
        check_dim(self.len(), h.len())?;
        let mut scaled = self.rows.clone();
        for (i, mut row) in scaled.row_iter_mut().enumerate() {
            row *= h.h[i];
        }
        Ok(&self.columns * scaled)
    }
}

/// Wiener–Hopf system `T·h = q` plus the constant `tr(C_f)` of the MSE.
#[derive(Debug, Clone, PartialEq)]
pub struct WienerSystem<T: Real> {
    pub t: DMatrix<Cplx<T>>,
    pub q: DVector<Cplx<T>>,
    pub trace_cf: T,
}

/// Second-order statistics of an [`ObservationModel`], computed once and
/// reused across many operators.
#[derive(Debug, Clone)]
pub struct PreparedModel<T: Real> {
    observed: DMatrix<Cplx<T>>,
    cross: DMatrix<Cplx<T>>,
    trace_cf: T,
}

impl<T: Real> ObservationModel<T> {
    pub fn prepare(&self) -> PreparedModel<T> {
        PreparedModel { observed: self.observed_covariance(), cross: self.cross_covariance(), trace_cf: self.cf.trace() }
    }
}

impl<T: Real> PreparedModel<T> {
    pub fn n(&self) -> usize {
        self.observed.nrows()
    }
}

pub fn assemble_wiener_hopf<T: Real>(ops: &RankOneOps<T>, model: &ObservationModel<T>) -> Result<WienerSystem<T>> {
    assemble_prepared(ops, &model.prepare())
}

pub fn assemble_prepared<T: Real>(ops: &RankOneOps<T>, model: &PreparedModel<T>) -> Result<WienerSystem<T>> {
    check_dim(model.n(), ops.len())?;
    let a = &ops.columns;
    let b = &ops.rows;
    let gram = a.adjoint() * a;
    let bh = b.adjoint();
    let mixed = b * &model.observed * &bh;
    let cross = a.adjoint() * &model.cross * &bh;
    let n = ops.len();
    let mut t = DMatrix::from_fn(n, n, |i, j| gram[(i, j)] * mixed[(j, i)]);
    // enforce exact Hermitian symmetry against round-off
    for i in 0..n {
        t[(i, i)].im = T::zero();
        for j in 0..i {
            let avg = (t[(i, j)] + t[(j, i)].conj()) * creal(T::lit(0.5));
            t[(i, j)] = avg;
            t[(j, i)] = avg.conj();
        }
    }
    Ok(WienerSystem { t, q: cross.diagonal(), trace_cf: model.trace_cf })
}

impl<T: Real> WienerSystem<T> {
    pub fn n(&self) -> usize {
        self.q.len()
    }

    /// `hᴴ T h − 2 Re(hᴴ q) + tr(C_f)`, tiny negative round-off clamped to 0.
    pub fn mse(&self, h: &DiagonalFilter<T>) -> Result<T> {
        check_dim(self.n(), h.len())?;
        let h = h.h();
        let quad = h.dotc(&(&self.t * h)).re;
        let lin = h.dotc(&self.q).re;
        let v = quad - T::lit(2.0) * lin + self.trace_cf;
        let floor = -T::lit(1e-9) * (T::one() + self.trace_cf);
        if v < T::zero() && v >= floor {
            Ok(T::zero())
        } else {
            Ok(v)
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "T": matrix_pairs(&self.t),
            "q": vector_pairs(&self.q),
            "trace_cf": self.trace_cf.to_f64_lossy(),
        })
    }
}

/// Optimal filter and the quality of the linear solve.
#[derive(Debug, Clone)]
pub struct FilterSolution<T: Real> {
    pub filter: DiagonalFilter<T>,
    /// `‖T·h − q‖₂`.
    pub residual: T,
    /// Ridge actually added to `T`.
    pub ridge: T,
}

/// Solves `(T + ridge·I)·h = q` by Cholesky factorization. If the
/// factorization fails, retries once with `ridge = 1e-10·tr(T)/n`.
pub fn solve_filter<T: Real>(sys: &WienerSystem<T>, ridge: T) -> Result<FilterSolution<T>> {
    if !(ridge >= T::zero()) {
        return Err(GlctError::invalid("ridge must be >= 0"));
    }
    let n = sys.n();
    if n == 0 {
        return Ok(FilterSolution { filter: DiagonalFilter::zeros(0), residual: T::zero(), ridge });
    }
    let trace_t = sys.t.diagonal().iter().fold(T::zero(), |s, z| s + z.re);
    let fallback = T::lit(1e-10) * trace_t / T::from_usize_lossy(n);
    for r in [ridge, ridge.max(fallback)] {
        let shifted = &sys.t + DMatrix::from_diagonal_element(n, n, creal(r));
        // complex square roots never fail, so definiteness is read off the factor's diagonal
        let chol = shifted.cholesky().filter(|c| {
            c.l_dirty().diagonal().iter().all(|z| z.re > T::zero() && z.im.abs() <= T::default_epsilon() * z.re)
        });
        if let Some(chol) = chol {
            let h = chol.solve(&sys.q);
            if h.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
                let residual = (&sys.t * &h - &sys.q).norm();
                return Ok(FilterSolution { filter: DiagonalFilter { h }, residual, ridge: r });
            }
        }
    }
    Err(GlctError::numerical("Wiener-Hopf matrix is not positive definite"))
}

/// Closed-form MSE of `op` with filter `h` under `model`.
pub fn mse_closed_form<T: Real>(op: &GlctOperator<T>, h: &DiagonalFilter<T>, model: &ObservationModel<T>) -> Result<T> {
    assemble_wiener_hopf(&build_rank_one_ops(op), model)?.mse(h)
}

/// Sample mean of the squared error and its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
}

/// Draws `(f, f̃)` pairs with `f ~ 𝒩(0, C_f)` and `n ~ 𝒩(0, s²I)`.
///
/// `f` is generated as `V·√Λ·z` from the Hermitian eigendecomposition of
/// `C_f` with real standard normal `z`.
#[derive(Debug, Clone)]
pub struct ObservationSampler<T: Real> {
    factor: DMatrix<Cplx<T>>,
    g: DMatrix<Cplx<T>>,
    noise_std: T,
    rng: ChaCha8Rng,
}

impl<T: Real> ObservationSampler<T> {
    pub fn new(model: &ObservationModel<T>, seed: u64) -> Result<Self> {
        let eig = model.cf().matrix().clone().symmetric_eigen();
        let scale = T::one() + eig.eigenvalues.amax();
        let mut factor = eig.eigenvectors;
        for (j, mut col) in factor.column_iter_mut().enumerate() {
            let l = eig.eigenvalues[j];
            if l < -T::lit(1e-10) * scale {
                return Err(GlctError::invalid("covariance is not positive semidefinite"));
            }
            col *= creal(l.max(T::zero()).sqrt());
        }
        Ok(Self { factor, g: to_complex(model.g()), noise_std: model.noise_std(), rng: ChaCha8Rng::seed_from_u64(seed) })
    }

    /// Returns `(f, f̃)`.
    pub fn draw(&mut self) -> (DVector<Cplx<T>>, DVector<Cplx<T>>) {
        let n = self.factor.nrows();
        let mut normal = || T::lit(StandardNormal.sample(&mut self.rng));
        let z = DVector::from_fn(n, |_, _| creal(normal()));
        let f = &self.factor * z;
        let noise = DVector::from_fn(n, |_, _| creal(self.noise_std * normal()));
        let observed = &self.g * &f + noise;
        (f, observed)
    }
}

/// Monte-Carlo estimate of `E‖F_inv·H·F·f̃ − f‖²`.
pub fn mse_monte_carlo<T: Real>(
    op: &GlctOperator<T>,
    h: &DiagonalFilter<T>,
    model: &ObservationModel<T>,
    samples: usize,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    if samples == 0 {
        return Err(GlctError::invalid("samples must be >= 1"));
    }
    check_dim(model.n(), op.n())?;
    let est = build_rank_one_ops(op).filter_matrix(h)?;
    let mut sampler = ObservationSampler::new(model, seed)?;
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..samples {
        let (f, observed) = sampler.draw();
        let err = (&est * observed - f).norm_squared().to_f64_lossy();
        sum += err;
        sum_sq += err * err;
    }
    let k = samples as f64;
    let mean = sum / k;
    let var = if samples > 1 { ((sum_sq - k * mean * mean) / (k - 1.0)).max(0.0) } else { 0.0 };
    Ok(MonteCarloEstimate { mean, std_error: (var / k).sqrt(), samples })
}

/// Largest `|T_ij − conj(T_ji)|`.
pub fn hermitian_deviation<T: Real>(t: &DMatrix<Cplx<T>>) -> T {
    let mut worst = T::zero();
    for i in 0..t.nrows() {
        for j in 0..t.ncols() {
            worst = worst.max(cabs(t[(i, j)] - t[(j, i)].conj()));
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_random_knn_graph, synthetic_autocorrelation, Graph, Weighting};
    use crate::lct::LctParams;
    use crate::transforms::{Basis, FactoryConfig, TransformFactory, Variant};

    type C = Cplx<f64>;

    fn scalar_setup() -> (GlctOperator<f64>, ObservationModel<f64>) {
        let g = Graph::from_adjacency(DMatrix::zeros(1, 1), None).unwrap();
        let f = TransformFactory::new(&g, FactoryConfig::default()).unwrap();
        let op = f.glct(Variant::WadjCmcccm, &LctParams::identity()).unwrap();
        let model = ObservationModel::denoising(SignalCovariance::identity(1), 1.0).unwrap();
        (op, model)
    }

    /// `T_ij = tr(W_iᴴ W_j C)` and `q_i = tr(W_iᴴ C')` evaluated literally.
    fn brute_force(ops: &RankOneOps<f64>, model: &ObservationModel<f64>) -> (DMatrix<C>, DVector<C>) {
        let w = ops.to_vec();
        let cft = model.observed_covariance();
        let cx = model.cross_covariance();
        let n = w.len();
        let t = DMatrix::from_fn(n, n, |i, j| (w[i].adjoint() * &w[j] * &cft).trace());
        let q = DVector::from_fn(n, |i, _| (w[i].adjoint() * &cx).trace());
        (t, q)
    }

    fn random_instance(seed: u64, variant: Variant) -> (GlctOperator<f64>, ObservationModel<f64>) {
        let g: Graph<f64> = build_random_knn_graph(8, 3, seed, Weighting::default()).unwrap();
        let f = TransformFactory::new(&g, FactoryConfig::default()).unwrap();
        let op = f.glct(variant, &LctParams::from_abd(0.8, 1.1, 0.6).unwrap()).unwrap();
        let model = ObservationModel::denoising(synthetic_autocorrelation(&g), 0.7).unwrap();
        (op, model)
    }

    #[test]
    fn identity_operator_gives_unit_rank_one_ops() {
        let g: Graph<f64> = build_random_knn_graph(5, 2, 1, Weighting::default()).unwrap();
        let f = TransformFactory::new(&g, FactoryConfig::default()).unwrap();
        let op = f.glct(Variant::LapCmcccm, &LctParams::identity()).unwrap();
        let ops = build_rank_one_ops(&op);
        for (i, w) in ops.to_vec().iter().enumerate() {
            let mut e = DMatrix::<C>::zeros(5, 5);
            e[(i, i)] = creal(1.0);
            assert!((w - e).norm() < 1e-10);
        }
    }

    #[test]
    fn rank_one_sum_is_round_trip() {
        let (op, _) = random_instance(3, Variant::LapCddhfs);
        let ops = build_rank_one_ops(&op);
        let total = ops.to_vec().into_iter().fold(DMatrix::<C>::zeros(8, 8), |a, w| a + w);
        assert!((total - op.inverse() * op.forward()).norm() < 1e-10);
        assert!((ops.sum() - op.inverse() * op.forward()).norm() < 1e-10);
    }

    #[test]
    fn p2_gft_first_rank_one_op() {
        let w = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let g = Graph::from_adjacency(w, None).unwrap();
        let f = TransformFactory::new(&g, FactoryConfig::default()).unwrap();
        let u = f.spectra().basis(Basis::Laplacian);
        let ops = RankOneOps::from_matrices(u.gft_matrix(), u.gft_matrix().transpose()).unwrap();
        assert!(ops.matrix(0).iter().all(|z| (z - creal(0.5)).norm() < 1e-12));
    }

    #[test]
    fn scalar_system() {
        let (op, model) = scalar_setup();
        let sys = assemble_wiener_hopf(&build_rank_one_ops(&op), &model).unwrap();
        assert!((sys.t[(0, 0)] - creal(2.0)).norm() < 1e-12);
        assert!((sys.q[0] - creal(1.0)).norm() < 1e-12);
        let sol = solve_filter(&sys, 0.0).unwrap();
        assert!((sol.filter.h()[0] - creal(0.5)).norm() < 1e-12);
        assert!((mse_closed_form(&op, &sol.filter, &model).unwrap() - 0.5).abs() < 1e-12);
        assert!((mse_closed_form(&op, &DiagonalFilter::zeros(1), &model).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn factored_assembly_matches_trace_formula() {
        for v in Variant::ALL {
            let (op, model) = random_instance(11, v);
            let ops = build_rank_one_ops(&op);
            let sys = assemble_wiener_hopf(&ops, &model).unwrap();
            let (t, q) = brute_force(&ops, &model);
            assert!((&sys.t - t).norm() < 1e-10 * (1.0 + sys.t.norm()), "{v}");
            assert!((&sys.q - q).norm() < 1e-10 * (1.0 + sys.q.norm()), "{v}");
            assert!(hermitian_deviation(&sys.t) < 1e-8);
            let eig = sys.t.clone().symmetric_eigen();
            assert!(eig.eigenvalues.iter().all(|&l| l > -1e-8));
        }
    }

    #[test]
    fn noiseless_unitary_system_has_q_equal_diag_t() {
        let (op, model) = random_instance(5, Variant::WadjCmcccm);
        let model = model.with_noise(0.0).unwrap();
        let sys = assemble_wiener_hopf(&build_rank_one_ops(&op), &model).unwrap();
        for i in 0..8 {
            let row_sum: C = (0..8).map(|j| sys.t[(i, j)]).sum();
            assert!((row_sum - sys.q[i]).norm() < 1e-10);
        }
        let sol = solve_filter(&sys, 0.0).unwrap();
        assert!(sol.filter.h().iter().all(|z| (z - creal(1.0)).norm() < 1e-8));
        assert!(sys.mse(&sol.filter).unwrap() < 1e-8);
    }

    #[test]
    fn identity_transform_diagonal_covariance_gives_diagonal_t() {
        let g: Graph<f64> = build_random_knn_graph(6, 2, 2, Weighting::default()).unwrap();
        let f = TransformFactory::new(&g, FactoryConfig::default()).unwrap();
        let op = f.glct(Variant::WadjCddhfs, &LctParams::identity()).unwrap();
        let cf = SignalCovariance::from_real(&DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]))).unwrap();
        let model = ObservationModel::denoising(cf, 0.5).unwrap();
        let sys = assemble_wiener_hopf(&build_rank_one_ops(&op), &model).unwrap();
        for i in 0..6 {
            for j in 0..6 {
                if i != j {
                    assert!(sys.t[(i, j)].norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn solve_rejects_indefinite_system() {
        let sys = WienerSystem {
            t: DMatrix::from_row_slice(2, 2, &[creal(1.0), creal(0.0), creal(0.0), creal(-1.0)]),
            q: DVector::from_element(2, creal(1.0)),
            trace_cf: 1.0,
        };
        assert!(matches!(solve_filter(&sys, 0.0), Err(GlctError::NumericalFailure(_))));
        assert!(solve_filter(&sys, -1.0).is_err());
    }

    #[test]
    fn monte_carlo_scalar_case() {
        let (op, model) = scalar_setup();
        let h = DiagonalFilter::new(DVector::from_element(1, creal(0.5))).unwrap();
        let est = mse_monte_carlo(&op, &h, &model, 1_000_000, 1).unwrap();
        assert!((est.mean - 0.5).abs() < 0.01);
        let again = mse_monte_carlo(&op, &h, &model, 1_000_000, 1).unwrap();
        assert_eq!(est, again);
    }

    #[test]
    fn monte_carlo_noiseless_identity_recovery() {
        let (op, model) = random_instance(7, Variant::LapCmcccm);
        let model = model.with_noise(0.0).unwrap();
        let est = mse_monte_carlo(&op, &DiagonalFilter::ones(8), &model, 200, 3).unwrap();
        assert!(est.mean < 1e-10);
    }

    #[test]
    fn monte_carlo_rejects_zero_samples() {
        let (op, model) = scalar_setup();
        assert!(mse_monte_carlo(&op, &DiagonalFilter::ones(1), &model, 0, 0).is_err());
    }

    #[test]
    fn observation_model_validation() {
        assert!(ObservationModel::denoising(SignalCovariance::<f64>::identity(2), -1.0).is_err());
        assert!(ObservationModel::new(DMatrix::identity(3, 3), SignalCovariance::<f64>::identity(2), 1.0).is_err());
    }

    #[test]
    fn json_export_uses_pairs() {
        let (op, model) = scalar_setup();
        let sys = assemble_wiener_hopf(&build_rank_one_ops(&op), &model).unwrap();
        let j = sys.to_json();
        assert_eq!(j["q"][0][0].as_f64(), Some(1.0));
        assert_eq!(j["T"][0][0][1].as_f64(), Some(0.0));
    }
}
