//! Parameter selection for transform-domain Wiener filtering.
//!
//! Two strategies are provided:
//!
//! * [`grid_search`]: exhaustive evaluation of the closed-form MSE over a grid
//!   of `(a, b, d)` (or fractional orders), solving the Wiener–Hopf system at
//!   every point;
//! * [`adam_train`]: joint first-order training of `(a, b, d)` and the filter
//!   `h` on snapshot pairs, minimizing the empirical squared error.

use std::cmp::Ordering;
use std::io::Write;
use std::time::{Duration, Instant};

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, GlctError, Result};
use crate::lct::{LctParams, DEFAULT_B_MIN};
use crate::scalar::{cplx, creal, Cplx, Real};
use crate::spectral::OpCounts;
use crate::transforms::{Basis, GlctOperator, Method, TransformFactory, TransformPair, Variant};
use crate::wiener::{assemble_prepared, solve_filter, DiagonalFilter, ObservationModel, RankOneOps};

// ---------------------------------------------------------------------------
// Grids

/// Cartesian `(a, b, d)` grid plus optional extra points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec<T> {
    pub a: Vec<T>,
    pub b: Vec<T>,
    pub d: Vec<T>,
    /// Points searched in addition to the cartesian product.
    #[serde(default)]
    pub extra: Vec<LctParams<T>>,
}

fn tenths<T: Real>(from: usize, to: usize) -> Vec<T> {
    (from..=to).map(|k| T::from_usize_lossy(k) / T::lit(10.0)).collect()
}

/// Fractional orders `0, 0.1, …, 2`.
pub fn default_alpha_grid<T: Real>() -> Vec<T> {
    tenths(0, 20)
}

impl<T: Real> GridSpec<T> {
    pub fn new(a: Vec<T>, b: Vec<T>, d: Vec<T>) -> Result<Self> {
        let g = Self { a, b, d, extra: Vec::new() };
        if g.a.is_empty() || g.b.is_empty() || g.d.is_empty() {
            return Err(GlctError::invalid("grid axes must be nonempty"));
        }
        if !g.a.iter().chain(&g.b).chain(&g.d).all(|v| v.is_finite()) {
            return Err(GlctError::invalid("grid values must be finite"));
        }
        Ok(g)
    }

    /// `a, d ∈ {0, 0.1, …, 2}`, `b ∈ {0.1, …, 2}`.
    pub fn standard() -> Self {
        Self { a: tenths(0, 20), b: tenths(1, 20), d: tenths(0, 20), extra: Vec::new() }
    }

    /// `count` values per axis, `0.1, 0.2, …`.
    pub fn cube(count: usize) -> Self {
        Self { a: tenths(1, count), b: tenths(1, count), d: tenths(1, count), extra: Vec::new() }
    }

    /// Appends the rotation matrices `(cos, sin; −sin, cos)(απ/2)`, the
    /// parameter points at which a GLCT reduces to a fractional Fourier transform.
    pub fn with_rotations(mut self, alphas: &[T]) -> Self {
        self.extra.extend(alphas.iter().map(|&a| LctParams::rotation(a)));
        self
    }

    pub fn validate(&self, b_min: T) -> Result<()> {
        if self.a.is_empty() || self.b.is_empty() || self.d.is_empty() {
            return Err(GlctError::invalid("grid axes must be nonempty"));
        }
        if let Some(b) = self.b.iter().find(|b| !(b.abs() >= b_min)) {
            return Err(GlctError::invalid(format!("grid value b = {b} is below b_min = {b_min}")));
        }
        Ok(())
    }

    /// Number of cartesian points, `n_a·n_b·n_d`.
    pub fn cube_len(&self) -> usize {
        self.a.len() * self.b.len() * self.d.len()
    }

    pub fn len(&self) -> usize {
        self.cube_len() + self.extra.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All points in lexicographic `(a, b, d)` order, `c = (ad − 1)/b`.
    pub fn points(&self) -> Vec<LctParams<T>> {
        let mut pts = Vec::with_capacity(self.len());
        for &a in &self.a {
            for &b in &self.b {
                for &d in &self.d {
                    pts.push(LctParams { a, b, c: (a * d - T::one()) / b, d });
                }
            }
        }
        pts.extend(self.extra.iter().copied());
        pts.sort_by(lex_cmp);
        pts
    }
}

fn lex_cmp<T: Real>(x: &LctParams<T>, y: &LctParams<T>) -> Ordering {
    let c = |p: T, q: T| p.partial_cmp(&q).unwrap_or(Ordering::Equal);
    c(x.a, y.a).then(c(x.b, y.b)).then(c(x.d, y.d)).then(c(x.c, y.c))
}

/// Transform coordinates of a candidate or trained point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransformParams<T> {
    Lct(LctParams<T>),
    Order(T),
}

impl<T: Real> TransformParams<T> {
    /// The equivalent parameter matrix (a rotation for fractional orders).
    pub fn matrix(&self) -> LctParams<T> {
        match *self {
            TransformParams::Lct(m) => m,
            TransformParams::Order(alpha) => LctParams::rotation(alpha),
        }
    }

    pub fn order(&self) -> Option<T> {
        match *self {
            TransformParams::Order(a) => Some(a),
            TransformParams::Lct(_) => None,
        }
    }

    fn identity_for(method: Method) -> Self {
        match method {
            Method::Glct(_) => TransformParams::Lct(LctParams::identity()),
            Method::Gfrft(_) => TransformParams::Order(T::zero()),
        }
    }
}

/// Builds the operator of `method` at `params` with full diagnostics.
pub fn build_operator<T: Real>(f: &TransformFactory<T>, method: Method, params: &TransformParams<T>) -> Result<GlctOperator<T>> {
    match (method, params) {
        (Method::Glct(v), TransformParams::Lct(m)) => f.glct(v, m),
        (Method::Gfrft(b), TransformParams::Order(a)) => f.gfrft(b, *a),
        _ => Err(GlctError::invalid(format!("parameters do not match method {method}"))),
    }
}

fn build_pair<T: Real>(f: &TransformFactory<T>, method: Method, params: &TransformParams<T>) -> Result<TransformPair<T>> {
    match (method, params) {
        (Method::Glct(v), TransformParams::Lct(m)) => f.pair(v, m),
        (Method::Gfrft(b), TransformParams::Order(a)) => f.gfrft_pair(b, *a),
        _ => Err(GlctError::invalid(format!("parameters do not match method {method}"))),
    }
}

// ---------------------------------------------------------------------------
// Grid search

/// MSE of one searched point under each observation model; `None` where the
/// operator or the filter could not be built.
#[derive(Debug, Clone)]
pub struct GridPoint<T: Real> {
    pub params: TransformParams<T>,
    pub mse: Vec<Option<T>>,
    pub error: Option<String>,
}

/// Minimizer of the closed-form MSE with its Wiener filter.
#[derive(Debug, Clone)]
pub struct GridOptimum<T: Real> {
    pub method: Method,
    pub params: TransformParams<T>,
    pub filter: DiagonalFilter<T>,
    pub mse: T,
    pub solve_residual: T,
}

#[derive(Debug, Clone)]
pub struct GridSearchOutcome<T: Real> {
    pub method: Method,
    pub points: Vec<GridPoint<T>>,
    /// One optimum per observation model, in input order.
    pub optima: Vec<GridOptimum<T>>,
    /// Points at which the operator was constructed.
    pub evaluations: usize,
    pub failures: usize,
    pub op_counts: OpCounts,
    pub elapsed: Duration,
}

fn search<T: Real>(
    f: &TransformFactory<T>,
    method: Method,
    candidates: Vec<TransformParams<T>>,
    models: &[ObservationModel<T>],
) -> Result<GridSearchOutcome<T>> {
    if models.is_empty() {
        return Err(GlctError::invalid("at least one observation model is required"));
    }
    for m in models {
        check_dim(f.n(), m.n())?;
    }
    let prepared: Vec<_> = models.iter().map(ObservationModel::prepare).collect();
    let start = Instant::now();
    let before = f.op_counts();
    let evaluated: Vec<(GridPoint<T>, Vec<Option<(DiagonalFilter<T>, T)>>)> = candidates
        .into_par_iter()
        .map(|params| match build_operator(f, method, &params) {
            Err(e) => (GridPoint { params, mse: vec![None; prepared.len()], error: Some(e.to_string()) }, Vec::new()),
            Ok(op) => {
                let ops = RankOneOps::from_matrices(op.forward().clone(), op.inverse().clone()).expect("square operator");
                let mut mse = Vec::with_capacity(prepared.len());
                let mut sols = Vec::with_capacity(prepared.len());
                for pm in &prepared {
                    let solved = assemble_prepared(&ops, pm)
                        .and_then(|sys| solve_filter(&sys, T::zero()).and_then(|s| Ok((sys.mse(&s.filter)?, s))));
                    match solved {
                        Ok((v, s)) if v.is_finite() => {
                            mse.push(Some(v));
                            sols.push(Some((s.filter, s.residual)));
                        }
                        _ => {
                            mse.push(None);
                            sols.push(None);
                        }
                    }
                }
                (GridPoint { params, mse, error: None }, sols)
            }
        })
        .collect();

    let mut optima = Vec::with_capacity(prepared.len());
    for k in 0..prepared.len() {
        let mut best: Option<(usize, T)> = None;
        for (i, (pt, _)) in evaluated.iter().enumerate() {
            if let Some(v) = pt.mse[k] {
                if best.is_none_or(|(_, b)| v < b) {
                    best = Some((i, v));
                }
            }
        }
        let (i, v) = best.ok_or_else(|| GlctError::SearchFailure(format!("no admissible grid point for {method}")))?;
        let (filter, residual) = evaluated[i].1[k].clone().expect("solution stored for finite mse");
        optima.push(GridOptimum { method, params: evaluated[i].0.params, filter, mse: v, solve_residual: residual });
    }
    let failures = evaluated.iter().filter(|(p, _)| p.error.is_some()).count();
    let points: Vec<_> = evaluated.into_iter().map(|(p, _)| p).collect();
    Ok(GridSearchOutcome {
        method,
        evaluations: points.len() - failures,
        failures,
        points,
        optima,
        op_counts: f.op_counts().since(before),
        elapsed: start.elapsed(),
    })
}

/// Grid search of a GLCT variant under several observation models at once;
/// every operator is built a single time.
pub fn grid_search_models<T: Real>(
    f: &TransformFactory<T>,
    variant: Variant,
    models: &[ObservationModel<T>],
    grid: &GridSpec<T>,
) -> Result<GridSearchOutcome<T>> {
    grid.validate(f.config().b_min)?;
    let candidates = grid.points().into_iter().map(TransformParams::Lct).collect();
    search(f, Method::Glct(variant), candidates, models)
}

/// Exhaustive closed-form-MSE search over `grid`.
///
/// Ties are broken in favour of the lexicographically smallest `(a, b, d)`.
pub fn grid_search<T: Real>(
    f: &TransformFactory<T>,
    variant: Variant,
    model: &ObservationModel<T>,
    grid: &GridSpec<T>,
) -> Result<GridOptimum<T>> {
    let mut out = grid_search_models(f, variant, std::slice::from_ref(model), grid)?;
    Ok(out.optima.remove(0))
}

/// Fractional Fourier baseline searched over `alphas`, ties to the smaller order.
pub fn gfrft_search_models<T: Real>(
    f: &TransformFactory<T>,
    basis: Basis,
    models: &[ObservationModel<T>],
    alphas: &[T],
) -> Result<GridSearchOutcome<T>> {
    if alphas.is_empty() || !alphas.iter().all(|a| a.is_finite()) {
        return Err(GlctError::invalid("fractional orders must be nonempty and finite"));
    }
    let mut sorted = alphas.to_vec();
    sorted.sort_by(|x, y| x.partial_cmp(y).unwrap_or(Ordering::Equal));
    search(f, Method::Gfrft(basis), sorted.into_iter().map(TransformParams::Order).collect(), models)
}

pub fn write_grid_csv<T: Real, W: Write>(outcome: &GridSearchOutcome<T>, model: usize, out: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(out);
    wr.write_record(["a", "b", "d", "alpha", "mse"])?;
    for p in &outcome.points {
        let m = p.params.matrix();
        let alpha = p.params.order().map_or(String::new(), |a| format!("{a}"));
        let mse = p.mse.get(model).copied().flatten().map_or("NaN".to_string(), |v| format!("{v:e}"));
        wr.write_record(&[format!("{}", m.a), format!("{}", m.b), format!("{}", m.d), alpha, mse])?;
    }
    wr.flush()?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Training

/// One (noisy, clean) signal pair.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot<T: Real> {
    pub observed: DVector<Cplx<T>>,
    pub clean: DVector<Cplx<T>>,
}

impl<T: Real> Snapshot<T> {
    pub fn new(observed: DVector<Cplx<T>>, clean: DVector<Cplx<T>>) -> Result<Self> {
        check_dim(clean.len(), observed.len())?;
        Ok(Self { observed, clean })
    }

    pub fn from_real(observed: &[T], clean: &[T]) -> Result<Self> {
        let c = |v: &[T]| DVector::from_iterator(v.len(), v.iter().map(|&x| creal(x)));
        Self::new(c(observed), c(clean))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GradMode {
    /// Central differences in `(a, b, d)`; one-sided (second order) next to `b_min`.
    FiniteDifference,
    /// Closed-form chain rule; Laplacian chirp-convolution variant only.
    AnalyticLapCmcccm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitMode {
    /// Every coordinate i.i.d. `𝒩(0, 1)`, `b` redrawn until `|b| ≥ b_min`.
    StandardNormal,
    /// `(a, b, d) = (1, b_min, 1)` (order 0 for fractional transforms) and
    /// `h = 1 + 0.1·z` with complex standard normal `z`.
    NearIdentity,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig<T> {
    pub learning_rate: T,
    pub max_iters: usize,
    /// Stop when the relative loss change over 50 iterations drops below this.
    pub stop_tol: T,
    pub seed: u64,
    pub grad_mode: GradMode,
    pub fd_step: T,
    pub b_min: T,
    pub init: InitMode,
}

impl<T: Real> Default for TrainConfig<T> {
    fn default() -> Self {
        Self {
            learning_rate: T::lit(0.005),
            max_iters: 5000,
            stop_tol: T::zero(),
            seed: 0,
            grad_mode: GradMode::FiniteDifference,
            fd_step: T::lit(1e-5),
            b_min: T::lit(DEFAULT_B_MIN),
            init: InitMode::StandardNormal,
        }
    }
}

impl<T: Real> TrainConfig<T> {
    pub fn validate(&self, method: Method) -> Result<()> {
        if !(self.learning_rate > T::zero()) || self.max_iters == 0 {
            return Err(GlctError::invalid("learning_rate must be > 0 and max_iters >= 1"));
        }
        if !(self.stop_tol >= T::zero()) || !(self.fd_step > T::zero()) || !(self.b_min >= T::zero()) {
            return Err(GlctError::invalid("stop_tol, b_min must be >= 0 and fd_step > 0"));
        }
        if self.grad_mode == GradMode::AnalyticLapCmcccm && method != Method::Glct(Variant::LapCmcccm) {
            return Err(GlctError::invalid("analytic gradients are only available for lap-cmcccm"));
        }
        Ok(())
    }
}

/// Transform coordinates plus filter: the trained unknowns.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainParams<T: Real> {
    pub transform: TransformParams<T>,
    pub h: DVector<Cplx<T>>,
}

impl<T: Real> TrainParams<T> {
    /// `[a, b, d, Re h…, Im h…]` or `[α, Re h…, Im h…]`.
    pub fn to_vec(&self) -> Vec<T> {
        let mut v = match self.transform {
            TransformParams::Lct(m) => vec![m.a, m.b, m.d],
            TransformParams::Order(a) => vec![a],
        };
        v.extend(self.h.iter().map(|z| z.re));
        v.extend(self.h.iter().map(|z| z.im));
        v
    }

    pub fn from_vec(method: Method, v: &[T]) -> Result<Self> {
        let k = transform_dim(method);
        if v.len() < k || (v.len() - k) % 2 != 0 {
            return Err(GlctError::invalid("parameter vector has the wrong length"));
        }
        let n = (v.len() - k) / 2;
        let h = DVector::from_fn(n, |i, _| cplx(v[k + i], v[k + n + i]));
        let transform = match method {
            Method::Glct(_) => TransformParams::Lct(lct_from_abd(v[0], v[1], v[2])?),
            Method::Gfrft(_) => TransformParams::Order(v[0]),
        };
        Ok(Self { transform, h })
    }

    pub fn filter(&self) -> DiagonalFilter<T> {
        DiagonalFilter::new(self.h.clone()).unwrap_or_else(|_| DiagonalFilter::zeros(self.h.len()))
    }
}

fn transform_dim(method: Method) -> usize {
    match method {
        Method::Glct(_) => 3,
        Method::Gfrft(_) => 1,
    }
}

fn lct_from_abd<T: Real>(a: T, b: T, d: T) -> Result<LctParams<T>> {
    if b == T::zero() || ![a, b, d].iter().all(|v| v.is_finite()) {
        return Err(GlctError::invalid("b must be nonzero and (a, b, d) finite"));
    }
    Ok(LctParams { a, b, c: (a * d - T::one()) / b, d })
}

/// Mean over snapshots of `‖F_inv·diag(h)·F·f̃ − f‖²`.
pub fn empirical_loss<T: Real>(pair: &TransformPair<T>, h: &DVector<Cplx<T>>, data: &[Snapshot<T>]) -> Result<T> {
    Ok(loss_terms(pair, h, data, false)?.0)
}

/// Loss and its gradient in `(Re h, Im h)`.
fn loss_terms<T: Real>(
    pair: &TransformPair<T>,
    h: &DVector<Cplx<T>>,
    data: &[Snapshot<T>],
    with_grad: bool,
) -> Result<(T, Vec<T>, Vec<(DVector<Cplx<T>>, DVector<Cplx<T>>)>)> {
    if data.is_empty() {
        return Err(GlctError::invalid("at least one snapshot is required"));
    }
    let n = pair.forward.nrows();
    check_dim(n, h.len())?;
    let k = T::from_usize_lossy(data.len());
    let mut loss = T::zero();
    let mut grad = DVector::<Cplx<T>>::zeros(if with_grad { n } else { 0 });
    let mut parts = Vec::new();
    for s in data {
        check_dim(n, s.observed.len())?;
        let y = &pair.forward * &s.observed;
        let r = &pair.inverse * y.component_mul(h) - &s.clean;
        loss += r.norm_squared();
        if with_grad {
            let w = pair.inverse.adjoint() * &r;
            grad += y.map(|z| z.conj()).component_mul(&w);
            parts.push((y, r));
        }
    }
    let two = T::lit(2.0);
    let mut g = Vec::with_capacity(2 * grad.len());
    g.extend(grad.iter().map(|z| two * z.re / k));
    g.extend(grad.iter().map(|z| two * z.im / k));
    Ok((loss / k, g, parts))
}

/// Loss and gradient over `[a, b, d, Re h…, Im h…]` (or `[α, …]`).
pub fn loss_and_gradient<T: Real>(
    f: &TransformFactory<T>,
    method: Method,
    params: &TrainParams<T>,
    data: &[Snapshot<T>],
    mode: GradMode,
    fd_step: T,
    b_min: T,
) -> Result<(T, Vec<T>)> {
    let two = T::lit(2.0);
    match (mode, method, params.transform) {
        (GradMode::AnalyticLapCmcccm, Method::Glct(Variant::LapCmcccm), TransformParams::Lct(m)) => {
            let jac = f.lap_cmcccm_jacobian(&m)?;
            let (loss, g_h, parts) = loss_terms(&jac.pair, &params.h, data, true)?;
            let k = T::from_usize_lossy(data.len());
            let mut grad = Vec::with_capacity(3 + g_h.len());
            for p in 0..3 {
                let mut acc = T::zero();
                for ((y, r), s) in parts.iter().zip(data) {
                    let dy = &jac.d_forward[p] * &s.observed;
                    let dr = &jac.d_inverse[p] * y.component_mul(&params.h) + &jac.pair.inverse * dy.component_mul(&params.h);
                    acc += two * r.dotc(&dr).re;
                }
                grad.push(acc / k);
            }
            grad.extend(g_h);
            Ok((loss, grad))
        }
        (GradMode::AnalyticLapCmcccm, _, _) => {
            Err(GlctError::invalid("analytic gradients are only available for lap-cmcccm"))
        }
        (GradMode::FiniteDifference, _, _) => {
            let pair = build_pair(f, method, &params.transform)?;
            let (loss, g_h, _) = loss_terms(&pair, &params.h, data, true)?;
            let at = |tp: TransformParams<T>| -> Result<T> { empirical_loss(&build_pair(f, method, &tp)?, &params.h, data) };
            let mut grad = Vec::with_capacity(transform_dim(method) + g_h.len());
            match params.transform {
                TransformParams::Order(alpha) => {
                    let hi = at(TransformParams::Order(alpha + fd_step))?;
                    let lo = at(TransformParams::Order(alpha - fd_step))?;
                    grad.push((hi - lo) / (two * fd_step));
                }
                TransformParams::Lct(m) => {
                    let base = [m.a, m.b, m.d];
                    for p in 0..3 {
                        let shifted = |delta: T| -> Result<T> {
                            let mut v = base;
                            v[p] += delta;
                            at(TransformParams::Lct(lct_from_abd(v[0], v[1], v[2])?))
                        };
                        let crosses = p == 1 && ((m.b - fd_step).abs() < b_min || (m.b + fd_step).abs() < b_min);
                        if crosses {
                            // second-order one-sided difference pointing away from the b_min band
                            let s = if m.b >= T::zero() { T::one() } else { -T::one() };
                            let l1 = shifted(s * fd_step)?;
                            let l2 = shifted(s * two * fd_step)?;
                            grad.push(s * (T::lit(4.0) * l1 - l2 - T::lit(3.0) * loss) / (two * fd_step));
                        } else {
                            grad.push((shifted(fd_step)? - shifted(-fd_step)?) / (two * fd_step));
                        }
                    }
                }
            }
            grad.extend(g_h);
            Ok((loss, grad))
        }
    }
}

/// Gradient only; see [`loss_and_gradient`].
pub fn gradient<T: Real>(
    f: &TransformFactory<T>,
    method: Method,
    params: &TrainParams<T>,
    snapshot: &Snapshot<T>,
    mode: GradMode,
    fd_step: T,
    b_min: T,
) -> Result<Vec<T>> {
    Ok(loss_and_gradient(f, method, params, std::slice::from_ref(snapshot), mode, fd_step, b_min)?.1)
}

/// Loss of `params` on `data`.
pub fn training_loss<T: Real>(f: &TransformFactory<T>, method: Method, params: &TrainParams<T>, data: &[Snapshot<T>]) -> Result<T> {
    empirical_loss(&build_pair(f, method, &params.transform)?, &params.h, data)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "detail")]
pub enum StopReason {
    MaxIters,
    Converged,
    /// Loss or operator became unusable; the state holds the last finite iterate.
    Aborted(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry<T> {
    pub iter: usize,
    pub loss: T,
    pub a: T,
    pub b: T,
    pub d: T,
}

/// Adam first and second moments.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamMoments<T> {
    pub m: Vec<T>,
    pub v: Vec<T>,
    pub t: usize,
}

const ADAM_BETA1: f64 = 0.9;
const ADAM_BETA2: f64 = 0.999;
const ADAM_EPS: f64 = 1e-8;
const STOP_WINDOW: usize = 50;

#[derive(Debug, Clone)]
pub struct TrainState<T: Real> {
    pub method: Method,
    /// Returned parameters: the best iterate seen, or the identity baseline if
    /// that is better.
    pub params: TrainParams<T>,
    pub loss: T,
    /// Last iterate reached by the optimizer.
    pub last: TrainParams<T>,
    pub initial_loss: T,
    /// Loss of `M = I`, `h = 1`, i.e. of the unfiltered observation.
    pub baseline_loss: T,
    pub used_baseline: bool,
    pub moments: AdamMoments<T>,
    /// One entry per iteration, loss at the iterate before its update.
    pub trace: Vec<TraceEntry<T>>,
    pub stop: StopReason,
    pub iteration_ops: Vec<OpCounts>,
    pub iteration_nanos: Vec<u64>,
    pub elapsed: Duration,
}

impl<T: Real> TrainState<T> {
    pub fn iterations(&self) -> usize {
        self.trace.len()
    }

    pub fn loss_trace(&self) -> Vec<T> {
        self.trace.iter().map(|e| e.loss).collect()
    }

    /// Dense products per iteration if the same in every iteration.
    pub fn dense_per_iteration(&self) -> Option<u64> {
        let first = self.iteration_ops.first()?.dense_matmul_count;
        self.iteration_ops.iter().all(|o| o.dense_matmul_count == first).then_some(first)
    }

    pub fn write_trace_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(out);
        wr.write_record(["iter", "loss", "a", "b", "d"])?;
        for e in &self.trace {
            wr.write_record(&[e.iter.to_string(), format!("{:e}", e.loss), format!("{}", e.a), format!("{}", e.b), format!("{}", e.d)])?;
        }
        wr.flush()?;
        Ok(())
    }
}

fn initial_params<T: Real>(method: Method, n: usize, cfg: &TrainConfig<T>) -> TrainParams<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut normal = || -> T { T::lit(StandardNormal.sample(&mut rng)) };
    match cfg.init {
        InitMode::StandardNormal => {
            let transform = match method {
                Method::Glct(_) => {
                    let a = normal();
                    let mut b = normal();
                    while !(b.abs() >= cfg.b_min) {
                        b = normal();
                    }
                    let d = normal();
                    TransformParams::Lct(LctParams { a, b, c: (a * d - T::one()) / b, d })
                }
                Method::Gfrft(_) => TransformParams::Order(normal()),
            };
            let re: Vec<T> = (0..n).map(|_| normal()).collect();
            let im: Vec<T> = (0..n).map(|_| normal()).collect();
            TrainParams { transform, h: DVector::from_fn(n, |i, _| cplx(re[i], im[i])) }
        }
        InitMode::NearIdentity => {
            let transform = match method {
                Method::Glct(_) => {
                    let b = if cfg.b_min > T::zero() { cfg.b_min } else { T::lit(DEFAULT_B_MIN) };
                    TransformParams::Lct(LctParams { a: T::one(), b, c: T::zero(), d: T::one() })
                }
                Method::Gfrft(_) => TransformParams::Order(T::zero()),
            };
            let s = T::lit(0.1);
            let pert: Vec<Cplx<T>> = (0..n).map(|_| cplx(s * normal(), s * normal())).collect();
            TrainParams { transform, h: DVector::from_fn(n, |i, _| creal(T::one()) + pert[i]) }
        }
    }
}

fn trace_entry<T: Real>(iter: usize, loss: T, p: &TrainParams<T>) -> TraceEntry<T> {
    let m = p.transform.matrix();
    TraceEntry { iter, loss, a: m.a, b: m.b, d: m.d }
}

/// Joint Adam training of `(a, b, d)` (or the order) and `h`.
pub fn adam_train<T: Real>(f: &TransformFactory<T>, method: Method, data: &[Snapshot<T>], cfg: &TrainConfig<T>) -> Result<TrainState<T>> {
    let start = initial_params(method, f.n(), cfg);
    adam_train_from(f, method, data, cfg, start)
}

/// [`adam_train`] from an explicit starting point.
pub fn adam_train_from<T: Real>(
    f: &TransformFactory<T>,
    method: Method,
    data: &[Snapshot<T>],
    cfg: &TrainConfig<T>,
    start: TrainParams<T>,
) -> Result<TrainState<T>> {
    cfg.validate(method)?;
    if data.is_empty() {
        return Err(GlctError::invalid("at least one snapshot is required"));
    }
    for s in data {
        check_dim(f.n(), s.observed.len())?;
        check_dim(f.n(), s.clean.len())?;
    }
    check_dim(f.n(), start.h.len())?;
    let clock = Instant::now();
    let baseline = TrainParams { transform: TransformParams::identity_for(method), h: DVector::from_element(f.n(), creal(T::one())) };
    let k = T::from_usize_lossy(data.len());
    let baseline_loss = data.iter().fold(T::zero(), |acc, s| acc + (&s.observed - &s.clean).norm_squared()) / k;

    let (b1, b2, eps) = (T::lit(ADAM_BETA1), T::lit(ADAM_BETA2), T::lit(ADAM_EPS));
    let mut theta = start.to_vec();
    let dim = theta.len();
    let mut moments = AdamMoments { m: vec![T::zero(); dim], v: vec![T::zero(); dim], t: 0 };
    let mut current = start;
    let mut best: Option<(TrainParams<T>, T)> = None;
    let mut trace = Vec::with_capacity(cfg.max_iters);
    let mut iteration_ops = Vec::with_capacity(cfg.max_iters);
    let mut iteration_nanos = Vec::with_capacity(cfg.max_iters);
    let mut stop = StopReason::MaxIters;
    let mut pending_last = true;

    for iter in 0..cfg.max_iters {
        let t0 = Instant::now();
        let ops0 = f.op_counts();
        let (loss, grad) = match loss_and_gradient(f, method, &current, data, cfg.grad_mode, cfg.fd_step, cfg.b_min) {
            Ok((l, g)) if l.is_finite() && g.iter().all(|v| v.is_finite()) => (l, g),
            Ok(_) => {
                stop = StopReason::Aborted(format!("non-finite loss or gradient at iteration {iter}"));
                pending_last = false;
                break;
            }
            Err(e) => {
                stop = StopReason::Aborted(format!("iteration {iter}: {e}"));
                pending_last = false;
                break;
            }
        };
        trace.push(trace_entry(iter, loss, &current));
        if best.as_ref().is_none_or(|(_, b)| loss < *b) {
            best = Some((current.clone(), loss));
        }

        moments.t += 1;
        let bc1 = T::one() - b1.powi(moments.t as i32);
        let bc2 = T::one() - b2.powi(moments.t as i32);
        for j in 0..dim {
            moments.m[j] = b1 * moments.m[j] + (T::one() - b1) * grad[j];
            moments.v[j] = b2 * moments.v[j] + (T::one() - b2) * grad[j] * grad[j];
            let mhat = moments.m[j] / bc1;
            let vhat = moments.v[j] / bc2;
            theta[j] -= cfg.learning_rate * mhat / (vhat.sqrt() + eps);
        }
        if let Method::Glct(_) = method {
            if theta[1].abs() < cfg.b_min || theta[1] == T::zero() {
                let s = if theta[1] < T::zero() { -T::one() } else { T::one() };
                theta[1] = s * cfg.b_min.max(T::default_epsilon());
            }
        }
        match TrainParams::from_vec(method, &theta) {
            Ok(p) => current = p,
            Err(e) => {
                stop = StopReason::Aborted(format!("iteration {iter}: {e}"));
                pending_last = false;
                iteration_ops.push(f.op_counts().since(ops0));
                iteration_nanos.push(t0.elapsed().as_nanos() as u64);
                break;
            }
        }
        iteration_ops.push(f.op_counts().since(ops0));
        iteration_nanos.push(t0.elapsed().as_nanos() as u64);

        if cfg.stop_tol > T::zero() && trace.len() > STOP_WINDOW {
            let old = trace[trace.len() - 1 - STOP_WINDOW].loss;
            let rel = (loss - old).abs() / old.abs().max(T::lit(1e-30));
            if rel < cfg.stop_tol {
                stop = StopReason::Converged;
                break;
            }
        }
    }

    // the iterate produced by the last update has not been scored yet
    if pending_last {
        if let Ok(l) = training_loss(f, method, &current, data) {
            if l.is_finite() && best.as_ref().is_none_or(|(_, b)| l < *b) {
                best = Some((current.clone(), l));
            }
        }
    }
    let initial_loss = trace.first().map_or(baseline_loss, |e| e.loss);
    let (params, loss, used_baseline) = match best {
        Some((p, l)) if l <= baseline_loss => (p, l, false),
        _ => (baseline.clone(), baseline_loss, true),
    };
    Ok(TrainState {
        method,
        params,
        loss,
        last: current,
        initial_loss,
        baseline_loss,
        used_baseline,
        moments,
        trace,
        stop,
        iteration_ops,
        iteration_nanos,
        elapsed: clock.elapsed(),
    })
}

// ---------------------------------------------------------------------------
// Strategy comparison

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridStrategyStats {
    pub points: usize,
    pub evaluations: usize,
    pub failures: usize,
    pub wall_ms: f64,
    pub dense_matmul_count: u64,
    pub diag_matmul_count: u64,
    pub mse: f64,
    pub params: [f64; 4],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdamStrategyStats {
    pub iterations: usize,
    pub wall_ms: f64,
    pub dense_matmul_count: u64,
    pub diag_matmul_count: u64,
    pub dense_per_iteration: Option<u64>,
    pub timing: IterationTiming,
    pub training_loss: f64,
    /// Closed-form MSE of the trained `(M, h)` under the observation model.
    pub mse: f64,
    pub params: [f64; 4],
}

/// Spread of per-iteration wall time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationTiming {
    pub mean_ns: f64,
    /// Coefficient of variation of single iterations.
    pub cv: f64,
    /// Coefficient of variation of the totals of [`TIMING_BLOCKS`] equal
    /// consecutive blocks; near zero when cost grows linearly with iterations.
    pub block_cv: f64,
}

pub const TIMING_BLOCKS: usize = 10;

fn coeff_of_variation(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    if mean > 0.0 { var.sqrt() / mean } else { 0.0 }
}

impl IterationTiming {
    pub fn from_nanos(nanos: &[u64]) -> Self {
        let xs: Vec<f64> = nanos.iter().map(|&v| v as f64).collect();
        let mean_ns = if xs.is_empty() { 0.0 } else { xs.iter().sum::<f64>() / xs.len() as f64 };
        let per = xs.len() / TIMING_BLOCKS;
        let blocks: Vec<f64> = if per == 0 { Vec::new() } else { xs.chunks_exact(per).take(TIMING_BLOCKS).map(|c| c.iter().sum()).collect() };
        Self { mean_ns, cv: coeff_of_variation(&xs), block_cv: coeff_of_variation(&blocks) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyReport {
    pub variant: Variant,
    pub n: usize,
    pub grid: GridStrategyStats,
    pub adam: AdamStrategyStats,
}

fn params4<T: Real>(m: &LctParams<T>) -> [f64; 4] {
    [m.a, m.b, m.c, m.d].map(|v| v.to_f64_lossy())
}

/// Runs both strategies on the same problem and records cost and quality.
pub fn compare_strategies<T: Real>(
    f: &TransformFactory<T>,
    variant: Variant,
    model: &ObservationModel<T>,
    grid: &GridSpec<T>,
    cfg: &TrainConfig<T>,
    data: &[Snapshot<T>],
) -> Result<StrategyReport> {
    let outcome = grid_search_models(f, variant, std::slice::from_ref(model), grid)?;
    let opt = &outcome.optima[0];
    let grid_stats = GridStrategyStats {
        points: outcome.points.len(),
        evaluations: outcome.evaluations,
        failures: outcome.failures,
        wall_ms: outcome.elapsed.as_secs_f64() * 1e3,
        dense_matmul_count: outcome.op_counts.dense_matmul_count,
        diag_matmul_count: outcome.op_counts.diag_matmul_count,
        mse: opt.mse.to_f64_lossy(),
        params: params4(&opt.params.matrix()),
    };

    let method = Method::Glct(variant);
    let before = f.op_counts();
    let state = adam_train(f, method, data, cfg)?;
    let used = f.op_counts().since(before);
    let op = build_operator(f, method, &state.params.transform)?;
    let mse = crate::wiener::mse_closed_form(&op, &state.params.filter(), model)?;
    Ok(StrategyReport {
        variant,
        n: f.n(),
        grid: grid_stats,
        adam: AdamStrategyStats {
            iterations: state.iterations(),
            wall_ms: state.elapsed.as_secs_f64() * 1e3,
            dense_matmul_count: used.dense_matmul_count,
            diag_matmul_count: used.diag_matmul_count,
            dense_per_iteration: state.dense_per_iteration(),
            timing: IterationTiming::from_nanos(&state.iteration_nanos),
            training_loss: state.loss.to_f64_lossy(),
            mse: mse.to_f64_lossy(),
            params: params4(&state.params.transform.matrix()),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_random_knn_graph, synthetic_autocorrelation, Graph, SignalCovariance, Weighting};
    use crate::transforms::FactoryConfig;
    use crate::wiener::{assemble_wiener_hopf, build_rank_one_ops, ObservationSampler};
    use nalgebra::DMatrix;

    fn setup(n: usize, seed: u64) -> (TransformFactory<f64>, ObservationModel<f64>) {
        let g: Graph<f64> = build_random_knn_graph(n, 3, seed, Weighting::default()).unwrap();
        let f = TransformFactory::new(&g, FactoryConfig::default()).unwrap();
        let model = ObservationModel::denoising(synthetic_autocorrelation(&g), 0.5).unwrap();
        (f, model)
    }

    fn snapshots(model: &ObservationModel<f64>, count: usize, seed: u64) -> Vec<Snapshot<f64>> {
        let mut s = ObservationSampler::new(model, seed).unwrap();
        (0..count).map(|_| { let (f, y) = s.draw(); Snapshot::new(y, f).unwrap() }).collect()
    }

    #[test]
    fn standard_grid_shape() {
        let g = GridSpec::<f64>::standard();
        assert_eq!((g.a.len(), g.b.len(), g.d.len()), (21, 20, 21));
        assert_eq!(g.b[0], 0.1);
        assert_eq!(g.a[20], 2.0);
        g.validate(0.1).unwrap();
        assert!(GridSpec::new(vec![1.0], vec![0.05], vec![1.0]).unwrap().validate(0.1).is_err());
        assert!(GridSpec::<f64>::new(vec![], vec![1.0], vec![1.0]).is_err());
        let pts = GridSpec::cube(3).with_rotations(&[0.5]).points();
        assert_eq!(pts.len(), 28);
        assert!(pts.windows(2).all(|w| lex_cmp(&w[0], &w[1]) != Ordering::Greater));
    }

    #[test]
    fn singleton_grid_returns_point_solution() {
        let (f, model) = setup(6, 1);
        let grid = GridSpec::new(vec![0.5], vec![1.0], vec![1.5]).unwrap();
        let opt = grid_search(&f, Variant::LapCddhfs, &model, &grid).unwrap();
        let m = LctParams::from_abd(0.5, 1.0, 1.5).unwrap();
        let op = f.glct(Variant::LapCddhfs, &m).unwrap();
        let sys = assemble_wiener_hopf(&build_rank_one_ops(&op), &model).unwrap();
        let sol = solve_filter(&sys, 0.0).unwrap();
        assert_eq!(opt.filter, sol.filter);
        assert_eq!(opt.mse, sys.mse(&sol.filter).unwrap());
    }

    #[test]
    fn grid_optimum_is_minimum_over_points() {
        let (f, model) = setup(6, 2);
        let grid = GridSpec::new(vec![0.0, 1.0], vec![0.5, 1.5], vec![0.3, 1.2]).unwrap();
        let out = grid_search_models(&f, Variant::WadjCmcccm, &[model], &grid).unwrap();
        assert_eq!(out.points.len(), 8);
        let best = out.optima[0].mse;
        assert!(out.points.iter().all(|p| p.mse[0].is_none_or(|v| best <= v)));
    }

    #[test]
    fn grid_ties_go_to_smallest_point() {
        // on a single vertex every operator is a unit-modulus scalar and all MSEs tie
        let g = Graph::from_adjacency(DMatrix::zeros(1, 1), None).unwrap();
        let f = TransformFactory::new(&g, FactoryConfig::default()).unwrap();
        let model = ObservationModel::denoising(SignalCovariance::identity(1), 1.0).unwrap();
        let grid = GridSpec::new(vec![1.0, 0.5], vec![1.0, 0.5], vec![2.0, 1.0]).unwrap();
        let opt = grid_search(&f, Variant::WadjCmcccm, &model, &grid).unwrap();
        let m = opt.params.matrix();
        assert_eq!((m.a, m.b, m.d), (0.5, 0.5, 1.0));
    }

    #[test]
    fn all_points_failing_is_search_failure() {
        let (f, model) = setup(5, 3);
        let grid = GridSpec::new(vec![1.0], vec![0.1], vec![1.0]).unwrap();
        let cfg = FactoryConfig { b_min: 0.5, ..FactoryConfig::default() };
        let f2 = TransformFactory::from_spectra(f.spectra().clone(), cfg);
        assert!(matches!(grid_search(&f2, Variant::LapCmcccm, &model, &grid), Err(GlctError::InvalidParameter(_))));
        let grid = GridSpec::new(vec![1.0], vec![0.6], vec![1.0]).unwrap().with_rotations(&[2.0]);
        let out = grid_search_models(&f2, Variant::LapCmcccm, &[model.clone()], &grid).unwrap();
        assert_eq!(out.failures, 1);
        let strict = FactoryConfig { inverse_tol: 1e-300, ..FactoryConfig::default() };
        let f3 = TransformFactory::from_spectra(f.spectra().clone(), strict);
        let grid = GridSpec::new(vec![0.5], vec![1.0], vec![0.5]).unwrap();
        assert!(matches!(grid_search(&f3, Variant::LapCddhfs, &model, &grid), Err(GlctError::SearchFailure(_))));
    }

    #[test]
    fn param_vector_round_trip() {
        let p = TrainParams {
            transform: TransformParams::Lct(LctParams::from_abd(0.3, -1.2, 0.7).unwrap()),
            h: DVector::from_vec(vec![cplx(1.0, 2.0), cplx(-3.0, 0.5)]),
        };
        let v = p.to_vec();
        assert_eq!(v, vec![0.3, -1.2, 0.7, 1.0, -3.0, 2.0, 0.5]);
        let back = TrainParams::from_vec(Method::Glct(Variant::LapCddhfs), &v).unwrap();
        assert_eq!(back.h, p.h);
        assert!(back.transform.matrix().max_abs_diff(&p.transform.matrix()) < 1e-15);
        assert!(TrainParams::<f64>::from_vec(Method::Gfrft(Basis::Adjacency), &[0.0, 1.0]).is_err());
    }

    #[test]
    fn h_gradient_matches_differences() {
        let (f, model) = setup(6, 4);
        let data = snapshots(&model, 3, 9);
        let method = Method::Glct(Variant::WadjCddhfs);
        let cfg = TrainConfig { seed: 5, ..TrainConfig::default() };
        let p = initial_params(method, 6, &cfg);
        let (_, g) = loss_and_gradient(&f, method, &p, &data, GradMode::FiniteDifference, 1e-5, 0.1).unwrap();
        let base = p.to_vec();
        let h = 1e-6;
        for j in 3..base.len() {
            let mut hi = base.clone();
            hi[j] += h;
            let mut lo = base.clone();
            lo[j] -= h;
            let l = |v: &[f64]| training_loss(&f, method, &TrainParams::from_vec(method, v).unwrap(), &data).unwrap();
            let fd = (l(&hi) - l(&lo)) / (2.0 * h);
            assert!((fd - g[j]).abs() <= 1e-5 * (1.0 + g[j].abs()), "coordinate {j}: {fd} vs {}", g[j]);
        }
    }

    #[test]
    fn analytic_lap_cmcccm_gradient_matches_differences() {
        let (f, model) = setup(7, 5);
        let data = snapshots(&model, 2, 1);
        let method = Method::Glct(Variant::LapCmcccm);
        let p = TrainParams {
            transform: TransformParams::Lct(LctParams::from_abd(0.6, 0.9, 1.3).unwrap()),
            h: DVector::from_fn(7, |i, _| cplx(1.0 - 0.1 * i as f64, 0.05 * i as f64)),
        };
        let (la, ga) = loss_and_gradient(&f, method, &p, &data, GradMode::AnalyticLapCmcccm, 1e-5, 0.1).unwrap();
        let (lf, gf) = loss_and_gradient(&f, method, &p, &data, GradMode::FiniteDifference, 1e-5, 0.1).unwrap();
        assert!((la - lf).abs() < 1e-9 * (1.0 + lf));
        for j in 0..3 {
            assert!((ga[j] - gf[j]).abs() <= 1e-4 * gf[j].abs().max(1e-3), "{j}: {} vs {}", ga[j], gf[j]);
        }
        assert!(loss_and_gradient(&f, Method::Glct(Variant::LapCddhfs), &p, &data, GradMode::AnalyticLapCmcccm, 1e-5, 0.1).is_err());
    }

    #[test]
    fn one_sided_difference_near_b_min() {
        let (f, model) = setup(6, 6);
        let data = snapshots(&model, 1, 2);
        let method = Method::Glct(Variant::LapCmcccm);
        let p = TrainParams {
            transform: TransformParams::Lct(LctParams::from_abd(0.6, 0.1, 1.3).unwrap()),
            h: DVector::from_element(6, creal(0.8)),
        };
        let (_, g) = loss_and_gradient(&f, method, &p, &data, GradMode::FiniteDifference, 1e-5, 0.1).unwrap();
        let (_, ga) = loss_and_gradient(&f, method, &p, &data, GradMode::AnalyticLapCmcccm, 1e-5, 0.1).unwrap();
        assert!((g[1] - ga[1]).abs() <= 1e-4 * ga[1].abs().max(1e-3));
    }

    #[test]
    fn training_is_deterministic_and_monotone() {
        let (f, model) = setup(6, 7);
        let data = snapshots(&model, 1, 3);
        let cfg = TrainConfig { max_iters: 60, seed: 11, ..TrainConfig::default() };
        let method = Method::Glct(Variant::WadjCmcccm);
        let s1 = adam_train(&f, method, &data, &cfg).unwrap();
        let s2 = adam_train(&f, method, &data, &cfg).unwrap();
        assert_eq!(s1.loss_trace(), s2.loss_trace());
        assert_eq!(s1.iterations(), 60);
        assert!(s1.loss <= s1.initial_loss);
        assert!(s1.loss <= s1.baseline_loss);
        assert!(s1.trace.iter().all(|e| e.b.abs() >= 0.1));
        assert!(s1.dense_per_iteration().is_some());
    }

    #[test]
    fn scalar_training_reaches_wiener_gain() {
        // f ∈ {±1}, n ∈ {±1} in every combination: least-squares gain is exactly 1/2
        let g = Graph::from_adjacency(DMatrix::zeros(1, 1), None).unwrap();
        let f = TransformFactory::new(&g, FactoryConfig::default()).unwrap();
        let data: Vec<_> = [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)]
            .iter()
            .map(|&(s, n)| Snapshot::from_real(&[s + n], &[s]).unwrap())
            .collect();
        let cfg = TrainConfig { init: InitMode::NearIdentity, ..TrainConfig::default() };
        let st = adam_train(&f, Method::Glct(Variant::WadjCmcccm), &data, &cfg).unwrap();
        let h = st.params.h[0];
        // the transform is a unit-modulus scalar; the effective gain is h itself
        assert!((h.norm() - 0.5f64).abs() < 1e-3, "{h}");
    }

    #[test]
    fn noiseless_training_reaches_zero() {
        let (f, model) = setup(5, 8);
        let clean = snapshots(&model.with_noise(0.0).unwrap(), 1, 4);
        let cfg = TrainConfig { init: InitMode::NearIdentity, seed: 2, ..TrainConfig::default() };
        let st = adam_train(&f, Method::Glct(Variant::WadjCddhfs), &clean, &cfg).unwrap();
        assert!(st.loss < 1e-6, "{}", st.loss);
    }

    #[test]
    fn gfrft_training_runs() {
        let (f, model) = setup(5, 9);
        let data = snapshots(&model, 1, 5);
        let cfg = TrainConfig { max_iters: 30, ..TrainConfig::default() };
        let st = adam_train(&f, Method::Gfrft(Basis::Laplacian), &data, &cfg).unwrap();
        assert!(st.loss <= st.initial_loss);
        assert!(matches!(st.params.transform, TransformParams::Order(_)));
    }

    #[test]
    fn trace_csv_header() {
        let (f, model) = setup(5, 10);
        let data = snapshots(&model, 1, 5);
        let cfg = TrainConfig { max_iters: 3, ..TrainConfig::default() };
        let st = adam_train(&f, Method::Glct(Variant::LapCddhfs), &data, &cfg).unwrap();
        let mut buf = Vec::new();
        st.write_trace_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("iter,loss,a,b,d\n"));
        assert_eq!(text.lines().count(), 4);
    }

    #[test]
    fn iteration_timing_blocks() {
        let flat = IterationTiming::from_nanos(&[100; 40]);
        assert_eq!((flat.mean_ns, flat.cv, flat.block_cv), (100.0, 0.0, 0.0));
        let ramp: Vec<u64> = (0..40).map(|i| if i < 20 { 100 } else { 300 }).collect();
        let t = IterationTiming::from_nanos(&ramp);
        assert!((t.mean_ns - 200.0).abs() < 1e-12);
        assert!(t.block_cv > 0.5);
        assert_eq!(IterationTiming::from_nanos(&[5]).block_cv, 0.0);
    }
}
