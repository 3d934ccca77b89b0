//! Graph Fourier, fractional Fourier and linear canonical transforms.
//!
//! The building blocks act on either the weighted adjacency `W` or the
//! Laplacian `L`:
//!
//! | block | adjacency basis | Laplacian basis |
//! |-------|-----------------|-----------------|
//! | scaling | `P_σ·P_W⁻¹` (eigenbasis of `W/σ`) | `diag(σ^{−ε r_l})` |
//! | chirp | `J_W^ξ` | `diag(U_L·exp(−iλ²/ξ))` |
//!
//! and are assembled by [`TransformFactory`] into the four GLCT variants:
//!
//! ```text
//! WadjCddhfs : J_W^ξ · P_σ · J_W^α · P_W⁻¹
//! LapCddhfs  : CM_L^ξ · S_L · P_L · J_L^α · P_L⁻¹
//! WadjCmcccm : J_W^ξ₁ · U_W · J_W^ξ₂ · U_W⁻¹ · J_W^ξ₃
//! LapCmcccm  : CM_L^ξ₁ · U_L · CM_L^ξ₂ · U_L⁻¹ · CM_L^ξ₃
//! ```

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, GlctError, Result};
use crate::graph::{Graph, GraphSignal};
use crate::lct::{decompose_cddhfs, decompose_cmcccm, LctParams, DEFAULT_B_MIN};
use crate::scalar::{cis, cplx, creal, Cplx, Real};
use crate::spectral::{
    diag_left, diag_right, eig_symmetric, eig_unitary, exp_c, fractional_power, identity_deviation, matmul,
    to_complex, OpCounter, OpCounts, SymmetricEigenBasis, UnitarySpectrum,
};

// ---------------------------------------------------------------------------
// Method tags

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Basis {
    Adjacency,
    Laplacian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Variant {
    #[serde(rename = "wadj-cddhfs")]
    WadjCddhfs,
    #[serde(rename = "lap-cddhfs")]
    LapCddhfs,
    #[serde(rename = "wadj-cmcccm")]
    WadjCmcccm,
    #[serde(rename = "lap-cmcccm")]
    LapCmcccm,
}

impl Variant {
    pub const ALL: [Variant; 4] = [Variant::WadjCddhfs, Variant::WadjCmcccm, Variant::LapCddhfs, Variant::LapCmcccm];

    pub fn basis(self) -> Basis {
        match self {
            Variant::WadjCddhfs | Variant::WadjCmcccm => Basis::Adjacency,
            Variant::LapCddhfs | Variant::LapCmcccm => Basis::Laplacian,
        }
    }

    pub fn uses_cmcccm(self) -> bool {
        matches!(self, Variant::WadjCmcccm | Variant::LapCmcccm)
    }
}

/// A transform family: one of the four GLCT variants or the fractional
/// Fourier baseline on either basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Gfrft(Basis),
    Glct(Variant),
}

impl Method {
    /// The six methods in report order.
    pub const ALL: [Method; 6] = [
        Method::Gfrft(Basis::Adjacency),
        Method::Gfrft(Basis::Laplacian),
        Method::Glct(Variant::WadjCddhfs),
        Method::Glct(Variant::WadjCmcccm),
        Method::Glct(Variant::LapCddhfs),
        Method::Glct(Variant::LapCmcccm),
    ];

    pub fn basis(self) -> Basis {
        match self {
            Method::Gfrft(b) => b,
            Method::Glct(v) => v.basis(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Method::Gfrft(Basis::Adjacency) => "gfrft-w",
            Method::Gfrft(Basis::Laplacian) => "gfrft-l",
            Method::Glct(Variant::WadjCddhfs) => "wadj-cddhfs",
            Method::Glct(Variant::LapCddhfs) => "lap-cddhfs",
            Method::Glct(Variant::WadjCmcccm) => "wadj-cmcccm",
            Method::Glct(Variant::LapCmcccm) => "lap-cmcccm",
        }
    }

    /// Row label used in report tables.
    pub fn label(self) -> &'static str {
        match self {
            Method::Gfrft(Basis::Adjacency) => "GFRFT_W",
            Method::Gfrft(Basis::Laplacian) => "GFRFT_L",
            Method::Glct(Variant::WadjCddhfs) => "wAdj-CDDHFs-GLCT",
            Method::Glct(Variant::LapCddhfs) => "Lap-CDDHFs-GLCT",
            Method::Glct(Variant::WadjCmcccm) => "wAdj-CM-CC-CM-GLCT",
            Method::Glct(Variant::LapCmcccm) => "Lap-CM-CC-CM-GLCT",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        Method::Glct(*self).fmt(f)
    }
}

impl FromStr for Method {
    type Err = GlctError;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('_', "-");
        Method::ALL
            .into_iter()
            .find(|m| m.name() == key || m.label().to_ascii_lowercase() == key)
            .ok_or_else(|| GlctError::invalid(format!("unknown method '{s}'")))
    }
}

impl FromStr for Variant {
    type Err = GlctError;

    fn from_str(s: &str) -> Result<Self> {
        match s.parse::<Method>()? {
            Method::Glct(v) => Ok(v),
            Method::Gfrft(_) => Err(GlctError::invalid(format!("'{s}' is not a GLCT variant"))),
        }
    }
}

impl Serialize for Method {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for Method {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

// ---------------------------------------------------------------------------
// Configuration

/// Scale-change rate `ε` of the Laplacian scaling block.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingConfig<T> {
    pub epsilon_rate: T,
}

impl<T: Real> Default for ScalingConfig<T> {
    fn default() -> Self {
        Self { epsilon_rate: T::one() }
    }
}

impl<T: Real> ScalingConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if !self.epsilon_rate.is_finite() || self.epsilon_rate == T::zero() {
            return Err(GlctError::invalid("epsilon_rate must be finite and nonzero"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FactoryConfig<T> {
    pub scaling: ScalingConfig<T>,
    /// Lower bound on `|b|` for chirp-convolution variants.
    pub b_min: T,
    /// Largest accepted `‖F_inv·F − I‖_F`.
    pub inverse_tol: T,
}

impl<T: Real> Default for FactoryConfig<T> {
    fn default() -> Self {
        Self { scaling: ScalingConfig::default(), b_min: T::lit(DEFAULT_B_MIN), inverse_tol: T::lit(T::INVERSE_RESIDUAL_TOL) }
    }
}

// ---------------------------------------------------------------------------
// Building blocks

/// Forward GFT `Uᵀ·f`.
pub fn gft<T: Real>(s: &SymmetricEigenBasis<T>, f: &GraphSignal<T>) -> Result<GraphSignal<T>> {
    check_dim(s.n(), f.len())?;
    Ok(GraphSignal(to_complex(&s.u.transpose()) * f.values()))
}

/// Inverse GFT `U·f̂`.
pub fn igft<T: Real>(s: &SymmetricEigenBasis<T>, fhat: &GraphSignal<T>) -> Result<GraphSignal<T>> {
    check_dim(s.n(), fhat.len())?;
    Ok(GraphSignal(to_complex(&s.u) * fhat.values()))
}

/// Order-α fractional power of a GFT matrix, `P·J^α·P⁻¹`.
pub fn gfrft_operator<T: Real>(s: &UnitarySpectrum<T>, alpha: T) -> DMatrix<Cplx<T>> {
    fractional_power(s, alpha)
}

/// Spectrum of the GFT matrix of the scaled operator `W/σ`.
pub fn scaled_adjacency_spectrum<T: Real>(w: &DMatrix<T>, sigma: T) -> Result<UnitarySpectrum<T>> {
    if !(sigma > T::zero()) {
        return Err(GlctError::invalid("sigma must be positive"));
    }
    let basis = eig_symmetric(&(w / sigma))?;
    eig_unitary(&basis.gft_matrix())
}

/// Adjacency scaling block `P_σ·P_W⁻¹`.
pub fn gst_wadj<T: Real>(spectra: &GraphSpectra<T>, sigma: T) -> Result<DMatrix<Cplx<T>>> {
    let p_sigma = scaled_adjacency_spectrum(&spectra.adjacency, sigma)?;
    Ok(p_sigma.p() * spectra.adj_spectrum.p_inv())
}

/// Diagonal of the Laplacian scaling block, `σ^{−ε r_l}`.
pub fn gst_lap<T: Real>(s: &SymmetricEigenBasis<T>, sigma: T, cfg: &ScalingConfig<T>) -> Result<DVector<T>> {
    if !(sigma > T::zero()) {
        return Err(GlctError::invalid("sigma must be positive"));
    }
    cfg.validate()?;
    if sigma == T::one() {
        return Ok(DVector::from_element(s.n(), T::one()));
    }
    Ok(s.lambdas.map(|r| sigma.powf(-cfg.epsilon_rate * r)))
}

/// Entrywise `∂/∂σ` of [`gst_lap`], `−ε r σ^{−ε r − 1}`.
pub fn gst_lap_derivative<T: Real>(s: &SymmetricEigenBasis<T>, sigma: T, cfg: &ScalingConfig<T>) -> DVector<T> {
    let eps = cfg.epsilon_rate;
    s.lambdas.map(|r| -eps * r * sigma.powf(-eps * r - T::one()))
}

/// Adjacency chirp `J_W^ξ`, returned as its diagonal.
pub fn gcm_wadj<T: Real>(s: &UnitarySpectrum<T>, xi: T) -> DVector<Cplx<T>> {
    s.power_diagonal(xi)
}

/// Laplacian chirp `diag(U_L·ŝ_ξ)` with `ŝ_ξ(k) = exp(−iλ_k²/ξ)`; ones at `ξ = 0`.
pub fn gcm_lap<T: Real>(s: &SymmetricEigenBasis<T>, xi: T) -> DVector<Cplx<T>> {
    if xi == T::zero() {
        return DVector::from_element(s.n(), creal(T::one()));
    }
    let chirp = s.lambdas.map(|l| cis(-l * l / xi));
    to_complex(&s.u) * chirp
}

/// `∂/∂ξ` of [`gcm_lap`], `U_L·(i λ²/ξ² · exp(−iλ²/ξ))`. Zero at `ξ = 0`, where
/// the chirp is pinned to the identity.
pub fn gcm_lap_derivative<T: Real>(s: &SymmetricEigenBasis<T>, xi: T) -> DVector<Cplx<T>> {
    if xi == T::zero() {
        return DVector::zeros(s.n());
    }
    let chirp = s.lambdas.map(|l| {
        let l2 = l * l;
        cis(-l2 / xi) * cplx(T::zero(), l2 / (xi * xi))
    });
    to_complex(&s.u) * chirp
}

// ---------------------------------------------------------------------------
// Precomputed spectra

/// Eigenbases of `W` and `L` and the spectra of their GFT matrices; computed
/// once per graph and shared by every operator built on it.
#[derive(Debug, Clone)]
pub struct GraphSpectra<T: Real> {
    adjacency: DMatrix<T>,
    adj_basis: SymmetricEigenBasis<T>,
    adj_spectrum: UnitarySpectrum<T>,
    lap_basis: SymmetricEigenBasis<T>,
    lap_spectrum: UnitarySpectrum<T>,
    u_adj: DMatrix<Cplx<T>>,
    u_adj_inv: DMatrix<Cplx<T>>,
    u_lap: DMatrix<Cplx<T>>,
    u_lap_inv: DMatrix<Cplx<T>>,
}

impl<T: Real> GraphSpectra<T> {
    pub fn new(g: &Graph<T>) -> Result<Self> {
        let adj_basis = eig_symmetric(g.adjacency())?;
        let lap_basis = eig_symmetric(g.laplacian())?;
        let adj_spectrum = eig_unitary(&adj_basis.gft_matrix())?;
        let lap_spectrum = eig_unitary(&lap_basis.gft_matrix())?;
        Ok(Self {
            adjacency: g.adjacency().clone(),
            u_adj: to_complex(&adj_basis.u),
            u_adj_inv: adj_basis.gft_matrix(),
            u_lap: to_complex(&lap_basis.u),
            u_lap_inv: lap_basis.gft_matrix(),
            adj_basis,
            adj_spectrum,
            lap_basis,
            lap_spectrum,
        })
    }

    pub fn n(&self) -> usize {
        self.adjacency.nrows()
    }

    pub fn basis(&self, b: Basis) -> &SymmetricEigenBasis<T> {
        match b {
            Basis::Adjacency => &self.adj_basis,
            Basis::Laplacian => &self.lap_basis,
        }
    }

    pub fn spectrum(&self, b: Basis) -> &UnitarySpectrum<T> {
        match b {
            Basis::Adjacency => &self.adj_spectrum,
            Basis::Laplacian => &self.lap_spectrum,
        }
    }

    fn u(&self, b: Basis) -> (&DMatrix<Cplx<T>>, &DMatrix<Cplx<T>>) {
        match b {
            Basis::Adjacency => (&self.u_adj, &self.u_adj_inv),
            Basis::Laplacian => (&self.u_lap, &self.u_lap_inv),
        }
    }
}

// ---------------------------------------------------------------------------
// Operators

/// How the inverse matrix of an operator was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InverseSource {
    /// Built from `M⁻¹` through the same pipeline as the forward matrix.
    Parametric,
    /// Dense LU inverse of the forward matrix.
    Numerical,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatorDiagnostics {
    /// `‖FᴴF − I‖_F`.
    pub unitarity_deviation: f64,
    /// `‖F_inv·F − I‖_F` of the inverse actually stored.
    pub inverse_residual: f64,
    /// `‖F^{M⁻¹}·F^M − I‖_F` of the parametric candidate.
    pub parametric_inverse_residual: f64,
    pub inverse_source: InverseSource,
}

/// Forward/inverse matrix pair of one transform instance.
#[derive(Debug, Clone)]
pub struct GlctOperator<T: Real> {
    method: Method,
    params: LctParams<T>,
    order: Option<T>,
    forward: DMatrix<Cplx<T>>,
    inverse: DMatrix<Cplx<T>>,
    diagnostics: OperatorDiagnostics,
}

impl<T: Real> GlctOperator<T> {
    pub fn method(&self) -> Method {
        self.method
    }

    /// GLCT variant, `None` for fractional Fourier operators.
    pub fn variant(&self) -> Option<Variant> {
        match self.method {
            Method::Glct(v) => Some(v),
            Method::Gfrft(_) => None,
        }
    }

    pub fn params(&self) -> &LctParams<T> {
        &self.params
    }

    /// Fractional order of a GFRFT operator.
    pub fn order(&self) -> Option<T> {
        self.order
    }

    pub fn forward(&self) -> &DMatrix<Cplx<T>> {
        &self.forward
    }

    pub fn inverse(&self) -> &DMatrix<Cplx<T>> {
        &self.inverse
    }

    pub fn diagnostics(&self) -> &OperatorDiagnostics {
        &self.diagnostics
    }

    pub fn n(&self) -> usize {
        self.forward.nrows()
    }

    pub fn apply(&self, f: &GraphSignal<T>) -> Result<GraphSignal<T>> {
        check_dim(self.n(), f.len())?;
        Ok(GraphSignal(&self.forward * f.values()))
    }

    pub fn apply_inverse(&self, f: &GraphSignal<T>) -> Result<GraphSignal<T>> {
        check_dim(self.n(), f.len())?;
        Ok(GraphSignal(&self.inverse * f.values()))
    }
}

/// Forward and inverse matrices without diagnostics.
#[derive(Debug, Clone)]
pub struct TransformPair<T: Real> {
    pub forward: DMatrix<Cplx<T>>,
    pub inverse: DMatrix<Cplx<T>>,
    pub inverse_source: InverseSource,
    pub parametric_inverse_residual: T,
}

/// Forward and inverse matrices with their derivatives in `(a, b, d)`.
#[derive(Debug, Clone)]
pub struct TransformJacobian<T: Real> {
    pub pair: TransformPair<T>,
    pub d_forward: [DMatrix<Cplx<T>>; 3],
    pub d_inverse: [DMatrix<Cplx<T>>; 3],
}

/// Builds transform operators on one graph, counting matrix products.
#[derive(Debug)]
pub struct TransformFactory<T: Real> {
    spectra: GraphSpectra<T>,
    config: FactoryConfig<T>,
    ops: OpCounter,
}

impl<T: Real> TransformFactory<T> {
    pub fn new(g: &Graph<T>, config: FactoryConfig<T>) -> Result<Self> {
        config.scaling.validate()?;
        if !(config.b_min >= T::zero()) || !(config.inverse_tol > T::zero()) {
            return Err(GlctError::invalid("b_min must be >= 0 and inverse_tol > 0"));
        }
        Ok(Self { spectra: GraphSpectra::new(g)?, config, ops: OpCounter::new() })
    }

    pub fn from_spectra(spectra: GraphSpectra<T>, config: FactoryConfig<T>) -> Self {
        Self { spectra, config, ops: OpCounter::new() }
    }

    pub fn spectra(&self) -> &GraphSpectra<T> {
        &self.spectra
    }

    pub fn config(&self) -> &FactoryConfig<T> {
        &self.config
    }

    pub fn n(&self) -> usize {
        self.spectra.n()
    }

    pub fn op_counts(&self) -> OpCounts {
        self.ops.counts()
    }

    pub fn counter(&self) -> &OpCounter {
        &self.ops
    }

    /// Validates `M` against the variant's factorization.
    pub fn check_params(&self, variant: Variant, m: &LctParams<T>) -> Result<()> {
        if variant.uses_cmcccm() {
            decompose_cmcccm(m, self.config.b_min).map(|_| ())
        } else {
            decompose_cddhfs(m).map(|_| ())
        }
    }

    /// Forward matrix of a GLCT variant at `M`.
    pub fn forward_matrix(&self, variant: Variant, m: &LctParams<T>) -> Result<DMatrix<Cplx<T>>> {
        let ops = &self.ops;
        let sp = &self.spectra;
        match variant {
            Variant::WadjCddhfs => {
                let dec = decompose_cddhfs(m)?;
                // W/σ has the eigenvectors of W, hence P_σ = P_W for every σ > 0
                let s = &sp.adj_spectrum;
                let inner = diag_left(&s.power_diagonal(dec.alpha), s.p_inv(), ops);
                Ok(diag_left(&gcm_wadj(s, dec.xi), &matmul(s.p(), &inner, ops), ops))
            }
            Variant::LapCddhfs => {
                let dec = decompose_cddhfs(m)?;
                let s = &sp.lap_spectrum;
                let inner = matmul(s.p(), &diag_left(&s.power_diagonal(dec.alpha), s.p_inv(), ops), ops);
                let scale = gst_lap(&sp.lap_basis, dec.sigma, &self.config.scaling)?.map(creal);
                Ok(diag_left(&gcm_lap(&sp.lap_basis, dec.xi), &diag_left(&scale, &inner, ops), ops))
            }
            Variant::WadjCmcccm | Variant::LapCmcccm => {
                let dec = decompose_cmcccm(m, self.config.b_min)?;
                let chirp = |xi: T| match variant {
                    Variant::WadjCmcccm => gcm_wadj(&sp.adj_spectrum, xi),
                    _ => gcm_lap(&sp.lap_basis, xi),
                };
                let (u, u_inv) = sp.u(variant.basis());
                let right = diag_left(&chirp(dec.xi2), &diag_right(u_inv, &chirp(dec.xi3), ops), ops);
                Ok(diag_left(&chirp(dec.xi1), &matmul(u, &right, ops), ops))
            }
        }
    }

    fn gfrft_matrix(&self, basis: Basis, alpha: T) -> DMatrix<Cplx<T>> {
        let s = self.spectra.spectrum(basis);
        if alpha == T::zero() {
            return DMatrix::identity(s.n(), s.n());
        }
        matmul(&diag_right(s.p(), &s.power_diagonal(alpha), &self.ops), s.p_inv(), &self.ops)
    }

    /// Picks the parametric inverse when its residual is within tolerance,
    /// otherwise falls back to a dense inverse.
    fn resolve_inverse(&self, forward: &DMatrix<Cplx<T>>, candidate: DMatrix<Cplx<T>>) -> Result<TransformPair<T>> {
        let residual = identity_deviation(&matmul(&candidate, forward, &self.ops));
        if residual < self.config.inverse_tol {
            return Ok(TransformPair {
                forward: forward.clone(),
                inverse: candidate,
                inverse_source: InverseSource::Parametric,
                parametric_inverse_residual: residual,
            });
        }
        let inverse = forward
            .clone()
            .lu()
            .try_inverse()
            .ok_or_else(|| GlctError::numerical("forward matrix is singular"))?;
        Ok(TransformPair {
            forward: forward.clone(),
            inverse,
            inverse_source: InverseSource::Numerical,
            parametric_inverse_residual: if residual.is_finite() { residual } else { T::max_value().unwrap_or(T::one()) },
        })
    }

    /// Forward and inverse matrices of a GLCT variant, without diagnostics.
    pub fn pair(&self, variant: Variant, m: &LctParams<T>) -> Result<TransformPair<T>> {
        let forward = self.forward_matrix(variant, m)?;
        if !forward.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(GlctError::numerical("non-finite forward matrix"));
        }
        let candidate = self.forward_matrix(variant, &m.inverse())?;
        self.resolve_inverse(&forward, candidate)
    }

    /// Forward and inverse fractional Fourier matrices of order `alpha`.
    pub fn gfrft_pair(&self, basis: Basis, alpha: T) -> Result<TransformPair<T>> {
        let forward = self.gfrft_matrix(basis, alpha);
        let candidate = self.gfrft_matrix(basis, -alpha);
        self.resolve_inverse(&forward, candidate)
    }

    fn finish(&self, method: Method, params: LctParams<T>, order: Option<T>, pair: TransformPair<T>) -> Result<GlctOperator<T>> {
        let inverse_residual = identity_deviation(&matmul(&pair.inverse, &pair.forward, &self.ops));
        if !(inverse_residual < self.config.inverse_tol) {
            return Err(GlctError::numerical(format!(
                "inverse residual {inverse_residual:e} exceeds {:e}",
                self.config.inverse_tol
            )));
        }
        let unitarity = identity_deviation(&matmul(&pair.forward.adjoint(), &pair.forward, &self.ops));
        Ok(GlctOperator {
            method,
            params,
            order,
            diagnostics: OperatorDiagnostics {
                unitarity_deviation: unitarity.to_f64_lossy(),
                inverse_residual: inverse_residual.to_f64_lossy(),
                parametric_inverse_residual: pair.parametric_inverse_residual.to_f64_lossy(),
                inverse_source: pair.inverse_source,
            },
            forward: pair.forward,
            inverse: pair.inverse,
        })
    }

    /// GLCT operator of `variant` at `M`.
    pub fn glct(&self, variant: Variant, m: &LctParams<T>) -> Result<GlctOperator<T>> {
        let pair = self.pair(variant, m)?;
        self.finish(Method::Glct(variant), *m, None, pair)
    }

    /// Fractional Fourier operator of order `alpha` on `basis`.
    pub fn gfrft(&self, basis: Basis, alpha: T) -> Result<GlctOperator<T>> {
        let pair = self.gfrft_pair(basis, alpha)?;
        self.finish(Method::Gfrft(basis), LctParams::rotation(alpha), Some(alpha), pair)
    }

    /// Forward and inverse matrices with `∂/∂(a, b, d)` for the Laplacian
    /// chirp-convolution variant.
    ///
    /// The inverse derivative follows whichever inverse was selected: the
    /// parametric one is differentiated through `M⁻¹`, the dense one through
    /// `∂(F⁻¹) = −F⁻¹·∂F·F⁻¹`.
    pub fn lap_cmcccm_jacobian(&self, m: &LctParams<T>) -> Result<TransformJacobian<T>> {
        let dec = decompose_cmcccm(m, self.config.b_min)?;
        if m.is_identity() {
            return Err(GlctError::invalid("derivatives are undefined at M = I"));
        }
        let (a, b, d) = (m.a, m.b, m.d);
        let one = T::one();
        let b2 = b * b;
        // ∂ξ/∂(a, b, d) for ξ₁ = (d−1)/b, ξ₂ = −b, ξ₃ = (a−1)/b
        let fwd_chain = [
            [T::zero(), -(d - one) / b2, one / b],
            [T::zero(), -one, T::zero()],
            [one / b, -(a - one) / b2, T::zero()],
        ];
        let (forward, d_xi) = self.lap_cmcccm_with_partials([dec.xi1, dec.xi2, dec.xi3]);
        let d_forward = chain(&d_xi, &fwd_chain);

        let inv = m.inverse();
        let inv_dec = decompose_cmcccm(&inv, self.config.b_min)?;
        let (candidate, d_xi_inv) = self.lap_cmcccm_with_partials([inv_dec.xi1, inv_dec.xi2, inv_dec.xi3]);
        let pair = self.resolve_inverse(&forward, candidate)?;
        let d_inverse = match pair.inverse_source {
            InverseSource::Parametric => {
                // M⁻¹ = (d, −b; −c, a): ξ₁' = (1−a)/b, ξ₂' = b, ξ₃' = (1−d)/b
                let inv_chain = [
                    [-one / b, (a - one) / b2, T::zero()],
                    [T::zero(), one, T::zero()],
                    [T::zero(), (d - one) / b2, -one / b],
                ];
                chain(&d_xi_inv, &inv_chain)
            }
            InverseSource::Numerical => {
                let fi = &pair.inverse;
                d_forward.clone().map(|df| -(fi * df * fi))
            }
        };
        Ok(TransformJacobian { pair, d_forward, d_inverse })
    }

    /// `CM₁·U·CM₂·Uᵀ·CM₃` and its partials in `(ξ₁, ξ₂, ξ₃)`.
    fn lap_cmcccm_with_partials(&self, xi: [T; 3]) -> (DMatrix<Cplx<T>>, [DMatrix<Cplx<T>>; 3]) {
        let ops = &self.ops;
        let basis = &self.spectra.lap_basis;
        let (u, u_inv) = self.spectra.u(Basis::Laplacian);
        let c = xi.map(|x| gcm_lap(basis, x));
        let dc = xi.map(|x| gcm_lap_derivative(basis, x));
        let middle = matmul(u, &diag_left(&c[1], u_inv, ops), ops);
        let d_middle = matmul(u, &diag_left(&dc[1], u_inv, ops), ops);
        let core = diag_right(&middle, &c[2], ops);
        let f = diag_left(&c[0], &core, ops);
        let d1 = diag_left(&dc[0], &core, ops);
        let d2 = diag_left(&c[0], &diag_right(&d_middle, &c[2], ops), ops);
        let d3 = diag_left(&c[0], &diag_right(&middle, &dc[2], ops), ops);
        (f, [d1, d2, d3])
    }

    /// Additivity, unitarity and invertibility measurements for a pair of
    /// operators of the same variant. Never fails on large deviations; only
    /// reports them.
    pub fn property_diagnostics(&self, op1: &GlctOperator<T>, op2: &GlctOperator<T>) -> Result<PropertyReport> {
        let variant = match (op1.variant(), op2.variant()) {
            (Some(v1), Some(v2)) if v1 == v2 => v1,
            _ => return Err(GlctError::invalid("property diagnostics need two operators of one GLCT variant")),
        };
        let composed = op2.params().compose(op1.params());
        let cascade = matmul(op2.forward(), op1.forward(), &self.ops);
        let (additivity_deviation, additivity_error) = match self.forward_matrix(variant, &composed) {
            Ok(direct) => (Some((cascade - direct).norm().to_f64_lossy()), None),
            Err(e) => (None, Some(e.to_string())),
        };
        let p = |m: &LctParams<T>| [m.a, m.b, m.c, m.d].map(|v| v.to_f64_lossy());
        Ok(PropertyReport {
            variant,
            m1: p(op1.params()),
            m2: p(op2.params()),
            additivity_deviation,
            additivity_error,
            unitarity_deviation: [op1.diagnostics.unitarity_deviation, op2.diagnostics.unitarity_deviation],
            inverse_residual: [op1.diagnostics.inverse_residual, op2.diagnostics.inverse_residual],
            parametric_inverse_residual: [
                op1.diagnostics.parametric_inverse_residual,
                op2.diagnostics.parametric_inverse_residual,
            ],
        })
    }
}

fn chain<T: Real>(d_xi: &[DMatrix<Cplx<T>>; 3], jac: &[[T; 3]; 3]) -> [DMatrix<Cplx<T>>; 3] {
    std::array::from_fn(|p| {
        let mut acc = DMatrix::zeros(d_xi[0].nrows(), d_xi[0].ncols());
        for (k, dk) in d_xi.iter().enumerate() {
            if jac[k][p] != T::zero() {
                acc += dk * creal(jac[k][p]);
            }
        }
        acc
    })
}

/// Measured cascade/unitarity/invertibility deviations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub variant: Variant,
    pub m1: [f64; 4],
    pub m2: [f64; 4],
    /// `‖F^{M₂}F^{M₁} − F^{M₂M₁}‖_F`, absent when `M₂M₁` is not admissible.
    pub additivity_deviation: Option<f64>,
    pub additivity_error: Option<String>,
    pub unitarity_deviation: [f64; 2],
    pub inverse_residual: [f64; 2],
    pub parametric_inverse_residual: [f64; 2],
}

/// Builds a single GLCT operator directly from a graph.
pub fn glct_operator<T: Real>(
    variant: Variant,
    g: &Graph<T>,
    m: &LctParams<T>,
    scaling: ScalingConfig<T>,
) -> Result<GlctOperator<T>> {
    let factory = TransformFactory::new(g, FactoryConfig { scaling, ..FactoryConfig::default() })?;
    factory.glct(variant, m)
}

/// `exp` of a complex diagonal, exposed for callers assembling custom chirps.
pub fn exp_diagonal<T: Real>(d: &DVector<Cplx<T>>) -> DVector<Cplx<T>> {
    d.map(exp_c)
}
