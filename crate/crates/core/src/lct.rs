//! `SL(2,ℝ)` parameter matrices and their two factorizations.
//!
//! * chirp · scale · rotation: `M = [1 0; ξ 1]·[σ 0; 0 1/σ]·R(απ/2)`
//! * chirp · chirp-convolution · chirp: `M = [1 0; ξ₁ 1]·[1 b; 0 1]·[1 0; ξ₃ 1]`,
//!   with the middle factor written as `[0 −1; 1 0]·[1 0; ξ₂ 1]·[0 1; −1 0]`.

use serde::{Deserialize, Serialize};

use crate::error::{GlctError, Result};
use crate::scalar::Real;

/// Default lower bound on `|b|` for the chirp-convolution factorization.
pub const DEFAULT_B_MIN: f64 = 0.1;

/// Determinant tolerance for [`LctParams::new`].
pub const DET_TOL: f64 = 1e-10;

/// Products within this distance of the identity are snapped to it.
const IDENTITY_SNAP: f64 = 1e-12;

/// The 2×2 parameter matrix `M = (a, b; c, d)` with `ad − bc = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LctParams<T> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub d: T,
}

impl<T: Real> LctParams<T> {
    pub fn new(a: T, b: T, c: T, d: T) -> Result<Self> {
        let m = Self { a, b, c, d };
        if ![a, b, c, d].iter().all(|v| v.is_finite()) {
            return Err(GlctError::invalid("LCT parameters must be finite"));
        }
        let det = m.det();
        if (det - T::one()).abs() > T::lit(DET_TOL).max(T::lit(1e2) * T::default_epsilon()) {
            return Err(GlctError::invalid(format!("ad - bc = {det}, expected 1")));
        }
        Ok(m)
    }

    /// Completes `(a, b, d)` with `c = (ad − 1)/b`.
    pub fn from_abd(a: T, b: T, d: T) -> Result<Self> {
        if b == T::zero() {
            return Err(GlctError::invalid("b = 0 leaves c undetermined"));
        }
        Self::new(a, b, (a * d - T::one()) / b, d)
    }

    pub fn identity() -> Self {
        Self { a: T::one(), b: T::zero(), c: T::zero(), d: T::one() }
    }

    /// Rotation `(cos θ, sin θ; −sin θ, cos θ)` with `θ = απ/2`, the parameter
    /// matrix of an order-α fractional Fourier transform.
    pub fn rotation(alpha: T) -> Self {
        let theta = alpha * T::frac_pi_2();
        let (s, c) = theta.sin_cos();
        Self { a: c, b: s, c: -s, d: c }
    }

    pub fn det(&self) -> T {
        self.a * self.d - self.b * self.c
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity()
    }

    /// `M⁻¹ = (d, −b; −c, a)`.
    pub fn inverse(&self) -> Self {
        Self { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    /// Matrix product `self · rhs`; results within 1e-12 of the identity
    /// collapse to it.
    pub fn compose(&self, rhs: &Self) -> Self {
        let m = Self {
            a: self.a * rhs.a + self.b * rhs.c,
            b: self.a * rhs.b + self.b * rhs.d,
            c: self.c * rhs.a + self.d * rhs.c,
            d: self.c * rhs.b + self.d * rhs.d,
        };
        let snap = T::lit(IDENTITY_SNAP);
        let id = Self::identity();
        if (m.a - id.a).abs() < snap && m.b.abs() < snap && m.c.abs() < snap && (m.d - id.d).abs() < snap {
            id
        } else {
            m
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        (self.a - other.a).abs().max((self.b - other.b).abs()).max((self.c - other.c).abs()).max((self.d - other.d).abs())
    }
}

/// Chirp rate, scale and fractional order of the chirp · scale · rotation form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CddhfsDecomposition<T> {
    pub xi: T,
    pub sigma: T,
    pub alpha: T,
}

pub fn decompose_cddhfs<T: Real>(m: &LctParams<T>) -> Result<CddhfsDecomposition<T>> {
    let r2 = m.a * m.a + m.b * m.b;
    if r2 == T::zero() {
        return Err(GlctError::invalid("a = b = 0 has no scale/rotation factorization"));
    }
    Ok(CddhfsDecomposition {
        xi: (m.a * m.c + m.b * m.d) / r2,
        sigma: r2.sqrt(),
        alpha: T::lit(2.0) / T::pi() * m.b.atan2(m.a),
    })
}

impl<T: Real> CddhfsDecomposition<T> {
    /// Multiplies the three factors back together.
    pub fn reconstruct(&self) -> LctParams<T> {
        let (s, c) = (self.alpha * T::frac_pi_2()).sin_cos();
        let sg = self.sigma;
        LctParams {
            a: sg * c,
            b: sg * s,
            c: self.xi * sg * c - s / sg,
            d: self.xi * sg * s + c / sg,
        }
    }
}

/// Chirp rates of the chirp · chirp-convolution · chirp form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CmCcCmDecomposition<T> {
    pub xi1: T,
    pub xi2: T,
    pub xi3: T,
}

/// `ξ₁ = (d−1)/b`, `ξ₂ = −b`, `ξ₃ = (a−1)/b`; the identity maps to zeros.
pub fn decompose_cmcccm<T: Real>(m: &LctParams<T>, b_min: T) -> Result<CmCcCmDecomposition<T>> {
    if m.is_identity() {
        return Ok(CmCcCmDecomposition { xi1: T::zero(), xi2: T::zero(), xi3: T::zero() });
    }
    if m.b.abs() < b_min {
        return Err(GlctError::invalid(format!("|b| = {} is below b_min = {b_min}", m.b.abs())));
    }
    Ok(CmCcCmDecomposition { xi1: (m.d - T::one()) / m.b, xi2: -m.b, xi3: (m.a - T::one()) / m.b })
}

impl<T: Real> CmCcCmDecomposition<T> {
    /// Closed form of the five-factor product.
    pub fn reconstruct(&self) -> LctParams<T> {
        let b = -self.xi2;
        let d = self.xi1 * b + T::one();
        LctParams { a: T::one() + b * self.xi3, b, c: self.xi1 + d * self.xi3, d }
    }
}
