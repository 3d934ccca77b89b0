//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display, LowerExp};

use nalgebra::RealField;
use num_complex::Complex;
use num_traits::{FloatConst, FromPrimitive, ToPrimitive};

/// Real floating-point scalar: `f32` or `f64`.
///
/// Numerical thresholds are expressed per type. The `f64` values are the
/// contract values; `f32` thresholds are loosened to what single precision
/// can actually deliver.
pub trait Real:
    RealField + Copy + FromPrimitive + ToPrimitive + FloatConst + Default + Display + LowerExp + Debug + Send + Sync + 'static
{
    /// Maximum accepted `‖F_inv·F − I‖_F` for a transform pair.
    const INVERSE_RESIDUAL_TOL: f64;
    /// Maximum accepted relative reconstruction error of an eigendecomposition.
    const RECONSTRUCTION_TOL: f64;
    /// Distance from −1 under which an eigenvalue sits on the branch cut.
    const BRANCH_CUT_TOL: f64;
    /// Absolute symmetry tolerance for shift operators.
    const SYMMETRY_TOL: f64;

    /// Converts an `f64` literal; never fails for the supported types.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    #[inline]
    fn from_usize_lossy(v: usize) -> Self {
        Self::from_usize(v).expect("usize representable")
    }
}

impl Real for f64 {
    const INVERSE_RESIDUAL_TOL: f64 = 1e-6;
    const RECONSTRUCTION_TOL: f64 = 1e-6;
    const BRANCH_CUT_TOL: f64 = 1e-9;
    const SYMMETRY_TOL: f64 = 1e-12;
}

impl Real for f32 {
    const INVERSE_RESIDUAL_TOL: f64 = 1e-3;
    const RECONSTRUCTION_TOL: f64 = 1e-3;
    const BRANCH_CUT_TOL: f64 = 1e-5;
    const SYMMETRY_TOL: f64 = 1e-5;
}

/// Complex counterpart of a [`Real`] scalar.
pub type Cplx<T> = Complex<T>;

#[inline]
pub(crate) fn cplx<T: Real>(re: T, im: T) -> Cplx<T> {
    Complex::new(re, im)
}

#[inline]
pub(crate) fn creal<T: Real>(re: T) -> Cplx<T> {
    Complex::new(re, T::zero())
}

/// Modulus `|z|`.
#[inline]
pub(crate) fn cabs<T: Real>(z: Cplx<T>) -> T {
    nalgebra::ComplexField::modulus(z)
}

/// `exp(i·theta)` without going through the generic complex exponential.
#[inline]
pub(crate) fn cis<T: Real>(theta: T) -> Cplx<T> {
    Complex::new(theta.cos(), theta.sin())
}
