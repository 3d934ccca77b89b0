//! Eigendecompositions and spectral matrix functions.
//!
//! Two decompositions are provided: [`eig_symmetric`] for real symmetric shift
//! operators, and [`eig_unitary`] for the (normally orthogonal) transform
//! matrices built from them. Both fix ordering and phase conventions so that
//! identical inputs always yield identical bases.

use std::cmp::Ordering;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering as AtomicOrdering};

use nalgebra::{DMatrix, DVector, Schur, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, GlctError, Result};
use crate::scalar::{cabs, cis, cplx, creal, Cplx, Real};

/// Relative tolerance under which two entry magnitudes count as tied when
/// choosing the sign/phase anchor of an eigenvector.
const ANCHOR_TIE: f64 = 1e-9;

// ---------------------------------------------------------------------------
// Operation counting

/// Tallies of dense and diagonal matrix multiplications performed in a run.
///
/// Counters only grow. They are atomic so a single counter can be shared by
/// concurrent grid evaluations.
#[derive(Debug, Default)]
pub struct OpCounter {
    dense: AtomicU64,
    diag: AtomicU64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpCounts {
    pub dense_matmul_count: u64,
    pub diag_matmul_count: u64,
}

impl OpCounts {
    pub fn since(self, earlier: OpCounts) -> OpCounts {
        OpCounts {
            dense_matmul_count: self.dense_matmul_count - earlier.dense_matmul_count,
            diag_matmul_count: self.diag_matmul_count - earlier.diag_matmul_count,
        }
    }
}

impl OpCounter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn dense(&self, k: u64) {
        self.dense.fetch_add(k, AtomicOrdering::Relaxed);
    }

    pub fn diag(&self, k: u64) {
        self.diag.fetch_add(k, AtomicOrdering::Relaxed);
    }

    pub fn counts(&self) -> OpCounts {
        OpCounts {
            dense_matmul_count: self.dense.load(AtomicOrdering::Relaxed),
            diag_matmul_count: self.diag.load(AtomicOrdering::Relaxed),
        }
    }
}

/// Dense product, counted.
pub(crate) fn matmul<T: Real>(a: &DMatrix<Cplx<T>>, b: &DMatrix<Cplx<T>>, ops: &OpCounter) -> DMatrix<Cplx<T>> {
    ops.dense(1);
    a * b
}

/// `diag(d) · m`, counted.
pub(crate) fn diag_left<T: Real>(d: &DVector<Cplx<T>>, m: &DMatrix<Cplx<T>>, ops: &OpCounter) -> DMatrix<Cplx<T>> {
    ops.diag(1);
    let mut out = m.clone();
    for (i, mut row) in out.row_iter_mut().enumerate() {
        row *= d[i];
    }
    out
}

/// `m · diag(d)`, counted.
pub(crate) fn diag_right<T: Real>(m: &DMatrix<Cplx<T>>, d: &DVector<Cplx<T>>, ops: &OpCounter) -> DMatrix<Cplx<T>> {
    ops.diag(1);
    let mut out = m.clone();
    for (j, mut col) in out.column_iter_mut().enumerate() {
        col *= d[j];
    }
    out
}

pub(crate) fn to_complex<T: Real>(m: &DMatrix<T>) -> DMatrix<Cplx<T>> {
    m.map(creal)
}

/// `‖A − I‖_F`.
pub fn identity_deviation<T: Real>(a: &DMatrix<Cplx<T>>) -> T {
    let n = a.nrows();
    let mut acc = T::zero();
    for i in 0..n {
        for j in 0..a.ncols() {
            let z = if i == j { a[(i, j)] - Cplx::new(T::one(), T::zero()) } else { a[(i, j)] };
            acc += z.norm_sqr();
        }
    }
    acc.sqrt()
}

// ---------------------------------------------------------------------------
// Symmetric eigendecomposition

/// Orthogonal eigenbasis of a real symmetric shift operator.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricEigenBasis<T: Real> {
    /// Eigenvectors as columns.
    pub u: DMatrix<T>,
    /// Eigenvalues, ascending.
    pub lambdas: DVector<T>,
}

impl<T: Real> SymmetricEigenBasis<T> {
    pub fn n(&self) -> usize {
        self.lambdas.len()
    }

    /// GFT matrix `U⁻¹ = Uᵀ` as a complex matrix.
    pub fn gft_matrix(&self) -> DMatrix<Cplx<T>> {
        to_complex(&self.u.transpose())
    }

    pub fn reconstruct(&self) -> DMatrix<T> {
        &self.u * DMatrix::from_diagonal(&self.lambdas) * self.u.transpose()
    }
}

fn anchor_index<T: Real>(mags: impl Iterator<Item = T> + Clone) -> usize {
    let max = mags.clone().fold(T::zero(), |m, v| if v > m { v } else { m });
    let cut = max * (T::one() - T::lit(ANCHOR_TIE));
    mags.enumerate().find(|(_, v)| *v >= cut).map(|(i, _)| i).unwrap_or(0)
}

/// Eigendecomposition of a real symmetric matrix.
///
/// Eigenvalues are ascending; each eigenvector is flipped so that its
/// largest-magnitude entry (lowest index among ties) is positive.
pub fn eig_symmetric<T: Real>(x: &DMatrix<T>) -> Result<SymmetricEigenBasis<T>> {
    let n = x.nrows();
    check_dim(n, x.ncols())?;
    if n == 0 {
        return Err(GlctError::invalid("empty matrix"));
    }
    let tol = T::lit(T::SYMMETRY_TOL) * (T::one() + x.amax());
    for i in 0..n {
        for j in (i + 1)..n {
            if (x[(i, j)] - x[(j, i)]).abs() > tol {
                return Err(GlctError::invalid(format!("matrix not symmetric at ({i},{j})")));
            }
        }
    }
    let sym = (x + x.transpose()) * T::lit(0.5);
    let eig = SymmetricEigen::try_new(sym, T::default_epsilon(), 100_000)
        .ok_or_else(|| GlctError::numerical("symmetric eigensolver did not converge"))?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap_or(Ordering::Equal).then(a.cmp(&b))
    });
    let lambdas = DVector::from_iterator(n, order.iter().map(|&k| eig.eigenvalues[k]));
    let mut u = DMatrix::zeros(n, n);
    for (col, &k) in order.iter().enumerate() {
        let v = eig.eigenvectors.column(k);
        let anchor = anchor_index(v.iter().map(|e| e.abs()));
        let sign = if v[anchor] < T::zero() { -T::one() } else { T::one() };
        u.set_column(col, &(v * sign));
    }
    Ok(SymmetricEigenBasis { u, lambdas })
}

// ---------------------------------------------------------------------------
// Unitary (diagonalizable) eigendecomposition

/// Eigendecomposition `F = P·diag(mu)·P⁻¹` of a diagonalizable transform matrix.
#[derive(Debug)]
pub struct UnitarySpectrum<T: Real> {
    p: DMatrix<Cplx<T>>,
    p_inv: DMatrix<Cplx<T>>,
    mu: DVector<Cplx<T>>,
    log_mu: DVector<Cplx<T>>,
    near_cut: Vec<usize>,
    normal: bool,
    residual: T,
    warned: AtomicBool,
}

impl<T: Real> Clone for UnitarySpectrum<T> {
    fn clone(&self) -> Self {
        Self {
            p: self.p.clone(),
            p_inv: self.p_inv.clone(),
            mu: self.mu.clone(),
            log_mu: self.log_mu.clone(),
            near_cut: self.near_cut.clone(),
            normal: self.normal,
            residual: self.residual,
            warned: AtomicBool::new(self.warned.load(AtomicOrdering::Relaxed)),
        }
    }
}

/// Principal logarithm with argument in `(−π, π]`; values within `tol` of −1
/// are pinned to argument `π`.
fn principal_log<T: Real>(z: Cplx<T>, tol: T) -> (Cplx<T>, bool) {
    let modulus = cabs(z);
    let on_cut = cabs(z + creal(T::one())) < tol;
    let arg = if on_cut { T::pi() } else { z.im.atan2(z.re) };
    let arg = if arg <= -T::pi() { T::pi() } else { arg };
    (cplx(modulus.ln(), arg), on_cut)
}

/// Sort key: argument mapped to `[0, 2π)`, with values a hair below `2π`
/// folded to zero.
fn arg_key<T: Real>(z: Cplx<T>) -> T {
    let two_pi = T::two_pi();
    let mut a = z.im.atan2(z.re);
    if a < T::zero() {
        a += two_pi;
    }
    if a >= two_pi - T::lit(1e-12) {
        a = T::zero();
    }
    a
}

/// Eigendecomposition of a diagonalizable complex matrix.
///
/// Eigenvalues are ordered by argument in `[0, 2π)`, ties by real part
/// descending. Eigenvector columns have unit norm and a real positive anchor
/// entry. Normal matrices (the orthogonal GFT matrices of symmetric shift
/// operators) get a unitary `P`; other diagonalizable matrices fall back to
/// triangular back-substitution. A relative reconstruction residual above the
/// type's tolerance is reported as a numerical failure.
pub fn eig_unitary<T: Real>(f: &DMatrix<Cplx<T>>) -> Result<UnitarySpectrum<T>> {
    let n = f.nrows();
    check_dim(n, f.ncols())?;
    if n == 0 {
        return Err(GlctError::invalid("empty matrix"));
    }
    let fnorm = f.norm();
    let schur = Schur::try_new(f.clone(), T::default_epsilon(), 100_000)
        .ok_or_else(|| GlctError::numerical("Schur decomposition did not converge"))?;
    let (q, t) = schur.unpack();

    let mut off = T::zero();
    for i in 0..n {
        for j in (i + 1)..n {
            off += t[(i, j)].norm_sqr();
        }
    }
    let normal = off.sqrt() <= T::lit(1e3) * T::default_epsilon() * (T::one() + fnorm) * T::from_usize_lossy(n);

    let raw_mu: Vec<Cplx<T>> = (0..n).map(|i| t[(i, i)]).collect();
    let raw_p = if normal {
        q
    } else {
        // eigenvectors of the upper-triangular factor, then rotate back
        let mut v = DMatrix::<Cplx<T>>::zeros(n, n);
        let small = T::lit(1e3) * T::default_epsilon() * (T::one() + fnorm);
        for k in 0..n {
            v[(k, k)] = creal(T::one());
            for i in (0..k).rev() {
                let mut s = Cplx::new(T::zero(), T::zero());
                for j in (i + 1)..=k {
                    s += t[(i, j)] * v[(j, k)];
                }
                let denom = t[(i, i)] - t[(k, k)];
                if cabs(denom) <= small {
                    if cabs(s) <= small {
                        continue;
                    }
                    return Err(GlctError::numerical("matrix appears defective (repeated eigenvalue with a Jordan block)"));
                }
                v[(i, k)] = -s / denom;
            }
        }
        q * v
    };

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        let (za, zb) = (raw_mu[a], raw_mu[b]);
        arg_key(za)
            .partial_cmp(&arg_key(zb))
            .unwrap_or(Ordering::Equal)
            .then(zb.re.partial_cmp(&za.re).unwrap_or(Ordering::Equal))
            .then(a.cmp(&b))
    });

    let mut p = DMatrix::<Cplx<T>>::zeros(n, n);
    let mut mu = DVector::<Cplx<T>>::zeros(n);
    for (col, &k) in order.iter().enumerate() {
        let v = raw_p.column(k);
        let norm = v.norm();
        if !(norm > T::zero()) {
            return Err(GlctError::numerical("zero eigenvector"));
        }
        let anchor = anchor_index(v.iter().map(|z| cabs(*z)));
        let phase = v[anchor].conj() / cabs(v[anchor]);
        p.set_column(col, &(v * (phase / creal(norm))));
        mu[col] = raw_mu[k];
    }

    let p_inv = if normal {
        p.adjoint()
    } else {
        p.clone().try_inverse().ok_or_else(|| GlctError::numerical("eigenvector matrix is singular"))?
    };

    let recon = &p * DMatrix::from_diagonal(&mu) * &p_inv;
    let residual = (recon - f).norm() / if fnorm > T::zero() { fnorm } else { T::one() };
    if !(residual <= T::lit(T::RECONSTRUCTION_TOL)) {
        return Err(GlctError::numerical(format!(
            "eigendecomposition residual {residual:e} exceeds tolerance (defective or ill-conditioned matrix)"
        )));
    }

    let cut_tol = T::lit(T::BRANCH_CUT_TOL);
    let mut near_cut = Vec::new();
    let log_mu = DVector::from_iterator(
        n,
        mu.iter().enumerate().map(|(i, &z)| {
            let (l, on_cut) = principal_log(z, cut_tol);
            if on_cut {
                near_cut.push(i);
            }
            l
        }),
    );

    Ok(UnitarySpectrum { p, p_inv, mu, log_mu, near_cut, normal, residual, warned: AtomicBool::new(false) })
}

impl<T: Real> UnitarySpectrum<T> {
    pub fn n(&self) -> usize {
        self.mu.len()
    }

    pub fn p(&self) -> &DMatrix<Cplx<T>> {
        &self.p
    }

    pub fn p_inv(&self) -> &DMatrix<Cplx<T>> {
        &self.p_inv
    }

    /// Eigenvalues in canonical order.
    pub fn mu(&self) -> &DVector<Cplx<T>> {
        &self.mu
    }

    /// `J = diag(mu)`.
    pub fn j(&self) -> DMatrix<Cplx<T>> {
        DMatrix::from_diagonal(&self.mu)
    }

    pub fn is_normal(&self) -> bool {
        self.normal
    }

    /// Relative reconstruction residual `‖F − PJP⁻¹‖_F / ‖F‖_F`.
    pub fn residual(&self) -> T {
        self.residual
    }

    /// Indices of eigenvalues lying on the branch cut at −1.
    pub fn branch_cut_indices(&self) -> &[usize] {
        &self.near_cut
    }

    /// True when a power `t` is ill-defined on the principal branch.
    pub fn branch_sensitive(&self, t: T) -> bool {
        !self.near_cut.is_empty() && t != t.round()
    }

    fn note_branch(&self, t: T) {
        if self.branch_sensitive(t) && !self.warned.swap(true, AtomicOrdering::Relaxed) {
            log::warn!(
                "{} eigenvalue(s) at -1 with non-integer exponent {t}: using the principal branch arg = pi",
                self.near_cut.len()
            );
        }
    }

    /// Diagonal of `J^t`, `mu_i^t = exp(t·Log mu_i)`. Exactly ones at `t = 0`.
    pub fn power_diagonal(&self, t: T) -> DVector<Cplx<T>> {
        if t == T::zero() {
            return DVector::from_element(self.n(), creal(T::one()));
        }
        self.note_branch(t);
        self.log_mu.map(|l| exp_c(l * creal(t)))
    }

    /// Principal logarithms of the eigenvalues.
    pub fn log_diagonal(&self) -> &DVector<Cplx<T>> {
        &self.log_mu
    }
}

#[inline]
pub(crate) fn exp_c<T: Real>(z: Cplx<T>) -> Cplx<T> {
    cis(z.im) * creal(z.re.exp())
}

/// `F^t = P·J^t·P⁻¹`; the identity exactly when `t = 0`.
pub fn fractional_power<T: Real>(s: &UnitarySpectrum<T>, t: T) -> DMatrix<Cplx<T>> {
    if t == T::zero() {
        return DMatrix::identity(s.n(), s.n());
    }
    let d = s.power_diagonal(t);
    let ops = OpCounter::new();
    matmul(&diag_right(&s.p, &d, &ops), &s.p_inv, &ops)
}

/// `log J`, the diagonal matrix of principal eigenvalue logarithms.
pub fn log_of_spectrum<T: Real>(s: &UnitarySpectrum<T>) -> DMatrix<Cplx<T>> {
    DMatrix::from_diagonal(&s.log_mu)
}

/// `d/dt F^t = P·(log J)·J^t·P⁻¹`.
pub fn fractional_power_derivative<T: Real>(s: &UnitarySpectrum<T>, t: T) -> DMatrix<Cplx<T>> {
    let d = s.power_diagonal(t).component_mul(&s.log_mu);
    let ops = OpCounter::new();
    matmul(&diag_right(&s.p, &d, &ops), &s.p_inv, &ops)
}
