//! Dense complex matrices over `2^n`-dimensional registers.
//!
//! This is the oracle tier: everything here is built from explicit matrix
//! entries and is only practical for small registers.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::jump::StructuredJump;
use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Largest register `to_dense` will materialize.
pub const MAX_DENSE_QUBITS: usize = 12;

/// Default absolute tolerance for dense checks.
pub const DENSE_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct DenseOperator(pub DMatrix<C64>);

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector(pub DVector<C64>);

#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix(pub DMatrix<C64>);

fn dim_guard(n: usize) -> Result<usize> {
    if n == 0 || n > MAX_DENSE_QUBITS {
        return Err(Error::DimensionGuard { max: MAX_DENSE_QUBITS, requested: n });
    }
    Ok(1 << n)
}

pub fn to_dense(jump: &StructuredJump, n: usize) -> Result<DenseOperator> {
    let dim = dim_guard(n)?;
    if jump.n() != n {
        return Err(Error::DimensionMismatch { expected: n, got: jump.n() });
    }
    let mut m = DMatrix::zeros(dim, dim);
    for s in 0..dim as u64 {
        if jump.acts_on(s) {
            m[((s ^ jump.flip.mask()) as usize, s as usize)] = C64::new(jump.amplitude, 0.0);
        }
    }
    Ok(DenseOperator(m))
}

impl DenseOperator {
    pub fn identity(n: usize) -> Result<Self> {
        let dim = dim_guard(n)?;
        Ok(Self(DMatrix::identity(dim, dim)))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn mul(&self, other: &DenseOperator) -> Self {
        Self(&self.0 * &other.0)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(self.0.map(|z| z * s))
    }

    /// Largest absolute off-diagonal entry.
    pub fn max_off_diagonal(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for c in 0..d {
            for r in 0..d {
                if r != c {
                    worst = worst.max(self.0[(r, c)].norm());
                }
            }
        }
        worst
    }

    pub fn max_abs_diff(&self, other: &DenseOperator) -> f64 {
        (&self.0 - &other.0).iter().fold(0.0, |m, z| m.max(z.norm()))
    }
}

/// Single-qubit Pauli matrices embedded by Kronecker products, qubit 0 being
/// the least significant tensor factor.
pub mod pauli {
    use super::*;

    fn kron_embed(single: &DMatrix<C64>, qubit: usize, n: usize) -> DMatrix<C64> {
        let id = DMatrix::<C64>::identity(2, 2);
        let mut out = DMatrix::<C64>::identity(1, 1);
        // most significant factor first
        for q in (0..n).rev() {
            let f = if q == qubit { single } else { &id };
            out = out.kronecker(f);
        }
        out
    }

    pub fn x(qubit: usize, n: usize) -> DMatrix<C64> {
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
        );
        kron_embed(&m, qubit, n)
    }

    pub fn z(qubit: usize, n: usize) -> DMatrix<C64> {
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(-1.0, 0.0)],
        );
        kron_embed(&m, qubit, n)
    }

    /// `|a><b|` on one qubit.
    pub fn ket_bra(a: usize, b: usize, qubit: usize, n: usize) -> DMatrix<C64> {
        let mut m = DMatrix::<C64>::zeros(2, 2);
        m[(a, b)] = C64::new(1.0, 0.0);
        kron_embed(&m, qubit, n)
    }

    pub fn identity(n: usize) -> DMatrix<C64> {
        DMatrix::identity(1 << n, 1 << n)
    }
}

impl StateVector {
    pub fn basis(bits: u64, n: usize) -> Result<Self> {
        let dim = dim_guard(n)?;
        let mut v = DVector::zeros(dim);
        v[bits as usize] = C64::new(1.0, 0.0);
        Ok(Self(v))
    }

    /// `alpha |0...0> + beta |1...1>`, normalized.
    pub fn logical(alpha: C64, beta: C64, n: usize) -> Result<Self> {
        let dim = dim_guard(n)?;
        let norm = (alpha.norm_sqr() + beta.norm_sqr()).sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidConfig("zero logical state".into()));
        }
        let mut v = DVector::zeros(dim);
        v[0] = alpha / norm;
        v[dim - 1] = beta / norm;
        Ok(Self(v))
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm() - 1.0).abs() <= tol
    }

    pub fn projector(&self) -> DensityMatrix {
        DensityMatrix(&self.0 * self.0.adjoint())
    }
}

impl DensityMatrix {
    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        (&self.0 - self.0.adjoint()).iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    /// Eigenvalues of the Hermitian part.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let h = (&self.0 + self.0.adjoint()).map(|z| z * 0.5);
        h.symmetric_eigenvalues().iter().copied().collect()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().into_iter().fold(f64::INFINITY, f64::min)
    }

    /// Checks Hermiticity, unit trace and positivity within `tol`.
    pub fn validate(&self, tol: f64) -> Result<()> {
        let herm = self.hermiticity_defect();
        if herm > tol {
            return Err(Error::Unphysical(format!("hermiticity defect {herm:.3e}")));
        }
        let tr = self.trace();
        if (tr.re - 1.0).abs() > tol || tr.im.abs() > tol {
            return Err(Error::Unphysical(format!("trace {tr}")));
        }
        let min = self.min_eigenvalue();
        if min < -tol {
            return Err(Error::Unphysical(format!("negative eigenvalue {min:.3e}")));
        }
        Ok(())
    }

    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.0[(i, i)].re).collect()
    }
}

/// Trace norm of a Hermitian matrix.
pub fn trace_norm(m: &DMatrix<C64>) -> f64 {
    let h = (m + m.adjoint()).map(|z| z * 0.5);
    h.symmetric_eigenvalues().iter().map(|e| e.abs()).sum()
}
