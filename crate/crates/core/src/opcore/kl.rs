//! Knill-Laflamme conditions, checked on dense matrices.

use nalgebra::{DMatrix, DVector};

use super::bits::XString;
use super::dense::{DenseOperator, StateVector, C64};
use crate::error::{Error, Result};

/// Register size above which the dense checks refuse to run.
pub const MAX_KL_QUBITS: usize = 10;

#[derive(Clone, Debug, PartialEq)]
pub struct KlReport {
    /// `alpha[(i, j)]` over the identity followed by the supplied errors,
    /// read off from the first codeword's diagonal element.
    pub alpha: DMatrix<C64>,
    /// Largest deviation of any `P E_j^dag E_i P` from `alpha_ij P`.
    pub max_deviation: f64,
    pub satisfied: bool,
}

/// Checks the codewords are orthonormal and returns their dimension.
fn validate_codewords(codewords: &[StateVector]) -> Result<usize> {
    let first = codewords.first().ok_or_else(|| Error::InvalidConfig("no codewords".into()))?;
    let dim = first.0.len();
    if dim > 1 << MAX_KL_QUBITS {
        return Err(Error::DimensionGuard { max: MAX_KL_QUBITS, requested: dim.trailing_zeros() as usize });
    }
    let mut worst = 0.0f64;
    for (a, u) in codewords.iter().enumerate() {
        if u.0.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: u.0.len() });
        }
        for (b, v) in codewords.iter().enumerate() {
            let target = if a == b { 1.0 } else { 0.0 };
            worst = worst.max((u.0.dotc(&v.0) - C64::new(target, 0.0)).norm());
        }
    }
    if worst > 1e-9 {
        return Err(Error::NonOrthonormalCodewords(worst));
    }
    Ok(dim)
}

fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Largest entry of `V (G - a I) V^dag`, where the columns of `V` are the
/// orthonormal vectors spanning the projector and `G` holds their overlaps.
/// Equals the entrywise deviation of `P M P` from `a P`.
fn block_deviation(basis: &[DVector<C64>], gram: &DMatrix<C64>, a: C64) -> f64 {
    let k = basis.len();
    let dim = basis[0].len();
    let mut d = gram.clone();
    for i in 0..k {
        d[(i, i)] -= a;
    }
    // rows where every basis vector vanishes contribute nothing
    let support: Vec<usize> = (0..dim).filter(|&r| basis.iter().any(|b| b[r] != C64::new(0.0, 0.0))).collect();
    let v = DMatrix::from_fn(support.len(), k, |r, c| basis[c][support[r]]);
    max_abs(&(&v * d * v.adjoint()))
}

/// Standard condition `P E_j^dag E_i P = alpha_ij P` over an error list.
///
/// The no-error case is always part of the set, so it enters as index 0;
/// without it a lone logical operator would pass trivially.
pub fn kl_check(codewords: &[StateVector], errors: &[DenseOperator], tol: f64) -> Result<KlReport> {
    let dim = validate_codewords(codewords)?;
    let basis: Vec<DVector<C64>> = codewords.iter().map(|c| c.0.clone()).collect();
    let mut images = vec![basis.clone()];
    for e in errors {
        if e.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: e.dim() });
        }
        images.push(basis.iter().map(|c| &e.0 * c).collect());
    }
    let k = images.len();
    let mut alpha = DMatrix::zeros(k, k);
    let mut max_deviation = 0.0f64;
    for (i, ei) in images.iter().enumerate() {
        for (j, ej) in images.iter().enumerate() {
            let gram = DMatrix::from_fn(basis.len(), basis.len(), |a, b| ej[a].dotc(&ei[b]));
            let a = gram[(0, 0)];
            alpha[(i, j)] = a;
            max_deviation = max_deviation.max(block_deviation(&basis, &gram, a));
        }
    }
    Ok(KlReport { alpha, max_deviation, satisfied: max_deviation <= tol })
}

/// `X v` for a unit-amplitude X-string, as a basis permutation.
fn x_apply(x: XString, v: &DVector<C64>) -> DVector<C64> {
    let mask = x.mask() as usize;
    DVector::from_fn(v.len(), |s, _| v[s ^ mask])
}

/// Condition between error subspaces: with `P = E P_C E^dag` for the base
/// error, `P F_j^dag F_k P = delta_jk P` for two probes of the same order.
///
/// `ell` is the correctable weight of the code; the condition is only
/// claimed for `weight(base) + weight(probe) <= ell`.
pub fn kl_intersubspace_check(
    codewords: &[StateVector],
    ell: usize,
    base: XString,
    probe_j: XString,
    probe_k: XString,
    tol: f64,
) -> Result<bool> {
    let q = base.weight();
    let p = probe_j.weight();
    if probe_k.weight() != p {
        return Err(Error::InvalidConfig(format!("probe orders differ: {} vs {}", p, probe_k.weight())));
    }
    if q + p > ell {
        return Err(Error::OrderGuard { sum: q + p, ell });
    }
    let dim = validate_codewords(codewords)?;
    for x in [base, probe_j, probe_k] {
        if 1usize << x.n() != dim {
            return Err(Error::DimensionMismatch { expected: dim.trailing_zeros() as usize, got: x.n() });
        }
    }
    let shifted: Vec<DVector<C64>> = codewords.iter().map(|c| x_apply(base, &c.0)).collect();
    let fj: Vec<_> = shifted.iter().map(|u| x_apply(probe_j, u)).collect();
    let fk: Vec<_> = shifted.iter().map(|u| x_apply(probe_k, u)).collect();
    let gram = DMatrix::from_fn(shifted.len(), shifted.len(), |a, b| fj[a].dotc(&fk[b]));
    let delta = if probe_j == probe_k { 1.0 } else { 0.0 };
    Ok(block_deviation(&shifted, &gram, C64::new(delta, 0.0)) <= tol)
}
