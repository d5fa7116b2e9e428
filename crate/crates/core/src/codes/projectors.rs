//! Projector bookkeeping inside the trickle-down jumps.

use std::collections::BTreeSet;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::RepetitionCode;
use crate::error::{Error, Result};
use crate::opcore::bits::low_mask;
use crate::opcore::dense::{pauli, C64};
use crate::opcore::indicator::{IndicatorSet, QubitRole, MAX_EXPLICIT_QUBITS};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectorCount {
    pub l_size: usize,
    pub ell: usize,
    pub count: u128,
    /// `None` where the bound is undefined.
    pub bound: Option<f64>,
}

fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Number of coset-pair projectors carried by one trickle-down jump:
/// `sum_{j=1..ell} C(l_size - 1, j - 1)`.
pub fn n_proj_count(l_size: usize, ell: usize) -> Result<u128> {
    if ell == 0 || l_size == 0 {
        return Err(Error::InvalidConfig(format!("n_proj needs l_size, ell >= 1 (got {l_size}, {ell})")));
    }
    Ok((1..=ell as u64).map(|j| binomial(l_size as u64 - 1, j - 1)).sum())
}

/// Entropy lower bound on [`n_proj_count`], defined for `ell >= 2` and
/// `ell / l_size < 1/2`.
pub fn n_proj_lower_bound(l_size: usize, ell: usize) -> Result<f64> {
    if ell < 2 {
        return Err(Error::NotApplicable(format!("bound divides by zero at ell = {ell}")));
    }
    if 2 * ell >= l_size {
        return Err(Error::NotApplicable(format!("bound needs ell/l_size < 1/2 (got {ell}/{l_size})")));
    }
    let a = (ell - 1) as f64;
    let r = 1.0 - a / (l_size - 1) as f64;
    Ok(2f64.powf(4.0 * a * r) / (8.0 * a * r).sqrt())
}

impl ProjectorCount {
    pub fn new(l_size: usize, ell: usize) -> Result<Self> {
        let count = n_proj_count(l_size, ell)?;
        let bound = n_proj_lower_bound(l_size, ell).ok();
        Ok(Self { l_size, ell, count, bound })
    }
}

/// Distinct coset pairs `{e, complement(e)}` inside trickle jump `qubit`'s
/// domain, found by scanning every basis state.
pub fn enumerate_trickle_projectors(code: RepetitionCode, qubit: usize) -> Result<usize> {
    let n = code.n();
    if n > MAX_EXPLICIT_QUBITS {
        return Err(Error::DimensionGuard { max: MAX_EXPLICIT_QUBITS, requested: n });
    }
    let domain = IndicatorSet::CosetWeight { lo: 1, hi: code.ell(), qubit: Some(QubitRole::Erroneous(qubit)) };
    let mask = low_mask(n);
    let pairs: BTreeSet<u64> = domain.enumerate(n)?.into_iter().map(|b| b.min(!b & mask)).collect();
    Ok(pairs.len())
}

/// Outcome of checking the flip/projector identity for one `(i, j)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectorRelationReport {
    pub qubit: usize,
    pub order: usize,
    /// `|1><0|_i P0 = |1><1|_i sum_k P_ik`, read literally.
    pub literal_holds: bool,
    /// `|0><1|_i P0 = X_i |1><1|_i sum_k P_ik`: the flip sits on the right
    /// side too, and it acts on qubits that are erroneous relative to 0_L.
    pub flip_reading_holds: bool,
    /// Same reading with 0 and 1 interchanged.
    pub mirrored_holds: bool,
    /// Summing both readings gives `X_i sum_k P_ik`, the trickle-down jump body.
    pub sum_is_trickle: bool,
    /// Nonzero `(row, col)` entries of the literal left side.
    pub literal_lhs_support: Vec<(u64, u64)>,
    /// Nonzero `(row, col)` entries of the literal right side.
    pub literal_rhs_support: Vec<(u64, u64)>,
}

impl ProjectorRelationReport {
    /// The adopted reading holds together with its mirror.
    pub fn holds(&self) -> bool {
        self.flip_reading_holds && self.mirrored_holds && self.sum_is_trickle
    }
}

fn support(m: &DMatrix<C64>) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    for c in 0..m.ncols() {
        for r in 0..m.nrows() {
            if m[(r, c)].norm() > 1e-12 {
                out.push((r as u64, c as u64));
            }
        }
    }
    out
}

fn close(a: &DMatrix<C64>, b: &DMatrix<C64>) -> bool {
    (a - b).iter().all(|z| z.norm() <= 1e-12)
}

fn diag_projector(n: usize, keep: impl Fn(u64) -> bool) -> DMatrix<C64> {
    let dim = 1usize << n;
    DMatrix::from_fn(dim, dim, |r, c| if r == c && keep(r as u64) { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) })
}

/// Dense evaluation of the identity relating the order-`j` projectors
/// around each codeword to the coset-pair projectors `P_{i,k}^{(j)}`.
pub fn verify_projector_relation(code: RepetitionCode, i: usize, j: usize) -> Result<ProjectorRelationReport> {
    let n = code.n();
    if n > 10 {
        return Err(Error::DimensionGuard { max: 10, requested: n });
    }
    if i >= n {
        return Err(Error::DimensionMismatch { expected: n, got: i + 1 });
    }
    if j == 0 || j > code.ell() {
        return Err(Error::TruncationOutOfRange { m: j, ell: code.ell() });
    }
    let mask = low_mask(n);
    let w = |b: u64| b.count_ones() as usize;
    // P_b^{(j)}: states j flips away from b_L
    let p0 = diag_projector(n, |b| w(b) == j);
    let p1 = diag_projector(n, |b| w(!b & mask) == j);
    // sum_k P_{i,k}^{(j)}: coset pairs {e, e-bar} for weight-j patterns e containing qubit i
    let pik = diag_projector(n, |b| (w(b) == j && b >> i & 1 == 1) || (w(!b & mask) == j && !b >> i & 1 == 1));
    let xi = pauli::x(i, n);
    let k10 = pauli::ket_bra(1, 0, i, n);
    let k01 = pauli::ket_bra(0, 1, i, n);
    let k11 = pauli::ket_bra(1, 1, i, n);
    let k00 = pauli::ket_bra(0, 0, i, n);

    let lit_lhs = &k10 * &p0;
    let lit_rhs = &k11 * &pik;
    let flip_lhs = &k01 * &p0;
    let flip_rhs = &xi * &k11 * &pik;
    let mir_lhs = &k10 * &p1;
    let mir_rhs = &xi * &k00 * &pik;
    let sum_is_trickle = close(&(&flip_lhs + &mir_lhs), &(&xi * &pik));

    Ok(ProjectorRelationReport {
        qubit: i,
        order: j,
        literal_holds: close(&lit_lhs, &lit_rhs),
        flip_reading_holds: close(&flip_lhs, &flip_rhs),
        mirrored_holds: close(&mir_lhs, &mir_rhs),
        sum_is_trickle,
        literal_lhs_support: support(&lit_lhs),
        literal_rhs_support: support(&lit_rhs),
    })
}
