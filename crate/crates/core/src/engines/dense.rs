//! Lindblad integration on full density matrices.
//!
//! Jumps are materialized through `to_dense` and then handled as generic
//! sparse matrices, so this tier does not reuse any of the structured
//! shortcuts that the other engines rely on.

use nalgebra::DMatrix;

use crate::codes::JumpSet;
use crate::error::{Error, Result};
use crate::opcore::dense::{to_dense, trace_norm, DensityMatrix, C64};

pub const MAX_LINDBLAD_QUBITS: usize = 7;
/// Step doubling stops once two refinements differ by less than this in trace norm.
pub const STEP_TOL: f64 = 1e-8;
/// Allowed trace drift and negative-eigenvalue floor.
pub const PHYSICAL_TOL: f64 = 1e-8;

type Entry = (usize, usize, C64);

struct Liouvillian {
    jumps: Vec<Vec<Entry>>,
    /// `sum_j L_j^dag L_j`.
    k: DMatrix<C64>,
}

impl Liouvillian {
    fn new(set: &JumpSet) -> Result<Self> {
        let n = set.n();
        let dim = 1usize << n;
        let mut k = DMatrix::zeros(dim, dim);
        let mut jumps = Vec::new();
        for j in set.all_jumps() {
            if j.rate() == 0.0 {
                continue;
            }
            let m = to_dense(j, n)?.0;
            let mut entries = Vec::new();
            for c in 0..dim {
                for r in 0..dim {
                    let v = m[(r, c)];
                    if v != C64::new(0.0, 0.0) {
                        entries.push((r, c, v));
                    }
                }
            }
            k += m.adjoint() * &m;
            jumps.push(entries);
        }
        Ok(Self { jumps, k })
    }

    fn rhs(&self, rho: &DMatrix<C64>) -> DMatrix<C64> {
        let mut out = (&self.k * rho + rho * &self.k) * C64::new(-0.5, 0.0);
        for entries in &self.jumps {
            for &(r, c, v) in entries {
                for &(r2, c2, v2) in entries {
                    out[(r, r2)] += v * rho[(c, c2)] * v2.conj();
                }
            }
        }
        out
    }

    fn rk4(&self, rho: &DMatrix<C64>, h: f64, steps: usize) -> DMatrix<C64> {
        let mut y = rho.clone();
        let half = C64::new(0.5 * h, 0.0);
        let full = C64::new(h, 0.0);
        let sixth = C64::new(h / 6.0, 0.0);
        for _ in 0..steps {
            let k1 = self.rhs(&y);
            let k2 = self.rhs(&(&y + &k1 * half));
            let k3 = self.rhs(&(&y + &k2 * half));
            let k4 = self.rhs(&(&y + &k3 * full));
            y += (k1 + k2 * C64::new(2.0, 0.0) + k3 * C64::new(2.0, 0.0) + k4) * sixth;
        }
        y
    }

    fn rate_bound(&self) -> f64 {
        (0..self.k.nrows()).map(|r| self.k.row(r).iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
    }
}

/// Density matrix at each grid time, starting from `rho0` at `t = 0`.
pub fn lindblad_dense_evolve(rho0: &DensityMatrix, jumps: &JumpSet, t_grid: &[f64]) -> Result<Vec<DensityMatrix>> {
    let n = jumps.n();
    if n > MAX_LINDBLAD_QUBITS {
        return Err(Error::DimensionGuard { max: MAX_LINDBLAD_QUBITS, requested: n });
    }
    if rho0.dim() != 1 << n {
        return Err(Error::DimensionMismatch { expected: n, got: rho0.dim().trailing_zeros() as usize });
    }
    let l = Liouvillian::new(jumps)?;
    let bound = l.rate_bound();
    let mut rho = rho0.0.clone();
    let mut t = 0.0;
    let mut out = Vec::with_capacity(t_grid.len());
    for &target in t_grid {
        let span = target - t;
        if span < 0.0 {
            return Err(Error::InvalidConfig("t_grid must be sorted and non-negative".into()));
        }
        if span > 0.0 {
            let mut steps = ((span * bound / 0.5).ceil() as usize).max(1);
            let mut coarse = l.rk4(&rho, span / steps as f64, steps);
            loop {
                if steps > 1 << 22 {
                    return Err(Error::StepSizeFailure { t0: t, t1: target });
                }
                steps *= 2;
                let fine = l.rk4(&rho, span / steps as f64, steps);
                let diff = trace_norm(&(&fine - &coarse));
                coarse = fine;
                if diff < STEP_TOL {
                    break;
                }
            }
            rho = coarse;
        }
        t = target;
        let state = DensityMatrix(rho.clone());
        let tr = state.trace();
        if (tr.re - 1.0).abs() > PHYSICAL_TOL {
            return Err(Error::Unphysical(format!("trace {} at t = {target}", tr.re)));
        }
        let min = state.min_eigenvalue();
        if min < -PHYSICAL_TOL {
            return Err(Error::Unphysical(format!("eigenvalue {min:.3e} at t = {target}")));
        }
        out.push(state);
    }
    Ok(out)
}
