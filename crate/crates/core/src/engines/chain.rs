//! Exact error-weight chain.
//!
//! For a permutation-symmetric scheme the populations only depend on the
//! Hamming weight `w` relative to the initial codeword, so the dynamics
//! reduces to an `(n+1)`-state continuous-time chain. Transients are
//! computed by uniformization, which keeps every term non-negative and
//! therefore preserves relative accuracy of tiny tail probabilities.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::index::{lowest_bits, JumpIndex};
use super::record::TimeSeries;
use crate::codes::{JumpSet, RepetitionCode, Scheme};
use crate::error::{Error, Result};

/// Largest `Lambda * h` handled in one uniformization block.
const BLOCK_MEAN: f64 = 50.0;
const POISSON_FLOOR: f64 = 1e-30;
const MAX_BLOCKS: f64 = 1e9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightChainGenerator {
    pub n: usize,
    pub scheme: Scheme,
    /// Row `w`, column `w'`: rate of `w -> w'`. Rows sum to zero.
    pub q_matrix: DMatrix<f64>,
}

/// Weight-`w` strings used to read off and cross-check one generator row.
fn representatives(w: usize, n: usize) -> Vec<u64> {
    let low = lowest_bits(w);
    let mut reps = vec![low, low << (n - w)];
    if w > 0 && w < n {
        let spread = (0..w).fold(0u64, |acc, k| acc | 1 << (k * n / w));
        reps.push(spread);
    }
    reps.dedup();
    reps
}

pub fn weight_chain_generator(code: RepetitionCode, jumps: &JumpSet) -> Result<WeightChainGenerator> {
    let n = code.n();
    if jumps.n() != n {
        return Err(Error::DimensionMismatch { expected: n, got: jumps.n() });
    }
    let index = JumpIndex::new(jumps);
    let mut q = DMatrix::zeros(n + 1, n + 1);
    for w in 0..=n {
        let mut reference: Option<Vec<f64>> = None;
        for rep in representatives(w, n) {
            let mut row = vec![0.0; n + 1];
            index.for_each_applicable(jumps, rep, |_, to, rate| {
                row[to.count_ones() as usize] += rate;
            });
            row[w] = 0.0;
            match &reference {
                None => reference = Some(row),
                Some(r) => {
                    let scale = r.iter().fold(1.0f64, |m, x| m.max(x.abs()));
                    if r.iter().zip(&row).any(|(a, b)| (a - b).abs() > 1e-12 * scale) {
                        return Err(Error::NonSymmetricScheme { weight: w });
                    }
                }
            }
        }
        let row = reference.expect("at least one representative");
        let mut out = 0.0;
        for (to, rate) in row.into_iter().enumerate() {
            if to != w {
                q[(w, to)] = rate;
                out += rate;
            }
        }
        q[(w, w)] = -out;
    }
    Ok(WeightChainGenerator { n, scheme: jumps.scheme.clone(), q_matrix: q })
}

impl WeightChainGenerator {
    #[inline]
    pub fn ell(&self) -> usize {
        (self.n - 1) / 2
    }

    /// Off-diagonal entries as `(from, to, rate)`.
    fn transitions(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for i in 0..=self.n {
            for j in 0..=self.n {
                let r = self.q_matrix[(i, j)];
                if i != j && r != 0.0 {
                    out.push((i, j, r));
                }
            }
        }
        out
    }

    /// Weight distributions at each grid time, starting from `p0` at `t = 0`.
    pub fn distributions(&self, p0: &[f64], t_grid: &[f64]) -> Result<Vec<Vec<f64>>> {
        let dim = self.n + 1;
        if p0.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: p0.len() });
        }
        if t_grid.windows(2).any(|w| w[1] < w[0]) || t_grid.first().is_some_and(|&t| t < 0.0) {
            return Err(Error::InvalidConfig("t_grid must be sorted and non-negative".into()));
        }
        let lambda = (0..dim).map(|i| -self.q_matrix[(i, i)]).fold(0.0, f64::max);
        let diag: Vec<f64> = (0..dim).map(|i| 1.0 + self.q_matrix[(i, i)] / lambda.max(f64::MIN_POSITIVE)).collect();
        let moves: Vec<(usize, usize, f64)> =
            self.transitions().into_iter().map(|(i, j, r)| (i, j, r / lambda.max(f64::MIN_POSITIVE))).collect();

        let mut p = p0.to_vec();
        let mut t = 0.0;
        let mut out = Vec::with_capacity(t_grid.len());
        for &target in t_grid {
            let h = target - t;
            if h > 0.0 && lambda > 0.0 {
                let blocks = (lambda * h / BLOCK_MEAN).ceil();
                if blocks > MAX_BLOCKS {
                    return Err(Error::Uniformization(format!(
                        "Lambda t = {:.3e} needs {blocks:.3e} blocks",
                        lambda * h
                    )));
                }
                let hs = h / blocks;
                for _ in 0..blocks as u64 {
                    p = uniformized_step(&p, &diag, &moves, lambda * hs)?;
                }
            }
            t = target;
            out.push(p.clone());
        }
        Ok(out)
    }
}

/// `p exp(Q h)` with `x = Lambda h`, summing Poisson-weighted powers of
/// `P = I + Q / Lambda` until the weights are negligible.
fn uniformized_step(p: &[f64], diag: &[f64], moves: &[(usize, usize, f64)], x: f64) -> Result<Vec<f64>> {
    let mut weight = (-x).exp();
    let mut term = p.to_vec();
    let mut acc: Vec<f64> = term.iter().map(|v| v * weight).collect();
    let mut next = vec![0.0; p.len()];
    let mut k = 0u32;
    loop {
        k += 1;
        for (o, (t, d)) in next.iter_mut().zip(term.iter().zip(diag)) {
            *o = t * d;
        }
        for &(i, j, r) in moves {
            next[j] += term[i] * r;
        }
        std::mem::swap(&mut term, &mut next);
        weight *= x / k as f64;
        for (a, t) in acc.iter_mut().zip(&term) {
            *a += weight * t;
        }
        if k as f64 > x && weight < POISSON_FLOOR {
            break;
        }
        if k > 100_000 {
            return Err(Error::Uniformization(format!("Poisson series did not terminate for Lambda h = {x}")));
        }
    }
    Ok(acc)
}

/// Misdecode probability `sum_{w > ell} p_w(t)` at each grid time.
pub fn weight_chain_transient(gen: &WeightChainGenerator, p0: &[f64], t_grid: &[f64]) -> Result<TimeSeries> {
    let ell = gen.ell();
    let dists = gen.distributions(p0, t_grid)?;
    let values = dists.iter().map(|p| p[ell + 1..].iter().sum::<f64>().clamp(0.0, 1.0)).collect();
    Ok(TimeSeries { times: t_grid.to_vec(), values, stderr: None })
}

/// Point mass on the initial codeword.
pub fn codeword_start(n: usize) -> Vec<f64> {
    let mut p0 = vec![0.0; n + 1];
    p0[0] = 1.0;
    p0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{build_lookup_table, build_repetition, build_trickle_down, build_uncorrected};

    #[test]
    fn trickle_three_row_one() {
        let code = build_repetition(3).unwrap();
        let (gc, ge) = (1.0, 0.25);
        let g = weight_chain_generator(code, &build_trickle_down(code, gc, ge, 1).unwrap()).unwrap();
        assert!((g.q_matrix[(1, 0)] - (gc + ge)).abs() < 1e-14);
        assert!((g.q_matrix[(1, 2)] - 2.0 * ge).abs() < 1e-14);
        assert_eq!(g.q_matrix[(1, 3)], 0.0);
    }

    #[test]
    fn lookup_five_row_two() {
        let code = build_repetition(5).unwrap();
        let (gc, ge) = (1.0, 0.1);
        let g = weight_chain_generator(code, &build_lookup_table(code, gc, ge).unwrap()).unwrap();
        assert!((g.q_matrix[(2, 0)] - gc).abs() < 1e-14);
        assert!((g.q_matrix[(2, 1)] - 2.0 * ge).abs() < 1e-14);
        assert!((g.q_matrix[(2, 3)] - 3.0 * ge).abs() < 1e-14);
        for w in 0..=5 {
            assert!(g.q_matrix.row(w).sum().abs() < 1e-12);
        }
    }

    #[test]
    fn uncorrected_three_closed_form() {
        let code = build_repetition(3).unwrap();
        let ge = 0.7;
        let g = weight_chain_generator(code, &build_uncorrected(code, ge).unwrap()).unwrap();
        let ts = [0.0, 0.1, 0.5, 2.0, 10.0];
        let s = weight_chain_transient(&g, &codeword_start(3), &ts).unwrap();
        for (t, v) in ts.iter().zip(&s.values) {
            let q = (1.0 - (-2.0 * ge * t).exp()) / 2.0;
            let exact = 3.0 * q * q * (1.0 - q) + q * q * q;
            assert!((v - exact).abs() < 1e-13, "t={t}: {v} vs {exact}");
        }
    }
}
