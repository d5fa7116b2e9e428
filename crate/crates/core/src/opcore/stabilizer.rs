use super::bits::low_mask;
use super::indicator::IndicatorSet;
use crate::error::{Error, Result};

/// Rank over GF(2) of a set of bit-vectors.
pub fn gf2_rank(rows: &[u64]) -> usize {
    let mut basis: Vec<u64> = Vec::with_capacity(rows.len());
    for &r in rows {
        let mut v = r;
        for &b in &basis {
            v = v.min(v ^ b);
        }
        if v != 0 {
            basis.push(v);
            // keep the basis sorted by leading bit, descending
            basis.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    basis.len()
}

/// Projector onto the joint eigenspace of Z-string stabilizer generators.
///
/// `generators[j]` is the support of a Z-string on `n` qubits and
/// `syndrome[j] = true` selects its `-1` eigenspace. Over all `2^len`
/// syndromes the resulting indicators partition the computational basis.
pub fn projector_from_stabilizers(generators: &[u64], syndrome: &[bool], n: usize) -> Result<IndicatorSet> {
    if syndrome.len() != generators.len() {
        return Err(Error::SyndromeLength { expected: generators.len(), got: syndrome.len() });
    }
    if generators.iter().any(|&g| g & !low_mask(n) != 0) {
        return Err(Error::DimensionMismatch { expected: n, got: 64 });
    }
    if gf2_rank(generators) != generators.len() || generators.contains(&0) {
        return Err(Error::DependentGenerators);
    }
    let syndrome = syndrome.iter().enumerate().fold(0u64, |acc, (j, &s)| acc | (s as u64) << j);
    Ok(IndicatorSet::Syndrome { checks: generators.to_vec(), syndrome })
}

/// Nearest-neighbour parity checks `Z_i Z_{i+1}` of the repetition code.
pub fn repetition_checks(n: usize) -> Vec<u64> {
    (0..n.saturating_sub(1)).map(|i| 0b11u64 << i).collect()
}
