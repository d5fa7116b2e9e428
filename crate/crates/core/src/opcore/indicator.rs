//! Diagonal projectors in the computational basis.
//!
//! An [`IndicatorSet`] is a membership predicate over basis labels. Small sets
//! can be listed explicitly; the rules used by the correction schemes are kept
//! symbolic so they scale to registers far beyond explicit enumeration.

use serde::{Deserialize, Serialize};

use super::bits::{coset_weight, erroneous_mask, low_mask, BitString};
use crate::error::{Error, Result};

/// Explicit enumeration is only attempted up to this register size.
pub const MAX_EXPLICIT_QUBITS: usize = 15;

/// Constraint on a single qubit relative to the majority-vote decision.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QubitRole {
    /// The qubit disagrees with the majority.
    Erroneous(usize),
    /// The qubit agrees with the majority.
    Correct(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndicatorSet {
    /// Every basis state.
    All,
    /// Sorted, deduplicated list of basis labels.
    Explicit(Vec<u64>),
    /// Common eigenspace of Z-string checks: bit `j` of `syndrome` is the
    /// parity of `bits & checks[j]`.
    Syndrome { checks: Vec<u64>, syndrome: u64 },
    /// States whose distance to the nearest codeword lies in `lo..=hi`,
    /// optionally constrained on one qubit.
    CosetWeight { lo: usize, hi: usize, qubit: Option<QubitRole> },
}

impl IndicatorSet {
    pub fn explicit(mut states: Vec<u64>) -> Self {
        states.sort_unstable();
        states.dedup();
        IndicatorSet::Explicit(states)
    }

    /// Membership test for an `n`-qubit label.
    #[inline]
    pub fn contains_bits(&self, bits: u64, n: usize) -> bool {
        match self {
            IndicatorSet::All => true,
            IndicatorSet::Explicit(v) => v.binary_search(&bits).is_ok(),
            IndicatorSet::Syndrome { checks, syndrome } => syndrome_of(bits, checks) == *syndrome,
            IndicatorSet::CosetWeight { lo, hi, qubit } => {
                let c = coset_weight(bits, n);
                if c < *lo || c > *hi {
                    return false;
                }
                match qubit {
                    None => true,
                    Some(QubitRole::Erroneous(i)) => erroneous_mask(bits, n) >> i & 1 == 1,
                    Some(QubitRole::Correct(i)) => erroneous_mask(bits, n) >> i & 1 == 0,
                }
            }
        }
    }

    pub fn contains(&self, state: BitString) -> bool {
        self.contains_bits(state.bits(), state.n())
    }

    /// Lists every member by exhaustive scan.
    pub fn enumerate(&self, n: usize) -> Result<Vec<u64>> {
        if n > MAX_EXPLICIT_QUBITS {
            return Err(Error::DimensionGuard { max: MAX_EXPLICIT_QUBITS, requested: n });
        }
        if let IndicatorSet::Explicit(v) = self {
            return Ok(v.iter().copied().filter(|&b| b & !low_mask(n) == 0).collect());
        }
        Ok((0..1u64 << n).filter(|&b| self.contains_bits(b, n)).collect())
    }

    pub fn to_explicit(&self, n: usize) -> Result<IndicatorSet> {
        Ok(IndicatorSet::Explicit(self.enumerate(n)?))
    }

    pub fn count(&self, n: usize) -> Result<usize> {
        Ok(self.enumerate(n)?.len())
    }
}

/// Syndrome bits of `bits` under the given Z-string checks.
#[inline]
pub fn syndrome_of(bits: u64, checks: &[u64]) -> u64 {
    checks.iter().enumerate().fold(0u64, |acc, (j, &c)| acc | (((bits & c).count_ones() as u64) & 1) << j)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn explicit_membership() {
        let set = IndicatorSet::explicit(vec![4, 1, 2, 1]);
        assert_eq!(set, IndicatorSet::Explicit(vec![1, 2, 4]));
        assert!(set.contains_bits(2, 3));
        assert!(!set.contains_bits(3, 3));
    }

    #[test]
    fn erroneous_qubit_rule() {
        // 00111 decodes to 1_L; qubits 0 and 1 are the erroneous ones.
        let set = IndicatorSet::CosetWeight { lo: 1, hi: 2, qubit: Some(QubitRole::Erroneous(0)) };
        assert!(set.contains_bits(0b11100, 5));
        let set = IndicatorSet::CosetWeight { lo: 1, hi: 2, qubit: Some(QubitRole::Erroneous(2)) };
        assert!(!set.contains_bits(0b11100, 5));
    }

    #[test]
    fn enumeration_guard() {
        assert!(IndicatorSet::All.enumerate(16).is_err());
        assert_eq!(IndicatorSet::All.count(4).unwrap(), 16);
    }
}
