use std::collections::HashMap;

use crate::codes::JumpSet;
use crate::opcore::bits::MAX_QUBITS;
use crate::opcore::indicator::{syndrome_of, IndicatorSet};
use crate::opcore::BitString;

/// Fast lookup of the jumps acting on a basis state.
///
/// Syndrome-domain jumps sharing one check set are bucketed by syndrome so
/// the lookup table costs one parity evaluation instead of `2^(n-1)` tests.
/// Zero-rate jumps are dropped.
#[derive(Clone, Debug)]
pub struct JumpIndex {
    n: usize,
    checks: Vec<u64>,
    by_syndrome: HashMap<u64, Vec<usize>>,
    generic: Vec<usize>,
    rates: Vec<f64>,
    flips: Vec<u64>,
}

impl JumpIndex {
    pub fn new(set: &JumpSet) -> Self {
        let mut checks: Option<Vec<u64>> = None;
        let mut by_syndrome: HashMap<u64, Vec<usize>> = HashMap::new();
        let mut generic = Vec::new();
        let mut rates = Vec::with_capacity(set.len());
        let mut flips = Vec::with_capacity(set.len());
        for (k, j) in set.all_jumps().enumerate() {
            rates.push(j.rate());
            flips.push(j.flip.mask());
            if j.rate() == 0.0 {
                continue;
            }
            match &j.domain {
                IndicatorSet::Syndrome { checks: c, syndrome } if checks.as_ref().is_none_or(|x| x == c) => {
                    checks.get_or_insert_with(|| c.clone());
                    by_syndrome.entry(*syndrome).or_default().push(k);
                }
                _ => generic.push(k),
            }
        }
        Self { n: set.n(), checks: checks.unwrap_or_default(), by_syndrome, generic, rates, flips }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Calls `f(jump index, target bits, rate)` for every jump acting on `bits`.
    #[inline]
    pub fn for_each_applicable(&self, set: &JumpSet, bits: u64, mut f: impl FnMut(usize, u64, f64)) {
        if !self.by_syndrome.is_empty() {
            if let Some(ks) = self.by_syndrome.get(&syndrome_of(bits, &self.checks)) {
                for &k in ks {
                    f(k, bits ^ self.flips[k], self.rates[k]);
                }
            }
        }
        for &k in &self.generic {
            if set.jump(k).acts_on(bits) {
                f(k, bits ^ self.flips[k], self.rates[k]);
            }
        }
    }

    pub fn total_rate(&self, set: &JumpSet, bits: u64) -> f64 {
        let mut total = 0.0;
        self.for_each_applicable(set, bits, |_, _, r| total += r);
        total
    }

    /// Largest total rate over all basis states: exhaustive for small
    /// registers, otherwise over one representative per weight (exact for
    /// permutation-symmetric schemes).
    pub fn max_total_rate(&self, set: &JumpSet) -> f64 {
        let n = self.n;
        if n <= 15 {
            (0..1u64 << n).map(|b| self.total_rate(set, b)).fold(0.0, f64::max)
        } else {
            debug_assert!(n <= MAX_QUBITS);
            (0..=n)
                .map(|w| self.total_rate(set, BitString::new(lowest_bits(w), n).expect("w <= n").bits()))
                .fold(0.0, f64::max)
        }
    }
}

#[inline]
pub(crate) fn lowest_bits(w: usize) -> u64 {
    if w >= 64 {
        u64::MAX
    } else {
        (1u64 << w) - 1
    }
}
