//! Computational-basis labels and X-string supports.
//!
//! Qubit `i` is bit `i` of the label (qubit 0 is the least significant bit),
//! so `|0_L>` is the all-zeros string.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest register handled by the bit-packed engines.
pub const MAX_QUBITS: usize = 63;

#[inline]
pub(crate) fn low_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Label of an `n`-qubit computational basis state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BitString {
    bits: u64,
    n: usize,
}

impl BitString {
    pub fn new(bits: u64, n: usize) -> Result<Self> {
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::DimensionGuard { max: MAX_QUBITS, requested: n });
        }
        if bits & !low_mask(n) != 0 {
            return Err(Error::DimensionMismatch { expected: n, got: 64 - bits.leading_zeros() as usize });
        }
        Ok(Self { bits, n })
    }

    /// Parses a string written qubit 0 first, e.g. `"100"` is qubit 0 flipped.
    pub fn parse(s: &str) -> Result<Self> {
        let mut bits = 0u64;
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => bits |= 1 << i,
                _ => return Err(Error::InvalidConfig(format!("bad bit character {c:?} in {s:?}"))),
            }
        }
        Self::new(bits, s.len())
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(0, n)
    }

    pub fn ones(n: usize) -> Result<Self> {
        Self::new(low_mask(n), n)
    }

    #[inline]
    pub fn bits(self) -> u64 {
        self.bits
    }

    #[inline]
    pub fn n(self) -> usize {
        self.n
    }

    #[inline]
    pub fn weight(self) -> usize {
        self.bits.count_ones() as usize
    }

    #[inline]
    pub fn bit(self, i: usize) -> bool {
        self.bits >> i & 1 == 1
    }

    #[inline]
    pub fn complement(self) -> Self {
        Self { bits: !self.bits & low_mask(self.n), n: self.n }
    }

    /// Distance to the nearest repetition codeword.
    #[inline]
    pub fn coset_weight(self) -> usize {
        coset_weight(self.bits, self.n)
    }

    /// `true` when majority vote decodes this string to `|1_L>`.
    #[inline]
    pub fn majority(self) -> bool {
        majority(self.bits, self.n)
    }

    pub fn flipped(self, x: XString) -> Result<Self> {
        if x.n() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: x.n() });
        }
        Ok(Self { bits: self.bits ^ x.mask(), n: self.n })
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            f.write_str(if self.bit(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

#[inline]
/// Raw-bits form of [`BitString::coset_weight`].
pub fn coset_weight(bits: u64, n: usize) -> usize {
    let w = bits.count_ones() as usize;
    w.min(n - w)
}

#[inline]
pub fn majority(bits: u64, n: usize) -> bool {
    2 * bits.count_ones() as usize > n
}

/// Qubits that disagree with the majority value.
#[inline]
pub fn erroneous_mask(bits: u64, n: usize) -> u64 {
    if majority(bits, n) {
        !bits & low_mask(n)
    } else {
        bits
    }
}

/// Support of a tensor product of Pauli-X operators. Involutory by construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct XString {
    mask: u64,
    n: usize,
}

impl XString {
    pub fn new(mask: u64, n: usize) -> Result<Self> {
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::DimensionGuard { max: MAX_QUBITS, requested: n });
        }
        if mask & !low_mask(n) != 0 {
            return Err(Error::DimensionMismatch { expected: n, got: 64 - mask.leading_zeros() as usize });
        }
        Ok(Self { mask, n })
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::new(0, n)
    }

    pub fn single(qubit: usize, n: usize) -> Result<Self> {
        if qubit >= n {
            return Err(Error::DimensionMismatch { expected: n, got: qubit + 1 });
        }
        Self::new(1 << qubit, n)
    }

    /// Logical X of the repetition code.
    pub fn all(n: usize) -> Result<Self> {
        Self::new(low_mask(n), n)
    }

    #[inline]
    pub fn mask(self) -> u64 {
        self.mask
    }

    #[inline]
    pub fn n(self) -> usize {
        self.n
    }

    #[inline]
    pub fn weight(self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn compose(self, other: XString) -> Result<Self> {
        if other.n != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: other.n });
        }
        Ok(Self { mask: self.mask ^ other.mask, n: self.n })
    }
}
