use serde::{Deserialize, Serialize};

use super::bits::{BitString, XString};
use super::indicator::IndicatorSet;
use crate::error::{Error, Result};

/// Jump operator `amplitude * X(flip) * P(domain)`.
///
/// `L^dagger L` is diagonal with `amplitude^2` on the domain, and `L` maps
/// basis states to basis states. Every correction and error operator of the
/// repetition-code schemes has this form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StructuredJump {
    pub amplitude: f64,
    pub flip: XString,
    pub domain: IndicatorSet,
    pub label: String,
}

impl StructuredJump {
    pub fn new(amplitude: f64, flip: XString, domain: IndicatorSet, label: impl Into<String>) -> Self {
        Self { amplitude, flip, domain, label: label.into() }
    }

    /// Single-qubit bit flip `sqrt(rate) X_i` acting everywhere.
    pub fn bit_flip(qubit: usize, n: usize, rate: f64) -> Result<Self> {
        Ok(Self::new(rate.sqrt(), XString::single(qubit, n)?, IndicatorSet::All, format!("error X{qubit}")))
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.flip.n()
    }

    /// `amplitude^2`, the rate of this channel on its domain.
    #[inline]
    pub fn rate(&self) -> f64 {
        self.amplitude * self.amplitude
    }

    /// Image of `state` and the amplitude picked up, or `None` off the domain.
    pub fn apply(&self, state: BitString) -> Result<Option<(BitString, f64)>> {
        if state.n() != self.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), got: state.n() });
        }
        Ok(self.apply_bits(state.bits()).map(|(b, a)| (BitString::new(b, state.n()).expect("same width"), a)))
    }

    #[inline]
    pub fn apply_bits(&self, bits: u64) -> Option<(u64, f64)> {
        if self.domain.contains_bits(bits, self.n()) {
            Some((bits ^ self.flip.mask(), self.amplitude))
        } else {
            None
        }
    }

    #[inline]
    pub fn acts_on(&self, bits: u64) -> bool {
        self.domain.contains_bits(bits, self.n())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flips_erroneous_qubit() {
        let gc: f64 = 0.7;
        let domain = IndicatorSet::explicit(vec![0b001, 0b010, 0b100]);
        let jump = StructuredJump::new(gc.sqrt(), XString::single(0, 3).unwrap(), domain, "x0");
        let (out, amp) = jump.apply(BitString::parse("100").unwrap()).unwrap().unwrap();
        assert_eq!(out.to_string(), "000");
        assert!((amp - gc.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn off_domain_is_empty() {
        let jump = StructuredJump::new(1.0, XString::single(0, 3).unwrap(), IndicatorSet::explicit(vec![1]), "x0");
        assert_eq!(jump.apply(BitString::parse("011").unwrap()).unwrap(), None);
    }

    #[test]
    fn full_domain_twice_is_identity() {
        let jump = StructuredJump::new(1.0, XString::new(0b110, 3).unwrap(), IndicatorSet::All, "x12");
        for b in 0..8 {
            let s = BitString::new(b, 3).unwrap();
            let (once, _) = jump.apply(s).unwrap().unwrap();
            let (twice, _) = jump.apply(once).unwrap().unwrap();
            assert_eq!(twice, s);
        }
    }

    #[test]
    fn dimension_mismatch() {
        let jump = StructuredJump::bit_flip(0, 3, 1.0).unwrap();
        assert!(matches!(jump.apply(BitString::parse("0000").unwrap()), Err(Error::DimensionMismatch { .. })));
    }
}
