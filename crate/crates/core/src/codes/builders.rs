use super::{build_repetition, JumpSet, RepetitionCode, Scheme};
use crate::error::{Error, Result};
use crate::opcore::indicator::{IndicatorSet, QubitRole};
use crate::opcore::{StructuredJump, XString};

/// The lookup table holds `2^(n-1) - 1` jumps; beyond this it is not built.
pub const MAX_LOOKUP_QUBITS: usize = 25;

/// Minimal-weight error with the given syndrome under the checks `Z_j Z_{j+1}`.
fn syndrome_error(syndrome: u64, n: usize) -> u64 {
    let mut e = 0u64;
    for j in 0..n - 1 {
        let next = (e >> j & 1) ^ (syndrome >> j & 1);
        e |= next << (j + 1);
    }
    if 2 * e.count_ones() as usize > n {
        e ^ ((1u64 << n) - 1)
    } else {
        e
    }
}

/// One jump per nontrivial syndrome, sending its whole subspace to the codespace.
pub fn build_lookup_table(code: RepetitionCode, gamma_c: f64, gamma_e: f64) -> Result<JumpSet> {
    let n = code.n();
    if n > MAX_LOOKUP_QUBITS {
        return Err(Error::DimensionGuard { max: MAX_LOOKUP_QUBITS, requested: n });
    }
    let checks = code.checks();
    let amp = gamma_c.sqrt();
    let corrections = (1..1u64 << (n - 1))
        .map(|s| {
            let flip = XString::new(syndrome_error(s, n), n)?;
            let domain = IndicatorSet::Syndrome { checks: checks.clone(), syndrome: s };
            Ok(StructuredJump::new(amp, flip, domain, format!("lookup s={s:0w$b}", w = n - 1)))
        })
        .collect::<Result<Vec<_>>>()?;
    JumpSet::new(code, corrections, Scheme::LookupTable, gamma_c, gamma_e)
}

/// Three-qubit jumps `X_i (1 - Z_i Z_j)/2 (1 - Z_i Z_l)/2`.
pub fn build_three_qubit(gamma_c: f64, gamma_e: f64) -> Result<JumpSet> {
    let code = build_repetition(3)?;
    let amp = gamma_c.sqrt();
    let corrections = (0..3)
        .map(|i| {
            let (j, l) = ((i + 1) % 3, (i + 2) % 3);
            let checks = vec![1 << i | 1 << j, 1 << i | 1 << l];
            let domain = IndicatorSet::Syndrome { checks, syndrome: 0b11 };
            Ok(StructuredJump::new(amp, XString::single(i, 3)?, domain, format!("three_qubit i={i}")))
        })
        .collect::<Result<Vec<_>>>()?;
    JumpSet::new(code, corrections, Scheme::ThreeQubit, gamma_c, gamma_e)
}

/// `n` jumps; jump `i` flips qubit `i` whenever it is erroneous and the
/// state is at most `m` flips from a codeword.
pub fn build_trickle_down(code: RepetitionCode, gamma_c: f64, gamma_e: f64, m: usize) -> Result<JumpSet> {
    let ell = code.ell();
    if m == 0 || m > ell {
        return Err(Error::TruncationOutOfRange { m, ell });
    }
    let n = code.n();
    let amp = gamma_c.sqrt();
    let corrections = (0..n)
        .map(|i| {
            let domain = IndicatorSet::CosetWeight { lo: 1, hi: m, qubit: Some(QubitRole::Erroneous(i)) };
            Ok(StructuredJump::new(amp, XString::single(i, n)?, domain, format!("trickle i={i}")))
        })
        .collect::<Result<Vec<_>>>()?;
    JumpSet::new(code, corrections, Scheme::TrickleDown { m }, gamma_c, gamma_e)
}

/// Errors only.
pub fn build_uncorrected(code: RepetitionCode, gamma_e: f64) -> Result<JumpSet> {
    JumpSet::new(code, Vec::new(), Scheme::Uncorrected, 0.0, gamma_e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opcore::BitString;

    #[test]
    fn syndrome_error_is_minimal() {
        assert_eq!(syndrome_error(0b01, 3), 0b001);
        assert_eq!(syndrome_error(0b11, 3), 0b010);
        assert_eq!(syndrome_error(0b10, 3), 0b100);
    }

    #[test]
    fn lookup_three_qubit_syndrome_one_zero() {
        let set = build_lookup_table(build_repetition(3).unwrap(), 1.0, 0.0).unwrap();
        assert_eq!(set.corrections.len(), 3);
        let j = &set.corrections[0];
        assert_eq!(j.domain.enumerate(3).unwrap(), vec![0b001, 0b110]);
        assert_eq!(j.apply_bits(0b001).unwrap().0, 0);
        assert_eq!(j.apply_bits(0b110).unwrap().0, 0b111);
    }

    #[test]
    fn three_qubit_jump_examples() {
        let gc: f64 = 0.3;
        let set = build_three_qubit(gc, 0.0).unwrap();
        let l1 = &set.corrections[0];
        let (out, amp) = l1.apply(BitString::parse("100").unwrap()).unwrap().unwrap();
        assert_eq!(out.to_string(), "000");
        assert!((amp - gc.sqrt()).abs() < 1e-15);
        assert_eq!(l1.apply(BitString::parse("010").unwrap()).unwrap(), None);
    }

    #[test]
    fn trickle_truncation_bounds() {
        let code = build_repetition(5).unwrap();
        assert!(build_trickle_down(code, 1.0, 0.0, 0).is_err());
        assert!(build_trickle_down(code, 1.0, 0.0, 3).is_err());
        let set = build_trickle_down(code, 1.0, 0.0, 2).unwrap();
        // 00111 decodes to 1_L with qubits 0 and 1 in error
        let s = BitString::parse("00111").unwrap();
        assert_eq!(set.corrections[0].apply(s).unwrap().unwrap().0.to_string(), "10111");
        assert_eq!(set.corrections[2].apply(s).unwrap(), None);
    }

    #[test]
    fn lookup_guard() {
        let code = build_repetition(27).unwrap();
        assert!(matches!(build_lookup_table(code, 1.0, 0.0), Err(Error::DimensionGuard { .. })));
    }
}
