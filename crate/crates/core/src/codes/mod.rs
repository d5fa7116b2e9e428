//! Repetition codes and their correction schemes.

mod builders;
mod projectors;

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ion::{IonParams, ToneSet};
use crate::opcore::bits::{low_mask, MAX_QUBITS};
use crate::opcore::dense::StateVector;
use crate::opcore::stabilizer::repetition_checks;
use crate::opcore::{BitString, StructuredJump};

pub use builders::{build_lookup_table, build_three_qubit, build_trickle_down, build_uncorrected, MAX_LOOKUP_QUBITS};
pub use projectors::{
    enumerate_trickle_projectors, n_proj_count, n_proj_lower_bound, verify_projector_relation, ProjectorCount,
    ProjectorRelationReport,
};

/// Bit-flip repetition code on an odd number of qubits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawCode", into = "RawCode")]
pub struct RepetitionCode {
    n: usize,
}

#[derive(Serialize, Deserialize)]
struct RawCode {
    n: usize,
}

impl TryFrom<RawCode> for RepetitionCode {
    type Error = Error;
    fn try_from(raw: RawCode) -> Result<Self> {
        build_repetition(raw.n)
    }
}

impl From<RepetitionCode> for RawCode {
    fn from(c: RepetitionCode) -> Self {
        RawCode { n: c.n }
    }
}

pub fn build_repetition(n: usize) -> Result<RepetitionCode> {
    if !(3..=MAX_QUBITS).contains(&n) || n.is_multiple_of(2) {
        return Err(Error::InvalidCodeSize(n));
    }
    Ok(RepetitionCode { n })
}

impl RepetitionCode {
    #[inline]
    pub fn n(self) -> usize {
        self.n
    }

    /// Largest correctable error weight.
    #[inline]
    pub fn ell(self) -> usize {
        (self.n - 1) / 2
    }

    pub fn codewords(self) -> [BitString; 2] {
        [BitString::zeros(self.n).expect("valid n"), BitString::ones(self.n).expect("valid n")]
    }

    /// `Z_i Z_{i+1}` supports.
    pub fn checks(self) -> Vec<u64> {
        repetition_checks(self.n)
    }

    pub fn logical_mask(self) -> u64 {
        low_mask(self.n)
    }

    /// Codewords as dense vectors, for the Knill-Laflamme checks.
    pub fn dense_codewords(self) -> Result<Vec<StateVector>> {
        Ok(vec![StateVector::basis(0, self.n)?, StateVector::basis(self.logical_mask(), self.n)?])
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Scheme {
    LookupTable,
    TrickleDown { m: usize },
    ThreeQubit,
    IonEffective { params: IonParams, tones: ToneSet },
    Uncorrected,
}

impl Scheme {
    pub fn name(&self) -> String {
        match self {
            Scheme::LookupTable => "lookup".into(),
            Scheme::TrickleDown { m } => format!("trickle_m{m}"),
            Scheme::ThreeQubit => "three_qubit".into(),
            Scheme::IonEffective { .. } => "ion".into(),
            Scheme::Uncorrected => "none".into(),
        }
    }
}

/// A correction scheme together with the bit-flip noise it fights.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JumpSet {
    pub code: RepetitionCode,
    pub corrections: Vec<StructuredJump>,
    pub errors: Vec<StructuredJump>,
    pub scheme: Scheme,
    pub gamma_c: f64,
    pub gamma_e: f64,
}

impl JumpSet {
    /// Assembles a jump set, adding the `n` bit-flip error channels.
    pub fn new(
        code: RepetitionCode,
        corrections: Vec<StructuredJump>,
        scheme: Scheme,
        gamma_c: f64,
        gamma_e: f64,
    ) -> Result<Self> {
        for (name, rate) in [("gamma_c", gamma_c), ("gamma_e", gamma_e)] {
            if !(rate.is_finite() && rate >= 0.0) {
                return Err(Error::InvalidConfig(format!("{name} must be finite and non-negative, got {rate}")));
            }
        }
        let n = code.n();
        let errors = (0..n).map(|i| StructuredJump::bit_flip(i, n, gamma_e)).collect::<Result<Vec<_>>>()?;
        let set = Self { code, corrections, errors, scheme, gamma_c, gamma_e };
        let mut seen = HashSet::new();
        for j in set.all_jumps() {
            if j.n() != n {
                return Err(Error::DimensionMismatch { expected: n, got: j.n() });
            }
            if !seen.insert(j.label.as_str()) {
                return Err(Error::InvalidConfig(format!("duplicate jump label {:?}", j.label)));
            }
        }
        Ok(set)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.code.n()
    }

    /// Corrections first, then errors.
    pub fn all_jumps(&self) -> impl Iterator<Item = &StructuredJump> {
        self.corrections.iter().chain(self.errors.iter())
    }

    pub fn len(&self) -> usize {
        self.corrections.len() + self.errors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn jump(&self, index: usize) -> &StructuredJump {
        if index < self.corrections.len() {
            &self.corrections[index]
        } else {
            &self.errors[index - self.corrections.len()]
        }
    }

    /// Total jump rate out of a basis state, by linear scan.
    pub fn total_rate(&self, bits: u64) -> f64 {
        self.all_jumps().filter(|j| j.acts_on(bits)).map(|j| j.rate()).sum()
    }

    /// Same set with a different error rate.
    pub fn with_gamma_e(&self, gamma_e: f64) -> Result<Self> {
        Self::new(self.code, self.corrections.clone(), self.scheme.clone(), self.gamma_c, gamma_e)
    }
}
