//! Effective correction operators of the trapped-ion scheme.
//!
//! After eliminating the auxiliary modes, each qubit sees a weight-selective
//! flip whose rate is a Lorentzian in the error weight `x`:
//!
//! ```text
//! Delta'(x)   = Delta - i kappa/2 - x G^2 / delta
//! kappa_eff(x) = kappa Omega^2 / 4 / |Delta'(x)|^2
//! ```
//!
//! peaking at `Omega^2 / kappa` where `x = Delta delta / G^2`. A multi-tone
//! drive puts one such peak on every weight `1..=ell`; tones are treated as
//! independent channels whose rates add.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::codes::{JumpSet, RepetitionCode, Scheme};
use crate::error::{Error, Result};
use crate::opcore::indicator::{IndicatorSet, QubitRole};
use crate::opcore::{StructuredJump, XString};

fn default_groups() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IonParams {
    /// Drive strength `Omega`.
    pub omega: f64,
    /// Detuning `Delta`.
    pub delta_big: f64,
    /// Mode detuning `delta`.
    pub delta_small: f64,
    /// Coupling `G` used when a tone does not override it.
    pub g_coupling: f64,
    /// Engineered dissipation rate.
    pub kappa_eng: f64,
    /// Ions addressed in this many sequential groups; every correction rate
    /// is divided by it.
    #[serde(default = "default_groups")]
    pub sequential_groups: usize,
}

impl IonParams {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("omega", self.omega),
            ("delta_big", self.delta_big),
            ("delta_small", self.delta_small),
            ("g_coupling", self.g_coupling),
            ("kappa_eng", self.kappa_eng),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidIonParams(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if self.sequential_groups == 0 {
            return Err(Error::InvalidIonParams("sequential_groups must be at least 1".into()));
        }
        Ok(())
    }

    /// Peak rate `Omega^2 / kappa_eng`.
    pub fn peak_rate(&self) -> f64 {
        self.omega * self.omega / self.kappa_eng
    }

    /// Resonance center `Delta delta / G^2` for coupling `g`.
    pub fn center(&self, g: f64) -> f64 {
        self.delta_big * self.delta_small / (g * g)
    }

    /// Half-width of the Lorentzian in `x`, `x0 kappa / (2 Delta)`.
    pub fn half_width(&self, g: f64) -> f64 {
        self.center(g) * self.kappa_eng / (2.0 * self.delta_big)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tone {
    /// Nominal resonance weight.
    pub x0: usize,
    /// Coupling for this tone; `None` means the resonant value for `x0`.
    #[serde(default)]
    pub g: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToneSet {
    pub tones: Vec<Tone>,
}

impl ToneSet {
    /// One resonant tone per correctable weight.
    pub fn full(ell: usize) -> Self {
        Self { tones: (1..=ell).map(|x0| Tone { x0, g: None }).collect() }
    }

    pub fn single(x0: usize, g: Option<f64>) -> Self {
        Self { tones: vec![Tone { x0, g }] }
    }

    pub fn validate(&self, ell: usize) -> Result<()> {
        if self.tones.is_empty() {
            return Err(Error::InvalidTones("no tones".into()));
        }
        let mut seen = Vec::new();
        for t in &self.tones {
            if t.x0 == 0 || t.x0 > ell {
                return Err(Error::InvalidTones(format!("center {} outside 1..={ell}", t.x0)));
            }
            if seen.contains(&t.x0) {
                return Err(Error::InvalidTones(format!("duplicate center {}", t.x0)));
            }
            if let Some(g) = t.g {
                if !(g.is_finite() && g > 0.0) {
                    return Err(Error::InvalidTones(format!("coupling {g} for center {}", t.x0)));
                }
            }
            seen.push(t.x0);
        }
        Ok(())
    }
}

/// `Delta'(x) = Delta - i kappa/2 - x G^2 / delta` with `G = params.g_coupling`.
pub fn delta_prime(x: f64, params: &IonParams) -> Result<Complex64> {
    delta_prime_with(x, params, params.g_coupling)
}

fn delta_prime_with(x: f64, params: &IonParams, g: f64) -> Result<Complex64> {
    if params.delta_small == 0.0 {
        return Err(Error::InvalidIonParams("delta_small must be nonzero".into()));
    }
    Ok(Complex64::new(params.delta_big - x * g * g / params.delta_small, -0.5 * params.kappa_eng))
}

/// Effective rate at error weight `x` for coupling `params.g_coupling`.
pub fn kappa_eff(x: f64, params: &IonParams) -> Result<f64> {
    kappa_eff_with(x, params, params.g_coupling)
}

fn kappa_eff_with(x: f64, params: &IonParams, g: f64) -> Result<f64> {
    let dp = delta_prime_with(x, params, g)?;
    Ok(params.kappa_eng * params.omega * params.omega / 4.0 / dp.norm_sqr())
}

/// Coupling `G0 = sqrt(Delta delta / x0)` that centers the Lorentzian on `x0`.
pub fn resonant_g(x0: f64, params: &IonParams) -> Result<f64> {
    if !(x0 > 0.0) {
        return Err(Error::InvalidTones(format!("center {x0} must be positive")));
    }
    Ok((params.delta_big * params.delta_small / x0).sqrt())
}

/// Lorentzian written around its center `x0` (resonant coupling assumed).
pub fn kappa_eff_reduced(x: f64, x0: f64, params: &IonParams) -> f64 {
    let s = 2.0 * params.delta_big / (params.kappa_eng * x0);
    params.peak_rate() / (s * s * (x - x0) * (x - x0) + 1.0)
}

fn tone_coupling(tone: &Tone, params: &IonParams) -> Result<f64> {
    match tone.g {
        Some(g) => Ok(g),
        None => resonant_g(tone.x0 as f64, params),
    }
}

/// Summed rate of all tones at weight `x`, before the sequential rescaling.
pub fn tone_rate(x: f64, params: &IonParams, tones: &ToneSet) -> Result<f64> {
    tones.tones.iter().map(|t| kappa_eff_with(x, params, tone_coupling(t, params)?)).sum()
}

/// Desired and undesired rates at coset weight `c`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateRow {
    pub c: usize,
    /// `c -> c-1`; zero at `c = 0`.
    pub desired_rate: f64,
    /// `c -> c+1`, the mirrored Lorentzian evaluated at `n - c`.
    pub undesired_rate: f64,
    pub desired_normalized: f64,
    pub undesired_normalized: f64,
}

pub fn rates_table(n: usize, params: &IonParams, tones: &ToneSet) -> Result<Vec<RateRow>> {
    params.validate()?;
    let ell = (n.max(1) - 1) / 2;
    tones.validate(ell)?;
    let groups = params.sequential_groups as f64;
    let peak = params.peak_rate();
    (0..=ell)
        .map(|c| {
            let desired = if c == 0 { 0.0 } else { tone_rate(c as f64, params, tones)? / groups };
            let undesired = tone_rate((n - c) as f64, params, tones)? / groups;
            Ok(RateRow {
                c,
                desired_rate: desired,
                undesired_rate: undesired,
                desired_normalized: desired / peak,
                undesired_normalized: undesired / peak,
            })
        })
        .collect()
}

/// Per qubit `i` and coset weight `c`: a desired channel flipping `i` when
/// it is erroneous (`c in 1..=ell`) and an undesired one flipping it when
/// it is correct (`c in 0..=ell`).
pub fn build_ion_jump_set(code: RepetitionCode, params: &IonParams, tones: &ToneSet, gamma_e: f64) -> Result<JumpSet> {
    let n = code.n();
    let rows = rates_table(n, params, tones)?;
    let mut corrections = Vec::with_capacity(n * (2 * code.ell() + 1));
    for i in 0..n {
        let flip = XString::single(i, n)?;
        for row in &rows {
            let c = row.c;
            if c >= 1 {
                let domain = IndicatorSet::CosetWeight { lo: c, hi: c, qubit: Some(QubitRole::Erroneous(i)) };
                corrections.push(StructuredJump::new(
                    row.desired_rate.sqrt(),
                    flip,
                    domain,
                    format!("ion i={i} desired c={c}"),
                ));
            }
            let domain = IndicatorSet::CosetWeight { lo: c, hi: c, qubit: Some(QubitRole::Correct(i)) };
            corrections.push(StructuredJump::new(
                row.undesired_rate.sqrt(),
                flip,
                domain,
                format!("ion i={i} undesired c={c}"),
            ));
        }
    }
    let gamma_c = params.peak_rate() / params.sequential_groups as f64;
    let scheme = Scheme::IonEffective { params: params.clone(), tones: tones.clone() };
    JumpSet::new(code, corrections, scheme, gamma_c, gamma_e)
}
