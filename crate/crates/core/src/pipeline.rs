//! From a scheme description to fitted logical error rates.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{fit_infidelity, FitResult, PlTable};
use crate::codes::{
    build_lookup_table, build_repetition, build_three_qubit, build_trickle_down, build_uncorrected, JumpSet,
};
use crate::engines::{
    codeword_start, log_spaced, weight_chain_generator, weight_chain_transient, LogicalState, TimeSeries,
};
use crate::error::{Error, Result};
use crate::ion::{build_ion_jump_set, IonParams, ToneSet};

/// A scheme family, instantiable at any code size.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SchemeSpec {
    LookupTable,
    /// `m = None` means full order `m = ell`.
    TrickleDown {
        #[serde(default)]
        m: Option<usize>,
    },
    ThreeQubit,
    IonEffective {
        params: IonParams,
        /// Defaults to one resonant tone per `x0 = 1..=ell`.
        #[serde(default)]
        tones: Option<ToneSet>,
    },
    Uncorrected,
}

impl SchemeSpec {
    pub fn name(&self) -> String {
        match self {
            Self::LookupTable => "lookup".into(),
            Self::TrickleDown { m: None } => "trickle".into(),
            Self::TrickleDown { m: Some(m) } => format!("trickle_m{m}"),
            Self::ThreeQubit => "three_qubit".into(),
            Self::IonEffective { .. } => "ion".into(),
            Self::Uncorrected => "none".into(),
        }
    }

    /// Jump set at size `n`. For the ion scheme `gamma_c` is ignored; the
    /// engineered rates come from `params`.
    pub fn build(&self, n: usize, gamma_c: f64, gamma_e: f64) -> Result<JumpSet> {
        let code = build_repetition(n)?;
        match self {
            Self::LookupTable => build_lookup_table(code, gamma_c, gamma_e),
            Self::TrickleDown { m } => build_trickle_down(code, gamma_c, gamma_e, m.unwrap_or(code.ell())),
            Self::ThreeQubit if n == 3 => build_three_qubit(gamma_c, gamma_e),
            Self::ThreeQubit => Err(Error::InvalidCodeSize(n)),
            Self::IonEffective { params, tones } => {
                let tones = tones.clone().unwrap_or_else(|| ToneSet::full(code.ell()));
                build_ion_jump_set(code, params, &tones, gamma_e)
            }
            Self::Uncorrected => build_uncorrected(code, gamma_e),
        }
    }
}

/// Grid used for error-rate fits, in units of `1 / gamma_e`.
pub const FIT_GRID: (f64, f64, usize) = (1e-3, 3.0, 60);

/// Exact infidelity on [`FIT_GRID`], with times reported in units of `1 / gamma_e`.
pub fn chain_infidelity(jumps: &JumpSet, state: &LogicalState) -> Result<TimeSeries> {
    let gamma_e = jumps.gamma_e;
    if !(gamma_e > 0.0) {
        return Err(Error::InvalidConfig("error-rate fits need gamma_e > 0".into()));
    }
    let scaled = log_spaced(FIT_GRID.0, FIT_GRID.1, FIT_GRID.2);
    let t_abs: Vec<f64> = scaled.iter().map(|t| t / gamma_e).collect();
    let gen = weight_chain_generator(jumps.code, jumps)?;
    let mut series = weight_chain_transient(&gen, &codeword_start(jumps.n()), &t_abs)?;
    let k = state.flip_factor();
    series.values.iter_mut().for_each(|v| *v *= k);
    series.times = scaled;
    Ok(series)
}

/// Fitted decay of one `(scheme, n, gamma_e)` cell.
pub fn fit_cell(spec: &SchemeSpec, n: usize, gamma_c: f64, gamma_e: f64) -> Result<FitResult> {
    let jumps = spec.build(n, gamma_c, gamma_e)?;
    let series = chain_infidelity(&jumps, &LogicalState::default())?;
    fit_infidelity(&series, jumps.code.ell())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub n: usize,
    pub gamma_e: f64,
    pub fit: Option<FitResult>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub scheme: String,
    pub gamma_c: f64,
    pub cells: Vec<SweepCell>,
    pub table: PlTable,
}

/// Fits every `(n, gamma_e)` cell in parallel; failed fits are kept as
/// `None` in the table with their error message.
pub fn sweep(spec: &SchemeSpec, sizes: &[usize], gamma_es: &[f64], gamma_c: f64) -> Result<Sweep> {
    let pairs: Vec<(usize, f64)> = sizes.iter().flat_map(|&n| gamma_es.iter().map(move |&g| (n, g))).collect();
    let cells: Vec<SweepCell> = pairs
        .par_iter()
        .map(|&(n, gamma_e)| match fit_cell(spec, n, gamma_c, gamma_e) {
            Ok(fit) => SweepCell { n, gamma_e, fit: Some(fit), error: None },
            Err(e) => SweepCell { n, gamma_e, fit: None, error: Some(e.to_string()) },
        })
        .collect();
    let values = sizes
        .iter()
        .enumerate()
        .map(|(r, _)| (0..gamma_es.len()).map(|c| cells[r * gamma_es.len() + c].fit.as_ref().map(|f| f.p_l)).collect())
        .collect();
    let table = PlTable::new(sizes.to_vec(), gamma_es.to_vec(), values)?;
    Ok(Sweep { scheme: spec.name(), gamma_c, cells, table })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_qubit_only_at_three() {
        assert!(SchemeSpec::ThreeQubit.build(3, 1.0, 0.1).is_ok());
        assert!(SchemeSpec::ThreeQubit.build(5, 1.0, 0.1).is_err());
    }

    #[test]
    fn spec_serde_round_trip() {
        let s = SchemeSpec::TrickleDown { m: Some(2) };
        let j = serde_json::to_string(&s).unwrap();
        assert_eq!(serde_json::from_str::<SchemeSpec>(&j).unwrap(), s);
    }
}
