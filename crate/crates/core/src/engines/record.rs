use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::LogicalState;
use crate::codes::RepetitionCode;
use crate::error::{Error, Result};
use crate::opcore::bits::{coset_weight, low_mask};
use crate::opcore::{DensityMatrix, StateVector, C64};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    /// Monte Carlo standard errors, when the values are estimates.
    pub stderr: Option<Vec<f64>>,
}

impl TimeSeries {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Value at the grid point closest to `t`.
    pub fn at(&self, t: f64) -> Option<(f64, Option<f64>)> {
        let k = self.times.iter().enumerate().min_by(|a, b| (a.1 - t).abs().total_cmp(&(b.1 - t).abs()))?.0;
        Some((self.values[k], self.stderr.as_ref().map(|s| s[k])))
    }

    /// CSV with header `time,infidelity,stderr`; times are multiplied by
    /// `time_scale` (pass `gamma_e` to write in units of `1/gamma_e`).
    pub fn write_csv<W: Write>(&self, mut w: W, time_scale: f64) -> std::io::Result<()> {
        writeln!(w, "time,infidelity,stderr")?;
        for (k, (t, v)) in self.times.iter().zip(&self.values).enumerate() {
            match &self.stderr {
                Some(s) => writeln!(w, "{:e},{:e},{:e}", t * time_scale, v, s[k])?,
                None => writeln!(w, "{:e},{:e},", t * time_scale, v)?,
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub time: f64,
    pub label: String,
}

/// One stochastic realization.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub master_seed: u64,
    pub index: u64,
    pub n: usize,
    /// Starting basis state (the `|0_L>` side of the coset pair).
    pub initial: u64,
    pub events: Vec<Event>,
    /// Basis label at each grid time.
    pub path: Vec<u64>,
    /// Whether majority vote at each grid time returns the wrong codeword.
    pub decode_flags: Vec<bool>,
    /// Decoded infidelity at each grid time.
    pub infidelity: Vec<f64>,
}

pub fn write_jsonl<W: Write>(mut w: W, records: &[TrajectoryRecord]) -> Result<()> {
    for r in records {
        let line = serde_json::to_string(r).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        writeln!(w, "{line}").map_err(|e| Error::InvalidConfig(e.to_string()))?;
    }
    Ok(())
}

pub fn read_jsonl<R: BufRead>(r: R) -> Result<Vec<TrajectoryRecord>> {
    r.lines()
        .filter(|l| l.as_ref().map_or(true, |s| !s.trim().is_empty()))
        .map(|l| {
            let l = l.map_err(|e| Error::InvalidConfig(e.to_string()))?;
            serde_json::from_str(&l).map_err(|e| Error::InvalidConfig(e.to_string()))
        })
        .collect()
}

/// Majority-decode a pure state coset pair by pair, then take the fidelity
/// with the logical state.
pub fn decode_fidelity_vector(psi: &StateVector, code: RepetitionCode, state: &LogicalState) -> Result<f64> {
    let rho = psi.projector();
    decode_fidelity_density(&rho, code, state)
}

/// Same for a density matrix: the decoder sends `|e>` and `|e-bar>` to
/// `|0_L>` and `|1_L>` for each minimal-weight `e`, so only the 2x2 block of
/// every coset pair contributes.
pub fn decode_fidelity_density(rho: &DensityMatrix, code: RepetitionCode, state: &LogicalState) -> Result<f64> {
    let n = code.n();
    if rho.dim() != 1 << n {
        return Err(Error::DimensionMismatch { expected: n, got: rho.dim().trailing_zeros() as usize });
    }
    let mask = low_mask(n);
    let (a, b) = (state.alpha, state.beta);
    let mut f = C64::new(0.0, 0.0);
    for e in 0..1u64 << n {
        if 2 * e.count_ones() as usize > n {
            continue;
        }
        debug_assert!(coset_weight(e, n) == e.count_ones() as usize);
        let eb = !e & mask;
        let (i, j) = (e as usize, eb as usize);
        let m = &rho.0;
        f += a.conj() * a * m[(i, i)] + b.conj() * b * m[(j, j)] + a.conj() * b * m[(i, j)] + b.conj() * a * m[(j, i)];
    }
    Ok(f.re)
}

/// Raw engine output before reduction to an infidelity curve.
#[derive(Clone, Debug)]
pub enum EngineOutput {
    Densities { times: Vec<f64>, states: Vec<DensityMatrix> },
    WeightDistributions { times: Vec<f64>, distributions: Vec<Vec<f64>> },
    Trajectories { times: Vec<f64>, records: Vec<TrajectoryRecord> },
}

/// Logical infidelity over time.
///
/// Density matrices are decoded and compared with the logical state; weight
/// distributions give the misdecode probability times
/// [`LogicalState::flip_factor`]; trajectories are averaged in index order
/// with standard errors.
pub fn infidelity_series(output: &EngineOutput, code: RepetitionCode, state: &LogicalState) -> Result<TimeSeries> {
    match output {
        EngineOutput::Densities { times, states } => {
            let values = states
                .iter()
                .map(|rho| decode_fidelity_density(rho, code, state).map(|f| (1.0 - f).clamp(0.0, 1.0)))
                .collect::<Result<Vec<_>>>()?;
            Ok(TimeSeries { times: times.clone(), values, stderr: None })
        }
        EngineOutput::WeightDistributions { times, distributions } => {
            let ell = code.ell();
            let k = state.flip_factor();
            let values = distributions.iter().map(|p| (p[ell + 1..].iter().sum::<f64>() * k).clamp(0.0, 1.0)).collect();
            Ok(TimeSeries { times: times.clone(), values, stderr: None })
        }
        EngineOutput::Trajectories { times, records } => Ok(average_records(times, records)),
    }
}

pub(crate) fn average_records(times: &[f64], records: &[TrajectoryRecord]) -> TimeSeries {
    let n = records.len().max(1) as f64;
    let mut values = Vec::with_capacity(times.len());
    let mut stderr = Vec::with_capacity(times.len());
    for k in 0..times.len() {
        let (mut s, mut s2) = (0.0, 0.0);
        for r in records {
            let v = r.infidelity[k];
            s += v;
            s2 += v * v;
        }
        let mean = s / n;
        let var = if records.len() > 1 { ((s2 - n * mean * mean) / (n - 1.0)).max(0.0) } else { 0.0 };
        values.push(mean);
        stderr.push((var / n).sqrt());
    }
    TimeSeries { times: times.to_vec(), values, stderr: Some(stderr) }
}
