//! Monte Carlo wave-function trajectories with fixed time steps.
//!
//! Each step of length `dt` jumps with probability `dp = dt * sum_j
//! <psi|L_j^dag L_j|psi>`, picking channel `j` with weight `dp_j / dp`;
//! otherwise the state is damped by the non-Hermitian part and renormalized.
//! When the damping leaves the state unchanged (a coset pair
//! `alpha|s> + beta|s-bar>` sees equal total rates on both branches) the
//! run of no-jump steps is geometric and is drawn in one go. That is the
//! same Bernoulli process, just without iterating over idle steps.

use nalgebra::DVector;
use rand::Rng;
use rayon::prelude::*;

use super::index::JumpIndex;
use super::record::{average_records, decode_fidelity_vector, Event, TimeSeries, TrajectoryRecord};
use super::{open_uniform, trajectory_rng, LogicalState, SimConfig, MAX_JUMP_PROBABILITY};
use crate::codes::{JumpSet, RepetitionCode};
use crate::error::{Error, Result};
use crate::opcore::bits::low_mask;
use crate::opcore::dense::MAX_DENSE_QUBITS;
use crate::opcore::{StateVector, C64};

pub trait McwfState: Clone + Send {
    /// `(channel, <psi|L^dag L|psi>)` for every channel with nonzero weight.
    fn jump_rates(&self, set: &JumpSet, index: &JumpIndex) -> Vec<(usize, f64)>;
    fn apply_jump(&mut self, set: &JumpSet, channel: usize) -> Result<()>;
    /// No-jump evolution over `dt`, renormalized.
    fn damp(&mut self, set: &JumpSet, index: &JumpIndex, dt: f64) -> Result<()>;
    /// True when `damp` is the identity for this state.
    fn is_stationary(&self) -> bool;
    /// Representative basis label.
    fn label(&self) -> u64;
    fn misdecoded(&self, code: RepetitionCode) -> bool;
    fn infidelity(&self, code: RepetitionCode, logical: &LogicalState) -> Result<f64>;
}

/// `alpha |s> + beta |s-bar>`, stored as `s` plus the two amplitudes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CosetPairState {
    pub s: u64,
    pub n: usize,
    pub alpha: C64,
    pub beta: C64,
}

impl CosetPairState {
    pub fn logical(n: usize, logical: &LogicalState) -> Self {
        Self { s: 0, n, alpha: logical.alpha, beta: logical.beta }
    }

    fn partner(&self) -> u64 {
        !self.s & low_mask(self.n)
    }
}

impl McwfState for CosetPairState {
    fn jump_rates(&self, set: &JumpSet, index: &JumpIndex) -> Vec<(usize, f64)> {
        let mut out = Vec::new();
        index.for_each_applicable(set, self.s, |k, _, r| out.push((k, r)));
        out
    }

    fn apply_jump(&mut self, set: &JumpSet, channel: usize) -> Result<()> {
        let j = set.jump(channel);
        let partner = self.partner();
        if !(j.acts_on(self.s) && j.acts_on(partner)) {
            return Err(Error::Unphysical(format!("jump {:?} splits the coset pair of {:#b}", j.label, self.s)));
        }
        let before = (self.alpha.norm(), self.beta.norm());
        self.s ^= j.flip.mask();
        // both branches pick up the same amplitude, so the normalized
        // coefficients are unchanged
        debug_assert_eq!(before, (self.alpha.norm(), self.beta.norm()));
        Ok(())
    }

    fn damp(&mut self, _set: &JumpSet, _index: &JumpIndex, _dt: f64) -> Result<()> {
        Ok(())
    }

    fn is_stationary(&self) -> bool {
        true
    }

    fn label(&self) -> u64 {
        self.s
    }

    fn misdecoded(&self, code: RepetitionCode) -> bool {
        self.s.count_ones() as usize > code.ell()
    }

    fn infidelity(&self, code: RepetitionCode, logical: &LogicalState) -> Result<f64> {
        Ok(if self.misdecoded(code) { logical.flip_factor() } else { 0.0 })
    }
}

/// General state vector, `n <= 12`.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseState {
    pub n: usize,
    pub amps: DVector<C64>,
}

impl DenseState {
    pub fn new(psi: StateVector) -> Result<Self> {
        let dim = psi.0.len();
        let n = dim.trailing_zeros() as usize;
        if !dim.is_power_of_two() || n > MAX_DENSE_QUBITS {
            return Err(Error::DimensionGuard { max: MAX_DENSE_QUBITS, requested: n });
        }
        if !psi.is_normalized(1e-9) {
            return Err(Error::InvalidConfig(format!("state norm {}", psi.norm())));
        }
        Ok(Self { n, amps: psi.0 })
    }

    fn renormalize(&mut self) -> Result<()> {
        let norm = self.amps.norm();
        if !(norm > 1e-150) {
            return Err(Error::NormUnderflow);
        }
        self.amps /= C64::new(norm, 0.0);
        Ok(())
    }
}

impl McwfState for DenseState {
    fn jump_rates(&self, set: &JumpSet, index: &JumpIndex) -> Vec<(usize, f64)> {
        let mut acc = vec![0.0; set.len()];
        for (s, a) in self.amps.iter().enumerate() {
            let p = a.norm_sqr();
            if p > 0.0 {
                index.for_each_applicable(set, s as u64, |k, _, r| acc[k] += p * r);
            }
        }
        acc.into_iter().enumerate().filter(|&(_, r)| r > 0.0).collect()
    }

    fn apply_jump(&mut self, set: &JumpSet, channel: usize) -> Result<()> {
        let j = set.jump(channel);
        let mut next = DVector::zeros(self.amps.len());
        for (s, a) in self.amps.iter().enumerate() {
            if let Some((to, amp)) = j.apply_bits(s as u64) {
                next[to as usize] += a * amp;
            }
        }
        self.amps = next;
        self.renormalize()
    }

    fn damp(&mut self, set: &JumpSet, index: &JumpIndex, dt: f64) -> Result<()> {
        for s in 0..self.amps.len() {
            let g = index.total_rate(set, s as u64);
            self.amps[s] *= (-0.5 * g * dt).exp();
        }
        self.renormalize()
    }

    fn is_stationary(&self) -> bool {
        false
    }

    fn label(&self) -> u64 {
        self.amps
            .iter()
            .enumerate()
            .fold((0usize, -1.0f64), |best, (s, a)| if a.norm_sqr() > best.1 { (s, a.norm_sqr()) } else { best })
            .0 as u64
    }

    fn misdecoded(&self, code: RepetitionCode) -> bool {
        self.label().count_ones() as usize > code.ell()
    }

    fn infidelity(&self, code: RepetitionCode, logical: &LogicalState) -> Result<f64> {
        let f = decode_fidelity_vector(&StateVector(self.amps.clone()), code, logical)?;
        Ok((1.0 - f).clamp(0.0, 1.0))
    }
}

fn step_of(t: f64, dt: f64) -> u64 {
    (t / dt).round() as u64
}

/// Resolves the configured step, enforcing `dt * max rate <= 0.1`.
pub fn resolve_dt(set: &JumpSet, index: &JumpIndex, config: &SimConfig) -> Result<f64> {
    let max_rate = index.max_total_rate(set);
    let dt = match config.dt {
        Some(dt) => dt,
        None if max_rate > 0.0 => 1e-3 / max_rate,
        None => config.t_max.max(1.0),
    };
    if dt * max_rate > MAX_JUMP_PROBABILITY {
        return Err(Error::TimeStepGuard(dt * max_rate));
    }
    Ok(dt)
}

fn pick<R: rand::Rng>(rates: &[(usize, f64)], total: f64, rng: &mut R) -> usize {
    let target = rng.random::<f64>() * total;
    let mut acc = 0.0;
    for &(k, r) in rates {
        acc += r;
        if target < acc {
            return k;
        }
    }
    rates.last().expect("nonempty").0
}

/// One trajectory. `index` selects the RNG stream.
pub fn mcwf_evolve<S: McwfState>(psi0: S, jumps: &JumpSet, config: &SimConfig, index: u64) -> Result<TrajectoryRecord> {
    config.validate()?;
    let jidx = JumpIndex::new(jumps);
    let dt = resolve_dt(jumps, &jidx, config)?;
    evolve_with(psi0, jumps, &jidx, config, dt, index)
}

fn evolve_with<S: McwfState>(
    mut psi: S,
    jumps: &JumpSet,
    jidx: &JumpIndex,
    config: &SimConfig,
    dt: f64,
    index: u64,
) -> Result<TrajectoryRecord> {
    let code = jumps.code;
    let mut rng = trajectory_rng(config.master_seed, index);
    let samples: Vec<u64> = config.t_grid.iter().map(|&t| step_of(t, dt)).collect();
    let last = samples.last().copied().unwrap_or(0);
    let mut rec = TrajectoryRecord {
        master_seed: config.master_seed,
        index,
        n: jumps.n(),
        initial: psi.label(),
        events: Vec::new(),
        path: Vec::with_capacity(samples.len()),
        decode_flags: Vec::with_capacity(samples.len()),
        infidelity: Vec::with_capacity(samples.len()),
    };
    let mut next_sample = 0usize;
    let record = |psi: &S, rec: &mut TrajectoryRecord| -> Result<()> {
        rec.path.push(psi.label());
        rec.decode_flags.push(psi.misdecoded(code));
        rec.infidelity.push(psi.infidelity(code, &config.initial)?);
        Ok(())
    };
    let mut step = 0u64;
    while next_sample < samples.len() && samples[next_sample] == 0 {
        record(&psi, &mut rec)?;
        next_sample += 1;
    }
    while next_sample < samples.len() {
        let rates = psi.jump_rates(jumps, jidx);
        let total: f64 = rates.iter().map(|r| r.1).sum();
        let dp = total * dt;
        if dp > MAX_JUMP_PROBABILITY {
            return Err(Error::TimeStepGuard(dp));
        }
        let jump_step = if psi.is_stationary() {
            if dp == 0.0 {
                u64::MAX
            } else {
                let idle = (open_uniform(&mut rng).ln() / (-dp).ln_1p()).floor();
                step.saturating_add(idle.min(u64::MAX as f64 / 2.0) as u64).saturating_add(1)
            }
        } else if rng.random::<f64>() < dp {
            step + 1
        } else {
            step += 1;
            psi.damp(jumps, jidx, dt)?;
            while next_sample < samples.len() && samples[next_sample] == step {
                record(&psi, &mut rec)?;
                next_sample += 1;
            }
            continue;
        };
        while next_sample < samples.len() && samples[next_sample] < jump_step {
            record(&psi, &mut rec)?;
            next_sample += 1;
        }
        if jump_step > last {
            break;
        }
        let k = pick(&rates, total, &mut rng);
        psi.apply_jump(jumps, k)?;
        step = jump_step;
        rec.events.push(Event { time: step as f64 * dt, label: jumps.jump(k).label.clone() });
        while next_sample < samples.len() && samples[next_sample] == step {
            record(&psi, &mut rec)?;
            next_sample += 1;
        }
    }
    Ok(rec)
}

/// `config.n_traj` coset-pair trajectories from the configured logical
/// state, run in parallel and averaged in index order.
pub fn mcwf_ensemble(jumps: &JumpSet, config: &SimConfig) -> Result<(TimeSeries, Vec<TrajectoryRecord>)> {
    config.validate()?;
    let jidx = JumpIndex::new(jumps);
    let dt = resolve_dt(jumps, &jidx, config)?;
    let psi0 = CosetPairState::logical(jumps.n(), &config.initial);
    let records = (0..config.n_traj as u64)
        .into_par_iter()
        .map(|k| evolve_with(psi0, jumps, &jidx, config, dt, k))
        .collect::<Result<Vec<_>>>()?;
    Ok((average_records(&config.t_grid, &records), records))
}
