//! Exact-time sampling of the basis-state Markov chain.

use rand::Rng;
use rayon::prelude::*;

use super::index::JumpIndex;
use super::record::{average_records, Event, TimeSeries, TrajectoryRecord};
use super::{open_uniform, trajectory_rng, SimConfig};
use crate::codes::JumpSet;
use crate::error::{Error, Result};
use crate::opcore::BitString;

/// One trajectory from `s0`; `index` selects the RNG stream.
pub fn ctmc_bitstring_gillespie(
    s0: BitString,
    jumps: &JumpSet,
    config: &SimConfig,
    index: u64,
) -> Result<TrajectoryRecord> {
    config.validate()?;
    if s0.n() != jumps.n() {
        return Err(Error::DimensionMismatch { expected: jumps.n(), got: s0.n() });
    }
    run(s0.bits(), jumps, &JumpIndex::new(jumps), config, index)
}

fn run(s0: u64, jumps: &JumpSet, jidx: &JumpIndex, config: &SimConfig, index: u64) -> Result<TrajectoryRecord> {
    let code = jumps.code;
    let factor = config.initial.flip_factor();
    let mut rng = trajectory_rng(config.master_seed, index);
    let grid = &config.t_grid;
    let mut rec = TrajectoryRecord {
        master_seed: config.master_seed,
        index,
        n: jumps.n(),
        initial: s0,
        events: Vec::new(),
        path: Vec::with_capacity(grid.len()),
        decode_flags: Vec::with_capacity(grid.len()),
        infidelity: Vec::with_capacity(grid.len()),
    };
    let t_end = grid.last().copied().unwrap_or(0.0);
    let (mut s, mut t, mut next) = (s0, 0.0, 0usize);
    let mut applicable: Vec<(usize, u64, f64)> = Vec::new();
    loop {
        applicable.clear();
        jidx.for_each_applicable(jumps, s, |k, to, r| applicable.push((k, to, r)));
        let total: f64 = applicable.iter().map(|a| a.2).sum();
        let t_jump = if total > 0.0 { t - open_uniform(&mut rng).ln() / total } else { f64::INFINITY };
        while next < grid.len() && grid[next] < t_jump {
            let bad = s.count_ones() as usize > code.ell();
            rec.path.push(s);
            rec.decode_flags.push(bad);
            rec.infidelity.push(if bad { factor } else { 0.0 });
            next += 1;
        }
        if t_jump > t_end || next == grid.len() {
            break;
        }
        let target = rng.random::<f64>() * total;
        let mut acc = 0.0;
        let mut chosen = applicable[applicable.len() - 1];
        for &a in &applicable {
            acc += a.2;
            if target < acc {
                chosen = a;
                break;
            }
        }
        s = chosen.1;
        t = t_jump;
        rec.events.push(Event { time: t, label: jumps.jump(chosen.0).label.clone() });
    }
    Ok(rec)
}

/// `config.n_traj` trajectories from the all-zeros codeword, averaged in
/// index order.
pub fn gillespie_ensemble(jumps: &JumpSet, config: &SimConfig) -> Result<(TimeSeries, Vec<TrajectoryRecord>)> {
    config.validate()?;
    let jidx = JumpIndex::new(jumps);
    let records = (0..config.n_traj as u64)
        .into_par_iter()
        .map(|k| run(0, jumps, &jidx, config, k))
        .collect::<Result<Vec<_>>>()?;
    Ok((average_records(&config.t_grid, &records), records))
}
