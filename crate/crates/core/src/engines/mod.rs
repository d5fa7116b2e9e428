//! Dynamics engines.
//!
//! Four tiers share one [`JumpSet`](crate::codes::JumpSet):
//!
//! * [`dense`]: Lindblad master equation on full density matrices (`n <= 7`).
//! * [`mcwf`]: Monte Carlo wave-function trajectories with fixed steps.
//! * [`gillespie`]: exact-time sampling of the basis-state Markov chain.
//! * [`chain`]: transient solution of the error-weight birth-death chain.
//!
//! Every operator is a basis permutation with diagonal `L^dag L`, so the
//! populations follow a classical chain and the exact tiers agree to
//! integration accuracy. Times are absolute (same units as the rates).

pub mod chain;
pub mod dense;
pub mod gillespie;
pub mod index;
pub mod mcwf;
mod record;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::opcore::C64;

pub use chain::{codeword_start, weight_chain_generator, weight_chain_transient, WeightChainGenerator};
pub use dense::lindblad_dense_evolve;
pub use gillespie::{ctmc_bitstring_gillespie, gillespie_ensemble};
pub use index::JumpIndex;
pub use mcwf::{mcwf_ensemble, mcwf_evolve, CosetPairState, DenseState, McwfState};
pub use record::{
    decode_fidelity_density, decode_fidelity_vector, infidelity_series, read_jsonl, write_jsonl, EngineOutput, Event,
    TimeSeries, TrajectoryRecord,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EngineKind {
    Dense,
    Mcwf,
    Gillespie,
    Chain,
}

impl std::str::FromStr for EngineKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dense" => Ok(Self::Dense),
            "mcwf" => Ok(Self::Mcwf),
            "gillespie" => Ok(Self::Gillespie),
            "chain" => Ok(Self::Chain),
            other => Err(Error::InvalidConfig(format!("unknown engine {other:?}"))),
        }
    }
}

impl EngineKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Dense => "dense",
            Self::Mcwf => "mcwf",
            Self::Gillespie => "gillespie",
            Self::Chain => "chain",
        }
    }
}

/// Logical state `alpha |0_L> + beta |1_L>`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogicalState {
    pub alpha: C64,
    pub beta: C64,
}

impl Default for LogicalState {
    /// `(|0_L> + i |1_L>) / sqrt(2)`.
    fn default() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self { alpha: C64::new(h, 0.0), beta: C64::new(0.0, h) }
    }
}

impl LogicalState {
    pub fn new(alpha: C64, beta: C64) -> Result<Self> {
        let norm = (alpha.norm_sqr() + beta.norm_sqr()).sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::InvalidConfig("logical state has zero norm".into()));
        }
        Ok(Self { alpha: alpha / norm, beta: beta / norm })
    }

    /// `1 - |<psi|X_L|psi>|^2`: infidelity of a logical flip. Misdecode
    /// probability times this factor is the decoded infidelity.
    pub fn flip_factor(&self) -> f64 {
        let overlap = 2.0 * (self.alpha.conj() * self.beta).re;
        1.0 - overlap * overlap
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub t_max: f64,
    /// Sample times, sorted, within `[0, t_max]`.
    pub t_grid: Vec<f64>,
    pub n_traj: usize,
    /// MCWF step; `None` picks `1e-3 / max total rate`.
    pub dt: Option<f64>,
    pub master_seed: u64,
    pub engine: EngineKind,
    #[serde(default)]
    pub initial: LogicalState,
}

/// `dt * (largest total rate)` must not exceed this.
pub const MAX_JUMP_PROBABILITY: f64 = 0.1;

impl SimConfig {
    /// `points` log-spaced times in `[1e-3, 3] / gamma_e`, ending at `t_max = 3 / gamma_e`.
    pub fn log_grid(gamma_e: f64, points: usize) -> Vec<f64> {
        log_spaced(1e-3 / gamma_e, 3.0 / gamma_e, points)
    }

    /// Defaults of the reference experiment: 60-point grid up to `3 / gamma_e`.
    pub fn standard(gamma_e: f64, engine: EngineKind, n_traj: usize, master_seed: u64) -> Self {
        Self {
            t_max: 3.0 / gamma_e,
            t_grid: Self::log_grid(gamma_e, 60),
            n_traj,
            dt: None,
            master_seed,
            engine,
            initial: LogicalState::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_max.is_finite() && self.t_max >= 0.0) {
            return Err(Error::InvalidConfig(format!("t_max = {}", self.t_max)));
        }
        if self.t_grid.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidConfig("t_grid must be sorted".into()));
        }
        if self.t_grid.iter().any(|&t| !(0.0..=self.t_max * (1.0 + 1e-12)).contains(&t)) {
            return Err(Error::InvalidConfig("t_grid must lie within [0, t_max]".into()));
        }
        if self.n_traj == 0 {
            return Err(Error::InvalidConfig("n_traj must be at least 1".into()));
        }
        if let Some(dt) = self.dt {
            if !(dt.is_finite() && dt > 0.0) {
                return Err(Error::InvalidConfig(format!("dt = {dt}")));
            }
        }
        Ok(())
    }
}

pub fn log_spaced(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![hi],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            (0..points)
                .map(|k| if k + 1 == points { hi } else { (a + (b - a) * k as f64 / (points - 1) as f64).exp() })
                .collect()
        }
    }
}

/// RNG for trajectory `index`: ChaCha8 keyed by `master_seed`, with the
/// trajectory index as the stream number. Streams never overlap, so
/// results do not depend on scheduling.
pub fn trajectory_rng(master_seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}

/// Draws a uniform variate in `(0, 1]`.
#[inline]
pub(crate) fn open_uniform<R: rand::Rng>(rng: &mut R) -> f64 {
    1.0 - rng.random::<f64>()
}
