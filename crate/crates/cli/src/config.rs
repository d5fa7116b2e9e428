//! Versioned TOML experiment description. Every section is optional and
//! defaults to the reference experiment; `schema_version` is required.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use tdqec::analysis::SizeConvention;
use tdqec::engines::{log_spaced, EngineKind, LogicalState};
use tdqec::ion::{IonParams, ToneSet};
use tdqec::pipeline::SchemeSpec;

use crate::error::{CliError, CliResult};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
    #[serde(default)]
    pub simulate: SimulateSection,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub rates: RatesSection,
    #[serde(default)]
    pub verify: VerifySection,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            seed: 0,
            out_dir: None,
            simulate: SimulateSection::default(),
            sweep: SweepSection::default(),
            rates: RatesSection::default(),
            verify: VerifySection::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    #[default]
    Log,
    Linear,
}

/// `points` samples from `lo` to `hi` inclusive.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
    #[serde(default)]
    pub spacing: Spacing,
}

impl Grid {
    pub fn values(&self) -> Vec<f64> {
        match self.spacing {
            Spacing::Log => log_spaced(self.lo, self.hi, self.points),
            Spacing::Linear if self.points == 1 => vec![self.hi],
            Spacing::Linear => {
                let step = (self.hi - self.lo) / (self.points - 1) as f64;
                (0..self.points)
                    .map(|k| if k + 1 == self.points { self.hi } else { self.lo + step * k as f64 })
                    .collect()
            }
        }
    }

    fn validate(&self, what: &str) -> CliResult<()> {
        let lo_ok = match self.spacing {
            Spacing::Log => self.lo > 0.0,
            Spacing::Linear => self.lo >= 0.0,
        };
        if !(lo_ok && self.lo.is_finite() && self.hi.is_finite() && self.hi >= self.lo && self.points >= 1) {
            return Err(CliError::Config(format!("{what}: bad grid {self:?}")));
        }
        Ok(())
    }
}

/// Error rates either listed or generated.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RateGrid {
    List(Vec<f64>),
    Range(Grid),
}

impl RateGrid {
    pub fn values(&self) -> Vec<f64> {
        match self {
            Self::List(v) => v.clone(),
            Self::Range(g) => g.values(),
        }
    }

    fn validate(&self, what: &str) -> CliResult<()> {
        if let Self::Range(g) = self {
            g.validate(what)?;
        }
        let v = self.values();
        if v.is_empty() || v.iter().any(|g| !(g.is_finite() && *g > 0.0)) {
            return Err(CliError::Config(format!("{what}: error rates must be positive, got {v:?}")));
        }
        if v.windows(2).any(|w| w[1] <= w[0]) {
            return Err(CliError::Config(format!("{what}: error rates must be strictly increasing")));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateSection {
    pub sizes: Vec<usize>,
    pub schemes: Vec<SchemeSpec>,
    pub gamma_e: RateGrid,
    pub gamma_c: f64,
    pub engine: EngineKind,
    pub n_traj: usize,
    /// MCWF step in absolute time; unset picks it from the rates.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    /// Sample times in units of `1 / gamma_e`.
    pub times: Grid,
    #[serde(default)]
    pub initial: LogicalState,
    /// Also dump every stochastic trajectory as JSON lines.
    #[serde(default)]
    pub write_trajectories: bool,
}

impl Default for SimulateSection {
    /// Thirteen qubits at `gamma_e = 0.01 gamma_c`: lookup, every
    /// truncation of trickle-down, and no correction.
    fn default() -> Self {
        let mut schemes = vec![SchemeSpec::LookupTable];
        schemes.extend((1..=6).map(|m| SchemeSpec::TrickleDown { m: Some(m) }));
        schemes.push(SchemeSpec::Uncorrected);
        Self {
            sizes: vec![13],
            schemes,
            gamma_e: RateGrid::List(vec![0.01]),
            gamma_c: 1.0,
            engine: EngineKind::Chain,
            n_traj: 1000,
            dt: None,
            times: Grid { lo: 1e-3, hi: 3.0, points: 60, spacing: Spacing::Log },
            initial: LogicalState::default(),
            write_trajectories: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtrapolationSection {
    pub target: f64,
    pub gamma_e: f64,
    #[serde(default)]
    pub convention: SizeConvention,
    /// Prefactor `C` of `p_L = C (gamma_e / gamma_e*)^(ell+1)`; estimated
    /// from the sweep when unset.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prefactor: Option<f64>,
}

impl Default for ExtrapolationSection {
    fn default() -> Self {
        Self { target: 1e-15, gamma_e: 0.01, convention: SizeConvention::Distance, prefactor: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub sizes: Vec<usize>,
    pub schemes: Vec<SchemeSpec>,
    pub gamma_e: RateGrid,
    pub gamma_c: f64,
    #[serde(default)]
    pub extrapolation: ExtrapolationSection,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            sizes: vec![3, 5, 7, 9, 11, 13],
            schemes: vec![SchemeSpec::LookupTable, SchemeSpec::TrickleDown { m: None }],
            gamma_e: RateGrid::Range(Grid { lo: 0.01, hi: 1.0, points: 21, spacing: Spacing::Log }),
            gamma_c: 1.0,
            extrapolation: ExtrapolationSection::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RatesSection {
    pub n: usize,
    pub params: IonParams,
    pub tones: ToneSet,
    /// Resolution of the continuous rate profile over `x in [0, n]`.
    pub profile_step: f64,
}

impl Default for RatesSection {
    /// A single tone centered near weight five on eleven ions.
    fn default() -> Self {
        let params = IonParams {
            omega: 1.0,
            delta_big: 4.0,
            delta_small: 3.46,
            g_coupling: 1.66,
            kappa_eng: 1.0,
            sequential_groups: 1,
        };
        let tones = ToneSet::single(5, Some(params.g_coupling));
        Self { n: 11, params, tones, profile_step: 0.02 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifySection {
    /// Sizes for the dense Knill-Laflamme and projector checks.
    pub kl_sizes: Vec<usize>,
    /// Sizes where projector counts are checked against enumeration.
    pub count_sizes: Vec<usize>,
    /// Largest size for the counting lower bound.
    pub bound_max: usize,
}

impl Default for VerifySection {
    fn default() -> Self {
        Self { kl_sizes: vec![3, 5, 7], count_sizes: vec![3, 5, 7, 9, 11], bound_max: 63 }
    }
}

pub const MAX_KL_QUBITS: usize = 7;

fn check_sizes(what: &str, sizes: &[usize]) -> CliResult<()> {
    if sizes.is_empty() {
        return Err(CliError::Config(format!("{what}: no sizes")));
    }
    for &n in sizes {
        tdqec::codes::build_repetition(n).map_err(|e| CliError::Config(format!("{what}: {e}")))?;
    }
    if sizes.windows(2).any(|w| w[1] <= w[0]) {
        return Err(CliError::Config(format!("{what}: sizes must be strictly increasing")));
    }
    Ok(())
}

fn check_rate(what: &str, v: f64, allow_zero: bool) -> CliResult<()> {
    if !(v.is_finite() && (v > 0.0 || allow_zero && v == 0.0)) {
        return Err(CliError::Config(format!("{what} = {v}")));
    }
    Ok(())
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> CliResult<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(CliError::io(format!("reading {}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always representable as TOML")
    }

    /// SHA-256 of the canonical TOML form, as lowercase hex.
    pub fn sha256(&self) -> String {
        Sha256::digest(self.to_toml().as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn validate(&self) -> CliResult<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(CliError::Config(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        let s = &self.simulate;
        check_sizes("simulate.sizes", &s.sizes)?;
        if s.schemes.is_empty() {
            return Err(CliError::Config("simulate.schemes is empty".into()));
        }
        s.gamma_e.validate("simulate.gamma_e")?;
        check_rate("simulate.gamma_c", s.gamma_c, true)?;
        s.times.validate("simulate.times")?;
        if s.n_traj == 0 {
            return Err(CliError::Config("simulate.n_traj must be at least 1".into()));
        }
        if let Some(dt) = s.dt {
            check_rate("simulate.dt", dt, false)?;
        }
        if s.initial.alpha.norm_sqr() + s.initial.beta.norm_sqr() == 0.0 {
            return Err(CliError::Config("simulate.initial has zero norm".into()));
        }

        let w = &self.sweep;
        check_sizes("sweep.sizes", &w.sizes)?;
        if w.schemes.is_empty() {
            return Err(CliError::Config("sweep.schemes is empty".into()));
        }
        w.gamma_e.validate("sweep.gamma_e")?;
        check_rate("sweep.gamma_c", w.gamma_c, true)?;
        let x = &w.extrapolation;
        check_rate("sweep.extrapolation.target", x.target, false)?;
        check_rate("sweep.extrapolation.gamma_e", x.gamma_e, false)?;
        if let Some(c) = x.prefactor {
            check_rate("sweep.extrapolation.prefactor", c, false)?;
        }

        let r = &self.rates;
        check_sizes("rates.n", &[r.n])?;
        r.params.validate().map_err(|e| CliError::Config(format!("rates.params: {e}")))?;
        r.tones.validate(r.n / 2).map_err(|e| CliError::Config(format!("rates.tones: {e}")))?;
        check_rate("rates.profile_step", r.profile_step, false)?;

        let v = &self.verify;
        check_sizes("verify.kl_sizes", &v.kl_sizes)?;
        if let Some(&n) = v.kl_sizes.iter().find(|&&n| n > MAX_KL_QUBITS) {
            return Err(CliError::Config(format!("verify.kl_sizes: dense checks need n <= {MAX_KL_QUBITS}, got {n}")));
        }
        check_sizes("verify.count_sizes", &v.count_sizes)?;
        if let Some(&n) = v.count_sizes.iter().find(|&&n| n > tdqec::opcore::MAX_EXPLICIT_QUBITS) {
            return Err(CliError::Config(format!(
                "verify.count_sizes: enumeration limited to n <= {}, got {n}",
                tdqec::opcore::MAX_EXPLICIT_QUBITS
            )));
        }
        if !(3..=63).contains(&v.bound_max) {
            return Err(CliError::Config(format!("verify.bound_max = {} outside 3..=63", v.bound_max)));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid_and_round_trip() {
        let cfg = ExperimentConfig::default();
        cfg.validate().unwrap();
        assert_eq!(ExperimentConfig::from_toml(&cfg.to_toml()).unwrap(), cfg);
    }

    #[test]
    fn minimal_file_takes_defaults() {
        let cfg = ExperimentConfig::from_toml("schema_version = 1\n").unwrap();
        assert_eq!(cfg, ExperimentConfig::default());
    }

    #[test]
    fn rejects_unknown_fields_and_versions() {
        assert!(ExperimentConfig::from_toml("schema_version = 1\nbogus = 2\n").is_err());
        assert!(ExperimentConfig::from_toml("schema_version = 2\n").is_err());
        assert!(ExperimentConfig::from_toml("seed = 3\n").is_err());
    }

    #[test]
    fn linear_grid_hits_endpoints() {
        let g = Grid { lo: 0.0, hi: 1.0, points: 5, spacing: Spacing::Linear };
        assert_eq!(g.values(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }
}
