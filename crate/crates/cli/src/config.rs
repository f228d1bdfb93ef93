//! TOML run configuration. Every section is optional and falls back to defaults.

use std::path::Path;

use anyhow::{Context, Result};
use ilw_core::experiments::{
    ConvergenceStudySpec, EquicontinuitySpec, FdCheckSpec, InstabilityWitnessSpec, Profile,
    ResonanceSweepSpec, RunSettings,
};
use ilw_core::EquationKind;
use serde::{Deserialize, Serialize};

pub const DEFAULT_SEED: u64 = 20240601;
/// TOML integers are signed 64-bit.
pub const MAX_SEED: u64 = i64::MAX as u64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvolveSpec {
    pub kind: EquationKind,
    pub profile: Profile,
    pub delta: f64,
    pub horizon: f64,
    /// Sobolev index of the `hs` diagnostic.
    pub s: f64,
    pub linear_only: bool,
    pub settings: RunSettings,
}

impl Default for EvolveSpec {
    fn default() -> Self {
        Self {
            kind: EquationKind::ScaledIlw,
            profile: Profile::default(),
            delta: 0.25,
            horizon: 1.0,
            s: 0.0,
            linear_only: false,
            settings: RunSettings::default(),
        }
    }
}

impl EvolveSpec {
    pub fn validate(&self) -> ilw_core::Result<()> {
        self.settings.solver_config(self.delta, self.horizon, self.s)?;
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub seed: Option<u64>,
    pub resonance_sweep: ResonanceSweepSpec,
    pub evolve: EvolveSpec,
    pub converge: ConvergenceStudySpec,
    pub equicont: EquicontinuitySpec,
    pub instability: InstabilityWitnessSpec,
    pub fd_check: FdCheckSpec,
}

impl Config {
    pub fn validate(&self) -> ilw_core::Result<()> {
        if let Some(seed) = self.seed.filter(|&s| s > MAX_SEED) {
            return Err(ilw_core::Error::Parameter(format!(
                "seed must satisfy seed ≤ {MAX_SEED}, got {seed}"
            )));
        }
        self.resonance_sweep.validate()?;
        self.evolve.validate()?;
        self.converge.validate()?;
        self.equicont.validate()?;
        self.instability.validate()?;
        self.fd_check.validate()?;
        Ok(())
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }

    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }
}

pub fn parse_config_str(text: &str) -> Result<Config> {
    let cfg: Config = toml::from_str(text)?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn parse_config(path: &Path) -> Result<Config> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    parse_config_str(&text).with_context(|| format!("in config {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_is_default() {
        let c = parse_config_str("").unwrap();
        assert_eq!(c, Config::default());
        assert_eq!(c.seed(), DEFAULT_SEED);
    }

    #[test]
    fn negative_delta_cites_range() {
        let err = parse_config_str("[evolve]\ndelta = -1.0\n").unwrap_err();
        assert!(format!("{err:#}").contains("delta ≥ 0"), "{err:#}");
    }

    #[test]
    fn unknown_key_is_named() {
        let err = parse_config_str("[converge]\nhorizn = 2.0\n").unwrap_err();
        assert!(format!("{err:#}").contains("horizn"), "{err:#}");
        let err = parse_config_str("bogus = 1\n").unwrap_err();
        assert!(format!("{err:#}").contains("bogus"));
    }

    #[test]
    fn partial_section_keeps_other_defaults() {
        let c = parse_config_str(
            "seed = 7\n[instability]\ns = 1.0\n[evolve]\nkind = \"low-frequency\"\n[evolve.profile]\nshape = \"zero\"\n",
        )
        .unwrap();
        assert_eq!(c.seed(), 7);
        assert_eq!(c.instability.s, 1.0);
        assert_eq!(c.instability.theta, 0.1);
        assert_eq!(c.evolve.kind, EquationKind::LowFrequency);
        assert_eq!(c.evolve.profile, Profile::Zero);
    }

    #[test]
    fn round_trip() {
        let c = parse_config_str("[converge]\ndelta_grid = [0.5, 0.0]\n").unwrap();
        let back = parse_config_str(&c.to_toml().unwrap()).unwrap();
        assert_eq!(back, c);
    }
}
