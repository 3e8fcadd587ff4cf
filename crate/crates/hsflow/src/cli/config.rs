//! The canonical TOML config schema.
//!
//! ```toml
//! [grid]
//! n = 64                       # even, >= 8
//!
//! [flow]
//! t_end = 20.0
//! cfl_safety = 0.25            # optional, in (0, 1]
//! max_steps = 50000000         # optional
//!
//! [monitor]
//! every = 0.01                 # monitor row cadence (flow time)
//!
//! [snapshot]
//! every = 5.0                  # field snapshot cadence
//!
//! [potentials.1]
//! modes = [{ k = 1, cos = 0.1, sin = 0.0 }]
//! # potentials.2 / potentials.3 analogous; missing sections mean zero
//!
//! [tolerances]                 # optional, defaults shown
//! decay = 1e-6
//! conservation = 1e-9
//! quasi_isometry = 1e-6
//! volume = 1e-9
//! ```
//!
//! Sweep configs embed the same schema minus potentials under
//! `[template]`, plus a `[sweep]` section with the amplitude/mode grids.

use crate::flow::FlowConfig;
use crate::geometry::{FourierMode, InitialData};
use crate::monitors::{Tolerances, DYNAMICS_TOLERANCE, IDENTITY_TOLERANCE};
use serde::{Deserialize, Serialize};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:\n{source}")]
    Parse {
        path: String,
        #[source]
        source: Box<toml::de::Error>,
    },
    #[error("{path}: {message}")]
    Invalid { path: String, message: String },
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub grid: GridSection,
    pub flow: FlowSection,
    pub monitor: CadenceSection,
    pub snapshot: CadenceSection,
    #[serde(default)]
    pub potentials: PotentialsSection,
    #[serde(default)]
    pub tolerances: TolerancesSection,
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub n: usize,
}

fn default_cfl() -> f64 {
    0.25
}

fn default_max_steps() -> usize {
    50_000_000
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct FlowSection {
    pub t_end: f64,
    #[serde(default = "default_cfl")]
    pub cfl_safety: f64,
    #[serde(default = "default_max_steps")]
    pub max_steps: usize,
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct CadenceSection {
    pub every: f64,
}

#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialsSection {
    #[serde(default, rename = "1")]
    pub p1: PotentialCfg,
    #[serde(default, rename = "2")]
    pub p2: PotentialCfg,
    #[serde(default, rename = "3")]
    pub p3: PotentialCfg,
}

#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialCfg {
    #[serde(default)]
    pub modes: Vec<ModeCfg>,
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ModeCfg {
    pub k: u32,
    #[serde(default)]
    pub cos: f64,
    #[serde(default)]
    pub sin: f64,
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct TolerancesSection {
    #[serde(default = "dynamics_tol")]
    pub decay: f64,
    #[serde(default = "identity_tol")]
    pub conservation: f64,
    #[serde(default = "dynamics_tol")]
    pub quasi_isometry: f64,
    #[serde(default = "identity_tol")]
    pub volume: f64,
}

fn dynamics_tol() -> f64 {
    DYNAMICS_TOLERANCE
}

fn identity_tol() -> f64 {
    IDENTITY_TOLERANCE
}

impl Default for TolerancesSection {
    fn default() -> Self {
        Self {
            decay: dynamics_tol(),
            conservation: identity_tol(),
            quasi_isometry: dynamics_tol(),
            volume: identity_tol(),
        }
    }
}

fn read_and_parse<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, ConfigError> {
    let display = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: display.clone(),
        source,
    })?;
    toml::from_str(&text).map_err(|source| ConfigError::Parse {
        path: display,
        source: Box::new(source),
    })
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let cfg: RunConfig = read_and_parse(path)?;
        cfg.validate(&path.display().to_string())?;
        Ok(cfg)
    }

    pub fn validate(&self, path: &str) -> Result<(), ConfigError> {
        let invalid = |message: String| {
            Err(ConfigError::Invalid {
                path: path.to_string(),
                message,
            })
        };
        if self.grid.n < 8 || !self.grid.n.is_multiple_of(2) {
            return invalid(format!("grid.n = {} must be even and >= 8", self.grid.n));
        }
        if !(self.flow.t_end > 0.0 && self.flow.t_end.is_finite()) {
            return invalid(format!("flow.t_end = {} must be positive", self.flow.t_end));
        }
        if !(self.flow.cfl_safety > 0.0 && self.flow.cfl_safety <= 1.0) {
            return invalid(format!(
                "flow.cfl_safety = {} must lie in (0, 1]",
                self.flow.cfl_safety
            ));
        }
        if self.monitor.every <= 0.0 || self.monitor.every.is_nan() {
            return invalid(format!(
                "monitor.every = {} must be positive",
                self.monitor.every
            ));
        }
        if self.snapshot.every <= 0.0 || self.snapshot.every.is_nan() {
            return invalid(format!(
                "snapshot.every = {} must be positive",
                self.snapshot.every
            ));
        }
        for (label, p) in [
            ("1", &self.potentials.p1),
            ("2", &self.potentials.p2),
            ("3", &self.potentials.p3),
        ] {
            for m in &p.modes {
                if m.k == 0 {
                    return invalid(format!("potentials.{label}: mode k must be >= 1"));
                }
                if m.k as usize >= self.grid.n / 2 {
                    return invalid(format!(
                        "potentials.{label}: mode k = {} not resolvable at n = {} (need k < n/2)",
                        m.k, self.grid.n
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn initial_data(&self) -> InitialData {
        let mut data = InitialData::flat(self.grid.n);
        for (i, p) in [&self.potentials.p1, &self.potentials.p2, &self.potentials.p3]
            .into_iter()
            .enumerate()
        {
            for m in &p.modes {
                data.modes[i].push(FourierMode {
                    wavenumber: m.k,
                    cos_amp: m.cos,
                    sin_amp: m.sin,
                });
            }
        }
        data
    }

    pub fn flow_config(&self) -> FlowConfig {
        FlowConfig {
            t_end: self.flow.t_end,
            cfl_safety: self.flow.cfl_safety,
            max_steps: self.flow.max_steps,
            snapshot_every: self.snapshot.every,
            monitor_every: self.monitor.every,
        }
    }

    pub fn monitor_tolerances(&self) -> Tolerances {
        Tolerances {
            decay: self.tolerances.decay,
            conservation: self.tolerances.conservation,
            quasi_isometry: self.tolerances.quasi_isometry,
            volume: self.tolerances.volume,
        }
    }

    /// Expected number of monitor rows for this config (cadence count).
    pub fn expected_monitor_rows(&self) -> usize {
        let multiples = (self.flow.t_end / self.monitor.every + 1e-9).floor() as usize;
        let lands_on_end =
            (self.flow.t_end / self.monitor.every).fract().abs() < 1e-9
                || (self.flow.t_end / self.monitor.every).fract() > 1.0 - 1e-9;
        // t = 0 row, every interior multiple, plus a final row at t_end
        // when t_end is not itself a multiple.
        1 + multiples + usize::from(!lands_on_end)
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub template: TemplateConfig,
    pub sweep: SweepSection,
}

/// A run config without potentials; the sweep fills those in per case.
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct TemplateConfig {
    pub grid: GridSection,
    pub flow: FlowSection,
    pub monitor: CadenceSection,
    pub snapshot: CadenceSection,
    #[serde(default)]
    pub tolerances: TolerancesSection,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    /// Which potential (1, 2, or 3) receives the swept mode.
    pub potential: usize,
    pub modes: Vec<u32>,
    pub amplitudes: Vec<f64>,
}

impl SweepConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let cfg: SweepConfig = read_and_parse(path)?;
        let display = path.display().to_string();
        if !(1..=3).contains(&cfg.sweep.potential) {
            return Err(ConfigError::Invalid {
                path: display,
                message: format!("sweep.potential = {} must be 1, 2, or 3", cfg.sweep.potential),
            });
        }
        Ok(cfg)
    }

    /// The run configs, one per (mode, amplitude) pair in declaration order.
    pub fn cases(&self) -> Vec<(u32, f64, RunConfig)> {
        let mut cases = Vec::new();
        for &k in &self.sweep.modes {
            for &amp in &self.sweep.amplitudes {
                let mut potentials = PotentialsSection::default();
                let slot = match self.sweep.potential {
                    1 => &mut potentials.p1,
                    2 => &mut potentials.p2,
                    _ => &mut potentials.p3,
                };
                slot.modes.push(ModeCfg {
                    k,
                    cos: amp,
                    sin: 0.0,
                });
                cases.push((
                    k,
                    amp,
                    RunConfig {
                        grid: self.template.grid,
                        flow: self.template.flow,
                        monitor: self.template.monitor,
                        snapshot: self.template.snapshot,
                        potentials,
                        tolerances: self.template.tolerances,
                    },
                ));
            }
        }
        cases
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = r#"
[grid]
n = 64
[flow]
t_end = 1.0
[monitor]
every = 0.1
[snapshot]
every = 0.5
[potentials.1]
modes = [{ k = 1, cos = 0.1 }]
"#;

    #[test]
    fn parses_the_canonical_schema() {
        let cfg: RunConfig = toml::from_str(SMALL).unwrap();
        cfg.validate("test").unwrap();
        assert_eq!(cfg.grid.n, 64);
        assert_eq!(cfg.flow.cfl_safety, 0.25);
        let data = cfg.initial_data();
        assert_eq!(data.modes[0].len(), 1);
        assert!(data.modes[1].is_empty());
        assert!((cfg.monitor_tolerances().decay - 1e-6).abs() < 1e-20);
    }

    #[test]
    fn rejects_unknown_keys_with_position() {
        let err = toml::from_str::<RunConfig>(&format!("{SMALL}\n[grid2]\nn = 3\n")).unwrap_err();
        assert!(err.to_string().contains("grid2"));
    }

    #[test]
    fn rejects_odd_grid() {
        let cfg: RunConfig = toml::from_str(&SMALL.replace("n = 64", "n = 63")).unwrap();
        assert!(cfg.validate("test").is_err());
    }

    #[test]
    fn rejects_unresolvable_mode() {
        let cfg: RunConfig = toml::from_str(&SMALL.replace("k = 1", "k = 40")).unwrap();
        assert!(cfg.validate("test").is_err());
    }

    #[test]
    fn expected_rows_counts_the_cadence() {
        let cfg: RunConfig = toml::from_str(SMALL).unwrap();
        assert_eq!(cfg.expected_monitor_rows(), 11);
        let cfg2: RunConfig = toml::from_str(&SMALL.replace("every = 0.1", "every = 0.3")).unwrap();
        // rows at 0, 0.3, 0.6, 0.9 plus the final row at t_end = 1.0
        assert_eq!(cfg2.expected_monitor_rows(), 5);
    }

    #[test]
    fn sweep_cases_in_declaration_order() {
        let sweep: SweepConfig = toml::from_str(
            r#"
[template.grid]
n = 32
[template.flow]
t_end = 0.5
[template.monitor]
every = 0.1
[template.snapshot]
every = 0.25
[sweep]
potential = 2
modes = [1, 2]
amplitudes = [0.05, 0.1]
"#,
        )
        .unwrap();
        let cases = sweep.cases();
        assert_eq!(cases.len(), 4);
        assert_eq!((cases[0].0, cases[0].1), (1, 0.05));
        assert_eq!((cases[3].0, cases[3].1), (2, 0.1));
        assert_eq!(cases[1].2.potentials.p2.modes[0].k, 1);
        assert!(cases[1].2.potentials.p1.modes.is_empty());
    }
}
