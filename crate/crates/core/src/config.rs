//! Project configuration and single-gate files (TOML).
//!
//! Every table is optional and falls back to the built-in defaults. Unknown
//! keys are rejected.
//!
//! ```toml
//! tie_rule = "input-wins"
//!
//! [device]
//! profile = "kohm"          # or "mohm"; base values for the keys below
//! r_min_ohm = 10000.0
//! r_max_ohm = 100000.0
//! bits = 5
//! v_prog_threshold_v = 1.0
//! step_fraction = 0.1
//! noise_sigma_rel = 0.0
//! seed = 0
//!
//! [levels]
//! v_dd_v = 0.65
//! v_high_v = 0.9
//! v_low_v = 0.0
//!
//! [transient]
//! tau_s = 1e-7
//! r_sense_ohm = 10000.0
//! v_meta_floor_v = 1e-6
//!
//! [clock]
//! period_s = 2e-3
//! duty_eq = 0.5
//! n_cycles = 4
//! sample_dt_s = 1e-5
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::device::DeviceModel;
use crate::error::FileError;
use crate::gate::{GateConfig, Tap, TieRule, VoltageLevels};
use crate::transient::{ClockSpec, TransientParams};
use crate::units::parse_resistance;

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectConfig {
    pub device: DeviceModel,
    pub seed: u64,
    pub levels: VoltageLevels,
    pub tie_rule: TieRule,
    pub transient: TransientParams,
    pub clock: ClockSpec,
}

impl Default for ProjectConfig {
    fn default() -> Self {
        ProjectConfig {
            device: DeviceModel::kohm(),
            seed: 0,
            levels: VoltageLevels::default(),
            tie_rule: TieRule::InputWins,
            transient: TransientParams::default(),
            clock: ClockSpec::default(),
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    tie_rule: Option<String>,
    device: Option<RawDevice>,
    levels: Option<RawLevels>,
    transient: Option<RawTransient>,
    clock: Option<RawClock>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDevice {
    profile: Option<String>,
    r_min_ohm: Option<f64>,
    r_max_ohm: Option<f64>,
    bits: Option<u8>,
    v_prog_threshold_v: Option<f64>,
    v_set_v: Option<f64>,
    v_reset_v: Option<f64>,
    step_fraction: Option<f64>,
    noise_sigma_rel: Option<f64>,
    seed: Option<u64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLevels {
    v_dd_v: Option<f64>,
    v_high_v: Option<f64>,
    v_low_v: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTransient {
    tau_s: Option<f64>,
    r_sense_ohm: Option<f64>,
    v_meta_floor_v: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawClock {
    period_s: Option<f64>,
    duty_eq: Option<f64>,
    n_cycles: Option<usize>,
    sample_dt_s: Option<f64>,
}

fn field_err(field: &str, message: impl ToString) -> FileError {
    FileError::Field {
        field: field.to_string(),
        message: message.to_string(),
    }
}

fn read(path: &Path) -> Result<String, FileError> {
    std::fs::read_to_string(path).map_err(|source| FileError::Io {
        path: path.display().to_string(),
        source,
    })
}

impl ProjectConfig {
    pub fn load(path: &Path) -> Result<Self, FileError> {
        Self::from_toml_str(&read(path)?).map_err(|e| prefix(e, &path.display().to_string()))
    }

    pub fn from_toml_str(text: &str) -> Result<Self, FileError> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| FileError::Parse(e.to_string()))?;
        let mut cfg = ProjectConfig::default();

        if let Some(rule) = raw.tie_rule {
            cfg.tie_rule = rule.parse().map_err(|e| field_err("tie_rule", e))?;
        }
        if let Some(d) = raw.device {
            let mut dev = match d.profile.as_deref() {
                None | Some("kohm") => DeviceModel::kohm(),
                Some("mohm") => DeviceModel::mohm(),
                Some(other) => {
                    return Err(field_err(
                        "device.profile",
                        format!("unknown profile {other:?} (expected kohm or mohm)"),
                    ))
                }
            };
            set(&mut dev.r_min, d.r_min_ohm);
            set(&mut dev.r_max, d.r_max_ohm);
            set(&mut dev.bits, d.bits);
            set(&mut dev.v_prog_threshold, d.v_prog_threshold_v);
            set(&mut dev.v_set, d.v_set_v);
            set(&mut dev.v_reset, d.v_reset_v);
            set(&mut dev.step_fraction, d.step_fraction);
            set(&mut dev.noise_sigma_rel, d.noise_sigma_rel);
            set(&mut cfg.seed, d.seed);
            dev.validate().map_err(|e| field_err("device", e))?;
            cfg.device = dev;
        }
        if let Some(l) = raw.levels {
            set(&mut cfg.levels.v_dd, l.v_dd_v);
            set(&mut cfg.levels.v_high, l.v_high_v);
            set(&mut cfg.levels.v_low, l.v_low_v);
        }
        cfg.levels.validate().map_err(|e| field_err("levels", e))?;
        cfg.levels
            .check_read_safe(&cfg.device)
            .map_err(|e| field_err("levels.v_dd_v", e))?;
        if let Some(t) = raw.transient {
            set(&mut cfg.transient.tau, t.tau_s);
            set(&mut cfg.transient.r_sense, t.r_sense_ohm);
            set(&mut cfg.transient.v_meta_floor, t.v_meta_floor_v);
        }
        cfg.transient
            .validate()
            .map_err(|e| field_err("transient", e))?;
        if let Some(c) = raw.clock {
            set(&mut cfg.clock.period, c.period_s);
            set(&mut cfg.clock.duty_eq, c.duty_eq);
            set(&mut cfg.clock.n_cycles, c.n_cycles);
            match c.sample_dt_s {
                Some(dt) => cfg.clock.sample_dt = dt,
                None => cfg.clock.sample_dt = cfg.clock.period / 200.0,
            }
        }
        cfg.clock.validate().map_err(|e| field_err("clock", e))?;
        Ok(cfg)
    }
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

fn prefix(e: FileError, path: &str) -> FileError {
    match e {
        FileError::Parse(m) => FileError::Parse(format!("{path}: {m}")),
        FileError::Field { field, message } => FileError::Field {
            field: format!("{path}: {field}"),
            message,
        },
        other => other,
    }
}

/// A memristance entry: a number of ohms or a string with a `k`/`M` suffix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Resistance {
    Ohms(f64),
    Text(String),
}

impl Resistance {
    pub fn ohms(&self) -> Result<f64, String> {
        match self {
            Resistance::Ohms(v) if v.is_finite() && *v > 0.0 => Ok(*v),
            Resistance::Ohms(v) => Err(format!("resistance must be positive, got {v}")),
            Resistance::Text(s) => parse_resistance(s).map_err(|e| e.message),
        }
    }
}

pub(crate) fn resistances(field: &str, list: &[Resistance]) -> Result<Vec<f64>, FileError> {
    list.iter()
        .enumerate()
        .map(|(i, r)| r.ohms().map_err(|m| field_err(&format!("{field}[{i}]"), m)))
        .collect()
}

/// A single gate on disk, as written by weight synthesis.
///
/// ```toml
/// inputs = [60500.0, 60000.0]
/// thresholds = [33000.0]
/// tie_rule = "input-wins"
/// tap = "CA"
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateFile {
    pub inputs: Vec<Resistance>,
    pub thresholds: Vec<Resistance>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tie_rule: Option<String>,
    /// Output the function is read from (`CA` or `CO`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tap: Option<String>,
}

impl GateFile {
    pub fn from_config(config: &GateConfig, tap: Tap) -> Self {
        GateFile {
            inputs: config
                .input_memristances()
                .iter()
                .map(|&r| Resistance::Ohms(r))
                .collect(),
            thresholds: config
                .threshold_memristances()
                .iter()
                .map(|&r| Resistance::Ohms(r))
                .collect(),
            tie_rule: Some(config.tie_rule().name().to_string()),
            tap: Some(tap.to_string()),
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("gate file serializes")
    }

    pub fn load(path: &Path) -> Result<Self, FileError> {
        let text = read(path)?;
        toml::from_str(&text).map_err(|e| FileError::Parse(format!("{}: {e}", path.display())))
    }

    /// Builds the gate; `default_tie` applies when the file names none.
    pub fn to_config(&self, default_tie: TieRule) -> Result<(GateConfig, Tap), FileError> {
        let inputs = resistances("inputs", &self.inputs)?;
        let thresholds = resistances("thresholds", &self.thresholds)?;
        let tie = match &self.tie_rule {
            Some(r) => r.parse().map_err(|e| field_err("tie_rule", e))?,
            None => default_tie,
        };
        let tap = match &self.tap {
            Some(t) => t.parse().map_err(|e| field_err("tap", e))?,
            None => Tap::Ca,
        };
        Ok((GateConfig::new(inputs, thresholds)?.with_tie_rule(tie), tap))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_default() {
        assert_eq!(
            ProjectConfig::from_toml_str("").unwrap(),
            ProjectConfig::default()
        );
    }

    #[test]
    fn partial_overrides() {
        let cfg = ProjectConfig::from_toml_str(
            "tie_rule = \"threshold-wins\"\n[device]\nprofile = \"mohm\"\nbits = 7\nseed = 9\n[clock]\nn_cycles = 8\n",
        )
        .unwrap();
        assert_eq!(cfg.tie_rule, TieRule::ThresholdWins);
        assert_eq!(cfg.device.r_min, 1e6);
        assert_eq!(cfg.device.bits, 7);
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.clock.n_cycles, 8);
    }

    #[test]
    fn unknown_keys_are_errors() {
        let err = ProjectConfig::from_toml_str("[device]\nr_mni_ohm = 5.0\n").unwrap_err();
        assert!(err.to_string().contains("r_mni_ohm"), "{err}");
        assert!(ProjectConfig::from_toml_str("colour = 1\n").is_err());
    }

    #[test]
    fn unsafe_supply_is_rejected() {
        let err =
            ProjectConfig::from_toml_str("[levels]\nv_dd_v = 1.05\nv_high_v = 1.2\n").unwrap_err();
        assert!(err.to_string().contains("v_dd"), "{err}");
    }

    #[test]
    fn gate_file_round_trip() {
        let cfg = GateConfig::new(vec![60.5e3, 1.0 / 3.0 * 1e5], vec![33e3])
            .unwrap()
            .with_tie_rule(TieRule::ThresholdWins);
        let text = GateFile::from_config(&cfg, Tap::Co).to_toml();
        let back: GateFile = toml::from_str(&text).unwrap();
        let (cfg2, tap) = back.to_config(TieRule::InputWins).unwrap();
        assert_eq!(cfg2, cfg);
        assert_eq!(tap, Tap::Co);
    }

    #[test]
    fn gate_file_accepts_suffixed_strings() {
        let f: GateFile =
            toml::from_str("inputs = [\"3M\", 3e6]\nthresholds = [\"2.5M\"]\n").unwrap();
        let (cfg, _) = f.to_config(TieRule::InputWins).unwrap();
        assert_eq!(cfg.input_memristances(), &[3e6, 3e6]);
        let bad: GateFile = toml::from_str("inputs = [\"x\"]\nthresholds = [1.0]\n").unwrap();
        let err = bad.to_config(TieRule::InputWins).unwrap_err();
        assert!(err.to_string().starts_with("inputs[0]"), "{err}");
    }
}
