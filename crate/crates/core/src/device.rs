//! Behavioral model of a multi-level metal-oxide memristor and a closed-loop
//! pulse-and-verify programmer.
//!
//! Programming pulses move the resistance a fixed fraction of the remaining
//! distance toward the corresponding bound (`r_min` for positive pulses,
//! `r_max` for negative ones). Pulses whose magnitude stays below
//! `v_prog_threshold` are reads and never change state. Between the threshold
//! and the nominal set/reset amplitude the per-pulse fraction scales linearly,
//! which is what lets the programming loop land inside a narrow tolerance band.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::DeviceError;

/// Default programming pulse width (seconds). Width is carried for
/// bookkeeping; the state change does not depend on it.
pub const DEFAULT_PULSE_WIDTH: f64 = 100e-6;

/// Default verify-read amplitude (volts).
pub const READ_VOLTAGE: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviceModel {
    pub r_min: f64,
    pub r_max: f64,
    /// Quantization resolution; the device exposes `2^bits` levels.
    pub bits: u8,
    /// Minimum |bias| that changes state.
    pub v_prog_threshold: f64,
    /// Nominal positive (set) amplitude.
    pub v_set: f64,
    /// Nominal negative (reset) amplitude.
    pub v_reset: f64,
    /// Fraction of the remaining distance covered by one nominal pulse.
    pub step_fraction: f64,
    /// Relative standard deviation of the per-pulse step (0 = deterministic).
    pub noise_sigma_rel: f64,
}

impl Default for DeviceModel {
    fn default() -> Self {
        Self::kohm()
    }
}

impl DeviceModel {
    /// kΩ profile: [10 kΩ, 100 kΩ].
    pub fn kohm() -> Self {
        DeviceModel {
            r_min: 10e3,
            r_max: 100e3,
            bits: 5,
            v_prog_threshold: 1.0,
            v_set: 2.0,
            v_reset: -2.0,
            step_fraction: 0.1,
            noise_sigma_rel: 0.0,
        }
    }

    /// MΩ profile: [1 MΩ, 10 MΩ].
    pub fn mohm() -> Self {
        DeviceModel {
            r_min: 1e6,
            r_max: 10e6,
            ..Self::kohm()
        }
    }

    pub fn validate(&self) -> Result<(), DeviceError> {
        let bad = |msg: &str| Err(DeviceError::InvalidModel(msg.to_string()));
        if !(self.r_min.is_finite() && self.r_max.is_finite()) {
            return bad("resistance bounds must be finite");
        }
        if !(0.0 < self.r_min && self.r_min < self.r_max) {
            return bad("require 0 < r_min < r_max");
        }
        if !(1..=7).contains(&self.bits) {
            return bad("bits must lie in 1..=7");
        }
        if !(0.0 < self.v_prog_threshold && self.v_prog_threshold < self.v_set) {
            return bad("require 0 < v_prog_threshold < v_set");
        }
        if !(self.v_reset <= -self.v_prog_threshold) {
            return bad("v_reset must be at or below -v_prog_threshold");
        }
        if !(self.step_fraction > 0.0 && self.step_fraction < 1.0) {
            return bad("step_fraction must lie in (0, 1)");
        }
        if !(self.noise_sigma_rel >= 0.0 && self.noise_sigma_rel.is_finite()) {
            return bad("noise_sigma_rel must be a finite value >= 0");
        }
        Ok(())
    }

    pub fn levels(&self) -> usize {
        1usize << self.bits
    }

    pub fn g_min(&self) -> f64 {
        1.0 / self.r_max
    }

    pub fn g_max(&self) -> f64 {
        1.0 / self.r_min
    }

    /// Conductance spacing between adjacent quantization levels.
    pub fn conductance_step(&self) -> f64 {
        (self.g_max() - self.g_min()) / (self.levels() - 1) as f64
    }

    /// Resistance of quantization level `index`; level 0 is `r_max`.
    pub fn level_resistance(&self, index: usize) -> f64 {
        let top = self.levels() - 1;
        match index {
            0 => self.r_max,
            i if i >= top => self.r_min,
            i => 1.0 / (self.g_min() + i as f64 * self.conductance_step()),
        }
    }

    pub fn contains(&self, r: f64) -> bool {
        r >= self.r_min && r <= self.r_max
    }

    fn check_range(&self, r: f64) -> Result<(), DeviceError> {
        if self.contains(r) {
            Ok(())
        } else {
            Err(DeviceError::OutOfRange {
                value: r,
                r_min: self.r_min,
                r_max: self.r_max,
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MemristorState {
    resistance: f64,
    model: DeviceModel,
}

impl MemristorState {
    pub fn new(model: DeviceModel, resistance: f64) -> Result<Self, DeviceError> {
        model.validate()?;
        model.check_range(resistance)?;
        Ok(MemristorState { resistance, model })
    }

    /// A fully reset device (at `r_max`).
    pub fn reset(model: DeviceModel) -> Result<Self, DeviceError> {
        Self::new(model, model.r_max)
    }

    pub fn resistance(&self) -> f64 {
        self.resistance
    }

    pub fn model(&self) -> &DeviceModel {
        &self.model
    }

    /// Non-destructive read. Fails when `|v|` would program the device.
    pub fn read_current(&self, v: f64) -> Result<f64, DeviceError> {
        if v.abs() >= self.model.v_prog_threshold {
            return Err(DeviceError::ReadDisturb {
                v,
                threshold: self.model.v_prog_threshold,
            });
        }
        Ok(v / self.resistance)
    }

    /// Deterministic pulse response (ignores `noise_sigma_rel`).
    pub fn apply_pulse(&self, pulse: PulseSpec) -> MemristorState {
        let fraction = self.model.pulse_fraction(pulse.amplitude);
        self.step(pulse.amplitude, fraction)
    }

    /// Pulse response with the model's programming noise drawn from `rng`.
    pub fn apply_pulse_with<R: rand::Rng + ?Sized>(
        &self,
        pulse: PulseSpec,
        rng: &mut R,
    ) -> MemristorState {
        let mut fraction = self.model.pulse_fraction(pulse.amplitude);
        if fraction > 0.0 && self.model.noise_sigma_rel > 0.0 {
            let z: f64 = StandardNormal.sample(rng);
            // Scaling the step (not the state) keeps pulses monotone.
            fraction = (fraction * (1.0 + self.model.noise_sigma_rel * z)).clamp(0.0, 1.0);
        }
        self.step(pulse.amplitude, fraction)
    }

    fn step(&self, amplitude: f64, fraction: f64) -> MemristorState {
        let m = &self.model;
        let r = self.resistance;
        let next = if fraction == 0.0 {
            r
        } else if amplitude > 0.0 {
            r - fraction * (r - m.r_min)
        } else {
            r + fraction * (m.r_max - r)
        };
        MemristorState {
            resistance: next.clamp(m.r_min, m.r_max),
            model: self.model,
        }
    }
}

impl DeviceModel {
    /// Per-pulse fraction of remaining distance for a pulse of `amplitude`.
    fn pulse_fraction(&self, amplitude: f64) -> f64 {
        let mag = amplitude.abs();
        if mag < self.v_prog_threshold {
            return 0.0;
        }
        let nominal = if amplitude > 0.0 {
            self.v_set
        } else {
            -self.v_reset
        };
        let span = nominal - self.v_prog_threshold;
        let scale = if span > 0.0 {
            ((mag - self.v_prog_threshold) / span).min(1.0)
        } else {
            1.0
        };
        self.step_fraction * scale
    }

    /// Amplitude (same sign as `direction`) whose deterministic fraction
    /// equals `fraction`, saturating at the nominal amplitude.
    fn amplitude_for(&self, fraction: f64, positive: bool) -> f64 {
        let nominal = if positive { self.v_set } else { -self.v_reset };
        let scale = (fraction / self.step_fraction).min(1.0);
        let mag = self.v_prog_threshold + scale * (nominal - self.v_prog_threshold);
        if positive {
            mag
        } else {
            -mag
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseSpec {
    pub amplitude: f64,
    pub width: f64,
}

impl PulseSpec {
    pub fn new(amplitude: f64, width: f64) -> Result<Self, DeviceError> {
        if !(width > 0.0) || !amplitude.is_finite() {
            return Err(DeviceError::InvalidPulse { amplitude, width });
        }
        Ok(PulseSpec { amplitude, width })
    }

    pub fn volts(amplitude: f64) -> Self {
        PulseSpec {
            amplitude,
            width: DEFAULT_PULSE_WIDTH,
        }
    }
}

/// One programming pulse and the verify-read resistance that followed it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseRecord {
    pub pulse: PulseSpec,
    pub resistance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProgramReport {
    pub state: MemristorState,
    pub history: Vec<PulseRecord>,
}

impl ProgramReport {
    pub fn pulses(&self) -> usize {
        self.history.len()
    }
}

/// Closed-loop pulse-and-verify programmer.
///
/// Each iteration performs a verify read; if the resistance is outside the
/// tolerance band a set (too high) or reset (too low) pulse is applied whose
/// amplitude is chosen from the nominal step model.
#[derive(Debug, Clone)]
pub struct Programmer {
    rng: ChaCha8Rng,
}

impl Programmer {
    pub fn new(seed: u64) -> Self {
        Programmer {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn program(
        &mut self,
        state: MemristorState,
        target: f64,
        tol_rel: f64,
        max_pulses: usize,
    ) -> Result<ProgramReport, DeviceError> {
        let model = *state.model();
        model.check_range(target)?;
        if !(tol_rel > 0.0) {
            return Err(DeviceError::InvalidTolerance(tol_rel));
        }
        let read_v = READ_VOLTAGE.min(model.v_prog_threshold / 2.0);
        let band = tol_rel * target;
        let mut state = state;
        let mut history = Vec::new();
        loop {
            let measured = read_v / state.read_current(read_v)?;
            if (measured - target).abs() <= band {
                return Ok(ProgramReport { state, history });
            }
            if history.len() >= max_pulses {
                return Err(DeviceError::ProgramTimeout {
                    pulses: history.len(),
                    resistance: measured,
                    target,
                });
            }
            let positive = measured > target;
            let needed = if positive {
                (measured - target) / (measured - model.r_min)
            } else {
                (target - measured) / (model.r_max - measured)
            };
            let pulse = PulseSpec::volts(model.amplitude_for(needed, positive));
            state = state.apply_pulse_with(pulse, &mut self.rng);
            history.push(PulseRecord {
                pulse,
                resistance: state.resistance(),
            });
        }
    }
}

/// Deterministic closed-loop programming (seed 0 for any configured noise).
pub fn program_to_target(
    state: MemristorState,
    target: f64,
    tol_rel: f64,
    max_pulses: usize,
) -> Result<ProgramReport, DeviceError> {
    Programmer::new(0).program(state, target, tol_rel, max_pulses)
}

/// Nearest admissible level to `target`; levels are uniform in conductance
/// and ties go to the lower index.
pub fn quantize(target: f64, model: &DeviceModel) -> Result<(usize, f64), DeviceError> {
    model.validate()?;
    model.check_range(target)?;
    let g = 1.0 / target;
    let mut best = 0;
    let mut best_dist = f64::INFINITY;
    for k in 0..model.levels() {
        let dist = (1.0 / model.level_resistance(k) - g).abs();
        if dist < best_dist {
            best = k;
            best_dist = dist;
        }
    }
    Ok((best, model.level_resistance(best)))
}
