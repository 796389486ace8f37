//! Two-phase clocked behavioral simulation of the gate.
//!
//! Each clock cycle starts with equalization (clock high): both latch nodes are
//! shunted to `v_dd / 2`. In the evaluation phase (clock low) the branch
//! current imbalance sets an initial node imbalance `|dI| * r_sense` that the
//! cross-coupled inverters grow as `exp(t / tau)` until the nodes hit their
//! rails. An imbalance below `v_meta_floor`, or one that cannot reach the rails
//! inside the evaluation window, leaves the latch metastable at `v_dd / 2`.

use std::fmt::Write as _;

use crate::error::TransientError;
use crate::gate::{
    BranchCurrents, GateConfig, GateOutput, InputVector, VoltageLevels, TIE_EPSILON,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClockSpec {
    pub period: f64,
    /// Fraction of each period spent in equalization.
    pub duty_eq: f64,
    pub n_cycles: usize,
    pub sample_dt: f64,
}

impl Default for ClockSpec {
    fn default() -> Self {
        ClockSpec::with_cycles(4)
    }
}

impl ClockSpec {
    /// Default timing (2 ms period, 50 % equalization, 200 samples per period).
    pub fn with_cycles(n_cycles: usize) -> Self {
        ClockSpec {
            period: 2e-3,
            duty_eq: 0.5,
            n_cycles,
            sample_dt: 2e-3 / 200.0,
        }
    }

    pub fn validate(&self) -> Result<(), TransientError> {
        let bad = |m: &str| Err(TransientError::InvalidClock(m.to_string()));
        if !(self.period > 0.0 && self.period.is_finite()) {
            return bad("period must be positive");
        }
        if !(self.duty_eq > 0.0 && self.duty_eq < 1.0) {
            return bad("duty_eq must lie in (0, 1)");
        }
        if self.n_cycles == 0 {
            return bad("n_cycles must be at least 1");
        }
        if !(self.sample_dt > 0.0 && self.sample_dt <= self.period / 20.0) {
            return bad("sample_dt must lie in (0, period/20]");
        }
        Ok(())
    }

    pub fn evaluation_window(&self) -> f64 {
        (1.0 - self.duty_eq) * self.period
    }

    fn sample_count(&self) -> usize {
        let total = self.n_cycles as f64 * self.period;
        ((total / self.sample_dt) - 1e-9).ceil() as usize
    }

    /// Phase of time `t`: cycle index and, during evaluation, time since the
    /// evaluation phase started.
    pub fn phase_at(&self, t: f64) -> (usize, Option<f64>) {
        let pos = t / self.period;
        let cycle = (pos + 1e-12).floor().max(0.0);
        let local = ((pos - cycle) * self.period).max(0.0);
        let eq_end = self.duty_eq * self.period;
        let phase = if local < eq_end - 1e-12 * self.period {
            None
        } else {
            Some((local - eq_end).max(0.0))
        };
        (cycle as usize, phase)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransientParams {
    /// Latch positive-feedback time constant.
    pub tau: f64,
    /// Transimpedance from current imbalance to initial node imbalance.
    pub r_sense: f64,
    /// Smallest resolvable initial imbalance.
    pub v_meta_floor: f64,
}

impl Default for TransientParams {
    fn default() -> Self {
        TransientParams {
            tau: 100e-9,
            r_sense: 10e3,
            v_meta_floor: 1e-6,
        }
    }
}

impl TransientParams {
    pub fn validate(&self) -> Result<(), TransientError> {
        if [self.tau, self.r_sense, self.v_meta_floor]
            .iter()
            .all(|x| x.is_finite() && *x > 0.0)
        {
            Ok(())
        } else {
            Err(TransientError::InvalidParams(
                "tau, r_sense and v_meta_floor must be positive".into(),
            ))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Settle {
    /// Time after evaluation starts at which the nodes reach their rails.
    Resolved(f64),
    Unresolved,
}

impl Settle {
    pub fn time(self) -> Option<f64> {
        match self {
            Settle::Resolved(t) => Some(t),
            Settle::Unresolved => None,
        }
    }
}

pub fn settle_time(delta_i: f64, params: &TransientParams, levels: &VoltageLevels) -> Settle {
    let dv0 = delta_i.abs() * params.r_sense;
    if !(dv0 >= params.v_meta_floor) {
        return Settle::Unresolved;
    }
    let t = params.tau * (levels.v_dd / (2.0 * dv0)).ln();
    Settle::Resolved(t.max(0.0))
}

/// Output stage inverter; its switching point sits below `v_dd / 2` so the
/// equalization level reads as high input (output low).
pub fn isolation_inverter(v_in: f64, levels: &VoltageLevels) -> f64 {
    let v_il = levels.v_low + (levels.v_dd - levels.v_low) / 4.0;
    if v_in < v_il {
        levels.v_high
    } else {
        levels.v_low
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CycleReport {
    pub input: InputVector,
    pub currents: BranchCurrents,
    pub settle: Settle,
    /// True when the latch reaches its rails within the evaluation window.
    pub resolved: bool,
    /// Rail-settled logic values, present only for resolved cycles.
    pub output: Option<GateOutput>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub clk: f64,
    pub inputs: Vec<f64>,
    pub ca: f64,
    pub co: f64,
    pub cabar: f64,
    pub cobar: f64,
    pub cycle: usize,
    pub evaluating: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WaveformTrace {
    pub n_inputs: usize,
    pub samples: Vec<Sample>,
    pub cycles: Vec<CycleReport>,
}

impl WaveformTrace {
    pub fn csv_header(n_inputs: usize) -> String {
        let mut h = String::from("t_s,clk_v");
        for i in 1..=n_inputs {
            let _ = write!(h, ",in{i}_v");
        }
        h.push_str(",ca_v,co_v,cabar_v,cobar_v,resolved");
        h
    }

    /// Fixed-format CSV: 9 significant digits, rows strictly increasing in time.
    pub fn to_csv(&self) -> String {
        let mut out = Self::csv_header(self.n_inputs);
        out.push('\n');
        for s in &self.samples {
            let _ = write!(out, "{:.8e},{:.8e}", s.t, s.clk);
            for v in &s.inputs {
                let _ = write!(out, ",{v:.8e}");
            }
            let _ = writeln!(
                out,
                ",{:.8e},{:.8e},{:.8e},{:.8e},{}",
                s.ca, s.co, s.cabar, s.cobar, self.cycles[s.cycle].resolved as u8
            );
        }
        out
    }
}

pub fn simulate(
    config: &GateConfig,
    input_sequence: &[InputVector],
    clock: &ClockSpec,
    params: &TransientParams,
) -> Result<WaveformTrace, TransientError> {
    clock.validate()?;
    params.validate()?;
    if input_sequence.len() != clock.n_cycles {
        return Err(TransientError::SequenceMismatch {
            inputs: input_sequence.len(),
            cycles: clock.n_cycles,
        });
    }
    let levels = config.levels();
    let window = clock.evaluation_window();

    let mut cycles = Vec::with_capacity(clock.n_cycles);
    for input in input_sequence {
        let currents = config.branch_currents(input)?;
        let logic = config.evaluate(input)?;
        let scale = currents.i_in.max(currents.i_th);
        let tie = (currents.i_in - currents.i_th).abs() <= TIE_EPSILON * scale;
        let delta = if tie { 0.0 } else { currents.delta() };
        let settle = settle_time(delta, params, &levels);
        let resolved = matches!(settle, Settle::Resolved(t) if t <= window);
        cycles.push(CycleReport {
            input: input.clone(),
            currents,
            settle,
            resolved,
            output: resolved.then_some(logic),
        });
    }

    let mid = levels.v_dd / 2.0;
    let n = config.n_inputs();
    let samples = (0..clock.sample_count())
        .map(|k| {
            let t = k as f64 * clock.sample_dt;
            let (cycle_idx, eval) = clock.phase_at(t);
            let cycle_idx = cycle_idx.min(clock.n_cycles - 1);
            let cycle = &cycles[cycle_idx];
            let inputs = cycle
                .input
                .bits()
                .iter()
                .map(|&b| if b { levels.v_low } else { levels.v_high })
                .collect();
            let (clk, ca, co) = match (eval, cycle.output, cycle.settle) {
                (Some(tau_elapsed), Some(out), Settle::Resolved(ts)) => {
                    let x = if tau_elapsed >= ts {
                        1.0
                    } else {
                        ((tau_elapsed - ts) / params.tau).exp()
                    };
                    let high = mid + x * (levels.v_dd - mid);
                    let low = mid - x * (mid - levels.v_low);
                    if out.ca {
                        (levels.v_low, high, low)
                    } else {
                        (levels.v_low, low, high)
                    }
                }
                (Some(_), _, _) => (levels.v_low, mid, mid),
                (None, _, _) => (levels.v_high, mid, mid),
            };
            Sample {
                t,
                clk,
                inputs,
                ca,
                co,
                cabar: isolation_inverter(ca, &levels),
                cobar: isolation_inverter(co, &levels),
                cycle: cycle_idx,
                evaluating: eval.is_some(),
            }
        })
        .collect();

    Ok(WaveformTrace {
        n_inputs: n,
        samples,
        cycles,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn levels() -> VoltageLevels {
        VoltageLevels::default()
    }

    #[test]
    fn zero_imbalance_is_unresolved() {
        assert_eq!(
            settle_time(0.0, &TransientParams::default(), &levels()),
            Settle::Unresolved
        );
    }

    #[test]
    fn half_supply_imbalance_settles_immediately() {
        let p = TransientParams::default();
        let di = levels().v_dd / 2.0 / p.r_sense;
        assert_eq!(settle_time(di, &p, &levels()), Settle::Resolved(0.0));
        assert_eq!(settle_time(10.0 * di, &p, &levels()), Settle::Resolved(0.0));
    }

    #[test]
    fn isolation_inverter_levels() {
        let l = levels();
        assert_eq!(isolation_inverter(0.325, &l), 0.0);
        assert_eq!(isolation_inverter(0.0, &l), 0.9);
        assert_eq!(isolation_inverter(l.v_dd, &l), 0.0);
    }

    #[test]
    fn clock_validation() {
        let c = ClockSpec {
            sample_dt: 2e-4,
            ..ClockSpec::default()
        };
        assert!(c.validate().is_err());
        let c = ClockSpec {
            duty_eq: 1.0,
            ..ClockSpec::default()
        };
        assert!(c.validate().is_err());
    }

    #[test]
    fn sequence_must_match_cycles() {
        let g = GateConfig::new(vec![1e3], vec![2e3]).unwrap();
        let seq = vec![InputVector::parse("1").unwrap()];
        let err = simulate(&g, &seq, &ClockSpec::with_cycles(2), &Default::default());
        assert!(matches!(err, Err(TransientError::SequenceMismatch { .. })));
    }

    #[test]
    fn sample_grid_covers_each_cycle() {
        let c = ClockSpec::with_cycles(3);
        assert_eq!(c.sample_count(), 600);
        assert_eq!(c.phase_at(0.0), (0, None));
        assert_eq!(c.phase_at(1e-3), (0, Some(0.0)));
        assert_eq!(c.phase_at(2e-3).0, 1);
    }
}
