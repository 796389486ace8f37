//! Steady-state model of one memristive current-mode threshold logic gate.
//!
//! Each active input contributes the conductance of its memristor to the
//! input branch; the threshold branch sums the conductances of its (always
//! active) elements. The sensor latch resolves to CA = 1 when the input-branch
//! current wins the comparison.

mod boundary;
mod truth;

pub use boundary::{boundary_grid, boundary_notes, BoundaryGrid, Hyperplane};
pub use truth::{classify, GateClass, TruthTable};

use std::fmt;

use crate::device::DeviceModel;
use crate::error::GateError;

/// Largest supported fan-in for a single gate.
pub const MAX_FAN_IN: usize = 16;

/// Relative tolerance under which two branch currents count as equal.
pub const TIE_EPSILON: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VoltageLevels {
    /// Differential-branch read supply.
    pub v_dd: f64,
    /// Logic-high level of clock and inputs.
    pub v_high: f64,
    /// Logic-low level (ground).
    pub v_low: f64,
}

impl Default for VoltageLevels {
    fn default() -> Self {
        VoltageLevels {
            v_dd: 0.65,
            v_high: 0.9,
            v_low: 0.0,
        }
    }
}

impl VoltageLevels {
    pub fn validate(&self) -> Result<(), GateError> {
        if !(self.v_low < self.v_dd && self.v_dd < self.v_high) {
            return Err(GateError::InvalidLevels(format!(
                "require v_low < v_dd < v_high, got {} / {} / {}",
                self.v_low, self.v_dd, self.v_high
            )));
        }
        Ok(())
    }

    /// The read supply must stay below the device programming threshold.
    pub fn check_read_safe(&self, device: &DeviceModel) -> Result<(), GateError> {
        if self.v_dd >= device.v_prog_threshold {
            return Err(GateError::InvalidLevels(format!(
                "v_dd {} V would program devices (threshold {} V)",
                self.v_dd, device.v_prog_threshold
            )));
        }
        Ok(())
    }
}

/// Which side wins when branch currents are equal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum TieRule {
    #[default]
    InputWins,
    ThresholdWins,
}

impl TieRule {
    pub fn name(self) -> &'static str {
        match self {
            TieRule::InputWins => "input-wins",
            TieRule::ThresholdWins => "threshold-wins",
        }
    }
}

impl std::str::FromStr for TieRule {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "input-wins" | "InputWins" => Ok(TieRule::InputWins),
            "threshold-wins" | "ThresholdWins" => Ok(TieRule::ThresholdWins),
            other => Err(format!(
                "unknown tie rule {other:?} (expected input-wins or threshold-wins)"
            )),
        }
    }
}

/// Decides the comparison `input >= threshold` with the relative tie window.
pub fn input_wins(input: f64, threshold: f64, tie: TieRule) -> bool {
    let scale = input.abs().max(threshold.abs());
    if (input - threshold).abs() <= TIE_EPSILON * scale {
        tie == TieRule::InputWins
    } else {
        input > threshold
    }
}

/// One gate instance: input and threshold memristances plus operating levels.
#[derive(Debug, Clone, PartialEq)]
pub struct GateConfig {
    inputs: Vec<f64>,
    thresholds: Vec<f64>,
    threshold_mask: Vec<bool>,
    levels: VoltageLevels,
    tie_rule: TieRule,
}

impl GateConfig {
    pub fn new(inputs: Vec<f64>, thresholds: Vec<f64>) -> Result<Self, GateError> {
        check_branch("input", &inputs)?;
        check_branch("threshold", &thresholds)?;
        if inputs.len() > MAX_FAN_IN {
            return Err(GateError::FanIn {
                n: inputs.len(),
                limit: MAX_FAN_IN,
            });
        }
        let threshold_mask = vec![true; thresholds.len()];
        Ok(GateConfig {
            inputs,
            thresholds,
            threshold_mask,
            levels: VoltageLevels::default(),
            tie_rule: TieRule::default(),
        })
    }

    pub fn with_levels(mut self, levels: VoltageLevels) -> Result<Self, GateError> {
        levels.validate()?;
        self.levels = levels;
        Ok(self)
    }

    pub fn with_tie_rule(mut self, tie_rule: TieRule) -> Self {
        self.tie_rule = tie_rule;
        self
    }

    /// Gate individual threshold elements; by default all of them conduct.
    pub fn with_threshold_mask(mut self, mask: Vec<bool>) -> Result<Self, GateError> {
        if mask.len() != self.thresholds.len() {
            return Err(GateError::DimensionMismatch {
                expected: self.thresholds.len(),
                got: mask.len(),
            });
        }
        self.threshold_mask = mask;
        Ok(self)
    }

    /// Every memristance multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self, GateError> {
        let mut out = self.clone();
        out.inputs.iter_mut().for_each(|m| *m *= factor);
        out.thresholds.iter_mut().for_each(|m| *m *= factor);
        check_branch("input", &out.inputs)?;
        check_branch("threshold", &out.thresholds)?;
        Ok(out)
    }

    pub fn n_inputs(&self) -> usize {
        self.inputs.len()
    }

    pub fn input_memristances(&self) -> &[f64] {
        &self.inputs
    }

    pub fn threshold_memristances(&self) -> &[f64] {
        &self.thresholds
    }

    pub fn threshold_mask(&self) -> &[bool] {
        &self.threshold_mask
    }

    pub fn levels(&self) -> VoltageLevels {
        self.levels
    }

    pub fn tie_rule(&self) -> TieRule {
        self.tie_rule
    }

    pub fn input_conductances(&self) -> Vec<f64> {
        self.inputs.iter().map(|m| 1.0 / m).collect()
    }

    /// Total conductance of the active threshold elements.
    pub fn threshold_conductance(&self) -> f64 {
        self.thresholds
            .iter()
            .zip(&self.threshold_mask)
            .filter(|(_, &on)| on)
            .map(|(m, _)| 1.0 / m)
            .sum()
    }

    fn check_input(&self, input: &InputVector) -> Result<(), GateError> {
        if input.len() != self.n_inputs() {
            return Err(GateError::DimensionMismatch {
                expected: self.n_inputs(),
                got: input.len(),
            });
        }
        Ok(())
    }

    pub fn branch_currents(&self, input: &InputVector) -> Result<BranchCurrents, GateError> {
        self.check_input(input)?;
        let g_in: f64 = self
            .inputs
            .iter()
            .zip(input.bits())
            .filter(|(_, &b)| b)
            .map(|(m, _)| 1.0 / m)
            .sum();
        Ok(BranchCurrents {
            i_in: self.levels.v_dd * g_in,
            i_th: self.levels.v_dd * self.threshold_conductance(),
        })
    }

    pub fn evaluate(&self, input: &InputVector) -> Result<GateOutput, GateError> {
        let currents = self.branch_currents(input)?;
        Ok(GateOutput::from_ca(input_wins(
            currents.i_in,
            currents.i_th,
            self.tie_rule,
        )))
    }

    /// CA output for every corner of the input space.
    pub fn truth_table(&self) -> Result<TruthTable, GateError> {
        let n = self.n_inputs();
        let outputs = (0..1usize << n)
            .map(|k| {
                self.evaluate(&InputVector::from_index(k, n))
                    .map(|out| out.ca)
            })
            .collect::<Result<Vec<_>, _>>()?;
        TruthTable::new(n, outputs)
    }

    /// Decision hyperplane `sum a_i g_i = g_T` in conductance form.
    pub fn hyperplane(&self) -> Hyperplane {
        Hyperplane {
            g: self.input_conductances(),
            g_t: self.threshold_conductance(),
        }
    }
}

fn check_branch(branch: &'static str, values: &[f64]) -> Result<(), GateError> {
    if values.is_empty() {
        return Err(GateError::EmptyBranch(branch));
    }
    for (index, &value) in values.iter().enumerate() {
        if !(value.is_finite() && value > 0.0) {
            return Err(GateError::InvalidMemristance {
                branch,
                index,
                value,
            });
        }
    }
    Ok(())
}

/// Logical input bits, `x1` first. Electrical polarity is applied only when
/// waveforms are emitted.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct InputVector(Vec<bool>);

impl InputVector {
    pub fn new(bits: Vec<bool>) -> Self {
        InputVector(bits)
    }

    /// Bits of truth-table row `index`; `x1` is the most significant bit.
    pub fn from_index(index: usize, n: usize) -> Self {
        InputVector((0..n).map(|i| (index >> (n - 1 - i)) & 1 == 1).collect())
    }

    pub fn index(&self) -> usize {
        self.0.iter().fold(0, |acc, &b| (acc << 1) | b as usize)
    }

    /// Parses a string of `0`/`1` characters, `x1` first.
    pub fn parse(s: &str) -> Result<Self, GateError> {
        s.chars()
            .enumerate()
            .map(|(pos, c)| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(GateError::BitString(format!(
                    "unexpected {other:?} at position {pos}"
                ))),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(InputVector)
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for InputVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, b) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", *b as u8)?;
        }
        write!(f, ")")
    }
}

/// Sensor output node: canonical (CA) or complementary (CO).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Tap {
    Ca,
    Co,
}

impl Tap {
    pub fn select(self, out: GateOutput) -> bool {
        match self {
            Tap::Ca => out.ca,
            Tap::Co => out.co,
        }
    }
}

impl fmt::Display for Tap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Tap::Ca => "CA",
            Tap::Co => "CO",
        })
    }
}

impl std::str::FromStr for Tap {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "CA" | "ca" => Ok(Tap::Ca),
            "CO" | "co" => Ok(Tap::Co),
            other => Err(format!("unknown tap {other:?} (expected CA or CO)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchCurrents {
    pub i_in: f64,
    pub i_th: f64,
}

impl BranchCurrents {
    pub fn delta(&self) -> f64 {
        self.i_in - self.i_th
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GateOutput {
    pub ca: bool,
    pub co: bool,
}

impl GateOutput {
    pub fn from_ca(ca: bool) -> Self {
        GateOutput { ca, co: !ca }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn and_gate() -> GateConfig {
        GateConfig::new(vec![60.5e3, 60e3], vec![33e3]).unwrap()
    }

    fn v(s: &str) -> InputVector {
        InputVector::parse(s).unwrap()
    }

    #[test]
    fn and_branch_currents() {
        let c = and_gate().branch_currents(&v("11")).unwrap();
        assert!((c.i_in - 21.577e-6).abs() < 5e-10, "{}", c.i_in);
        assert!((c.i_th - 19.697e-6).abs() < 5e-10, "{}", c.i_th);
    }

    #[test]
    fn zero_input_draws_no_input_current() {
        let c = and_gate().branch_currents(&v("00")).unwrap();
        assert_eq!(c.i_in, 0.0);
    }

    #[test]
    fn or_single_input_current() {
        let g = GateConfig::new(vec![33.8e3, 18.3e3], vec![41.6e3]).unwrap();
        let c = g.branch_currents(&v("01")).unwrap();
        assert!((c.i_in - 35.52e-6).abs() < 5e-9);
        assert!((c.i_th - 15.625e-6).abs() < 5e-9);
        assert!(g.evaluate(&v("01")).unwrap().ca);
    }

    #[test]
    fn dimension_mismatch() {
        assert!(matches!(
            and_gate().evaluate(&v("101")),
            Err(GateError::DimensionMismatch {
                expected: 2,
                got: 3
            })
        ));
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(GateConfig::new(vec![], vec![1.0]).is_err());
        assert!(GateConfig::new(vec![1.0], vec![]).is_err());
        assert!(GateConfig::new(vec![-1.0], vec![1.0]).is_err());
        assert!(GateConfig::new(vec![f64::NAN], vec![1.0]).is_err());
        assert!(GateConfig::new(vec![1.0; 17], vec![1.0]).is_err());
    }

    #[test]
    fn tie_rule_decides_exact_ties() {
        let g = GateConfig::new(vec![3e6, 3e6], vec![3e6]).unwrap();
        assert!(g.evaluate(&v("10")).unwrap().ca);
        let g = g.with_tie_rule(TieRule::ThresholdWins);
        assert!(!g.evaluate(&v("10")).unwrap().ca);
    }

    #[test]
    fn masked_threshold_elements_do_not_conduct() {
        let g = GateConfig::new(vec![10e3], vec![20e3, 20e3])
            .unwrap()
            .with_threshold_mask(vec![true, false])
            .unwrap();
        assert!((g.threshold_conductance() - 1.0 / 20e3).abs() < 1e-18);
    }

    #[test]
    fn input_vector_index_is_msb_first() {
        assert_eq!(InputVector::from_index(1, 2).bits(), &[false, true]);
        assert_eq!(v("110").index(), 6);
        assert!(InputVector::parse("1x").is_err());
    }

    #[test]
    fn levels_must_be_ordered() {
        let bad = VoltageLevels {
            v_dd: 1.0,
            v_high: 0.9,
            v_low: 0.0,
        };
        assert!(bad.validate().is_err());
        assert!(VoltageLevels::default()
            .check_read_safe(&DeviceModel::kohm())
            .is_ok());
    }
}
