//! Weight synthesis for positive-weight threshold gates.
//!
//! Working in conductances normalized to the threshold (`w_i = g_i / g_T`), a
//! target is realizable iff some `w >= 0` puts every 1-row above 1 and every
//! 0-row below 1. The synthesizer maximizes the worst relative row margin
//! `|sum w - 1|` as a linear program, with pairwise ratio constraints that
//! keep every element (threshold included) inside the device conductance
//! range, then rounds each element to the device's conductance grid.

use std::collections::HashMap;
use std::fmt;

use microlp::{ComparisonOp, LinearExpr, OptimizationDirection, Problem, Variable};

use crate::device::{quantize, DeviceModel};
use crate::error::SynthError;
use crate::exact;
use crate::gate::{GateConfig, InputVector, Tap, TieRule, TruthTable};

/// Largest input count accepted by the synthesizer.
pub const MAX_SYNTH_INPUTS: usize = 10;

/// Margins at or below this are treated as "no separating weights".
const FEASIBILITY_TOL: f64 = 1e-9;

/// Why a target cannot be realized on the CA output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    /// The all-zero input is required to output 1; it draws no input current.
    ZeroInputHigh { n: usize },
    /// Two 1-rows and two 0-rows with identical input-count sums.
    Asummable {
        ones: [InputVector; 2],
        zeros: [InputVector; 2],
    },
    /// `low` is a subset of `high`, yet `f(low) = 1` and `f(high) = 0`.
    NonMonotone { low: InputVector, high: InputVector },
    /// The margin LP has no positive optimum but no small certificate was found.
    NoPositiveMargin,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::ZeroInputHigh { n } => write!(
                f,
                "{} must output 1 but no input current flows",
                InputVector::new(vec![false; *n])
            ),
            Witness::Asummable { ones, zeros } => write!(
                f,
                "{} & {} output 1 but {} & {} output 0 with the same summed inputs",
                ones[0], ones[1], zeros[0], zeros[1]
            ),
            Witness::NonMonotone { low, high } => {
                write!(f, "{low} outputs 1 but its superset {high} outputs 0")
            }
            Witness::NoPositiveMargin => write!(f, "no weights give a positive margin"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Separability {
    /// Normalized weights `w_i = g_i / g_T` and their worst relative margin.
    Separable {
        weights: Vec<f64>,
        margin: f64,
    },
    NotSeparable(Witness),
}

impl Separability {
    pub fn is_separable(&self) -> bool {
        matches!(self, Separability::Separable { .. })
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Separability::NotSeparable(w) => Some(w),
            Separability::Separable { .. } => None,
        }
    }
}

fn check_fan_in(n: usize) -> Result<(), SynthError> {
    if n > MAX_SYNTH_INPUTS {
        return Err(SynthError::FanIn {
            n,
            limit: MAX_SYNTH_INPUTS,
        });
    }
    Ok(())
}

/// Decides whether `target` is a positive-weight threshold function with a
/// strictly positive threshold.
pub fn check_separability(target: &TruthTable) -> Result<Separability, SynthError> {
    check_fan_in(target.n())?;
    let (weights, margin) = solve_margin_lp(target, None)?;
    if margin > FEASIBILITY_TOL {
        return Ok(Separability::Separable { weights, margin });
    }
    Ok(Separability::NotSeparable(find_witness(target)))
}

fn find_witness(target: &TruthTable) -> Witness {
    let n = target.n();
    if target.get(0) {
        return Witness::ZeroInputHigh { n };
    }
    if let Some(w) = asummability_witness(target) {
        return w;
    }
    if let Some((low, high)) = target.monotonicity_violation() {
        return Witness::NonMonotone {
            low: InputVector::from_index(low, n),
            high: InputVector::from_index(high, n),
        };
    }
    Witness::NoPositiveMargin
}

fn asummability_witness(target: &TruthTable) -> Option<Witness> {
    let n = target.n();
    // Per-coordinate sums of two rows, packed in base 3.
    let pair_key = |a: usize, b: usize| {
        (0..n).fold(0u64, |acc, i| {
            acc * 3 + ((a >> i) & 1) as u64 + ((b >> i) & 1) as u64
        })
    };
    let (ones, zeros): (Vec<usize>, Vec<usize>) = (0..1usize << n).partition(|&k| target.get(k));
    let mut sums: HashMap<u64, (usize, usize)> = HashMap::new();
    for (i, &a) in ones.iter().enumerate() {
        for &b in &ones[i..] {
            sums.entry(pair_key(a, b)).or_insert((a, b));
        }
    }
    for (i, &c) in zeros.iter().enumerate() {
        for &d in &zeros[i..] {
            if let Some(&(a, b)) = sums.get(&pair_key(c, d)) {
                let v = |k| InputVector::from_index(k, n);
                return Some(Witness::Asummable {
                    ones: [v(a), v(b)],
                    zeros: [v(c), v(d)],
                });
            }
        }
    }
    None
}

/// Maximizes the worst relative margin. With `ratio = Some(r)` every pair of
/// elements (inputs and threshold) is kept within conductance ratio `r`.
fn solve_margin_lp(target: &TruthTable, ratio: Option<f64>) -> Result<(Vec<f64>, f64), SynthError> {
    let n = target.n();
    let mut lp = Problem::new(OptimizationDirection::Maximize);
    let upper = ratio.unwrap_or(f64::INFINITY);
    let w: Vec<Variable> = (0..n).map(|_| lp.add_var(0.0, (0.0, upper))).collect();
    // Under a ratio limit the best margin can be far below -1.
    let floor = ratio.map_or(-1.0, |r| -(n as f64 * r + 1.0));
    let m = lp.add_var(1.0, (floor, 1.0));

    for row in 0..1usize << n {
        let mut expr = LinearExpr::empty();
        for (i, &var) in w.iter().enumerate() {
            if (row >> (n - 1 - i)) & 1 == 1 {
                expr.add(var, 1.0);
            }
        }
        if target.get(row) {
            expr.add(m, -1.0);
            lp.add_constraint(expr, ComparisonOp::Ge, 1.0);
        } else {
            expr.add(m, 1.0);
            lp.add_constraint(expr, ComparisonOp::Le, 1.0);
        }
    }
    if let Some(r) = ratio {
        for (i, &wi) in w.iter().enumerate() {
            // threshold (normalized to 1) versus each input
            lp.add_constraint([(wi, r)], ComparisonOp::Ge, 1.0);
            for (j, &wj) in w.iter().enumerate() {
                if i != j {
                    lp.add_constraint([(wi, 1.0), (wj, -r)], ComparisonOp::Le, 0.0);
                }
            }
        }
    }

    let outcome = lp.solve().map_err(|e| SynthError::Solver(e.to_string()))?;
    let solution = outcome
        .into_solution()
        .map_err(|_| SynthError::Solver("solve interrupted".into()))?;
    let weights = w.iter().map(|&v| solution.var_value(v)).collect();
    Ok((weights, solution.var_value(m)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthesisSpec {
    pub target: TruthTable,
    pub device: DeviceModel,
    pub tie_rule: TieRule,
    pub min_margin_rel: f64,
    /// Realize a non-separable target through the CO output when its
    /// complement is separable.
    pub allow_complement: bool,
}

impl SynthesisSpec {
    pub fn new(target: TruthTable, device: DeviceModel) -> Self {
        SynthesisSpec {
            target,
            device,
            tie_rule: TieRule::InputWins,
            min_margin_rel: 0.05,
            allow_complement: false,
        }
    }
}

/// Verification of a configuration against a target, row by row.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub pass: bool,
    /// Signed relative current margin per row; positive is the correct side.
    pub margins: Vec<f64>,
    pub worst_margin: f64,
    pub first_failure: Option<usize>,
}

/// A realized design.
#[derive(Debug, Clone, PartialEq)]
pub struct Design {
    pub tap: Tap,
    /// Function realized on CA (the complement of the target when `tap` is CO).
    pub ca_function: TruthTable,
    pub conductances: Vec<f64>,
    pub g_t: f64,
    pub memristances: Vec<f64>,
    pub threshold_memristance: f64,
    pub config: GateConfig,
    /// Worst relative margin of the continuous design (exact evaluation).
    pub achieved_margin: f64,
    pub quantized_config: GateConfig,
    /// Level indices, inputs first and the threshold element last.
    pub quantized_levels: Vec<usize>,
    pub quantized_check: VerifyReport,
    /// Relative margin above which grid rounding cannot flip any row.
    pub quantization_error_bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SynthesisResult {
    Feasible(Box<Design>),
    Infeasible(Witness),
}

impl SynthesisResult {
    pub fn is_feasible(&self) -> bool {
        matches!(self, SynthesisResult::Feasible(_))
    }

    pub fn design(&self) -> Option<&Design> {
        match self {
            SynthesisResult::Feasible(d) => Some(d),
            SynthesisResult::Infeasible(_) => None,
        }
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            SynthesisResult::Infeasible(w) => Some(w),
            SynthesisResult::Feasible(_) => None,
        }
    }

    pub fn into_design(self) -> Result<Design, SynthError> {
        match self {
            SynthesisResult::Feasible(d) => Ok(*d),
            SynthesisResult::Infeasible(w) => Err(SynthError::Infeasible(w)),
        }
    }
}

pub fn synthesize(spec: &SynthesisSpec) -> Result<SynthesisResult, SynthError> {
    check_fan_in(spec.target.n())?;
    spec.device.validate()?;
    if !(spec.min_margin_rel >= 0.0) {
        return Err(SynthError::InvalidMargin(spec.min_margin_rel));
    }
    let (ca_function, tap) = match check_separability(&spec.target)? {
        Separability::Separable { .. } => (spec.target.clone(), Tap::Ca),
        Separability::NotSeparable(witness) => {
            let complement = spec.target.complement();
            if spec.allow_complement && check_separability(&complement)?.is_separable() {
                (complement, Tap::Co)
            } else {
                return Ok(SynthesisResult::Infeasible(witness));
            }
        }
    };
    design_for(spec, ca_function, tap).map(|d| SynthesisResult::Feasible(Box::new(d)))
}

fn design_for(
    spec: &SynthesisSpec,
    ca_function: TruthTable,
    tap: Tap,
) -> Result<Design, SynthError> {
    let device = &spec.device;
    let n = ca_function.n();
    let ratio = device.r_max / device.r_min;
    let (weights, lp_margin) = solve_margin_lp(&ca_function, Some(ratio))?;
    let required = spec.min_margin_rel.max(FEASIBILITY_TOL);
    if lp_margin < required {
        return Err(SynthError::InsufficientMargin {
            achieved: lp_margin,
            required,
        });
    }

    // Largest scale that fits the box: bigger conductances round with a
    // smaller relative error on a conductance-uniform grid.
    let largest = weights.iter().cloned().fold(1.0, f64::max);
    let scale = device.g_max() / largest;
    let clamp = |g: f64| g.clamp(device.g_min(), device.g_max());
    let conductances: Vec<f64> = weights.iter().map(|w| clamp(w * scale)).collect();
    let g_t = clamp(scale);
    let memristances: Vec<f64> = conductances
        .iter()
        .map(|g| (1.0 / g).clamp(device.r_min, device.r_max))
        .collect();
    let threshold_memristance = (1.0 / g_t).clamp(device.r_min, device.r_max);
    let config = GateConfig::new(memristances.clone(), vec![threshold_memristance])?
        .with_tie_rule(spec.tie_rule);

    let continuous = verify_config(&config, &ca_function, Tap::Ca)?;
    if !continuous.pass {
        return Err(SynthError::Solver(format!(
            "continuous design fails row {:?}",
            continuous.first_failure
        )));
    }

    let mut quantized_levels = Vec::with_capacity(n + 1);
    let mut q_inputs = Vec::with_capacity(n);
    for &m in &memristances {
        let (level, r) = quantize(m, device)?;
        quantized_levels.push(level);
        q_inputs.push(r);
    }
    let (t_level, t_r) = quantize(threshold_memristance, device)?;
    quantized_levels.push(t_level);
    let quantized_config = GateConfig::new(q_inputs, vec![t_r])?.with_tie_rule(spec.tie_rule);
    let quantized_check = verify_config(&quantized_config, &ca_function, Tap::Ca)?;

    let quantization_error_bound = (n + 1) as f64 * device.conductance_step() / (2.0 * g_t)
        + 1e-8 * (n + 1) as f64 * device.g_max() / g_t;

    Ok(Design {
        tap,
        ca_function,
        conductances,
        g_t,
        memristances,
        threshold_memristance,
        config,
        achieved_margin: continuous.worst_margin,
        quantized_config,
        quantized_levels,
        quantized_check,
        quantization_error_bound,
    })
}

/// Re-checks a synthesized design against `target` with exact arithmetic.
pub fn verify(result: &SynthesisResult, target: &TruthTable) -> Result<VerifyReport, SynthError> {
    match result {
        SynthesisResult::Feasible(d) => verify_config(&d.config, target, d.tap),
        SynthesisResult::Infeasible(w) => Err(SynthError::Infeasible(w.clone())),
    }
}

/// Evaluates every row of `config` exactly and compares the `tap` output
/// with `target`.
pub fn verify_config(
    config: &GateConfig,
    target: &TruthTable,
    tap: Tap,
) -> Result<VerifyReport, SynthError> {
    if config.n_inputs() != target.n() {
        return Err(SynthError::Gate(
            crate::error::GateError::DimensionMismatch {
                expected: config.n_inputs(),
                got: target.n(),
            },
        ));
    }
    let mut margins = Vec::with_capacity(target.outputs().len());
    let mut first_failure = None;
    for row in 0..target.outputs().len() {
        let want_ca = match tap {
            Tap::Ca => target.get(row),
            Tap::Co => !target.get(row),
        };
        let (g_in, g_t) = exact::conductance_sums(config, row);
        let ca = exact::input_wins(&g_in, &g_t, config.tie_rule());
        if ca != want_ca && first_failure.is_none() {
            first_failure = Some(row);
        }
        margins.push(exact::relative_margin(&g_in, &g_t, want_ca));
    }
    let worst_margin = margins.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(VerifyReport {
        pass: first_failure.is_none(),
        margins,
        worst_margin,
        first_failure,
    })
}
