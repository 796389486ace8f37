use thiserror::Error;

use crate::netlist::Diagnostic;
use crate::synth::Witness;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DeviceError {
    #[error("invalid device model: {0}")]
    InvalidModel(String),
    #[error("read at {v} V would program the device (threshold {threshold} V)")]
    ReadDisturb { v: f64, threshold: f64 },
    #[error("resistance {value} ohm outside device range [{r_min}, {r_max}]")]
    OutOfRange { value: f64, r_min: f64, r_max: f64 },
    #[error("tolerance must be positive, got {0}")]
    InvalidTolerance(f64),
    #[error("invalid pulse: amplitude {amplitude} V, width {width} s")]
    InvalidPulse { amplitude: f64, width: f64 },
    #[error("no convergence after {pulses} pulses: at {resistance} ohm, target {target} ohm")]
    ProgramTimeout {
        pulses: usize,
        resistance: f64,
        target: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GateError {
    #[error("gate needs at least one {0} memristance")]
    EmptyBranch(&'static str),
    #[error("memristance {value} at {branch}[{index}] must be finite and positive")]
    InvalidMemristance {
        branch: &'static str,
        index: usize,
        value: f64,
    },
    #[error("fan-in {n} exceeds the limit of {limit}")]
    FanIn { n: usize, limit: usize },
    #[error("input has {got} bits, gate has {expected} inputs")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid voltage levels: {0}")]
    InvalidLevels(String),
    #[error("boundary grid resolution must be at least 2, got {0}")]
    Resolution(usize),
    #[error("boundary grid export supports 2 or 3 inputs, gate has {0}")]
    GridDimension(usize),
    #[error("truth table length {len} is not a power of two")]
    TableLength { len: usize },
    #[error("invalid bit string: {0}")]
    BitString(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TransientError {
    #[error("invalid clock: {0}")]
    InvalidClock(String),
    #[error("invalid transient parameters: {0}")]
    InvalidParams(String),
    #[error("{inputs} input vectors supplied for {cycles} clock cycles")]
    SequenceMismatch { inputs: usize, cycles: usize },
    #[error(transparent)]
    Gate(#[from] GateError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SynthError {
    #[error("target is not realizable by a positive-weight threshold gate: {0}")]
    Infeasible(Witness),
    #[error("best relative margin {achieved:.4} is below the required {required:.4} within the device range")]
    InsufficientMargin { achieved: f64, required: f64 },
    #[error("synthesis supports up to {limit} inputs, target has {n}")]
    FanIn { n: usize, limit: usize },
    #[error("min_margin_rel must be >= 0, got {0}")]
    InvalidMargin(f64),
    #[error("linear program failed: {0}")]
    Solver(String),
    #[error(transparent)]
    Device(#[from] DeviceError),
    #[error(transparent)]
    Gate(#[from] GateError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NetlistError {
    #[error("invalid netlist:{}", fmt_diags(.0))]
    Invalid(Vec<Diagnostic>),
    #[error("network has {n} primary inputs, limit is {limit}")]
    FanIn { n: usize, limit: usize },
    #[error(transparent)]
    Gate(#[from] GateError),
}

fn fmt_diags(diags: &[Diagnostic]) -> String {
    diags.iter().map(|d| format!("\n  {d}")).collect()
}

#[derive(Debug, Error)]
pub enum FileError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Parse(String),
    #[error("{field}: {message}")]
    Field { field: String, message: String },
    #[error(transparent)]
    Netlist(#[from] NetlistError),
    #[error(transparent)]
    Device(#[from] DeviceError),
    #[error(transparent)]
    Gate(#[from] GateError),
    #[error(transparent)]
    Transient(#[from] TransientError),
}

/// A parse failure at a character offset of the input text.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("at position {position}: {message}")]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}
