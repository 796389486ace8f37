//! Behavioral simulation and weight synthesis for memristor-based
//! current-mode threshold logic gates.
//!
//! - [`device`]: multi-level memristor model and closed-loop programming.
//! - [`gate`]: steady-state gate evaluation, truth tables, classification and
//!   decision boundaries.
//! - [`transient`]: two-phase clocked waveforms with latch metastability.
//! - [`synth`]: separability checks and margin-maximizing weight synthesis.
//! - [`netlist`]: feedforward gate networks.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod device;
pub mod error;
pub mod exact;
pub mod gate;
pub mod netfile;
pub mod netlist;
pub mod synth;
pub mod transient;
pub mod units;

pub use error::{
    DeviceError, FileError, GateError, NetlistError, ParseError, SynthError, TransientError,
};
pub use gate::{
    GateClass, GateConfig, GateOutput, InputVector, Tap, TieRule, TruthTable, VoltageLevels,
};
