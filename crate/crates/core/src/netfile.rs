//! Netlist files (TOML).
//!
//! ```toml
//! primary_inputs = 2          # optional; defaults to highest in<k> + 1
//! outputs = ["C.CA"]
//!
//! [[gates]]
//! name = "A"
//! inputs = ["33.8k", "18.3k"]
//! thresholds = ["41.6k"]
//! tie_rule = "input-wins"     # optional
//!
//! [[wires]]
//! from = "in0"                # primary input k, or <gate>.CA / <gate>.CO
//! to = "A.0"                  # <gate>.<slot>, slots counted from 0
//! ```
//!
//! Top-level keys must precede the first `[[gates]]` or `[[wires]]` table.

use std::path::Path;

use serde::Deserialize;

use crate::config::{resistances, Resistance};
use crate::error::FileError;
use crate::gate::{GateConfig, Tap, TieRule};
use crate::netlist::{Netlist, Source};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNetlist {
    primary_inputs: Option<usize>,
    #[serde(default)]
    outputs: Vec<String>,
    #[serde(default)]
    gates: Vec<RawGate>,
    #[serde(default)]
    wires: Vec<RawWire>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGate {
    name: String,
    inputs: Vec<Resistance>,
    thresholds: Vec<Resistance>,
    tie_rule: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWire {
    from: String,
    to: String,
}

fn field(field: String, message: impl ToString) -> FileError {
    FileError::Field {
        field,
        message: message.to_string(),
    }
}

fn primary_index(text: &str) -> Option<usize> {
    text.strip_prefix("in")?.parse().ok()
}

pub fn parse_netlist_file(path: &Path) -> Result<Netlist, FileError> {
    let text = std::fs::read_to_string(path).map_err(|source| FileError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_netlist_str(&text).map_err(|e| match e {
        FileError::Parse(m) => FileError::Parse(format!("{}: {m}", path.display())),
        FileError::Field { field, message } => FileError::Field {
            field: format!("{}: {field}", path.display()),
            message,
        },
        other => other,
    })
}

/// Parses and validates a netlist; `default_tie` applies to gates that do not
/// name a tie rule.
pub fn parse_netlist_str_with(text: &str, default_tie: TieRule) -> Result<Netlist, FileError> {
    let raw: RawNetlist = toml::from_str(text).map_err(|e| FileError::Parse(e.to_string()))?;

    let mut highest_primary = None::<usize>;
    for (i, w) in raw.wires.iter().enumerate() {
        if w.from.starts_with("in") && !w.from.contains('.') {
            let k = primary_index(&w.from)
                .ok_or_else(|| field(format!("wires[{i}].from"), "expected in<k>"))?;
            highest_primary = Some(highest_primary.map_or(k, |h| h.max(k)));
        }
    }
    let primary_inputs = raw
        .primary_inputs
        .unwrap_or_else(|| highest_primary.map_or(0, |h| h + 1));
    let mut net = Netlist::new(primary_inputs);

    for (i, g) in raw.gates.iter().enumerate() {
        let inputs = resistances(&format!("gates[{i}].inputs"), &g.inputs)?;
        let thresholds = resistances(&format!("gates[{i}].thresholds"), &g.thresholds)?;
        let tie = match &g.tie_rule {
            Some(r) => r
                .parse()
                .map_err(|e| field(format!("gates[{i}].tie_rule"), e))?,
            None => default_tie,
        };
        let config = GateConfig::new(inputs, thresholds)
            .map_err(|e| field(format!("gates[{i}]"), e))?
            .with_tie_rule(tie);
        net.add_gate(g.name.clone(), config);
    }

    let gate_tap = |text: &str, at: String| -> Result<(usize, Tap), FileError> {
        let (name, tap) = text
            .rsplit_once('.')
            .ok_or_else(|| field(at.clone(), "expected <gate>.CA or <gate>.CO"))?;
        let gate = net
            .gate_index(name)
            .ok_or_else(|| field(at.clone(), format!("unknown gate {name:?}")))?;
        let tap: Tap = tap.parse().map_err(|e| field(at, e))?;
        Ok((gate, tap))
    };

    let mut wires = Vec::with_capacity(raw.wires.len());
    for (i, w) in raw.wires.iter().enumerate() {
        let from = match primary_index(&w.from) {
            Some(k) if !w.from.contains('.') => Source::Primary(k),
            _ => {
                let (gate, tap) = gate_tap(&w.from, format!("wires[{i}].from"))?;
                Source::Gate { gate, tap }
            }
        };
        let at = format!("wires[{i}].to");
        let (name, slot) =
            w.to.rsplit_once('.')
                .ok_or_else(|| field(at.clone(), "expected <gate>.<slot>"))?;
        let gate = net
            .gate_index(name)
            .ok_or_else(|| field(at.clone(), format!("unknown gate {name:?}")))?;
        let slot: usize = slot
            .parse()
            .map_err(|_| field(at, format!("invalid slot {slot:?}")))?;
        wires.push((from, gate, slot));
    }
    let mut outputs = Vec::with_capacity(raw.outputs.len());
    for (i, o) in raw.outputs.iter().enumerate() {
        outputs.push(gate_tap(o, format!("outputs[{i}]"))?);
    }
    for (from, gate, slot) in wires {
        net.connect(from, gate, slot);
    }
    for (gate, tap) in outputs {
        net.add_output(gate, tap);
    }

    net.validate()?;
    Ok(net)
}

pub fn parse_netlist_str(text: &str) -> Result<Netlist, FileError> {
    parse_netlist_str_with(text, TieRule::InputWins)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::NetlistError;
    use crate::netlist::Diagnostic;

    const AND1: &str = r#"
outputs = ["A.CA"]

[[gates]]
name = "A"
inputs = ["60.5k", "60k"]
thresholds = ["33k"]

[[wires]]
from = "in0"
to = "A.0"

[[wires]]
from = "in1"
to = "A.1"
"#;

    #[test]
    fn single_and_gate() {
        let net = parse_netlist_str(AND1).unwrap();
        assert_eq!(net.gates.len(), 1);
        assert_eq!(net.primary_inputs, 2);
        assert_eq!(net.network_truth_table().unwrap()[0].to_bitstring(), "1000");
    }

    #[test]
    fn cycle_is_a_netlist_error() {
        let text = r#"
outputs = ["A.CA"]
[[gates]]
name = "A"
inputs = [1000.0]
thresholds = [2000.0]
[[wires]]
from = "A.CO"
to = "A.0"
"#;
        match parse_netlist_str(text) {
            Err(FileError::Netlist(NetlistError::Invalid(d))) => {
                assert_eq!(
                    d,
                    vec![Diagnostic::Cycle {
                        gates: vec!["A".into()]
                    }]
                )
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn field_addressed_errors() {
        let bad_gate = AND1.replace("to = \"A.1\"", "to = \"B.1\"");
        let err = parse_netlist_str(&bad_gate).unwrap_err().to_string();
        assert!(err.starts_with("wires[1].to"), "{err}");
        let bad_tap = AND1.replace("A.CA", "A.XX");
        let err = parse_netlist_str(&bad_tap).unwrap_err().to_string();
        assert!(err.starts_with("outputs[0]"), "{err}");
        let bad_r = AND1.replace("\"60k\"", "\"60q\"");
        let err = parse_netlist_str(&bad_r).unwrap_err().to_string();
        assert!(err.starts_with("gates[0].inputs[1]"), "{err}");
    }

    #[test]
    fn syntax_errors_carry_line_numbers() {
        let err = parse_netlist_str("outputs = [\n[[gates]]\n")
            .unwrap_err()
            .to_string();
        assert!(err.contains("line"), "{err}");
        let err = parse_netlist_str("bogus = 1\n").unwrap_err().to_string();
        assert!(err.contains("bogus"), "{err}");
    }
}
