//! Feedforward networks of threshold gates wired output tap to input slot.
//!
//! Stages are assumed ideally level-restored by the output inverters, so each
//! gate sees clean logic values and no inter-stage loading is modeled.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt;

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use crate::error::NetlistError;
use crate::gate::{GateConfig, InputVector, Tap, TruthTable};

/// Largest primary-input count for exhaustive enumeration.
pub const MAX_PRIMARY_INPUTS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Source {
    Primary(usize),
    Gate { gate: usize, tap: Tap },
}

/// Connection into input `slot` (0-based) of `gate`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Wire {
    pub from: Source,
    pub gate: usize,
    pub slot: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetGate {
    pub name: String,
    pub config: GateConfig,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Diagnostic {
    Cycle {
        gates: Vec<String>,
    },
    UnwiredInput {
        gate: String,
        slot: usize,
    },
    MultiplyDriven {
        gate: String,
        slot: usize,
        drivers: usize,
    },
    SlotOutOfRange {
        gate: String,
        slot: usize,
        arity: usize,
    },
    UnknownGate {
        index: usize,
    },
    PrimaryOutOfRange {
        index: usize,
        primary_inputs: usize,
    },
    DuplicateName {
        name: String,
    },
    /// An evaluation order visited `gate` before one of its drivers.
    NotTopological {
        gate: String,
    },
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::Cycle { gates } => write!(f, "cycle through gates {}", gates.join(", ")),
            Diagnostic::UnwiredInput { gate, slot } => {
                write!(f, "gate {gate}: input slot {slot} is not driven")
            }
            Diagnostic::MultiplyDriven {
                gate,
                slot,
                drivers,
            } => write!(f, "gate {gate}: input slot {slot} has {drivers} drivers"),
            Diagnostic::SlotOutOfRange { gate, slot, arity } => {
                write!(
                    f,
                    "gate {gate}: slot {slot} out of range (gate has {arity} inputs)"
                )
            }
            Diagnostic::UnknownGate { index } => write!(f, "reference to unknown gate #{index}"),
            Diagnostic::PrimaryOutOfRange {
                index,
                primary_inputs,
            } => write!(
                f,
                "primary input in{index} out of range ({primary_inputs} primary inputs)"
            ),
            Diagnostic::DuplicateName { name } => write!(f, "duplicate gate name {name}"),
            Diagnostic::NotTopological { gate } => {
                write!(f, "gate {gate} evaluated before its drivers")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Netlist {
    pub gates: Vec<NetGate>,
    pub wires: Vec<Wire>,
    pub primary_inputs: usize,
    pub outputs: Vec<(usize, Tap)>,
}

impl Netlist {
    pub fn new(primary_inputs: usize) -> Self {
        Netlist {
            primary_inputs,
            ..Default::default()
        }
    }

    pub fn add_gate(&mut self, name: impl Into<String>, config: GateConfig) -> usize {
        self.gates.push(NetGate {
            name: name.into(),
            config,
        });
        self.gates.len() - 1
    }

    pub fn connect(&mut self, from: Source, gate: usize, slot: usize) {
        self.wires.push(Wire { from, gate, slot });
    }

    pub fn add_output(&mut self, gate: usize, tap: Tap) {
        self.outputs.push((gate, tap));
    }

    pub fn gate_index(&self, name: &str) -> Option<usize> {
        self.gates.iter().position(|g| g.name == name)
    }

    fn gate_name(&self, index: usize) -> String {
        self.gates
            .get(index)
            .map(|g| g.name.clone())
            .unwrap_or_else(|| format!("#{index}"))
    }

    /// Checks names, references, slot coverage and acyclicity. On success
    /// returns the driver of every slot (`drivers[gate][slot]`).
    fn check(&self) -> Result<Vec<Vec<Source>>, NetlistError> {
        let mut diags = Vec::new();
        for (i, g) in self.gates.iter().enumerate() {
            if self.gates[..i].iter().any(|h| h.name == g.name) {
                diags.push(Diagnostic::DuplicateName {
                    name: g.name.clone(),
                });
            }
        }

        let mut drivers: Vec<Vec<Vec<Source>>> = self
            .gates
            .iter()
            .map(|g| vec![Vec::new(); g.config.n_inputs()])
            .collect();
        for w in &self.wires {
            match w.from {
                Source::Primary(k) if k >= self.primary_inputs => {
                    diags.push(Diagnostic::PrimaryOutOfRange {
                        index: k,
                        primary_inputs: self.primary_inputs,
                    });
                }
                Source::Gate { gate, .. } if gate >= self.gates.len() => {
                    diags.push(Diagnostic::UnknownGate { index: gate });
                }
                _ => {}
            }
            match drivers.get_mut(w.gate) {
                None => diags.push(Diagnostic::UnknownGate { index: w.gate }),
                Some(slots) => match slots.get_mut(w.slot) {
                    None => diags.push(Diagnostic::SlotOutOfRange {
                        gate: self.gate_name(w.gate),
                        slot: w.slot,
                        arity: self.gates[w.gate].config.n_inputs(),
                    }),
                    Some(list) => list.push(w.from),
                },
            }
        }
        for &(gate, _) in &self.outputs {
            if gate >= self.gates.len() {
                diags.push(Diagnostic::UnknownGate { index: gate });
            }
        }
        for (gi, slots) in drivers.iter().enumerate() {
            for (slot, list) in slots.iter().enumerate() {
                match list.len() {
                    0 => diags.push(Diagnostic::UnwiredInput {
                        gate: self.gate_name(gi),
                        slot,
                    }),
                    1 => {}
                    count => diags.push(Diagnostic::MultiplyDriven {
                        gate: self.gate_name(gi),
                        slot,
                        drivers: count,
                    }),
                }
            }
        }

        let mut graph = DiGraph::<usize, ()>::new();
        let nodes: Vec<_> = (0..self.gates.len()).map(|i| graph.add_node(i)).collect();
        for w in &self.wires {
            if let Source::Gate { gate, .. } = w.from {
                if gate < nodes.len() && w.gate < nodes.len() {
                    graph.add_edge(nodes[gate], nodes[w.gate], ());
                }
            }
        }
        for scc in tarjan_scc(&graph) {
            let looped = scc.len() > 1 || graph.contains_edge(scc[0], scc[0]);
            if looped {
                let mut idx: Vec<usize> = scc.iter().map(|n| graph[*n]).collect();
                idx.sort_unstable();
                diags.push(Diagnostic::Cycle {
                    gates: idx.into_iter().map(|i| self.gate_name(i)).collect(),
                });
            }
        }

        if diags.is_empty() {
            Ok(drivers
                .into_iter()
                .map(|slots| slots.into_iter().map(|l| l[0]).collect())
                .collect())
        } else {
            Err(NetlistError::Invalid(diags))
        }
    }

    pub fn validate(&self) -> Result<(), NetlistError> {
        self.check().map(|_| ())
    }

    /// Topological order of gates, lowest index first among ready gates.
    pub fn topological_order(&self) -> Result<Vec<usize>, NetlistError> {
        let drivers = self.check()?;
        let n = self.gates.len();
        let mut fanout: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut pending = vec![0usize; n];
        for (gate, slots) in drivers.iter().enumerate() {
            for src in slots {
                if let Source::Gate { gate: from, .. } = *src {
                    fanout[from].push(gate);
                    pending[gate] += 1;
                }
            }
        }
        let mut ready: BinaryHeap<Reverse<usize>> =
            (0..n).filter(|&g| pending[g] == 0).map(Reverse).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(Reverse(g)) = ready.pop() {
            order.push(g);
            for &next in &fanout[g] {
                pending[next] -= 1;
                if pending[next] == 0 {
                    ready.push(Reverse(next));
                }
            }
        }
        Ok(order)
    }

    pub fn evaluate_network(&self, inputs: &InputVector) -> Result<Vec<bool>, NetlistError> {
        let order = self.topological_order()?;
        self.evaluate_in_order(&order, inputs)
    }

    /// Evaluates gates in the supplied order, which must be topological.
    pub fn evaluate_in_order(
        &self,
        order: &[usize],
        inputs: &InputVector,
    ) -> Result<Vec<bool>, NetlistError> {
        let drivers = self.check()?;
        if inputs.len() != self.primary_inputs {
            return Err(crate::error::GateError::DimensionMismatch {
                expected: self.primary_inputs,
                got: inputs.len(),
            }
            .into());
        }
        let mut outs: Vec<Option<crate::gate::GateOutput>> = vec![None; self.gates.len()];
        let read = |outs: &[Option<crate::gate::GateOutput>], src: Source| match src {
            Source::Primary(k) => Some(inputs.bits()[k]),
            Source::Gate { gate, tap } => outs[gate].map(|o| tap.select(o)),
        };
        for &g in order {
            let bits = drivers[g]
                .iter()
                .map(|&src| read(&outs, src))
                .collect::<Option<Vec<bool>>>()
                .ok_or_else(|| {
                    NetlistError::Invalid(vec![Diagnostic::NotTopological {
                        gate: self.gate_name(g),
                    }])
                })?;
            outs[g] = Some(self.gates[g].config.evaluate(&InputVector::new(bits))?);
        }
        self.outputs
            .iter()
            .map(|&(gate, tap)| {
                outs[gate].map(|o| tap.select(o)).ok_or_else(|| {
                    NetlistError::Invalid(vec![Diagnostic::UnknownGate { index: gate }])
                })
            })
            .collect()
    }

    /// One truth table per primary output, by exhaustive enumeration.
    pub fn network_truth_table(&self) -> Result<Vec<TruthTable>, NetlistError> {
        let n = self.primary_inputs;
        if n > MAX_PRIMARY_INPUTS {
            return Err(NetlistError::FanIn {
                n,
                limit: MAX_PRIMARY_INPUTS,
            });
        }
        let order = self.topological_order()?;
        let mut columns = vec![Vec::with_capacity(1 << n); self.outputs.len()];
        for row in 0..1usize << n {
            let outs = self.evaluate_in_order(&order, &InputVector::from_index(row, n))?;
            for (col, bit) in columns.iter_mut().zip(outs) {
                col.push(bit);
            }
        }
        columns
            .into_iter()
            .map(|c| TruthTable::new(n, c).map_err(NetlistError::from))
            .collect()
    }
}
