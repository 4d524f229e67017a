//! Switch-level fixed-point simulation and truth-table extraction.
//!
//! Every non-input node starts at `Z`. A sweep visits each transistor whose
//! gate currently reads `V1` and merges the values at its two channel ends
//! into both ends. Values only rise in the lattice, so sweeping stops after at
//! most two changing sweeps per node. Gates that never settle on `V0`/`V1`
//! are reported as errors rather than treated as partially conducting.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::netlist::{Netlist, NodeId};
use crate::signal::Signal;

/// Input node values for one simulation.
pub type Assignment = BTreeMap<NodeId, Signal>;

/// Input bits and the raw output signals they produced.
pub type SweepRow = (Vec<bool>, Vec<Signal>);

/// Largest number of enumerated inputs accepted by truth-table extraction.
pub const MAX_TABLE_INPUTS: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("input `{0}` is not assigned")]
    UnboundInput(String),
    #[error("`{0}` is not an input of the netlist")]
    NotAnInput(String),
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("control input `{node}` must be 0 or 1, got {value}")]
    ControlNotBinary { node: String, value: Signal },
    #[error("gate node `{node}` settled at {value}; gates must be 0 or 1")]
    FloatingGate { node: String, value: Signal },
    #[error("internal error: no fixed point after {0} sweeps")]
    NonConvergence(usize),
    #[error("output `{node}` is undriven for inputs {inputs}")]
    UndrivenOutput { node: String, inputs: String },
    #[error("output `{node}` has a drive conflict for inputs {inputs}")]
    ConflictOutput { node: String, inputs: String },
    #[error("truth table over {0} inputs is too large (limit {MAX_TABLE_INPUTS})")]
    TooManyInputs(usize),
}

/// Precomputed index form of a netlist for repeated simulation.
#[derive(Debug, Clone)]
pub struct Simulator<'a> {
    net: &'a Netlist,
    names: Vec<&'a NodeId>,
    index: HashMap<&'a str, usize>,
    transistors: Vec<[usize; 3]>,
    is_control: Vec<bool>,
    is_input: Vec<bool>,
    constants: Vec<(usize, Signal)>,
}

/// Node values at the fixed point.
#[derive(Debug, Clone)]
pub struct SimResult<'a> {
    sim: &'a Simulator<'a>,
    values: Vec<Signal>,
    /// Sweeps that changed at least one node.
    pub sweeps: usize,
}

impl<'a> SimResult<'a> {
    pub fn get(&self, node: &str) -> Option<Signal> {
        self.sim.index.get(node).map(|&i| self.values[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&'a NodeId, Signal)> + '_ {
        self.sim
            .names
            .iter()
            .copied()
            .zip(self.values.iter().copied())
    }

    pub fn to_map(&self) -> BTreeMap<NodeId, Signal> {
        self.iter().map(|(n, s)| (n.clone(), s)).collect()
    }
}

impl<'a> Simulator<'a> {
    pub fn new(net: &'a Netlist) -> Self {
        let names: Vec<&NodeId> = net.nodes().iter().collect();
        let index: HashMap<&str, usize> = names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.as_str(), i))
            .collect();
        let transistors = net
            .transistors()
            .iter()
            .map(|t| {
                [
                    index[t.gate.as_str()],
                    index[t.source.as_str()],
                    index[t.drain.as_str()],
                ]
            })
            .collect();
        let mut is_control = vec![false; names.len()];
        let mut is_input = vec![false; names.len()];
        for c in net.control_inputs() {
            is_control[index[c.as_str()]] = true;
            is_input[index[c.as_str()]] = true;
        }
        for p in net.pass_inputs() {
            is_input[index[p.as_str()]] = true;
        }
        let constants = net
            .constants()
            .iter()
            .map(|(n, v)| (index[n.as_str()], Signal::from_bit(*v)))
            .collect();
        Self {
            net,
            names,
            index,
            transistors,
            is_control,
            is_input,
            constants,
        }
    }

    pub fn netlist(&self) -> &'a Netlist {
        self.net
    }

    pub fn node_count(&self) -> usize {
        self.names.len()
    }

    /// Simulates under `assignment`, which must bind every declared input
    /// (both rails of a pair) and nothing else.
    pub fn run(&self, assignment: &Assignment) -> Result<SimResult<'_>, SimError> {
        let mut init = vec![Signal::Z; self.names.len()];
        let mut bound = vec![false; self.names.len()];
        for (node, &value) in assignment {
            let &i = self
                .index
                .get(node.as_str())
                .ok_or_else(|| SimError::UnknownNode(node.to_string()))?;
            if !self.is_input[i] {
                return Err(SimError::NotAnInput(node.to_string()));
            }
            if self.is_control[i] && !value.is_driven() {
                return Err(SimError::ControlNotBinary {
                    node: node.to_string(),
                    value,
                });
            }
            init[i] = value;
            bound[i] = true;
        }
        if let Some(i) = (0..self.names.len()).find(|&i| self.is_input[i] && !bound[i]) {
            return Err(SimError::UnboundInput(self.names[i].to_string()));
        }
        self.settle(init)
    }

    fn settle(&self, mut values: Vec<Signal>) -> Result<SimResult<'_>, SimError> {
        for &(i, v) in &self.constants {
            values[i] = v;
        }
        let limit = 3 * self.names.len();
        let mut sweeps = 0;
        loop {
            let mut changed = false;
            for &[g, s, d] in &self.transistors {
                if values[g] != Signal::V1 {
                    continue;
                }
                let joined = values[s].merge(values[d]);
                if values[s] != joined || values[d] != joined {
                    values[s] = joined;
                    values[d] = joined;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
            sweeps += 1;
            if sweeps > limit {
                return Err(SimError::NonConvergence(sweeps));
            }
        }
        for &[g, _, _] in &self.transistors {
            if !values[g].is_driven() {
                return Err(SimError::FloatingGate {
                    node: self.names[g].to_string(),
                    value: values[g],
                });
            }
        }
        Ok(SimResult {
            sim: self,
            values,
            sweeps,
        })
    }

    /// Builds an assignment from bits for `primary` inputs, filling each
    /// complement rail with the negation of its partner.
    pub fn binary_assignment(
        &self,
        primary: &[NodeId],
        bits: &[bool],
    ) -> Result<Assignment, SimError> {
        let mut a = Assignment::new();
        for (node, &bit) in primary.iter().zip(bits) {
            a.insert(node.clone(), Signal::from_bit(bit));
            if let Some(c) = self.net.complement(node.as_str()) {
                if self.is_input[self.index[c.as_str()]] {
                    a.insert(c.clone(), Signal::from_bit(!bit));
                }
            }
        }
        Ok(a)
    }

    /// Simulates every binary combination of `primary` and records the raw
    /// signals at `outputs`, without rejecting `Z` or `X`.
    pub fn sweep(&self, primary: &[NodeId], outputs: &[NodeId]) -> Result<Vec<SweepRow>, SimError> {
        if primary.len() > MAX_TABLE_INPUTS {
            return Err(SimError::TooManyInputs(primary.len()));
        }
        let out_idx: Vec<usize> = outputs
            .iter()
            .map(|o| {
                self.index
                    .get(o.as_str())
                    .copied()
                    .ok_or_else(|| SimError::UnknownNode(o.to_string()))
            })
            .collect::<Result<_, _>>()?;
        let width = primary.len();
        (0..1u64 << width)
            .into_par_iter()
            .map(|row| {
                let bits = index_to_bits(row, width);
                let a = self.binary_assignment(primary, &bits)?;
                let r = self.run(&a)?;
                let sigs = out_idx.iter().map(|&i| r.values[i]).collect();
                Ok((bits, sigs))
            })
            .collect()
    }
}

/// Convenience wrapper around [`Simulator::run`].
pub fn simulate(
    net: &Netlist,
    assignment: &Assignment,
) -> Result<BTreeMap<NodeId, Signal>, SimError> {
    Simulator::new(net).run(assignment).map(|r| r.to_map())
}

/// Exhaustive binary truth table of `net` over `primary` inputs.
///
/// Complement rails of primary inputs are driven with the negated value.
/// Fails if any output settles at `Z` or `X`.
pub fn extract_truth_table(
    net: &Netlist,
    primary: &[NodeId],
    outputs: &[NodeId],
) -> Result<TruthTable, SimError> {
    let rows = Simulator::new(net).sweep(primary, outputs)?;
    let mut table = Vec::with_capacity(rows.len());
    for (bits, sigs) in rows {
        let mut out = Vec::with_capacity(sigs.len());
        for (node, sig) in outputs.iter().zip(sigs) {
            match sig {
                Signal::Z => {
                    return Err(SimError::UndrivenOutput {
                        node: node.to_string(),
                        inputs: bit_string(&bits),
                    })
                }
                Signal::X => {
                    return Err(SimError::ConflictOutput {
                        node: node.to_string(),
                        inputs: bit_string(&bits),
                    })
                }
                s => out.push(s == Signal::V1),
            }
        }
        table.push((bits, out));
    }
    Ok(TruthTable {
        inputs: primary.iter().map(|n| n.to_string()).collect(),
        outputs: outputs.iter().map(|n| n.to_string()).collect(),
        rows: table,
    })
}

/// Truth table over the netlist's declared primary inputs and outputs.
pub fn default_truth_table(net: &Netlist) -> Result<TruthTable, SimError> {
    extract_truth_table(net, &net.primary_inputs(), &net.primary_outputs())
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TableError {
    #[error("table over {inputs} inputs needs {expected} rows, got {found}")]
    Incomplete {
        inputs: usize,
        expected: usize,
        found: usize,
    },
    #[error("row {0} is out of order or has the wrong width")]
    BadRow(usize),
    #[error("cannot compose: {0} outputs feed {1} inputs")]
    ArityMismatch(usize, usize),
}

/// Complete binary input→output map. Rows are ordered by input vector, the
/// first input being the most significant bit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TruthTable {
    inputs: Vec<String>,
    outputs: Vec<String>,
    rows: Vec<(Vec<bool>, Vec<bool>)>,
}

impl TruthTable {
    pub fn new(
        inputs: Vec<String>,
        outputs: Vec<String>,
        rows: Vec<(Vec<bool>, Vec<bool>)>,
    ) -> Result<Self, TableError> {
        let expected = 1usize << inputs.len();
        if rows.len() != expected {
            return Err(TableError::Incomplete {
                inputs: inputs.len(),
                expected,
                found: rows.len(),
            });
        }
        for (i, (ins, outs)) in rows.iter().enumerate() {
            if ins.len() != inputs.len()
                || outs.len() != outputs.len()
                || bits_to_index(ins) != i as u64
            {
                return Err(TableError::BadRow(i));
            }
        }
        Ok(Self {
            inputs,
            outputs,
            rows,
        })
    }

    /// Tabulates `f` over all input vectors.
    pub fn from_fn(inputs: &[&str], outputs: &[&str], f: impl Fn(&[bool]) -> Vec<bool>) -> Self {
        let width = inputs.len();
        let rows = (0..1u64 << width)
            .map(|i| {
                let bits = index_to_bits(i, width);
                let out = f(&bits);
                assert_eq!(out.len(), outputs.len(), "function output width");
                (bits, out)
            })
            .collect();
        Self {
            inputs: inputs.iter().map(|s| s.to_string()).collect(),
            outputs: outputs.iter().map(|s| s.to_string()).collect(),
            rows,
        }
    }

    pub fn inputs(&self) -> &[String] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[String] {
        &self.outputs
    }

    pub fn rows(&self) -> &[(Vec<bool>, Vec<bool>)] {
        &self.rows
    }

    /// Renames columns without touching the data.
    pub fn with_labels(mut self, inputs: &[&str], outputs: &[&str]) -> Self {
        assert_eq!(inputs.len(), self.inputs.len());
        assert_eq!(outputs.len(), self.outputs.len());
        self.inputs = inputs.iter().map(|s| s.to_string()).collect();
        self.outputs = outputs.iter().map(|s| s.to_string()).collect();
        self
    }

    pub fn lookup(&self, inputs: &[bool]) -> Option<&[bool]> {
        if inputs.len() != self.inputs.len() {
            return None;
        }
        self.rows
            .get(bits_to_index(inputs) as usize)
            .map(|(_, o)| o.as_slice())
    }

    /// Same data, ignoring column labels.
    pub fn same_map(&self, other: &TruthTable) -> bool {
        self.rows == other.rows
    }

    /// `other ∘ self`: feeds this table's outputs into `other`.
    pub fn then(&self, other: &TruthTable) -> Result<TruthTable, TableError> {
        if self.outputs.len() != other.inputs.len() {
            return Err(TableError::ArityMismatch(
                self.outputs.len(),
                other.inputs.len(),
            ));
        }
        let rows = self
            .rows
            .iter()
            .map(|(i, o)| (i.clone(), other.lookup(o).expect("complete table").to_vec()))
            .collect();
        Ok(TruthTable {
            inputs: self.inputs.clone(),
            outputs: other.outputs.clone(),
            rows,
        })
    }

    pub fn is_identity(&self) -> bool {
        self.rows.iter().all(|(i, o)| i == o)
    }

    /// Aligned text table, e.g. `A B | P Q`.
    pub fn render(&self) -> String {
        let widths_in: Vec<usize> = self.inputs.iter().map(|s| s.len().max(1)).collect();
        let widths_out: Vec<usize> = self.outputs.iter().map(|s| s.len().max(1)).collect();
        let line = |ins: Vec<String>, outs: Vec<String>| {
            let l: Vec<String> = ins
                .iter()
                .zip(&widths_in)
                .map(|(s, w)| format!("{s:<w$}"))
                .collect();
            let r: Vec<String> = outs
                .iter()
                .zip(&widths_out)
                .map(|(s, w)| format!("{s:<w$}"))
                .collect();
            format!("{} | {}", l.join(" "), r.join(" "))
                .trim_end()
                .to_string()
        };
        let bitcols = |v: &[bool]| v.iter().map(|&b| u8::from(b).to_string()).collect();
        let mut out = String::new();
        let _ = writeln!(out, "{}", line(self.inputs.clone(), self.outputs.clone()));
        for (i, o) in &self.rows {
            let _ = writeln!(out, "{}", line(bitcols(i), bitcols(o)));
        }
        out
    }

    /// One `inputs -> outputs` line per row, for diffing.
    pub fn render_rows(&self) -> String {
        self.rows
            .iter()
            .map(|(i, o)| format!("{} -> {}\n", bit_string(i), bit_string(o)))
            .collect()
    }
}

/// `0b101` with width 3 → `[true, false, true]` (MSB first).
pub fn index_to_bits(index: u64, width: usize) -> Vec<bool> {
    (0..width).rev().map(|k| (index >> k) & 1 == 1).collect()
}

pub fn bits_to_index(bits: &[bool]) -> u64 {
    bits.iter().fold(0, |acc, &b| (acc << 1) | u64::from(b))
}

pub fn bit_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}
