//! Reversible gates: reference functions, dual-rail pass-transistor
//! netlists, and the reversibility checker.
//!
//! Every gate takes each logical signal on two rails (`A`, `A_n`), so an
//! inversion is a rail swap and costs nothing. Control inputs drive transistor
//! gates; pass inputs are steered through the channels to the outputs. The
//! first output always wires straight through from input `A`.
//!
//! | gate    | outputs                          | transistors |
//! |---------|----------------------------------|-------------|
//! | NOT     | `!A`                             | 0           |
//! | CNOT    | `A, A^B`                         | 4           |
//! | CCNOT   | `A, B, AB^C`                     | 10          |
//! | FREDKIN | `A, !A·B + A·C, !A·C + A·B`      | 8           |
//! | NPG     | `A, A + B`                       | 4           |

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::netlist::{Netlist, NetlistBuilder, NetlistError, NodeId};
use crate::simulator::{bit_string, extract_truth_table, SimError, TruthTable};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GateError {
    #[error("{kind} takes {expected} inputs, got {found}")]
    Arity {
        kind: GateKind,
        expected: usize,
        found: usize,
    },
    #[error("unknown gate `{0}`")]
    UnknownGate(String),
    #[error("table is not injective; reverse evaluation is undefined")]
    NotInjective,
    #[error("output vector {0} is not produced by any input")]
    NotInImage(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum GateKind {
    Not,
    Cnot,
    Ccnot,
    Fredkin,
    Npg,
}

impl GateKind {
    pub const ALL: [GateKind; 5] = [
        GateKind::Not,
        GateKind::Cnot,
        GateKind::Ccnot,
        GateKind::Fredkin,
        GateKind::Npg,
    ];

    pub fn arity(self) -> usize {
        match self {
            GateKind::Not => 1,
            GateKind::Cnot | GateKind::Npg => 2,
            GateKind::Ccnot | GateKind::Fredkin => 3,
        }
    }

    /// Lowercase CLI name.
    pub fn cli_name(self) -> &'static str {
        match self {
            GateKind::Not => "not",
            GateKind::Cnot => "cnot",
            GateKind::Ccnot => "ccnot",
            GateKind::Fredkin => "fredkin",
            GateKind::Npg => "npg",
        }
    }

    pub fn long_name(self) -> &'static str {
        match self {
            GateKind::Not => "NOT",
            GateKind::Cnot => "CONTROLLED NOT",
            GateKind::Ccnot => "CONTROLLED-CONTROLLED NOT",
            GateKind::Fredkin => "FREDKIN",
            GateKind::Npg => "NPG",
        }
    }

    /// Column labels, inputs then outputs.
    pub fn labels(self) -> (&'static [&'static str], &'static [&'static str]) {
        let n = self.arity();
        (&["A", "B", "C"][..n], &["P", "Q", "R"][..n])
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GateKind::Not => "NOT",
            GateKind::Cnot => "CNOT",
            GateKind::Ccnot => "CCNOT",
            GateKind::Fredkin => "FREDKIN",
            GateKind::Npg => "NPG",
        })
    }
}

impl FromStr for GateKind {
    type Err = GateError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        GateKind::ALL
            .into_iter()
            .find(|k| k.cli_name().eq_ignore_ascii_case(s))
            .ok_or_else(|| GateError::UnknownGate(s.to_string()))
    }
}

/// Functional model of each gate.
pub fn gate_function(kind: GateKind, inputs: &[bool]) -> Result<Vec<bool>, GateError> {
    if inputs.len() != kind.arity() {
        return Err(GateError::Arity {
            kind,
            expected: kind.arity(),
            found: inputs.len(),
        });
    }
    let out = match (kind, inputs) {
        (GateKind::Not, &[a]) => vec![!a],
        (GateKind::Cnot, &[a, b]) => vec![a, a ^ b],
        (GateKind::Ccnot, &[a, b, c]) => vec![a, b, (a && b) ^ c],
        (GateKind::Fredkin, &[a, b, c]) => vec![a, (!a && b) || (a && c), (!a && c) || (a && b)],
        (GateKind::Npg, &[a, b]) => vec![a, a || b],
        _ => unreachable!("arity checked above"),
    };
    Ok(out)
}

/// Complement-rail name used by all built-in circuits.
pub fn rail_n(name: &str) -> String {
    format!("{name}_n")
}

pub(crate) fn dual_control(b: &mut NetlistBuilder, name: &str) -> Result<(), NetlistError> {
    b.control_input(name)?;
    b.control_input(&rail_n(name))?;
    b.rail(name, &rail_n(name))
}

pub(crate) fn dual_pass(b: &mut NetlistBuilder, name: &str) -> Result<(), NetlistError> {
    b.pass_input(name)?;
    b.pass_input(&rail_n(name))?;
    b.rail(name, &rail_n(name))
}

pub(crate) fn dual_node(b: &mut NetlistBuilder, name: &str) -> Result<(), NetlistError> {
    b.node(name)?;
    b.node(&rail_n(name))?;
    b.rail(name, &rail_n(name))
}

/// Declares outputs in the order: every true rail, then every complement.
pub(crate) fn dual_outputs(b: &mut NetlistBuilder, names: &[&str]) -> Result<(), NetlistError> {
    for n in names {
        b.output(n)?;
    }
    for n in names {
        b.output(&rail_n(n))?;
    }
    Ok(())
}

/// Input and output nodes of a built gate, in label order.
pub fn gate_ports(kind: GateKind) -> (Vec<NodeId>, Vec<NodeId>) {
    let ids = |names: &[&str]| {
        names
            .iter()
            .map(|n| NodeId::new(*n).expect("valid"))
            .collect()
    };
    match kind {
        GateKind::Not => (ids(&["A"]), ids(&["A_n"])),
        GateKind::Cnot => (ids(&["A", "B"]), ids(&["A", "Q"])),
        GateKind::Ccnot => (ids(&["A", "B", "C"]), ids(&["A", "B", "R"])),
        GateKind::Fredkin => (ids(&["A", "B", "C"]), ids(&["A", "Q", "R"])),
        GateKind::Npg => (ids(&["A", "B"]), ids(&["A", "Q"])),
    }
}

/// Dual-rail NMOS pass-transistor netlist for `kind`.
pub fn build_gate(kind: GateKind) -> Netlist {
    build(kind).expect("built-in gate netlists are well formed")
}

fn build(kind: GateKind) -> Result<Netlist, NetlistError> {
    let mut b = Netlist::builder();
    match kind {
        GateKind::Not => {
            dual_pass(&mut b, "A")?;
            // P = A_n, P_n = A: a rail crossover.
            b.output("A_n")?;
            b.output("A")?;
        }
        GateKind::Cnot => {
            dual_control(&mut b, "A")?;
            dual_pass(&mut b, "B")?;
            dual_node(&mut b, "Q")?;
            dual_outputs(&mut b, &["A", "Q"])?;
            b.transistor("A_n", "B", "Q")?;
            b.transistor("A", "B_n", "Q")?;
            b.transistor("A_n", "B_n", "Q_n")?;
            b.transistor("A", "B", "Q_n")?;
        }
        GateKind::Ccnot => {
            dual_control(&mut b, "A")?;
            dual_control(&mut b, "B")?;
            dual_pass(&mut b, "C")?;
            dual_node(&mut b, "R")?;
            dual_outputs(&mut b, &["A", "B", "R"])?;
            // R = C<!A> + C<A·!B> + C_n<A·B>
            b.transistor("A_n", "C", "R")?;
            b.chain("C", &["A", "B_n"], "R", "R.a")?;
            b.chain("C_n", &["A", "B"], "R", "R.b")?;
            // R_n mirrors R with C and C_n exchanged.
            b.transistor("A_n", "C_n", "R_n")?;
            b.chain("C_n", &["A", "B_n"], "R_n", "R_n.a")?;
            b.chain("C", &["A", "B"], "R_n", "R_n.b")?;
        }
        GateKind::Fredkin => {
            dual_control(&mut b, "A")?;
            dual_pass(&mut b, "B")?;
            dual_pass(&mut b, "C")?;
            dual_node(&mut b, "Q")?;
            dual_node(&mut b, "R")?;
            dual_outputs(&mut b, &["A", "Q", "R"])?;
            // Complement rails use the same steering on the complement inputs.
            for n in ["", "_n"] {
                let (bb, cc) = (format!("B{n}"), format!("C{n}"));
                let (q, r) = (format!("Q{n}"), format!("R{n}"));
                b.transistor("A_n", &bb, &q)?;
                b.transistor("A", &cc, &q)?;
                b.transistor("A_n", &cc, &r)?;
                b.transistor("A", &bb, &r)?;
            }
        }
        GateKind::Npg => {
            dual_control(&mut b, "A")?;
            dual_pass(&mut b, "B")?;
            dual_node(&mut b, "Q")?;
            dual_outputs(&mut b, &["A", "Q"])?;
            b.transistor("A", "A", "Q")?;
            b.transistor("A_n", "B", "Q")?;
            b.transistor("A", "A_n", "Q_n")?;
            b.transistor("A_n", "B_n", "Q_n")?;
        }
    }
    b.build()
}

/// Truth table of the built netlist, extracted by switch-level simulation
/// and labelled `A B C | P Q R`.
pub fn gate_truth_table(kind: GateKind) -> Result<TruthTable, SimError> {
    let net = build_gate(kind);
    let (ins, outs) = gate_ports(kind);
    let (li, lo) = kind.labels();
    Ok(extract_truth_table(&net, &ins, &outs)?.with_labels(li, lo))
}

/// Truth table of [`gate_function`].
pub fn reference_table(kind: GateKind) -> TruthTable {
    let (li, lo) = kind.labels();
    TruthTable::from_fn(li, lo, |x| gate_function(kind, x).expect("arity matches"))
}

/// Output vector reached by more than one input vector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Collision {
    pub output: Vec<bool>,
    pub preimages: Vec<Vec<bool>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReversibilityReport {
    pub injective: bool,
    pub collisions: Vec<Collision>,
    /// Output → input, present exactly when `injective`.
    pub inverse: Option<BTreeMap<Vec<bool>, Vec<bool>>>,
}

impl ReversibilityReport {
    pub fn summary(&self) -> String {
        if self.injective {
            let n = self.inverse.as_ref().map_or(0, |m| m.len());
            return format!("reversible: {n} distinct outputs\n");
        }
        let mut s = String::from("NOT reversible\n");
        for c in &self.collisions {
            let pre: Vec<String> = c.preimages.iter().map(|p| tuple(p)).collect();
            s.push_str(&format!(
                "collision {} <- {{{}}}\n",
                tuple(&c.output),
                pre.join(",")
            ));
        }
        s
    }
}

fn tuple(bits: &[bool]) -> String {
    let parts: Vec<&str> = bits.iter().map(|&b| if b { "1" } else { "0" }).collect();
    format!("({})", parts.join(","))
}

pub fn is_reversible(table: &TruthTable) -> ReversibilityReport {
    let mut preimages: BTreeMap<&Vec<bool>, Vec<Vec<bool>>> = BTreeMap::new();
    for (i, o) in table.rows() {
        preimages.entry(o).or_default().push(i.clone());
    }
    let collisions: Vec<Collision> = preimages
        .iter()
        .filter(|(_, p)| p.len() > 1)
        .map(|(o, p)| Collision {
            output: (*o).clone(),
            preimages: p.clone(),
        })
        .collect();
    let injective = collisions.is_empty();
    let inverse = injective.then(|| {
        preimages
            .into_iter()
            .map(|(o, mut p)| (o.clone(), p.remove(0)))
            .collect()
    });
    ReversibilityReport {
        injective,
        collisions,
        inverse,
    }
}

/// Recovers the unique input that produces `outputs`.
pub fn reverse_evaluate(table: &TruthTable, outputs: &[bool]) -> Result<Vec<bool>, GateError> {
    let report = is_reversible(table);
    let inverse = report.inverse.ok_or(GateError::NotInjective)?;
    inverse
        .get(outputs)
        .cloned()
        .ok_or_else(|| GateError::NotInImage(bit_string(outputs)))
}
