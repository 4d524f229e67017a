//! Reversible full adder, 4-bit ripple adder and single-digit BCD adder,
//! all assembled from the gate library and checked by simulation.
//!
//! Full adder cascade (primes mark updated lines):
//!
//! ```text
//! CCNOT(A, B, P)    P'  = P ^ AB
//! CNOT(A, B)        B'  = A ^ B          -> G2
//! CCNOT(B', Ci, P') P'' = P' ^ B'Ci      -> Co
//! CNOT(B', Ci)      Ci' = B' ^ Ci        -> S
//! ```
//!
//! With `P = 0` this yields `S = A^B^Ci` and `Co = majority(A, B, Ci)`;
//! `G1 = A` passes straight through.
//!
//! The BCD adder adds two digits with a ripple adder, derives the decimal
//! carry `K = C + S3(S1 + S2)` from two NPGs and a CCNOT, then adds `0110`
//! when `K` is set: full adders at bits 1 and 2 and a CNOT folding the bit-2
//! carry into bit 3.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::OnceLock;

use serde::Serialize;
use thiserror::Error;

use crate::gate_library::{
    build_gate, dual_control, dual_node, dual_outputs, dual_pass, rail_n, GateKind,
};
use crate::netlist::{Netlist, NetlistBuilder, NetlistError, NodeId, TechLibrary, Technology};
use crate::simulator::{extract_truth_table, SimError, Simulator, TruthTable};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AdderError {
    #[error("BCD operand {0} is outside 0..=9")]
    OperandRange(u8),
    #[error("output `{0}` did not settle to a logic level")]
    BadOutput(String),
    #[error(transparent)]
    Sim(#[from] SimError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FullAdderOutputs {
    pub sum: bool,
    pub carry: bool,
    pub g1: bool,
    pub g2: bool,
}

impl FullAdderOutputs {
    pub fn to_vec(self) -> Vec<bool> {
        vec![self.sum, self.carry, self.g1, self.g2]
    }
}

pub fn full_adder_function(a: bool, b: bool, ci: bool, preset: bool) -> FullAdderOutputs {
    let majority = (a && b) || (a && ci) || (b && ci);
    FullAdderOutputs {
        sum: a ^ b ^ ci,
        carry: preset ^ majority,
        g1: a,
        g2: a ^ b,
    }
}

/// Gates used by one full adder, in cascade order.
pub fn full_adder_gate_list() -> Vec<GateKind> {
    vec![
        GateKind::Ccnot,
        GateKind::Cnot,
        GateKind::Ccnot,
        GateKind::Cnot,
    ]
}

pub const FULL_ADDER_INPUTS: [&str; 4] = ["A", "B", "Ci", "P"];
pub const FULL_ADDER_OUTPUT_NODES: [&str; 4] = ["S", "Co", "A", "G2"];
pub const FULL_ADDER_LABELS: [&str; 4] = ["S", "Co", "G1", "G2"];

fn ids(names: &[&str]) -> Vec<NodeId> {
    names
        .iter()
        .map(|n| NodeId::new(*n).expect("valid name"))
        .collect()
}

/// Binds both rails of each `(child, parent)` signal.
fn dual_binding(pairs: &[(&str, &str)]) -> BTreeMap<NodeId, NodeId> {
    let mut m = BTreeMap::new();
    for (child, parent) in pairs {
        m.insert(
            NodeId::new(*child).expect("valid"),
            NodeId::new(*parent).expect("valid"),
        );
        m.insert(
            NodeId::new(rail_n(child)).expect("valid"),
            NodeId::new(rail_n(parent)).expect("valid"),
        );
    }
    m
}

fn place(
    b: &mut NetlistBuilder,
    kind: GateKind,
    pairs: &[(&str, &str)],
) -> Result<(), NetlistError> {
    b.instantiate(&build_gate(kind), &dual_binding(pairs))
}

fn place_net(
    b: &mut NetlistBuilder,
    child: &Netlist,
    pairs: &[(&str, &str)],
) -> Result<(), NetlistError> {
    b.instantiate(child, &dual_binding(pairs))
}

fn zero(b: &mut NetlistBuilder) -> Result<(), NetlistError> {
    b.constant("zero", false)?;
    b.constant(&rail_n("zero"), true)?;
    b.rail("zero", &rail_n("zero"))
}

fn full_adder() -> Result<Netlist, NetlistError> {
    let mut b = Netlist::builder();
    for x in ["A", "B", "Ci"] {
        dual_control(&mut b, x)?;
    }
    dual_pass(&mut b, "P")?;
    for x in ["P1", "G2", "Co", "S"] {
        dual_node(&mut b, x)?;
    }
    dual_outputs(&mut b, &FULL_ADDER_OUTPUT_NODES)?;
    place(
        &mut b,
        GateKind::Ccnot,
        &[("A", "A"), ("B", "B"), ("C", "P"), ("R", "P1")],
    )?;
    place(
        &mut b,
        GateKind::Cnot,
        &[("A", "A"), ("B", "B"), ("Q", "G2")],
    )?;
    place(
        &mut b,
        GateKind::Ccnot,
        &[("A", "G2"), ("B", "Ci"), ("C", "P1"), ("R", "Co")],
    )?;
    place(
        &mut b,
        GateKind::Cnot,
        &[("A", "G2"), ("B", "Ci"), ("Q", "S")],
    )?;
    b.build()
}

/// Two CNOTs and two CCNOTs; inputs `A B Ci P`, outputs `S Co G1 G2`.
pub fn build_full_adder() -> Netlist {
    full_adder().expect("full adder is well formed")
}

/// Simulated truth table of [`build_full_adder`], labelled `A B Ci P | S Co G1 G2`.
pub fn full_adder_truth_table() -> Result<TruthTable, SimError> {
    let net = build_full_adder();
    Ok(extract_truth_table(
        &net,
        &ids(&FULL_ADDER_INPUTS),
        &ids(&FULL_ADDER_OUTPUT_NODES),
    )?
    .with_labels(&FULL_ADDER_INPUTS, &FULL_ADDER_LABELS))
}

/// Input order of the ripple and BCD adders: `a3..a0 b3..b0 cin`.
pub const OPERAND_INPUTS: [&str; 9] = ["a3", "a2", "a1", "a0", "b3", "b2", "b1", "b0", "cin"];
pub const RIPPLE_OUTPUTS: [&str; 5] = ["cout", "s3", "s2", "s1", "s0"];

fn operands(b: &mut NetlistBuilder) -> Result<(), NetlistError> {
    for x in OPERAND_INPUTS {
        dual_control(b, x)?;
    }
    Ok(())
}

fn ripple4() -> Result<Netlist, NetlistError> {
    let mut b = Netlist::builder();
    operands(&mut b)?;
    zero(&mut b)?;
    for x in ["c1", "c2", "c3", "g0", "g1", "g2", "g3"] {
        dual_node(&mut b, x)?;
    }
    for x in RIPPLE_OUTPUTS {
        dual_node(&mut b, x)?;
    }
    dual_outputs(&mut b, &RIPPLE_OUTPUTS)?;
    let fa = build_full_adder();
    let carries = ["cin", "c1", "c2", "c3", "cout"];
    for i in 0..4 {
        let (a, bb, s, g) = (
            format!("a{i}"),
            format!("b{i}"),
            format!("s{i}"),
            format!("g{i}"),
        );
        place_net(
            &mut b,
            &fa,
            &[
                ("A", &a),
                ("B", &bb),
                ("Ci", carries[i]),
                ("P", "zero"),
                ("S", &s),
                ("Co", carries[i + 1]),
                ("G2", &g),
            ],
        )?;
    }
    b.build()
}

/// Four full adders with presets tied to 0; outputs `cout s3 s2 s1 s0`.
pub fn build_ripple4() -> Netlist {
    ripple4().expect("ripple adder is well formed")
}

/// Decimal carry: set when a 5-bit binary digit sum is 10 or more.
pub fn correction_flag(c_top: bool, s3: bool, s2: bool, s1: bool) -> bool {
    c_top || (s3 && (s1 || s2))
}

pub const FLAG_INPUTS: [&str; 4] = ["c_top", "s3", "s2", "s1"];

fn flag_network() -> Result<Netlist, NetlistError> {
    let mut b = Netlist::builder();
    dual_control(&mut b, "c_top")?;
    dual_control(&mut b, "s3")?;
    dual_control(&mut b, "s1")?;
    dual_pass(&mut b, "s2")?;
    zero(&mut b)?;
    for x in ["or12", "and3", "K"] {
        dual_node(&mut b, x)?;
    }
    dual_outputs(&mut b, &["K"])?;
    place(
        &mut b,
        GateKind::Npg,
        &[("A", "s1"), ("B", "s2"), ("Q", "or12")],
    )?;
    place(
        &mut b,
        GateKind::Ccnot,
        &[("A", "s3"), ("B", "or12"), ("C", "zero"), ("R", "and3")],
    )?;
    place(
        &mut b,
        GateKind::Npg,
        &[("A", "c_top"), ("B", "and3"), ("Q", "K")],
    )?;
    b.build()
}

/// `K = c_top + s3(s1 + s2)` from NPG, CCNOT (AND onto a 0 line) and NPG.
pub fn build_correction_flag() -> Netlist {
    flag_network().expect("flag network is well formed")
}

pub const BCD_OUTPUTS: [&str; 5] = ["K", "d3", "d2", "d1", "s0"];
pub const BCD_LABELS: [&str; 5] = ["carry", "d3", "d2", "d1", "d0"];

fn bcd_adder() -> Result<Netlist, NetlistError> {
    let mut b = Netlist::builder();
    operands(&mut b)?;
    zero(&mut b)?;
    for x in [
        "c_top", "s3", "s2", "s1", "s0", "K", "k2", "k3", "x1", "x2", "d1", "d2", "d3",
    ] {
        dual_node(&mut b, x)?;
    }
    dual_outputs(&mut b, &BCD_OUTPUTS)?;

    let mut top: Vec<(&str, &str)> = OPERAND_INPUTS.iter().map(|x| (*x, *x)).collect();
    top.extend([
        ("cout", "c_top"),
        ("s3", "s3"),
        ("s2", "s2"),
        ("s1", "s1"),
        ("s0", "s0"),
    ]);
    place_net(&mut b, &build_ripple4(), &top)?;

    place_net(
        &mut b,
        &build_correction_flag(),
        &[
            ("c_top", "c_top"),
            ("s3", "s3"),
            ("s2", "s2"),
            ("s1", "s1"),
            ("K", "K"),
        ],
    )?;

    let fa = build_full_adder();
    place_net(
        &mut b,
        &fa,
        &[
            ("A", "s1"),
            ("B", "K"),
            ("Ci", "zero"),
            ("P", "zero"),
            ("S", "d1"),
            ("Co", "k2"),
            ("G2", "x1"),
        ],
    )?;
    place_net(
        &mut b,
        &fa,
        &[
            ("A", "s2"),
            ("B", "K"),
            ("Ci", "k2"),
            ("P", "zero"),
            ("S", "d2"),
            ("Co", "k3"),
            ("G2", "x2"),
        ],
    )?;
    place(
        &mut b,
        GateKind::Cnot,
        &[("A", "k3"), ("B", "s3"), ("Q", "d3")],
    )?;
    b.build()
}

/// Single-digit BCD adder; inputs `a3..a0 b3..b0 cin`, outputs
/// `carry d3 d2 d1 d0`.
pub fn build_bcd_adder() -> Netlist {
    bcd_adder().expect("BCD adder is well formed")
}

fn shared_bcd() -> &'static Netlist {
    static NET: OnceLock<Netlist> = OnceLock::new();
    NET.get_or_init(build_bcd_adder)
}

/// Operand bits in [`OPERAND_INPUTS`] order.
pub fn operand_bits(a: u8, b: u8, cin: bool) -> Vec<bool> {
    let nibble = |v: u8| (0..4).rev().map(move |k| (v >> k) & 1 == 1);
    nibble(a).chain(nibble(b)).chain([cin]).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BcdDigitResult {
    pub digit: u8,
    pub carry: bool,
}

/// Reusable simulation harness over a BCD adder netlist.
pub struct BcdHarness<'a> {
    sim: Simulator<'a>,
    inputs: Vec<NodeId>,
}

impl<'a> BcdHarness<'a> {
    pub fn new(net: &'a Netlist) -> Self {
        Self {
            sim: Simulator::new(net),
            inputs: ids(&OPERAND_INPUTS),
        }
    }

    /// Simulates with raw 4-bit operands (not range-checked).
    pub fn add_raw(&self, a: u8, b: u8, cin: bool) -> Result<BcdDigitResult, AdderError> {
        let assignment = self
            .sim
            .binary_assignment(&self.inputs, &operand_bits(a, b, cin))?;
        let r = self.sim.run(&assignment)?;
        let bit = |n: &str| {
            r.get(n)
                .and_then(|s| s.to_bit())
                .ok_or_else(|| AdderError::BadOutput(n.to_string()))
        };
        let carry = bit("K")?;
        let digit = ["d3", "d2", "d1", "s0"].iter().try_fold(0u8, |acc, n| {
            Ok::<_, AdderError>((acc << 1) | u8::from(bit(n)?))
        })?;
        Ok(BcdDigitResult { digit, carry })
    }

    pub fn add(&self, a: u8, b: u8, cin: bool) -> Result<BcdDigitResult, AdderError> {
        for v in [a, b] {
            if v > 9 {
                return Err(AdderError::OperandRange(v));
            }
        }
        self.add_raw(a, b, cin)
    }
}

/// Adds two BCD digits by simulating the BCD adder netlist.
pub fn bcd_add_digit(a: u8, b: u8, cin: bool) -> Result<BcdDigitResult, AdderError> {
    BcdHarness::new(shared_bcd()).add(a, b, cin)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BcdFailure {
    pub a: u8,
    pub b: u8,
    pub cin: bool,
    pub got: Option<BcdDigitResult>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BcdCheckReport {
    pub cases: usize,
    pub passed: usize,
    pub first_failure: Option<BcdFailure>,
}

/// Runs every digit pair and carry-in through `net` and checks
/// `digit + 10*carry == a + b + cin`.
pub fn bcd_check(net: &Netlist) -> BcdCheckReport {
    let h = BcdHarness::new(net);
    let mut passed = 0;
    let mut first_failure = None;
    let mut cases = 0;
    for a in 0..=9u8 {
        for b in 0..=9u8 {
            for cin in [false, true] {
                cases += 1;
                let got = h.add(a, b, cin).ok();
                let ok = got.is_some_and(|r| {
                    u32::from(r.digit) + 10 * u32::from(r.carry) == u32::from(a + b + u8::from(cin))
                        && r.digit <= 9
                });
                if ok {
                    passed += 1;
                } else if first_failure.is_none() {
                    first_failure = Some(BcdFailure { a, b, cin, got });
                }
            }
        }
    }
    BcdCheckReport {
        cases,
        passed,
        first_failure,
    }
}

/// Gate list behind the reference BCD cost figure: the two correction
/// full adders, the CCNOT and two NPGs. The ripple adder and the bit-3 CNOT
/// are not included.
pub fn bcd_correction_gate_list() -> Vec<GateKind> {
    let mut g = full_adder_gate_list();
    g.extend(full_adder_gate_list());
    g.extend([GateKind::Ccnot, GateKind::Npg, GateKind::Npg]);
    g
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GateCostRow {
    pub gate: GateKind,
    pub nmos: u32,
    pub cmos: Option<u32>,
    /// Transistors in the built netlist.
    pub built: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CostComparison {
    pub gates: Vec<GateCostRow>,
    pub full_adder_nmos: u32,
    pub full_adder_cmos: u32,
    pub full_adder_built: usize,
    pub full_adder_ratio: f64,
    pub bcd_correction_nmos: u32,
    pub bcd_full_circuit: usize,
    /// Conventional-technology BCD total; unavailable because NPG has no
    /// CMOS entry.
    pub bcd_cmos: Option<u32>,
}

pub fn cost_comparison() -> CostComparison {
    let lib = TechLibrary::reference();
    let gates = GateKind::ALL
        .iter()
        .map(|&g| GateCostRow {
            gate: g,
            nmos: lib
                .count(g, Technology::ProposedNmos)
                .expect("all gates have NMOS counts"),
            cmos: lib.count(g, Technology::ConventionalCmos),
            built: build_gate(g).transistor_count(),
        })
        .collect();
    let fa = full_adder_gate_list();
    let full_adder_nmos = lib
        .circuit_cost(&fa, Technology::ProposedNmos)
        .expect("in library");
    let full_adder_cmos = lib
        .circuit_cost(&fa, Technology::ConventionalCmos)
        .expect("in library");
    let bcd = bcd_correction_gate_list();
    CostComparison {
        gates,
        full_adder_nmos,
        full_adder_cmos,
        full_adder_built: build_full_adder().transistor_count(),
        full_adder_ratio: f64::from(full_adder_nmos) / f64::from(full_adder_cmos),
        bcd_correction_nmos: lib
            .circuit_cost(&bcd, Technology::ProposedNmos)
            .expect("in library"),
        bcd_full_circuit: shared_bcd().transistor_count(),
        bcd_cmos: lib.circuit_cost(&bcd, Technology::ConventionalCmos).ok(),
    }
}

impl CostComparison {
    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{:<8} {:>5} {:>5} {:>6}",
            "gate", "NMOS", "CMOS", "built"
        );
        for r in &self.gates {
            let cmos = r.cmos.map_or("-".to_string(), |c| c.to_string());
            let _ = writeln!(
                s,
                "{:<8} {:>5} {:>5} {:>6}",
                r.gate.to_string(),
                r.nmos,
                cmos,
                r.built
            );
        }
        let _ = writeln!(s);
        let _ = writeln!(
            s,
            "full adder: NMOS {}, CMOS {} (built netlist: {})",
            self.full_adder_nmos, self.full_adder_cmos, self.full_adder_built
        );
        let _ = writeln!(
            s,
            "full adder NMOS/CMOS ratio: {:.3}",
            self.full_adder_ratio
        );
        let _ = writeln!(
            s,
            "BCD correction (reference decomposition): {}",
            self.bcd_correction_nmos
        );
        let _ = writeln!(
            s,
            "BCD adder full circuit (built netlist): {}",
            self.bcd_full_circuit
        );
        match self.bcd_cmos {
            Some(c) => {
                let _ = writeln!(s, "BCD correction CMOS: {c}");
            }
            None => {
                let _ = writeln!(
                    s,
                    "BCD CMOS total: unavailable (NPG has no CMOS count), so a BCD-level NMOS/CMOS ratio cannot be verified"
                );
            }
        }
        s
    }
}

/// A shipped circuit with its port order and column labels.
#[derive(Debug, Clone)]
pub struct BuiltinCircuit {
    pub name: &'static str,
    pub netlist: Netlist,
    pub inputs: Vec<NodeId>,
    pub outputs: Vec<NodeId>,
    pub input_labels: Vec<String>,
    pub output_labels: Vec<String>,
}

impl BuiltinCircuit {
    fn new(
        name: &'static str,
        netlist: Netlist,
        ports: (&[&str], &[&str]),
        labels: (&[&str], &[&str]),
    ) -> Self {
        let strings = |v: &[&str]| v.iter().map(|s| s.to_string()).collect();
        Self {
            name,
            netlist,
            inputs: ids(ports.0),
            outputs: ids(ports.1),
            input_labels: strings(labels.0),
            output_labels: strings(labels.1),
        }
    }

    pub fn truth_table(&self) -> Result<TruthTable, SimError> {
        let li: Vec<&str> = self.input_labels.iter().map(String::as_str).collect();
        let lo: Vec<&str> = self.output_labels.iter().map(String::as_str).collect();
        Ok(extract_truth_table(&self.netlist, &self.inputs, &self.outputs)?.with_labels(&li, &lo))
    }
}

/// Names accepted by [`builtin_circuit`], gates first.
pub const BUILTIN_NAMES: [&str; 8] = [
    "not",
    "cnot",
    "ccnot",
    "fredkin",
    "npg",
    "fulladder",
    "ripple4",
    "bcdadder",
];

/// Looks up a gate or adder by its lowercase name.
pub fn builtin_circuit(name: &str) -> Option<BuiltinCircuit> {
    if let Ok(kind) = name.parse::<GateKind>() {
        let (ins, outs) = crate::gate_library::gate_ports(kind);
        let names = |v: &[NodeId]| v.iter().map(|n| n.to_string()).collect::<Vec<_>>();
        let (ins, outs) = (names(&ins), names(&outs));
        let ins: Vec<&str> = ins.iter().map(String::as_str).collect();
        let outs: Vec<&str> = outs.iter().map(String::as_str).collect();
        return Some(BuiltinCircuit::new(
            kind.cli_name(),
            build_gate(kind),
            (&ins, &outs),
            kind.labels(),
        ));
    }
    let c = match name.to_ascii_lowercase().as_str() {
        "fulladder" => BuiltinCircuit::new(
            "fulladder",
            build_full_adder(),
            (&FULL_ADDER_INPUTS, &FULL_ADDER_OUTPUT_NODES),
            (&FULL_ADDER_INPUTS, &FULL_ADDER_LABELS),
        ),
        "ripple4" => BuiltinCircuit::new(
            "ripple4",
            build_ripple4(),
            (&OPERAND_INPUTS, &RIPPLE_OUTPUTS),
            (&OPERAND_INPUTS, &RIPPLE_OUTPUTS),
        ),
        "bcdadder" => BuiltinCircuit::new(
            "bcdadder",
            build_bcd_adder(),
            (&OPERAND_INPUTS, &BCD_OUTPUTS),
            (&OPERAND_INPUTS, &BCD_LABELS),
        ),
        _ => return None,
    };
    Some(c)
}
