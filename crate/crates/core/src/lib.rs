//! Switch-level modelling of pass-transistor reversible logic.
//!
//! The crate provides a four-valued signal lattice, transistor netlists with a
//! plain-text format, a bidirectional switch-level simulator, an algebra of
//! pass expressions that compiles to netlists, a library of reversible gates
//! and adder circuits built from them.

pub mod adder_circuits;
pub mod gate_library;
pub mod netlist;
pub mod pass_algebra;
pub mod signal;
pub mod simulator;

pub use adder_circuits::{
    bcd_add_digit, bcd_check, build_bcd_adder, build_full_adder, build_ripple4, cost_comparison,
    full_adder_function, AdderError, BcdDigitResult,
};
pub use gate_library::{
    build_gate, gate_function, gate_truth_table, is_reversible, GateError, GateKind,
};
pub use netlist::{
    circuit_cost, parse_netlist, write_netlist, Netlist, NetlistBuilder, NetlistError, NodeId,
    ParseError, TechLibrary, Technology, Transistor,
};
pub use pass_algebra::{compile_expr, normalize, parse_expr, AlgebraError, CtlExpr, PassExpr};
pub use signal::{landauer_bound, Signal, SignalError};
pub use simulator::{extract_truth_table, simulate, Assignment, SimError, Simulator, TruthTable};
