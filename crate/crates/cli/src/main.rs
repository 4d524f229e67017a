//! `passrev` command-line tool.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use passrev::adder_circuits::{
    bcd_check, build_bcd_adder, builtin_circuit, cost_comparison, BUILTIN_NAMES,
};
use passrev::gate_library::is_reversible;
use passrev::netlist::{parse_netlist, write_netlist, Netlist, NodeId, ParseError};
use passrev::pass_algebra::{compile_expr, normalize, parse_expr, AlgebraError};
use passrev::signal::{Signal, SignalError};
use passrev::simulator::{bit_string, default_truth_table, SimError, Simulator, TruthTable};
use serde_json::{json, Value};
use thiserror::Error;

#[derive(Parser, Debug)]
#[command(
    name = "passrev",
    version,
    about = "Switch-level tools for pass-transistor reversible logic"
)]
struct Cli {
    /// Output style.
    #[arg(long, value_enum, global = true, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    /// Aligned, human-readable text.
    Text,
    /// One `inputs -> outputs` line per row (truth tables only).
    Rows,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Simulate a netlist under the given input values and print every node.
    Simulate {
        /// Built-in circuit name or netlist file.
        target: String,
        /// Input assignment `NODE=VALUE` with VALUE one of 0, 1, Z, X.
        /// An unset complement rail takes the negation of its partner.
        #[arg(long = "set", value_name = "NODE=VALUE")]
        set: Vec<String>,
    },
    /// Print the exhaustive truth table.
    TruthTable { target: String },
    /// Check that the truth table is a bijection.
    VerifyReversible { target: String },
    /// Print the transistor count.
    Count { target: String },
    /// Compare NMOS and CMOS transistor counts.
    CompareCost,
    /// Simulate the BCD adder on every pair of digits and both carry-ins.
    BcdCheck {
        /// Check this netlist instead of the built-in BCD adder.
        #[arg(long)]
        netlist: Option<String>,
    },
    /// Compile a pass expression such as `y1<x1|x2> + y2<!x3>` to a netlist.
    CompileExpr {
        expr: String,
        /// Name of the output node.
        #[arg(long, default_value = "z")]
        output: String,
        /// Normalize the expression before compiling.
        #[arg(long)]
        normalize: bool,
    },
}

#[derive(Debug, Error)]
enum CliError {
    #[error("`{0}` is neither a built-in circuit ({names}) nor a readable file", names = BUILTIN_NAMES.join(", "))]
    UnknownTarget(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Netlist { path: String, source: ParseError },
    #[error("bad --set `{0}`: expected NODE=VALUE")]
    BadSet(String),
    #[error("bad --set value: {0}")]
    BadValue(#[from] SignalError),
    #[error("{0}")]
    Node(#[from] passrev::netlist::NetlistError),
    #[error("{0}")]
    Algebra(#[from] AlgebraError),
    #[error("{0}")]
    Sim(#[from] SimError),
    #[error("--format rows applies only to truth tables")]
    RowsUnsupported,
}

impl CliError {
    /// Circuit misbehaviour is a verification failure; everything else is
    /// an input problem.
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Sim(
                SimError::FloatingGate { .. }
                | SimError::UndrivenOutput { .. }
                | SimError::ConflictOutput { .. },
            ) => 1,
            _ => 2,
        }
    }
}

struct Report {
    text: String,
    ok: bool,
}

impl Report {
    fn pass(text: String) -> Self {
        Self { text, ok: true }
    }
}

/// A netlist with the port order used for its truth table.
struct Target {
    netlist: Netlist,
    builtin: Option<passrev::adder_circuits::BuiltinCircuit>,
}

impl Target {
    fn load(spec: &str) -> Result<Self, CliError> {
        if let Some(c) = builtin_circuit(spec) {
            return Ok(Self {
                netlist: c.netlist.clone(),
                builtin: Some(c),
            });
        }
        Ok(Self {
            netlist: read_netlist(spec)?,
            builtin: None,
        })
    }

    fn truth_table(&self) -> Result<TruthTable, SimError> {
        match &self.builtin {
            Some(c) => c.truth_table(),
            None => default_truth_table(&self.netlist),
        }
    }
}

fn read_netlist(path: &str) -> Result<Netlist, CliError> {
    if !Path::new(path).exists() {
        return Err(CliError::UnknownTarget(path.to_string()));
    }
    let src = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_string(),
        source,
    })?;
    parse_netlist(&src).map_err(|source| CliError::Netlist {
        path: path.to_string(),
        source,
    })
}

fn to_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

fn simulate(target: &str, sets: &[String], format: Format) -> Result<Report, CliError> {
    let t = Target::load(target)?;
    let net = &t.netlist;
    let mut assignment: BTreeMap<NodeId, Signal> = BTreeMap::new();
    for s in sets {
        let (node, value) = s
            .split_once('=')
            .ok_or_else(|| CliError::BadSet(s.clone()))?;
        let id = NodeId::new(node.trim())?;
        if !net.contains(id.as_str()) {
            return Err(SimError::UnknownNode(id.to_string()).into());
        }
        assignment.insert(id, value.trim().parse()?);
    }
    let explicit: Vec<(NodeId, Signal)> = assignment.iter().map(|(k, v)| (k.clone(), *v)).collect();
    for (node, value) in explicit {
        if let Some(c) = net.complement(node.as_str()) {
            if net.inputs().any(|i| i == c) {
                assignment.entry(c.clone()).or_insert(value.complement());
            }
        }
    }
    let sim = Simulator::new(net);
    let result = sim.run(&assignment)?;
    let text = match format {
        Format::Json => {
            let nodes: serde_json::Map<String, Value> = result
                .iter()
                .map(|(n, s)| (n.to_string(), json!(s.as_str())))
                .collect();
            to_json(&json!({ "nodes": nodes, "sweeps": result.sweeps }))
        }
        Format::Text => {
            let width = net
                .nodes()
                .iter()
                .map(|n| n.as_str().len())
                .max()
                .unwrap_or(0);
            let mut s = String::new();
            for (n, v) in result.iter() {
                let _ = writeln!(s, "{:<width$} {v}", n.as_str());
            }
            s
        }
        Format::Rows => return Err(CliError::RowsUnsupported),
    };
    Ok(Report::pass(text))
}

fn table_json(t: &TruthTable) -> Value {
    let rows: Vec<Value> = t
        .rows()
        .iter()
        .map(|(i, o)| json!({ "inputs": bit_string(i), "outputs": bit_string(o) }))
        .collect();
    json!({ "inputs": t.inputs(), "outputs": t.outputs(), "rows": rows })
}

fn truth_table(target: &str, format: Format) -> Result<Report, CliError> {
    let t = Target::load(target)?.truth_table()?;
    Ok(Report::pass(match format {
        Format::Text => t.render(),
        Format::Rows => t.render_rows(),
        Format::Json => to_json(&table_json(&t)),
    }))
}

fn verify_reversible(target: &str, format: Format) -> Result<Report, CliError> {
    let t = Target::load(target)?.truth_table()?;
    let r = is_reversible(&t);
    let text = match format {
        Format::Json => {
            let collisions: Vec<Value> = r
                .collisions
                .iter()
                .map(|c| {
                    let pre: Vec<String> = c.preimages.iter().map(|p| bit_string(p)).collect();
                    json!({ "output": bit_string(&c.output), "preimages": pre })
                })
                .collect();
            to_json(
                &json!({ "injective": r.injective, "rows": t.rows().len(), "collisions": collisions }),
            )
        }
        _ => r.summary(),
    };
    Ok(Report {
        text,
        ok: r.injective,
    })
}

fn count(target: &str, format: Format) -> Result<Report, CliError> {
    let n = Target::load(target)?.netlist.transistor_count();
    Ok(Report::pass(match format {
        Format::Json => to_json(&json!({ "transistors": n })),
        _ => format!("{n}\n"),
    }))
}

fn compare_cost(format: Format) -> Result<Report, CliError> {
    let c = cost_comparison();
    Ok(Report::pass(match format {
        Format::Json => {
            let gates: Vec<Value> = c
                .gates
                .iter()
                .map(|g| json!({ "gate": g.gate.to_string(), "nmos": g.nmos, "cmos": g.cmos, "built": g.built }))
                .collect();
            to_json(&json!({
                "gates": gates,
                "full_adder": { "nmos": c.full_adder_nmos, "cmos": c.full_adder_cmos, "built": c.full_adder_built, "ratio": c.full_adder_ratio },
                "bcd": { "correction_nmos": c.bcd_correction_nmos, "full_circuit": c.bcd_full_circuit, "cmos": c.bcd_cmos },
            }))
        }
        _ => c.render(),
    }))
}

fn bcd(netlist: Option<&str>, format: Format) -> Result<Report, CliError> {
    let net = match netlist {
        Some(p) => read_netlist(p)?,
        None => build_bcd_adder(),
    };
    let r = bcd_check(&net);
    let ok = r.passed == r.cases;
    let text = match format {
        Format::Json => to_json(&json!({
            "cases": r.cases,
            "passed": r.passed,
            "first_failure": r.first_failure.as_ref().map(|f| json!({
                "a": f.a, "b": f.b, "cin": u8::from(f.cin),
                "got": f.got.map(|g| json!({ "digit": g.digit, "carry": u8::from(g.carry) })),
            })),
        })),
        _ => {
            let mut s = format!("bcd-check: {}/{} cases passed\n", r.passed, r.cases);
            if let Some(f) = &r.first_failure {
                let got = match f.got {
                    Some(g) => format!("digit {}, carry {}", g.digit, u8::from(g.carry)),
                    None => "no clean output".to_string(),
                };
                let total = f.a + f.b + u8::from(f.cin);
                let _ = writeln!(
                    s,
                    "first counterexample: a={} b={} cin={} -> {got}; expected digit {}, carry {}",
                    f.a,
                    f.b,
                    u8::from(f.cin),
                    total % 10,
                    total / 10
                );
            }
            s
        }
    };
    Ok(Report { text, ok })
}

fn compile(src: &str, output: &str, norm: bool, format: Format) -> Result<Report, CliError> {
    let mut e = parse_expr(src)?;
    if norm {
        e = normalize(&e);
    }
    let net = compile_expr(&e, output)?;
    let text = write_netlist(&net);
    Ok(Report::pass(match format {
        Format::Json => to_json(&json!({
            "expr": e.to_string(),
            "transistors": net.transistor_count(),
            "netlist": text,
        })),
        _ => text,
    }))
}

fn run(cli: Cli) -> Result<Report, CliError> {
    let f = cli.format;
    if f == Format::Rows && !matches!(cli.command, Command::TruthTable { .. }) {
        return Err(CliError::RowsUnsupported);
    }
    match cli.command {
        Command::Simulate { target, set } => simulate(&target, &set, f),
        Command::TruthTable { target } => truth_table(&target, f),
        Command::VerifyReversible { target } => verify_reversible(&target, f),
        Command::Count { target } => count(&target, f),
        Command::CompareCost => compare_cost(f),
        Command::BcdCheck { netlist } => bcd(netlist.as_deref(), f),
        Command::CompileExpr {
            expr,
            output,
            normalize,
        } => compile(&expr, &output, normalize, f),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(r) => {
            print!("{}", r.text);
            ExitCode::from(if r.ok { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
