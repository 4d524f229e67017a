//! Line-oriented netlist text format.
//!
//! ```text
//! # comment
//! node <name>
//! input.ctl <name>
//! input.pass <name>
//! const <name> <0|1>
//! output <name>
//! rail <name> <complement>
//! t <gate> <source> <drain>
//! ```
//!
//! Statements may appear in any order; references are resolved after the
//! whole file is read. The writer emits nodes (sorted), ports and rails in
//! declaration order, then transistors in netlist order.

use std::fmt::Write as _;

use thiserror::Error;

use super::{Netlist, NetlistBuilder, NetlistError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: {source}")]
    Statement { line: usize, source: NetlistError },
    #[error(transparent)]
    Netlist(#[from] NetlistError),
}

enum Stmt<'a> {
    Node(&'a str),
    Ctl(&'a str),
    Pass(&'a str),
    Const(&'a str, bool),
    Output(&'a str),
    Rail(&'a str, &'a str),
    T(&'a str, &'a str, &'a str),
}

fn parse_line(line: &str) -> Result<Option<Stmt<'_>>, String> {
    let body = line.split('#').next().unwrap_or("");
    let words: Vec<&str> = body.split_whitespace().collect();
    let Some((&kw, args)) = words.split_first() else {
        return Ok(None);
    };
    let arity = |n: usize| {
        if args.len() == n {
            Ok(())
        } else {
            Err(format!(
                "`{kw}` takes {n} argument(s), found {}",
                args.len()
            ))
        }
    };
    let stmt = match kw {
        "node" => arity(1).map(|_| Stmt::Node(args[0]))?,
        "input.ctl" => arity(1).map(|_| Stmt::Ctl(args[0]))?,
        "input.pass" => arity(1).map(|_| Stmt::Pass(args[0]))?,
        "output" => arity(1).map(|_| Stmt::Output(args[0]))?,
        "rail" => arity(2).map(|_| Stmt::Rail(args[0], args[1]))?,
        "t" => arity(3).map(|_| Stmt::T(args[0], args[1], args[2]))?,
        "const" => {
            arity(2)?;
            let level = match args[1] {
                "0" => false,
                "1" => true,
                other => return Err(format!("constant level must be 0 or 1, found `{other}`")),
            };
            Stmt::Const(args[0], level)
        }
        other => return Err(format!("unknown statement `{other}`")),
    };
    Ok(Some(stmt))
}

pub fn parse_netlist(src: &str) -> Result<Netlist, ParseError> {
    let mut stmts = Vec::new();
    for (i, line) in src.lines().enumerate() {
        match parse_line(line) {
            Ok(Some(s)) => stmts.push((i + 1, s)),
            Ok(None) => {}
            Err(message) => {
                return Err(ParseError::Syntax {
                    line: i + 1,
                    message,
                })
            }
        }
    }

    let mut b = NetlistBuilder::default();
    let at = |line: usize| move |source| ParseError::Statement { line, source };
    // Nodes first so that later statements may reference any declared name.
    for (line, s) in &stmts {
        let name = match s {
            Stmt::Node(n) | Stmt::Ctl(n) | Stmt::Pass(n) | Stmt::Const(n, _) | Stmt::Output(n) => n,
            _ => continue,
        };
        b.node(name).map_err(at(*line))?;
    }
    for (line, s) in &stmts {
        let r = match *s {
            Stmt::Node(_) => Ok(()),
            Stmt::Ctl(n) => b.control_input(n).map(drop),
            Stmt::Pass(n) => b.pass_input(n).map(drop),
            Stmt::Const(n, v) => b.constant(n, v).map(drop),
            Stmt::Output(n) => b.output(n).map(drop),
            Stmt::Rail(a, c) => b.rail(a, c),
            Stmt::T(g, s, d) => b.transistor(g, s, d),
        };
        r.map_err(at(*line))?;
    }
    Ok(b.build()?)
}

pub fn write_netlist(n: &Netlist) -> String {
    let mut out = String::new();
    for node in n.nodes() {
        let _ = writeln!(out, "node {node}");
    }
    for c in n.control_inputs() {
        let _ = writeln!(out, "input.ctl {c}");
    }
    for p in n.pass_inputs() {
        let _ = writeln!(out, "input.pass {p}");
    }
    for (c, level) in n.constants() {
        let _ = writeln!(out, "const {c} {}", u8::from(*level));
    }
    for o in n.outputs() {
        let _ = writeln!(out, "output {o}");
    }
    for (a, b) in n.rail_pairs() {
        let _ = writeln!(out, "rail {a} {b}");
    }
    for t in n.transistors() {
        let _ = writeln!(out, "t {} {} {}", t.gate, t.source, t.drain);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
# one switch
input.ctl A   # control
input.pass B
output Q
t A B Q
";

    #[test]
    fn parses_with_comments_and_implicit_nodes() {
        let n = parse_netlist(SAMPLE).unwrap();
        assert_eq!(n.transistor_count(), 1);
        assert_eq!(n.nodes().len(), 3);
        assert_eq!(n.outputs()[0].as_str(), "Q");
    }

    #[test]
    fn write_then_parse_is_stable() {
        let n = parse_netlist(SAMPLE).unwrap();
        let text = write_netlist(&n);
        assert_eq!(
            text,
            "node A\nnode B\nnode Q\ninput.ctl A\ninput.pass B\noutput Q\nt A B Q\n"
        );
        let again = parse_netlist(&text).unwrap();
        assert_eq!(again, n);
        assert_eq!(write_netlist(&again), text);
    }

    #[test]
    fn constants_round_trip() {
        let n = parse_netlist("const zero 0\nconst one 1\nrail zero one\n").unwrap();
        assert_eq!(parse_netlist(&write_netlist(&n)).unwrap(), n);
    }

    #[test]
    fn reports_line_numbers() {
        let err = parse_netlist("node A\nfrobnicate A\n").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { line: 2, .. }));
        let err = parse_netlist("node A\nt A A\n").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { line: 2, .. }));
        let err = parse_netlist("node A\nt A B A\n").unwrap_err();
        assert_eq!(
            err,
            ParseError::Statement {
                line: 2,
                source: NetlistError::UnknownNode("B".into())
            }
        );
        assert!(parse_netlist("const a 2\n").is_err());
    }
}
