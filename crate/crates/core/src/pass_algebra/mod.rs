//! Algebra of series/parallel pass-transistor connections.
//!
//! A [`PassExpr`] describes what drives one output node:
//!
//! * `y<c>`: pass variable `y` reaches the output while control condition
//!   `c` holds. Conditions are built from literals with `&` (switches in
//!   series) and `|` (switches in parallel between the same two nodes).
//! * `e1 + e2`: several networks wired onto the same output; their values
//!   combine with [`Signal::merge`].
//!
//! Applying a further series switch distributes into every branch:
//! `(y1<a> + y2<b>)<c>` is `y1<a&c> + y2<b&c>`. [`normalize`] flattens an
//! expression into a sorted sum of single-condition branches, and
//! [`compile_expr`] lowers that form to a netlist with one transistor per
//! literal.

mod parse;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::gate_library::rail_n;
use crate::netlist::{Netlist, NetlistBuilder, NetlistError};
use crate::signal::{pass_through, Signal};

pub use parse::{parse_ctl, parse_expr};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("variable `{0}` is not assigned")]
    Unbound(String),
    #[error("parse error at offset {pos}: {message}")]
    Parse { pos: usize, message: String },
    #[error("`{0}` is not a valid variable name (letters and digits, starting with a letter)")]
    InvalidName(String),
    #[error("branch from `{0}` has no control literal and cannot be built from switches")]
    UnconditionalPath(String),
    #[error("output name `{0}` collides with a variable")]
    OutputClash(String),
    #[error(transparent)]
    Netlist(#[from] NetlistError),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub var: String,
    pub negated: bool,
}

impl Literal {
    pub fn pos(var: &str) -> Self {
        Self {
            var: var.to_string(),
            negated: false,
        }
    }

    pub fn neg(var: &str) -> Self {
        Self {
            var: var.to_string(),
            negated: true,
        }
    }

    /// Node that gates a switch for this literal.
    pub fn rail(&self) -> String {
        if self.negated {
            rail_n(&self.var)
        } else {
            self.var.clone()
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            write!(f, "!{}", self.var)
        } else {
            f.write_str(&self.var)
        }
    }
}

/// Control condition. `And(vec![])` always conducts; `Or(vec![])` never does.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum CtlExpr {
    Lit(Literal),
    And(Vec<CtlExpr>),
    Or(Vec<CtlExpr>),
}

impl CtlExpr {
    pub fn var(name: &str) -> Self {
        CtlExpr::Lit(Literal::pos(name))
    }

    pub fn not(name: &str) -> Self {
        CtlExpr::Lit(Literal::neg(name))
    }

    pub fn always() -> Self {
        CtlExpr::And(Vec::new())
    }

    pub fn never() -> Self {
        CtlExpr::Or(Vec::new())
    }

    pub fn is_always(&self) -> bool {
        matches!(self, CtlExpr::And(v) if v.is_empty())
    }

    /// Conjunction that drops `always()` operands and flattens nested ANDs.
    pub fn and(self, other: CtlExpr) -> CtlExpr {
        let mut parts = Vec::new();
        for e in [self, other] {
            match e {
                CtlExpr::And(v) => parts.extend(v),
                e => parts.push(e),
            }
        }
        if parts.len() == 1 {
            parts.pop().expect("one element")
        } else {
            CtlExpr::And(parts)
        }
    }

    /// Disjunction that flattens nested ORs.
    pub fn or(self, other: CtlExpr) -> CtlExpr {
        let mut parts = Vec::new();
        for e in [self, other] {
            match e {
                CtlExpr::Or(v) => parts.extend(v),
                e => parts.push(e),
            }
        }
        if parts.len() == 1 {
            parts.pop().expect("one element")
        } else {
            CtlExpr::Or(parts)
        }
    }

    pub fn eval(&self, assign: &BTreeMap<String, bool>) -> Result<bool, AlgebraError> {
        match self {
            CtlExpr::Lit(l) => assign
                .get(&l.var)
                .map(|&v| v != l.negated)
                .ok_or_else(|| AlgebraError::Unbound(l.var.clone())),
            CtlExpr::And(v) => v.iter().try_fold(true, |acc, e| Ok(e.eval(assign)? && acc)),
            CtlExpr::Or(v) => v
                .iter()
                .try_fold(false, |acc, e| Ok(e.eval(assign)? || acc)),
        }
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            CtlExpr::Lit(l) => {
                out.insert(l.var.clone());
            }
            CtlExpr::And(v) | CtlExpr::Or(v) => v.iter().for_each(|e| e.collect_vars(out)),
        }
    }

    /// Disjunctive normal form as literal sets, with supersets absorbed.
    pub fn dnf(&self) -> Vec<BTreeSet<Literal>> {
        let raw = match self {
            CtlExpr::Lit(l) => vec![BTreeSet::from([l.clone()])],
            CtlExpr::Or(v) => v.iter().flat_map(|e| e.dnf()).collect(),
            CtlExpr::And(v) => v.iter().fold(vec![BTreeSet::new()], |acc, e| {
                let rhs = e.dnf();
                let mut out = Vec::with_capacity(acc.len() * rhs.len());
                for a in &acc {
                    for b in &rhs {
                        out.push(a.union(b).cloned().collect());
                    }
                }
                absorb(out)
            }),
        };
        absorb(raw)
    }

    /// Control expression for one conjunction of literals.
    pub fn from_conjunction(lits: &BTreeSet<Literal>) -> CtlExpr {
        if lits.len() == 1 {
            CtlExpr::Lit(lits.iter().next().expect("one literal").clone())
        } else {
            CtlExpr::And(lits.iter().cloned().map(CtlExpr::Lit).collect())
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            CtlExpr::Or(v) if v.len() > 1 => 0,
            CtlExpr::And(v) if v.len() > 1 => 1,
            _ => 2,
        }
    }
}

/// Drops duplicate sets and any set that strictly contains another.
fn absorb(mut sets: Vec<BTreeSet<Literal>>) -> Vec<BTreeSet<Literal>> {
    sets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    let mut kept: Vec<BTreeSet<Literal>> = Vec::new();
    for s in sets {
        if !kept.iter().any(|k| k.is_subset(&s)) {
            kept.push(s);
        }
    }
    kept
}

impl fmt::Display for CtlExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join =
            |f: &mut fmt::Formatter<'_>, v: &[CtlExpr], sep: &str, prec: u8| -> fmt::Result {
                for (i, e) in v.iter().enumerate() {
                    if i > 0 {
                        f.write_str(sep)?;
                    }
                    if e.precedence() < prec {
                        write!(f, "({e})")?;
                    } else {
                        write!(f, "{e}")?;
                    }
                }
                Ok(())
            };
        match self {
            CtlExpr::Lit(l) => write!(f, "{l}"),
            CtlExpr::And(v) if v.is_empty() => f.write_str("1"),
            CtlExpr::Or(v) if v.is_empty() => f.write_str("0"),
            CtlExpr::And(v) => join(f, v, "&", 2),
            CtlExpr::Or(v) => join(f, v, "|", 1),
        }
    }
}

/// Network driving one output node.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PassExpr {
    Pass { input: String, ctl: CtlExpr },
    Sum(Vec<PassExpr>),
}

impl PassExpr {
    pub fn pass(input: &str, ctl: CtlExpr) -> Self {
        PassExpr::Pass {
            input: input.to_string(),
            ctl,
        }
    }

    pub fn control_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |_, ctl| ctl.collect_vars(&mut out));
        out
    }

    pub fn pass_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |input, _| {
            out.insert(input.to_string());
        });
        out
    }

    /// Total number of control literals, i.e. the transistor count of the
    /// compiled network when already in normal form.
    pub fn literal_count(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |_, ctl| n += count_literals(ctl));
        n
    }

    fn visit(&self, f: &mut impl FnMut(&str, &CtlExpr)) {
        match self {
            PassExpr::Pass { input, ctl } => f(input, ctl),
            PassExpr::Sum(v) => v.iter().for_each(|e| e.visit(f)),
        }
    }
}

fn count_literals(c: &CtlExpr) -> usize {
    match c {
        CtlExpr::Lit(_) => 1,
        CtlExpr::And(v) | CtlExpr::Or(v) => v.iter().map(count_literals).sum(),
    }
}

impl fmt::Display for PassExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PassExpr::Pass { input, ctl } => write!(f, "{input}<{ctl}>"),
            PassExpr::Sum(v) => {
                for (i, e) in v.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" + ")?;
                    }
                    match e {
                        PassExpr::Sum(inner) if inner.len() != 1 => write!(f, "({e})")?,
                        _ => write!(f, "{e}")?,
                    }
                }
                Ok(())
            }
        }
    }
}

/// Adds a series switch condition after `e`, distributing it into every
/// branch.
pub fn series(e: &PassExpr, more: &CtlExpr) -> PassExpr {
    match e {
        PassExpr::Pass { input, ctl } => PassExpr::Pass {
            input: input.clone(),
            ctl: ctl.clone().and(more.clone()),
        },
        PassExpr::Sum(v) => PassExpr::Sum(v.iter().map(|b| series(b, more)).collect()),
    }
}

/// Value reaching the output under the given assignments.
pub fn eval_expr(
    e: &PassExpr,
    ctl: &BTreeMap<String, bool>,
    pass: &BTreeMap<String, Signal>,
) -> Result<Signal, AlgebraError> {
    match e {
        PassExpr::Pass { input, ctl: c } => {
            let y = *pass
                .get(input)
                .ok_or_else(|| AlgebraError::Unbound(input.clone()))?;
            Ok(pass_through(y, c.eval(ctl)?))
        }
        PassExpr::Sum(v) => v
            .iter()
            .try_fold(Signal::Z, |acc, b| Ok(acc.merge(eval_expr(b, ctl, pass)?))),
    }
}

/// Flattened branches `(pass variable, literal set)`, absorbed and sorted.
pub fn branches(e: &PassExpr) -> Vec<(String, BTreeSet<Literal>)> {
    let mut by_input: BTreeMap<String, Vec<BTreeSet<Literal>>> = BTreeMap::new();
    e.visit(&mut |input, ctl| {
        by_input
            .entry(input.to_string())
            .or_default()
            .extend(ctl.dnf())
    });
    let mut out = Vec::new();
    for (input, sets) in by_input {
        let mut sets = absorb(sets);
        sets.sort_by(|a, b| a.iter().cmp(b.iter()));
        out.extend(sets.into_iter().map(|s| (input.clone(), s)));
    }
    out
}

/// Canonical sum-of-branches form. Semantics are unchanged.
pub fn normalize(e: &PassExpr) -> PassExpr {
    PassExpr::Sum(
        branches(e)
            .into_iter()
            .map(|(input, lits)| PassExpr::Pass {
                input,
                ctl: CtlExpr::from_conjunction(&lits),
            })
            .collect(),
    )
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric())
}

struct Lowering {
    b: NetlistBuilder,
}

impl Lowering {
    /// Declares ports: every control variable on two rails, then single-rail
    /// pass variables that are not also control variables.
    fn new(
        ctl_vars: &BTreeSet<String>,
        pass_vars: &BTreeSet<String>,
        output: &str,
    ) -> Result<Self, AlgebraError> {
        for v in ctl_vars.iter().chain(pass_vars) {
            if !is_identifier(v) {
                return Err(AlgebraError::InvalidName(v.clone()));
            }
        }
        if !is_identifier(output) {
            return Err(AlgebraError::InvalidName(output.to_string()));
        }
        if ctl_vars.contains(output) || pass_vars.contains(output) {
            return Err(AlgebraError::OutputClash(output.to_string()));
        }
        let mut b = Netlist::builder();
        for v in ctl_vars {
            crate::gate_library::dual_control(&mut b, v)?;
        }
        for v in pass_vars.difference(ctl_vars) {
            b.pass_input(v)?;
        }
        b.output(output)?;
        Ok(Self { b })
    }

    fn emit(
        &mut self,
        branches: &[(String, BTreeSet<Literal>)],
        to: &str,
        prefix: &str,
    ) -> Result<(), AlgebraError> {
        for (k, (from, lits)) in branches.iter().enumerate() {
            if lits.is_empty() {
                return Err(AlgebraError::UnconditionalPath(from.clone()));
            }
            let gates: Vec<String> = lits.iter().map(Literal::rail).collect();
            let gates: Vec<&str> = gates.iter().map(String::as_str).collect();
            self.b.chain(from, &gates, to, &format!("{prefix}.{k}"))?;
        }
        Ok(())
    }
}

/// Lowers `e` to a netlist driving `output`.
///
/// Each branch of the normal form becomes its own series chain from the pass
/// variable to the output; branches meet only at the output. Control
/// variable `x` is provided on rails `x` and `x_n`.
pub fn compile_expr(e: &PassExpr, output: &str) -> Result<Netlist, AlgebraError> {
    let br = branches(e);
    let mut low = Lowering::new(&e.control_vars(), &e.pass_vars(), output)?;
    low.emit(&br, output, output)?;
    Ok(low.b.build()?)
}

/// Lowers `e` followed by a series stage `ctl` as two physical stages
/// joined at an internal node `{output}.j`, without distributing `ctl`.
pub fn compile_series(e: &PassExpr, ctl: &CtlExpr, output: &str) -> Result<Netlist, AlgebraError> {
    let mut ctl_vars = e.control_vars();
    ctl.collect_vars(&mut ctl_vars);
    let mut low = Lowering::new(&ctl_vars, &e.pass_vars(), output)?;
    let junction = format!("{output}.j");
    low.b.node(&junction)?;
    low.emit(&branches(e), &junction, &junction)?;
    let stage: Vec<(String, BTreeSet<Literal>)> = ctl
        .dnf()
        .into_iter()
        .map(|s| (junction.clone(), s))
        .collect();
    low.emit(&stage, output, &format!("{output}.s"))?;
    Ok(low.b.build()?)
}
