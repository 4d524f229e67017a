//! Structural model of pass-transistor networks.
//!
//! A [`Netlist`] is a set of named nodes, a list of bidirectional
//! [`Transistor`] switches, and port declarations. Netlists are immutable
//! once built; use [`NetlistBuilder`] or the value-returning methods
//! ([`Netlist::add_transistor`], [`Netlist::instantiate`]) to derive new ones.

mod cost;
mod text;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

pub use cost::{circuit_cost, TechLibrary, Technology};
pub use text::{parse_netlist, write_netlist, ParseError};

use crate::gate_library::GateKind;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NetlistError {
    #[error("invalid node name `{0}`")]
    InvalidName(String),
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("transistor gated by `{gate}` connects `{node}` to itself")]
    SelfLoop { gate: String, node: String },
    #[error("node `{node}` is declared as {role} more than once")]
    DuplicatePort { node: String, role: &'static str },
    #[error("node `{node}` cannot be both {first} and {second}")]
    PortConflict {
        node: String,
        first: &'static str,
        second: &'static str,
    },
    #[error("rail pair pairs `{0}` with itself")]
    ReflexiveRail(String),
    #[error("node `{0}` already belongs to a different rail pair")]
    RailConflict(String),
    #[error("binding does not cover child port `{0}`")]
    IncompleteBinding(String),
    #[error("binding names `{0}`, which is not a port of the child netlist")]
    UnknownPort(String),
    #[error("internal error: renamed node `{0}` collides with an existing node")]
    NameCollision(String),
    #[error("gate kind {kind} has no entry for {tech} technology")]
    NotInLibrary { kind: GateKind, tech: Technology },
    #[error("technology library violates NMOS <= CMOS for {0}")]
    LibraryOrdering(GateKind),
    #[error("transistor order must be a permutation of 0..{0}")]
    BadPermutation(usize),
}

/// Node identifier: a non-empty name without whitespace or `#`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct NodeId(String);

impl NodeId {
    pub fn new(name: impl Into<String>) -> Result<Self, NetlistError> {
        let name = name.into();
        if name.is_empty() || name.chars().any(|c| c.is_whitespace() || c == '#') {
            return Err(NetlistError::InvalidName(name));
        }
        Ok(NodeId(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::borrow::Borrow<str> for NodeId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

/// An NMOS pass transistor. Source and drain are interchangeable: the
/// channel conducts in both directions while the gate is at logic 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Transistor {
    pub gate: NodeId,
    pub source: NodeId,
    pub drain: NodeId,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Netlist {
    nodes: BTreeSet<NodeId>,
    transistors: Vec<Transistor>,
    pass_inputs: Vec<NodeId>,
    control_inputs: Vec<NodeId>,
    constants: Vec<(NodeId, bool)>,
    outputs: Vec<NodeId>,
    rail_pairs: Vec<(NodeId, NodeId)>,
}

impl Netlist {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn builder() -> NetlistBuilder {
        NetlistBuilder::default()
    }

    pub fn nodes(&self) -> &BTreeSet<NodeId> {
        &self.nodes
    }

    pub fn transistors(&self) -> &[Transistor] {
        &self.transistors
    }

    pub fn pass_inputs(&self) -> &[NodeId] {
        &self.pass_inputs
    }

    pub fn control_inputs(&self) -> &[NodeId] {
        &self.control_inputs
    }

    /// Nodes tied to a fixed logic level.
    pub fn constants(&self) -> &[(NodeId, bool)] {
        &self.constants
    }

    pub fn outputs(&self) -> &[NodeId] {
        &self.outputs
    }

    /// Dual-rail pairs as `(true rail, complement rail)`.
    pub fn rail_pairs(&self) -> &[(NodeId, NodeId)] {
        &self.rail_pairs
    }

    pub fn transistor_count(&self) -> usize {
        self.transistors.len()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.nodes.contains(name)
    }

    pub fn node(&self, name: &str) -> Option<&NodeId> {
        self.nodes.get(name)
    }

    /// The rail partner of `node`, in either direction.
    pub fn complement(&self, node: &str) -> Option<&NodeId> {
        self.rail_pairs.iter().find_map(|(t, f)| {
            if t.as_str() == node {
                Some(f)
            } else if f.as_str() == node {
                Some(t)
            } else {
                None
            }
        })
    }

    /// `true` when `node` is the second element of a rail pair.
    pub fn is_complement_rail(&self, node: &str) -> bool {
        self.rail_pairs.iter().any(|(_, f)| f.as_str() == node)
    }

    /// All inputs that must be supplied by the caller: control inputs
    /// followed by pass inputs, in declaration order.
    pub fn inputs(&self) -> impl Iterator<Item = &NodeId> {
        self.control_inputs.iter().chain(self.pass_inputs.iter())
    }

    /// Inputs enumerated by truth-table extraction: control then pass inputs,
    /// skipping complement rails (those are derived from their partner).
    pub fn primary_inputs(&self) -> Vec<NodeId> {
        self.inputs()
            .filter(|n| !self.is_complement_rail(n.as_str()))
            .cloned()
            .collect()
    }

    /// Output columns of a truth table: every declared output except those
    /// whose rail partner was already listed earlier.
    pub fn primary_outputs(&self) -> Vec<NodeId> {
        let mut seen: BTreeSet<&str> = BTreeSet::new();
        let mut cols = Vec::new();
        for out in &self.outputs {
            let partner_seen = self
                .complement(out.as_str())
                .is_some_and(|p| seen.contains(p.as_str()));
            if !partner_seen {
                cols.push(out.clone());
            }
            seen.insert(out.as_str());
        }
        cols
    }

    /// Returns a copy with one more transistor; `self` is unchanged.
    pub fn add_transistor(
        &self,
        gate: &str,
        source: &str,
        drain: &str,
    ) -> Result<Netlist, NetlistError> {
        let mut b = NetlistBuilder::from_netlist(self.clone());
        b.transistor(gate, source, drain)?;
        b.build()
    }

    /// Embeds `child` into a copy of `self`.
    ///
    /// `binding` maps every child port (inputs and outputs) to an existing
    /// node of `self`. Child internal nodes and constants are copied under a
    /// fresh `iN/` prefix.
    pub fn instantiate(
        &self,
        child: &Netlist,
        binding: &BTreeMap<NodeId, NodeId>,
    ) -> Result<Netlist, NetlistError> {
        let mut b = NetlistBuilder::from_netlist(self.clone());
        b.instantiate(child, binding)?;
        b.build()
    }

    /// Copy with every transistor's source and drain exchanged.
    pub fn with_reversed_channels(&self) -> Netlist {
        let mut n = self.clone();
        for t in &mut n.transistors {
            std::mem::swap(&mut t.source, &mut t.drain);
        }
        n
    }

    /// Copy with transistors listed in the order given by `order`.
    pub fn with_transistor_order(&self, order: &[usize]) -> Result<Netlist, NetlistError> {
        let len = self.transistors.len();
        let mut seen = vec![false; len];
        if order.len() != len {
            return Err(NetlistError::BadPermutation(len));
        }
        for &i in order {
            if i >= len || seen[i] {
                return Err(NetlistError::BadPermutation(len));
            }
            seen[i] = true;
        }
        let mut n = self.clone();
        n.transistors = order.iter().map(|&i| self.transistors[i].clone()).collect();
        Ok(n)
    }

    fn is_port(&self, node: &NodeId) -> bool {
        self.inputs().any(|n| n == node) || self.outputs.contains(node)
    }

    fn validate(&self) -> Result<(), NetlistError> {
        let known = |n: &NodeId| {
            if self.nodes.contains(n) {
                Ok(())
            } else {
                Err(NetlistError::UnknownNode(n.0.clone()))
            }
        };
        for t in &self.transistors {
            known(&t.gate)?;
            known(&t.source)?;
            known(&t.drain)?;
            if t.source == t.drain {
                return Err(NetlistError::SelfLoop {
                    gate: t.gate.0.clone(),
                    node: t.source.0.clone(),
                });
            }
        }

        let consts: Vec<NodeId> = self.constants.iter().map(|(n, _)| n.clone()).collect();
        let lists: [(&'static str, &[NodeId]); 4] = [
            ("a control input", &self.control_inputs),
            ("a pass input", &self.pass_inputs),
            ("a constant", &consts),
            ("an output", &self.outputs),
        ];
        let mut roles: BTreeMap<&NodeId, Vec<&'static str>> = BTreeMap::new();
        for (role, list) in lists {
            let mut once = BTreeSet::new();
            for n in list {
                known(n)?;
                if !once.insert(n) {
                    return Err(NetlistError::DuplicatePort {
                        node: n.0.clone(),
                        role,
                    });
                }
                roles.entry(n).or_default().push(role);
            }
        }
        for (node, rs) in roles {
            // An input may double as an output (wire-through); nothing else overlaps.
            let inputs = rs.iter().filter(|r| **r != "an output").count();
            if inputs > 1 {
                return Err(NetlistError::PortConflict {
                    node: node.0.clone(),
                    first: rs[0],
                    second: rs[1],
                });
            }
            if rs.contains(&"a constant") && rs.contains(&"an output") {
                return Err(NetlistError::PortConflict {
                    node: node.0.clone(),
                    first: "a constant",
                    second: "an output",
                });
            }
        }

        let mut paired = BTreeSet::new();
        for (a, b) in &self.rail_pairs {
            known(a)?;
            known(b)?;
            if a == b {
                return Err(NetlistError::ReflexiveRail(a.0.clone()));
            }
            for n in [a, b] {
                if !paired.insert(n) {
                    return Err(NetlistError::RailConflict(n.0.clone()));
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for Netlist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&write_netlist(self))
    }
}

impl std::str::FromStr for Netlist {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_netlist(s)
    }
}

/// Incremental constructor for [`Netlist`]. Structural checks that need the
/// whole netlist (port overlap, rail uniqueness) run in [`build`](Self::build).
#[derive(Debug, Clone, Default)]
pub struct NetlistBuilder {
    net: Netlist,
}

impl NetlistBuilder {
    pub fn from_netlist(net: Netlist) -> Self {
        Self { net }
    }

    /// Declares a node. Declaring an existing node is a no-op.
    pub fn node(&mut self, name: &str) -> Result<NodeId, NetlistError> {
        let id = NodeId::new(name)?;
        self.net.nodes.insert(id.clone());
        Ok(id)
    }

    pub fn control_input(&mut self, name: &str) -> Result<NodeId, NetlistError> {
        let id = self.node(name)?;
        self.net.control_inputs.push(id.clone());
        Ok(id)
    }

    pub fn pass_input(&mut self, name: &str) -> Result<NodeId, NetlistError> {
        let id = self.node(name)?;
        self.net.pass_inputs.push(id.clone());
        Ok(id)
    }

    pub fn constant(&mut self, name: &str, level: bool) -> Result<NodeId, NetlistError> {
        let id = self.node(name)?;
        self.net.constants.push((id.clone(), level));
        Ok(id)
    }

    pub fn output(&mut self, name: &str) -> Result<NodeId, NetlistError> {
        let id = self.node(name)?;
        self.net.outputs.push(id.clone());
        Ok(id)
    }

    /// Declares `complement` as the complement rail of `signal`. Both nodes
    /// must already exist.
    pub fn rail(&mut self, signal: &str, complement: &str) -> Result<(), NetlistError> {
        let a = self.existing(signal)?;
        let b = self.existing(complement)?;
        if a == b {
            return Err(NetlistError::ReflexiveRail(a.0));
        }
        self.net.rail_pairs.push((a, b));
        Ok(())
    }

    pub fn transistor(
        &mut self,
        gate: &str,
        source: &str,
        drain: &str,
    ) -> Result<(), NetlistError> {
        let gate = self.existing(gate)?;
        let source = self.existing(source)?;
        let drain = self.existing(drain)?;
        if source == drain {
            return Err(NetlistError::SelfLoop {
                gate: gate.0,
                node: source.0,
            });
        }
        self.net.transistors.push(Transistor {
            gate,
            source,
            drain,
        });
        Ok(())
    }

    /// Series chain from `source` to `drain` with one transistor per gate in
    /// `gates`. Intermediate nodes are named `{prefix}.1`, `{prefix}.2`, ...
    pub fn chain(
        &mut self,
        source: &str,
        gates: &[&str],
        drain: &str,
        prefix: &str,
    ) -> Result<(), NetlistError> {
        let mut from = source.to_string();
        for (i, gate) in gates.iter().enumerate() {
            let to = if i + 1 == gates.len() {
                drain.to_string()
            } else {
                let mid = format!("{prefix}.{}", i + 1);
                self.node(&mid)?;
                mid
            };
            self.transistor(gate, &from, &to)?;
            from = to;
        }
        Ok(())
    }

    /// See [`Netlist::instantiate`].
    pub fn instantiate(
        &mut self,
        child: &Netlist,
        binding: &BTreeMap<NodeId, NodeId>,
    ) -> Result<(), NetlistError> {
        for port in binding.keys() {
            if !child.is_port(port) {
                return Err(NetlistError::UnknownPort(port.0.clone()));
            }
        }
        for port in child.inputs().chain(child.outputs.iter()) {
            match binding.get(port) {
                None => return Err(NetlistError::IncompleteBinding(port.0.clone())),
                Some(target) if !self.net.nodes.contains(target) => {
                    return Err(NetlistError::UnknownNode(target.0.clone()))
                }
                Some(_) => {}
            }
        }

        let prefix = self.fresh_prefix();
        let mut map: BTreeMap<&NodeId, NodeId> = BTreeMap::new();
        for node in &child.nodes {
            let mapped = match binding.get(node) {
                Some(target) => target.clone(),
                None => {
                    let renamed = NodeId::new(format!("{prefix}{node}"))?;
                    if !self.net.nodes.insert(renamed.clone()) {
                        return Err(NetlistError::NameCollision(renamed.0));
                    }
                    renamed
                }
            };
            map.insert(node, mapped);
        }

        for (node, level) in &child.constants {
            self.net.constants.push((map[node].clone(), *level));
        }
        for t in &child.transistors {
            self.net.transistors.push(Transistor {
                gate: map[&t.gate].clone(),
                source: map[&t.source].clone(),
                drain: map[&t.drain].clone(),
            });
        }
        for (a, b) in &child.rail_pairs {
            let (a, b) = (map[a].clone(), map[b].clone());
            match self.pair_of(&a) {
                Some(existing) if existing == b => {}
                Some(_) => return Err(NetlistError::RailConflict(a.0)),
                None if self.pair_of(&b).is_some() => return Err(NetlistError::RailConflict(b.0)),
                None => self.net.rail_pairs.push((a, b)),
            }
        }
        Ok(())
    }

    pub fn build(self) -> Result<Netlist, NetlistError> {
        self.net.validate()?;
        Ok(self.net)
    }

    fn existing(&self, name: &str) -> Result<NodeId, NetlistError> {
        self.net
            .nodes
            .get(name)
            .cloned()
            .ok_or_else(|| NetlistError::UnknownNode(name.to_string()))
    }

    fn pair_of(&self, node: &NodeId) -> Option<NodeId> {
        self.net.complement(node.as_str()).cloned()
    }

    fn fresh_prefix(&self) -> String {
        (0..)
            .map(|k| format!("i{k}/"))
            .find(|p| {
                !self
                    .net
                    .nodes
                    .iter()
                    .any(|n| n.as_str().starts_with(p.as_str()))
            })
            .expect("unbounded search")
    }
}

/// Convenience for building bindings from string pairs.
pub fn binding<'a>(
    pairs: impl IntoIterator<Item = (&'a str, &'a str)>,
) -> Result<BTreeMap<NodeId, NodeId>, NetlistError> {
    pairs
        .into_iter()
        .map(|(port, node)| Ok((NodeId::new(port)?, NodeId::new(node)?)))
        .collect()
}
