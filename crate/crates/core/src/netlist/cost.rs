use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use super::NetlistError;
use crate::gate_library::GateKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Technology {
    /// NMOS pass transistors driven by dual-rail controls.
    ProposedNmos,
    /// CMOS transmission gates (two transistors per switch).
    ConventionalCmos,
}

impl fmt::Display for Technology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Technology::ProposedNmos => "NMOS",
            Technology::ConventionalCmos => "CMOS",
        })
    }
}

/// Per-gate transistor counts for both technologies.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TechLibrary {
    nmos: BTreeMap<GateKind, u32>,
    cmos: BTreeMap<GateKind, u32>,
}

impl TechLibrary {
    /// Builds a library, rejecting any kind whose NMOS count exceeds its
    /// CMOS count.
    pub fn new(
        nmos: BTreeMap<GateKind, u32>,
        cmos: BTreeMap<GateKind, u32>,
    ) -> Result<Self, NetlistError> {
        for (kind, n) in &nmos {
            if cmos.get(kind).is_some_and(|c| n > c) {
                return Err(NetlistError::LibraryOrdering(*kind));
            }
        }
        Ok(Self { nmos, cmos })
    }

    /// Published counts. NPG exists only in the NMOS column.
    pub fn reference() -> Self {
        use GateKind::*;
        let nmos = BTreeMap::from([(Not, 0), (Cnot, 4), (Ccnot, 10), (Fredkin, 8), (Npg, 4)]);
        let cmos = BTreeMap::from([(Not, 0), (Cnot, 8), (Ccnot, 16), (Fredkin, 16)]);
        Self::new(nmos, cmos).expect("reference library is ordered")
    }

    pub fn count(&self, kind: GateKind, tech: Technology) -> Option<u32> {
        self.table(tech).get(&kind).copied()
    }

    pub fn circuit_cost(&self, gates: &[GateKind], tech: Technology) -> Result<u32, NetlistError> {
        gates
            .iter()
            .map(|&kind| {
                self.count(kind, tech)
                    .ok_or(NetlistError::NotInLibrary { kind, tech })
            })
            .sum()
    }

    fn table(&self, tech: Technology) -> &BTreeMap<GateKind, u32> {
        match tech {
            Technology::ProposedNmos => &self.nmos,
            Technology::ConventionalCmos => &self.cmos,
        }
    }
}

impl Default for TechLibrary {
    fn default() -> Self {
        Self::reference()
    }
}

/// Total transistor count of `gates` under the reference library.
pub fn circuit_cost(gates: &[GateKind], tech: Technology) -> Result<u32, NetlistError> {
    TechLibrary::reference().circuit_cost(gates, tech)
}
