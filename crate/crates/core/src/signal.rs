//! Signal lattice and device-level formulas.
//!
//! A node in a pass-transistor network carries one of four values:
//!
//! ```text
//!        X          conflict (driven to both 0 and 1)
//!      /   \
//!    V0     V1      driven logic levels
//!      \   /
//!        Z          high impedance (no conducting path)
//! ```
//!
//! Joining values that meet on one node is [`Signal::merge`]. A switch passes
//! its source value only while its gate conducts ([`pass_through`]).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Boltzmann constant in J/K, as used for the Landauer bound.
pub const BOLTZMANN: f64 = 1.3806505e-23;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SignalError {
    #[error("invalid signal literal `{0}` (expected 0, 1, Z or X)")]
    Parse(String),
    #[error("temperature must be non-negative, got {0} K")]
    NegativeTemperature(f64),
    #[error("inverter gain k must be positive, got {0}")]
    NonPositiveGain(f64),
    #[error("supply voltage must be positive, got {0} V")]
    NonPositiveSupply(f64),
}

/// Four-valued node level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Signal {
    /// High impedance; nothing drives the node.
    Z,
    V0,
    V1,
    /// Two conducting paths disagree.
    X,
}

impl Signal {
    pub const ALL: [Signal; 4] = [Signal::Z, Signal::V0, Signal::V1, Signal::X];

    pub fn from_bit(bit: bool) -> Self {
        if bit {
            Signal::V1
        } else {
            Signal::V0
        }
    }

    /// The driven bit, or `None` for `Z` and `X`.
    pub fn to_bit(self) -> Option<bool> {
        match self {
            Signal::V0 => Some(false),
            Signal::V1 => Some(true),
            Signal::Z | Signal::X => None,
        }
    }

    pub fn is_driven(self) -> bool {
        self.to_bit().is_some()
    }

    /// Lattice join. `Z` is the identity and `X` absorbs everything.
    pub fn merge(self, other: Signal) -> Signal {
        use Signal::*;
        match (self, other) {
            (Z, s) | (s, Z) => s,
            (X, _) | (_, X) => X,
            (a, b) if a == b => a,
            _ => X,
        }
    }

    /// Partial order of the lattice: `self ⊑ other`.
    pub fn le(self, other: Signal) -> bool {
        self.merge(other) == other
    }

    /// Logical complement for driven values; `Z` and `X` map to themselves.
    pub fn complement(self) -> Signal {
        match self {
            Signal::V0 => Signal::V1,
            Signal::V1 => Signal::V0,
            s => s,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Signal::Z => "Z",
            Signal::V0 => "0",
            Signal::V1 => "1",
            Signal::X => "X",
        }
    }
}

impl fmt::Display for Signal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Signal {
    type Err = SignalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "0" => Ok(Signal::V0),
            "1" => Ok(Signal::V1),
            "Z" | "z" => Ok(Signal::Z),
            "X" | "x" => Ok(Signal::X),
            other => Err(SignalError::Parse(other.to_string())),
        }
    }
}

/// Output of a single pass transistor: the source value when conducting,
/// high impedance otherwise.
pub fn pass_through(source: Signal, conducting: bool) -> Signal {
    if conducting {
        source
    } else {
        Signal::Z
    }
}

/// Inverted threshold gate: conducts (returns `true`) only while the control
/// level is strictly below the threshold.
pub fn threshold_decision<L: PartialOrd>(level: L, threshold: L) -> bool {
    level < threshold
}

/// Parameters for the inverter switching-point formulas. Voltages in volts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InverterParams {
    pub k: f64,
    pub vdd: f64,
    pub vtp: f64,
    pub vtn: f64,
    pub vd: f64,
    pub ve: f64,
}

impl InverterParams {
    pub fn new(
        k: f64,
        vdd: f64,
        vtp: f64,
        vtn: f64,
        vd: f64,
        ve: f64,
    ) -> Result<Self, SignalError> {
        if k.is_nan() || k <= 0.0 {
            return Err(SignalError::NonPositiveGain(k));
        }
        if vdd.is_nan() || vdd <= 0.0 {
            return Err(SignalError::NonPositiveSupply(vdd));
        }
        Ok(Self {
            k,
            vdd,
            vtp,
            vtn,
            vd,
            ve,
        })
    }
}

/// NMOS inverter switching voltage, `-k*vd + ve`.
///
/// `vd` and `ve` are opaque caller-supplied parameters.
pub fn nmos_inverter_vi(p: &InverterParams) -> f64 {
    -p.k * p.vd + p.ve
}

/// CMOS inverter switching voltage, `(k*(vdd + vtp) + vtn) / (k + 1)`.
pub fn cmos_inverter_vi(p: &InverterParams) -> f64 {
    (p.k * (p.vdd + p.vtp) + p.vtn) / (p.k + 1.0)
}

/// Minimum energy in joules dissipated by erasing one bit at `temperature`
/// kelvin: `K * T * ln 2`.
pub fn landauer_bound(temperature: f64) -> Result<f64, SignalError> {
    if temperature < 0.0 || temperature.is_nan() {
        return Err(SignalError::NegativeTemperature(temperature));
    }
    Ok(BOLTZMANN * temperature * std::f64::consts::LN_2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use Signal::*;

    #[test]
    fn merge_examples() {
        assert_eq!(Z.merge(V1), V1);
        assert_eq!(V0.merge(V0), V0);
        assert_eq!(V0.merge(V1), X);
    }

    #[test]
    fn merge_is_a_join_semilattice() {
        for a in Signal::ALL {
            assert_eq!(a.merge(a), a);
            assert_eq!(Z.merge(a), a);
            assert_eq!(X.merge(a), X);
            for b in Signal::ALL {
                assert_eq!(a.merge(b), b.merge(a));
                for c in Signal::ALL {
                    assert_eq!(a.merge(b).merge(c), a.merge(b.merge(c)));
                }
            }
        }
        assert!(!V0.le(V1) && !V1.le(V0));
        assert!(Z.le(V0) && V0.le(X));
    }

    #[test]
    fn pass_through_table() {
        assert_eq!(pass_through(V1, true), V1);
        assert_eq!(pass_through(V1, false), Z);
        assert_eq!(pass_through(Z, true), Z);
        for s in Signal::ALL {
            assert_eq!(pass_through(s, false), Z);
            assert_eq!(pass_through(s, true), s);
        }
    }

    #[test]
    fn threshold_examples() {
        assert!(!threshold_decision(3, 2));
        assert!(threshold_decision(1, 2));
        assert!(!threshold_decision(2, 2));
    }

    #[test]
    fn threshold_is_antitone() {
        let t = 2.5;
        let levels = [-1.0, 0.0, 1.0, 2.0, 2.5, 3.0, 7.0];
        for &lo in &levels {
            for &hi in levels.iter().filter(|&&h| h >= lo) {
                assert!(threshold_decision(lo, t) >= threshold_decision(hi, t));
            }
        }
    }

    fn params(k: f64, vdd: f64, vtp: f64, vtn: f64, vd: f64, ve: f64) -> InverterParams {
        InverterParams::new(k, vdd, vtp, vtn, vd, ve).unwrap()
    }

    #[test]
    fn nmos_inverter_examples() {
        assert_eq!(nmos_inverter_vi(&params(1.0, 5.0, 0.0, 0.0, 1.0, 2.0)), 1.0);
        assert_eq!(nmos_inverter_vi(&params(0.5, 5.0, 0.0, 0.0, 2.0, 3.0)), 2.0);
        assert_eq!(nmos_inverter_vi(&params(2.0, 5.0, 0.0, 0.0, 0.0, 5.0)), 5.0);
    }

    #[test]
    fn cmos_inverter_examples() {
        assert_eq!(
            cmos_inverter_vi(&params(1.0, 5.0, -1.0, 1.0, 0.0, 0.0)),
            2.5
        );
        assert_eq!(cmos_inverter_vi(&params(1.0, 3.0, 0.0, 0.0, 0.0, 0.0)), 1.5);
        assert_eq!(
            cmos_inverter_vi(&params(2.0, 5.0, -1.0, 1.0, 0.0, 0.0)),
            3.0
        );
    }

    #[test]
    fn symmetric_cmos_inverter_switches_at_half_supply() {
        for vdd in [1.0, 1.8, 3.3, 5.0] {
            for vt in [0.0, 0.3, 0.7] {
                let p = params(1.0, vdd, -vt, vt, 0.0, 0.0);
                assert_eq!(cmos_inverter_vi(&p), vdd / 2.0);
            }
        }
    }

    #[test]
    fn inverter_params_validation() {
        assert_eq!(
            InverterParams::new(0.0, 5.0, 0.0, 0.0, 0.0, 0.0),
            Err(SignalError::NonPositiveGain(0.0))
        );
        assert_eq!(
            InverterParams::new(1.0, -1.0, 0.0, 0.0, 0.0, 0.0),
            Err(SignalError::NonPositiveSupply(-1.0))
        );
    }

    #[test]
    fn landauer_values() {
        assert_eq!(landauer_bound(0.0).unwrap(), 0.0);
        // Reference values computed with mpmath at 30 digits.
        assert!((landauer_bound(300.0).unwrap() - 2.870_982_004_241_036e-21).abs() < 1e-30);
        assert!((landauer_bound(1.0).unwrap() - 9.569_940_014_136_788e-24).abs() < 1e-33);
        assert!(landauer_bound(-1.0).is_err());
    }

    #[test]
    fn landauer_is_linear() {
        for t in [0.5, 1.0, 77.0, 300.0, 1e4] {
            let one = landauer_bound(t).unwrap();
            let two = landauer_bound(2.0 * t).unwrap();
            assert!((two - 2.0 * one).abs() <= 1e-12 * two);
        }
    }

    #[test]
    fn text_encoding() {
        for s in Signal::ALL {
            assert_eq!(s.to_string().parse::<Signal>().unwrap(), s);
        }
        assert!("2".parse::<Signal>().is_err());
    }
}
