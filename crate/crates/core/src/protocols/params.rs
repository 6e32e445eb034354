use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::auth::{mac_keygen, MacKey};
use crate::oracles::{sample_function, BooleanFunction, DEFAULT_ENUM_LIMIT};
use crate::qstate::DEFAULT_QUBIT_CAP;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProtocolId {
    /// Three-pass exchange with random permutations only.
    P1,
    /// Keyed three-pass exchange with masked authentication tags.
    P2,
    /// Three P2 stages: send, echo back, send again.
    P3,
    /// Receiver-initiated two-pass exchange.
    P4,
    /// Three P4 stages: send, echo back, send again.
    P5,
    /// P4 carrying `x ∥ e_k(x)`, followed by a P4 echo of the tag.
    P6,
    /// Single pass of a tagged Hadamard-encoded message.
    NonInteractive,
    /// P4 standing alone.
    TwoRound,
}

impl ProtocolId {
    pub const ALL: [ProtocolId; 8] = [
        ProtocolId::P1,
        ProtocolId::P2,
        ProtocolId::P3,
        ProtocolId::P4,
        ProtocolId::P5,
        ProtocolId::P6,
        ProtocolId::NonInteractive,
        ProtocolId::TwoRound,
    ];

    /// Transmissions in an honest run.
    pub fn rounds(self) -> usize {
        match self {
            ProtocolId::P1 | ProtocolId::P2 => 3,
            ProtocolId::P3 => 9,
            ProtocolId::P4 | ProtocolId::TwoRound => 2,
            ProtocolId::P5 => 6,
            ProtocolId::P6 => 4,
            ProtocolId::NonInteractive => 1,
        }
    }

    pub fn is_keyed(self) -> bool {
        self != ProtocolId::P1
    }

    /// Peak live width of the register lifecycle, with the formula used.
    pub fn peak_width(self, n: u32, l: u32, t: u32) -> (u32, String) {
        match self {
            ProtocolId::P1 => (3 * n, format!("3n with n={n}")),
            ProtocolId::P2 | ProtocolId::P3 => (3 * n + l, format!("3n + l with n={n}, l={l}")),
            ProtocolId::P4 | ProtocolId::P5 | ProtocolId::TwoRound => {
                (2 * n + l, format!("2n + l with n={n}, l={l}"))
            }
            ProtocolId::P6 => (2 * (n + t) + l, format!("2(n + t) + l with n={n}, t={t}, l={l}")),
            ProtocolId::NonInteractive => (n + l, format!("n + l with n={n}, l={l}")),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ProtocolId::P1 => "p1",
            ProtocolId::P2 => "p2",
            ProtocolId::P3 => "p3",
            ProtocolId::P4 => "p4",
            ProtocolId::P5 => "p5",
            ProtocolId::P6 => "p6",
            ProtocolId::NonInteractive => "non-interactive",
            ProtocolId::TwoRound => "two-round",
        }
    }
}

impl fmt::Display for ProtocolId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProtocolId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "p1" => Ok(ProtocolId::P1),
            "p2" => Ok(ProtocolId::P2),
            "p3" => Ok(ProtocolId::P3),
            "p4" => Ok(ProtocolId::P4),
            "p5" => Ok(ProtocolId::P5),
            "p6" => Ok(ProtocolId::P6),
            "nonint" | "non-interactive" => Ok(ProtocolId::NonInteractive),
            "two-round" | "tworound" => Ok(ProtocolId::TwoRound),
            other => Err(Error::Parse(format!("unknown protocol `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolParams {
    pub protocol: ProtocolId,
    /// Message width.
    pub n: u32,
    /// Authentication tag width.
    pub l: u32,
    /// MAC tag width (P6 only).
    pub t: u32,
    pub snapshots: bool,
    pub qubit_cap: u32,
    pub enum_limit: u64,
}

impl ProtocolParams {
    pub fn new(protocol: ProtocolId, n: u32, l: u32) -> Self {
        Self {
            protocol,
            n,
            l,
            t: 0,
            snapshots: false,
            qubit_cap: DEFAULT_QUBIT_CAP,
            enum_limit: DEFAULT_ENUM_LIMIT,
        }
    }

    pub fn with_mac_width(mut self, t: u32) -> Self {
        self.t = t;
        self
    }

    pub fn with_snapshots(mut self, on: bool) -> Self {
        self.snapshots = on;
        self
    }

    pub fn with_qubit_cap(mut self, cap: u32) -> Self {
        self.qubit_cap = cap;
        self
    }

    /// Width of the message register carried by each stage.
    pub fn register_width(&self) -> u32 {
        if self.protocol == ProtocolId::P6 {
            self.n + self.t
        } else {
            self.n
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n > 32 {
            return Err(Error::InvalidWidth {
                what: "message width n",
                width: self.n,
                min: 1,
                max: 32,
            });
        }
        if self.protocol.is_keyed() && self.l == 0 {
            return Err(Error::InvalidWidth {
                what: "tag width l",
                width: 0,
                min: 1,
                max: 32,
            });
        }
        if self.protocol == ProtocolId::P6 && !(1..=16).contains(&self.t) {
            return Err(Error::InvalidWidth {
                what: "MAC tag width t",
                width: self.t,
                min: 1,
                max: 16,
            });
        }
        let l = if self.protocol.is_keyed() { self.l } else { 0 };
        let (needed, detail) = self.protocol.peak_width(self.n, l, self.t);
        if needed > self.qubit_cap {
            return Err(Error::CapExceeded {
                needed,
                cap: self.qubit_cap,
                detail,
            });
        }
        Ok(())
    }
}

/// Which preshared authentication function tagged a transmission.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum KeyId {
    #[serde(rename = "s_A")]
    SA,
    #[serde(rename = "s_B")]
    SB,
}

/// Preshared material: authentication functions and, for P6, the one-time MAC key.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Keys {
    pub s_a: BooleanFunction,
    pub s_b: BooleanFunction,
    pub mac: Option<MacKey>,
}

impl Keys {
    /// Uniform functions on the stage register width, plus a MAC key for P6.
    pub fn sample<R: Rng + ?Sized>(params: &ProtocolParams, rng: &mut R) -> Result<Self> {
        let w = params.register_width();
        let l = params.l.max(1);
        let s_a = sample_function(w, l, rng)?;
        let s_b = sample_function(w, l, rng)?;
        let mac = if params.protocol == ProtocolId::P6 {
            Some(mac_keygen(params.t, rng)?)
        } else {
            None
        };
        Ok(Self { s_a, s_b, mac })
    }

    pub fn get(&self, id: KeyId) -> &BooleanFunction {
        match id {
            KeyId::SA => &self.s_a,
            KeyId::SB => &self.s_b,
        }
    }

    pub fn set(&mut self, id: KeyId, f: BooleanFunction) {
        match id {
            KeyId::SA => self.s_a = f,
            KeyId::SB => self.s_b = f,
        }
    }

    pub(crate) fn check(&self, params: &ProtocolParams) -> Result<()> {
        let w = params.register_width();
        for (name, f) in [("s_A", &self.s_a), ("s_B", &self.s_b)] {
            if f.input_width() != w || f.output_width() != params.l {
                return Err(Error::WidthMismatch {
                    what: format!("{name} widths (input, output)"),
                    expected: ((w as u64) << 32) | params.l as u64,
                    got: ((f.input_width() as u64) << 32) | f.output_width() as u64,
                });
            }
        }
        if params.protocol == ProtocolId::P6 {
            match self.mac {
                Some(k) if k.t == params.t => {}
                _ => {
                    return Err(Error::InvalidConfig(format!(
                        "P6 needs a MAC key of width t={}",
                        params.t
                    )))
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cap_arithmetic() {
        let p = ProtocolParams::new(ProtocolId::P2, 3, 3).with_qubit_cap(11);
        match p.validate() {
            Err(Error::CapExceeded { needed, cap, detail }) => {
                assert_eq!((needed, cap), (12, 11));
                assert_eq!(detail, "3n + l with n=3, l=3");
            }
            other => panic!("{other:?}"),
        }
        assert!(ProtocolParams::new(ProtocolId::P2, 3, 3).validate().is_ok());
        assert!(ProtocolParams::new(ProtocolId::P6, 2, 2).validate().is_err());
        assert!(ProtocolParams::new(ProtocolId::P6, 2, 2).with_mac_width(3).validate().is_ok());
        assert!(ProtocolParams::new(ProtocolId::P2, 2, 0).validate().is_err());
        assert!(ProtocolParams::new(ProtocolId::P1, 8, 0).validate().is_err());
    }

    #[test]
    fn protocol_names_parse() {
        for p in ProtocolId::ALL {
            assert_eq!(p.name().parse::<ProtocolId>().unwrap(), p);
        }
        assert_eq!("nonint".parse::<ProtocolId>().unwrap(), ProtocolId::NonInteractive);
        assert!("p7".parse::<ProtocolId>().is_err());
    }
}
