//! Eve: channel interposition strategies.
//!
//! A strategy is consulted at every transmission through
//! [`AttackStrategy::intercept`], so protocol code never branches on the
//! attack kind except for impersonation, which replaces a whole party.
//!
//! Only the strategies listed here are exercised; statements about
//! detection in reports hold for these strategies and nothing broader.

mod passive;

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

pub use passive::{mim_full_impersonation, passive_snapshot, MessageSnapshots, MimOutcome, PairDistance, PassiveReport};

use crate::qstate::{CompositeState, Holder};
use crate::{Error, Result};

/// Set of 1-based rounds, bit `r − 1` for round `r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PassMask(pub u64);

impl PassMask {
    pub const ALL: PassMask = PassMask(u64::MAX);

    pub fn rounds(rounds: &[usize]) -> Self {
        PassMask(rounds.iter().fold(0, |m, &r| m | 1 << (r - 1)))
    }

    pub fn contains(&self, round: usize) -> bool {
        round >= 1 && round <= 64 && self.0 >> (round - 1) & 1 == 1
    }

    /// Number of masked rounds among `1..=rounds`.
    pub fn count_within(&self, rounds: usize) -> u32 {
        (1..=rounds).filter(|&r| self.contains(r)).count() as u32
    }

    pub fn fits(&self, rounds: usize) -> bool {
        *self == PassMask::ALL || rounds >= 64 || self.0 >> rounds == 0
    }
}

impl fmt::Display for PassMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if *self == PassMask::ALL {
            f.write_str("all")
        } else {
            write!(f, "{:x}", self.0)
        }
    }
}

impl FromStr for PassMask {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if s == "all" {
            return Ok(PassMask::ALL);
        }
        let digits = s.trim_start_matches("0x");
        u64::from_str_radix(digits, 16)
            .map(PassMask)
            .map_err(|e| Error::Parse(format!("pass mask `{s}`: {e}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum AttackStrategy {
    None,
    /// Snapshot every transmission; never touch the state.
    Passive,
    /// `Z^flip` on the message register at the masked rounds.
    Phase { flip: u64, passes: PassMask },
    /// Computational-basis measurement of every in-transit register at the masked rounds.
    MeasureResend { passes: PassMask },
    /// Eve impersonates parties. On P1 she runs the Bob role against Alice and
    /// the Alice role against Bob with `forged`; on keyed protocols she lacks
    /// the preshared functions and plays with guessed ones.
    MimFull { forged: u64 },
}

impl Default for AttackStrategy {
    fn default() -> Self {
        AttackStrategy::None
    }
}

impl AttackStrategy {
    pub fn forces_snapshots(&self) -> bool {
        matches!(self, AttackStrategy::Passive)
    }

    pub fn is_impersonation(&self) -> bool {
        matches!(self, AttackStrategy::MimFull { .. })
    }

    /// Channel hook run at each transmission while the registers are in transit.
    pub fn intercept<R: Rng + ?Sized>(
        &self,
        round: usize,
        state: &mut CompositeState,
        in_transit: &[&str],
        message_register: &str,
        rng: &mut R,
    ) -> Result<Vec<EveObservation>> {
        match *self {
            AttackStrategy::Phase { flip, passes } if passes.contains(round) => {
                phase_attack(state, message_register, flip)?;
                Ok(Vec::new())
            }
            AttackStrategy::MeasureResend { passes } if passes.contains(round) => {
                measure_resend(state, in_transit, rng).map(|outcomes| {
                    outcomes
                        .into_iter()
                        .map(|(register, outcome)| EveObservation {
                            round,
                            register,
                            outcome,
                        })
                        .collect()
                })
            }
            _ => Ok(Vec::new()),
        }
    }
}

/// One classical value Eve learned.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EveObservation {
    pub round: usize,
    pub register: String,
    pub outcome: u64,
}

/// `Z^flip` on an in-transit register.
pub fn phase_attack(state: &mut CompositeState, register: &str, flip: u64) -> Result<()> {
    let reg = state.register(register)?;
    if reg.holder != Holder::Channel {
        return Err(Error::InvalidConfig(format!("register `{register}` is not in transit")));
    }
    if reg.width < 64 && flip >> reg.width != 0 {
        return Err(Error::WidthMismatch {
            what: format!("phase flip on `{register}`"),
            expected: reg.width as u64,
            got: (64 - flip.leading_zeros()) as u64,
        });
    }
    state.apply_phase_flip(register, flip)
}

/// Measure each named register in the computational basis and pass it on.
pub fn measure_resend<R: Rng + ?Sized>(
    state: &mut CompositeState,
    registers: &[&str],
    rng: &mut R,
) -> Result<Vec<(String, u64)>> {
    registers
        .iter()
        .map(|r| Ok((r.to_string(), state.measure_register(r, rng)?)))
        .collect()
}

impl fmt::Display for AttackStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AttackStrategy::None => f.write_str("none"),
            AttackStrategy::Passive => f.write_str("passive"),
            AttackStrategy::Phase { flip, passes } => write!(f, "phase:x={flip:x},passes={passes}"),
            AttackStrategy::MeasureResend { passes } => write!(f, "measure:passes={passes}"),
            AttackStrategy::MimFull { forged } => write!(f, "mim:x={forged:x}"),
        }
    }
}

/// Parses `none`, `passive`, `phase:x=<hex>,passes=<mask>`,
/// `measure:passes=<mask>` and `mim[:x=<hex>]`.
impl FromStr for AttackStrategy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let (kind, args) = s.split_once(':').unwrap_or((s, ""));
        let mut x = None;
        let mut passes = None;
        for field in args.split(',').filter(|f| !f.is_empty()) {
            let (k, v) = field
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("attack field `{field}` lacks `=`")))?;
            match k {
                "x" => {
                    x = Some(
                        u64::from_str_radix(v.trim_start_matches("0x"), 16)
                            .map_err(|e| Error::Parse(format!("attack x `{v}`: {e}")))?,
                    )
                }
                "passes" => passes = Some(v.parse::<PassMask>()?),
                _ => return Err(Error::Parse(format!("unknown attack field `{k}`"))),
            }
        }
        let reject_extra = |ok_x: bool, ok_passes: bool| -> Result<()> {
            if (x.is_some() && !ok_x) || (passes.is_some() && !ok_passes) {
                return Err(Error::Parse(format!("unexpected field in attack `{s}`")));
            }
            Ok(())
        };
        match kind {
            "none" => reject_extra(false, false).map(|_| AttackStrategy::None),
            "passive" => reject_extra(false, false).map(|_| AttackStrategy::Passive),
            "phase" => Ok(AttackStrategy::Phase {
                flip: x.ok_or_else(|| Error::Parse("phase attack needs x=<hex>".into()))?,
                passes: passes.unwrap_or(PassMask::ALL),
            }),
            "measure" => {
                reject_extra(false, true)?;
                Ok(AttackStrategy::MeasureResend {
                    passes: passes.unwrap_or(PassMask::ALL),
                })
            }
            "mim" => {
                reject_extra(true, false)?;
                Ok(AttackStrategy::MimFull { forged: x.unwrap_or(0) })
            }
            other => Err(Error::Parse(format!("unknown attack `{other}`"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{Register, C64};
    use crate::rng;

    #[test]
    fn parse_attack_specs() {
        assert_eq!("none".parse::<AttackStrategy>().unwrap(), AttackStrategy::None);
        assert_eq!("passive".parse::<AttackStrategy>().unwrap(), AttackStrategy::Passive);
        assert_eq!(
            "phase:x=3,passes=7".parse::<AttackStrategy>().unwrap(),
            AttackStrategy::Phase {
                flip: 3,
                passes: PassMask(7)
            }
        );
        assert_eq!(
            "measure:passes=1".parse::<AttackStrategy>().unwrap(),
            AttackStrategy::MeasureResend { passes: PassMask(1) }
        );
        assert_eq!(
            "mim".parse::<AttackStrategy>().unwrap(),
            AttackStrategy::MimFull { forged: 0 }
        );
        assert_eq!(
            "mim:x=2".parse::<AttackStrategy>().unwrap(),
            AttackStrategy::MimFull { forged: 2 }
        );
        for bad in ["phase", "phase:passes=1", "bogus", "passive:x=1", "measure:y=2"] {
            assert!(bad.parse::<AttackStrategy>().is_err(), "{bad}");
        }
        for spec in ["phase:x=a,passes=all", "measure:passes=5", "mim:x=3", "passive", "none"] {
            let a: AttackStrategy = spec.parse().unwrap();
            assert_eq!(a.to_string().parse::<AttackStrategy>().unwrap(), a);
        }
    }

    #[test]
    fn pass_masks() {
        let m = PassMask::rounds(&[1, 3]);
        assert_eq!(m, PassMask(0b101));
        assert!(m.contains(1) && !m.contains(2) && m.contains(3));
        assert_eq!(m.count_within(3), 2);
        assert!(m.fits(3) && !m.fits(2));
        assert_eq!(PassMask::ALL.count_within(9), 9);
    }

    fn in_transit(width: u32, value: u64) -> CompositeState {
        let mut s = CompositeState::basis(vec![Register::new("R1", width, Holder::Alice)], &[value]).unwrap();
        s.apply_hadamard_layer("R1").unwrap();
        s.set_holder("R1", Holder::Channel).unwrap();
        s
    }

    #[test]
    fn zero_phase_is_a_no_op() {
        let mut s = in_transit(3, 5);
        let before = s.clone();
        phase_attack(&mut s, "R1", 0).unwrap();
        assert_eq!(s, before);
        assert!(phase_attack(&mut s, "R1", 8).is_err());
    }

    #[test]
    fn phase_needs_register_in_transit() {
        let mut s = in_transit(2, 0);
        s.set_holder("R1", Holder::Bob).unwrap();
        assert!(phase_attack(&mut s, "R1", 1).is_err());
    }

    #[test]
    fn measure_resend_on_basis_state_is_transparent() {
        let mut s = CompositeState::basis(vec![Register::new("R1", 3, Holder::Channel)], &[6]).unwrap();
        let before = s.clone();
        let out = measure_resend(&mut s, &["R1"], &mut rng::stream(1)).unwrap();
        assert_eq!(out, vec![("R1".to_string(), 6)]);
        assert_eq!(s, before);
        assert_eq!(s.amplitudes()[6], C64::new(1.0, 0.0));
    }
}
