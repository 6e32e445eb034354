//! Protocol state machines.
//!
//! Every run is a deterministic function of its [`RunContext`]: the seed
//! selects per-party ChaCha substreams for permutations and pads, and a
//! separate stream for Born-rule sampling. Pad values can be pinned through
//! [`RunContext::pad_overrides`], which is how the exact eavesdropper
//! averages in [`views`] are computed.

mod engine;
mod params;
mod transcript;
pub mod views;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use params::{KeyId, Keys, ProtocolId, ProtocolParams};
pub use transcript::{
    MeasurementRecord, Outcome, PadSlot, ProtocolTranscript, RegisterInfo, TransmissionRecord,
};
pub use views::{
    eve_average_view, eve_average_views, noninteractive_view, pairwise_distances, Averaging, EveView,
    NonInteractiveView, PairDistance,
};

use engine::{Participant, Session};

use crate::adversary::AttackStrategy;
use crate::auth::{mac_tag, mac_verify, Message};
use crate::oracles::{BooleanFunction, BooleanPermutation};
use crate::qstate::Holder;
use crate::rng::SeedTree;
use crate::{Error, Result};

/// Everything a run depends on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunContext {
    pub params: ProtocolParams,
    pub message: u64,
    pub keys: Option<Keys>,
    pub seed: u64,
    pub trial: u64,
    pub attack: AttackStrategy,
    /// Pinned pad values; all other draws still consume their streams.
    #[serde(skip_serializing_if = "BTreeMap::is_empty", default, with = "pad_map")]
    pub pad_overrides: BTreeMap<PadSlot, u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub fixed_f_a: Option<BooleanPermutation>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub fixed_f_b: Option<BooleanPermutation>,
}

impl RunContext {
    pub fn new(params: ProtocolParams, message: u64) -> Self {
        Self {
            params,
            message,
            keys: None,
            seed: 0,
            trial: 0,
            attack: AttackStrategy::None,
            pad_overrides: BTreeMap::new(),
            fixed_f_a: None,
            fixed_f_b: None,
        }
    }

    pub fn with_keys(mut self, keys: Keys) -> Self {
        self.keys = Some(keys);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_trial(mut self, trial: u64) -> Self {
        self.trial = trial;
        self
    }

    pub fn with_attack(mut self, attack: AttackStrategy) -> Self {
        self.attack = attack;
        self
    }

    pub fn with_message(mut self, message: u64) -> Self {
        self.message = message;
        self
    }

    pub fn seed_tree(&self) -> SeedTree {
        SeedTree::new(self.seed)
    }

    pub fn validate(&self) -> Result<()> {
        let p = &self.params;
        p.validate()?;
        let w = p.n;
        if self.message >> w != 0 {
            return Err(Error::ValueOutOfRange {
                what: "message".into(),
                value: self.message,
                width: w,
            });
        }
        if p.protocol.is_keyed() {
            self.keys
                .as_ref()
                .ok_or_else(|| Error::InvalidConfig(format!("protocol {} needs preshared keys", p.protocol)))?
                .check(p)?;
        }
        match self.attack {
            AttackStrategy::Phase { flip, passes } => {
                let width = p.register_width();
                if flip >> width != 0 {
                    return Err(Error::WidthMismatch {
                        what: "phase flip vs message register width".into(),
                        expected: width as u64,
                        got: (64 - flip.leading_zeros()) as u64,
                    });
                }
                check_mask(passes, p.protocol)?;
            }
            AttackStrategy::MeasureResend { passes } => check_mask(passes, p.protocol)?,
            AttackStrategy::MimFull { forged } => {
                if forged >> w != 0 {
                    return Err(Error::ValueOutOfRange {
                        what: "forged message".into(),
                        value: forged,
                        width: w,
                    });
                }
            }
            AttackStrategy::None | AttackStrategy::Passive => {}
        }
        Ok(())
    }

    pub fn execute(&self) -> Result<ProtocolTranscript> {
        execute(self)
    }
}

fn check_mask(mask: crate::adversary::PassMask, protocol: ProtocolId) -> Result<()> {
    if !mask.fits(protocol.rounds()) {
        return Err(Error::InvalidConfig(format!(
            "pass mask {mask} names rounds beyond the {} rounds of {protocol}",
            protocol.rounds()
        )));
    }
    Ok(())
}

fn honest<'k>(keys: &'k Keys) -> (Participant<'k>, Participant<'k>) {
    let alice = Participant {
        who: Holder::Alice,
        own: &keys.s_a,
        own_id: Some(KeyId::SA),
        peer: &keys.s_b,
    };
    let bob = Participant {
        who: Holder::Bob,
        own: &keys.s_b,
        own_id: Some(KeyId::SB),
        peer: &keys.s_a,
    };
    (alice, bob)
}

fn eve<'k>(guess: &'k (BooleanFunction, BooleanFunction)) -> Participant<'k> {
    Participant {
        who: Holder::Eve,
        own: &guess.0,
        own_id: None,
        peer: &guess.1,
    }
}

/// Run one protocol instance.
pub fn execute(ctx: &RunContext) -> Result<ProtocolTranscript> {
    ctx.validate()?;
    let mut session = Session::new(ctx);
    let p = &ctx.params;
    let (n, l, x) = (p.n, p.l, ctx.message);
    let mim = match ctx.attack {
        AttackStrategy::MimFull { forged } => Some(forged),
        _ => None,
    };
    let mut out = Outcome::default();

    match p.protocol {
        ProtocolId::P1 => match mim {
            None => {
                let v = session.basic_stage(Holder::Alice, Holder::Bob, x, n)?;
                out.stage_values.push(v);
                out.bob_message = Some(v);
            }
            Some(forged) => {
                let e = session.basic_stage(Holder::Alice, Holder::Eve, x, n)?;
                let b = session.basic_stage(Holder::Eve, Holder::Bob, forged, n)?;
                out.stage_values = vec![e, b];
                out.eve_message = Some(e);
                out.bob_message = Some(b);
            }
        },
        ProtocolId::P2 | ProtocolId::P4 | ProtocolId::TwoRound | ProtocolId::NonInteractive => {
            let keys = ctx.keys.as_ref().expect("validated");
            let (alice, bob) = honest(keys);
            let guess;
            let (sender, msg) = match mim {
                None => (alice, x),
                Some(forged) => {
                    guess = session.guess_keys(n, l)?;
                    (eve(&guess), forged)
                }
            };
            let v = match p.protocol {
                ProtocolId::P2 => session.keyed_three_pass(&sender, &bob, msg, n, l)?,
                ProtocolId::NonInteractive => session.one_pass(&sender, &bob, msg, n, l)?,
                _ => session.keyed_two_pass(&sender, &bob, msg, n, l)?,
            };
            out.stage_values.push(v);
            out.bob_message = Some(v);
        }
        ProtocolId::P3 | ProtocolId::P5 => {
            let keys = ctx.keys.as_ref().expect("validated");
            let (alice, bob) = honest(keys);
            let three_pass = p.protocol == ProtocolId::P3;
            let stage = |s: &mut Session<'_>, snd: &Participant<'_>, rcv: &Participant<'_>, v: u64| {
                if three_pass {
                    s.keyed_three_pass(snd, rcv, v, n, l)
                } else {
                    s.keyed_two_pass(snd, rcv, v, n, l)
                }
            };
            if mim.is_some() {
                // Eve reads R1 on the first Alice→Bob pass; in P5 Bob initiates,
                // so that pass is round 2.
                session.tap_round = Some(if three_pass { 1 } else { 2 });
            }
            let b1 = stage(&mut session, &alice, &bob, x)?;
            let a2 = match mim {
                None => stage(&mut session, &bob, &alice, b1)?,
                Some(_) => {
                    let guess_value = session.eve_log.last().map(|o| o.outcome).unwrap_or(0);
                    let guess = session.guess_keys(n, l)?;
                    stage(&mut session, &eve(&guess), &alice, guess_value)?
                }
            };
            let b3 = stage(&mut session, &alice, &bob, x)?;
            out.stage_values = vec![b1, a2, b3];
            out.bob_message = Some(b1);
            out.alice_echo = Some(a2);
            out.alice_accepts = Some(a2 == x);
            out.bob_accepts = Some(b1 == b3);
        }
        ProtocolId::P6 => {
            let keys = ctx.keys.as_ref().expect("validated");
            let mac_key = keys.mac.expect("validated");
            let (alice, bob) = honest(keys);
            let t = p.t;
            let w = n + t;
            let tag_mask = (1u64 << t) - 1;
            let tag = mac_tag(&mac_key, &Message::new(x, n)?)? as u64;
            if mim.is_some() {
                session.tap_round = Some(2);
            }
            let y = session.keyed_two_pass(&alice, &bob, (x << t) | tag, w, l)?;
            let (x_rec, tag_rec) = (y >> t, y & tag_mask);
            let mac_ok = mac_verify(&mac_key, &Message::new(x_rec, n)?, tag_rec as u32)?;
            let echo = match mim {
                None => session.keyed_two_pass(&bob, &alice, tag_rec, w, l)?,
                Some(_) => {
                    let guess_value = session.eve_log.last().map(|o| o.outcome & tag_mask).unwrap_or(0);
                    let guess = session.guess_keys(w, l)?;
                    session.keyed_two_pass(&eve(&guess), &alice, guess_value, w, l)?
                }
            };
            out.stage_values = vec![y, echo];
            out.bob_message = Some(x_rec);
            out.bob_mac_accepts = Some(mac_ok);
            out.alice_echo = Some(echo);
            out.alice_accepts = Some(echo == tag);
        }
    }

    Ok(ProtocolTranscript {
        params: ctx.params.clone(),
        message: ctx.message,
        seed: ctx.seed,
        trial: ctx.trial,
        attack: ctx.attack,
        rounds: session.rounds,
        measurements: session.measurements,
        eve_log: session.eve_log,
        outcome: out,
    })
}

fn snapshot_params(protocol: ProtocolId, n: u32, l: u32) -> ProtocolParams {
    ProtocolParams::new(protocol, n, l).with_snapshots(true)
}

pub fn run_protocol1(x: u64, n: u32, seed: u64, attack: AttackStrategy) -> Result<ProtocolTranscript> {
    RunContext::new(snapshot_params(ProtocolId::P1, n, 0), x)
        .with_seed(seed)
        .with_attack(attack)
        .execute()
}

fn run_keyed(
    protocol: ProtocolId,
    x: u64,
    n: u32,
    l: u32,
    keys: &Keys,
    seed: u64,
    attack: AttackStrategy,
) -> Result<ProtocolTranscript> {
    RunContext::new(snapshot_params(protocol, n, l), x)
        .with_keys(keys.clone())
        .with_seed(seed)
        .with_attack(attack)
        .execute()
}

pub fn run_protocol2(x: u64, n: u32, l: u32, keys: &Keys, seed: u64, attack: AttackStrategy) -> Result<ProtocolTranscript> {
    run_keyed(ProtocolId::P2, x, n, l, keys, seed, attack)
}

pub fn run_protocol3(x: u64, n: u32, l: u32, keys: &Keys, seed: u64, attack: AttackStrategy) -> Result<ProtocolTranscript> {
    run_keyed(ProtocolId::P3, x, n, l, keys, seed, attack)
}

pub fn run_protocol4(x: u64, n: u32, l: u32, keys: &Keys, seed: u64, attack: AttackStrategy) -> Result<ProtocolTranscript> {
    run_keyed(ProtocolId::P4, x, n, l, keys, seed, attack)
}

pub fn run_protocol5(x: u64, n: u32, l: u32, keys: &Keys, seed: u64, attack: AttackStrategy) -> Result<ProtocolTranscript> {
    run_keyed(ProtocolId::P5, x, n, l, keys, seed, attack)
}

pub fn run_noninteractive(x: u64, n: u32, l: u32, keys: &Keys, seed: u64, attack: AttackStrategy) -> Result<ProtocolTranscript> {
    run_keyed(ProtocolId::NonInteractive, x, n, l, keys, seed, attack)
}

/// `keys` must carry a MAC key of width `t`.
pub fn run_protocol6(
    x: u64,
    n: u32,
    l: u32,
    t: u32,
    keys: &Keys,
    seed: u64,
    attack: AttackStrategy,
) -> Result<ProtocolTranscript> {
    RunContext::new(snapshot_params(ProtocolId::P6, n, l).with_mac_width(t), x)
        .with_keys(keys.clone())
        .with_seed(seed)
        .with_attack(attack)
        .execute()
}

mod pad_map {
    //! Pad overrides as a list of `(slot, value)` pairs; JSON maps need string keys.
    use std::collections::BTreeMap;

    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use super::PadSlot;

    pub fn serialize<S: Serializer>(map: &BTreeMap<PadSlot, u64>, s: S) -> Result<S::Ok, S::Error> {
        map.iter().collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<PadSlot, u64>, D::Error> {
        Ok(Vec::<(PadSlot, u64)>::deserialize(d)?.into_iter().collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    fn keys(protocol: ProtocolId, n: u32, l: u32, t: u32, seed: u64) -> Keys {
        let params = ProtocolParams::new(protocol, n, l).with_mac_width(t);
        Keys::sample(&params, &mut rng::stream(seed)).unwrap()
    }

    #[test]
    fn p1_recovers_and_channel_is_maximally_mixed() {
        let tr = run_protocol1(5, 3, 42, AttackStrategy::None).unwrap();
        assert_eq!(tr.outcome.bob_message, Some(5));
        assert_eq!(tr.rounds.len(), 3);
        for rho in tr.snapshots() {
            assert!(rho.mixedness(1e-10).is_maximally_mixed);
        }
        assert_eq!(run_protocol1(0, 1, 1, AttackStrategy::None).unwrap().outcome.bob_message, Some(0));
    }

    #[test]
    fn p2_round_one_snapshot_is_the_graph_of_the_tag() {
        let k = keys(ProtocolId::P2, 2, 2, 0, 3);
        let tr = run_protocol2(3, 2, 2, &k, 9, AttackStrategy::None).unwrap();
        assert_eq!(tr.outcome.bob_message, Some(3));
        let rho = tr.snapshot(1).unwrap();
        // R1 ⊗ R3 reduced state: diag with 1/4 at (m, s_A(m) ⊕ r_A).
        let r_a = tr.measurements[0].outcome;
        assert_eq!(tr.measurements[0].owner, Holder::Bob);
        for i in 0..16 {
            for j in 0..16 {
                let (m, tag) = (i >> 2, i & 3);
                let expected = if i == j && tag as u64 == k.s_a.apply(m as u64) ^ r_a { 0.25 } else { 0.0 };
                assert!((rho.get(i, j).re - expected).abs() < 1e-12 && rho.get(i, j).im.abs() < 1e-12);
            }
        }
        let owners: Vec<_> = tr.measured_pads().iter().map(|m| m.owner).collect();
        assert_eq!(owners, vec![Holder::Bob, Holder::Alice, Holder::Bob]);
    }

    #[test]
    fn keyed_protocols_recover_small_cases() {
        let k1 = keys(ProtocolId::P2, 1, 1, 0, 5);
        assert_eq!(run_protocol2(0, 1, 1, &k1, 1, AttackStrategy::None).unwrap().outcome.bob_message, Some(0));
        assert_eq!(run_protocol4(1, 1, 1, &k1, 1, AttackStrategy::None).unwrap().outcome.bob_message, Some(1));
        let k2 = keys(ProtocolId::P4, 2, 2, 0, 5);
        let tr = run_protocol4(2, 2, 2, &k2, 1, AttackStrategy::None).unwrap();
        assert_eq!(tr.outcome.bob_message, Some(2));
        assert_eq!(tr.rounds.len(), 2);
        assert_eq!(tr.rounds[0].from, Holder::Bob);
    }

    #[test]
    fn echo_protocols_accept_honest_runs() {
        let k = keys(ProtocolId::P3, 2, 2, 0, 8);
        for tr in [
            run_protocol3(1, 2, 2, &k, 4, AttackStrategy::None).unwrap(),
            run_protocol5(1, 2, 2, &k, 4, AttackStrategy::None).unwrap(),
        ] {
            assert_eq!(tr.outcome.bob_message, Some(1));
            assert_eq!(tr.outcome.alice_accepts, Some(true));
            assert_eq!(tr.outcome.bob_accepts, Some(true));
        }
    }

    #[test]
    fn p6_honest_run() {
        let k = keys(ProtocolId::P6, 2, 1, 3, 2);
        let tr = run_protocol6(2, 2, 1, 3, &k, 6, AttackStrategy::None).unwrap();
        assert_eq!(tr.rounds.len(), 4);
        assert_eq!(tr.outcome.bob_message, Some(2));
        assert_eq!(tr.outcome.bob_mac_accepts, Some(true));
        assert_eq!(tr.outcome.alice_accepts, Some(true));
    }

    #[test]
    fn validation_errors() {
        let p = ProtocolParams::new(ProtocolId::P2, 2, 2);
        assert!(RunContext::new(p.clone(), 1).execute().is_err());
        let k = keys(ProtocolId::P2, 2, 2, 0, 1);
        assert!(RunContext::new(p.clone(), 4).with_keys(k.clone()).execute().is_err());
        let phase = AttackStrategy::Phase {
            flip: 4,
            passes: crate::adversary::PassMask::ALL,
        };
        assert!(RunContext::new(p.clone(), 1).with_keys(k.clone()).with_attack(phase).execute().is_err());
        let wide = keys(ProtocolId::P2, 3, 2, 0, 1);
        assert!(RunContext::new(p, 1).with_keys(wide).execute().is_err());
    }

    #[test]
    fn context_round_trips_through_json() {
        let k = keys(ProtocolId::P2, 2, 2, 0, 1);
        let mut ctx = RunContext::new(ProtocolParams::new(ProtocolId::P2, 2, 2), 3).with_keys(k);
        ctx.pad_overrides.insert(PadSlot::new(1, "r_A"), 2);
        let json = serde_json::to_string(&ctx).unwrap();
        assert_eq!(serde_json::from_str::<RunContext>(&json).unwrap(), ctx);
    }
}
