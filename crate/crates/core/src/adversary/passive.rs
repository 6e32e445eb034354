use serde::{Deserialize, Serialize};

use super::AttackStrategy;
pub use crate::protocols::views::PairDistance;
use crate::protocols::views::{eve_average_views, pairwise_distances};
use crate::protocols::{Averaging, ProtocolTranscript, RunContext};
use crate::qstate::DensityMatrix;
use crate::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MessageSnapshots {
    pub message: u64,
    /// One state per round, in order.
    pub rounds: Vec<DensityMatrix>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PassiveReport {
    pub averaging: Averaging,
    pub per_message: Vec<MessageSnapshots>,
    /// Same-round distances for every message pair.
    pub distances: Vec<PairDistance>,
}

impl PassiveReport {
    pub fn max_distance(&self) -> f64 {
        self.distances.iter().map(|d| d.distance).fold(0.0, f64::max)
    }
}

/// Record what Eve sees on every round for each message, without touching
/// the run. With [`Averaging::None`] the states are per-run snapshots.
pub fn passive_snapshot(ctx: &RunContext, messages: &[u64], averaging: Averaging) -> Result<PassiveReport> {
    let mut per_message = Vec::with_capacity(messages.len());
    for &x in messages {
        let c = ctx.clone().with_message(x);
        let rounds = match averaging {
            Averaging::None => c
                .with_attack(AttackStrategy::Passive)
                .execute()?
                .rounds
                .into_iter()
                .map(|r| r.snapshot.expect("passive forces snapshots"))
                .collect(),
            over => eve_average_views(&c, over)?.into_iter().map(|v| v.rho).collect(),
        };
        per_message.push(MessageSnapshots { message: x, rounds });
    }
    let mut distances = Vec::new();
    let rounds = per_message.first().map_or(0, |m| m.rounds.len());
    for r in 0..rounds {
        let states: Vec<_> = per_message.iter().map(|m| (m.message, &m.rounds[r])).collect();
        distances.extend(pairwise_distances(r + 1, &states)?);
    }
    Ok(PassiveReport {
        averaging,
        per_message,
        distances,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MimOutcome {
    /// What Eve learned; `None` when she only impersonated a sender.
    pub eve: Option<u64>,
    pub bob: Option<u64>,
    pub detected: bool,
    pub transcript: ProtocolTranscript,
}

/// Run `ctx` with Eve impersonating both ends and pushing `forged` to Bob.
pub fn mim_full_impersonation(ctx: &RunContext, forged: u64) -> Result<MimOutcome> {
    let transcript = ctx
        .clone()
        .with_attack(AttackStrategy::MimFull { forged })
        .execute()?;
    Ok(MimOutcome {
        eve: transcript.outcome.eve_message,
        bob: transcript.outcome.bob_message,
        detected: transcript.outcome.detected(),
        transcript,
    })
}
