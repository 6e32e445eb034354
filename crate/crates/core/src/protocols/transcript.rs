use std::fmt;

use serde::{Deserialize, Serialize};

use super::{KeyId, ProtocolParams};
use crate::adversary::{AttackStrategy, EveObservation};
use crate::qstate::{DensityMatrix, Holder};

/// Identifies one pad draw inside a run, e.g. stage 2, `r_B`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PadSlot {
    pub stage: usize,
    pub label: String,
}

impl PadSlot {
    pub fn new(stage: usize, label: impl Into<String>) -> Self {
        Self {
            stage,
            label: label.into(),
        }
    }
}

impl fmt::Display for PadSlot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "stage{}.{}", self.stage, self.label)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegisterInfo {
    pub name: String,
    pub width: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransmissionRecord {
    /// 1-based, global across stages.
    pub round: usize,
    pub stage: usize,
    pub from: Holder,
    pub to: Holder,
    pub registers: Vec<RegisterInfo>,
    /// Reduced state of the in-transit registers as emitted by the sender.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub snapshot: Option<DensityMatrix>,
    /// Pad masking the tag register in transit, if any.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub pad: Option<PadSlot>,
    /// Preshared function behind that tag; `None` when Eve tagged with a guess.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub key: Option<KeyId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub stage: usize,
    /// Last round transmitted before the measurement.
    pub after_round: usize,
    pub register: String,
    pub outcome: u64,
    pub owner: Holder,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Outcome {
    /// What Bob decoded (stage 1 for echo protocols; the payload bits for P6).
    pub bob_message: Option<u64>,
    /// Decoded value at the end of every stage, in order.
    pub stage_values: Vec<u64>,
    /// Value Alice decoded from the echo stage.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub alice_echo: Option<u64>,
    /// Alice's echo verdict (P3, P5, P6).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub alice_accepts: Option<bool>,
    /// Bob's stage-1 vs stage-3 consistency verdict (P3, P5).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub bob_accepts: Option<bool>,
    /// Bob's MAC verdict (P6).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub bob_mac_accepts: Option<bool>,
    /// What Eve decoded while impersonating Bob on P1.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub eve_message: Option<u64>,
}

impl Outcome {
    /// True when every verdict present accepts.
    pub fn all_accept(&self) -> bool {
        [self.alice_accepts, self.bob_accepts, self.bob_mac_accepts]
            .iter()
            .all(|v| v.unwrap_or(true))
    }

    /// True when some verdict present rejects.
    pub fn detected(&self) -> bool {
        !self.all_accept()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolTranscript {
    pub params: ProtocolParams,
    pub message: u64,
    pub seed: u64,
    pub trial: u64,
    pub attack: AttackStrategy,
    pub rounds: Vec<TransmissionRecord>,
    pub measurements: Vec<MeasurementRecord>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub eve_log: Vec<EveObservation>,
    pub outcome: Outcome,
}

impl ProtocolTranscript {
    pub fn round(&self, round: usize) -> Option<&TransmissionRecord> {
        self.rounds.iter().find(|r| r.round == round)
    }

    pub fn snapshot(&self, round: usize) -> Option<&DensityMatrix> {
        self.round(round).and_then(|r| r.snapshot.as_ref())
    }

    /// Snapshots of every round, in order.
    pub fn snapshots(&self) -> Vec<&DensityMatrix> {
        self.rounds.iter().filter_map(|r| r.snapshot.as_ref()).collect()
    }

    /// Pad values recovered by measurement, by owner.
    pub fn measured_pads(&self) -> Vec<&MeasurementRecord> {
        self.measurements.iter().filter(|m| m.register != "R1").collect()
    }

    /// Same transcript with every snapshot removed.
    pub fn without_snapshots(&self) -> Self {
        let mut t = self.clone();
        t.rounds.iter_mut().for_each(|r| r.snapshot = None);
        t
    }
}
