use std::time::{Duration, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use super::stats::{clopper_pearson, three_sigma_floor};
use super::{ExperimentConfig, KeyMode, CONFIDENCE};
use crate::adversary::AttackStrategy;
use crate::protocols::{PairDistance, ProtocolId, ProtocolTranscript};
use crate::Result;

pub const REPORT_FORMAT: &str = "nokey-report";
pub const REPORT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub message: u64,
    pub trial: u64,
    /// Index into the enumerated MAC keys, when enumerating.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mac_key: Option<usize>,
    pub bob: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_bob: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eve: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alice_accepts: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bob_accepts: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bob_mac_accepts: Option<bool>,
    pub detected: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transcript: Option<ProtocolTranscript>,
}

impl TrialRecord {
    pub(super) fn from_run(
        config: &ExperimentConfig,
        trial: u64,
        mac_key: Option<usize>,
        transcript: ProtocolTranscript,
    ) -> Self {
        let o = &transcript.outcome;
        Self {
            message: transcript.message,
            trial,
            mac_key,
            bob: o.bob_message,
            expected_bob: config.expected_bob(transcript.message),
            eve: o.eve_message,
            alice_accepts: o.alice_accepts,
            bob_accepts: o.bob_accepts,
            bob_mac_accepts: o.bob_mac_accepts,
            detected: o.detected(),
            transcript: Some(transcript),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub runs: u64,
    /// Runs where Bob's value equals the sent message.
    pub recovered: u64,
    pub recovery_rate: f64,
    /// Runs with a deterministic expected outcome, and how many met it.
    pub with_expectation: u64,
    pub matched_expectation: u64,
    /// Runs where an impersonating Eve decoded the sent message.
    pub eve_learned: u64,
}

impl Summary {
    pub(super) fn from_trials(trials: &[TrialRecord]) -> Self {
        let runs = trials.len() as u64;
        let count = |f: &dyn Fn(&TrialRecord) -> bool| trials.iter().filter(|t| f(t)).count() as u64;
        let recovered = count(&|t| t.bob == Some(t.message));
        Self {
            runs,
            recovered,
            recovery_rate: recovered as f64 / runs as f64,
            with_expectation: count(&|t| t.expected_bob.is_some()),
            matched_expectation: count(&|t| t.expected_bob.is_some() && t.bob == t.expected_bob),
            eve_learned: count(&|t| t.eve == Some(t.message)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundMixedness {
    pub round: usize,
    /// Largest `max|ρ − I/d|` over per-run snapshots.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub per_run_max_deviation: Option<f64>,
    /// Largest deviation over averaged views.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub averaged_max_deviation: Option<f64>,
}

/// Same-round trace distances between messages.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceTable {
    pub round: usize,
    /// Largest distance over all trials and pairs.
    pub max_distance: f64,
    /// Every pair, for trial 0.
    pub pairs: Vec<PairDistance>,
}

impl DistanceTable {
    pub(super) fn empty(round: usize) -> Self {
        Self {
            round,
            max_distance: 0.0,
            pairs: Vec::new(),
        }
    }

    pub(super) fn absorb(&mut self, trial: u64, pairs: Vec<PairDistance>) {
        for p in &pairs {
            self.max_distance = self.max_distance.max(p.distance);
        }
        if trial == 0 {
            self.pairs = pairs;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionStats {
    /// Which verdict counts as detection: `alice-echo` or `any`.
    pub verdict: String,
    pub runs: u64,
    pub detected: u64,
    pub rate: f64,
    pub confidence: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Minimum rate the attack model guarantees, when one applies.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub floor: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub floor_rule: Option<String>,
}

impl DetectionStats {
    pub(super) fn from_trials(config: &ExperimentConfig, trials: &[TrialRecord]) -> Option<Self> {
        let has_verdicts = matches!(config.protocol, ProtocolId::P3 | ProtocolId::P5 | ProtocolId::P6);
        if !has_verdicts || matches!(config.attack, AttackStrategy::None | AttackStrategy::Passive) {
            return None;
        }
        let runs = trials.len() as u64;
        let echo = matches!(config.protocol, ProtocolId::P3 | ProtocolId::P5);
        let (verdict, detected) = if echo && config.attack.is_impersonation() {
            ("alice-echo", trials.iter().filter(|t| t.alice_accepts == Some(false)).count())
        } else {
            ("any", trials.iter().filter(|t| t.detected).count())
        };
        let detected = detected as u64;
        let (floor, floor_rule) = match (config.protocol, config.attack) {
            (ProtocolId::P3 | ProtocolId::P5, AttackStrategy::MimFull { .. }) => {
                let p = 1.0 - 0.5f64.powi(config.n as i32);
                (
                    Some(three_sigma_floor(p, runs)),
                    Some(format!("1 - 2^-n - 3 sigma with n={}, {runs} runs", config.n)),
                )
            }
            (ProtocolId::P6, AttackStrategy::Phase { flip, passes })
                if config.keys == KeyMode::ExhaustiveMac
                    && flip != 0
                    && (passes.count_within(2) % 2 == 1
                        || (passes.count_within(4) - passes.count_within(2)) % 2 == 1) =>
            {
                (
                    Some(1.0 - 0.5f64.powi(config.t as i32 - 1)),
                    Some(format!("1 - 2^(1-t) with t={}", config.t)),
                )
            }
            _ => (None, None),
        };
        let (ci_low, ci_high) = clopper_pearson(detected, runs, CONFIDENCE);
        Some(Self {
            verdict: verdict.to_string(),
            runs,
            detected,
            rate: detected as f64 / runs as f64,
            confidence: CONFIDENCE,
            ci_low,
            ci_high,
            floor,
            floor_rule,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assertion {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Assertion {
    pub(super) fn new(name: &str, passed: bool, detail: String) -> Self {
        Self {
            name: name.to_string(),
            passed,
            detail,
        }
    }
}

/// Run-dependent facts kept out of the deterministic body.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub wall_clock_ms: f64,
    pub finished_unix: u64,
    pub crate_version: String,
}

impl Metadata {
    pub(super) fn now(elapsed: Duration) -> Self {
        Self {
            wall_clock_ms: elapsed.as_secs_f64() * 1e3,
            finished_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            crate_version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub format: String,
    pub format_version: u32,
    pub config: ExperimentConfig,
    pub rng: String,
    pub summary: Summary,
    pub mixedness: Vec<RoundMixedness>,
    pub distances: Vec<DistanceTable>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detection: Option<DetectionStats>,
    pub assertions: Vec<Assertion>,
    pub notes: Vec<String>,
    /// Present when the configuration keeps transcripts.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub trials: Vec<TrialRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<Metadata>,
}

impl ExperimentReport {
    pub fn passed(&self) -> bool {
        self.assertions.iter().all(|a| a.passed)
    }

    /// Pretty JSON of everything except [`Metadata`].
    pub fn body_json(&self) -> Result<String> {
        let mut body = self.clone();
        body.metadata = None;
        Ok(serde_json::to_string_pretty(&body)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}
