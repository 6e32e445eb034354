//! Experiments: configuration, execution, reports and the command line.
//!
//! An experiment runs `trials` trials for every message in its message set.
//! Trial `j` uses substream `j` of the experiment seed for every party and
//! for the preshared keys, so all messages of a trial share keys and
//! permutations and their channel views can be compared directly.

pub mod cli;
mod report;
mod stats;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use report::{
    Assertion, DetectionStats, DistanceTable, ExperimentReport, Metadata, RoundMixedness, Summary,
    TrialRecord, REPORT_FORMAT, REPORT_VERSION,
};
pub use stats::{clopper_pearson, three_sigma_floor};

use crate::adversary::AttackStrategy;
use crate::auth::{enumerate_keys, MacKey};
use crate::oracles::{BooleanFunction, BooleanPermutation, DEFAULT_ENUM_LIMIT};
use crate::protocols::{
    eve_average_views, pairwise_distances, Averaging, Keys, ProtocolId, ProtocolParams, ProtocolTranscript,
    RunContext,
};
use crate::qstate::{DensityMatrix, DEFAULT_QUBIT_CAP, DENSITY_TOL, SCALAR_TOL};
use crate::rng::{Role, SeedTree};
use crate::{Error, Result};

/// Confidence level of every reported binomial interval.
pub const CONFIDENCE: f64 = 0.999;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MessageSet {
    /// Every `n`-bit message.
    All,
    List(Vec<u64>),
}

impl MessageSet {
    pub fn values(&self, n: u32) -> Vec<u64> {
        match self {
            MessageSet::All => (0..1u64 << n).collect(),
            MessageSet::List(v) => v.clone(),
        }
    }
}

/// How preshared keys are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KeyMode {
    /// Fresh keys for every trial.
    #[default]
    Sampled,
    /// One set of keys reused by every trial.
    Fixed,
    /// Fresh authentication functions per trial, and every MAC key (P6).
    ExhaustiveMac,
}

impl fmt::Display for KeyMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            KeyMode::Sampled => "sampled",
            KeyMode::Fixed => "fixed",
            KeyMode::ExhaustiveMac => "exhaustive-mac",
        })
    }
}

impl FromStr for KeyMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sampled" => Ok(KeyMode::Sampled),
            "fixed" => Ok(KeyMode::Fixed),
            "exhaustive-mac" | "exhaustive" => Ok(KeyMode::ExhaustiveMac),
            other => Err(Error::Parse(format!("unknown key mode `{other}`"))),
        }
    }
}

fn default_trials() -> u64 {
    1
}
fn default_cap() -> u32 {
    DEFAULT_QUBIT_CAP
}
fn default_limit() -> u64 {
    DEFAULT_ENUM_LIMIT
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub name: String,
    pub protocol: ProtocolId,
    pub n: u32,
    #[serde(default)]
    pub l: u32,
    #[serde(default)]
    pub t: u32,
    pub messages: MessageSet,
    pub seed: u64,
    /// Trials per message.
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[serde(default, with = "attack_text")]
    pub attack: AttackStrategy,
    #[serde(default)]
    pub snapshots: bool,
    #[serde(default)]
    pub average: Averaging,
    #[serde(default)]
    pub keys: KeyMode,
    #[serde(default = "default_cap")]
    pub qubit_cap: u32,
    #[serde(default = "default_limit")]
    pub enum_limit: u64,
    /// Embed every transcript in the report.
    #[serde(default)]
    pub keep_transcripts: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f_a: Option<BooleanPermutation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f_b: Option<BooleanPermutation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s_a: Option<BooleanFunction>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s_b: Option<BooleanFunction>,
}

mod attack_text {
    //! Attacks are stored in their command-line spelling.
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::adversary::AttackStrategy;

    pub fn serialize<S: Serializer>(a: &AttackStrategy, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(a)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<AttackStrategy, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

impl ExperimentConfig {
    pub fn new(protocol: ProtocolId, n: u32, l: u32) -> Self {
        Self {
            name: String::new(),
            protocol,
            n,
            l,
            t: 0,
            messages: MessageSet::All,
            seed: 0,
            trials: 1,
            attack: AttackStrategy::None,
            snapshots: false,
            average: Averaging::None,
            keys: KeyMode::Sampled,
            qubit_cap: DEFAULT_QUBIT_CAP,
            enum_limit: DEFAULT_ENUM_LIMIT,
            keep_transcripts: false,
            f_a: None,
            f_b: None,
            s_a: None,
            s_b: None,
        }
    }

    pub fn params(&self) -> ProtocolParams {
        let mut p = ProtocolParams::new(self.protocol, self.n, self.l)
            .with_mac_width(self.t)
            .with_snapshots(self.snapshots)
            .with_qubit_cap(self.qubit_cap);
        p.enum_limit = self.enum_limit;
        p
    }

    /// Reject anything that would fail mid-experiment.
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trial count must be at least 1".into()));
        }
        let params = self.params();
        params.validate()?;
        let messages = self.messages.values(self.n);
        if messages.is_empty() {
            return Err(Error::InvalidConfig("message set is empty".into()));
        }
        if self.keys == KeyMode::ExhaustiveMac && self.protocol != ProtocolId::P6 {
            return Err(Error::InvalidConfig("exhaustive MAC keys apply to p6 only".into()));
        }
        if self.average != Averaging::None && !self.protocol.is_keyed() {
            return Err(Error::InvalidConfig(format!(
                "{} has no pads to average over",
                self.protocol
            )));
        }
        for (name, p) in [("f_A", &self.f_a), ("f_B", &self.f_b)] {
            if let Some(p) = p {
                if p.width() != params.register_width() {
                    return Err(Error::WidthMismatch {
                        what: format!("{name} table width"),
                        expected: params.register_width() as u64,
                        got: p.width() as u64,
                    });
                }
            }
        }
        // Context validation covers message range, key widths and the attack.
        for &x in &messages {
            let mut ctx = RunContext::new(params.clone(), x).with_attack(self.attack);
            if self.protocol.is_keyed() {
                ctx.keys = Some(self.keys_for(0)?.remove(0));
            }
            ctx.validate()?;
        }
        Ok(())
    }

    /// Key sets used by trial `trial`; more than one only for exhaustive MAC keys.
    pub fn keys_for(&self, trial: u64) -> Result<Vec<Keys>> {
        if !self.protocol.is_keyed() {
            return Ok(Vec::new());
        }
        let tree = SeedTree::new(self.seed);
        let stream = if self.keys == KeyMode::Fixed { 0 } else { trial };
        let mut keys = Keys::sample(&self.params(), &mut tree.stream(stream, Role::Keys))?;
        if let Some(f) = &self.s_a {
            keys.s_a = f.clone();
        }
        if let Some(f) = &self.s_b {
            keys.s_b = f.clone();
        }
        if self.keys == KeyMode::ExhaustiveMac {
            let all: Vec<MacKey> = enumerate_keys(self.t)?.collect();
            return Ok(all
                .into_iter()
                .map(|k| Keys {
                    mac: Some(k),
                    ..keys.clone()
                })
                .collect());
        }
        Ok(vec![keys])
    }

    fn context(&self, x: u64, trial: u64, keys: Option<Keys>) -> RunContext {
        let mut ctx = RunContext::new(self.params(), x)
            .with_seed(self.seed)
            .with_trial(trial)
            .with_attack(self.attack);
        ctx.keys = keys;
        ctx.fixed_f_a = self.f_a.clone();
        ctx.fixed_f_b = self.f_b.clone();
        ctx
    }

    /// Bob's value when the outcome is deterministic under the configured attack.
    pub fn expected_bob(&self, x: u64) -> Option<u64> {
        match (self.attack, self.protocol) {
            (AttackStrategy::None | AttackStrategy::Passive, _) => Some(x),
            (AttackStrategy::Phase { flip, passes }, ProtocolId::P1) => {
                Some(if passes.count_within(3) % 2 == 1 { x ^ flip } else { x })
            }
            (AttackStrategy::MimFull { forged }, ProtocolId::P1) => Some(forged),
            _ => None,
        }
    }

    fn honest(&self) -> bool {
        matches!(self.attack, AttackStrategy::None | AttackStrategy::Passive)
    }
}

/// Run every trial and assemble the report.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let started = std::time::Instant::now();
    let messages = config.messages.values(config.n);
    let rounds = config.protocol.rounds();
    let mut trials = Vec::new();
    let mut snap_dev = vec![0.0f64; rounds];
    let mut view_dev = vec![0.0f64; rounds];
    let mut tables: Vec<DistanceTable> = (1..=rounds).map(DistanceTable::empty).collect();
    let record_states = config.snapshots || config.average != Averaging::None;

    for j in 0..config.trials {
        let key_sets = config.keys_for(j)?;
        let key_sets: Vec<Option<Keys>> = if key_sets.is_empty() {
            vec![None]
        } else {
            key_sets.into_iter().map(Some).collect()
        };
        // Per-round states of this trial for the first key set, by message.
        let mut states: Vec<Vec<(u64, DensityMatrix)>> = vec![Vec::new(); rounds];
        for &x in &messages {
            for (ki, keys) in key_sets.iter().enumerate() {
                let ctx = config.context(x, j, keys.clone());
                let transcript = ctx.execute()?;
                for rec in &transcript.rounds {
                    if let Some(rho) = &rec.snapshot {
                        let d = rho.mixedness(DENSITY_TOL).deviation;
                        snap_dev[rec.round - 1] = snap_dev[rec.round - 1].max(d);
                        if ki == 0 && config.average == Averaging::None {
                            states[rec.round - 1].push((x, rho.clone()));
                        }
                    }
                }
                if ki == 0 && config.average != Averaging::None {
                    for view in eve_average_views(&ctx, config.average)? {
                        let r = view.round - 1;
                        view_dev[r] = view_dev[r].max(view.rho.mixedness(DENSITY_TOL).deviation);
                        states[r].push((x, view.rho));
                    }
                }
                trials.push(TrialRecord::from_run(
                    config,
                    j,
                    keys.as_ref().filter(|_| key_sets.len() > 1).map(|_| ki),
                    transcript,
                ));
            }
        }
        if record_states {
            for (r, st) in states.iter().enumerate() {
                let refs: Vec<_> = st.iter().map(|(x, rho)| (*x, rho)).collect();
                let pairs = pairwise_distances(r + 1, &refs)?;
                tables[r].absorb(j, pairs);
            }
        }
    }

    let mixedness: Vec<RoundMixedness> = (0..rounds)
        .filter(|_| record_states)
        .map(|r| RoundMixedness {
            round: r + 1,
            per_run_max_deviation: config.snapshots.then_some(snap_dev[r]),
            averaged_max_deviation: (config.average != Averaging::None).then_some(view_dev[r]),
        })
        .collect();
    let distances = if record_states && messages.len() > 1 { tables } else { Vec::new() };
    let summary = Summary::from_trials(&trials);
    let detection = DetectionStats::from_trials(config, &trials);
    let assertions = assertions(config, &summary, &mixedness, &distances, detection.as_ref());
    // Per-trial records are bulky; reports carry them only on request.
    let kept = if config.keep_transcripts { trials } else { Vec::new() };
    Ok(ExperimentReport {
        format: REPORT_FORMAT.to_string(),
        format_version: REPORT_VERSION,
        config: config.clone(),
        rng: crate::rng::RNG_ALGORITHM.to_string(),
        summary,
        mixedness,
        distances,
        detection,
        assertions,
        notes: notes(config),
        trials: kept,
        metadata: Some(Metadata::now(started.elapsed())),
    })
}

fn assertions(
    config: &ExperimentConfig,
    summary: &Summary,
    mixedness: &[RoundMixedness],
    distances: &[DistanceTable],
    detection: Option<&DetectionStats>,
) -> Vec<Assertion> {
    let mut out = Vec::new();
    if summary.with_expectation > 0 {
        out.push(Assertion::new(
            "bob-recovers-expected-value",
            summary.matched_expectation == summary.with_expectation,
            format!("{}/{} runs", summary.matched_expectation, summary.with_expectation),
        ));
    }
    if let AttackStrategy::MimFull { .. } = config.attack {
        if config.protocol == ProtocolId::P1 {
            out.push(Assertion::new(
                "eve-learns-message",
                summary.eve_learned == summary.runs,
                format!("{}/{} runs", summary.eve_learned, summary.runs),
            ));
        }
    }
    if config.honest() {
        if config.protocol == ProtocolId::P1 {
            let worst = mixedness.iter().filter_map(|m| m.per_run_max_deviation).fold(0.0, f64::max);
            if config.snapshots {
                out.push(Assertion::new(
                    "per-run-snapshots-maximally-mixed",
                    worst < DENSITY_TOL,
                    format!("max deviation {worst:.3e} < {DENSITY_TOL:e}"),
                ));
            }
        }
        let pad_averaged = config.average != Averaging::None
            && !matches!(config.protocol, ProtocolId::P1 | ProtocolId::NonInteractive);
        if pad_averaged {
            let worst = mixedness.iter().filter_map(|m| m.averaged_max_deviation).fold(0.0, f64::max);
            out.push(Assertion::new(
                "averaged-views-maximally-mixed",
                worst < SCALAR_TOL,
                format!("max deviation {worst:.3e} < {SCALAR_TOL:e}"),
            ));
        }
        if !distances.is_empty() && (pad_averaged || (config.protocol == ProtocolId::P1 && config.snapshots)) {
            let worst = distances.iter().map(|d| d.max_distance).fold(0.0, f64::max);
            out.push(Assertion::new(
                "messages-indistinguishable",
                worst < SCALAR_TOL,
                format!("max trace distance {worst:.3e} < {SCALAR_TOL:e}"),
            ));
        }
    }
    if let Some(d) = detection {
        if let Some(floor) = d.floor {
            out.push(Assertion::new(
                "detection-rate-floor",
                d.rate >= floor,
                format!("{} rate {:.4} >= {floor:.4}", d.verdict, d.rate),
            ));
        }
    }
    out
}

fn notes(config: &ExperimentConfig) -> Vec<String> {
    let mut notes = Vec::new();
    if config.protocol.is_keyed() {
        notes.push("authentication functions s_A, s_B are drawn uniformly over all functions".into());
    }
    if config.protocol == ProtocolId::P6 {
        notes.push("MAC key k is independent of s_A, s_B and is used for one message only".into());
    }
    if !config.honest() {
        notes.push(format!(
            "detection statements cover the `{}` strategy only, not all eavesdroppers",
            config.attack
        ));
    }
    if matches!(config.protocol, ProtocolId::P2 | ProtocolId::P3) {
        notes.push("measured pads are logged but never checked".into());
    }
    if config.protocol == ProtocolId::NonInteractive && config.average != Averaging::None {
        notes.push("single-pass distances are exploratory, not a security certificate".into());
    }
    notes
}

/// Re-run the embedded configuration and compare report bodies byte for byte.
pub fn verify_report(report: &ExperimentReport) -> Result<bool> {
    let rerun = run_experiment(&report.config)?;
    Ok(rerun.body_json()? == report.body_json()?)
}

/// Convenience for callers that only need the transcript list.
pub fn transcripts(report: &ExperimentReport) -> Vec<&ProtocolTranscript> {
    report.trials.iter().filter_map(|t| t.transcript.as_ref()).collect()
}
