//! Eavesdropper views: channel snapshots averaged over the randomness Eve lacks.
//!
//! A view of round `r` re-executes the run with the pad of that
//! transmission pinned to each of its `2^l` values (and, optionally, the
//! preshared function that tagged it replaced by each of the `2^(l·2^w)`
//! functions), keeping every other random draw fixed, and averages the
//! resulting snapshots with uniform weights.

use serde::{Deserialize, Serialize};

use super::{Keys, ProtocolId, ProtocolParams, RunContext};
use crate::oracles::{check_limit, enumerate_functions, function_count_log2, BooleanFunction};
use crate::qstate::{trace_distance, DensityMatrix};
use crate::rng;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Averaging {
    /// The per-run snapshot.
    #[default]
    None,
    /// Average over the pad of the transmission.
    Pads,
    /// Average over the pad and the preshared function behind the tag.
    PadsAndKeys,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EveView {
    pub round: usize,
    pub rho: DensityMatrix,
    /// Names of the averaged variables, e.g. `stage1.r_A`, `s_A`.
    pub averaged_over: Vec<String>,
    /// Number of runs in the mixture.
    pub runs: u64,
}

/// Trace distance between two views of the same round.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairDistance {
    pub round: usize,
    /// Message values, or key indices when comparing keys.
    pub left: u64,
    pub right: u64,
    pub distance: f64,
}

fn snapshot_of(ctx: &RunContext, round: usize) -> Result<DensityMatrix> {
    let tr = ctx.execute()?;
    tr.snapshot(round)
        .cloned()
        .ok_or_else(|| Error::InvalidConfig(format!("run has no round {round} (it has {})", tr.rounds.len())))
}

/// Exact mixture of round-`round` snapshots over the variables selected by `over`.
pub fn eve_average_view(ctx: &RunContext, round: usize, over: Averaging) -> Result<EveView> {
    let mut base = ctx.clone();
    base.params.snapshots = true;
    let probe = base.execute()?;
    let rec = probe.round(round).ok_or_else(|| {
        Error::InvalidConfig(format!("run has no round {round} (it has {})", probe.rounds.len()))
    })?;
    if over == Averaging::None {
        return Ok(EveView {
            round,
            rho: rec.snapshot.clone().expect("snapshots enabled"),
            averaged_over: Vec::new(),
            runs: 1,
        });
    }

    let l = ctx.params.l;
    let width = ctx.params.register_width();
    let pad = rec.pad.clone();
    let key = if over == Averaging::PadsAndKeys { rec.key } else { None };
    let mut log2 = 0u128;
    let mut averaged_over = Vec::new();
    if let Some(slot) = &pad {
        log2 += l as u128;
        averaged_over.push(slot.to_string());
    }
    if let Some(id) = key {
        log2 += function_count_log2(width, l);
        averaged_over.push(serde_json::to_value(id)?.as_str().unwrap_or_default().to_string());
    }
    check_limit(log2, ctx.params.enum_limit)?;

    let pads: Vec<Option<u64>> = match pad {
        Some(_) => (0..1u64 << l).map(Some).collect(),
        None => vec![None],
    };
    let keys: Box<dyn Iterator<Item = Option<BooleanFunction>>> = match key {
        Some(_) => Box::new(enumerate_functions(width, l, ctx.params.enum_limit)?.map(Some)),
        None => Box::new(std::iter::once(None)),
    };

    let weight = 1.0 / (1u128 << log2) as f64;
    let mut acc: Option<DensityMatrix> = None;
    let mut runs = 0u64;
    for f in keys {
        let mut c = base.clone();
        if let (Some(id), Some(f)) = (key, f) {
            c.keys.as_mut().expect("keyed round").set(id, f);
        }
        for &value in &pads {
            if let (Some(slot), Some(v)) = (&pad, value) {
                c.pad_overrides.insert(slot.clone(), v);
            }
            let rho = snapshot_of(&c, round)?;
            acc = Some(match acc {
                None => DensityMatrix::mixture([(weight, &rho)])?,
                Some(a) => DensityMatrix::mixture([(1.0, &a), (weight, &rho)])?,
            });
            runs += 1;
        }
    }
    Ok(EveView {
        round,
        rho: acc.expect("at least one run"),
        averaged_over,
        runs,
    })
}

/// Views of every round of the run.
pub fn eve_average_views(ctx: &RunContext, over: Averaging) -> Result<Vec<EveView>> {
    (1..=ctx.params.protocol.rounds())
        .map(|r| eve_average_view(ctx, r, over))
        .collect()
}

/// All pairwise distances, `left < right` by position in `states`.
pub fn pairwise_distances(round: usize, states: &[(u64, &DensityMatrix)]) -> Result<Vec<PairDistance>> {
    let mut out = Vec::new();
    for (i, (x, a)) in states.iter().enumerate() {
        for (y, b) in &states[i + 1..] {
            out.push(PairDistance {
                round,
                left: *x,
                right: *y,
                distance: trace_distance(a, b)?,
            });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonInteractiveView {
    pub n: u32,
    pub l: u32,
    /// `(message, ρ(message))` averaged over all `s_A` and `r_A`.
    pub states: Vec<(u64, DensityMatrix)>,
    pub distances: Vec<PairDistance>,
}

/// Channel state of the single-pass variant averaged over every
/// authentication function and pad, for each message in `messages`.
pub fn noninteractive_view(messages: &[u64], n: u32, l: u32, limit: u64) -> Result<NonInteractiveView> {
    let mut params = ProtocolParams::new(ProtocolId::NonInteractive, n, l);
    params.enum_limit = limit;
    params.validate()?;
    check_limit(function_count_log2(n, l) + l as u128, limit)?;
    // Any keys will do: the one that matters is enumerated.
    let keys = Keys::sample(&params, &mut rng::stream(0))?;
    let mut states = Vec::with_capacity(messages.len());
    for &x in messages {
        let ctx = RunContext::new(params.clone(), x).with_keys(keys.clone());
        states.push((x, eve_average_view(&ctx, 1, Averaging::PadsAndKeys)?.rho));
    }
    let refs: Vec<_> = states.iter().map(|(x, r)| (*x, r)).collect();
    let distances = pairwise_distances(1, &refs)?;
    Ok(NonInteractiveView { n, l, states, distances })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::DENSITY_TOL;

    fn p2_ctx(n: u32, l: u32, x: u64, key_seed: u64) -> RunContext {
        let params = ProtocolParams::new(ProtocolId::P2, n, l);
        let keys = Keys::sample(&params, &mut rng::stream(key_seed)).unwrap();
        RunContext::new(params, x).with_keys(keys).with_seed(11)
    }

    #[test]
    fn pad_average_of_p2_round_one_is_maximally_mixed() {
        let ctx = p2_ctx(2, 2, 3, 1);
        let view = eve_average_view(&ctx, 1, Averaging::Pads).unwrap();
        assert_eq!(view.runs, 4);
        assert_eq!(view.averaged_over, vec!["stage1.r_A".to_string()]);
        let m = view.rho.mixedness(DENSITY_TOL);
        assert!(m.is_maximally_mixed, "{}", m.deviation);
        assert!(!eve_average_view(&ctx, 1, Averaging::None).unwrap().rho.mixedness(DENSITY_TOL).is_maximally_mixed);
    }

    #[test]
    fn identity_average_is_the_snapshot() {
        let mut ctx = p2_ctx(2, 1, 2, 4);
        ctx.params.snapshots = true;
        let tr = ctx.execute().unwrap();
        let view = eve_average_view(&ctx, 2, Averaging::None).unwrap();
        assert_eq!(&view.rho, tr.snapshot(2).unwrap());
    }

    #[test]
    fn pads_and_keys_average() {
        let ctx = p2_ctx(2, 1, 1, 2);
        let view = eve_average_view(&ctx, 1, Averaging::PadsAndKeys).unwrap();
        assert_eq!(view.runs, 32);
        assert!(view.rho.mixedness(1e-9).is_maximally_mixed);
    }

    #[test]
    fn noninteractive_sanity_and_limit() {
        let v = noninteractive_view(&[0, 3], 2, 1, 1 << 16).unwrap();
        for (_, rho) in &v.states {
            assert!(rho.validate(DENSITY_TOL).is_ok());
        }
        assert_eq!(v.distances.len(), 1);
        assert!((v.distances[0].distance - 0.5).abs() < 1e-9);
        assert!(noninteractive_view(&[0], 3, 2, 1 << 16).is_err());
        let same = noninteractive_view(&[2, 2], 2, 1, 1 << 16).unwrap();
        assert!(same.distances[0].distance.abs() < 1e-9);
    }
}
