use nokey::adversary::{mim_full_impersonation, passive_snapshot, AttackStrategy, PassMask};
use nokey::protocols::{run_protocol1, Averaging, Keys, ProtocolId, ProtocolParams, RunContext};
use nokey::rng;

/// Pearson statistic against the uniform distribution.
fn chi_square(counts: &[u64]) -> f64 {
    let total: u64 = counts.iter().sum();
    let e = total as f64 / counts.len() as f64;
    counts.iter().map(|&c| (c as f64 - e).powi(2) / e).sum()
}

#[test]
fn measuring_the_last_pass_randomizes_bob() {
    // Bob's final Hadamard acts on a basis state, so his value is uniform.
    let mut counts = [0u64; 8];
    for seed in 0..4000 {
        let tr = run_protocol1(
            5,
            3,
            seed,
            AttackStrategy::MeasureResend {
                passes: PassMask::rounds(&[3]),
            },
        )
        .unwrap();
        counts[tr.outcome.bob_message.unwrap() as usize] += 1;
        assert_eq!(tr.eve_log.len(), 1);
    }
    // 99.9% quantile of chi-square with 7 degrees of freedom.
    assert!(chi_square(&counts) < 24.322, "{counts:?}");
}

#[test]
fn measure_resend_logs_every_register_in_transit() {
    let tr = run_protocol1(
        1,
        2,
        4,
        AttackStrategy::MeasureResend {
            passes: PassMask::ALL,
        },
    )
    .unwrap();
    let rounds: Vec<usize> = tr.eve_log.iter().map(|o| o.round).collect();
    assert_eq!(rounds, vec![1, 2, 3]);
}

#[test]
fn passive_view_of_p2_is_message_independent() {
    let params = ProtocolParams::new(ProtocolId::P2, 2, 1);
    let keys = Keys::sample(&params, &mut rng::stream(2)).unwrap();
    let ctx = RunContext::new(params, 0).with_keys(keys).with_seed(6);
    let report = passive_snapshot(&ctx, &[0, 1, 2, 3], Averaging::Pads).unwrap();
    assert_eq!(report.per_message.len(), 4);
    assert!(report.max_distance() < 1e-9);
}

#[test]
fn p1_without_averaging_is_already_blind() {
    let ctx = RunContext::new(ProtocolParams::new(ProtocolId::P1, 2, 0), 0).with_seed(1);
    let report = passive_snapshot(&ctx, &[0, 1, 2, 3], Averaging::None).unwrap();
    assert!(report.max_distance() < 1e-9);
}

#[test]
fn impersonation_on_p1_is_silent() {
    for x in 0..8 {
        let ctx = RunContext::new(ProtocolParams::new(ProtocolId::P1, 3, 0), x).with_seed(x + 50);
        let out = mim_full_impersonation(&ctx, 7 - x).unwrap();
        assert_eq!(out.eve, Some(x));
        assert_eq!(out.bob, Some(7 - x));
        assert!(!out.detected);
    }
}
