use nokey::adversary::{AttackStrategy, PassMask};
use nokey::protocols::{
    run_protocol1, run_protocol2, run_protocol6, Keys, ProtocolId, ProtocolParams, ProtocolTranscript, RunContext,
};
use nokey::rng;
use proptest::prelude::*;

fn context(protocol: ProtocolId, n: u32, l: u32, x: u64, seed: u64) -> RunContext {
    let params = ProtocolParams::new(protocol, n, if protocol.is_keyed() { l } else { 0 }).with_mac_width(2);
    let mut ctx = RunContext::new(params, x).with_seed(seed);
    if protocol.is_keyed() {
        ctx.keys = Some(Keys::sample(&ctx.params, &mut rng::stream(seed + 100)).unwrap());
    }
    ctx
}

fn same_run(a: &ProtocolTranscript, b: &ProtocolTranscript) -> bool {
    a.without_snapshots().rounds == b.without_snapshots().rounds
        && a.measurements == b.measurements
        && a.outcome == b.outcome
}

#[test]
fn round_counts() {
    let expected = [3, 3, 9, 2, 6, 4, 1, 2];
    for (protocol, rounds) in ProtocolId::ALL.into_iter().zip(expected) {
        let tr = context(protocol, 2, 1, 1, 0).execute().unwrap();
        assert_eq!(tr.rounds.len(), rounds, "{protocol}");
        assert_eq!(protocol.rounds(), rounds);
        let numbers: Vec<usize> = tr.rounds.iter().map(|r| r.round).collect();
        assert_eq!(numbers, (1..=rounds).collect::<Vec<_>>());
    }
}

#[test]
fn zero_phase_flip_is_a_no_op() {
    for protocol in ProtocolId::ALL {
        for x in 0..4 {
            let honest = context(protocol, 2, 1, x, 3).execute().unwrap();
            let flipped = context(protocol, 2, 1, x, 3)
                .with_attack(AttackStrategy::Phase {
                    flip: 0,
                    passes: PassMask::ALL,
                })
                .execute()
                .unwrap();
            assert!(same_run(&honest, &flipped), "{protocol} x={x}");
        }
    }
}

#[test]
fn passive_eve_changes_nothing_but_snapshots() {
    for protocol in ProtocolId::ALL {
        let honest = context(protocol, 2, 1, 2, 9).execute().unwrap();
        let watched = context(protocol, 2, 1, 2, 9)
            .with_attack(AttackStrategy::Passive)
            .execute()
            .unwrap();
        assert!(same_run(&honest, &watched), "{protocol}");
        assert_eq!(watched.snapshots().len(), protocol.rounds());
    }
}

#[test]
fn even_number_of_flips_cancels_in_p1() {
    for x in 0..8 {
        let tr = run_protocol1(
            x,
            3,
            x,
            AttackStrategy::Phase {
                flip: 0b101,
                passes: PassMask::rounds(&[1, 3]),
            },
        )
        .unwrap();
        assert_eq!(tr.outcome.bob_message, Some(x));
    }
}

#[test]
fn keys_survive_many_runs() {
    let params = ProtocolParams::new(ProtocolId::P2, 2, 2);
    let keys = Keys::sample(&params, &mut rng::stream(5)).unwrap();
    for seed in 0..1000 {
        let x = seed % 4;
        let tr = run_protocol2(x, 2, 2, &keys, seed, AttackStrategy::None).unwrap();
        assert_eq!(tr.outcome.bob_message, Some(x));
        assert!(tr.outcome.all_accept());
    }
}

#[test]
fn p3_flip_in_first_stage_is_caught_by_the_echo() {
    for x in 0..4 {
        for flip in 1..4 {
            let tr = context(ProtocolId::P3, 2, 1, x, 11)
                .with_attack(AttackStrategy::Phase {
                    flip,
                    passes: PassMask::rounds(&[1]),
                })
                .execute()
                .unwrap();
            assert_eq!(tr.outcome.stage_values[0], x ^ flip);
            assert_eq!(tr.outcome.alice_accepts, Some(false), "x={x} flip={flip}");
        }
    }
}

#[test]
fn p6_honest_run_accepts_tag() {
    let params = ProtocolParams::new(ProtocolId::P6, 2, 1).with_mac_width(3);
    let keys = Keys::sample(&params, &mut rng::stream(8)).unwrap();
    for x in 0..4 {
        let tr = run_protocol6(x, 2, 1, 3, &keys, x, AttackStrategy::None).unwrap();
        assert_eq!(tr.outcome.bob_message, Some(x));
        assert_eq!(tr.outcome.bob_mac_accepts, Some(true));
    }
}

#[test]
fn same_seed_same_transcript() {
    for protocol in ProtocolId::ALL {
        let a = context(protocol, 2, 2, 3, 77).execute().unwrap();
        let b = context(protocol, 2, 2, 3, 77).execute().unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn oversized_message_is_rejected() {
    assert!(context(ProtocolId::P1, 2, 0, 4, 0).execute().is_err());
    assert!(context(ProtocolId::P2, 2, 1, 9, 0).execute().is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn honest_runs_recover_message(
        p in 0usize..8,
        n in 1u32..=3,
        l in 1u32..=2,
        x in any::<u64>(),
        seed in any::<u64>(),
    ) {
        let protocol = ProtocolId::ALL[p];
        let x = x % (1 << n);
        let tr = context(protocol, n, l, x, seed).execute().unwrap();
        prop_assert_eq!(tr.outcome.bob_message, Some(x));
        prop_assert!(tr.outcome.all_accept());
    }

    #[test]
    fn p1_phase_attack_xors(n in 1u32..=3, x in any::<u64>(), flip in any::<u64>(), seed in any::<u64>()) {
        let (x, flip) = (x % (1 << n), flip % (1 << n));
        let tr = run_protocol1(x, n, seed, AttackStrategy::Phase { flip, passes: PassMask::rounds(&[2]) }).unwrap();
        prop_assert_eq!(tr.outcome.bob_message, Some(x ^ flip));
    }
}
