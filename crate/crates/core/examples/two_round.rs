//! Receiver-initiated two-pass exchange.
//!
//! Bob opens with a tagged uniform superposition and Alice writes `x` as a
//! phase. Both transmissions average to `I/2^(n+l)` and distinct messages
//! give identical views.
//!
//!     cargo run --example two_round

use nokey::adversary::passive_snapshot;
use nokey::protocols::{Averaging, Keys, ProtocolId, ProtocolParams, RunContext};
use nokey::rng;

fn main() -> nokey::Result<()> {
    let params = ProtocolParams::new(ProtocolId::TwoRound, 2, 2);
    let keys = Keys::sample(&params, &mut rng::stream(5))?;
    let ctx = RunContext::new(params, 0).with_keys(keys).with_seed(3);
    for x in 0..4 {
        let tr = ctx.clone().with_message(x).execute()?;
        let first = &tr.rounds[0];
        println!("x={x}: Bob decodes {}, first pass {:?} -> {:?}", tr.outcome.bob_message.unwrap(), first.from, first.to);
    }

    let report = passive_snapshot(&ctx, &[0, 1, 2, 3], Averaging::Pads)?;
    for m in &report.per_message {
        let devs: Vec<String> = m.rounds.iter().map(|r| format!("{:.1e}", r.mixedness(1e-10).deviation)).collect();
        println!("x={}: averaged deviations per round {devs:?}", m.message);
    }
    println!("max trace distance between messages: {:.1e}", report.max_distance());
    Ok(())
}
