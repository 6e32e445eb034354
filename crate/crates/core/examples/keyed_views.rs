//! Per-run snapshots versus the eavesdropper's averaged view.
//!
//! With keys, a single run leaks the graph of `m -> s_A(m) ⊕ r_A` on the
//! channel. Averaging over the pad Eve does not know gives `I/2^(n+l)`.
//!
//!     cargo run --example keyed_views

use nokey::protocols::{eve_average_view, Averaging, Keys, ProtocolId, ProtocolParams, RunContext};
use nokey::rng;

fn main() -> nokey::Result<()> {
    let params = ProtocolParams::new(ProtocolId::P2, 2, 2).with_snapshots(true);
    let keys = Keys::sample(&params, &mut rng::stream(1))?;
    let ctx = RunContext::new(params, 3).with_keys(keys).with_seed(7);

    let tr = ctx.execute()?;
    println!("Bob decoded {}", tr.outcome.bob_message.unwrap());
    for p in tr.measured_pads() {
        println!("  {:?} measured pad {} = {}", p.owner, p.register, p.outcome);
    }

    let rho = tr.snapshot(1).unwrap();
    let diag: Vec<String> = (0..rho.dim()).map(|i| format!("{:.3}", rho.get(i, i).re)).collect();
    println!("round 1 per-run diagonal: [{}]", diag.join(", "));
    println!("  deviation from I/16: {:.3}", rho.mixedness(1e-10).deviation);

    for over in [Averaging::Pads, Averaging::PadsAndKeys] {
        for round in 1..=3 {
            let view = eve_average_view(&ctx, round, over)?;
            println!(
                "round {round} averaged over {:?} ({} runs): deviation {:.2e}",
                view.averaged_over,
                view.runs,
                view.rho.mixedness(1e-10).deviation
            );
        }
    }
    Ok(())
}
