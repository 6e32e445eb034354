//! Three-pass exchange with random permutations only.
//!
//! Every state Eve can grab from the channel is maximally mixed, yet Bob
//! decodes the message exactly.
//!
//!     cargo run --example basic_exchange

use nokey::adversary::AttackStrategy;
use nokey::protocols::run_protocol1;
use nokey::qstate::DENSITY_TOL;

fn main() -> nokey::Result<()> {
    let (n, x) = (3, 5);
    let tr = run_protocol1(x, n, 42, AttackStrategy::None)?;
    println!("sent {x:03b}, Bob decoded {:03b}", tr.outcome.bob_message.unwrap());
    for rec in &tr.rounds {
        let rho = rec.snapshot.as_ref().unwrap();
        let m = rho.mixedness(DENSITY_TOL);
        println!(
            "round {} {:?} -> {:?}: dim {}, max|rho - I/d| = {:.2e}, maximally mixed: {}",
            rec.round,
            rec.from,
            rec.to,
            rho.dim(),
            m.deviation,
            m.is_maximally_mixed
        );
    }
    for m in &tr.measurements {
        println!("{:?} measured {} = {}", m.owner, m.register, m.outcome);
    }
    Ok(())
}
