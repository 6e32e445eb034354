//! The `Z^x′` attack on the basic exchange.
//!
//! A phase flip on the in-transit register turns into a bit flip after
//! Bob's final Hadamard layer. An odd number of flips rewrites the message
//! to `x ⊕ x′`; an even number cancels.
//!
//!     cargo run --example phase_attack

use nokey::adversary::{AttackStrategy, PassMask};
use nokey::protocols::run_protocol1;

fn main() -> nokey::Result<()> {
    let (n, x, flip) = (3, 0b101, 0b011);
    for rounds in [vec![1, 2, 3], vec![1, 3], vec![2]] {
        let attack = AttackStrategy::Phase {
            flip,
            passes: PassMask::rounds(&rounds),
        };
        let tr = run_protocol1(x, n, 9, attack)?;
        println!(
            "flip {flip:03b} on rounds {rounds:?}: Bob decodes {:03b}",
            tr.outcome.bob_message.unwrap()
        );
    }

    // The attacked channel looks exactly like the honest one.
    let honest = run_protocol1(x, n, 9, AttackStrategy::None)?;
    let attacked = run_protocol1(x, n, 9, "phase:x=3,passes=all".parse()?)?;
    for (a, b) in honest.snapshots().iter().zip(attacked.snapshots()) {
        println!("snapshot difference: {:.1e}", a.max_abs_diff(b)?);
    }
    Ok(())
}
