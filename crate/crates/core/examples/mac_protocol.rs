//! Two-pass exchange carrying `x ∥ e_k(x)`, then an echo of the tag.
//!
//! A phase flip on the message bits changes what Bob decodes; the one-time
//! MAC catches it for all keys but those with `a = 0`.
//!
//!     cargo run --example mac_protocol

use nokey::adversary::{AttackStrategy, PassMask};
use nokey::auth::enumerate_keys;
use nokey::protocols::{run_protocol6, Keys, ProtocolId, ProtocolParams};
use nokey::rng;

fn main() -> nokey::Result<()> {
    let (n, l, t, x) = (2, 1, 3, 0b10);
    let params = ProtocolParams::new(ProtocolId::P6, n, l).with_mac_width(t);
    let keys = Keys::sample(&params, &mut rng::stream(8))?;

    let tr = run_protocol6(x, n, l, t, &keys, 1, AttackStrategy::None)?;
    let o = &tr.outcome;
    println!(
        "honest: Bob decodes {:?}, MAC ok {:?}, Alice's echo ok {:?}, {} transmissions",
        o.bob_message,
        o.bob_mac_accepts,
        o.alice_accepts,
        tr.rounds.len()
    );

    // Flip the low message bit while Alice's reply is in transit.
    let attack = AttackStrategy::Phase {
        flip: 0b01 << t,
        passes: PassMask::rounds(&[2]),
    };
    let (mut total, mut rejected) = (0, 0);
    for mac in enumerate_keys(t)? {
        let k = Keys {
            mac: Some(mac),
            ..keys.clone()
        };
        let tr = run_protocol6(x, n, l, t, &k, 1, attack)?;
        total += 1;
        if tr.outcome.bob_mac_accepts == Some(false) {
            rejected += 1;
        } else {
            println!("  accepted with a={}, b={}", mac.a, mac.b);
        }
    }
    println!("message-bit phase attack: MAC rejects {rejected}/{total}");
    Ok(())
}
