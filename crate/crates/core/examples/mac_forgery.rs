//! The one-time MAC and its substitution bound, by exhaustive enumeration.
//!
//!     cargo run --example mac_forgery

use nokey::auth::{enumerate_keys, mac_tag, mac_verify, Gf2t, MacKey, Message};

fn main() -> nokey::Result<()> {
    let gf = Gf2t::new(4)?;
    println!("GF(16): 3 * 5 = {:#x}", gf.mul(3, 5));
    let k = MacKey::new(4, 0x3, 0x7)?;
    let m = Message::new(0x5, 4)?;
    let tag = mac_tag(&k, &m)?;
    println!("t=4 key (3, 7), message 0101: tag {tag:#x}, verifies {}", mac_verify(&k, &m, tag)?);

    // Worst case over (x, x', delta) of the fraction of keys mapping tag(x) to tag(x') ⊕ delta.
    let t = 3;
    let keys: Vec<MacKey> = enumerate_keys(t)?.collect();
    let len = 3;
    let mut worst = 0;
    for x in 0..1u64 << len {
        for y in (0..1u64 << len).filter(|&y| y != x) {
            for delta in 0..1u32 << t {
                let hits = keys
                    .iter()
                    .filter(|k| {
                        let tx = mac_tag(k, &Message::new(x, len).unwrap()).unwrap();
                        let ty = mac_tag(k, &Message::new(y, len).unwrap()).unwrap();
                        ty == tx ^ delta
                    })
                    .count();
                worst = worst.max(hits);
            }
        }
    }
    println!(
        "t={t}, {len}-bit messages: worst substitution succeeds for {worst}/{} keys (bound 2^(1-t) = {})",
        keys.len(),
        keys.len() >> (t - 1)
    );
    Ok(())
}
