//! Full man-in-the-middle on the unauthenticated exchange.
//!
//! Eve plays Bob against Alice and Alice against Bob. Both runs are honest
//! from each victim's point of view, so nothing is detected.
//!
//!     cargo run --example p1_impersonation

use nokey::adversary::mim_full_impersonation;
use nokey::protocols::{ProtocolId, ProtocolParams, RunContext};

fn main() -> nokey::Result<()> {
    let n = 2;
    for x in 0..4 {
        for forged in 0..4 {
            let ctx = RunContext::new(ProtocolParams::new(ProtocolId::P1, n, 0), x).with_seed(x * 4 + forged);
            let out = mim_full_impersonation(&ctx, forged)?;
            println!(
                "x={x} forged={forged}: Eve reads {:?}, Bob receives {:?}, detected: {}",
                out.eve.unwrap(),
                out.bob.unwrap(),
                out.detected
            );
        }
    }
    Ok(())
}
