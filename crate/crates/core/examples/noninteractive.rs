//! Single-pass variant: the channel state averaged over every function and pad.
//!
//! Unlike the interactive protocols, distinct messages remain
//! distinguishable; the distances below are exploratory numbers.
//!
//!     cargo run --example noninteractive

use nokey::protocols::noninteractive_view;

fn main() -> nokey::Result<()> {
    for (n, l) in [(1, 1), (2, 1), (2, 2)] {
        let messages: Vec<u64> = (0..1 << n).collect();
        let view = noninteractive_view(&messages, n, l, 1 << 16)?;
        let max = view.distances.iter().map(|d| d.distance).fold(0.0, f64::max);
        println!("n={n} l={l}: {} pairs, max D = {max:.6}", view.distances.len());
        for d in view.distances.iter().take(3) {
            println!("  D(rho({}), rho({})) = {:.6}", d.left, d.right, d.distance);
        }
    }
    match noninteractive_view(&[0, 1], 3, 2, 1 << 16) {
        Err(e) => println!("n=3 l=2: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
