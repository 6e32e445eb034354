//! Echo stages against an impersonating Eve.
//!
//! Eve reads the first transmission, then plays Bob in the echo stage
//! without the preshared functions. Alice compares the echo with what she
//! sent.
//!
//!     cargo run --release --example echo_detection [trials]

use nokey::harness::{run_experiment, ExperimentConfig, MessageSet};
use nokey::protocols::ProtocolId;

fn main() -> nokey::Result<()> {
    let trials = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(2000);
    for protocol in [ProtocolId::P3, ProtocolId::P5] {
        let mut c = ExperimentConfig::new(protocol, 3, 2);
        c.messages = MessageSet::List(vec![5]);
        c.trials = trials;
        c.seed = 2024;
        c.attack = "mim".parse()?;
        let r = run_experiment(&c)?;
        let d = r.detection.unwrap();
        println!(
            "{protocol}: Alice rejects {}/{} = {:.4} (99.9% CI [{:.4}, {:.4}]), floor {:.4}",
            d.detected,
            d.runs,
            d.rate,
            d.ci_low,
            d.ci_high,
            d.floor.unwrap()
        );
    }
    Ok(())
}
