//! Run an experiment, write its report and verify it.
//!
//!     cargo run --example experiment_report [out.json]

use nokey::adversary::AttackStrategy;
use nokey::harness::{run_experiment, verify_report, ExperimentConfig, ExperimentReport};
use nokey::protocols::{Averaging, ProtocolId};

fn main() -> nokey::Result<()> {
    let mut c = ExperimentConfig::new(ProtocolId::P4, 2, 2);
    c.name = "p4_views".into();
    c.seed = 99;
    c.trials = 3;
    c.average = Averaging::Pads;
    c.attack = AttackStrategy::Passive;
    let report = run_experiment(&c)?;

    println!("runs {}, recovered {}", report.summary.runs, report.summary.recovered);
    for m in &report.mixedness {
        println!("round {}: averaged deviation {:.2e}", m.round, m.averaged_max_deviation.unwrap());
    }
    for a in &report.assertions {
        println!("{} {}: {}", if a.passed { "PASS" } else { "FAIL" }, a.name, a.detail);
    }

    let json = report.to_json()?;
    if let Some(path) = std::env::args().nth(1) {
        std::fs::write(&path, &json)?;
        println!("wrote {path}");
    }
    let loaded = ExperimentReport::from_json(&json)?;
    println!("verify: {}", verify_report(&loaded)?);
    Ok(())
}
