//! Truth tables: sampling, the text format, and pinning a table into a run.
//!
//!     cargo run --example truth_tables

use nokey::adversary::AttackStrategy;
use nokey::oracles::{
    enumerate_functions, parse_table_file, sample_function, sample_permutation, write_table_file, TableFile,
};
use nokey::protocols::{ProtocolId, ProtocolParams, RunContext};
use nokey::rng;

fn main() -> nokey::Result<()> {
    let mut stream = rng::stream(11);
    let f_a = sample_permutation(3, &mut stream)?;
    let s_a = sample_function(2, 1, &mut stream)?;

    let text = write_table_file(&TableFile::Permutation(f_a.clone()));
    print!("{text}");
    let back = parse_table_file(&text)?.into_permutation()?;
    assert_eq!(back, f_a);
    print!("{}", write_table_file(&TableFile::Function(s_a)));

    let all: Vec<_> = enumerate_functions(2, 1, 1 << 16)?.collect();
    println!("{} functions 2 -> 1 bits; first {:?}, last {:?}", all.len(), all[0].table(), all[15].table());
    if let Err(e) = enumerate_functions(3, 3, 1 << 16).map(|it| it.count()) {
        println!("n=3 l=3: {e}");
    }

    let mut ctx = RunContext::new(ProtocolParams::new(ProtocolId::P1, 3, 0), 6).with_attack(AttackStrategy::None);
    ctx.fixed_f_a = Some(f_a);
    println!("P1 with pinned F_A decodes {:?}", ctx.execute()?.outcome.bob_message);
    Ok(())
}
