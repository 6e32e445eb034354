//! The simulator underneath: registers, oracles, partial trace, trace distance.
//!
//!     cargo run --example density_matrices

use nokey::qstate::{trace_distance, CompositeState, DensityMatrix, Holder, Register, C64};

fn main() -> nokey::Result<()> {
    // Bell pair from |00>: Hadamard on A, then copy A into B.
    let mut s = CompositeState::basis(
        vec![Register::new("A", 1, Holder::Alice), Register::new("B", 1, Holder::Bob)],
        &[0, 0],
    )?;
    s.apply_hadamard_layer("A")?;
    s.apply_xor_oracle("A", "B", &[0, 1], 0)?;
    let rho_a = s.reduced_density_matrix(&["A"])?;
    println!("Bell pair, keep A: {:?}", rho_a.entries());
    println!("discarding B: {}", s.discard_register("B").unwrap_err());

    // HZ = XH: a phase flip before the Hadamard is a bit flip after it.
    let mut t = CompositeState::basis(vec![Register::new("R1", 2, Holder::Alice)], &[0])?;
    t.apply_hadamard_layer("R1")?;
    t.apply_phase_flip("R1", 0b10)?;
    t.apply_hadamard_layer("R1")?;
    println!("H Z^10 H |00>: {:?}", t.register_probabilities("R1")?);

    let zero = DensityMatrix::pure(&[C64::new(1.0, 0.0), C64::new(0.0, 0.0)])?;
    let one = DensityMatrix::pure(&[C64::new(0.0, 0.0), C64::new(1.0, 0.0)])?;
    let mixed = DensityMatrix::maximally_mixed(2)?;
    println!("D(|0>,|1>) = {}", trace_distance(&zero, &one)?);
    println!("D(I/2,|0>) = {}", trace_distance(&mixed, &zero)?);
    println!("base64 payload of I/2: {}", mixed.to_base64());
    Ok(())
}
