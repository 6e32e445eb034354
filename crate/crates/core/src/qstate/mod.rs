//! Dense pure-state simulation over named qubit registers.
//!
//! Index convention: the first register of the layout occupies the most
//! significant bits of the basis index. Inside a register, bit `i` of the
//! register value is qubit `i`, so `x·m` is the parity of `x & m`.

mod density;
mod eigen;
mod state;

pub use density::{trace_distance, DensityMatrix, Mixedness};
pub use eigen::hermitian_eigenvalues;
pub use state::{CompositeState, Holder, Register, DEFAULT_QUBIT_CAP};

pub use num_complex::Complex64 as C64;

/// State-vector equality tolerance.
pub const STATE_TOL: f64 = 1e-12;
/// Density-matrix invariant tolerance.
pub const DENSITY_TOL: f64 = 1e-10;
/// Tolerance for derived scalars (distances, deviations of averages).
pub const SCALAR_TOL: f64 = 1e-9;

/// `x·m` over GF(2).
#[inline]
pub fn dot_parity(x: u64, m: u64) -> bool {
    (x & m).count_ones() & 1 == 1
}
