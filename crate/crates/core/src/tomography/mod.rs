//! Fidelity, Pauli-basis state tomography and repeat statistics.

mod fidelity;
mod pauli;
mod stats;

pub use fidelity::{fidelity, pure_fidelity, CLASSICAL_LIMIT};
pub use pauli::{
    exact_expectations, expectations_from_counts, matrix_parts, pauli_matrix, pauli_strings, reconstruct,
    simulate_settings, tomography, Axis, PauliSetting,
};
pub use stats::{fidelity_stats, FidelityStats};
