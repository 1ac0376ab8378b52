//! Noise from device calibration: Kraus channels, readout confusion and
//! density-matrix execution.

mod calibration;
mod kraus;
mod model;
mod noisy;

pub use calibration::{load_calibration, parse_calibration, CalibrationRecord, CALIBRATION_HEADER};
pub use kraus::{
    amplitude_damping, amplitude_damping_probability, depolarizing, depolarizing_from_gate_error, phase_damping,
    pure_dephasing_rate, thermal_relaxation, KrausChannel,
};
pub use model::{build_noise_model, DurationConfig, NoiseModel, QubitNoise, StepKind};
pub use noisy::{run_noisy, run_noisy_from, NoisyRun, MAX_NOISY_QUBITS};

/// ibmq_casablanca calibration of 2021-12-01, as shipped in
/// `data/casablanca_2021-12-01.csv`.
pub const CASABLANCA_CSV: &str = include_str!("../../../../data/casablanca_2021-12-01.csv");

/// Parsed [`CASABLANCA_CSV`].
pub fn casablanca_calibration() -> Vec<CalibrationRecord> {
    parse_calibration(CASABLANCA_CSV.as_bytes()).expect("bundled calibration parses")
}
