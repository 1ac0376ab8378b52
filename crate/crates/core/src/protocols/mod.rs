//! Teleportation schemes: two-Bell-pair multi-output teleportation, the
//! compression of generalized Bell-type states, the five-qubit cluster
//! baseline, general two-qubit teleportation and resource accounting.

mod ghz;
mod report;
mod resources;
mod teleport;

pub use ghz::{compress_ghz_class, expand_ghz_class, make_ghz_class, GeneralizedBellTypeState, InversionRecord};
pub use report::{BranchRecord, ProtocolReport};
pub use resources::{count_bell_resources, prepare_bell, prepare_cluster5, ResourceReport, TwoQubitState};
pub use teleport::{
    cluster_channel_teleport, correction_table, experiment_circuit, multi_output_teleport, receiver_qubit,
    sender_channel_qubit, teleport_circuit, teleport_single, teleport_two_qubit_general, Correction, Pauli, Receiver,
    TeleportBranch,
};
