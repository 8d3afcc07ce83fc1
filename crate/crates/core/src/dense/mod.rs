//! Exact state-vector and unitary simulation for small chains.

mod experiment;
mod sff;
mod state;
mod unitary;

pub use experiment::{
    autocorrelator, dense_entropy_trace, entropy_experiment, entropy_realizations, rotation_autocorrelator,
    AutocorrelatorEstimate, EntropyRealization, EntropyTraces,
};
pub use sff::{
    cue_reference, fit_exponent, fragmentation_ansatz, gaussian_smear, power_cross_check, sff, sff_experiment,
    sff_from_traces, trace_moduli, SffTrace,
};
pub use state::{StateVector, MAX_STATE_QUBITS};
pub use unitary::{build_unitary, otoc_product_test, DenseUnitary, OperatorSchmidt, MAX_UNITARY_QUBITS};
