//! Dense state-vector engine for 1 to 4 qubits.
//!
//! Conventions, fixed once and enforced by tests:
//! - basis index `i` names the ket |binary(i)>, with qubit 0 as the MOST
//!   significant bit of the index;
//! - gates embed into the full space by an ordered target list: bit `j` of a
//!   gate's own index (MSB first) addresses `targets[j]`;
//! - global phase is never normalized away.

mod gate;
mod measure;
mod state;

pub use gate::Gate;
pub use measure::MeasurementResult;
pub use state::{Amplitude, StateVector};

pub const MAX_QUBITS: usize = 4;

/// Outcomes with probability below this are never sampled; the Bernoulli draw
/// is clamped away from both endpoints.
pub const MIN_OUTCOME_PROB: f64 = 1e-12;
