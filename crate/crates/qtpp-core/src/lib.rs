//! Monte Carlo study of a quantum three-pass protocol.
//!
//! Alice hides a message qubit under a random rotation, Bob adds his own,
//! Alice removes hers, Bob removes his: the bit crosses the channel three
//! times without either side revealing a key. This crate simulates those
//! sessions on a small dense state-vector engine, puts configurable
//! eavesdroppers and channel noise on the wire, and aggregates error rates,
//! interception accuracy, and detection statistics over many seeded trials.
//! BB84 and a classical XOR three-pass scheme are included as baselines.
//!
//! Layering, bottom up:
//!
//! * [`qsim`]: gates, state vectors, Born-rule measurement (1 to 4 qubits)
//! * [`protocol`]: rotation keys, the three passes, session transcripts
//! * [`adversary`] and [`channel`]: attacks and noise on each hop
//! * [`bb84`] and [`classical`]: the two baselines
//! * [`experiment`] and [`report`]: batched trials, statistics, documents
//!
//! Everything downstream of a seed is deterministic; see [`rng`] for the
//! stream-splitting scheme.

pub mod adversary;
pub mod bb84;
pub mod channel;
pub mod classical;
pub mod error;
pub mod experiment;
pub mod protocol;
pub mod qsim;
pub mod report;
pub mod rng;

pub use adversary::{AdversaryKind, AdversaryStrategy, EveBitRecord, EveRecord, GuessRule};
pub use bb84::{run_bb84, Basis, Bb84Adversary, Bb84Session};
pub use channel::NoiseModel;
pub use classical::{
    bits_from_str, bits_to_string, eve_xor_recover, xor_three_pass, XorTranscript,
};
pub use error::{CoreError, Result};
pub use experiment::{
    compare_protocols, detect_eavesdropper, estimate_qber, replay_qtpp_trial, run_experiment,
    run_sweep, AngleMode, CompareReport, Detection, ExperimentConfig, ExperimentReport, Protocol,
    ProtocolComparison, SweepParam, SweepPoint,
};
pub use protocol::{
    run_session, run_session_with, Direction, Party, PassRecord, SessionKey, SessionOptions,
    SessionTranscript,
};
pub use qsim::{Gate, MeasurementResult, StateVector, MAX_QUBITS};
pub use rng::{trial_rng, RNG_SCHEME};
