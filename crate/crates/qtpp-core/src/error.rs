use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoreError {
    #[error("qubit count {0} outside supported range 1..={max}", max = crate::qsim::MAX_QUBITS)]
    QubitCount(usize),
    #[error("qubit index {index} out of range for {num_qubits} qubit(s)")]
    QubitIndex { index: usize, num_qubits: usize },
    #[error("duplicate target qubit {0}")]
    DuplicateTarget(usize),
    #[error("gate dimension {gate_dim} does not match {targets} target qubit(s)")]
    DimensionMismatch { gate_dim: usize, targets: usize },
    #[error("unsupported gate dimension {0} (must be 2, 4, or 8)")]
    GateDimension(usize),
    #[error("matrix is not unitary (max deviation {0:.3e})")]
    NotUnitary(f64),
    #[error("angle must be finite")]
    NonFiniteAngle,
    #[error("tensor product exceeds {max} qubits", max = crate::qsim::MAX_QUBITS)]
    TooManyQubits,
    #[error("bit index {bit} has no basis value for {num_qubits} qubit(s)")]
    BasisLength { bit: usize, num_qubits: usize },
    #[error("message must contain at least one bit")]
    EmptyMessage,
    #[error("key length {key} does not match message length {message}")]
    KeyLength { key: usize, message: usize },
    #[error("bit string lengths differ ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("empty check set")]
    EmptyCheckSet,
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;
