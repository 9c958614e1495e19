use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("qubit index {index} out of range for {qubit_count} qubits")]
    QubitOutOfRange { index: usize, qubit_count: usize },

    #[error("gate uses qubit {0} more than once")]
    DuplicateQubit(usize),

    #[error("rotation angle is not finite: {0}")]
    NonFiniteAngle(f64),

    #[error("{0} qubits requested, at most {max} supported", max = crate::state::MAX_QUBITS)]
    TooManyQubits(usize),

    #[error("naive simulator supports at most {max} qubits, got {got}")]
    OracleTooLarge { got: usize, max: usize },

    #[error("amplitude vector has length {got}, expected {expected}")]
    AmplitudeLength { got: usize, expected: usize },

    #[error("vector is not unit norm (norm² = {0})")]
    NotNormalized(f64),

    #[error("direct initialization must come before every gate")]
    InitAfterGates,

    #[error("shots must be at least 1")]
    ZeroShots,

    #[error("bitstring {bitstring:?} does not have length {expected}")]
    BitstringLength { bitstring: String, expected: usize },

    #[error("counts map is empty")]
    EmptyCounts,

    #[error("cannot classify an empty probability vector")]
    EmptyProbabilities,

    #[error("image must be 28x28, got {0} pixels")]
    ImageDimensions(usize),

    #[error("vector has no nonzero entry")]
    ZeroVector,

    #[error("entry {index} is negative ({value})")]
    NegativeEntry { index: usize, value: f64 },

    #[error("{field} must be +1 or -1, got {value}")]
    InvalidWeight { field: String, value: f64 },

    #[error("{field} must lie in [0, 1], got {value}")]
    ParameterRange { field: String, value: f64 },

    #[error("weight vector has {got} entries, expected {expected}")]
    WeightLength { got: usize, expected: usize },

    #[error("class pair ({0}, {1}) must be two distinct digits in ascending order")]
    InvalidClassPair(u8, u8),

    #[error("training set is empty")]
    EmptyTrainingSet,

    #[error("idx: {0}")]
    Idx(#[from] IdxError),

    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IdxError {
    #[error("label magic in image file")]
    LabelMagicInImageFile,

    #[error("image magic in label file")]
    ImageMagicInLabelFile,

    #[error("bad magic number {0:#010x}")]
    BadMagic(u32),

    #[error("header truncated: {got} bytes")]
    TruncatedHeader { got: usize },

    #[error("payload truncated: expected {expected} bytes, got {got}")]
    TruncatedPayload { expected: usize, got: usize },

    #[error("trailing data: expected {expected} bytes, got {got}")]
    TrailingData { expected: usize, got: usize },

    #[error("images must be 28x28, header says {rows}x{cols}")]
    Dimensions { rows: u32, cols: u32 },

    #[error("label {value} at index {index} is not a digit")]
    LabelRange { index: usize, value: u8 },

    #[error("{images} images but {labels} labels")]
    CountMismatch { images: usize, labels: usize },
}
