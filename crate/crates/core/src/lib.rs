//! Binary-weight perceptrons compiled to quantum gate circuits.
//!
//! The pipeline is: pool a 28×28 image to 16 values and normalize them
//! ([`encoding`]), compile the network and input into an 18-qubit circuit
//! ([`compiler`]), simulate it ([`state`], [`circuit`]), then read per-qubit
//! probabilities exactly or from sampled shots ([`measure`]) and take the
//! argmax. [`oracle`] holds the independent dense simulator and the
//! closed-form network probabilities the compiled circuits are checked
//! against.

pub mod circuit;
pub mod compiler;
pub mod encoding;
pub mod error;
pub mod gate;
pub mod ingest;
pub mod measure;
pub mod model;
pub mod oracle;
pub mod state;
pub mod trainer;

pub use circuit::{run, Circuit, Register};
pub use compiler::{compile_network, gate_count_report, GateCountReport, PrepMode, RegisterLayout};
pub use encoding::{EncodedInput, UnitaryMatrix};
pub use error::{Error, IdxError, Result};
pub use gate::{Gate, Instruction, Stage};
pub use measure::{analyze, sample_counts, sample_counts_on, CountsMap};
pub use model::{QnnModel, Sign};
pub use oracle::{classify, closed_form_network, naive_run, NetworkProbabilities};
pub use state::{apply_gate, StateVector};
