use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gate::{Gate, Instruction, Stage};
use crate::state::{StateVector, MAX_QUBITS, NORM_TOLERANCE};

/// A named group of qubits, e.g. `input0` or `aux`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Register {
    pub name: String,
    pub qubits: Vec<usize>,
}

/// Ordered gate list over `qubit_count` qubits, optionally preceded by a
/// direct amplitude initialization.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    qubit_count: usize,
    init: Option<Vec<Complex64>>,
    instructions: Vec<Instruction>,
    registers: Vec<Register>,
    measured: Vec<usize>,
}

impl Circuit {
    pub fn new(qubit_count: usize) -> Result<Self> {
        if qubit_count > MAX_QUBITS {
            return Err(Error::TooManyQubits(qubit_count));
        }
        Ok(Circuit {
            qubit_count,
            init: None,
            instructions: Vec::new(),
            registers: Vec::new(),
            measured: Vec::new(),
        })
    }

    pub fn qubit_count(&self) -> usize {
        self.qubit_count
    }

    /// Sets the starting amplitudes. Only allowed before any gate is added.
    pub fn set_init(&mut self, amplitudes: Vec<Complex64>) -> Result<()> {
        if !self.instructions.is_empty() {
            return Err(Error::InitAfterGates);
        }
        // validates length and norm
        let state = StateVector::from_amplitudes(self.qubit_count, amplitudes)?;
        self.init = Some(state.amplitudes().to_vec());
        Ok(())
    }

    pub fn init(&self) -> Option<&[Complex64]> {
        self.init.as_deref()
    }

    pub fn push(&mut self, gate: Gate, stage: Stage) -> Result<()> {
        gate.validate(self.qubit_count)?;
        self.instructions.push(Instruction { gate, stage });
        Ok(())
    }

    pub fn extend(&mut self, gates: impl IntoIterator<Item = Gate>, stage: Stage) -> Result<()> {
        for gate in gates {
            self.push(gate, stage)?;
        }
        Ok(())
    }

    pub fn instructions(&self) -> &[Instruction] {
        &self.instructions
    }

    pub fn gates(&self) -> impl Iterator<Item = &Gate> {
        self.instructions.iter().map(|i| &i.gate)
    }

    pub fn add_register(&mut self, name: impl Into<String>, qubits: Vec<usize>) -> Result<()> {
        if let Some(&q) = qubits.iter().find(|&&q| q >= self.qubit_count) {
            return Err(Error::QubitOutOfRange { index: q, qubit_count: self.qubit_count });
        }
        self.registers.push(Register { name: name.into(), qubits });
        Ok(())
    }

    pub fn registers(&self) -> &[Register] {
        &self.registers
    }

    pub fn register(&self, name: &str) -> Option<&Register> {
        self.registers.iter().find(|r| r.name == name)
    }

    /// Declares the qubits read out at the end, in classical-bit order.
    pub fn set_measured(&mut self, qubits: Vec<usize>) -> Result<()> {
        if let Some(&q) = qubits.iter().find(|&&q| q >= self.qubit_count) {
            return Err(Error::QubitOutOfRange { index: q, qubit_count: self.qubit_count });
        }
        self.measured = qubits;
        Ok(())
    }

    pub fn measured(&self) -> &[usize] {
        &self.measured
    }

    /// Re-checks every invariant; useful after deserialization.
    pub fn validate(&self) -> Result<()> {
        if let Some(init) = &self.init {
            let expected = 1usize << self.qubit_count;
            if init.len() != expected {
                return Err(Error::AmplitudeLength { got: init.len(), expected });
            }
            let norm: f64 = init.iter().map(|a| a.norm_sqr()).sum();
            if norm.is_nan() || (norm - 1.0).abs() >= NORM_TOLERANCE {
                return Err(Error::NotNormalized(norm));
            }
        }
        self.instructions
            .iter()
            .try_for_each(|i| i.gate.validate(self.qubit_count))
    }
}

/// Simulates `circuit` from its init vector (or |0…0⟩).
pub fn run(circuit: &Circuit) -> Result<StateVector> {
    let mut state = match &circuit.init {
        Some(init) => StateVector::from_amplitudes(circuit.qubit_count, init.clone())?,
        None => StateVector::zero(circuit.qubit_count)?,
    };
    for gate in circuit.gates() {
        state.apply(gate)?;
    }
    Ok(state)
}
