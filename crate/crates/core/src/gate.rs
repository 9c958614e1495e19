//! Elementary gates and the stage labels the compiler attaches to them.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// One elementary gate. Qubit fields are absolute indices into the circuit's
/// qubit array (qubit 0 is the least-significant bit of a basis index).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    X(usize),
    H(usize),
    Z(usize),
    Ry { target: usize, theta: f64 },
    Cx { control: usize, target: usize },
    /// Symmetric in its two qubits.
    Cz(usize, usize),
    Ccx { c0: usize, c1: usize, target: usize },
}

impl Gate {
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::X(q) | Gate::H(q) | Gate::Z(q) | Gate::Ry { target: q, .. } => vec![q],
            Gate::Cx { control, target } => vec![control, target],
            Gate::Cz(a, b) => vec![a, b],
            Gate::Ccx { c0, c1, target } => vec![c0, c1, target],
        }
    }

    /// Lower-case mnemonic, matching the QASM gate name.
    pub fn name(&self) -> &'static str {
        match self {
            Gate::X(_) => "x",
            Gate::H(_) => "h",
            Gate::Z(_) => "z",
            Gate::Ry { .. } => "ry",
            Gate::Cx { .. } => "cx",
            Gate::Cz(..) => "cz",
            Gate::Ccx { .. } => "ccx",
        }
    }

    pub fn inverse(&self) -> Gate {
        match *self {
            Gate::Ry { target, theta } => Gate::Ry { target, theta: -theta },
            g => g,
        }
    }

    /// Checks qubit range, distinctness and angle finiteness.
    pub fn validate(&self, qubit_count: usize) -> Result<()> {
        let qubits = self.qubits();
        for (i, &q) in qubits.iter().enumerate() {
            if q >= qubit_count {
                return Err(Error::QubitOutOfRange { index: q, qubit_count });
            }
            if qubits[..i].contains(&q) {
                return Err(Error::DuplicateQubit(q));
            }
        }
        if let Gate::Ry { theta, .. } = *self {
            if !theta.is_finite() {
                return Err(Error::NonFiniteAngle(theta));
            }
        }
        Ok(())
    }
}

/// Which part of the compiled network a gate belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Stage {
    Unlabeled,
    /// State preparation onto a hidden neuron's input register.
    Prep(usize),
    /// Weight sign flips of a hidden neuron.
    Sign(usize),
    /// Hadamard accumulation and extraction into a hidden qubit.
    Quadratic(usize),
    /// Output-layer product of hidden qubits.
    Output(usize),
    /// Normalization qubit rotation and combination.
    Norm(usize),
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Stage::Unlabeled => write!(f, "unlabeled"),
            Stage::Prep(n) => write!(f, "prep hidden{n}"),
            Stage::Sign(n) => write!(f, "sign hidden{n}"),
            Stage::Quadratic(n) => write!(f, "quadratic hidden{n}"),
            Stage::Output(n) => write!(f, "output out{n}"),
            Stage::Norm(n) => write!(f, "norm out{n}"),
        }
    }
}

impl FromStr for Stage {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut parts = s.split_whitespace();
        let kind = parts.next().ok_or_else(|| "empty stage label".to_string())?;
        if kind == "unlabeled" {
            return match parts.next() {
                None => Ok(Stage::Unlabeled),
                Some(extra) => Err(format!("unexpected {extra:?} after stage")),
            };
        }
        let target = parts.next().ok_or_else(|| format!("stage {kind:?} needs a neuron"))?;
        if let Some(extra) = parts.next() {
            return Err(format!("unexpected {extra:?} after stage"));
        }
        let neuron = |prefix: &str| -> Result<usize, String> {
            target
                .strip_prefix(prefix)
                .and_then(|n| n.parse().ok())
                .ok_or_else(|| format!("expected {prefix}<n>, got {target:?}"))
        };
        match kind {
            "prep" => Ok(Stage::Prep(neuron("hidden")?)),
            "sign" => Ok(Stage::Sign(neuron("hidden")?)),
            "quadratic" => Ok(Stage::Quadratic(neuron("hidden")?)),
            "output" => Ok(Stage::Output(neuron("out")?)),
            "norm" => Ok(Stage::Norm(neuron("out")?)),
            other => Err(format!("unknown stage {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Instruction {
    pub gate: Gate,
    pub stage: Stage,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validate_rejects_bad_gates() {
        assert_eq!(
            Gate::X(3).validate(3),
            Err(Error::QubitOutOfRange { index: 3, qubit_count: 3 })
        );
        assert_eq!(
            Gate::Ccx { c0: 0, c1: 1, target: 0 }.validate(3),
            Err(Error::DuplicateQubit(0))
        );
        assert!(matches!(
            Gate::Ry { target: 0, theta: f64::NAN }.validate(1),
            Err(Error::NonFiniteAngle(_))
        ));
        assert!(Gate::Cz(0, 2).validate(3).is_ok());
    }

    #[test]
    fn stage_labels_round_trip() {
        let stages = [
            Stage::Unlabeled,
            Stage::Prep(0),
            Stage::Sign(1),
            Stage::Quadratic(0),
            Stage::Output(1),
            Stage::Norm(0),
        ];
        for stage in stages {
            assert_eq!(stage.to_string().parse::<Stage>(), Ok(stage));
        }
        assert!("sign out0".parse::<Stage>().is_err());
        assert!("bogus hidden0".parse::<Stage>().is_err());
    }
}
