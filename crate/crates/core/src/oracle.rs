//! Independent checks for the simulator and the compiler: a dense-matrix
//! simulator that shares no code with the stride kernels, and the
//! closed-form output probabilities of the compiled network.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::circuit::Circuit;
use crate::encoding::EncodedInput;
use crate::error::{Error, Result};
use crate::gate::Gate;
use crate::model::{QnnModel, Sign, HIDDEN, OUTPUTS};
use crate::state::StateVector;

pub const NAIVE_MAX_QUBITS: usize = 10;

type Matrix = DMatrix<Complex64>;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn single(m: [[f64; 2]; 2]) -> Matrix {
    DMatrix::from_fn(2, 2, |r, col| c(m[r][col]))
}

/// `factor(q)` for q = n−1 down to 0, so qubit 0 ends up least significant.
fn kron_chain(n: usize, factor: impl Fn(usize) -> Matrix) -> Matrix {
    (0..n)
        .rev()
        .fold(DMatrix::from_element(1, 1, c(1.0)), |acc, q| acc.kronecker(&factor(q)))
}

fn gate_matrix(n: usize, gate: &Gate) -> Matrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let x = single([[0.0, 1.0], [1.0, 0.0]]);
    let z = single([[1.0, 0.0], [0.0, -1.0]]);
    let (controls, target, u): (Vec<usize>, usize, Matrix) = match *gate {
        Gate::X(t) => (vec![], t, x),
        Gate::H(t) => (vec![], t, single([[s, s], [s, -s]])),
        Gate::Z(t) => (vec![], t, z),
        Gate::Ry { target, theta } => {
            let (sin, cos) = (theta / 2.0).sin_cos();
            (vec![], target, single([[cos, -sin], [sin, cos]]))
        }
        Gate::Cx { control, target } => (vec![control], target, x),
        Gate::Cz(a, b) => (vec![a], b, z),
        Gate::Ccx { c0, c1, target } => (vec![c0, c1], target, x),
    };
    let identity = single([[1.0, 0.0], [0.0, 1.0]]);
    let proj_one = single([[0.0, 0.0], [0.0, 1.0]]);
    let applied = kron_chain(n, |q| {
        if controls.contains(&q) {
            proj_one.clone()
        } else if q == target {
            u.clone()
        } else {
            identity.clone()
        }
    });
    if controls.is_empty() {
        return applied;
    }
    // I − |1..1⟩⟨1..1|_controls ⊗ I + |1..1⟩⟨1..1|_controls ⊗ U
    let projector = kron_chain(n, |q| {
        if controls.contains(&q) {
            proj_one.clone()
        } else {
            identity.clone()
        }
    });
    DMatrix::identity(1 << n, 1 << n) - projector + applied
}

/// Simulates `circuit` by multiplying full 2^n × 2^n gate matrices.
pub fn naive_run(circuit: &Circuit) -> Result<StateVector> {
    let n = circuit.qubit_count();
    if n > NAIVE_MAX_QUBITS {
        return Err(Error::OracleTooLarge { got: n, max: NAIVE_MAX_QUBITS });
    }
    let mut state = match circuit.init() {
        Some(init) => DVector::from_column_slice(init),
        None => {
            let mut v = DVector::from_element(1 << n, c(0.0));
            v[0] = c(1.0);
            v
        }
    };
    for gate in circuit.gates() {
        gate.validate(n)?;
        state = gate_matrix(n, gate) * state;
    }
    StateVector::from_amplitudes(n, state.iter().copied().collect())
}

/// Per-neuron probabilities of reading 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NetworkProbabilities {
    pub hidden: [f64; HIDDEN],
    pub raw_output: [f64; OUTPUTS],
    pub final_output: [f64; OUTPUTS],
}

/// (Σ_k w_k x_k)² / 16.
pub fn hidden_probability(x: &EncodedInput, weights: &[Sign]) -> f64 {
    let sum: f64 = x.values().iter().zip(weights).map(|(v, w)| v * w.value()).sum();
    sum * sum / x.values().len() as f64
}

/// Product of the hidden qubits read as independent random variables; a −1
/// weight reads its qubit negated (1 − p).
pub fn raw_output_probability(hidden: &[f64; HIDDEN], weights: &[Sign; HIDDEN]) -> f64 {
    hidden
        .iter()
        .zip(weights)
        .map(|(&p, w)| match w {
            Sign::Plus => p,
            Sign::Minus => 1.0 - p,
        })
        .product()
}

/// AND (`flag`) or OR with an independent qubit that reads 1 with
/// probability `gamma`.
pub fn normalized_probability(raw: f64, flag: bool, gamma: f64) -> f64 {
    if flag {
        raw * gamma
    } else {
        1.0 - (1.0 - raw) * (1.0 - gamma)
    }
}

pub fn closed_form_network(x: &EncodedInput, model: &QnnModel) -> Result<NetworkProbabilities> {
    model.validate()?;
    let hidden: [f64; HIDDEN] = std::array::from_fn(|i| hidden_probability(x, &model.w1[i]));
    let raw_output: [f64; OUTPUTS] =
        std::array::from_fn(|j| raw_output_probability(&hidden, &model.w2[j]));
    let final_output: [f64; OUTPUTS] = std::array::from_fn(|j| {
        normalized_probability(raw_output[j], model.norm_flag[j], model.norm_para[j])
    });
    Ok(NetworkProbabilities { hidden, raw_output, final_output })
}

/// Index of the largest probability; ties go to the lowest index.
pub fn classify(probabilities: &[f64]) -> Result<usize> {
    let (first, rest) = probabilities.split_first().ok_or(Error::EmptyProbabilities)?;
    let mut best = (0, *first);
    for (i, &p) in rest.iter().enumerate() {
        if p > best.1 {
            best = (i + 1, p);
        }
    }
    Ok(best.0)
}
