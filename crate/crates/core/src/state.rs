//! Statevector storage and the in-place gate kernels.
//!
//! Basis index `i` stores qubit `q` in bit `q` of `i`. Kernels walk the
//! amplitude array with strides and bitmasks and never build a matrix.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gate::Gate;

/// Largest register the simulator will allocate.
pub const MAX_QUBITS: usize = 24;

/// Tolerance on Σ|a|² when accepting an externally supplied state.
pub const NORM_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    qubit_count: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// The all-zeros basis state.
    pub fn zero(qubit_count: usize) -> Result<Self> {
        if qubit_count > MAX_QUBITS {
            return Err(Error::TooManyQubits(qubit_count));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << qubit_count];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Ok(StateVector { qubit_count, amplitudes })
    }

    pub fn basis(qubit_count: usize, index: usize) -> Result<Self> {
        let mut state = Self::zero(qubit_count)?;
        if index >= state.amplitudes.len() {
            return Err(Error::AmplitudeLength { got: index, expected: state.amplitudes.len() });
        }
        state.amplitudes[0] = Complex64::new(0.0, 0.0);
        state.amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(state)
    }

    /// Wraps `amplitudes` after checking length 2^n and unit norm.
    pub fn from_amplitudes(qubit_count: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        if qubit_count > MAX_QUBITS {
            return Err(Error::TooManyQubits(qubit_count));
        }
        let expected = 1usize << qubit_count;
        if amplitudes.len() != expected {
            return Err(Error::AmplitudeLength { got: amplitudes.len(), expected });
        }
        let norm = norm_sqr(&amplitudes);
        if norm.is_nan() || (norm - 1.0).abs() >= NORM_TOLERANCE {
            return Err(Error::NotNormalized(norm));
        }
        Ok(StateVector { qubit_count, amplitudes })
    }

    pub fn from_real(qubit_count: usize, amplitudes: &[f64]) -> Result<Self> {
        Self::from_amplitudes(
            qubit_count,
            amplitudes.iter().map(|&a| Complex64::new(a, 0.0)).collect(),
        )
    }

    pub fn qubit_count(&self) -> usize {
        self.qubit_count
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amplitudes[index]
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.amplitudes)
    }

    /// Probability that `qubit` measures 1.
    pub fn marginal_prob_one(&self, qubit: usize) -> Result<f64> {
        self.check_qubit(qubit)?;
        let mask = 1 << qubit;
        Ok(self
            .amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| i & mask != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    /// Per-basis-state probabilities |a_i|².
    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn max_abs_diff(&self, other: &StateVector) -> f64 {
        assert_eq!(self.amplitudes.len(), other.amplitudes.len());
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// |⟨self|other⟩|².
    pub fn fidelity(&self, other: &StateVector) -> f64 {
        assert_eq!(self.amplitudes.len(), other.amplitudes.len());
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            .norm_sqr()
    }

    pub fn apply(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.qubit_count)?;
        let amps = &mut self.amplitudes;
        match *gate {
            Gate::X(t) => swap_pairs(amps, t, 0),
            Gate::Cx { control, target } => swap_pairs(amps, target, 1 << control),
            Gate::Ccx { c0, c1, target } => swap_pairs(amps, target, (1 << c0) | (1 << c1)),
            Gate::Z(t) => negate_where(amps, 1 << t),
            Gate::Cz(a, b) => negate_where(amps, (1 << a) | (1 << b)),
            Gate::H(t) => {
                let s = std::f64::consts::FRAC_1_SQRT_2;
                for_pairs(amps, t, |a0, a1| {
                    let (x, y) = (*a0, *a1);
                    *a0 = (x + y) * s;
                    *a1 = (x - y) * s;
                });
            }
            Gate::Ry { target, theta } => {
                let (sin, cos) = (theta / 2.0).sin_cos();
                for_pairs(amps, target, |a0, a1| {
                    let (x, y) = (*a0, *a1);
                    *a0 = x * cos - y * sin;
                    *a1 = x * sin + y * cos;
                });
            }
        }
        Ok(())
    }

    fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit >= self.qubit_count {
            return Err(Error::QubitOutOfRange { index: qubit, qubit_count: self.qubit_count });
        }
        Ok(())
    }
}

/// Applies `gate` to `state` in place.
pub fn apply_gate(state: &mut StateVector, gate: &Gate) -> Result<()> {
    state.apply(gate)
}

fn norm_sqr(amplitudes: &[Complex64]) -> f64 {
    amplitudes.iter().map(|a| a.norm_sqr()).sum()
}

/// Calls `f` on every (target=0, target=1) amplitude pair.
fn for_pairs(amps: &mut [Complex64], target: usize, mut f: impl FnMut(&mut Complex64, &mut Complex64)) {
    let stride = 1 << target;
    for block in amps.chunks_exact_mut(stride << 1) {
        let (lo, hi) = block.split_at_mut(stride);
        for (a0, a1) in lo.iter_mut().zip(hi.iter_mut()) {
            f(a0, a1);
        }
    }
}

/// Swaps target=0/target=1 pairs whose index has every bit of `controls` set.
fn swap_pairs(amps: &mut [Complex64], target: usize, controls: usize) {
    let stride = 1 << target;
    for base in (0..amps.len()).step_by(stride << 1) {
        for i in base..base + stride {
            if i & controls == controls {
                amps.swap(i, i | stride);
            }
        }
    }
}

fn negate_where(amps: &mut [Complex64], mask: usize) {
    for (i, a) in amps.iter_mut().enumerate() {
        if i & mask == mask {
            *a = -*a;
        }
    }
}
