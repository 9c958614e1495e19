//! Classical image → amplitude vector, unitary completion, and gate-level
//! state preparation.

use nalgebra::{SMatrix, SVector};

use crate::error::{Error, Result};
use crate::gate::Gate;
use crate::state::NORM_TOLERANCE;

/// Amplitudes per encoded image (4 qubits).
pub const INPUT_LEN: usize = 16;
/// Qubits in one input register.
pub const INPUT_QUBITS: usize = 4;

pub const IMAGE_SIDE: usize = 28;
const POOL: usize = 7;

/// A nonnegative unit-norm 16-vector: one image as 4-qubit amplitudes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EncodedInput([f64; INPUT_LEN]);

impl EncodedInput {
    pub fn new(values: [f64; INPUT_LEN]) -> Result<Self> {
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| v.is_nan() || **v < 0.0) {
            return Err(Error::NegativeEntry { index, value });
        }
        let norm: f64 = values.iter().map(|v| v * v).sum();
        if norm.is_nan() || (norm - 1.0).abs() >= NORM_TOLERANCE {
            return Err(Error::NotNormalized(norm));
        }
        Ok(EncodedInput(values))
    }

    pub fn from_slice(values: &[f64]) -> Result<Self> {
        let values: [f64; INPUT_LEN] = values
            .try_into()
            .map_err(|_| Error::AmplitudeLength { got: values.len(), expected: INPUT_LEN })?;
        Self::new(values)
    }

    pub fn values(&self) -> &[f64; INPUT_LEN] {
        &self.0
    }

    pub fn uniform() -> Self {
        EncodedInput([0.25; INPUT_LEN])
    }

    pub fn basis(index: usize) -> Self {
        let mut v = [0.0; INPUT_LEN];
        v[index] = 1.0;
        EncodedInput(v)
    }
}

/// 16×16 real orthogonal matrix whose first column is the encoded vector.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix(SMatrix<f64, INPUT_LEN, INPUT_LEN>);

impl UnitaryMatrix {
    pub fn matrix(&self) -> &SMatrix<f64, INPUT_LEN, INPUT_LEN> {
        &self.0
    }

    pub fn column(&self, j: usize) -> [f64; INPUT_LEN] {
        std::array::from_fn(|i| self.0[(i, j)])
    }

    /// max |UᵀU − I|
    pub fn orthogonality_error(&self) -> f64 {
        let gram = self.0.transpose() * self.0;
        (gram - SMatrix::<f64, INPUT_LEN, INPUT_LEN>::identity()).abs().max()
    }
}

/// 7×7 average pooling of a row-major 28×28 image into a row-major 4×4 grid.
pub fn downsample(image: &[u8]) -> Result<[f64; INPUT_LEN]> {
    if image.len() != IMAGE_SIDE * IMAGE_SIDE {
        return Err(Error::ImageDimensions(image.len()));
    }
    let mut out = [0.0; INPUT_LEN];
    for (row, line) in image.chunks_exact(IMAGE_SIDE).enumerate() {
        for (col, &px) in line.iter().enumerate() {
            out[(row / POOL) * 4 + col / POOL] += f64::from(px);
        }
    }
    for v in &mut out {
        *v /= (POOL * POOL) as f64;
    }
    Ok(out)
}

/// Scales a nonnegative vector to unit L2 norm.
pub fn normalize(v: &[f64; INPUT_LEN]) -> Result<EncodedInput> {
    if let Some((index, &value)) = v.iter().enumerate().find(|(_, x)| x.is_nan() || **x < 0.0) {
        return Err(Error::NegativeEntry { index, value });
    }
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::ZeroVector);
    }
    EncodedInput::new(v.map(|x| x / norm))
}

/// Householder reflection `I − 2uuᵀ/uᵀu` with `u = e₀ − v`, which swaps e₀
/// and v. Column 0 is therefore `v`.
pub fn complete_to_unitary(v: &EncodedInput) -> UnitaryMatrix {
    let v = SVector::<f64, INPUT_LEN>::from_column_slice(v.values());
    let mut u = -v;
    u[0] += 1.0;
    let uu = u.norm_squared();
    let identity = SMatrix::<f64, INPUT_LEN, INPUT_LEN>::identity();
    if uu < 1e-300 {
        return UnitaryMatrix(identity);
    }
    let mut m = identity - (u * u.transpose()) * (2.0 / uu);
    m.set_column(0, &v);
    UnitaryMatrix(m)
}

/// Rotation angles of the binary amplitude tree. Entry `d` holds one angle
/// per pattern of register qubits `0..d` (pattern bit k = qubit k); the
/// rotation acts on register qubit `d`.
pub fn rotation_angles(v: &[f64]) -> Result<Vec<Vec<f64>>> {
    if v.len() != INPUT_LEN {
        return Err(Error::AmplitudeLength { got: v.len(), expected: INPUT_LEN });
    }
    if let Some((index, &value)) = v.iter().enumerate().find(|(_, x)| x.is_nan() || **x < 0.0) {
        return Err(Error::NegativeEntry { index, value });
    }
    if v.iter().all(|&x| x == 0.0) {
        return Err(Error::ZeroVector);
    }
    let mass = |pattern: usize, bits: usize| -> f64 {
        let mask = (1 << bits) - 1;
        v.iter()
            .enumerate()
            .filter(|(i, _)| i & mask == pattern)
            .map(|(_, x)| x * x)
            .sum()
    };
    Ok((0..INPUT_QUBITS)
        .map(|d| {
            (0..1usize << d)
                .map(|c| {
                    let left = mass(c, d + 1);
                    let right = mass(c | 1 << d, d + 1);
                    2.0 * right.sqrt().atan2(left.sqrt())
                })
                .collect()
        })
        .collect())
}

/// Gates that take `register` from |0000⟩ to the amplitudes of `v`, using
/// `aux` (left in |00⟩) for the pattern-controlled rotations.
pub fn synthesize_prep(
    v: &EncodedInput,
    register: [usize; INPUT_QUBITS],
    aux: [usize; 2],
) -> Result<Vec<Gate>> {
    let all: Vec<usize> = register.iter().chain(&aux).copied().collect();
    for (i, q) in all.iter().enumerate() {
        if all[..i].contains(q) {
            return Err(Error::DuplicateQubit(*q));
        }
    }
    let angles = rotation_angles(v.values())?;
    let mut gates = Vec::new();
    for (level, row) in angles.iter().enumerate() {
        for (pattern, &theta) in row.iter().enumerate() {
            if theta == 0.0 {
                continue;
            }
            let flips: Vec<Gate> = (0..level)
                .filter(|k| pattern >> k & 1 == 0)
                .map(|k| Gate::X(register[k]))
                .collect();
            gates.extend(&flips);
            pattern_rotation(&mut gates, level, theta, register, aux);
            gates.extend(&flips);
        }
    }
    Ok(gates)
}

/// RY(theta) on `register[level]`, controlled on every lower register qubit
/// being 1.
fn pattern_rotation(
    gates: &mut Vec<Gate>,
    level: usize,
    theta: f64,
    register: [usize; INPUT_QUBITS],
    aux: [usize; 2],
) {
    let target = register[level];
    let (compute, control) = match level {
        0 => {
            gates.push(Gate::Ry { target, theta });
            return;
        }
        1 => (vec![], register[0]),
        2 => (vec![Gate::Ccx { c0: register[0], c1: register[1], target: aux[0] }], aux[0]),
        _ => (
            vec![
                Gate::Ccx { c0: register[0], c1: register[1], target: aux[0] },
                Gate::Ccx { c0: register[2], c1: aux[0], target: aux[1] },
            ],
            aux[1],
        ),
    };
    gates.extend(&compute);
    gates.extend(controlled_ry(control, target, theta));
    gates.extend(compute.iter().rev());
}

/// RY(θ/2) · CX · RY(−θ/2) · CX, which is RY(θ) when `control` is 1 and the
/// identity otherwise.
pub fn controlled_ry(control: usize, target: usize, theta: f64) -> [Gate; 4] {
    [
        Gate::Ry { target, theta: theta / 2.0 },
        Gate::Cx { control, target },
        Gate::Ry { target, theta: -theta / 2.0 },
        Gate::Cx { control, target },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{run, Circuit};
    use crate::gate::Stage;
    use std::f64::consts::FRAC_PI_2;

    fn prep_state(v: &EncodedInput) -> crate::state::StateVector {
        let mut c = Circuit::new(6).unwrap();
        c.extend(synthesize_prep(v, [0, 1, 2, 3], [4, 5]).unwrap(), Stage::Unlabeled)
            .unwrap();
        run(&c).unwrap()
    }

    #[test]
    fn downsample_examples() {
        assert_eq!(downsample(&[0; 784]).unwrap(), [0.0; 16]);
        assert_eq!(downsample(&[255; 784]).unwrap(), [255.0; 16]);
        let mut img = [0u8; 784];
        img[0] = 49;
        let mut expected = [0.0; 16];
        expected[0] = 1.0;
        assert_eq!(downsample(&img).unwrap(), expected);
        assert_eq!(downsample(&[0; 783]), Err(Error::ImageDimensions(783)));
    }

    #[test]
    fn downsample_block_index_is_row_major() {
        // pixel (row 7, col 21) lies in block (1, 3)
        let mut img = [0u8; 784];
        img[7 * 28 + 21] = 98;
        let out = downsample(&img).unwrap();
        assert_eq!(out[7], 2.0);
        assert_eq!(out.iter().filter(|&&x| x != 0.0).count(), 1);
    }

    #[test]
    fn normalize_examples() {
        let mut v = [0.0; 16];
        v[0] = 3.0;
        v[1] = 4.0;
        let e = normalize(&v).unwrap();
        assert!((e.values()[0] - 0.6).abs() < 1e-15);
        assert!((e.values()[1] - 0.8).abs() < 1e-15);
        assert_eq!(normalize(EncodedInput::basis(0).values()).unwrap(), EncodedInput::basis(0));
        assert_eq!(normalize(&[0.0; 16]), Err(Error::ZeroVector));
        v[2] = -1.0;
        assert!(matches!(normalize(&v), Err(Error::NegativeEntry { index: 2, .. })));
    }

    #[test]
    fn encoded_input_rejects_non_unit() {
        assert!(matches!(EncodedInput::new([0.5; 16]), Err(Error::NotNormalized(_))));
        assert!(EncodedInput::from_slice(&[1.0]).is_err());
    }

    #[test]
    fn householder_basis_cases() {
        let u = complete_to_unitary(&EncodedInput::basis(0));
        assert_eq!(*u.matrix(), SMatrix::<f64, 16, 16>::identity());

        let u = complete_to_unitary(&EncodedInput::basis(1));
        assert_eq!(u.column(0), *EncodedInput::basis(1).values());
        assert_eq!(u.column(1), *EncodedInput::basis(0).values());
        assert!(u.orthogonality_error() < 1e-15);
    }

    #[test]
    fn uniform_tree_angles_are_right_angles() {
        let angles = rotation_angles(EncodedInput::uniform().values()).unwrap();
        for theta in angles.iter().flatten() {
            assert!((theta - FRAC_PI_2).abs() < 1e-15);
        }
        let s = prep_state(&EncodedInput::uniform());
        for i in 0..16 {
            assert!((s.amplitude(i).re - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn basis_zero_needs_no_gates() {
        let gates = synthesize_prep(&EncodedInput::basis(0), [0, 1, 2, 3], [4, 5]).unwrap();
        assert!(gates.is_empty());
    }

    #[test]
    fn every_basis_vector_is_prepared_exactly() {
        for i in 0..16 {
            let s = prep_state(&EncodedInput::basis(i));
            assert!((s.amplitude(i).re - 1.0).abs() < 1e-12, "basis {i}");
        }
    }

    #[test]
    fn synthesis_rejects_overlapping_qubits() {
        let e = EncodedInput::uniform();
        assert_eq!(synthesize_prep(&e, [0, 1, 2, 3], [3, 4]), Err(Error::DuplicateQubit(3)));
        assert!(matches!(
            rotation_angles(&[-0.25; 16]),
            Err(Error::NegativeEntry { index: 0, .. })
        ));
        assert_eq!(rotation_angles(&[0.0; 16]), Err(Error::ZeroVector));
    }
}
