//! Compiles a [`QnnModel`] and one [`EncodedInput`] into an 18-qubit circuit.
//!
//! Each hidden neuron owns a 4-qubit input register: prepare the input,
//! negate the amplitudes whose weight is −1, then Hadamard-accumulate the
//! weighted sum into |0000⟩ and copy the "all zeros" event onto the hidden
//! qubit. Its one-probability is (Σ w·x)²/16. Output neuron j reads the two
//! hidden qubits as independent random variables, multiplies them into a
//! raw qubit, and combines that with a γ-biased normalization qubit.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;

use crate::circuit::Circuit;
use crate::encoding::{synthesize_prep, EncodedInput, INPUT_LEN, INPUT_QUBITS};
use crate::error::{Error, Result};
use crate::gate::{Gate, Instruction, Stage};
use crate::model::{QnnModel, Sign, HIDDEN, OUTPUTS};

pub const NETWORK_QUBITS: usize = 18;

/// Absolute qubit indices of every register in the compiled network.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegisterLayout {
    pub input: [[usize; INPUT_QUBITS]; HIDDEN],
    pub aux: [usize; 2],
    pub hidden: [usize; HIDDEN],
    pub raw: [usize; OUTPUTS],
    pub norm: [usize; OUTPUTS],
    pub final_out: [usize; OUTPUTS],
}

impl Default for RegisterLayout {
    /// input0 = 0..4, input1 = 4..8, aux = 8,9, hidden = 10,11, raw = 12,13,
    /// norm = 14,15, final = 16,17.
    fn default() -> Self {
        RegisterLayout {
            input: [[0, 1, 2, 3], [4, 5, 6, 7]],
            aux: [8, 9],
            hidden: [10, 11],
            raw: [12, 13],
            norm: [14, 15],
            final_out: [16, 17],
        }
    }
}

impl RegisterLayout {
    pub fn named_registers(&self) -> Vec<(String, Vec<usize>)> {
        let mut regs: Vec<(String, Vec<usize>)> = self
            .input
            .iter()
            .enumerate()
            .map(|(i, r)| (format!("input{i}"), r.to_vec()))
            .collect();
        regs.push(("aux".into(), self.aux.to_vec()));
        regs.push(("hidden".into(), self.hidden.to_vec()));
        regs.push(("raw".into(), self.raw.to_vec()));
        regs.push(("norm".into(), self.norm.to_vec()));
        regs.push(("final".into(), self.final_out.to_vec()));
        regs
    }

    pub fn validate(&self) -> Result<()> {
        let all: Vec<usize> = self.named_registers().into_iter().flat_map(|(_, q)| q).collect();
        if let Some(&q) = all.iter().find(|&&q| q >= NETWORK_QUBITS) {
            return Err(Error::QubitOutOfRange { index: q, qubit_count: NETWORK_QUBITS });
        }
        distinct(&all)
    }
}

/// How each input register reaches the encoded amplitudes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PrepMode {
    /// Write the amplitudes into the initial state (simulator only).
    #[default]
    Direct,
    /// Emit the rotation-tree gates (exportable).
    Synth,
}

fn distinct(qubits: &[usize]) -> Result<()> {
    for (i, q) in qubits.iter().enumerate() {
        if qubits[..i].contains(q) {
            return Err(Error::DuplicateQubit(*q));
        }
    }
    Ok(())
}

/// Phase −1 on the component where c0, c1, c2 and `target` are all 1.
pub fn cccz(c0: usize, c1: usize, c2: usize, target: usize, aux0: usize, aux1: usize) -> Result<[Gate; 5]> {
    distinct(&[c0, c1, c2, target, aux0, aux1])?;
    Ok([
        Gate::Ccx { c0, c1, target: aux0 },
        Gate::Ccx { c0: c2, c1: aux0, target: aux1 },
        Gate::Cz(aux1, target),
        Gate::Ccx { c0: c2, c1: aux0, target: aux1 },
        Gate::Ccx { c0, c1, target: aux0 },
    ])
}

/// Flips `target` when all four controls are 1.
pub fn ccccx(controls: [usize; 4], target: usize, aux: [usize; 2]) -> Result<[Gate; 5]> {
    let [c0, c1, c2, c3] = controls;
    distinct(&[c0, c1, c2, c3, target, aux[0], aux[1]])?;
    Ok([
        Gate::Ccx { c0, c1, target: aux[0] },
        Gate::Ccx { c0: c2, c1: c3, target: aux[1] },
        Gate::Ccx { c0: aux[0], c1: aux[1], target },
        Gate::Ccx { c0: c2, c1: c3, target: aux[1] },
        Gate::Ccx { c0, c1, target: aux[0] },
    ])
}

/// Gates spent negating basis state `index`: one X pair per zero bit plus
/// the 5-gate cccz.
pub fn flip_cost(index: usize) -> usize {
    let zeros = (0..INPUT_QUBITS).filter(|b| index >> b & 1 == 0).count();
    2 * zeros + 5
}

pub fn flip_set_cost(set: &[usize]) -> usize {
    set.iter().map(|&i| flip_cost(i)).sum()
}

/// Basis states to negate for weights `w`. Negating every amplitude is a
/// global phase, so the complement works too; it is used when it needs
/// fewer gates (then fewer states).
pub fn effective_flip_set(w: &[Sign; INPUT_LEN]) -> Vec<usize> {
    let minus: Vec<usize> = (0..INPUT_LEN).filter(|&i| w[i] == Sign::Minus).collect();
    let plus: Vec<usize> = (0..INPUT_LEN).filter(|&i| w[i] == Sign::Plus).collect();
    let key = |set: &[usize]| (flip_set_cost(set), set.len());
    if key(&plus) < key(&minus) {
        plus
    } else {
        minus
    }
}

/// Negates the amplitude of every basis state in `set`.
pub fn compile_flip_set(set: &[usize], register: [usize; INPUT_QUBITS], aux: [usize; 2]) -> Result<Vec<Gate>> {
    let [r0, r1, r2, r3] = register;
    let phase = cccz(r0, r1, r2, r3, aux[0], aux[1])?;
    let mut gates = Vec::new();
    for &index in set {
        let flips: Vec<Gate> = (0..INPUT_QUBITS)
            .filter(|b| index >> b & 1 == 0)
            .map(|b| Gate::X(register[b]))
            .collect();
        gates.extend(&flips);
        gates.extend(phase);
        gates.extend(&flips);
    }
    Ok(gates)
}

pub fn compile_sign_stage(w: &[Sign; INPUT_LEN], register: [usize; INPUT_QUBITS], aux: [usize; 2]) -> Result<Vec<Gate>> {
    compile_flip_set(&effective_flip_set(w), register, aux)
}

/// H and X on the register, then copy "register = 1111" onto `hidden`.
pub fn compile_quadratic_stage(register: [usize; INPUT_QUBITS], hidden: usize, aux: [usize; 2]) -> Result<Vec<Gate>> {
    let extract = ccccx(register, hidden, aux)?;
    let mut gates: Vec<Gate> = register.iter().map(|&q| Gate::H(q)).collect();
    gates.extend(register.iter().map(|&q| Gate::X(q)));
    gates.extend(extract);
    Ok(gates)
}

fn staged(gates: impl IntoIterator<Item = Gate>, stage: Stage) -> impl Iterator<Item = Instruction> {
    gates.into_iter().map(move |gate| Instruction { gate, stage })
}

/// Hidden neuron `neuron` on its own input register. With
/// [`PrepMode::Direct`] the preparation is left to the circuit's init.
pub fn compile_hidden_neuron(
    x: &EncodedInput,
    w: &[Sign; INPUT_LEN],
    layout: &RegisterLayout,
    neuron: usize,
    prep: PrepMode,
) -> Result<Vec<Instruction>> {
    layout.validate()?;
    let register = layout.input[neuron];
    let mut out = Vec::new();
    if prep == PrepMode::Synth {
        out.extend(staged(synthesize_prep(x, register, layout.aux)?, Stage::Prep(neuron)));
    }
    out.extend(staged(compile_sign_stage(w, register, layout.aux)?, Stage::Sign(neuron)));
    out.extend(staged(
        compile_quadratic_stage(register, layout.hidden[neuron], layout.aux)?,
        Stage::Quadratic(neuron),
    ));
    Ok(out)
}

/// Output neuron `neuron`: raw = AND of the hidden qubits (each negated
/// when its weight is −1), then AND/OR with a qubit rotated to read 1 with
/// probability `gamma`. Hidden qubits are restored afterwards.
pub fn compile_output_neuron(
    w2: &[Sign; HIDDEN],
    norm_flag: bool,
    gamma: f64,
    layout: &RegisterLayout,
    neuron: usize,
) -> Result<Vec<Instruction>> {
    layout.validate()?;
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::ParameterRange { field: format!("norm_para[{neuron}]"), value: gamma });
    }
    let [h0, h1] = layout.hidden;
    let raw = layout.raw[neuron];
    let norm = layout.norm[neuron];
    let fin = layout.final_out[neuron];

    let negate: Vec<Gate> = layout
        .hidden
        .iter()
        .zip(w2)
        .filter(|(_, &s)| s == Sign::Minus)
        .map(|(&q, _)| Gate::X(q))
        .collect();
    let mut product = negate.clone();
    product.push(Gate::Ccx { c0: h0, c1: h1, target: raw });
    product.extend(&negate);

    let mut combine = vec![Gate::Ry { target: norm, theta: 2.0 * gamma.sqrt().asin() }];
    if norm_flag {
        combine.push(Gate::Ccx { c0: raw, c1: norm, target: fin });
    } else {
        // final = raw OR norm = NOT(NOT raw AND NOT norm)
        combine.extend([
            Gate::X(raw),
            Gate::X(norm),
            Gate::Ccx { c0: raw, c1: norm, target: fin },
            Gate::X(fin),
            Gate::X(raw),
            Gate::X(norm),
        ]);
    }
    Ok(staged(product, Stage::Output(neuron))
        .chain(staged(combine, Stage::Norm(neuron)))
        .collect())
}

/// Both input registers hold `x`; every other qubit starts at 0.
fn direct_init(x: &EncodedInput, layout: &RegisterLayout) -> Vec<Complex64> {
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << NETWORK_QUBITS];
    let place = |value: usize, register: &[usize; INPUT_QUBITS]| -> usize {
        register.iter().enumerate().map(|(b, &q)| (value >> b & 1) << q).sum()
    };
    let v = x.values();
    for a in 0..INPUT_LEN {
        for b in 0..INPUT_LEN {
            let index = place(a, &layout.input[0]) | place(b, &layout.input[1]);
            amps[index] = Complex64::new(v[a] * v[b], 0.0);
        }
    }
    amps
}

pub fn compile_network(x: &EncodedInput, model: &QnnModel, prep: PrepMode) -> Result<Circuit> {
    compile_network_with_layout(x, model, prep, &RegisterLayout::default())
}

pub fn compile_network_with_layout(
    x: &EncodedInput,
    model: &QnnModel,
    prep: PrepMode,
    layout: &RegisterLayout,
) -> Result<Circuit> {
    model.validate()?;
    layout.validate()?;
    let mut circuit = Circuit::new(NETWORK_QUBITS)?;
    for (name, qubits) in layout.named_registers() {
        circuit.add_register(name, qubits)?;
    }
    if prep == PrepMode::Direct {
        circuit.set_init(direct_init(x, layout))?;
    }
    for neuron in 0..HIDDEN {
        for ins in compile_hidden_neuron(x, &model.w1[neuron], layout, neuron, prep)? {
            circuit.push(ins.gate, ins.stage)?;
        }
    }
    for neuron in 0..OUTPUTS {
        let block = compile_output_neuron(
            &model.w2[neuron],
            model.norm_flag[neuron],
            model.norm_para[neuron],
            layout,
            neuron,
        )?;
        for ins in block {
            circuit.push(ins.gate, ins.stage)?;
        }
    }
    circuit.set_measured(layout.final_out.to_vec())?;
    Ok(circuit)
}

/// Gate totals per compile stage.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GateCountReport {
    pub total: usize,
    pub by_stage: BTreeMap<String, usize>,
    #[serde(skip)]
    counts: BTreeMap<Stage, usize>,
}

impl GateCountReport {
    pub fn stage(&self, stage: Stage) -> usize {
        self.counts.get(&stage).copied().unwrap_or(0)
    }
}

pub fn gate_count_report(circuit: &Circuit) -> GateCountReport {
    let mut counts = BTreeMap::new();
    for ins in circuit.instructions() {
        *counts.entry(ins.stage).or_insert(0) += 1;
    }
    GateCountReport {
        total: circuit.instructions().len(),
        by_stage: counts.iter().map(|(s, &n)| (s.to_string(), n)).collect(),
        counts,
    }
}
