//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the target exits nonzero if any criterion fails. Runs without the libtest
//! harness so the report is always shown: `cargo test -p qmlp-cli --test acceptance`.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;

use qmlp::compiler::{
    compile_hidden_neuron, effective_flip_set, flip_set_cost, RegisterLayout, NETWORK_QUBITS,
};
use qmlp::encoding::{normalize, synthesize_prep, EncodedInput, INPUT_LEN};
use qmlp::ingest::{
    filter_and_encode, parse_idx_images, parse_idx_labels, read_maybe_gz, serialize_idx_images,
    serialize_idx_labels, ClassPair, Dataset, IMAGE_MAGIC, LABEL_MAGIC,
};
use qmlp::oracle::hidden_probability;
use qmlp::trainer::{local_search, synthetic_separable_set, SearchConfig};
use qmlp::{
    analyze, classify, closed_form_network, compile_network, gate_count_report, naive_run, run,
    sample_counts_on, Circuit, Gate, IdxError, PrepMode, QnnModel, Sign, Stage, StateVector,
};
use qmlp_cli::load_model;
use qmlp_cli::qasm::{export_qasm, parse_qasm};
use qmlp_cli::report::classify_all;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);
type HeaderCase = (&'static str, Result<(), IdxError>, fn(&IdxError) -> bool);

fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

fn shipped_model() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../models/digits-3-6.json")
}

fn random_input(rng: &mut SplitMix64) -> EncodedInput {
    loop {
        let v: [f64; INPUT_LEN] = std::array::from_fn(|_| rng.random::<f64>());
        if let Ok(x) = normalize(&v) {
            return x;
        }
    }
}

fn random_sign(rng: &mut SplitMix64) -> Sign {
    if rng.random() {
        Sign::Plus
    } else {
        Sign::Minus
    }
}

fn random_signs(rng: &mut SplitMix64) -> [Sign; INPUT_LEN] {
    std::array::from_fn(|_| random_sign(rng))
}

fn random_model(rng: &mut SplitMix64) -> QnnModel {
    QnnModel {
        w1: [random_signs(rng), random_signs(rng)],
        w2: std::array::from_fn(|_| std::array::from_fn(|_| random_sign(rng))),
        norm_flag: std::array::from_fn(|_| rng.random()),
        norm_para: std::array::from_fn(|_| rng.random::<f64>()),
    }
}

fn random_gate(rng: &mut SplitMix64, n: usize) -> Gate {
    // single-qubit kinds always; two- and three-qubit kinds when they fit
    let kinds = match n {
        1 => 4,
        2 => 6,
        _ => 7,
    };
    let kind = rng.random_range(0..kinds);
    let arity = match kind {
        0..=3 => 1,
        4 | 5 => 2,
        _ => 3,
    };
    let mut q: Vec<usize> = Vec::with_capacity(arity);
    while q.len() < arity {
        let c = rng.random_range(0..n);
        if !q.contains(&c) {
            q.push(c);
        }
    }
    match kind {
        0 => Gate::X(q[0]),
        1 => Gate::H(q[0]),
        2 => Gate::Z(q[0]),
        3 => Gate::Ry { target: q[0], theta: rng.random_range(-10.0..10.0) },
        4 => Gate::Cx { control: q[0], target: q[1] },
        5 => Gate::Cz(q[0], q[1]),
        _ => Gate::Ccx { c0: q[0], c1: q[1], target: q[2] },
    }
}

fn single_neuron_state(x: &EncodedInput, w: &[Sign; INPUT_LEN]) -> StateVector {
    let mut c = Circuit::new(NETWORK_QUBITS).unwrap();
    for ins in compile_hidden_neuron(x, w, &RegisterLayout::default(), 0, PrepMode::Synth).unwrap() {
        c.push(ins.gate, ins.stage).unwrap();
    }
    run(&c).unwrap()
}

/// Criterion 1: Hidden-neuron probability law through synthesized circuits.
fn hidden_law() -> Outcome {
    let layout = RegisterLayout::default();
    let mut rng = SplitMix64::seed_from_u64(1);
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut worst_aux = 0.0f64;
    for _ in 0..200 {
        let (x, w) = (random_input(&mut rng), random_signs(&mut rng));
        let s = single_neuron_state(&x, &w);
        worst = worst.max((s.marginal_prob_one(layout.hidden[0]).unwrap() - hidden_probability(&x, &w)).abs());
        for q in layout.aux {
            worst_aux = worst_aux.max(s.marginal_prob_one(q).unwrap());
        }
    }
    let elapsed = start.elapsed();
    let detail = format!("200 cases, max err {worst:.1e}, max aux {worst_aux:.1e}, {elapsed:.2?}");
    if worst <= 1e-10 && worst_aux < 1e-12 && elapsed < Duration::from_secs(30) {
        Ok(detail)
    } else {
        Err(detail)
    }
}

/// Criterion 2: Stride kernels against the dense-matrix oracle.
fn kernels_vs_oracle() -> Outcome {
    let mut rng = SplitMix64::seed_from_u64(2);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let n = rng.random_range(1..=10);
        let len = rng.random_range(0..=60);
        let mut c = Circuit::new(n).unwrap();
        for _ in 0..len {
            c.push(random_gate(&mut rng, n), Stage::Unlabeled).unwrap();
        }
        worst = worst.max(run(&c).unwrap().max_abs_diff(&naive_run(&c).unwrap()));
    }
    let detail = format!("200 circuits, max amplitude diff {worst:.1e}");
    if worst <= 1e-12 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

/// Criterion 3: State-preparation synthesis reproduces the encoded vector.
fn prep_synthesis() -> Outcome {
    let mut rng = SplitMix64::seed_from_u64(3);
    let mut min_fid = 1.0f64;
    let mut worst_aux = 0.0f64;
    for _ in 0..100 {
        let x = random_input(&mut rng);
        let mut c = Circuit::new(6).unwrap();
        c.extend(synthesize_prep(&x, [0, 1, 2, 3], [4, 5]).unwrap(), Stage::Prep(0)).unwrap();
        let s = run(&c).unwrap();
        let mut target = x.values().to_vec();
        target.resize(64, 0.0);
        min_fid = min_fid.min(s.fidelity(&StateVector::from_real(6, &target).unwrap()));
        worst_aux = worst_aux.max(s.marginal_prob_one(4).unwrap()).max(s.marginal_prob_one(5).unwrap());
    }
    let detail = format!("100 vectors, min fidelity 1-{:.1e}, max aux {worst_aux:.1e}", 1.0 - min_fid);
    if min_fid >= 1.0 - 1e-9 && worst_aux < 1e-12 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

/// Criterion 4: Whole compiled network against closed-form probabilities.
fn network_vs_closed_form() -> Outcome {
    let layout = RegisterLayout::default();
    let mut rng = SplitMix64::seed_from_u64(4);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let (x, model) = (random_input(&mut rng), random_model(&mut rng));
        let s = run(&compile_network(&x, &model, PrepMode::Synth).unwrap()).unwrap();
        let expected = closed_form_network(&x, &model).unwrap();
        for j in 0..2 {
            for (q, p) in [
                (layout.hidden[j], expected.hidden[j]),
                (layout.raw[j], expected.raw_output[j]),
                (layout.final_out[j], expected.final_output[j]),
            ] {
                worst = worst.max((s.marginal_prob_one(q).unwrap() - p).abs());
            }
        }
    }
    let detail = format!("50 networks, max marginal err {worst:.1e}");
    if worst <= 1e-9 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

/// Criterion 5: Global sign symmetry and the majority gate-count bound.
fn sign_symmetry_and_cost() -> Outcome {
    let mut rng = SplitMix64::seed_from_u64(5);
    let x = EncodedInput::uniform();
    let mut worst = 0.0f64;
    let mut max_sign_gates = 0;
    let mut increases = 0;
    for _ in 0..50 {
        let xi = random_input(&mut rng);
        let w = random_signs(&mut rng);
        let a = single_neuron_state(&xi, &w);
        let b = single_neuron_state(&xi, &w.map(|s| -s));
        for q in 0..NETWORK_QUBITS {
            worst = worst.max((a.marginal_prob_one(q).unwrap() - b.marginal_prob_one(q).unwrap()).abs());
        }

        let model = QnnModel { w1: [w, w.map(|s| -s)], ..QnnModel::all_plus() };
        let report = gate_count_report(&compile_network(&x, &model, PrepMode::Direct).unwrap());
        for (neuron, weights) in model.w1.iter().enumerate() {
            let minus: Vec<usize> = (0..INPUT_LEN).filter(|&k| weights[k] == Sign::Minus).collect();
            let compiled = report.stage(Stage::Sign(neuron));
            assert_eq!(compiled, flip_set_cost(&effective_flip_set(weights)));
            if compiled > flip_set_cost(&minus) {
                increases += 1;
            }
            max_sign_gates = max_sign_gates.max(compiled);
        }
    }
    let detail = format!(
        "50 weight vectors, max ±w marginal diff {worst:.1e}, {increases} increases, max sign-stage gates {max_sign_gates}"
    );
    if worst <= 1e-12 && increases == 0 && max_sign_gates <= 104 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

/// Criterion 6: Shot frequencies within 5σ of exact marginals.
fn shot_statistics() -> Outcome {
    let layout = RegisterLayout::default();
    let shots = 8192u64;
    let mut rng = SplitMix64::seed_from_u64(6);
    let mut worst_sigma = 0.0f64;
    for seed in 0..20u64 {
        let (x, model) = (random_input(&mut rng), random_model(&mut rng));
        let s = run(&compile_network(&x, &model, PrepMode::Direct).unwrap()).unwrap();
        let freq = analyze(&sample_counts_on(&s, &layout.final_out, shots, seed).unwrap(), 2).unwrap();
        for (j, &q) in layout.final_out.iter().enumerate() {
            let p = s.marginal_prob_one(q).unwrap();
            let sigma = (p * (1.0 - p) / shots as f64).sqrt();
            let dev = (freq[j] - p).abs();
            if dev > 5.0 * sigma + 1e-12 {
                return Err(format!("seed {seed} qubit {q}: freq {} vs p {p}", freq[j]));
            }
            if sigma > 0.0 {
                worst_sigma = worst_sigma.max(dev / sigma);
            }
        }
    }
    Ok(format!("20 seeded runs at {shots} shots, worst deviation {worst_sigma:.2}σ"))
}

/// Criterion 7: QASM export/parse round trips.
fn qasm_round_trip() -> Outcome {
    let mut rng = SplitMix64::seed_from_u64(7);
    let mut worst = 0.0f64;
    for i in 0..100 {
        let (x, model) = (random_input(&mut rng), random_model(&mut rng));
        let circuit = compile_network(&x, &model, PrepMode::Synth).unwrap();
        let text = export_qasm(&circuit).unwrap();
        let parsed = parse_qasm(&text).map_err(|e| format!("case {i}: {e}"))?;
        if parsed != circuit {
            return Err(format!("case {i}: parsed circuit differs"));
        }
        if export_qasm(&parsed).unwrap() != text || export_qasm(&circuit).unwrap() != text {
            return Err(format!("case {i}: export is not byte-stable"));
        }
        worst = worst.max(run(&parsed).unwrap().max_abs_diff(&run(&circuit).unwrap()));
    }
    let detail = format!("100 circuits, max amplitude diff {worst:.1e}");
    if worst <= 1e-12 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

/// Criterion 8: IDX round trip on the bundled samples and header rejection.
fn idx_round_trip() -> Outcome {
    let dir = data_dir();
    for prefix in ["train", "t10k"] {
        let images = read_maybe_gz(&dir.join(format!("{prefix}-images-idx3-ubyte.gz"))).map_err(|e| e.to_string())?;
        let labels = read_maybe_gz(&dir.join(format!("{prefix}-labels-idx1-ubyte.gz"))).map_err(|e| e.to_string())?;
        let parsed_images = parse_idx_images(&images).map_err(|e| e.to_string())?;
        let parsed_labels = parse_idx_labels(&labels).map_err(|e| e.to_string())?;
        if serialize_idx_images(&parsed_images) != images || serialize_idx_labels(&parsed_labels) != labels {
            return Err(format!("{prefix}: re-serialized bytes differ"));
        }
    }
    let header = |magic: u32, rest: &[u32]| -> Vec<u8> {
        std::iter::once(magic).chain(rest.iter().copied()).flat_map(u32::to_be_bytes).collect()
    };
    let cases: Vec<HeaderCase> = vec![
        (
            "label magic in image file",
            parse_idx_images(&header(LABEL_MAGIC, &[0, 28, 28])).map(|_| ()),
            |e| *e == IdxError::LabelMagicInImageFile,
        ),
        (
            "image magic in label file",
            parse_idx_labels(&header(IMAGE_MAGIC, &[0])).map(|_| ()),
            |e| *e == IdxError::ImageMagicInLabelFile,
        ),
        ("bad magic", parse_idx_images(&header(0x0bad, &[0, 28, 28])).map(|_| ()), |e| {
            matches!(e, IdxError::BadMagic(_))
        }),
        ("short header", parse_idx_images(&IMAGE_MAGIC.to_be_bytes()).map(|_| ()), |e| {
            matches!(e, IdxError::TruncatedHeader { .. })
        }),
        ("wrong dimensions", parse_idx_images(&header(IMAGE_MAGIC, &[0, 27, 28])).map(|_| ()), |e| {
            matches!(e, IdxError::Dimensions { .. })
        }),
        ("truncated payload", parse_idx_images(&header(IMAGE_MAGIC, &[1, 28, 28])).map(|_| ()), |e| {
            matches!(e, IdxError::TruncatedPayload { .. })
        }),
    ];
    for (name, result, expected) in cases {
        match result {
            Err(e) if expected(&e) => {}
            other => return Err(format!("{name}: got {other:?}")),
        }
    }
    Ok("train and test files byte-identical, 6 malformed headers rejected".into())
}

/// Criterion 9: Shipped model on test images: shot-based labels agree with exact
/// ones, which in turn agree with the closed form.
fn shipped_model_agreement() -> Outcome {
    let dir = data_dir();
    let model = load_model(&shipped_model()).map_err(|e| e.to_string())?;
    let dataset = Dataset::load(
        &dir.join("t10k-images-idx3-ubyte.gz"),
        &dir.join("t10k-labels-idx1-ubyte.gz"),
    )
    .map_err(|e| e.to_string())?;
    let mut set = filter_and_encode(&dataset, ClassPair::default()).map_err(|e| e.to_string())?;
    set.samples.truncate(100);
    if set.samples.len() < 100 {
        return Err(format!("only {} test images", set.samples.len()));
    }
    let exact = classify_all(&set.samples, &model, PrepMode::Direct, 0, 0).map_err(|e| e.to_string())?;
    let shots = classify_all(&set.samples, &model, PrepMode::Direct, 8192, 9).map_err(|e| e.to_string())?;
    let shot_agree = exact.iter().zip(&shots).filter(|(a, b)| a.predicted == b.predicted).count();
    let closed_agree = exact
        .iter()
        .zip(&set.samples)
        .filter(|(r, s)| {
            let p = closed_form_network(&s.input, &model).unwrap();
            classify(&p.final_output).unwrap() == r.predicted
        })
        .count();
    let correct = exact.iter().filter(|r| r.predicted == r.label).count();
    let detail = format!(
        "shots vs exact {shot_agree}/100, exact vs closed form {closed_agree}/100, exact accuracy {correct}/100"
    );
    if shot_agree >= 95 && closed_agree == 100 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

/// Criterion 10: Trainer on a separable synthetic set.
fn trainer_convergence() -> Outcome {
    let data = synthetic_separable_set(50, 10);
    let config = SearchConfig { seed: 10, max_iters: 500, restarts: 1 };
    let result = local_search(&data, config).map_err(|e| e.to_string())?;
    let again = local_search(&data, config).map_err(|e| e.to_string())?;
    let monotone = result.trace.windows(2).all(|w| w[1] >= w[0]);
    let detail = format!(
        "accuracy {} after {} iterations, trace non-decreasing: {monotone}, reproducible: {}",
        result.accuracy,
        result.trace.len() - 1,
        result == again
    );
    if result.accuracy == 1.0 && monotone && result == again {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("hidden-neuron probability law", hidden_law),
        ("simulator vs dense oracle", kernels_vs_oracle),
        ("state-preparation synthesis", prep_synthesis),
        ("network vs closed form", network_vs_closed_form),
        ("sign symmetry and gate budget", sign_symmetry_and_cost),
        ("shot statistics", shot_statistics),
        ("QASM round trip", qasm_round_trip),
        ("IDX round trip", idx_round_trip),
        ("shipped model agreement", shipped_model_agreement),
        ("trainer convergence", trainer_convergence),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                println!("criterion {:>2} FAIL  {name}: {detail}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    if failed.is_empty() {
        println!("all {} criteria passed", criteria.len());
        ExitCode::SUCCESS
    } else {
        println!("failed criteria: {failed:?}");
        ExitCode::FAILURE
    }
}
