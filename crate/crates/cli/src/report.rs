//! Per-image classification records and their JSONL summary.

use qmlp::compiler::RegisterLayout;
use qmlp::ingest::Sample;
use qmlp::{analyze, classify, compile_network, run, sample_counts_on, CountsMap, PrepMode, QnnModel};
use rayon::prelude::*;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ImageReport {
    pub index: usize,
    pub source_index: usize,
    pub label: usize,
    pub predicted: usize,
    /// Probability of reading 1 on each output qubit: exact marginals when
    /// `shots` is 0, sampled frequencies otherwise.
    pub probabilities: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counts: Option<CountsMap>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub images: usize,
    pub correct: usize,
    pub accuracy: f64,
    pub dropped: usize,
    pub shots: u64,
    pub seed: u64,
}

/// Compiles and simulates one image. Sampling uses `seed + index` so that
/// each image draws an independent, reproducible stream.
pub fn classify_sample(
    index: usize,
    sample: &Sample,
    model: &QnnModel,
    prep: PrepMode,
    shots: u64,
    seed: u64,
) -> qmlp::Result<ImageReport> {
    let circuit = compile_network(&sample.input, model, prep)?;
    let state = run(&circuit)?;
    let measured = RegisterLayout::default().final_out;
    let (probabilities, counts) = if shots == 0 {
        let p = measured.iter().map(|&q| state.marginal_prob_one(q)).collect::<qmlp::Result<Vec<_>>>()?;
        (p, None)
    } else {
        let counts = sample_counts_on(&state, &measured, shots, seed.wrapping_add(index as u64))?;
        (analyze(&counts, measured.len())?, Some(counts))
    };
    Ok(ImageReport {
        index,
        source_index: sample.source_index,
        label: sample.label,
        predicted: classify(&probabilities)?,
        probabilities,
        counts,
    })
}

/// Classifies every sample in parallel; results come back in input order.
pub fn classify_all(
    samples: &[Sample],
    model: &QnnModel,
    prep: PrepMode,
    shots: u64,
    seed: u64,
) -> qmlp::Result<Vec<ImageReport>> {
    samples
        .par_iter()
        .enumerate()
        .map(|(i, s)| classify_sample(i, s, model, prep, shots, seed))
        .collect()
}

pub fn summarize(reports: &[ImageReport], dropped: usize, shots: u64, seed: u64) -> Summary {
    let correct = reports.iter().filter(|r| r.predicted == r.label).count();
    Summary {
        images: reports.len(),
        correct,
        accuracy: if reports.is_empty() { 0.0 } else { correct as f64 / reports.len() as f64 },
        dropped,
        shots,
        seed,
    }
}

/// One JSON object per image, then `{"summary": ...}`.
pub fn to_jsonl(reports: &[ImageReport], summary: &Summary) -> String {
    let mut out = String::new();
    for r in reports {
        out.push_str(&serde_json::to_string(r).expect("report serializes"));
        out.push('\n');
    }
    out.push_str(&serde_json::json!({ "summary": summary }).to_string());
    out.push('\n');
    out
}
