//! Hill climbing over binary weights, normalization flags and a 0.05 grid of
//! normalization parameters, scored by closed-form train accuracy.

use rand::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;
use rayon::prelude::*;

use crate::encoding::{normalize, EncodedInput, INPUT_LEN};
use crate::error::{Error, Result};
use crate::model::{QnnModel, Sign, HIDDEN, OUTPUTS};
use crate::oracle::{classify, closed_form_network};

/// norm_para grid: k / PARA_STEPS for k in 0..=PARA_STEPS.
const PARA_STEPS: u32 = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchConfig {
    pub seed: u64,
    pub max_iters: usize,
    pub restarts: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { seed: 0, max_iters: 2000, restarts: 4 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub model: QnnModel,
    pub accuracy: f64,
    /// Accuracy of the current model before the first move and after each
    /// iteration of the winning restart.
    pub trace: Vec<f64>,
    pub restart: usize,
}

#[derive(Debug, Clone, Copy)]
enum Move {
    FlipHidden(usize, usize),
    FlipOutput(usize, usize),
    ToggleFlag(usize),
    StepPara(usize, bool),
}

const MOVE_COUNT: usize = HIDDEN * INPUT_LEN + OUTPUTS * HIDDEN + OUTPUTS + 2 * OUTPUTS;

impl Move {
    fn from_index(mut i: usize) -> Move {
        if i < HIDDEN * INPUT_LEN {
            return Move::FlipHidden(i / INPUT_LEN, i % INPUT_LEN);
        }
        i -= HIDDEN * INPUT_LEN;
        if i < OUTPUTS * HIDDEN {
            return Move::FlipOutput(i / HIDDEN, i % HIDDEN);
        }
        i -= OUTPUTS * HIDDEN;
        if i < OUTPUTS {
            return Move::ToggleFlag(i);
        }
        i -= OUTPUTS;
        Move::StepPara(i / 2, i.is_multiple_of(2))
    }
}

/// Search state with norm_para kept as integer grid steps.
#[derive(Debug, Clone)]
struct Candidate {
    model: QnnModel,
    para_steps: [u32; OUTPUTS],
}

impl Candidate {
    fn random(rng: &mut SplitMix64) -> Self {
        let mut sign = || if rng.random::<bool>() { Sign::Plus } else { Sign::Minus };
        let w1 = std::array::from_fn(|_| std::array::from_fn(|_| sign()));
        let w2 = std::array::from_fn(|_| std::array::from_fn(|_| sign()));
        let norm_flag = std::array::from_fn(|_| rng.random());
        let para_steps: [u32; OUTPUTS] = std::array::from_fn(|_| rng.random_range(0..=PARA_STEPS));
        let norm_para = para_steps.map(|k| f64::from(k) / f64::from(PARA_STEPS));
        Candidate { model: QnnModel { w1, w2, norm_flag, norm_para }, para_steps }
    }

    fn apply(&self, mv: Move) -> Candidate {
        let mut next = self.clone();
        let m = &mut next.model;
        match mv {
            Move::FlipHidden(i, k) => m.w1[i][k] = -m.w1[i][k],
            Move::FlipOutput(j, i) => m.w2[j][i] = -m.w2[j][i],
            Move::ToggleFlag(j) => m.norm_flag[j] = !m.norm_flag[j],
            Move::StepPara(j, up) => {
                let k = &mut next.para_steps[j];
                *k = if up { (*k + 1).min(PARA_STEPS) } else { k.saturating_sub(1) };
                m.norm_para[j] = f64::from(*k) / f64::from(PARA_STEPS);
            }
        }
        next
    }
}

/// Fraction of `data` the closed-form network labels correctly.
pub fn accuracy(model: &QnnModel, data: &[(EncodedInput, usize)]) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    let mut correct = 0;
    for (x, label) in data {
        let probs = closed_form_network(x, model)?;
        if classify(&probs.final_output)? == *label {
            correct += 1;
        }
    }
    Ok(correct as f64 / data.len() as f64)
}

fn climb(data: &[(EncodedInput, usize)], seed: u64, max_iters: usize) -> Result<(QnnModel, f64, Vec<f64>)> {
    let mut rng = SplitMix64::seed_from_u64(seed);
    let mut current = Candidate::random(&mut rng);
    let mut score = accuracy(&current.model, data)?;
    let mut trace = vec![score];
    for _ in 0..max_iters {
        if score == 1.0 {
            break;
        }
        let candidate = current.apply(Move::from_index(rng.random_range(0..MOVE_COUNT)));
        let candidate_score = accuracy(&candidate.model, data)?;
        if candidate_score >= score {
            current = candidate;
            score = candidate_score;
        }
        trace.push(score);
    }
    Ok((current.model, score, trace))
}

/// Runs `restarts` independent climbs (restart r seeded with `seed + r`)
/// and keeps the most accurate; ties go to the lowest restart.
pub fn local_search(data: &[(EncodedInput, usize)], config: SearchConfig) -> Result<SearchResult> {
    if data.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    let runs: Vec<(QnnModel, f64, Vec<f64>)> = (0..config.restarts.max(1))
        .into_par_iter()
        .map(|r| climb(data, config.seed.wrapping_add(r as u64), config.max_iters))
        .collect::<Result<_>>()?;
    let (restart, (model, accuracy, trace)) = runs
        .into_iter()
        .enumerate()
        .reduce(|best, next| if next.1 .1 > best.1 .1 { next } else { best })
        .expect("at least one restart");
    Ok(SearchResult { model, accuracy, trace, restart })
}

/// Two linearly separable clusters: class 0 concentrated on amplitude 0,
/// class 1 on amplitude 15, each over a seeded low-level background.
pub fn synthetic_separable_set(per_class: usize, seed: u64) -> Vec<(EncodedInput, usize)> {
    let mut rng = SplitMix64::seed_from_u64(seed);
    let mut out = Vec::with_capacity(2 * per_class);
    for _ in 0..per_class {
        for (label, peak) in [(0, 0), (1, INPUT_LEN - 1)] {
            let mut v: [f64; INPUT_LEN] = std::array::from_fn(|_| 0.5 + 0.5 * rng.random::<f64>());
            v[peak] = 4.0 + rng.random::<f64>();
            out.push((normalize(&v).expect("positive entries"), label));
        }
    }
    out
}
