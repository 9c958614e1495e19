use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qmlp::ingest::{filter_and_encode, ClassPair, Dataset, EncodedSet};
use qmlp::trainer::{accuracy, local_search, SearchConfig};
use qmlp::{compile_network, gate_count_report, run, sample_counts_on, analyze, classify, PrepMode};
use qmlp_cli::report::{classify_all, summarize, to_jsonl};
use qmlp_cli::{load_model, model_file, qasm, read_text, write_text, CliError};
use serde_json::json;

#[derive(Parser)]
#[command(name = "qmlp", version, about = "Binary-weight perceptrons as quantum circuits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Pool and normalize images of the class pair, one JSON line each.
    Encode {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compile one image and print the gate-count report.
    Compile {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        model: PathBuf,
        /// Position among the filtered, encoded images.
        #[arg(long, default_value_t = 0)]
        index: usize,
        #[arg(long, value_enum, default_value_t = Prep::Direct)]
        prep: Prep,
    },
    /// Classify images by simulating the compiled circuits.
    Run {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        model: PathBuf,
        /// Shots per image; 0 reads exact probabilities.
        #[arg(long, default_value_t = 0)]
        shots: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Prep::Direct)]
        prep: Prep,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write one image's circuit as OpenQASM 2.0 (synthesized prep).
    ExportQasm {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 0)]
        index: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Parse a QASM file, simulate it and report the measured qubits.
    ParseQasm {
        file: PathBuf,
        #[arg(long, default_value_t = 0)]
        shots: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Search for a model by hill climbing on closed-form train accuracy.
    Train {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 2000)]
        iters: usize,
        #[arg(long, default_value_t = 4)]
        restarts: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Closed-form accuracy of a model on a data set.
    Eval {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        model: PathBuf,
    },
}

#[derive(Args)]
struct DataArgs {
    /// IDX image file, optionally gzip-compressed (.gz).
    #[arg(long)]
    images: PathBuf,
    #[arg(long)]
    labels: PathBuf,
    /// Digit pair "a,b" with a < b; a is class 0.
    #[arg(long, default_value = "3,6", value_parser = parse_classes)]
    classes: ClassPair,
    /// Keep at most this many images after filtering.
    #[arg(long)]
    limit: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Prep {
    Direct,
    Synth,
}

impl From<Prep> for PrepMode {
    fn from(p: Prep) -> Self {
        match p {
            Prep::Direct => PrepMode::Direct,
            Prep::Synth => PrepMode::Synth,
        }
    }
}

fn parse_classes(s: &str) -> Result<ClassPair, String> {
    let (a, b) = s.split_once(',').ok_or("expected two digits like 3,6")?;
    let digit = |t: &str| t.trim().parse::<u8>().map_err(|e| format!("{t:?}: {e}"));
    ClassPair::new(digit(a)?, digit(b)?).map_err(|e| e.to_string())
}

impl DataArgs {
    fn load(&self) -> Result<EncodedSet, CliError> {
        let dataset = Dataset::load(&self.images, &self.labels)?;
        let mut set = filter_and_encode(&dataset, self.classes)?;
        if let Some(limit) = self.limit {
            set.samples.truncate(limit);
        }
        Ok(set)
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => write_text(path, text),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(format!("stdout: {e}"))),
    }
}

fn pick(set: &EncodedSet, index: usize) -> Result<&qmlp::ingest::Sample, CliError> {
    set.samples
        .get(index)
        .ok_or_else(|| CliError::Usage(format!("--index {index} but only {} images selected", set.samples.len())))
}

fn execute(command: Command) -> Result<(), CliError> {
    match command {
        Command::Encode { data, out } => {
            let set = data.load()?;
            let mut text = String::new();
            for s in &set.samples {
                let line = json!({ "source_index": s.source_index, "label": s.label, "values": s.input.values() });
                text.push_str(&format!("{line}\n"));
            }
            emit(out.as_deref(), &text)
        }
        Command::Compile { data, model, index, prep } => {
            let model = load_model(&model)?;
            let set = data.load()?;
            let sample = pick(&set, index)?;
            let circuit = compile_network(&sample.input, &model, prep.into())?;
            let report = gate_count_report(&circuit);
            let line = json!({
                "source_index": sample.source_index,
                "qubits": circuit.qubit_count(),
                "total": report.total,
                "by_stage": report.by_stage,
            });
            emit(None, &format!("{line}\n"))
        }
        Command::Run { data, model, shots, seed, prep, out } => {
            let model = load_model(&model)?;
            let set = data.load()?;
            let reports = classify_all(&set.samples, &model, prep.into(), shots, seed)?;
            let summary = summarize(&reports, set.dropped, shots, seed);
            emit(out.as_deref(), &to_jsonl(&reports, &summary))
        }
        Command::ExportQasm { data, model, index, out } => {
            let model = load_model(&model)?;
            let set = data.load()?;
            let circuit = compile_network(&pick(&set, index)?.input, &model, PrepMode::Synth)?;
            emit(out.as_deref(), &qasm::export_qasm(&circuit)?)
        }
        Command::ParseQasm { file, shots, seed } => {
            let circuit = qasm::parse_qasm(&read_text(&file)?)?;
            let state = run(&circuit)?;
            let measured = circuit.measured().to_vec();
            let exact = measured.iter().map(|&q| state.marginal_prob_one(q)).collect::<qmlp::Result<Vec<_>>>()?;
            let mut line = json!({
                "qubits": circuit.qubit_count(),
                "gates": circuit.instructions().len(),
                "measured": measured,
                "probabilities": exact,
            });
            if !measured.is_empty() {
                let probabilities = if shots > 0 {
                    let counts = sample_counts_on(&state, &measured, shots, seed)?;
                    let freq = analyze(&counts, measured.len())?;
                    line["counts"] = json!(counts);
                    line["frequencies"] = json!(freq);
                    freq
                } else {
                    exact
                };
                line["predicted"] = json!(classify(&probabilities)?);
            }
            emit(None, &format!("{line}\n"))
        }
        Command::Train { data, seed, iters, restarts, out } => {
            let set = data.load()?;
            let train: Vec<_> = set.samples.iter().map(|s| (s.input, s.label)).collect();
            let result = local_search(&train, SearchConfig { seed, max_iters: iters, restarts })?;
            write_text(&out, &model_file::model_to_json(&result.model))?;
            let line = json!({
                "images": train.len(),
                "accuracy": result.accuracy,
                "iterations": result.trace.len() - 1,
                "restart": result.restart,
            });
            emit(None, &format!("{line}\n"))
        }
        Command::Eval { data, model } => {
            let model = load_model(&model)?;
            let set = data.load()?;
            let pairs: Vec<_> = set.samples.iter().map(|s| (s.input, s.label)).collect();
            let line = json!({
                "images": pairs.len(),
                "dropped": set.dropped,
                "accuracy": accuracy(&model, &pairs)?,
            });
            emit(None, &format!("{line}\n"))
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
