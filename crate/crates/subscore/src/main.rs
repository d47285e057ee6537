//! Command-line front end: run experiments, aggregate quantile curves,
//! compare result files, and query ground truths.

use clap::{Args, Parser, Subcommand};
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use subscore::harness::{
    aggregate, parse_trace_csv, run_experiment, wilcoxon_signed_rank_with, write_csv, write_json,
    Alternative, ExperimentRecord, NoiseKind, RunConfig,
};
use subscore::optim::Strategy;
use subscore::sim::{build_heisenberg, ground_truth};
use subscore::{Error, Result};

#[derive(Parser)]
#[command(
    name = "subscore",
    about = "Adaptive measurement-shot budgeting for variational quantum eigensolvers",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run seeded optimization trials and export traces.
    Run(RunArgs),
    /// Aggregate a trace CSV into quantile convergence curves.
    Aggregate(AggregateArgs),
    /// Wilcoxon signed-rank comparison of final energies in two trace CSVs.
    Compare(CompareArgs),
    /// Print the exact ground-state energy of a Heisenberg chain.
    GroundTruth(GroundTruthArgs),
    /// Write a default configuration file.
    InitConfig(InitConfigArgs),
}

#[derive(Args)]
struct RunArgs {
    /// TOML configuration file; explicit flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n_qbits: Option<usize>,
    #[arg(long)]
    n_layers: Option<usize>,
    /// Circuit name (only "esu2" is built in).
    #[arg(long)]
    circuit: Option<String>,
    /// Periodic boundary conditions (rejected; open boundaries only).
    #[arg(long)]
    pbc: Option<bool>,
    /// Kernel name (only "vqe" is built in).
    #[arg(long)]
    kernel: Option<String>,
    /// Coupling constants, e.g. "-1,0,0".
    #[arg(long, value_parser = parse_triple)]
    j: Option<[f64; 3]>,
    /// Field strengths, e.g. "0,0,-1".
    #[arg(long, value_parser = parse_triple)]
    h: Option<[f64; 3]>,
    /// Optimizer: center | bound | nft.
    #[arg(long)]
    readout_strategy: Option<Strategy>,
    /// Initial CoRe threshold as a shot count.
    #[arg(long)]
    corethresh: Option<u64>,
    /// Window length for the threshold slope estimate.
    #[arg(long)]
    corethresh_width: Option<usize>,
    /// Per-point shot cap flooring the threshold.
    #[arg(long)]
    coremin_scale: Option<u64>,
    /// Gain between progress slope and threshold.
    #[arg(long)]
    corethresh_scale: Option<f64>,
    /// Total shot budget per operator group.
    #[arg(long)]
    n_iter: Option<u64>,
    /// Shots per observation for the NFT baseline.
    #[arg(long)]
    nft_shots: Option<u64>,
    /// Noise model: gaussian-exact | sampled.
    #[arg(long)]
    noise: Option<NoiseKind>,
    /// Single-shot variance override (calibrated at the start point if unset).
    #[arg(long)]
    eta2: Option<f64>,
    /// Prior standard deviation override.
    #[arg(long)]
    sigma0: Option<f64>,
    #[arg(long)]
    max_gamma: Option<f64>,
    #[arg(long)]
    gamma_steps: Option<usize>,
    /// Seeds, e.g. "0..20" or "1,5,9".
    #[arg(long, value_parser = parse_seeds)]
    seeds: Option<std::vec::Vec<u64>>,
    /// Hard cap on optimization steps (diagnostics).
    #[arg(long)]
    max_steps: Option<usize>,
    /// Output directory for trace.csv and run.json.
    #[arg(long, default_value = "results")]
    out: PathBuf,
    /// Which files to write: csv | json | both.
    #[arg(long, default_value = "both")]
    format: String,
}

#[derive(Args)]
struct AggregateArgs {
    /// Trace CSV produced by `run`.
    #[arg(long)]
    input: PathBuf,
    /// Comma-separated shot checkpoints; defaults to 40 even steps up to the
    /// largest cumulative count in the file.
    #[arg(long)]
    checkpoints: Option<String>,
    /// Quantile levels.
    #[arg(long, default_value = "0.25,0.5,0.75", value_parser = parse_levels)]
    quantiles: std::vec::Vec<f64>,
    /// Output CSV path (stdout if omitted).
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    /// Trace CSV of the candidate method.
    #[arg(long)]
    a: PathBuf,
    /// Trace CSV of the baseline method.
    #[arg(long)]
    b: PathBuf,
    /// two-sided | less | greater (alternative for "a vs b").
    #[arg(long, default_value = "two-sided")]
    alternative: String,
}

#[derive(Args)]
struct GroundTruthArgs {
    #[arg(long, default_value_t = 5)]
    n_qbits: usize,
    #[arg(long, value_parser = parse_triple, default_value = "-1,0,0")]
    j: [f64; 3],
    #[arg(long, value_parser = parse_triple, default_value = "0,0,-1")]
    h: [f64; 3],
}

#[derive(Args)]
struct InitConfigArgs {
    /// Where to write the config.
    #[arg(long, default_value = "subscore.toml")]
    path: PathBuf,
}

fn parse_triple(text: &str) -> std::result::Result<[f64; 3], String> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("expected three comma-separated values, got '{text}'"));
    }
    let mut out = [0.0; 3];
    for (slot, part) in out.iter_mut().zip(parts) {
        *slot = part.trim().parse().map_err(|e| format!("{e}"))?;
    }
    Ok(out)
}

fn parse_seeds(text: &str) -> std::result::Result<Vec<u64>, String> {
    if let Some((lo, hi)) = text.split_once("..") {
        let lo: u64 = lo.trim().parse().map_err(|e| format!("{e}"))?;
        let hi: u64 = hi.trim().parse().map_err(|e| format!("{e}"))?;
        if hi <= lo {
            return Err(format!("empty seed range '{text}'"));
        }
        return Ok((lo..hi).collect());
    }
    text.split(',')
        .map(|s| s.trim().parse().map_err(|e| format!("{e}")))
        .collect()
}

fn parse_levels(text: &str) -> std::result::Result<Vec<f64>, String> {
    text.split(',')
        .map(|s| s.trim().parse().map_err(|e| format!("{e}")))
        .collect()
}

impl RunArgs {
    fn build_config(&self) -> Result<RunConfig> {
        let mut config = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::io(path.display().to_string(), e))?;
                RunConfig::from_toml(&text)?
            }
            None => RunConfig::default(),
        };
        macro_rules! override_field {
            ($($field:ident),*) => {
                $(if let Some(value) = self.$field.clone() {
                    config.$field = value;
                })*
            };
        }
        override_field!(
            n_qbits, n_layers, circuit, pbc, kernel, j, h, readout_strategy, corethresh,
            corethresh_width, coremin_scale, corethresh_scale, n_iter, nft_shots, noise, seeds
        );
        if let Some(v) = self.eta2 {
            config.eta2 = Some(v);
        }
        if let Some(v) = self.sigma0 {
            config.sigma0 = Some(v);
        }
        if let Some(v) = self.max_gamma {
            config.max_gamma = v;
        }
        if let Some(v) = self.gamma_steps {
            config.gamma_steps = v;
        }
        if let Some(v) = self.max_steps {
            config.max_steps = Some(v);
        }
        Ok(config)
    }
}

fn cmd_run(args: &RunArgs) -> Result<()> {
    let config = args.build_config()?;
    config.validate()?;
    let traces = run_experiment(&config)?;
    std::fs::create_dir_all(&args.out)
        .map_err(|e| Error::io(args.out.display().to_string(), e))?;
    let write_csv_file = matches!(args.format.as_str(), "csv" | "both");
    let write_json_file = matches!(args.format.as_str(), "json" | "both");
    if !write_csv_file && !write_json_file {
        return Err(Error::InvalidConfig(format!(
            "unknown format '{}' (expected csv|json|both)",
            args.format
        )));
    }
    if write_csv_file {
        let path = args.out.join("trace.csv");
        write_csv(&traces, &path)?;
        println!("wrote {}", path.display());
    }
    if write_json_file {
        let path = args.out.join("run.json");
        write_json(
            &ExperimentRecord {
                config: config.clone(),
                traces: traces.clone(),
            },
            &path,
        )?;
        println!("wrote {}", path.display());
    }
    let mut finals: Vec<f64> = traces.iter().map(|t| t.final_delta_energy()).collect();
    finals.sort_by(f64::total_cmp);
    let median = finals[finals.len() / 2];
    println!(
        "{} trials ({}), median final dE = {median:.6e}",
        traces.len(),
        config.readout_strategy.as_str()
    );
    Ok(())
}

fn cmd_aggregate(args: &AggregateArgs) -> Result<()> {
    let text = std::fs::read_to_string(&args.input)
        .map_err(|e| Error::io(args.input.display().to_string(), e))?;
    let traces = parse_trace_csv(&text)?;
    let checkpoints: Vec<u64> = match &args.checkpoints {
        Some(list) => list
            .split(',')
            .map(|s| {
                s.trim()
                    .parse()
                    .map_err(|e| Error::parse("checkpoints", format!("{e}")))
            })
            .collect::<Result<_>>()?,
        None => {
            let max = traces
                .iter()
                .flat_map(|t| t.steps.last())
                .map(|s| s.cum_shots)
                .max()
                .unwrap_or(0);
            (1..=40).map(|i| max * i / 40).collect()
        }
    };
    let curves = aggregate(&traces, &checkpoints, &args.quantiles)?;
    let mut out = String::from("cum_shots");
    for level in &curves.levels {
        let _ = write!(out, ",energy_q{level},fidelity_q{level}");
    }
    out.push('\n');
    for (i, &checkpoint) in curves.checkpoints.iter().enumerate() {
        let _ = write!(out, "{checkpoint}");
        for l in 0..curves.levels.len() {
            let _ = write!(out, ",{:.12e},{:.12e}", curves.energy[l][i], curves.fidelity[l][i]);
        }
        out.push('\n');
    }
    match &args.output {
        Some(path) => {
            std::fs::write(path, out).map_err(|e| Error::io(path.display().to_string(), e))?;
            println!("wrote {}", path.display());
        }
        None => print!("{out}"),
    }
    Ok(())
}

fn cmd_compare(args: &CompareArgs) -> Result<()> {
    let read = |path: &PathBuf| -> Result<Vec<(u64, f64)>> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        let traces = parse_trace_csv(&text)?;
        Ok(traces
            .iter()
            .map(|t| {
                let best = t
                    .steps
                    .iter()
                    .map(|s| s.delta_energy)
                    .fold(f64::INFINITY, f64::min);
                (t.seed, best)
            })
            .collect())
    };
    let a = read(&args.a)?;
    let b = read(&args.b)?;
    let mut paired_a = Vec::new();
    let mut paired_b = Vec::new();
    for (seed, value) in &a {
        if let Some((_, other)) = b.iter().find(|(s, _)| s == seed) {
            paired_a.push(*value);
            paired_b.push(*other);
        }
    }
    let alternative = match args.alternative.as_str() {
        "two-sided" => Alternative::TwoSided,
        "less" => Alternative::Less,
        "greater" => Alternative::Greater,
        other => {
            return Err(Error::InvalidConfig(format!(
                "unknown alternative '{other}' (expected two-sided|less|greater)"
            )))
        }
    };
    let p = wilcoxon_signed_rank_with(&paired_a, &paired_b, alternative)?;
    println!("n = {} paired seeds, p = {p:.6e}", paired_a.len());
    Ok(())
}

fn cmd_ground_truth(args: &GroundTruthArgs) -> Result<()> {
    let hamiltonian = build_heisenberg(args.n_qbits, args.j, args.h)?;
    let (energy, _) = ground_truth(&hamiltonian)?;
    println!("{energy:.12e}");
    Ok(())
}

fn cmd_init_config(args: &InitConfigArgs) -> Result<()> {
    let config = RunConfig::default();
    std::fs::write(&args.path, config.to_toml()?)
        .map_err(|e| Error::io(args.path.display().to_string(), e))?;
    println!("wrote {}", args.path.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Aggregate(args) => cmd_aggregate(args),
        Command::Compare(args) => cmd_compare(args),
        Command::GroundTruth(args) => cmd_ground_truth(args),
        Command::InitConfig(args) => cmd_init_config(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(error) => {
            eprintln!("error: {error}");
            ExitCode::FAILURE
        }
    }
}
