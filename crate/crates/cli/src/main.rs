use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use lscsim::{exit_code, InputError, PipelineConfig};
use lscsim_core::synthetic::SyntheticConfig;

/// Simulated lexical semantic change: split a sense-annotated corpus into
/// two "time periods", derive change scores from sense frequencies, and
/// evaluate embedding models against them.
#[derive(Parser)]
#[command(name = "lscsim", version)]
struct Cli {
    /// TOML config file; flags override its keys
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory shared by all stages
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for grid jobs
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Split the corpus and write the two corpora, gold scores and testset
    Simulate(SimulateArgs),
    /// Train the model grid and write prediction files
    Models(ModelsArgs),
    /// Score prediction files against the testset
    Evaluate(EvaluateArgs),
    /// simulate, models and evaluate in sequence
    All(AllArgs),
    /// Write a generated sense-annotated corpus
    Synth(SynthArgs),
}

#[derive(Args, Default)]
struct SimulateArgs {
    /// Sense-annotated corpus
    #[arg(long)]
    input: Option<PathBuf>,
    /// Smallest annotated frequency of a target lemma
    #[arg(long)]
    target_min: Option<usize>,
    /// Largest annotated frequency of a target lemma
    #[arg(long)]
    target_max: Option<usize>,
    /// Sense probability threshold of binary change
    #[arg(long)]
    k: Option<f64>,
    /// Testset lemmas need relative error below this
    #[arg(long)]
    re_max: Option<f64>,
    /// Testset lemmas need at least this many tokens in each corpus
    #[arg(long)]
    min_freq: Option<u64>,
}

#[derive(Args, Default)]
struct ModelsArgs {
    /// Comma-separated subset of COUNT,PPMI,SVD,SGNS
    #[arg(long, value_delimiter = ',')]
    models: Option<Vec<String>>,
    /// Comma-separated subset of CI,OP,WI
    #[arg(long, value_delimiter = ',')]
    alignments: Option<Vec<String>>,
    /// Comma-separated subset of CD,LND
    #[arg(long, value_delimiter = ',')]
    measures: Option<Vec<String>>,
    /// Comma-separated dimensions of dense models
    #[arg(long, value_delimiter = ',')]
    dims: Option<Vec<usize>>,
    /// Repetitions of models with a random component
    #[arg(long)]
    iterations: Option<usize>,
    #[arg(long)]
    window: Option<usize>,
    #[arg(long)]
    k_nn: Option<usize>,
    #[arg(long)]
    epochs: Option<usize>,
}

#[derive(Args, Default)]
struct EvaluateArgs {
    /// Monte-Carlo trials of the random baseline
    #[arg(long)]
    trials: Option<usize>,
    /// Report the baselines only, ignoring prediction files
    #[arg(long)]
    baselines_only: bool,
}

#[derive(Args)]
struct AllArgs {
    #[command(flatten)]
    simulate: SimulateArgs,
    #[command(flatten)]
    models: ModelsArgs,
    #[arg(long)]
    trials: Option<usize>,
}

#[derive(Args)]
struct SynthArgs {
    /// Where to write the corpus
    #[arg(long)]
    output: PathBuf,
    /// A small corpus (a few thousand tokens) instead of a full-size one
    #[arg(long)]
    small: bool,
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

impl SimulateArgs {
    fn apply(self, c: &mut PipelineConfig) {
        if self.input.is_some() {
            c.input = self.input;
        }
        set(&mut c.split.target_min, self.target_min);
        set(&mut c.split.target_max, self.target_max);
        set(&mut c.split.k, self.k);
        set(&mut c.split.re_max, self.re_max);
        set(&mut c.split.min_freq, self.min_freq);
    }
}

impl ModelsArgs {
    fn apply(self, c: &mut PipelineConfig) {
        set(&mut c.grid.models, self.models);
        set(&mut c.grid.alignments, self.alignments);
        set(&mut c.grid.measures, self.measures);
        set(&mut c.grid.dims, self.dims);
        set(&mut c.grid.iterations, self.iterations);
        set(&mut c.grid.window, self.window);
        set(&mut c.grid.k_nn, self.k_nn);
        set(&mut c.sgns.epochs, self.epochs);
    }
}

fn run(cli: Cli) -> Result<()> {
    let mut config = match &cli.config {
        Some(path) => PipelineConfig::load(path)?,
        None => PipelineConfig::default(),
    };
    set(&mut config.out, cli.out);
    set(&mut config.seed, cli.seed);
    set(&mut config.jobs, cli.jobs);
    if config.jobs == 0 {
        return Err(InputError("--jobs must be at least 1".into()).into());
    }

    match cli.command {
        Command::Simulate(args) => {
            args.apply(&mut config);
            lscsim::cmd_simulate(&config)
        }
        Command::Models(args) => {
            args.apply(&mut config);
            lscsim::cmd_models(&config).map(|_| ())
        }
        Command::Evaluate(args) => {
            set(&mut config.evaluation.trials, args.trials);
            lscsim::cmd_evaluate(&config, args.baselines_only).map(|_| ())
        }
        Command::All(args) => {
            args.simulate.apply(&mut config);
            args.models.apply(&mut config);
            set(&mut config.evaluation.trials, args.trials);
            lscsim::cmd_all(&config).map(|_| ())
        }
        Command::Synth(args) => {
            let synth = if args.small {
                SyntheticConfig::small(config.seed)
            } else {
                SyntheticConfig {
                    seed: config.seed,
                    ..SyntheticConfig::default()
                }
            };
            lscsim::cmd_synth(&args.output, &synth)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
