use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use credal_cli::{
    cmd_axioms, cmd_divergence, cmd_persuasion, cmd_table1, cmd_update, rule_override, tolerance_from, CliError,
    CliResult, Format, ProblemSpec, RuleKind,
};
use credal_core::axioms::SamplerConfig;
use credal_core::persuasion::PersuasionGame;
use credal_core::signals::SignalModel;

/// Updating credal sets under maxmin expected utility.
///
/// Exit codes: 0 ok, 2 parse or usage error, 3 domain precondition failed,
/// 4 unknown name. CREDAL_TOL overrides the geometric tolerance.
#[derive(Parser)]
#[command(name = "credal", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct RuleArgs {
    /// fb, ml, rml or lr; defaults to the spec's rule
    #[arg(long)]
    rule: Option<RuleKind>,
    /// Contraction weight for rml
    #[arg(long)]
    alpha: Option<f64>,
    /// Cut level for lr
    #[arg(long)]
    lambda: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Posterior vertices and conditional values after an event
    Update {
        spec: PathBuf,
        #[arg(long)]
        event: String,
        #[command(flatten)]
        rule: RuleArgs,
        #[arg(long, default_value = "csv")]
        format: Format,
    },
    /// Conditional evaluation of the bet on t1 under ambiguous signals
    Table1 {
        /// Spec whose signal_model block supplies defaults
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long)]
        lambda1: Option<f64>,
        #[arg(long)]
        lambda2: Option<f64>,
        /// Comma-separated contraction weights
        #[arg(long, value_delimiter = ',')]
        alpha: Vec<f64>,
        #[arg(long, default_value = "md")]
        format: Format,
    },
    /// Check behavioural axioms for the spec's conditional preferences
    Axioms {
        spec: PathBuf,
        /// Comma-separated axiom names, e.g. CR-C,DC-CS
        #[arg(long, value_delimiter = ',', required = true)]
        axiom: Vec<String>,
        /// Event names; all events in the spec by default
        #[arg(long, value_delimiter = ',')]
        event: Vec<String>,
        #[command(flatten)]
        rule: RuleArgs,
        /// Overrides the spec's seed
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 10)]
        constructed: usize,
        #[arg(long, default_value_t = 0.0)]
        lo: f64,
        #[arg(long, default_value_t = 10.0)]
        hi: f64,
        #[arg(long, default_value = "json")]
        format: Format,
    },
    /// Sender value of the two-kernel device over a (lambda, alpha) grid
    Persuasion {
        /// Spec whose persuasion block supplies grids and game
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        lambda: Vec<f64>,
        #[arg(long, value_delimiter = ',')]
        alpha: Vec<f64>,
        #[arg(long, default_value = "csv")]
        format: Format,
    },
    /// Whether any likelihood-ratio cut reproduces the RML posterior set
    Divergence {
        spec: PathBuf,
        #[arg(long)]
        event: String,
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 10_000)]
        grid: usize,
        #[arg(long, default_value = "csv")]
        format: Format,
    },
}

fn grid(n: usize) -> Vec<f64> {
    (0..=n).map(|k| k as f64 / n as f64).collect()
}

fn run(cli: Cli) -> CliResult<String> {
    let tol = tolerance_from(std::env::var("CREDAL_TOL").ok().as_deref())?;
    match cli.command {
        Command::Update { spec, event, rule, format } => {
            let p = ProblemSpec::load(&spec)?.resolve(tol)?;
            let r = rule_override(rule.rule, rule.alpha, rule.lambda)?;
            cmd_update(&p, &event, r.as_ref(), format)
        }
        Command::Table1 { spec, beta, lambda1, lambda2, alpha, format } => {
            let block = match spec {
                Some(path) => ProblemSpec::load(&path)?.signal_model,
                None => None,
            };
            let pick = |flag: Option<f64>, from_spec: Option<f64>, name: &str| {
                flag.or(from_spec).ok_or_else(|| CliError::Parse(format!("missing --{name}")))
            };
            let model = SignalModel::new(
                pick(beta, block.as_ref().map(|b| b.beta), "beta")?,
                pick(lambda1, block.as_ref().map(|b| b.lambda1), "lambda1")?,
                pick(lambda2, block.as_ref().map(|b| b.lambda2), "lambda2")?,
            )
            .map_err(|e| CliError::Parse(e.to_string()))?;
            let alphas = if alpha.is_empty() { block.map(|b| b.alphas).unwrap_or_default() } else { alpha };
            cmd_table1(&model, &alphas, format)
        }
        Command::Axioms { spec, axiom, event, rule, seed, samples, constructed, lo, hi, format } => {
            let p = ProblemSpec::load(&spec)?.resolve(tol)?;
            let r = rule_override(rule.rule, rule.alpha, rule.lambda)?;
            let cfg = SamplerConfig {
                lo,
                hi,
                samples,
                constructed_pairs: constructed,
                seed: seed.unwrap_or(p.seed),
                bounded: true,
            };
            cmd_axioms(&p, &axiom, &event, r.as_ref(), &cfg, format)
        }
        Command::Persuasion { spec, lambda, alpha, format } => {
            let block = match spec {
                Some(path) => ProblemSpec::load(&path)?.persuasion,
                None => None,
            };
            let game = match block.as_ref().and_then(|b| b.game.as_ref()) {
                Some(g) => g.to_game()?,
                None => PersuasionGame::example(),
            };
            let or_default = |flag: Vec<f64>, from_spec: Option<Vec<f64>>, n: usize| {
                if !flag.is_empty() {
                    flag
                } else {
                    from_spec.filter(|v| !v.is_empty()).unwrap_or_else(|| grid(n))
                }
            };
            let lambdas = or_default(lambda, block.as_ref().map(|b| b.lambdas.clone()), 10);
            let alphas = or_default(alpha, block.as_ref().map(|b| b.alphas.clone()), 4);
            cmd_persuasion(&game, &lambdas, &alphas, format)
        }
        Command::Divergence { spec, event, alpha, grid, format } => {
            let p = ProblemSpec::load(&spec)?.resolve(tol)?;
            cmd_divergence(&p, &event, alpha, grid, format)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
