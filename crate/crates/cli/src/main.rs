//! `sealsim`: decode matrices, tradeoff sweeps, Monte Carlo validation, and
//! the claims report for string seals under the measurement attack.
//!
//! Exit codes: 0 success, 1 claim or validation failure, 2 usage error,
//! 3 resource limit.

mod input;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use sealsim_core::analysis::{decode_matrix, escape_nonincreasing, mi_nondecreasing, tradeoff_sweep};
use sealsim_core::claims::{all_pass, render_report, run_claims, ClaimsConfig, Fault};
use sealsim_core::montecarlo::{chi_square_check, within_sigma, GENERATOR};
use sealsim_core::report::{format_sig, sweep_csv};
use sealsim_core::{run_experiment, ErrorKind, ExperimentConfig, SealError, Strategy};

use input::{parse_grid, SealArgs, SealDescription};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] SealError),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.kind() == ErrorKind::Resource => 3,
            CliError::Io(_) => 3,
            _ => 2,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "sealsim", version, about = "Quantum string seal attack simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the decode probability matrix and its row sums.
    DecodeMatrix {
        #[command(flatten)]
        seal: SealArgs,
        /// Tradeoff parameter of the measurement family.
        #[arg(long)]
        nu: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Evaluate mutual information, guess and escape probabilities over a nu grid.
    Sweep {
        #[command(flatten)]
        seal: SealArgs,
        /// Comma list or START:STOP:COUNT.
        #[arg(long, default_value = "0:1:11")]
        grid: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Replay seeded attack rounds and compare against the closed forms.
    McValidate {
        #[command(flatten)]
        seal: SealArgs,
        #[command(flatten)]
        strategy: StrategyArgs,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run the built-in claims suite and print PASS/FAIL per claim.
    Claims {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        /// Negative control: run the suite with a deliberately broken family.
        #[arg(long, value_enum, hide = true)]
        inject_fault: Option<FaultArg>,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("strategy").required(true).args(["nu", "coin_q"])))]
struct StrategyArgs {
    /// Measurement-family attack at this tradeoff parameter.
    #[arg(long)]
    nu: Option<f64>,
    /// Coin-toss attack reading with this probability.
    #[arg(long)]
    coin_q: Option<f64>,
}

impl StrategyArgs {
    fn strategy(&self) -> Strategy {
        match (self.nu, self.coin_q) {
            (Some(nu), _) => Strategy::Chau { nu },
            (None, Some(q)) => Strategy::CoinToss { q },
            (None, None) => unreachable!("clap enforces one strategy"),
        }
    }
}

#[derive(Debug, Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write to this file instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FaultArg {
    BSign,
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn cmd_decode_matrix(seal: &SealArgs, nu: f64, output: &OutputArgs) -> Result<u8, CliError> {
    let lambda = seal.resolve()?.lambda()?;
    let dm = decode_matrix(&lambda, nu)?;
    let sums = dm.row_sums();
    let text = match output.format {
        Format::Csv => {
            let mut s = String::from("row");
            for d in 0..dm.dim() {
                s.push_str(&format!(",p{d}"));
            }
            s.push_str(",row_sum\n");
            for (i, row) in dm.rows().enumerate() {
                s.push_str(&i.to_string());
                for p in row {
                    s.push(',');
                    s.push_str(&format_sig(*p));
                }
                s.push(',');
                s.push_str(&format_sig(sums[i]));
                s.push('\n');
            }
            s
        }
        Format::Json => {
            #[derive(Serialize)]
            struct Out<'a> {
                dim: usize,
                nu: f64,
                matrix: Vec<&'a [f64]>,
                row_sums: &'a [f64],
            }
            to_json(&Out {
                dim: dm.dim(),
                nu,
                matrix: dm.rows().collect(),
                row_sums: &sums,
            })
        }
    };
    emit(&output.out, &text)?;
    Ok(0)
}

fn cmd_sweep(seal: &SealArgs, grid: &str, output: &OutputArgs) -> Result<u8, CliError> {
    let grid = parse_grid(grid)?;
    let lambda = seal.resolve()?.lambda()?;
    let points = tradeoff_sweep(&lambda, &grid)?;
    let text = match output.format {
        Format::Csv => sweep_csv(&points),
        Format::Json => to_json(&points),
    };
    emit(&output.out, &text)?;
    eprintln!(
        "mi_bits nondecreasing: {}; escape_prob nonincreasing: {}",
        mi_nondecreasing(&points),
        escape_nonincreasing(&points)
    );
    Ok(0)
}

#[derive(Serialize)]
struct McConfigRecord<'a> {
    seal: &'a SealDescription,
    strategy: Strategy,
    trials: u64,
    seed: u64,
    generator: &'static str,
}

#[derive(Serialize)]
struct McRecord<'a> {
    config: McConfigRecord<'a>,
    decode_counts: &'a [u64],
    pass_count: u64,
    trials: u64,
}

fn cmd_mc_validate(
    seal: &SealArgs,
    strategy: Strategy,
    trials: u64,
    seed: u64,
    output: &OutputArgs,
) -> Result<u8, CliError> {
    let resolved = seal.resolve()?;
    let config = ExperimentConfig {
        seal: resolved.source.clone(),
        strategy,
        trials,
        seed,
    };
    let stats = run_experiment(&config)?;
    let analytic = config.analytic()?;
    let text = match output.format {
        Format::Json => to_json(&McRecord {
            config: McConfigRecord {
                seal: &resolved.description,
                strategy,
                trials,
                seed,
                generator: GENERATOR,
            },
            decode_counts: &stats.decode_counts,
            pass_count: stats.pass_count,
            trials: stats.trials,
        }),
        Format::Csv => {
            let mut s = String::from("outcome,count,expected_prob\n");
            for (i, (c, p)) in stats.decode_counts.iter().zip(&analytic.decode_row).enumerate() {
                s.push_str(&format!("{i},{c},{}\n", format_sig(*p)));
            }
            s
        }
    };
    emit(&output.out, &text)?;

    let chi = chi_square_check(&stats, &analytic.decode_row)?;
    let pass_ok = within_sigma(stats.pass_count, stats.trials, analytic.pass_probability, 3.0);
    eprintln!(
        "chi2 = {} (99.9% critical {}, df {}): {}",
        format_sig(chi.statistic),
        format_sig(chi.critical_value),
        chi.degrees_of_freedom,
        if chi.pass { "PASS" } else { "FAIL" }
    );
    eprintln!(
        "pass rate {} vs analytic {} (3 sigma): {}",
        format_sig(stats.pass_rate()),
        format_sig(analytic.pass_probability),
        if pass_ok { "PASS" } else { "FAIL" }
    );
    Ok(if chi.pass && pass_ok { 0 } else { 1 })
}

fn cmd_claims(config: ClaimsConfig, out: &Option<PathBuf>) -> Result<u8, CliError> {
    if config.trials == 0 {
        return Err(SealError::ZeroTrials.into());
    }
    let results = run_claims(config)?;
    emit(out, &render_report(&config, &results))?;
    Ok(if all_pass(&results) { 0 } else { 1 })
}

fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::DecodeMatrix { seal, nu, output } => cmd_decode_matrix(&seal, nu, &output),
        Command::Sweep { seal, grid, output } => cmd_sweep(&seal, &grid, &output),
        Command::McValidate {
            seal,
            strategy,
            trials,
            seed,
            output,
        } => cmd_mc_validate(&seal, strategy.strategy(), trials, seed, &output),
        Command::Claims {
            seed,
            trials,
            inject_fault,
            out,
        } => cmd_claims(
            ClaimsConfig {
                seed,
                trials,
                fault: inject_fault.map(|FaultArg::BSign| Fault::FlipBSign),
            },
            &out,
        ),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            if e.exit_code() == 2 {
                eprintln!("\nRun `sealsim --help` for usage.");
            }
            ExitCode::from(e.exit_code())
        }
    }
}
