use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dissip_harness::config::{parse_dims, parse_suites};
use dissip_harness::{emit_report, run_experiment, selftest_config, ExperimentConfig, Format, VerificationReport};

#[derive(Parser)]
#[command(name = "dissip", version, about = "Seeded verification runs for dissipative-matrix functional calculus")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the configured suites and write a report.
    Verify(VerifyArgs),
    /// Run the kernel oracle suite only.
    Selftest(OutputArgs),
}

#[derive(Args)]
struct VerifyArgs {
    /// Key-value config file; defaults are used when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated, e.g. 2,4,8
    #[arg(long)]
    dims: Option<String>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    quad_nodes: Option<usize>,
    /// Comma-separated subset of thm41,thm42,thm43,s2,thm51,thm52,thm53,oracles
    #[arg(long)]
    suites: Option<String>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct OutputArgs {
    /// Report path; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, default_value = "csv")]
    format: Format,
}

fn build_config(args: &VerifyArgs) -> Result<ExperimentConfig, String> {
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::from_path(path).map_err(|e| e.to_string())?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(dims) = &args.dims {
        cfg.dims = parse_dims(dims).map_err(|e| format!("--dims: {e}"))?;
    }
    if let Some(trials) = args.trials {
        cfg.trials = trials;
    }
    if let Some(n) = args.quad_nodes {
        cfg.quad_nodes = n;
    }
    if let Some(suites) = &args.suites {
        cfg.set_suites(parse_suites(suites).map_err(|e| format!("--suites: {e}"))?);
    }
    cfg.validate().map_err(|e| e.to_string())?;
    Ok(cfg)
}

fn finish(report: &VerificationReport, out: &OutputArgs) -> ExitCode {
    let written = match &out.output {
        Some(path) => emit_report(report, out.format, path),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            report.write(out.format, &mut lock).and_then(|_| Ok(lock.flush()?))
        }
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    eprint!("{}", report.summary_table());
    if report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (cfg, out) = match &cli.command {
        Command::Verify(args) => match build_config(args) {
            Ok(cfg) => (cfg, &args.output),
            Err(e) => {
                eprintln!("config error: {e}");
                return ExitCode::from(2);
            }
        },
        Command::Selftest(out) => (selftest_config(ExperimentConfig::default().seed), out),
    };
    match run_experiment(&cfg) {
        Ok(report) => finish(&report, out),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
