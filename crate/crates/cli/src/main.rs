//! `huffguard`: acoustic anomaly detection from the command line.

mod config;
mod error;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use config::{RunConfig, Tunables};
use error::CliError;

#[derive(Parser, Debug)]
#[command(
    name = "huffguard",
    version,
    about = "Adaptive Huffman tree anomaly detector"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Score a WAV file or feature CSV; writes frames.jsonl, events.jsonl and nodes.csv.
    Detect {
        #[arg(long)]
        input: PathBuf,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        tunables: Tunables,
    },
    /// Area under the ROC curve of event scores against labeled intervals.
    Eval {
        /// events.jsonl from `detect`.
        #[arg(long)]
        scores: PathBuf,
        /// CSV of `start_s,end_s,label` anomaly intervals.
        #[arg(long)]
        labels: PathBuf,
        /// Output JSON file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        tunables: Tunables,
    },
    /// Generate a synthetic feature stream and its anomaly labels.
    Synth {
        /// Feature CSV to write.
        #[arg(long)]
        features: PathBuf,
        /// Labels CSV to write.
        #[arg(long)]
        labels: PathBuf,
        #[command(flatten)]
        tunables: Tunables,
    },
    /// Print the adaptive tree after absorbing the input.
    DumpTree {
        #[arg(long)]
        input: PathBuf,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        tunables: Tunables,
    },
}

fn resolve(t: &Tunables) -> Result<RunConfig, CliError> {
    RunConfig::resolve(t.config.as_deref(), t)
}

fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Detect {
            input,
            out,
            tunables,
        } => run::detect(&input, &out, &resolve(&tunables)?),
        Command::Eval {
            scores,
            labels,
            out,
            tunables,
        } => {
            let json = run::eval(&scores, &labels, &resolve(&tunables)?)?;
            run::emit(&json, out.as_deref())
        }
        Command::Synth {
            features,
            labels,
            tunables,
        } => run::synth(&features, &labels, &resolve(&tunables)?),
        Command::DumpTree {
            input,
            out,
            tunables,
        } => {
            let text = run::dump_tree(&input, &resolve(&tunables)?)?;
            run::emit(&text, out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            e.exit()
        }
        Err(e) if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
            return fail(CliError::Usage(
                "missing subcommand (detect, eval, synth or dump-tree)".into(),
            ));
        }
        Err(e) => return fail(CliError::Usage(usage_summary(&e.to_string()))),
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(e),
    }
}

/// Clap's report up to the usage block, folded onto one line.
fn usage_summary(report: &str) -> String {
    report
        .lines()
        .take_while(|l| !l.starts_with("Usage:"))
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .collect::<Vec<_>>()
        .join(" ")
        .trim_start_matches("error: ")
        .to_string()
}

fn fail(e: CliError) -> ExitCode {
    eprintln!("{}", e.to_json_line());
    ExitCode::from(e.exit_code() as u8)
}
