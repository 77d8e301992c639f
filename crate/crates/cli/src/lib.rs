//! Command-line harness around `slg-core`: corpus statistics, train/test
//! split, conversion to seq2seq pairs, mock predictions and scoring.
//!
//! Exit codes: 0 success, 1 validation or ingest failure, 2 usage error.
//! Accuracy values never affect the exit code.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use slg_core::{FormatVariant, LabelSchema};
use thiserror::Error;

pub mod convert;
pub mod io;
pub mod mock;
pub mod score;
pub mod split;
pub mod stats;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{}", .0.join("\n"))]
    Ingest(Vec<String>),
}

impl CliError {
    pub fn ingest(msg: impl Into<String>) -> Self {
        CliError::Ingest(vec![msg.into()])
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io { .. } | CliError::Ingest(_) => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "slg",
    version,
    about = "Joint SC + NER seq2seq corpus, mock and scoring tools"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Corpus counts and label histograms.
    Stats(stats::StatsArgs),
    /// Shuffle and split a corpus into train and test files.
    Split(split::SplitArgs),
    /// Convert records into {id, input, target} sequence pairs.
    Convert(convert::ConvertArgs),
    /// Score predictions against gold targets.
    Score(score::ScoreArgs),
    /// Produce mock predictions with planned corruptions.
    Mock(mock::MockArgs),
    /// Convert {surface, category} lines into sequence pairs.
    IlConvert(convert::IlConvertArgs),
    /// Write a deterministic synthetic corpus with given counts.
    Synth(stats::SynthArgs),
}

/// Flags shared by the schema-aware commands.
#[derive(Debug, Clone, Args)]
pub struct SchemaArgs {
    /// Label schema JSON file (default: built-in romanized schema).
    #[arg(long)]
    pub schema: Option<PathBuf>,
    /// Format variant f1..f5.
    #[arg(long, default_value = "f5")]
    pub variant: FormatVariant,
}

impl SchemaArgs {
    pub fn load(&self) -> Result<LabelSchema, CliError> {
        load_schema(self.schema.as_deref())
    }
}

pub fn load_schema(path: Option<&Path>) -> Result<LabelSchema, CliError> {
    match path {
        None => Ok(LabelSchema::default_schema()),
        Some(p) => LabelSchema::from_json_str(&io::read_to_string(p)?)
            .map_err(|e| CliError::ingest(format!("{}: {e}", p.display()))),
    }
}

/// Prints to stdout or writes atomically to `out`.
pub(crate) fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => io::write_atomic(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Stats(a) => stats::run(&a),
        Command::Split(a) => split::run(&a),
        Command::Convert(a) => convert::run(&a),
        Command::Score(a) => score::run(&a),
        Command::Mock(a) => mock::run(&a),
        Command::IlConvert(a) => convert::run_il(&a),
        Command::Synth(a) => stats::run_synth(&a),
    }
}
