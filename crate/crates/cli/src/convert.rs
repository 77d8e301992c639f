use std::path::PathBuf;

use clap::Args;
use serde::Serialize;
use slg_core::{convert_il, encode_pair, IlPair, Task};

use crate::stats::load_records;
use crate::{emit, io, CliError, SchemaArgs};

#[derive(Debug, Serialize)]
pub struct PairRow {
    pub id: String,
    pub input: String,
    pub target: String,
}

#[derive(Debug, Args)]
pub struct ConvertArgs {
    /// Record JSON Lines file.
    pub dataset: PathBuf,
    /// scnm, sc-only or ner-only.
    #[arg(long, default_value = "scnm")]
    pub mode: Task,
    #[command(flatten)]
    pub schema: SchemaArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(args: &ConvertArgs) -> Result<(), CliError> {
    let schema = args.schema.load()?;
    let records = load_records(&args.dataset, &schema)?;
    let mut rows = Vec::with_capacity(records.len());
    let mut errors = Vec::new();
    for r in &records {
        match encode_pair(r, &schema, args.schema.variant, args.mode) {
            Ok(p) => rows.push(PairRow {
                id: r.id().to_owned(),
                input: p.input_text,
                target: p.target_text,
            }),
            Err(e) => errors.push(format!("id {}: {e}", r.id())),
        }
    }
    if !errors.is_empty() {
        return Err(CliError::Ingest(errors));
    }
    emit(args.out.as_deref(), &io::to_jsonl(&rows))
}

#[derive(Debug, Args)]
pub struct IlConvertArgs {
    /// JSON Lines file of {surface, category} objects.
    pub dataset: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run_il(args: &IlConvertArgs) -> Result<(), CliError> {
    let lines = io::read_jsonl::<IlPair>(&args.dataset)?;
    let mut rows = Vec::with_capacity(lines.len());
    let mut errors = Vec::new();
    for line in &lines {
        match convert_il(&line.value) {
            Ok(p) => rows.push(PairRow {
                id: line.number.to_string(),
                input: p.input_text,
                target: p.target_text,
            }),
            Err(e) => errors.push(format!("{}:{}: {e}", args.dataset.display(), line.number)),
        }
    }
    if !errors.is_empty() {
        return Err(CliError::Ingest(errors));
    }
    emit(args.out.as_deref(), &io::to_jsonl(&rows))
}
