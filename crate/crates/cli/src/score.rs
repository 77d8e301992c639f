use std::collections::HashMap;
use std::path::{Path, PathBuf};

use clap::Args;
use serde::{Deserialize, Serialize};
use slg_core::{score_set, EvalItem, MetricsReport, ScoreOptions, Task};

use crate::{io, CliError, SchemaArgs};

/// A generated or gold text keyed by record id. Gold files produced by
/// `convert` carry the text under `target`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TextRow {
    pub id: String,
    #[serde(alias = "target")]
    pub text: String,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    /// Predictions: JSON Lines of {id, text}.
    #[arg(long)]
    pub pred: PathBuf,
    /// Gold: JSON Lines of {id, text} or {id, target}.
    #[arg(long)]
    pub gold: PathBuf,
    #[command(flatten)]
    pub schema: SchemaArgs,
    /// Score scnm, sc-only or ner-only outputs.
    #[arg(long, default_value = "scnm")]
    pub task: Task,
    #[arg(long)]
    pub unordered_ner: bool,
    #[arg(long)]
    pub strict_sc_on_format_fail: bool,
    /// Compare raw strings without NFC normalization and trimming.
    #[arg(long)]
    pub no_normalize: bool,
    /// Write the full JSON report here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn index_ids(
    path: &Path,
    rows: &[io::Line<TextRow>],
) -> Result<HashMap<String, usize>, Vec<String>> {
    let mut map = HashMap::new();
    let mut errors = Vec::new();
    for (i, line) in rows.iter().enumerate() {
        if let Some(prev) = map.insert(line.value.id.clone(), i) {
            errors.push(format!(
                "{}:{}: duplicate id {} (first on line {})",
                path.display(),
                line.number,
                line.value.id,
                rows[prev].number
            ));
        }
    }
    if errors.is_empty() {
        Ok(map)
    } else {
        Err(errors)
    }
}

/// Joins predictions to gold on id, in gold order. Missing, extra and
/// duplicate ids are all reported together.
pub fn join(pred_path: &Path, gold_path: &Path) -> Result<Vec<EvalItem>, CliError> {
    let pred = io::read_jsonl::<TextRow>(pred_path)?;
    let gold = io::read_jsonl::<TextRow>(gold_path)?;
    let mut errors = Vec::new();
    let pred_ids = index_ids(pred_path, &pred).unwrap_or_else(|e| {
        errors.extend(e);
        HashMap::new()
    });
    let gold_ids = index_ids(gold_path, &gold).unwrap_or_else(|e| {
        errors.extend(e);
        HashMap::new()
    });
    if !errors.is_empty() {
        return Err(CliError::Ingest(errors));
    }
    let mut items = Vec::with_capacity(gold.len());
    for g in &gold {
        match pred_ids.get(&g.value.id) {
            Some(&i) => items.push(EvalItem::new(
                &g.value.id,
                &pred[i].value.text,
                &g.value.text,
            )),
            None => errors.push(format!("id {} has no prediction", g.value.id)),
        }
    }
    for p in &pred {
        if !gold_ids.contains_key(&p.value.id) {
            errors.push(format!("id {} has no gold text", p.value.id));
        }
    }
    if !errors.is_empty() {
        return Err(CliError::Ingest(errors));
    }
    if items.is_empty() {
        return Err(CliError::ingest(format!(
            "{}: EmptyDataset",
            gold_path.display()
        )));
    }
    Ok(items)
}

pub fn score(args: &ScoreArgs) -> Result<MetricsReport, CliError> {
    let schema = args.schema.load()?;
    let items = join(&args.pred, &args.gold)?;
    let opts = ScoreOptions {
        normalize: !args.no_normalize,
        unordered_ner: args.unordered_ner,
        strict_sc_on_format_fail: args.strict_sc_on_format_fail,
        task: args.task,
    };
    score_set(&items, &schema, args.schema.variant, &opts)
        .map_err(|e| CliError::ingest(e.to_string()))
}

pub fn run(args: &ScoreArgs) -> Result<(), CliError> {
    let report = score(args)?;
    if let Some(out) = &args.out {
        let mut json = report.to_json();
        json.push('\n');
        io::write_atomic(out, &json)?;
    }
    print!("{}", report.to_table());
    Ok(())
}
