use std::path::{Path, PathBuf};

use clap::Args;
use indexmap::IndexMap;
use serde::Serialize;
use slg_core::{validate_record, EntityMention, LabelSchema, RawRecord, ScnmRecord};

use crate::{emit, io, load_schema, CliError};

#[derive(Debug, Args)]
pub struct StatsArgs {
    /// Record JSON Lines file.
    pub dataset: PathBuf,
    #[arg(long)]
    pub schema: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StatsReport {
    pub sentences: usize,
    pub positives: usize,
    pub negatives: usize,
    pub entities: usize,
    pub sc_labels: IndexMap<String, usize>,
    pub ner_labels: IndexMap<String, usize>,
}

impl StatsReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("stats serialize");
        s.push('\n');
        s
    }
}

/// Reads and validates a record file; every bad line is reported with its line number.
pub fn load_records(path: &Path, schema: &LabelSchema) -> Result<Vec<ScnmRecord>, CliError> {
    let lines = io::read_jsonl::<RawRecord>(path)?;
    let mut records = Vec::with_capacity(lines.len());
    let mut errors = Vec::new();
    for line in lines {
        match validate_record(&line.value, schema) {
            Ok(r) => records.push(r),
            Err(violations) => {
                for v in violations {
                    errors.push(format!(
                        "{}:{} (id {}): {v}",
                        path.display(),
                        line.number,
                        line.value.id
                    ));
                }
            }
        }
    }
    if errors.is_empty() {
        Ok(records)
    } else {
        Err(CliError::Ingest(errors))
    }
}

pub fn compute(records: &[ScnmRecord], schema: &LabelSchema) -> StatsReport {
    let mut sc_labels: IndexMap<String, usize> =
        schema.sc_labels.iter().map(|l| (l.clone(), 0)).collect();
    let mut ner_labels: IndexMap<String, usize> =
        schema.ner_labels.iter().map(|l| (l.clone(), 0)).collect();
    let mut negatives = 0;
    let mut entities = 0;
    for r in records {
        *sc_labels.entry(r.sc_label().to_owned()).or_default() += 1;
        if r.is_negative() {
            negatives += 1;
        }
        for e in r.entities() {
            entities += 1;
            *ner_labels.entry(e.label.clone()).or_default() += 1;
        }
    }
    StatsReport {
        sentences: records.len(),
        positives: records.len() - negatives,
        negatives,
        entities,
        sc_labels,
        ner_labels,
    }
}

pub fn stats(path: &Path, schema: &LabelSchema) -> Result<StatsReport, CliError> {
    let records = load_records(path, schema)?;
    if records.is_empty() {
        return Err(CliError::ingest(format!(
            "{}: EmptyDataset",
            path.display()
        )));
    }
    Ok(compute(&records, schema))
}

pub fn run(args: &StatsArgs) -> Result<(), CliError> {
    let schema = load_schema(args.schema.as_deref())?;
    let report = stats(&args.dataset, &schema)?;
    emit(args.out.as_deref(), &report.to_json())
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 5343)]
    pub sentences: usize,
    #[arg(long, default_value_t = 484)]
    pub negatives: usize,
    #[arg(long, default_value_t = 13185)]
    pub entities: usize,
    #[arg(long)]
    pub schema: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// A deterministic corpus with exactly the requested counts. Negatives are
/// spread evenly; entities are spread as evenly as possible over positives;
/// SC and NER labels cycle through the schema.
pub fn synthesize(
    sentences: usize,
    negatives: usize,
    entities: usize,
    schema: &LabelSchema,
) -> Result<Vec<RawRecord>, CliError> {
    let positives = sentences
        .checked_sub(negatives)
        .ok_or_else(|| CliError::Usage("more negatives than sentences".into()))?;
    if (positives == 0 && entities > 0) || entities < positives {
        return Err(CliError::Usage(format!(
            "{entities} entities cannot be spread over {positives} positive sentences"
        )));
    }
    let (base, extra) = match positives {
        0 => (0, 0),
        p => (entities / p, entities % p),
    };
    let mut records = Vec::with_capacity(sentences);
    let mut label_cursor = 0;
    let mut positive_index = 0;
    for i in 0..sentences {
        let negative = (i + 1) * negatives / sentences != i * negatives / sentences;
        let sc_label = schema.sc_labels[i % schema.sc_labels.len()].clone();
        let (sentence, ents) = if negative {
            (
                format!("Record {i} mentions nothing in particular."),
                Vec::new(),
            )
        } else {
            let k = base + usize::from(positive_index < extra);
            positive_index += 1;
            let ents: Vec<EntityMention> = (0..k)
                .map(|j| {
                    let label = &schema.ner_labels[label_cursor % schema.ner_labels.len()];
                    label_cursor += 1;
                    EntityMention::new(label, format!("{label}{i}x{j}"))
                })
                .collect();
            let spans: Vec<&str> = ents.iter().map(|e| e.span_text.as_str()).collect();
            (
                format!("Record {i} mentions {}.", spans.join(" and ")),
                ents,
            )
        };
        records.push(RawRecord {
            id: format!("s{i:05}"),
            sentence,
            sc_label,
            entities: ents,
        });
    }
    Ok(records)
}

pub fn run_synth(args: &SynthArgs) -> Result<(), CliError> {
    let schema = load_schema(args.schema.as_deref())?;
    let records = synthesize(args.sentences, args.negatives, args.entities, &schema)?;
    emit(args.out.as_deref(), &io::to_jsonl(&records))
}
