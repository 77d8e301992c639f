//! Strict exact-match evaluation of generated text against gold text.
//!
//! Four accuracies are computed over a set of items, each the number of
//! correct items divided by the number of items:
//!
//! * SCNM accuracy: the whole generated text equals the gold text.
//! * SC accuracy: the SC section of both texts is equal.
//! * NER accuracy: the complete ordered (label, span) list of both texts is equal.
//! * Format accuracy: the generated text has the target grammar's shape,
//!   regardless of whether its labels are right.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;
use unicode_normalization::UnicodeNormalization;

use crate::codec::{parse_sc_block, parse_task, FormatVariant, Task};
use crate::schema::{EntityMention, LabelSchema};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvalItem {
    pub id: String,
    pub generated: String,
    pub actual: String,
}

impl EvalItem {
    pub fn new(
        id: impl Into<String>,
        generated: impl Into<String>,
        actual: impl Into<String>,
    ) -> Self {
        EvalItem {
            id: id.into(),
            generated: generated.into(),
            actual: actual.into(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ScoreOptions {
    /// NFC-normalize and trim outer whitespace before comparing.
    pub normalize: bool,
    /// Compare entity lists as multisets instead of sequences.
    pub unordered_ner: bool,
    /// Count SC as wrong whenever the generated format is broken.
    pub strict_sc_on_format_fail: bool,
    #[serde(serialize_with = "serialize_display")]
    pub task: Task,
}

fn serialize_display<S: serde::Serializer>(task: &Task, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(task)
}

impl Default for ScoreOptions {
    fn default() -> Self {
        ScoreOptions {
            normalize: true,
            unordered_ner: false,
            strict_sc_on_format_fail: false,
            task: Task::Scnm,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub id: String,
    pub text_ok: bool,
    pub sc_ok: bool,
    pub ner_ok: bool,
    pub format_ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Informational {
    pub note: &'static str,
    /// Gold entities recovered by the generated list (multiset match), over all gold entities.
    pub entity_micro_recall: Option<f64>,
    pub matched_entities: usize,
    pub gold_entities: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MetricsReport {
    pub options: ScoreOptions,
    pub c_text: usize,
    pub t_text: usize,
    pub c_sc: usize,
    pub t_sc: usize,
    pub c_ner: usize,
    pub t_ner: usize,
    pub c_format: usize,
    pub t_format: usize,
    pub scnm_acc: f64,
    pub sc_acc: f64,
    pub ner_acc: f64,
    pub format_acc: f64,
    pub informational: Informational,
    pub per_item: Vec<Verdict>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MetricsError {
    #[error("no items to score")]
    EmptySet,
    #[error("gold text for item {id:?} is not format-valid: {error}")]
    GoldFormatInvalid { id: String, error: String },
}

/// NFC normalization followed by trimming of leading and trailing whitespace.
pub fn normalize(text: &str) -> String {
    let composed: String = text.nfc().collect();
    composed.trim().to_owned()
}

fn prepare(text: &str, opts: &ScoreOptions) -> String {
    if opts.normalize {
        normalize(text)
    } else {
        text.to_owned()
    }
}

fn multiset(entities: &[EntityMention]) -> HashMap<&EntityMention, usize> {
    let mut m = HashMap::new();
    for e in entities {
        *m.entry(e).or_insert(0) += 1;
    }
    m
}

fn overlap(generated: &[EntityMention], gold: &[EntityMention]) -> usize {
    let gen = multiset(generated);
    multiset(gold)
        .into_iter()
        .map(|(e, n)| n.min(gen.get(e).copied().unwrap_or(0)))
        .sum()
}

fn entities_equal(
    a: &Option<Vec<EntityMention>>,
    b: &Option<Vec<EntityMention>>,
    unordered: bool,
) -> bool {
    match (a, b) {
        (Some(a), Some(b)) if unordered => a.len() == b.len() && multiset(a) == multiset(b),
        _ => a == b,
    }
}

struct ItemScore {
    verdict: Verdict,
    matched_entities: usize,
    gold_entities: usize,
}

fn score_one(
    item: &EvalItem,
    schema: &LabelSchema,
    variant: FormatVariant,
    opts: &ScoreOptions,
) -> Result<ItemScore, MetricsError> {
    let actual = prepare(&item.actual, opts);
    let generated = prepare(&item.generated, opts);
    let gold_error = |error: String| MetricsError::GoldFormatInvalid {
        id: item.id.clone(),
        error,
    };
    let gold =
        parse_task(&actual, schema, variant, opts.task).map_err(|e| gold_error(e.to_string()))?;
    if !gold.is_format_valid() {
        return Err(gold_error(format!("trailing text {:?}", gold.trailing)));
    }

    let parsed = parse_task(&generated, schema, variant, opts.task).ok();
    let format_ok = parsed.as_ref().is_some_and(|p| p.is_format_valid());

    let sc_ok = match &gold.sc_label {
        None => true,
        Some(_) if opts.strict_sc_on_format_fail && !format_ok => false,
        Some(gold_sc) => parse_sc_block(&generated, schema, variant).as_ref() == Some(gold_sc),
    };

    let gen_entities = parsed.as_ref().and_then(|p| p.entities.clone());
    let ner_ok = match &gold.entities {
        None => true,
        Some(_) => format_ok && entities_equal(&gen_entities, &gold.entities, opts.unordered_ner),
    };

    let gold_list = gold.entities.as_deref().unwrap_or(&[]);
    let matched_entities = gen_entities
        .as_deref()
        .map(|g| overlap(g, gold_list))
        .unwrap_or(0);

    Ok(ItemScore {
        verdict: Verdict {
            id: item.id.clone(),
            text_ok: generated == actual,
            sc_ok,
            ner_ok,
            format_ok,
        },
        matched_entities,
        gold_entities: gold_list.len(),
    })
}

/// Per-item verdict. Fails only when the gold text itself is malformed.
pub fn score_item(
    item: &EvalItem,
    schema: &LabelSchema,
    variant: FormatVariant,
    opts: &ScoreOptions,
) -> Result<Verdict, MetricsError> {
    score_one(item, schema, variant, opts).map(|s| s.verdict)
}

fn ratio(c: usize, t: usize) -> f64 {
    c as f64 / t as f64
}

pub fn score_set(
    items: &[EvalItem],
    schema: &LabelSchema,
    variant: FormatVariant,
    opts: &ScoreOptions,
) -> Result<MetricsReport, MetricsError> {
    if items.is_empty() {
        return Err(MetricsError::EmptySet);
    }
    let scores = items
        .iter()
        .map(|item| score_one(item, schema, variant, opts))
        .collect::<Result<Vec<_>, _>>()?;

    let count = |f: fn(&Verdict) -> bool| scores.iter().filter(|s| f(&s.verdict)).count();
    let n = items.len();
    let c_text = count(|v| v.text_ok);
    let c_sc = count(|v| v.sc_ok);
    let c_ner = count(|v| v.ner_ok);
    let c_format = count(|v| v.format_ok);
    let matched: usize = scores.iter().map(|s| s.matched_entities).sum();
    let gold: usize = scores.iter().map(|s| s.gold_entities).sum();

    Ok(MetricsReport {
        options: *opts,
        c_text,
        t_text: n,
        c_sc,
        t_sc: n,
        c_ner,
        t_ner: n,
        c_format,
        t_format: n,
        scnm_acc: ratio(c_text, n),
        sc_acc: ratio(c_sc, n),
        ner_acc: ratio(c_ner, n),
        format_acc: ratio(c_format, n),
        informational: Informational {
            note: "per-entity recall; not part of the strict exact-match metrics",
            entity_micro_recall: (gold > 0).then(|| ratio(matched, gold)),
            matched_entities: matched,
            gold_entities: gold,
        },
        per_item: scores.into_iter().map(|s| s.verdict).collect(),
    })
}

impl MetricsReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Aligned plain-text summary table.
    pub fn to_table(&self) -> String {
        let task = self.options.task;
        let rows = [
            (
                "SCNM accuracy",
                self.c_text,
                self.t_text,
                self.scnm_acc,
                true,
            ),
            (
                "SC accuracy",
                self.c_sc,
                self.t_sc,
                self.sc_acc,
                task != Task::NerOnly,
            ),
            (
                "NER accuracy",
                self.c_ner,
                self.t_ner,
                self.ner_acc,
                task != Task::ScOnly,
            ),
            (
                "Format accuracy",
                self.c_format,
                self.t_format,
                self.format_acc,
                true,
            ),
        ];
        let mut out = String::new();
        writeln!(
            out,
            "{:<16} {:>8} {:>8} {:>9}",
            "metric", "correct", "total", "accuracy"
        )
        .unwrap();
        for (name, c, t, acc, applies) in rows {
            if applies {
                writeln!(out, "{name:<16} {c:>8} {t:>8} {:>8.2}%", acc * 100.0).unwrap();
            } else {
                writeln!(out, "{name:<16} {:>8} {:>8} {:>9}", "-", "-", "n/a").unwrap();
            }
        }
        if let Some(r) = self.informational.entity_micro_recall {
            writeln!(
                out,
                "(informational) entity micro recall {}/{} = {:.2}%",
                self.informational.matched_entities,
                self.informational.gold_entities,
                r * 100.0
            )
            .unwrap();
        }
        out
    }
}
