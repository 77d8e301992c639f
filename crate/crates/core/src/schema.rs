//! Label schema, annotated records and ingest-time validation.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

const DEFAULT_SCHEMA_JSON: &str = include_str!("../schemas/default.json");
const JAPANESE_SCHEMA_JSON: &str = include_str!("../schemas/ja.json");

/// The four single-character delimiters that bracket labels in linearized text.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Marks {
    pub sc_open: char,
    pub sc_close: char,
    pub ner_open: char,
    pub ner_close: char,
}

impl Marks {
    pub fn all(&self) -> [char; 4] {
        [self.sc_open, self.sc_close, self.ner_open, self.ner_close]
    }

    pub fn contains(&self, c: char) -> bool {
        self.all().contains(&c)
    }

    /// First mark character found in `text`, with its byte offset.
    pub fn find_in(&self, text: &str) -> Option<(usize, char)> {
        text.char_indices().find(|&(_, c)| self.contains(c))
    }
}

impl Default for Marks {
    fn default() -> Self {
        Marks {
            sc_open: '<',
            sc_close: '>',
            ner_open: ':',
            ner_close: ';',
        }
    }
}

/// Closed label sets plus the reserved negative label, mark characters and NER prompt word.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelSchema {
    pub sc_labels: Vec<String>,
    pub ner_labels: Vec<String>,
    pub none_label: String,
    pub marks: Marks,
    pub ner_prompt: String,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SchemaError {
    #[error("{0} label list is empty")]
    EmptyLabelList(&'static str),
    #[error("duplicate {kind} label {label:?}")]
    DuplicateLabel { kind: &'static str, label: String },
    #[error("{what} {text:?} contains mark character {mark:?}")]
    MarkInLabel {
        what: &'static str,
        text: String,
        mark: char,
    },
    #[error("{what} must not be empty")]
    EmptyText { what: &'static str },
    #[error("mark characters must be pairwise distinct")]
    MarksNotDistinct,
    #[error("none label {0:?} must not be one of the NER labels")]
    NoneLabelIsNerLabel(String),
    #[error("invalid schema document: {0}")]
    Json(String),
}

impl LabelSchema {
    /// Five SC categories, eight NER categories, `None`, `<` `>` `:` `;` and the prompt `NER`.
    pub fn default_schema() -> Self {
        Self::from_json_str(DEFAULT_SCHEMA_JSON).expect("bundled default schema is valid")
    }

    /// The same schema with the original Japanese label spellings.
    pub fn japanese() -> Self {
        Self::from_json_str(JAPANESE_SCHEMA_JSON).expect("bundled Japanese schema is valid")
    }

    /// Parse and validate a schema JSON document.
    pub fn from_json_str(s: &str) -> Result<Self, SchemaError> {
        let schema: LabelSchema =
            serde_json::from_str(s).map_err(|e| SchemaError::Json(e.to_string()))?;
        schema.validate()?;
        Ok(schema)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("schema serializes")
    }

    pub fn validate(&self) -> Result<(), SchemaError> {
        let marks = self.marks.all();
        let distinct: HashSet<char> = marks.iter().copied().collect();
        if distinct.len() != marks.len() {
            return Err(SchemaError::MarksNotDistinct);
        }
        for (kind, labels) in [("SC", &self.sc_labels), ("NER", &self.ner_labels)] {
            if labels.is_empty() {
                return Err(SchemaError::EmptyLabelList(kind));
            }
            let mut seen = HashSet::new();
            for label in labels {
                self.check_text(label, "label")?;
                if !seen.insert(label.as_str()) {
                    return Err(SchemaError::DuplicateLabel {
                        kind,
                        label: label.clone(),
                    });
                }
            }
        }
        self.check_text(&self.none_label, "none label")?;
        self.check_text(&self.ner_prompt, "NER prompt")?;
        if self.ner_labels.contains(&self.none_label) {
            return Err(SchemaError::NoneLabelIsNerLabel(self.none_label.clone()));
        }
        Ok(())
    }

    fn check_text(&self, text: &str, what: &'static str) -> Result<(), SchemaError> {
        if text.is_empty() {
            return Err(SchemaError::EmptyText { what });
        }
        if let Some((_, mark)) = self.marks.find_in(text) {
            return Err(SchemaError::MarkInLabel {
                what,
                text: text.to_owned(),
                mark,
            });
        }
        Ok(())
    }

    pub fn is_sc_label(&self, label: &str) -> bool {
        self.sc_labels.iter().any(|l| l == label)
    }

    pub fn is_ner_label(&self, label: &str) -> bool {
        self.ner_labels.iter().any(|l| l == label)
    }

    /// The NER menu as rendered in model inputs: schema labels followed by the none label.
    pub fn ner_menu(&self) -> impl Iterator<Item = &str> {
        self.ner_labels
            .iter()
            .map(String::as_str)
            .chain(std::iter::once(self.none_label.as_str()))
    }
}

impl Default for LabelSchema {
    fn default() -> Self {
        Self::default_schema()
    }
}

/// Free-function form of [`LabelSchema::default_schema`].
pub fn default_schema() -> LabelSchema {
    LabelSchema::default_schema()
}

/// A labelled entity mention, surface text only.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EntityMention {
    pub label: String,
    #[serde(rename = "span", alias = "span_text")]
    pub span_text: String,
}

impl EntityMention {
    pub fn new(label: impl Into<String>, span_text: impl Into<String>) -> Self {
        EntityMention {
            label: label.into(),
            span_text: span_text.into(),
        }
    }
}

/// One dataset line as read from disk, before validation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawRecord {
    pub id: String,
    pub sentence: String,
    #[serde(alias = "sc")]
    pub sc_label: String,
    pub entities: Vec<EntityMention>,
}

/// A validated annotated sample. Only obtainable through [`validate_record`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScnmRecord {
    id: String,
    sentence: String,
    sc_label: String,
    entities: Vec<EntityMention>,
}

impl ScnmRecord {
    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn sentence(&self) -> &str {
        &self.sentence
    }

    pub fn sc_label(&self) -> &str {
        &self.sc_label
    }

    pub fn entities(&self) -> &[EntityMention] {
        &self.entities
    }

    pub fn is_negative(&self) -> bool {
        self.entities.is_empty()
    }

    pub fn to_raw(&self) -> RawRecord {
        RawRecord {
            id: self.id.clone(),
            sentence: self.sentence.clone(),
            sc_label: self.sc_label.clone(),
            entities: self.entities.clone(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ViolationKind {
    EmptySentence,
    MarkCharInSentence,
    UnknownScLabel,
    UnknownNerLabel,
    EmptySpan,
    SpanNotInSentence,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub kind: ViolationKind,
    /// Field path, e.g. `sentence` or `entities[1].label`.
    pub field: String,
    pub reason: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {:?}: {}", self.field, self.kind, self.reason)
    }
}

/// Checks every record invariant and reports all violations; never repairs.
pub fn validate_record(
    raw: &RawRecord,
    schema: &LabelSchema,
) -> Result<ScnmRecord, Vec<Violation>> {
    let mut violations = Vec::new();
    let mut push = |kind, field: String, reason: String| {
        violations.push(Violation {
            kind,
            field,
            reason,
        })
    };

    if raw.sentence.is_empty() {
        push(
            ViolationKind::EmptySentence,
            "sentence".into(),
            "sentence is empty".into(),
        );
    }
    if let Some((pos, mark)) = schema.marks.find_in(&raw.sentence) {
        push(
            ViolationKind::MarkCharInSentence,
            "sentence".into(),
            format!("mark character {mark:?} at byte {pos}"),
        );
    }
    if !schema.is_sc_label(&raw.sc_label) {
        push(
            ViolationKind::UnknownScLabel,
            "sc_label".into(),
            format!("{:?} is not an SC label", raw.sc_label),
        );
    }
    for (i, entity) in raw.entities.iter().enumerate() {
        if !schema.is_ner_label(&entity.label) {
            push(
                ViolationKind::UnknownNerLabel,
                format!("entities[{i}].label"),
                format!("{:?} is not a NER label", entity.label),
            );
        }
        if entity.span_text.is_empty() {
            push(
                ViolationKind::EmptySpan,
                format!("entities[{i}].span"),
                "span is empty".into(),
            );
        } else if !raw.sentence.contains(&entity.span_text) {
            push(
                ViolationKind::SpanNotInSentence,
                format!("entities[{i}].span"),
                format!("{:?} does not occur in the sentence", entity.span_text),
            );
        }
    }

    if violations.is_empty() {
        Ok(ScnmRecord {
            id: raw.id.clone(),
            sentence: raw.sentence.clone(),
            sc_label: raw.sc_label.clone(),
            entities: raw.entities.clone(),
        })
    } else {
        Err(violations)
    }
}
