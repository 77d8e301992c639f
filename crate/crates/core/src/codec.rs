//! The format converter: linearizes records into seq2seq input/target text,
//! parses generated text back into structure and converts IL corpus pairs.
//!
//! Five format variants are supported. `F5` is the default; it brackets SC
//! labels with `<` `>` and NER labels with `:` `;`:
//!
//! ```text
//! input:  {sentence}(<SC>)*5{sentence}NER(:NER;)*9
//! target: <SC>NER(:NER;span)*x
//! ```

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::schema::{EntityMention, LabelSchema, ScnmRecord};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FormatVariant {
    /// `{sentence}` / `:SC;(:NER;span)*x`
    F1,
    /// `sentence:{sentence}` / `label:SC;NER(:NER;span)*x`
    F2,
    /// `{sentence}category(:SC;)*5{sentence}NER(:NER;)*9` / `category:SC;NER(:NER;span)*x`
    F3,
    /// `{sentence}(:SC;)*5{sentence}NER(:NER;)*9` / `:SC;NER(:NER;span)*x`
    F4,
    /// `{sentence}(<SC>)*5{sentence}NER(:NER;)*9` / `<SC>NER(:NER;span)*x`
    #[default]
    F5,
}

impl FormatVariant {
    pub const ALL: [FormatVariant; 5] = [Self::F1, Self::F2, Self::F3, Self::F4, Self::F5];

    /// Literal pieces of this variant's target grammar under `schema`.
    pub fn target_layout(self, schema: &LabelSchema) -> TargetLayout {
        let m = schema.marks;
        let (lead, sc_close) = match self {
            Self::F1 | Self::F4 => (m.ner_open.to_string(), m.ner_close),
            Self::F2 => (format!("label{}", m.ner_open), m.ner_close),
            Self::F3 => (format!("category{}", m.ner_open), m.ner_close),
            Self::F5 => (m.sc_open.to_string(), m.sc_close),
        };
        TargetLayout {
            lead,
            sc_close,
            prompt: (self != Self::F1).then(|| schema.ner_prompt.clone()),
            ner_open: m.ner_open,
            ner_close: m.ner_close,
            none_label: schema.none_label.clone(),
        }
    }
}

impl fmt::Display for FormatVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::F1 => "f1",
            Self::F2 => "f2",
            Self::F3 => "f3",
            Self::F4 => "f4",
            Self::F5 => "f5",
        };
        f.write_str(s)
    }
}

impl FromStr for FormatVariant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "f1" => Ok(Self::F1),
            "f2" => Ok(Self::F2),
            "f3" => Ok(Self::F3),
            "f4" => Ok(Self::F4),
            "f5" => Ok(Self::F5),
            _ => Err(format!("unknown format variant {s:?} (expected f1..f5)")),
        }
    }
}

/// Literal skeleton of a target grammar: `lead SC sc_close [prompt] (ner_open NER ner_close span)+`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TargetLayout {
    pub lead: String,
    pub sc_close: char,
    pub prompt: Option<String>,
    pub ner_open: char,
    pub ner_close: char,
    pub none_label: String,
}

/// Which part of the joint task a sequence pair carries.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Task {
    #[default]
    Scnm,
    ScOnly,
    NerOnly,
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Task::Scnm => "scnm",
            Task::ScOnly => "sc-only",
            Task::NerOnly => "ner-only",
        })
    }
}

impl FromStr for Task {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "scnm" => Ok(Task::Scnm),
            "sc-only" => Ok(Task::ScOnly),
            "ner-only" => Ok(Task::NerOnly),
            _ => Err(format!(
                "unknown task {s:?} (expected scnm, sc-only or ner-only)"
            )),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeqPair {
    #[serde(rename = "input")]
    pub input_text: String,
    #[serde(rename = "target")]
    pub target_text: String,
}

/// One incremental-learning corpus line: an entity surface form and its category.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IlPair {
    pub surface: String,
    pub category: String,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CodecError {
    #[error("invalid sentence: {0}")]
    InvalidSentence(String),
    #[error("field `{0}` is empty")]
    EmptyField(&'static str),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum FormatErrorKind {
    MissingOpenMark,
    MissingCloseMark,
    MissingNerPrompt,
    NoEntityPairs,
    UnexpectedEnd,
    TrailingGarbage,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct FormatError {
    pub kind: FormatErrorKind,
    pub byte_position: usize,
}

impl FormatError {
    fn new(kind: FormatErrorKind, byte_position: usize) -> Self {
        FormatError {
            kind,
            byte_position,
        }
    }
}

impl fmt::Display for FormatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} at byte {}", self.kind, self.byte_position)
    }
}

/// Structure recovered from generated text. Labels are not checked against the schema.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParsedOutput {
    pub sc_label: String,
    pub entities: Vec<EntityMention>,
    /// Unparseable residue after the last complete pair; empty when well formed.
    pub trailing: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseResult {
    Parsed(ParsedOutput),
    FormatError(FormatError),
}

impl ParseResult {
    pub fn is_format_valid(&self) -> bool {
        matches!(self, ParseResult::Parsed(p) if p.trailing.is_empty())
    }

    /// Treats a non-empty `trailing` as a [`FormatErrorKind::TrailingGarbage`] error.
    pub fn strict(self, text_len: usize) -> Result<ParsedOutput, FormatError> {
        match self {
            ParseResult::Parsed(p) if p.trailing.is_empty() => Ok(p),
            ParseResult::Parsed(p) => Err(FormatError::new(
                FormatErrorKind::TrailingGarbage,
                text_len - p.trailing.len(),
            )),
            ParseResult::FormatError(e) => Err(e),
        }
    }
}

/// Task-aware parse outcome; sections the task does not carry are `None`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TaskOutput {
    pub sc_label: Option<String>,
    pub entities: Option<Vec<EntityMention>>,
    pub trailing: String,
}

impl TaskOutput {
    pub fn is_format_valid(&self) -> bool {
        self.trailing.is_empty()
    }
}

fn check_sentence(sentence: &str, schema: &LabelSchema) -> Result<(), CodecError> {
    if sentence.is_empty() {
        return Err(CodecError::InvalidSentence("sentence is empty".into()));
    }
    if let Some((pos, mark)) = schema.marks.find_in(sentence) {
        return Err(CodecError::InvalidSentence(format!(
            "mark character {mark:?} at byte {pos}"
        )));
    }
    Ok(())
}

fn sc_menu(schema: &LabelSchema, variant: FormatVariant) -> String {
    let m = schema.marks;
    let (prefix, open, close) = match variant {
        FormatVariant::F1 | FormatVariant::F2 => return String::new(),
        FormatVariant::F3 => ("category", m.ner_open, m.ner_close),
        FormatVariant::F4 => ("", m.ner_open, m.ner_close),
        FormatVariant::F5 => ("", m.sc_open, m.sc_close),
    };
    let mut out = String::from(prefix);
    for label in &schema.sc_labels {
        out.push(open);
        out.push_str(label);
        out.push(close);
    }
    out
}

fn ner_menu(schema: &LabelSchema) -> String {
    let mut out = schema.ner_prompt.clone();
    for label in schema.ner_menu() {
        out.push(schema.marks.ner_open);
        out.push_str(label);
        out.push(schema.marks.ner_close);
    }
    out
}

fn input_for(
    sentence: &str,
    schema: &LabelSchema,
    variant: FormatVariant,
    task: Task,
) -> Result<String, CodecError> {
    check_sentence(sentence, schema)?;
    let text = match variant {
        FormatVariant::F1 => sentence.to_owned(),
        FormatVariant::F2 => format!("sentence{}{sentence}", schema.marks.ner_open),
        _ => match task {
            Task::Scnm => format!(
                "{sentence}{}{sentence}{}",
                sc_menu(schema, variant),
                ner_menu(schema)
            ),
            Task::ScOnly => format!("{sentence}{}", sc_menu(schema, variant)),
            Task::NerOnly => format!("{sentence}{}", ner_menu(schema)),
        },
    };
    Ok(text)
}

/// Model input for the joint task.
pub fn encode_input(
    sentence: &str,
    schema: &LabelSchema,
    variant: FormatVariant,
) -> Result<String, CodecError> {
    input_for(sentence, schema, variant, Task::Scnm)
}

fn push_sc_block(out: &mut String, sc_label: &str, layout: &TargetLayout) {
    out.push_str(&layout.lead);
    out.push_str(sc_label);
    out.push(layout.sc_close);
}

fn push_ner_section(out: &mut String, entities: &[EntityMention], layout: &TargetLayout) {
    if let Some(prompt) = &layout.prompt {
        out.push_str(prompt);
    }
    if entities.is_empty() {
        out.push(layout.ner_open);
        out.push_str(&layout.none_label);
        out.push(layout.ner_close);
    }
    for e in entities {
        out.push(layout.ner_open);
        out.push_str(&e.label);
        out.push(layout.ner_close);
        out.push_str(&e.span_text);
    }
}

/// Renders a target from parts without schema membership checks. An empty
/// entity list renders as the single none pair with an empty span.
pub fn render_target(
    sc_label: &str,
    entities: &[EntityMention],
    schema: &LabelSchema,
    variant: FormatVariant,
) -> String {
    let layout = variant.target_layout(schema);
    let mut out = String::new();
    push_sc_block(&mut out, sc_label, &layout);
    push_ner_section(&mut out, entities, &layout);
    out
}

/// Model target for the joint task.
pub fn encode_target(record: &ScnmRecord, schema: &LabelSchema, variant: FormatVariant) -> String {
    render_target(record.sc_label(), record.entities(), schema, variant)
}

/// Input/target pair for `task`.
pub fn encode_pair(
    record: &ScnmRecord,
    schema: &LabelSchema,
    variant: FormatVariant,
    task: Task,
) -> Result<SeqPair, CodecError> {
    let input_text = input_for(record.sentence(), schema, variant, task)?;
    let layout = variant.target_layout(schema);
    let mut target_text = String::new();
    match task {
        Task::Scnm => target_text = encode_target(record, schema, variant),
        Task::ScOnly => push_sc_block(&mut target_text, record.sc_label(), &layout),
        Task::NerOnly => push_ner_section(&mut target_text, record.entities(), &layout),
    }
    Ok(SeqPair {
        input_text,
        target_text,
    })
}

/// Splits a record into its SC-only and NER-only sequence pairs.
pub fn separate_tasks(
    record: &ScnmRecord,
    schema: &LabelSchema,
    variant: FormatVariant,
) -> Result<(SeqPair, SeqPair), CodecError> {
    Ok((
        encode_pair(record, schema, variant, Task::ScOnly)?,
        encode_pair(record, schema, variant, Task::NerOnly)?,
    ))
}

pub fn convert_il(pair: &IlPair) -> Result<SeqPair, CodecError> {
    if pair.surface.is_empty() {
        return Err(CodecError::EmptyField("surface"));
    }
    if pair.category.is_empty() {
        return Err(CodecError::EmptyField("category"));
    }
    Ok(SeqPair {
        input_text: pair.surface.clone(),
        target_text: pair.category.clone(),
    })
}

struct Parser<'a> {
    text: &'a str,
    schema: &'a LabelSchema,
    layout: TargetLayout,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str, schema: &'a LabelSchema, variant: FormatVariant) -> Self {
        Parser {
            text,
            schema,
            layout: variant.target_layout(schema),
        }
    }

    fn expect_literal(
        &self,
        pos: usize,
        literal: &str,
        missing: FormatErrorKind,
    ) -> Result<usize, FormatError> {
        let rest = &self.text[pos..];
        if rest.starts_with(literal) {
            Ok(pos + literal.len())
        } else if literal.starts_with(rest) {
            Err(FormatError::new(
                FormatErrorKind::UnexpectedEnd,
                self.text.len(),
            ))
        } else {
            Err(FormatError::new(missing, pos))
        }
    }

    /// Reads label text up to `close`; any other mark character is an error.
    fn label_until(&self, pos: usize, close: char) -> Result<(&'a str, usize), FormatError> {
        let rest = &self.text[pos..];
        for (i, c) in rest.char_indices() {
            if c == close {
                return Ok((&rest[..i], pos + i + c.len_utf8()));
            }
            if self.schema.marks.contains(c) {
                return Err(FormatError::new(FormatErrorKind::MissingCloseMark, pos + i));
            }
        }
        Err(FormatError::new(
            FormatErrorKind::UnexpectedEnd,
            self.text.len(),
        ))
    }

    fn sc_block(&self) -> Result<(String, usize), FormatError> {
        let pos = self.expect_literal(0, &self.layout.lead, FormatErrorKind::MissingOpenMark)?;
        let (label, pos) = self.label_until(pos, self.layout.sc_close)?;
        Ok((label.to_owned(), pos))
    }

    fn pair(&self, pos: usize) -> Result<(EntityMention, usize), FormatError> {
        let open = self.layout.ner_open;
        if !self.text[pos..].starts_with(open) {
            let kind = if pos == self.text.len() {
                FormatErrorKind::UnexpectedEnd
            } else {
                FormatErrorKind::MissingOpenMark
            };
            return Err(FormatError::new(kind, pos));
        }
        let (label, pos) = self.label_until(pos + open.len_utf8(), self.layout.ner_close)?;
        let rest = &self.text[pos..];
        let span_len = rest.find(open).unwrap_or(rest.len());
        Ok((EntityMention::new(label, &rest[..span_len]), pos + span_len))
    }

    fn ner_section(&self, start: usize) -> Result<(Vec<EntityMention>, String), FormatError> {
        let mut pos = start;
        if let Some(prompt) = &self.layout.prompt {
            pos = self.expect_literal(pos, prompt, FormatErrorKind::MissingNerPrompt)?;
        }
        if !self.text[pos..].starts_with(self.layout.ner_open) {
            return Err(FormatError::new(FormatErrorKind::NoEntityPairs, pos));
        }
        let mut entities = Vec::new();
        let mut trailing = String::new();
        while pos < self.text.len() {
            match self.pair(pos) {
                Ok((entity, next)) => {
                    entities.push(entity);
                    pos = next;
                }
                Err(e) if entities.is_empty() => return Err(e),
                Err(_) => {
                    trailing = self.text[pos..].to_owned();
                    break;
                }
            }
        }
        if let [only] = entities.as_slice() {
            if only.label == self.layout.none_label && only.span_text.is_empty() {
                entities.clear();
            }
        }
        Ok((entities, trailing))
    }
}

/// Leading SC block of `text`, if one parses. Used for lenient SC scoring of
/// outputs whose overall format is broken.
pub fn parse_sc_block(text: &str, schema: &LabelSchema, variant: FormatVariant) -> Option<String> {
    Parser::new(text, schema, variant)
        .sc_block()
        .ok()
        .map(|(l, _)| l)
}

/// Parses generated text for `task`. Never panics on arbitrary input.
pub fn parse_task(
    text: &str,
    schema: &LabelSchema,
    variant: FormatVariant,
    task: Task,
) -> Result<TaskOutput, FormatError> {
    let p = Parser::new(text, schema, variant);
    match task {
        Task::Scnm => {
            let (sc, pos) = p.sc_block()?;
            let (entities, trailing) = p.ner_section(pos)?;
            Ok(TaskOutput {
                sc_label: Some(sc),
                entities: Some(entities),
                trailing,
            })
        }
        Task::ScOnly => {
            let (sc, pos) = p.sc_block()?;
            Ok(TaskOutput {
                sc_label: Some(sc),
                entities: None,
                trailing: text[pos..].to_owned(),
            })
        }
        Task::NerOnly => {
            let (entities, trailing) = p.ner_section(0)?;
            Ok(TaskOutput {
                sc_label: None,
                entities: Some(entities),
                trailing,
            })
        }
    }
}

/// Parses generated joint-task text. Format validity is decided by shape
/// only; labels outside the schema still parse.
pub fn parse_generated(text: &str, schema: &LabelSchema, variant: FormatVariant) -> ParseResult {
    match parse_task(text, schema, variant, Task::Scnm) {
        Ok(out) => ParseResult::Parsed(ParsedOutput {
            sc_label: out.sc_label.unwrap_or_default(),
            entities: out.entities.unwrap_or_default(),
            trailing: out.trailing,
        }),
        Err(e) => ParseResult::FormatError(e),
    }
}
