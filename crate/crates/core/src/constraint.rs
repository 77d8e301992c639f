//! Decoding-time constraint mechanism.
//!
//! Answers one question for an autoregressive generator: which token ids may
//! come next. [`ConstraintLevel::FirstToken`] forces the first token to the
//! target's opening mark and leaves later steps free.
//! [`ConstraintLevel::Grammar`] tracks a character-level automaton of the full
//! target grammar and admits a token only if every character of its text
//! keeps the output a viable prefix.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;

use serde::Deserialize;
use thiserror::Error;

use crate::codec::{FormatVariant, TargetLayout};
use crate::schema::LabelSchema;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TokenId(pub u32);

impl fmt::Display for TokenId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum VocabularyError {
    #[error("duplicate token text {text:?} (ids {first} and {second})")]
    DuplicateToken {
        text: String,
        first: u32,
        second: u32,
    },
    #[error("token id {id} is empty")]
    EmptyToken { id: u32 },
    #[error("token ids are not dense: expected {expected}, found {found}")]
    NonDenseIds { expected: u32, found: u32 },
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("token {0:?} is not in the vocabulary")]
    UnknownToken(String),
    #[error("text cannot be tokenized at byte {0}")]
    Untokenizable(usize),
}

/// Bijective token id <-> text mapping with dense ids in `[0, len)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vocabulary {
    texts: Vec<String>,
    ids: HashMap<String, TokenId>,
    eos: Option<TokenId>,
    max_token_chars: usize,
}

#[derive(Deserialize)]
struct VocabLine {
    id: u32,
    text: String,
}

impl Vocabulary {
    pub fn new<I, S>(texts: I) -> Result<Self, VocabularyError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut vocab = Vocabulary {
            texts: Vec::new(),
            ids: HashMap::new(),
            eos: None,
            max_token_chars: 0,
        };
        for text in texts {
            vocab.push(text.into())?;
        }
        Ok(vocab)
    }

    fn push(&mut self, text: String) -> Result<TokenId, VocabularyError> {
        let id = TokenId(self.texts.len() as u32);
        if text.is_empty() {
            return Err(VocabularyError::EmptyToken { id: id.0 });
        }
        if let Some(first) = self.ids.get(&text) {
            return Err(VocabularyError::DuplicateToken {
                text,
                first: first.0,
                second: id.0,
            });
        }
        self.max_token_chars = self.max_token_chars.max(text.chars().count());
        self.ids.insert(text.clone(), id);
        self.texts.push(text);
        Ok(id)
    }

    /// Parses a JSON Lines vocabulary of `{"id": n, "text": "..."}` objects.
    pub fn from_jsonl(s: &str) -> Result<Self, VocabularyError> {
        let mut entries = Vec::new();
        for (i, line) in s.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let entry: VocabLine =
                serde_json::from_str(line).map_err(|e| VocabularyError::Malformed {
                    line: i + 1,
                    message: e.to_string(),
                })?;
            entries.push(entry);
        }
        entries.sort_by_key(|e| e.id);
        let mut vocab = Vocabulary::new(Vec::<String>::new())?;
        for (expected, entry) in entries.into_iter().enumerate() {
            if entry.id != expected as u32 {
                return Err(VocabularyError::NonDenseIds {
                    expected: expected as u32,
                    found: entry.id,
                });
            }
            vocab.push(entry.text)?;
        }
        Ok(vocab)
    }

    /// Parses a plain vocabulary with one token per line; the id is the 0-based line number.
    pub fn from_lines(s: &str) -> Result<Self, VocabularyError> {
        Vocabulary::new(s.lines())
    }

    /// Either format: JSON Lines when the first non-blank line is a JSON object.
    pub fn parse(s: &str) -> Result<Self, VocabularyError> {
        let first = s.lines().find(|l| !l.trim().is_empty()).unwrap_or("");
        if first.trim_start().starts_with('{') && serde_json::from_str::<VocabLine>(first).is_ok() {
            Self::from_jsonl(s)
        } else {
            Self::from_lines(s)
        }
    }

    /// A vocabulary covering `schema`'s literals and every character of `texts`,
    /// with whole labels and the prompt as single tokens and `eos` as end marker.
    pub fn covering<'a, I>(schema: &LabelSchema, texts: I, eos: &str) -> Self
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut seen = HashSet::new();
        let mut ordered: Vec<String> = Vec::new();
        let mut add = |t: String| {
            if !t.is_empty() && seen.insert(t.clone()) {
                ordered.push(t);
            }
        };
        for c in schema.marks.all() {
            add(c.to_string());
        }
        add(schema.ner_prompt.clone());
        for label in schema
            .sc_labels
            .iter()
            .map(String::as_str)
            .chain(schema.ner_menu())
        {
            add(label.to_owned());
        }
        add("label".to_owned());
        add("category".to_owned());
        let literal_chars: Vec<char> = schema
            .sc_labels
            .iter()
            .chain(schema.ner_labels.iter())
            .chain([&schema.none_label, &schema.ner_prompt])
            .flat_map(|s| s.chars())
            .chain("labelcategory".chars())
            .collect();
        for c in literal_chars {
            add(c.to_string());
        }
        for text in texts {
            for c in text.chars() {
                add(c.to_string());
            }
        }
        add(eos.to_owned());
        let mut vocab = Vocabulary::new(ordered).expect("covering vocabulary has unique tokens");
        vocab.set_eos(eos).expect("eos was added");
        vocab
    }

    /// Designates an existing token as end-of-sequence.
    pub fn set_eos(&mut self, text: &str) -> Result<TokenId, VocabularyError> {
        let id = self
            .id(text)
            .ok_or_else(|| VocabularyError::UnknownToken(text.to_owned()))?;
        self.eos = Some(id);
        Ok(id)
    }

    pub fn eos(&self) -> Option<TokenId> {
        self.eos
    }

    pub fn len(&self) -> usize {
        self.texts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.texts.is_empty()
    }

    pub fn id(&self, text: &str) -> Option<TokenId> {
        self.ids.get(text).copied()
    }

    pub fn text(&self, id: TokenId) -> Option<&str> {
        self.texts.get(id.0 as usize).map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (TokenId, &str)> {
        self.texts
            .iter()
            .enumerate()
            .map(|(i, t)| (TokenId(i as u32), t.as_str()))
    }

    /// Greedy longest-match tokenization. The eos token never matches text.
    pub fn tokenize_greedy(&self, text: &str) -> Result<Vec<TokenId>, VocabularyError> {
        let mut out = Vec::new();
        let mut pos = 0;
        while pos < text.len() {
            let ends: Vec<usize> = text[pos..]
                .char_indices()
                .skip(1)
                .map(|(i, _)| pos + i)
                .chain(std::iter::once(text.len()))
                .take(self.max_token_chars)
                .collect();
            let hit = ends.iter().rev().find_map(|&end| {
                self.id(&text[pos..end])
                    .filter(|&id| Some(id) != self.eos)
                    .map(|id| (id, end))
            });
            match hit {
                Some((id, end)) => {
                    out.push(id);
                    pos = end;
                }
                None => return Err(VocabularyError::Untokenizable(pos)),
            }
        }
        Ok(out)
    }

    /// Concatenated text of `ids`, skipping eos.
    pub fn decode(&self, ids: &[TokenId]) -> String {
        ids.iter()
            .filter(|&&id| Some(id) != self.eos)
            .filter_map(|&id| self.text(id))
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ConstraintLevel {
    /// Force the first token to the opening mark; no constraint afterwards.
    FirstToken = 1,
    /// Full target-grammar prefix mask with schema-restricted labels.
    Grammar = 2,
}

impl TryFrom<u8> for ConstraintLevel {
    type Error = String;

    fn try_from(v: u8) -> Result<Self, Self::Error> {
        match v {
            1 => Ok(ConstraintLevel::FirstToken),
            2 => Ok(ConstraintLevel::Grammar),
            _ => Err(format!("constraint level must be 1 or 2, got {v}")),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConstraintError {
    #[error("opening mark {0:?} is not a single vocabulary token")]
    MarkTokenNotInVocabulary(String),
    #[error("token {0} is not allowed in the current state")]
    DisallowedToken(TokenId),
}

/// Where the level-2 automaton stands inside the target grammar.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum GrammarCursor {
    /// Matched this many bytes of the lead literal (e.g. `<` or `label:`).
    Lead(usize),
    /// Inside the SC label; holds the label prefix read so far.
    ScLabel(String),
    /// Matched this many bytes of the NER prompt.
    Prompt(usize),
    /// Expecting the opening mark of a pair.
    PairOpen,
    /// Inside a NER label. `first` is true for the first pair, the only place the none label may go.
    NerLabel { partial: String, first: bool },
    /// Inside a span of this many characters.
    Span(usize),
    /// After the none pair; only the end may follow.
    NoneClosed,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ConstraintState {
    level: ConstraintLevel,
    position: usize,
    cursor: Option<GrammarCursor>,
    finished: bool,
}

impl ConstraintState {
    pub fn level(&self) -> ConstraintLevel {
        self.level
    }

    /// 1-based index of the step about to be decoded.
    pub fn position(&self) -> usize {
        self.position
    }

    pub fn grammar_cursor(&self) -> Option<&GrammarCursor> {
        self.cursor.as_ref()
    }

    pub fn is_finished(&self) -> bool {
        self.finished
    }
}

/// Character automaton for one target grammar.
#[derive(Clone, Debug)]
struct Grammar {
    layout: TargetLayout,
    sc_labels: Vec<String>,
    ner_labels: Vec<String>,
}

impl Grammar {
    fn new(schema: &LabelSchema, variant: FormatVariant) -> Self {
        Grammar {
            layout: variant.target_layout(schema),
            sc_labels: schema.sc_labels.clone(),
            ner_labels: schema.ner_labels.clone(),
        }
    }

    fn after_sc(&self) -> GrammarCursor {
        match &self.layout.prompt {
            Some(_) => GrammarCursor::Prompt(0),
            None => GrammarCursor::PairOpen,
        }
    }

    fn ner_candidates(&self, first: bool) -> impl Iterator<Item = &str> {
        self.ner_labels
            .iter()
            .map(String::as_str)
            .chain(first.then_some(self.layout.none_label.as_str()))
    }

    fn step(&self, cursor: &GrammarCursor, c: char) -> Option<GrammarCursor> {
        use GrammarCursor::*;
        let l = &self.layout;
        match cursor {
            Lead(i) => {
                let rest = &l.lead[*i..];
                rest.starts_with(c).then(|| {
                    let next = i + c.len_utf8();
                    if next == l.lead.len() {
                        ScLabel(String::new())
                    } else {
                        Lead(next)
                    }
                })
            }
            ScLabel(partial) => {
                if c == l.sc_close && self.sc_labels.iter().any(|s| s == partial) {
                    return Some(self.after_sc());
                }
                let mut next = partial.clone();
                next.push(c);
                self.sc_labels
                    .iter()
                    .any(|s| s.starts_with(&next))
                    .then_some(ScLabel(next))
            }
            Prompt(i) => {
                let prompt = l.prompt.as_deref().unwrap_or("");
                prompt[*i..].starts_with(c).then(|| {
                    let next = i + c.len_utf8();
                    if next == prompt.len() {
                        PairOpen
                    } else {
                        Prompt(next)
                    }
                })
            }
            PairOpen => (c == l.ner_open).then(|| NerLabel {
                partial: String::new(),
                first: true,
            }),
            NerLabel { partial, first } => {
                if c == l.ner_close {
                    if *first && *partial == l.none_label {
                        return Some(NoneClosed);
                    }
                    if self.ner_labels.iter().any(|s| s == partial) {
                        return Some(Span(0));
                    }
                    return None;
                }
                let mut next = partial.clone();
                next.push(c);
                self.ner_candidates(*first)
                    .any(|s| s.starts_with(next.as_str()))
                    .then_some(NerLabel {
                        partial: next,
                        first: *first,
                    })
            }
            Span(n) => {
                if c == l.ner_open {
                    (*n > 0).then(|| NerLabel {
                        partial: String::new(),
                        first: false,
                    })
                } else {
                    Some(Span(n + 1))
                }
            }
            NoneClosed => None,
        }
    }

    fn walk(&self, cursor: &GrammarCursor, text: &str) -> Option<GrammarCursor> {
        let mut cur = cursor.clone();
        for c in text.chars() {
            cur = self.step(&cur, c)?;
        }
        Some(cur)
    }

    fn accepting(cursor: &GrammarCursor) -> bool {
        matches!(cursor, GrammarCursor::Span(n) if *n > 0) || *cursor == GrammarCursor::NoneClosed
    }
}

/// The constraint for one (level, vocabulary, schema, variant) combination.
/// Holds no per-stream state; streams carry their own [`ConstraintState`].
#[derive(Clone, Debug)]
pub struct Constraint {
    level: ConstraintLevel,
    opening: TokenId,
    grammar: Grammar,
}

impl Constraint {
    /// Fails unless the variant's opening literal (`<` for F5) is a single vocabulary token.
    pub fn new(
        level: ConstraintLevel,
        vocab: &Vocabulary,
        schema: &LabelSchema,
        variant: FormatVariant,
    ) -> Result<Self, ConstraintError> {
        let grammar = Grammar::new(schema, variant);
        let lead = match variant {
            FormatVariant::F2 => "label".to_owned(),
            FormatVariant::F3 => "category".to_owned(),
            _ => grammar.layout.lead.clone(),
        };
        let opening = vocab
            .id(&lead)
            .ok_or(ConstraintError::MarkTokenNotInVocabulary(lead))?;
        Ok(Constraint {
            level,
            opening,
            grammar,
        })
    }

    pub fn level(&self) -> ConstraintLevel {
        self.level
    }

    /// The token forced at step 1 under level 1.
    pub fn opening_token(&self) -> TokenId {
        self.opening
    }

    pub fn init(&self) -> ConstraintState {
        ConstraintState {
            level: self.level,
            position: 1,
            cursor: (self.level == ConstraintLevel::Grammar).then_some(GrammarCursor::Lead(0)),
            finished: false,
        }
    }

    /// True when the output so far is complete (ending here is allowed).
    pub fn is_accepting(&self, state: &ConstraintState) -> bool {
        match &state.cursor {
            _ if state.finished => true,
            None => state.position > 1,
            Some(c) => Grammar::accepting(c),
        }
    }

    fn allows(&self, state: &ConstraintState, vocab: &Vocabulary, id: TokenId) -> bool {
        if state.finished {
            return false;
        }
        let Some(text) = vocab.text(id) else {
            return false;
        };
        if Some(id) == vocab.eos() {
            return self.is_accepting(state);
        }
        match &state.cursor {
            None => state.position > 1 || id == self.opening,
            Some(cursor) => self.grammar.walk(cursor, text).is_some(),
        }
    }

    /// Ids that may be emitted next. The eos token, if the vocabulary has one,
    /// is allowed exactly when the output so far is complete.
    pub fn allowed_tokens(&self, state: &ConstraintState, vocab: &Vocabulary) -> BTreeSet<TokenId> {
        if state.cursor.is_none() && state.position == 1 && !state.finished {
            return BTreeSet::from([self.opening]);
        }
        vocab
            .iter()
            .map(|(id, _)| id)
            .filter(|&id| self.allows(state, vocab, id))
            .collect()
    }

    /// Returns the successor state; `state` itself is left untouched.
    pub fn advance(
        &self,
        state: &ConstraintState,
        vocab: &Vocabulary,
        id: TokenId,
    ) -> Result<ConstraintState, ConstraintError> {
        if !self.allows(state, vocab, id) {
            return Err(ConstraintError::DisallowedToken(id));
        }
        let mut next = state.clone();
        next.position += 1;
        if Some(id) == vocab.eos() {
            next.finished = true;
        } else if let Some(cursor) = &state.cursor {
            let text = vocab.text(id).expect("allowed ids exist");
            next.cursor = self.grammar.walk(cursor, text);
        }
        Ok(next)
    }

    /// Shortest token sequence (eos excluded) that takes `state` to an
    /// accepting state, found by breadth-first search over cursors.
    pub fn shortest_completion(
        &self,
        state: &ConstraintState,
        vocab: &Vocabulary,
        max_depth: usize,
    ) -> Option<Vec<TokenId>> {
        if self.is_accepting(state) {
            return Some(Vec::new());
        }
        let mut seen = HashSet::new();
        let mut queue = VecDeque::from([(state.clone(), Vec::new())]);
        while let Some((s, path)) = queue.pop_front() {
            if path.len() >= max_depth {
                continue;
            }
            for id in self.allowed_tokens(&s, vocab) {
                if Some(id) == vocab.eos() {
                    continue;
                }
                let next = self.advance(&s, vocab, id).expect("allowed");
                let mut p = path.clone();
                p.push(id);
                if self.is_accepting(&next) {
                    return Some(p);
                }
                let key = (next.cursor.clone(), next.position > 1);
                if seen.insert(key) {
                    queue.push_back((next, p));
                }
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schema::default_schema;

    fn toy() -> Vocabulary {
        let mut v = Vocabulary::new([
            "<", ">", ":", ";", "NER", "N", "E", "R", "NE", "Social", "Soc", "ial", "Person",
            "Location", "None", "x", "y", " ", "Ja", "pan", "</s>", "x:", ";x", ">NER",
        ])
        .unwrap();
        v.set_eos("</s>").unwrap();
        v
    }

    fn ids(v: &Vocabulary, texts: &[&str]) -> BTreeSet<TokenId> {
        texts.iter().map(|t| v.id(t).unwrap()).collect()
    }

    #[test]
    fn missing_open_mark_is_an_error() {
        let v = Vocabulary::new(["a", "b"]).unwrap();
        let err = Constraint::new(
            ConstraintLevel::FirstToken,
            &v,
            &default_schema(),
            FormatVariant::F5,
        )
        .unwrap_err();
        assert_eq!(err, ConstraintError::MarkTokenNotInVocabulary("<".into()));
    }

    #[test]
    fn level_one_forces_then_frees() {
        let v = toy();
        let c = Constraint::new(
            ConstraintLevel::FirstToken,
            &v,
            &default_schema(),
            FormatVariant::F5,
        )
        .unwrap();
        let s = c.init();
        assert_eq!(s.position(), 1);
        assert_eq!(c.allowed_tokens(&s, &v), ids(&v, &["<"]));
        let x = v.id("x").unwrap();
        assert_eq!(
            c.advance(&s, &v, x),
            Err(ConstraintError::DisallowedToken(x))
        );
        let s2 = c.advance(&s, &v, v.id("<").unwrap()).unwrap();
        assert_eq!(s2.position(), 2);
        assert_eq!(c.allowed_tokens(&s2, &v).len(), v.len());
        // persistent: the old state is still usable
        assert_eq!(c.allowed_tokens(&s, &v), ids(&v, &["<"]));
    }

    #[test]
    fn level_two_starts_at_lead() {
        let v = toy();
        let c = Constraint::new(
            ConstraintLevel::Grammar,
            &v,
            &default_schema(),
            FormatVariant::F5,
        )
        .unwrap();
        let s = c.init();
        assert_eq!(s.grammar_cursor(), Some(&GrammarCursor::Lead(0)));
        assert_eq!(c.allowed_tokens(&s, &v), ids(&v, &["<"]));
    }

    #[test]
    fn level_two_after_sc_block_allows_prompt_prefixes() {
        let v = toy();
        let c = Constraint::new(
            ConstraintLevel::Grammar,
            &v,
            &default_schema(),
            FormatVariant::F5,
        )
        .unwrap();
        let mut s = c.init();
        for t in ["<", "Social", ">"] {
            s = c.advance(&s, &v, v.id(t).unwrap()).unwrap();
        }
        assert_eq!(c.allowed_tokens(&s, &v), ids(&v, &["NER", "N", "NE"]));
    }

    #[test]
    fn none_pair_is_terminal_and_only_first() {
        let v = toy();
        let c = Constraint::new(
            ConstraintLevel::Grammar,
            &v,
            &default_schema(),
            FormatVariant::F5,
        )
        .unwrap();
        let mut s = c.init();
        for t in ["<", "Social", ">NER", ":", "None", ";"] {
            s = c.advance(&s, &v, v.id(t).unwrap()).unwrap();
        }
        assert_eq!(c.allowed_tokens(&s, &v), ids(&v, &["</s>"]));
        let s = c.advance(&s, &v, v.eos().unwrap()).unwrap();
        assert!(s.is_finished());
        assert!(c.allowed_tokens(&s, &v).is_empty());
    }

    #[test]
    fn span_must_be_non_empty_before_next_pair() {
        let v = toy();
        let c = Constraint::new(
            ConstraintLevel::Grammar,
            &v,
            &default_schema(),
            FormatVariant::F5,
        )
        .unwrap();
        let mut s = c.init();
        for t in ["<", "Social", ">NER", ":", "Person", ";"] {
            s = c.advance(&s, &v, v.id(t).unwrap()).unwrap();
        }
        let allowed = c.allowed_tokens(&s, &v);
        assert!(!allowed.contains(&v.id(":").unwrap()));
        assert!(!allowed.contains(&v.eos().unwrap()));
        assert!(allowed.contains(&v.id("x:").unwrap()));
        s = c.advance(&s, &v, v.id("x").unwrap()).unwrap();
        let allowed = c.allowed_tokens(&s, &v);
        assert!(allowed.contains(&v.id(":").unwrap()));
        assert!(allowed.contains(&v.eos().unwrap()));
        // marks other than the pair opener are plain span text
        assert!(allowed.contains(&v.id("<").unwrap()));
    }

    #[test]
    fn greedy_tokenization_and_completion() {
        let v = toy();
        let t = v.tokenize_greedy("<Social>NER:Person;Japan").unwrap();
        assert_eq!(v.decode(&t), "<Social>NER:Person;Japan");
        assert_eq!(v.text(t[2]), Some(">NER"));
        assert_eq!(
            v.tokenize_greedy("<q"),
            Err(VocabularyError::Untokenizable(1))
        );

        let c = Constraint::new(
            ConstraintLevel::Grammar,
            &v,
            &default_schema(),
            FormatVariant::F5,
        )
        .unwrap();
        let path = c.shortest_completion(&c.init(), &v, 16).unwrap();
        assert_eq!(path.len(), 6);
        let text = v.decode(&path);
        assert!(
            crate::codec::parse_generated(&text, &default_schema(), FormatVariant::F5)
                .is_format_valid(),
            "{text}"
        );
    }

    #[test]
    fn vocabulary_formats() {
        let v =
            Vocabulary::parse("{\"id\":1,\"text\":\"b\"}\n{\"id\":0,\"text\":\"a\"}\n").unwrap();
        assert_eq!(v.text(TokenId(0)), Some("a"));
        assert_eq!(v.id("b"), Some(TokenId(1)));
        let v = Vocabulary::parse("<\n>\nNER\n").unwrap();
        assert_eq!(v.id("NER"), Some(TokenId(2)));
        assert!(matches!(
            Vocabulary::parse("{\"id\":0,\"text\":\"a\"}\n{\"id\":2,\"text\":\"b\"}"),
            Err(VocabularyError::NonDenseIds {
                expected: 1,
                found: 2
            })
        ));
        assert!(matches!(
            Vocabulary::from_lines("a\na"),
            Err(VocabularyError::DuplicateToken { .. })
        ));
        assert!(matches!(
            Vocabulary::from_lines("a\n\nb"),
            Err(VocabularyError::EmptyToken { id: 1 })
        ));
    }

    #[test]
    fn other_variants_open_with_their_lead() {
        let s = default_schema();
        let v = Vocabulary::covering(&s, ["abc"], "</s>");
        for variant in FormatVariant::ALL {
            let c = Constraint::new(ConstraintLevel::FirstToken, &v, &s, variant).unwrap();
            let text = v.text(c.opening_token()).unwrap();
            let target = crate::codec::render_target("Social", &[], &s, variant);
            assert!(target.starts_with(text), "{variant}: {text} vs {target}");
        }
    }
}
