//! Deterministic stand-in for a neural generator.
//!
//! Produces the gold target with at most one injected fault, optionally
//! decoded through the constraint mechanism.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::codec::{encode_target, render_target, FormatVariant};
use crate::constraint::{
    Constraint, ConstraintError, ConstraintLevel, ConstraintState, TokenId, Vocabulary,
};
use crate::schema::{EntityMention, LabelSchema, ScnmRecord};

/// Text appended after the pair opener by [`CorruptionKind::ExtraneousText`].
pub const EXTRANEOUS_MARKER: &str = "extra";

const MOCK_EOS: &str = "</s>";

#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
)]
pub enum CorruptionKind {
    #[default]
    None,
    WrongScLabel,
    WrongNerLabel,
    WrongSpan,
    MissingEntity,
    DuplicateTail,
    DropOpenMark,
    ExtraneousText,
}

impl CorruptionKind {
    pub const ALL: [CorruptionKind; 8] = [
        Self::None,
        Self::WrongScLabel,
        Self::WrongNerLabel,
        Self::WrongSpan,
        Self::MissingEntity,
        Self::DuplicateTail,
        Self::DropOpenMark,
        Self::ExtraneousText,
    ];
}

impl fmt::Display for CorruptionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl FromStr for CorruptionKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|k| k.to_string() == s)
            .ok_or_else(|| format!("unknown corruption kind {s:?}"))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Corruption {
    pub kind: CorruptionKind,
    pub rng_seed: u64,
}

impl Corruption {
    pub fn new(kind: CorruptionKind, rng_seed: u64) -> Self {
        Corruption { kind, rng_seed }
    }
}

fn next_cyclic<'a>(labels: &'a [String], current: &str) -> &'a str {
    let i = labels
        .iter()
        .position(|l| l == current)
        .unwrap_or(labels.len() - 1);
    &labels[(i + 1) % labels.len()]
}

fn perturb_span(span: &str, rng: &mut ChaCha8Rng) -> String {
    let mut chars: Vec<char> = span.chars().collect();
    if chars.len() > 1 && rng.gen_bool(0.5) {
        chars.pop();
    } else {
        let last = *chars.last().expect("spans are non-empty");
        chars.push(last);
    }
    chars.into_iter().collect()
}

/// Gold target with `corruption` applied. Pure in (record, schema, variant, corruption).
pub fn generate(
    record: &ScnmRecord,
    schema: &LabelSchema,
    variant: FormatVariant,
    corruption: Corruption,
) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(corruption.rng_seed);
    let mut sc = record.sc_label().to_owned();
    let mut entities = record.entities().to_vec();
    let none_pair = || EntityMention::new(&schema.none_label, "");

    match corruption.kind {
        CorruptionKind::None => return encode_target(record, schema, variant),
        CorruptionKind::WrongScLabel => sc = next_cyclic(&schema.sc_labels, &sc).to_owned(),
        CorruptionKind::WrongNerLabel => match entities.first_mut() {
            Some(e) => e.label = next_cyclic(&schema.ner_labels, &e.label).to_owned(),
            None => entities.push(EntityMention::new(&schema.ner_labels[0], "")),
        },
        CorruptionKind::WrongSpan => match entities.first_mut() {
            Some(e) => e.span_text = perturb_span(&e.span_text, &mut rng),
            None => {
                let first: String = record.sentence().chars().take(1).collect();
                entities.push(EntityMention::new(&schema.none_label, first));
            }
        },
        CorruptionKind::MissingEntity => {
            entities.pop();
        }
        CorruptionKind::DuplicateTail => match entities.last().cloned() {
            Some(last) => entities.push(last),
            None => entities = vec![none_pair(), none_pair()],
        },
        CorruptionKind::DropOpenMark => {
            let text = render_target(&sc, &entities, schema, variant);
            let layout = variant.target_layout(schema);
            // the lead's opening mark is its last character (`<`, `:`, `label:`, `category:`)
            let at = layout.lead.len() - layout.lead.chars().last().map_or(0, char::len_utf8);
            let mut out = text;
            out.remove(at);
            return out;
        }
        CorruptionKind::ExtraneousText => {
            let mut out = render_target(&sc, &entities, schema, variant);
            out.push(schema.marks.ner_open);
            out.push_str(EXTRANEOUS_MARKER);
            return out;
        }
    }
    render_target(&sc, &entities, schema, variant)
}

/// Like [`generate`], but decoded through the constraint at `level`
/// (`None` = unconstrained) over a vocabulary covering the record.
pub fn generate_constrained(
    record: &ScnmRecord,
    schema: &LabelSchema,
    variant: FormatVariant,
    corruption: Corruption,
    level: Option<ConstraintLevel>,
) -> String {
    let intended = generate(record, schema, variant, corruption);
    let Some(level) = level else {
        return intended;
    };
    let vocab = Vocabulary::covering(schema, [record.sentence(), intended.as_str()], MOCK_EOS);
    let constraint = Constraint::new(level, &vocab, schema, variant)
        .expect("covering vocabulary contains every opening literal");
    constrained_decode(&intended, &constraint, &vocab)
}

/// Like [`generate_constrained`] with a caller-supplied vocabulary.
pub fn generate_constrained_with(
    record: &ScnmRecord,
    schema: &LabelSchema,
    variant: FormatVariant,
    corruption: Corruption,
    level: Option<ConstraintLevel>,
    vocab: &Vocabulary,
) -> Result<String, ConstraintError> {
    let intended = generate(record, schema, variant, corruption);
    match level {
        None => Ok(intended),
        Some(level) => {
            let constraint = Constraint::new(level, vocab, schema, variant)?;
            Ok(constrained_decode(&intended, &constraint, vocab))
        }
    }
}

fn longest_prefix(allowed: &[(TokenId, &str)], rest: &str) -> Option<(TokenId, usize)> {
    allowed
        .iter()
        .filter(|(_, t)| rest.starts_with(t))
        .max_by_key(|(id, t)| (t.len(), std::cmp::Reverse(*id)))
        .map(|(id, t)| (*id, t.len()))
}

fn allowed_texts<'v>(
    constraint: &Constraint,
    state: &ConstraintState,
    vocab: &'v Vocabulary,
) -> Vec<(TokenId, &'v str)> {
    let eos = vocab.eos();
    constraint
        .allowed_tokens(state, vocab)
        .into_iter()
        .filter(|&id| Some(id) != eos)
        .map(|id| (id, vocab.text(id).expect("allowed ids exist")))
        .collect()
}

/// Decodes `intended` step by step under `constraint`.
///
/// At each step the generator emits the longest allowed token that continues
/// its intended text. If none does, it emits the first allowed token after
/// which the intended text can continue (insertion), and failing that skips
/// one intended character (deletion). When the intended text runs out in a
/// non-accepting state, output rolls back to the last accepting state, or is
/// completed by the shortest allowed path if there was none.
pub fn constrained_decode(intended: &str, constraint: &Constraint, vocab: &Vocabulary) -> String {
    let allowed_list = |state: &ConstraintState| allowed_texts(constraint, state, vocab);

    let mut state = constraint.init();
    let mut out: Vec<TokenId> = Vec::new();
    let mut rest = intended;
    let mut checkpoint = None;
    let max_steps = 4 * intended.len() + 64;

    for _ in 0..max_steps {
        if constraint.is_accepting(&state) {
            checkpoint = Some((state.clone(), out.len()));
        }
        if rest.is_empty() {
            break;
        }
        let allowed = allowed_list(&state);
        if let Some((id, len)) = longest_prefix(&allowed, rest) {
            state = constraint.advance(&state, vocab, id).expect("allowed");
            out.push(id);
            rest = &rest[len..];
            continue;
        }
        let insertion = allowed.iter().find_map(|&(id, _)| {
            let next = constraint.advance(&state, vocab, id).expect("allowed");
            longest_prefix(&allowed_list(&next), rest).map(|_| (id, next))
        });
        if let Some((id, next)) = insertion {
            state = next;
            out.push(id);
            continue;
        }
        let skip = rest.chars().next().map_or(0, char::len_utf8);
        rest = &rest[skip..];
    }

    if !constraint.is_accepting(&state) {
        if let Some((_, len)) = checkpoint {
            out.truncate(len);
        } else if let Some(path) = constraint.shortest_completion(&state, vocab, 64) {
            out.extend(path);
        }
    }
    vocab.decode(&out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::parse_generated;
    use crate::schema::{default_schema, validate_record, RawRecord};

    fn abe_example() -> ScnmRecord {
        let raw = RawRecord {
            id: "1".into(),
            sentence: "In 2020, Shinzo Abe resigned as Prime Minister of Japan".into(),
            sc_label: "Social".into(),
            entities: vec![
                EntityMention::new("Person", "Shinzo Abe"),
                EntityMention::new("Location", "Japan"),
            ],
        };
        validate_record(&raw, &default_schema()).unwrap()
    }

    fn gen(kind: CorruptionKind) -> String {
        generate(
            &abe_example(),
            &default_schema(),
            FormatVariant::F5,
            Corruption::new(kind, 7),
        )
    }

    #[test]
    fn corruption_examples() {
        assert_eq!(
            gen(CorruptionKind::None),
            "<Social>NER:Person;Shinzo Abe:Location;Japan"
        );
        assert_eq!(
            gen(CorruptionKind::WrongScLabel),
            "<LiteratureArt>NER:Person;Shinzo Abe:Location;Japan"
        );
        assert_eq!(
            gen(CorruptionKind::WrongNerLabel),
            "<Social>NER:Company;Shinzo Abe:Location;Japan"
        );
        assert_eq!(
            gen(CorruptionKind::MissingEntity),
            "<Social>NER:Person;Shinzo Abe"
        );
        assert_eq!(
            gen(CorruptionKind::DuplicateTail),
            "<Social>NER:Person;Shinzo Abe:Location;Japan:Location;Japan"
        );
        assert_eq!(
            gen(CorruptionKind::DropOpenMark),
            "Social>NER:Person;Shinzo Abe:Location;Japan"
        );
        assert_eq!(
            gen(CorruptionKind::ExtraneousText),
            "<Social>NER:Person;Shinzo Abe:Location;Japan:extra"
        );
        let span = gen(CorruptionKind::WrongSpan);
        assert!(
            span == "<Social>NER:Person;Shinzo Ab:Location;Japan"
                || span == "<Social>NER:Person;Shinzo Abee:Location;Japan",
            "{span}"
        );
    }

    #[test]
    fn drop_open_mark_on_keyword_variants() {
        let s = default_schema();
        let out = generate(
            &abe_example(),
            &s,
            FormatVariant::F2,
            Corruption::new(CorruptionKind::DropOpenMark, 0),
        );
        assert!(out.starts_with("labelSocial;"), "{out}");
        assert!(!parse_generated(&out, &s, FormatVariant::F2).is_format_valid());
    }

    #[test]
    fn level_one_restores_open_mark() {
        let s = default_schema();
        let c = Corruption::new(CorruptionKind::DropOpenMark, 0);
        let out = generate_constrained(
            &abe_example(),
            &s,
            FormatVariant::F5,
            c,
            Some(ConstraintLevel::FirstToken),
        );
        assert_eq!(out, "<Social>NER:Person;Shinzo Abe:Location;Japan");
        let off = generate_constrained(&abe_example(), &s, FormatVariant::F5, c, None);
        assert_eq!(off, gen(CorruptionKind::DropOpenMark));
    }

    #[test]
    fn level_one_keeps_later_faults() {
        let s = default_schema();
        let c = Corruption::new(CorruptionKind::ExtraneousText, 0);
        let out = generate_constrained(
            &abe_example(),
            &s,
            FormatVariant::F5,
            c,
            Some(ConstraintLevel::FirstToken),
        );
        assert!(!parse_generated(&out, &s, FormatVariant::F5).is_format_valid());
    }

    #[test]
    fn level_two_repairs() {
        let s = default_schema();
        let gold = gen(CorruptionKind::None);
        for kind in [
            CorruptionKind::None,
            CorruptionKind::DropOpenMark,
            CorruptionKind::ExtraneousText,
        ] {
            let out = generate_constrained(
                &abe_example(),
                &s,
                FormatVariant::F5,
                Corruption::new(kind, 0),
                Some(ConstraintLevel::Grammar),
            );
            assert_eq!(out, gold, "{kind}");
        }
        let out = generate_constrained(
            &abe_example(),
            &s,
            FormatVariant::F5,
            Corruption::new(CorruptionKind::WrongScLabel, 0),
            Some(ConstraintLevel::Grammar),
        );
        assert_eq!(out, gen(CorruptionKind::WrongScLabel));
    }

    #[test]
    fn misspelled_label_is_repaired_at_level_two() {
        let s = default_schema();
        let vocab = Vocabulary::covering(&s, ["<Social>NER:Persn;Abe"], "</s>");
        let c = Constraint::new(ConstraintLevel::Grammar, &vocab, &s, FormatVariant::F5).unwrap();
        assert_eq!(
            constrained_decode("<Social>NER:Persn;Abe", &c, &vocab),
            "<Social>NER:Person;Abe"
        );
        assert_eq!(constrained_decode("", &c, &vocab), "<Social>NER:None;");
    }

    #[test]
    fn kind_names_parse() {
        for k in CorruptionKind::ALL {
            assert_eq!(k.to_string().parse::<CorruptionKind>().unwrap(), k);
        }
    }
}
