#![allow(dead_code)]

use proptest::prelude::*;
use slg_core::{
    default_schema, validate_record, EntityMention, LabelSchema, RawRecord, ScnmRecord,
};

/// Words drawn from a mark-free alphabet, including multi-byte characters.
pub fn word(alphabet: &'static [char]) -> impl Strategy<Value = String> {
    proptest::collection::vec(proptest::sample::select(alphabet), 1..6)
        .prop_map(|cs| cs.into_iter().collect())
}

pub const WIDE: &[char] = &[
    'a', 'b', 'z', 'Q', '0', '9', '.', ',', '-', '日', '本', 'ア', 'é', '\u{304b}', '\u{3099}',
];
pub const TOY: &[char] = &['a', 'b', 'c', 'd', 'e', 'x', 'y', 'J'];

pub fn record(schema: LabelSchema, alphabet: &'static [char]) -> impl Strategy<Value = ScnmRecord> {
    let n_sc = schema.sc_labels.len();
    let n_ner = schema.ner_labels.len();
    (
        proptest::collection::vec(word(alphabet), 1..8),
        0..n_sc,
        proptest::collection::vec((any::<prop::sample::Index>(), 0..n_ner), 0..5),
    )
        .prop_map(move |(words, sc, ents)| {
            let sentence = words.join(" ");
            let entities = ents
                .into_iter()
                .map(|(w, l)| EntityMention::new(&schema.ner_labels[l], w.get(&words).clone()))
                .collect();
            let raw = RawRecord {
                id: "r".into(),
                sentence,
                sc_label: schema.sc_labels[sc].clone(),
                entities,
            };
            validate_record(&raw, &schema).expect("generated records are valid")
        })
}

pub fn default_record(alphabet: &'static [char]) -> impl Strategy<Value = ScnmRecord> {
    record(default_schema(), alphabet)
}

pub fn abe_example() -> ScnmRecord {
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
