mod common;

use proptest::prelude::*;
use slg_core::{default_schema, score_set, EvalItem, FormatVariant, ScoreOptions};

const GOLD: &str = "<Social>NER:Person;Shinzo Abe:Location;Japan";

/// Every verdict (text, sc, ner, format) reachable under default options,
/// each with a generated text that realizes it against GOLD.
/// (text, sc, ner, format)
type Checks = (bool, bool, bool, bool);

const TEMPLATES: [(Checks, &str); 6] = [
    ((true, true, true, true), GOLD),
    (
        (false, false, true, true),
        "<Academic>NER:Person;Shinzo Abe:Location;Japan",
    ),
    ((false, true, false, true), "<Social>NER:Person;Shinzo Abe"),
    (
        (false, false, false, true),
        "<Academic>NER:Person;Shinzo Abe",
    ),
    (
        (false, true, false, false),
        "<Social>NER:Person;Shinzo Abe:Location;Japan:extra",
    ),
    (
        (false, false, false, false),
        "Social>NER:Person;Shinzo Abe:Location;Japan",
    ),
];

/// Counts straight from the definitions: correct items over all items.
fn oracle(verdicts: &[Checks]) -> [f64; 4] {
    let n = verdicts.len() as f64;
    let c = |f: fn(&Checks) -> bool| verdicts.iter().filter(|v| f(v)).count() as f64 / n;
    [c(|v| v.0), c(|v| v.1), c(|v| v.2), c(|v| v.3)]
}

fn items(choice: &[usize]) -> Vec<EvalItem> {
    choice
        .iter()
        .enumerate()
        .map(|(i, &t)| EvalItem::new(i.to_string(), TEMPLATES[t].1, GOLD))
        .collect()
}

#[test]
fn exhaustive_small_sets_match_oracle() {
    let schema = default_schema();
    for size in 1..=3 {
        let total = TEMPLATES.len().pow(size as u32);
        for code in 0..total {
            let choice: Vec<usize> = (0..size)
                .map(|k| code / TEMPLATES.len().pow(k as u32) % TEMPLATES.len())
                .collect();
            let r = score_set(
                &items(&choice),
                &schema,
                FormatVariant::F5,
                &ScoreOptions::default(),
            )
            .unwrap();
            let verdicts: Vec<_> = choice.iter().map(|&t| TEMPLATES[t].0).collect();
            assert_eq!(
                [r.scnm_acc, r.sc_acc, r.ner_acc, r.format_acc],
                oracle(&verdicts)
            );
            for (v, expected) in r.per_item.iter().zip(&verdicts) {
                assert_eq!((v.text_ok, v.sc_ok, v.ner_ok, v.format_ok), *expected);
            }
        }
    }
}

proptest! {
    #[test]
    fn permutation_invariance_and_hierarchy(
        choice in proptest::collection::vec(0usize..TEMPLATES.len(), 1..12),
        shuffle_seed in any::<u64>(),
    ) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let schema = default_schema();
        let opts = ScoreOptions::default();
        let a = score_set(&items(&choice), &schema, FormatVariant::F5, &opts).unwrap();
        let mut shuffled = items(&choice);
        shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(shuffle_seed));
        let b = score_set(&shuffled, &schema, FormatVariant::F5, &opts).unwrap();
        prop_assert_eq!(
            (a.c_text, a.c_sc, a.c_ner, a.c_format),
            (b.c_text, b.c_sc, b.c_ner, b.c_format)
        );
        prop_assert!(a.scnm_acc <= a.sc_acc.min(a.ner_acc).min(a.format_acc));
        for v in &a.per_item {
            prop_assert!(!v.text_ok || (v.sc_ok && v.ner_ok && v.format_ok));
        }
    }
}

#[test]
fn identical_sets_score_one() {
    let schema = default_schema();
    let items: Vec<EvalItem> = (0..20)
        .map(|i| EvalItem::new(i.to_string(), GOLD, GOLD))
        .collect();
    let r = score_set(&items, &schema, FormatVariant::F5, &ScoreOptions::default()).unwrap();
    assert_eq!([r.scnm_acc, r.sc_acc, r.ner_acc, r.format_acc], [1.0; 4]);
    assert_eq!(r.informational.entity_micro_recall, Some(1.0));
}
