mod common;

use proptest::prelude::*;
use slg_core::{
    default_schema, encode_target, generate, generate_constrained, parse_generated,
    ConstraintLevel, Corruption, CorruptionKind, FormatVariant, ParseResult,
};

use common::{default_record, WIDE};

proptest! {
    #[test]
    fn corruption_classes(rec in default_record(WIDE), seed in any::<u64>(), vi in 0usize..5) {
        let schema = default_schema();
        let v = FormatVariant::ALL[vi];
        let gold = encode_target(&rec, &schema, v);
        for kind in CorruptionKind::ALL {
            let c = Corruption::new(kind, seed);
            let out = generate(&rec, &schema, v, c);
            prop_assert_eq!(&out, &generate(&rec, &schema, v, c));
            let parsed = parse_generated(&out, &schema, v);
            match kind {
                CorruptionKind::None => {
                    prop_assert_eq!(&out, &gold);
                    let ParseResult::Parsed(p) = parsed else { unreachable!() };
                    prop_assert_eq!(p.entities.as_slice(), rec.entities());
                }
                CorruptionKind::WrongScLabel
                | CorruptionKind::WrongNerLabel
                | CorruptionKind::WrongSpan
                | CorruptionKind::DuplicateTail => {
                    prop_assert!(parsed.is_format_valid(), "{kind}: {out:?}");
                    prop_assert_ne!(&out, &gold);
                }
                CorruptionKind::MissingEntity => {
                    prop_assert!(parsed.is_format_valid(), "{kind}: {out:?}");
                    prop_assert_eq!(out == gold, rec.entities().is_empty());
                }
                CorruptionKind::DropOpenMark | CorruptionKind::ExtraneousText => {
                    prop_assert!(!parsed.is_format_valid(), "{kind}: {out:?}");
                }
            }
        }
    }

    #[test]
    fn level_two_outputs_are_always_format_valid(rec in default_record(WIDE), seed in any::<u64>(), vi in 0usize..5) {
        let schema = default_schema();
        let v = FormatVariant::ALL[vi];
        for kind in CorruptionKind::ALL {
            let out = generate_constrained(&rec, &schema, v, Corruption::new(kind, seed), Some(ConstraintLevel::Grammar));
            prop_assert!(parse_generated(&out, &schema, v).is_format_valid(), "{kind}: {out:?}");
            if kind == CorruptionKind::None {
                prop_assert_eq!(&out, &encode_target(&rec, &schema, v));
            }
        }
    }

    #[test]
    fn level_one_output_opens_with_the_mark(rec in default_record(WIDE), seed in any::<u64>()) {
        let schema = default_schema();
        let out = generate_constrained(
            &rec, &schema, FormatVariant::F5,
            Corruption::new(CorruptionKind::DropOpenMark, seed),
            Some(ConstraintLevel::FirstToken),
        );
        prop_assert!(out.starts_with('<'));
        prop_assert_eq!(out, encode_target(&rec, &schema, FormatVariant::F5));
    }
}
