//! Non-neural machinery for generating sentence classification (SC) and named
//! entity recognition (NER) labels jointly with a seq2seq model: label
//! schema, format converter, decoding constraint, strict metrics and a
//! deterministic mock generator.

pub mod codec;
pub mod constraint;
pub mod metrics;
pub mod mockgen;
pub mod schema;

pub use codec::{
    convert_il, encode_input, encode_pair, encode_target, parse_generated, parse_task,
    render_target, separate_tasks, FormatError, FormatErrorKind, FormatVariant, IlPair,
    ParseResult, ParsedOutput, SeqPair, Task,
};
pub use constraint::{
    Constraint, ConstraintError, ConstraintLevel, ConstraintState, TokenId, Vocabulary,
};
pub use metrics::{
    normalize, score_item, score_set, EvalItem, MetricsReport, ScoreOptions, Verdict,
};
pub use mockgen::{generate, generate_constrained, Corruption, CorruptionKind};
pub use schema::{
    default_schema, validate_record, EntityMention, LabelSchema, RawRecord, ScnmRecord,
};
