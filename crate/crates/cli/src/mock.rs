use std::path::{Path, PathBuf};

use clap::Args;
use indexmap::IndexMap;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use slg_core::mockgen::generate_constrained_with;
use slg_core::FormatVariant;
use slg_core::{
    generate_constrained, ConstraintLevel, Corruption, CorruptionKind, LabelSchema, ScnmRecord,
    Vocabulary,
};

use crate::stats::load_records;
use crate::{emit, io, CliError, SchemaArgs};

/// Fractions of the dataset that receive each corruption kind.
#[derive(Clone, Debug, PartialEq)]
pub struct CorruptionPlan(IndexMap<CorruptionKind, f64>);

impl CorruptionPlan {
    pub fn new(fractions: IndexMap<CorruptionKind, f64>) -> Result<Self, String> {
        if fractions.is_empty() {
            return Err("corruption plan is empty".into());
        }
        if let Some((k, f)) = fractions.iter().find(|(_, f)| !(0.0..=1.0).contains(*f)) {
            return Err(format!("fraction for {k} is {f}, outside [0, 1]"));
        }
        let sum: f64 = fractions.values().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(format!("plan fractions sum to {sum}, expected 1"));
        }
        Ok(CorruptionPlan(fractions))
    }

    pub fn clean() -> Self {
        CorruptionPlan(IndexMap::from([(CorruptionKind::None, 1.0)]))
    }

    pub fn from_json_str(s: &str) -> Result<Self, String> {
        let map: IndexMap<CorruptionKind, f64> =
            serde_json::from_str(s).map_err(|e| e.to_string())?;
        Self::new(map)
    }

    /// Exact per-kind counts for `n` items by the largest-remainder method;
    /// ties go to the kind listed first.
    pub fn counts(&self, n: usize) -> Vec<(CorruptionKind, usize)> {
        let quotas: Vec<f64> = self.0.values().map(|f| f * n as f64).collect();
        let mut counts: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
        let assigned: usize = counts.iter().sum();
        let mut order: Vec<usize> = (0..counts.len()).collect();
        order.sort_by(|&a, &b| {
            let ra = quotas[a] - quotas[a].floor();
            let rb = quotas[b] - quotas[b].floor();
            rb.total_cmp(&ra).then(a.cmp(&b))
        });
        for &i in order.iter().take(n.saturating_sub(assigned)) {
            counts[i] += 1;
        }
        self.0.keys().copied().zip(counts).collect()
    }

    /// One corruption per item, shuffled under `seed`, each with its own rng seed.
    pub fn assign(&self, n: usize, seed: u64) -> Vec<Corruption> {
        let mut kinds: Vec<CorruptionKind> = self
            .counts(n)
            .into_iter()
            .flat_map(|(k, c)| std::iter::repeat_n(k, c))
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        kinds.shuffle(&mut rng);
        kinds
            .into_iter()
            .map(|k| Corruption::new(k, rng.gen()))
            .collect()
    }
}

#[derive(Debug, Serialize)]
pub struct MockRow {
    pub id: String,
    pub text: String,
}

#[derive(Debug, Args)]
pub struct MockArgs {
    /// Record JSON Lines file.
    pub dataset: PathBuf,
    /// JSON object mapping corruption kinds to fractions summing to 1
    /// (default: every item uncorrupted).
    #[arg(long)]
    pub plan: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// 0 = unconstrained, 1 = forced opening mark, 2 = full grammar.
    #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u8).range(0..=2))]
    pub level: u8,
    /// Token vocabulary (JSON Lines of {id, text} or one token per line).
    /// Default: a vocabulary covering each record.
    #[arg(long)]
    pub vocab: Option<PathBuf>,
    /// End-of-sequence token text within --vocab.
    #[arg(long, requires = "vocab")]
    pub eos: Option<String>,
    #[command(flatten)]
    pub schema: SchemaArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn mock_texts(
    records: &[ScnmRecord],
    schema: &LabelSchema,
    variant: FormatVariant,
    plan: &CorruptionPlan,
    seed: u64,
    level: Option<ConstraintLevel>,
    vocab: Option<&Vocabulary>,
) -> Result<Vec<String>, CliError> {
    let corruptions = plan.assign(records.len(), seed);
    records
        .iter()
        .zip(corruptions)
        .map(|(r, c)| match vocab {
            None => Ok(generate_constrained(r, schema, variant, c, level)),
            Some(v) => generate_constrained_with(r, schema, variant, c, level, v)
                .map_err(|e| CliError::ingest(format!("vocabulary: {e}"))),
        })
        .collect()
}

fn load_vocab(path: &Path, eos: Option<&str>) -> Result<Vocabulary, CliError> {
    let bad = |e: String| CliError::ingest(format!("{}: {e}", path.display()));
    let mut v = Vocabulary::parse(&io::read_to_string(path)?).map_err(|e| bad(e.to_string()))?;
    if let Some(eos) = eos {
        v.set_eos(eos).map_err(|e| bad(e.to_string()))?;
    }
    Ok(v)
}

pub fn run(args: &MockArgs) -> Result<(), CliError> {
    let schema = args.schema.load()?;
    let plan = match &args.plan {
        None => CorruptionPlan::clean(),
        Some(p) => CorruptionPlan::from_json_str(&io::read_to_string(p)?)
            .map_err(|e| CliError::ingest(format!("{}: {e}", p.display())))?,
    };
    let level = match args.level {
        0 => None,
        l => Some(ConstraintLevel::try_from(l).map_err(CliError::Usage)?),
    };
    let vocab = args
        .vocab
        .as_deref()
        .map(|p| load_vocab(p, args.eos.as_deref()))
        .transpose()?;
    let records = load_records(&args.dataset, &schema)?;
    let texts = mock_texts(
        &records,
        &schema,
        args.schema.variant,
        &plan,
        args.seed,
        level,
        vocab.as_ref(),
    )?;
    let rows = records.iter().zip(texts).map(|(r, text)| MockRow {
        id: r.id().to_owned(),
        text,
    });
    emit(args.out.as_deref(), &io::to_jsonl(rows))
}
