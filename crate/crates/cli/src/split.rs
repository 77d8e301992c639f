use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::Args;
use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use slg_core::{validate_record, LabelSchema, RawRecord};

use crate::{io, load_schema, CliError};

/// A train fraction in [0, 1], kept exact so that `floor(n * ratio)` has no rounding surprises.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TrainRatio(Ratio<u64>);

impl TrainRatio {
    pub fn new(r: Ratio<u64>) -> Result<Self, String> {
        if r > Ratio::from_integer(1) {
            return Err(format!("RatioOutOfRange: {r} is greater than 1"));
        }
        Ok(TrainRatio(r))
    }

    pub fn train_size(self, n: usize) -> usize {
        let (num, den) = (*self.0.numer() as u128, *self.0.denom() as u128);
        (n as u128 * num / den) as usize
    }
}

impl FromStr for TrainRatio {
    type Err = String;

    /// Accepts `0.9`, `.9`, `1`, or `9/10`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || format!("invalid ratio {s:?}");
        let s = s.trim();
        let r = if let Some((n, d)) = s.split_once('/') {
            let n: u64 = n.trim().parse().map_err(|_| bad())?;
            let d: u64 = d.trim().parse().map_err(|_| bad())?;
            if d == 0 {
                return Err(bad());
            }
            Ratio::new(n, d)
        } else {
            let (int, frac) = s.split_once('.').unwrap_or((s, ""));
            let all_digits = |p: &str| p.bytes().all(|b| b.is_ascii_digit());
            if (int.is_empty() && frac.is_empty())
                || !all_digits(int)
                || !all_digits(frac)
                || frac.len() > 18
            {
                return Err(bad());
            }
            let den = 10u64.pow(frac.len() as u32);
            let int: u64 = if int.is_empty() {
                0
            } else {
                int.parse().map_err(|_| bad())?
            };
            let frac: u64 = if frac.is_empty() {
                0
            } else {
                frac.parse().map_err(|_| bad())?
            };
            let num = int
                .checked_mul(den)
                .and_then(|v| v.checked_add(frac))
                .ok_or_else(bad)?;
            Ratio::new(num, den)
        };
        TrainRatio::new(r)
    }
}

#[derive(Debug, Args)]
pub struct SplitArgs {
    /// Record JSON Lines file.
    pub dataset: PathBuf,
    /// Output directory for train.jsonl and test.jsonl.
    #[arg(long)]
    pub out: PathBuf,
    /// Train fraction, decimal or n/d.
    #[arg(long, default_value = "0.9")]
    pub train_ratio: TrainRatio,
    /// Shuffle seed; a random one is drawn and reported when omitted.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub schema: Option<PathBuf>,
}

/// Indices of the train and test partitions, each in ascending order.
pub fn partition(n: usize, ratio: TrainRatio, seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let k = ratio.train_size(n);
    let mut train = order[..k].to_vec();
    let mut test = order[k..].to_vec();
    train.sort_unstable();
    test.sort_unstable();
    (train, test)
}

/// Validated lines of a record file, kept verbatim.
fn load_raw_lines(path: &Path, schema: &LabelSchema) -> Result<Vec<String>, CliError> {
    let lines = io::read_jsonl::<RawRecord>(path)?;
    let mut errors = Vec::new();
    for line in &lines {
        if let Err(vs) = validate_record(&line.value, schema) {
            for v in vs {
                errors.push(format!(
                    "{}:{} (id {}): {v}",
                    path.display(),
                    line.number,
                    line.value.id
                ));
            }
        }
    }
    if !errors.is_empty() {
        return Err(CliError::Ingest(errors));
    }
    if lines.is_empty() {
        return Err(CliError::ingest(format!(
            "{}: EmptyDataset",
            path.display()
        )));
    }
    Ok(lines.into_iter().map(|l| l.raw).collect())
}

pub fn run(args: &SplitArgs) -> Result<(), CliError> {
    let schema = load_schema(args.schema.as_deref())?;
    let lines = load_raw_lines(&args.dataset, &schema)?;
    let seed = args.seed.unwrap_or_else(|| {
        let s = rand::thread_rng().gen();
        eprintln!("split seed: {s}");
        s
    });
    let (train, test) = partition(lines.len(), args.train_ratio, seed);
    let join = |idx: &[usize]| {
        idx.iter()
            .map(|&i| format!("{}\n", lines[i]))
            .collect::<String>()
    };
    io::write_atomic(&args.out.join("train.jsonl"), &join(&train))?;
    io::write_atomic(&args.out.join("test.jsonl"), &join(&test))?;
    eprintln!("train {} / test {}", train.len(), test.len());
    Ok(())
}
