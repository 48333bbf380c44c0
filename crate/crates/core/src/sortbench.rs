//! Comparison-counting Shellsort and reproducible benchmark fixtures.
//!
//! # Counting convention
//!
//! For a pass with gap `g` and each `i` in `g..n`, the key `a[i]` is tested
//! against `a[j - g]` for `j = i, i - g, ...` while `j >= g`. Every test
//! counts one comparison, including the one that stops the chain
//! (`a[j - g] <= key`). Reaching the front of the array costs nothing.
//!
//! # Random permutations
//!
//! Trial `i` of a [`TrialSet`] is a Fisher-Yates shuffle of `0..n` driven by
//! xoshiro256** seeded through `seed_from_u64` (which expands the seed with
//! SplitMix64). The per-trial seed is
//! `splitmix64(master_seed + 0x9E3779B97F4A7C15 * (i + 1))` with wrapping
//! arithmetic, where `splitmix64` is the SplitMix64 output finalizer
//! (`z ^= z >> 30; z *= 0xBF58476D1CE4E5B9; z ^= z >> 27;
//! z *= 0x94D049BB133111EB; z ^= z >> 31`). Bounded draws use Lemire's
//! multiply-and-reject method on 64-bit outputs, so permutations depend on
//! nothing but `(master_seed, i, n)`.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256StarStar;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gapseq::{truncate_for_size, GapSequence};

/// Sorts `data` in place with the given increasing gaps and returns the
/// number of element comparisons. Gaps at or above `data.len()` are no-ops.
pub fn shellsort_count<T: Ord + Copy>(data: &mut [T], gaps: &[u64]) -> Result<u64> {
    if gaps.first() != Some(&1) {
        return Err(Error::InvalidSequence("gap sequence must start with 1".into()));
    }
    if gaps.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidSequence("gaps must be strictly increasing".into()));
    }
    let n = data.len();
    let mut count = 0u64;
    for &gap in gaps.iter().rev() {
        if gap >= n as u64 {
            continue;
        }
        let g = gap as usize;
        for i in g..n {
            // SAFETY: g <= j <= i < n throughout, so j and j - g are in bounds.
            unsafe {
                let key = *data.get_unchecked(i);
                let mut j = i;
                while j >= g {
                    count += 1;
                    let prev = *data.get_unchecked(j - g);
                    if prev <= key {
                        break;
                    }
                    *data.get_unchecked_mut(j) = prev;
                    j -= g;
                }
                *data.get_unchecked_mut(j) = key;
            }
        }
    }
    Ok(count)
}

/// A permutation of `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Permutation(Vec<u32>);

impl Permutation {
    pub fn elements(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_vec(self) -> Vec<u32> {
        self.0
    }

    pub fn is_bijection(&self) -> bool {
        let mut seen = vec![false; self.0.len()];
        self.0.iter().all(|&x| {
            let slot = seen.get_mut(x as usize);
            match slot {
                Some(s) if !*s => {
                    *s = true;
                    true
                }
                _ => false,
            }
        })
    }
}

/// SplitMix64 output finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of trial `index` under `master_seed`.
pub fn trial_seed(master_seed: u64, index: u64) -> u64 {
    splitmix64(master_seed.wrapping_add(0x9E37_79B9_7F4A_7C15u64.wrapping_mul(index.wrapping_add(1))))
}

/// Uniform draw from `0..range` (Lemire).
fn bounded(rng: &mut Xoshiro256StarStar, range: u64) -> u64 {
    let mut m = rng.next_u64() as u128 * range as u128;
    if (m as u64) < range {
        let threshold = range.wrapping_neg() % range;
        while (m as u64) < threshold {
            m = rng.next_u64() as u128 * range as u128;
        }
    }
    (m >> 64) as u64
}

/// Fisher-Yates shuffle of `0..n` from a 64-bit seed.
pub fn shuffled(seed: u64, n: usize) -> Permutation {
    assert!(n <= u32::MAX as usize + 1, "permutation too large");
    let mut rng = Xoshiro256StarStar::seed_from_u64(seed);
    let mut v: Vec<u32> = (0..n as u64).map(|x| x as u32).collect();
    for i in (1..n).rev() {
        let j = bounded(&mut rng, i as u64 + 1) as usize;
        v.swap(i, j);
    }
    Permutation(v)
}

/// A reproducible set of `count` random permutations of `0..n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TrialSet {
    pub master_seed: u64,
    pub count: u64,
    pub n: u64,
}

impl TrialSet {
    pub fn new(master_seed: u64, count: u64, n: u64) -> Result<Self> {
        if count == 0 || n == 0 {
            return Err(Error::Config("trial count and n must be positive".into()));
        }
        Ok(TrialSet { master_seed, count, n })
    }

    pub fn permutation(&self, index: u64) -> Permutation {
        shuffled(trial_seed(self.master_seed, index), self.n as usize)
    }

    pub fn iter(&self) -> impl Iterator<Item = Permutation> + '_ {
        (0..self.count).map(move |i| self.permutation(i))
    }
}

/// The `index`-th permutation of `0..n` in lexicographic order.
pub fn nth_permutation(n: usize, mut index: u64) -> Permutation {
    let mut pool: Vec<u32> = (0..n as u32).collect();
    let mut out = Vec::with_capacity(n);
    for remaining in (1..=n).rev() {
        let block = factorial(remaining as u64 - 1).expect("n! fits u64");
        let pick = (index / block) as usize;
        index %= block;
        out.push(pool.remove(pick));
    }
    Permutation(out)
}

/// `n!` when it fits in a u64.
pub fn factorial(n: u64) -> Option<u64> {
    (2..=n).try_fold(1u64, |acc, k| acc.checked_mul(k))
}

/// The permutations a benchmark runs over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Fixture {
    Random(TrialSet),
    /// All `n!` permutations of `0..n`.
    Exhaustive { n: u64 },
}

impl Fixture {
    pub fn exhaustive(n: u64) -> Result<Self> {
        match factorial(n) {
            Some(_) if (1..=12).contains(&n) => Ok(Fixture::Exhaustive { n }),
            _ => Err(Error::Config(format!("exhaustive fixture needs 1 <= n <= 12, got {n}"))),
        }
    }

    pub fn n(&self) -> u64 {
        match self {
            Fixture::Random(t) => t.n,
            Fixture::Exhaustive { n } => *n,
        }
    }

    pub fn count(&self) -> u64 {
        match self {
            Fixture::Random(t) => t.count,
            Fixture::Exhaustive { n } => factorial(*n).expect("checked at construction"),
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match self {
            Fixture::Random(t) => Some(t.master_seed),
            Fixture::Exhaustive { .. } => None,
        }
    }

    pub fn permutation(&self, index: u64) -> Permutation {
        match self {
            Fixture::Random(t) => t.permutation(index),
            Fixture::Exhaustive { n } => nth_permutation(*n as usize, index),
        }
    }
}

/// `log2(n!)`, by compensated summation of `log2 k`.
pub fn log2_factorial(n: u64) -> f64 {
    let (mut sum, mut carry) = (0.0f64, 0.0f64);
    for k in 2..=n {
        let y = (k as f64).log2() - carry;
        let t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    sum
}

/// Whether passes use every increment, or only those at most `n / 2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Truncation {
    HalfSize,
    None,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchResult {
    pub sequence_id: String,
    /// The increments actually used.
    pub gaps: Vec<u64>,
    pub fixture: Fixture,
    pub total_comparisons: u128,
    pub mean_comparisons: f64,
    /// Population variance over trials.
    pub variance: f64,
    /// `mean_comparisons / log2(n!)`; NaN when `n < 2`.
    pub normalized_mean: f64,
    pub per_trial: Vec<u64>,
}

/// Benchmarks every sequence, truncated to `n / 2`, on the same trial set.
pub fn run_bench(sequences: &[GapSequence], trials: &TrialSet) -> Result<Vec<BenchResult>> {
    run_bench_with(sequences, &Fixture::Random(*trials), Truncation::HalfSize)
}

/// Sorts every fixture permutation with every sequence. Each permutation is
/// generated once and shared by all sequences; trials run in parallel and
/// are aggregated in index order.
pub fn run_bench_with(
    sequences: &[GapSequence],
    fixture: &Fixture,
    truncation: Truncation,
) -> Result<Vec<BenchResult>> {
    let gaps: Vec<GapSequence> = sequences
        .iter()
        .map(|s| match truncation {
            Truncation::HalfSize => truncate_for_size(s, fixture.n()),
            Truncation::None => s.clone(),
        })
        .collect();

    // counts[trial][sequence]
    let counts: Vec<Vec<u64>> = (0..fixture.count())
        .into_par_iter()
        .map(|t| {
            let perm = fixture.permutation(t);
            let mut buf = vec![0u32; perm.len()];
            gaps.iter()
                .map(|g| {
                    buf.copy_from_slice(perm.elements());
                    let c = shellsort_count(&mut buf, g.increments())?;
                    if !buf.windows(2).all(|w| w[0] < w[1]) {
                        return Err(Error::Unsorted { sequence: g.source().to_string(), trial: t });
                    }
                    Ok(c)
                })
                .collect::<Result<Vec<u64>>>()
        })
        .collect::<Result<_>>()?;

    let lf = log2_factorial(fixture.n());
    let results = sequences
        .iter()
        .zip(&gaps)
        .enumerate()
        .map(|(s, (seq, used))| {
            let per_trial: Vec<u64> = counts.iter().map(|row| row[s]).collect();
            summarize(seq.source().to_string(), used.increments().to_vec(), *fixture, per_trial, lf)
        })
        .collect();
    Ok(results)
}

fn summarize(
    sequence_id: String,
    gaps: Vec<u64>,
    fixture: Fixture,
    per_trial: Vec<u64>,
    log2_fact: f64,
) -> BenchResult {
    let t = per_trial.len() as u128;
    let total: u128 = per_trial.iter().map(|&c| c as u128).sum();
    let squares: u128 = per_trial.iter().map(|&c| (c as u128) * (c as u128)).sum();
    // T^2 var = T sum(x^2) - (sum x)^2, exact in integers.
    let spread = t * squares - total * total;
    let mean = total as f64 / t as f64;
    let variance = spread as f64 / (t * t) as f64;
    let normalized_mean = if fixture.n() >= 2 { mean / log2_fact } else { f64::NAN };
    BenchResult {
        sequence_id,
        gaps,
        fixture,
        total_comparisons: total,
        mean_comparisons: mean,
        variance,
        normalized_mean,
        per_trial,
    }
}
