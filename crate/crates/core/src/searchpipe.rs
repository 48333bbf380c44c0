//! Stepwise narrowing search for a good gamma.
//!
//! Each step enumerates every distinct truncated gamma-sequence on the
//! current interval, benchmarks all of them on one shared trial set, ranks
//! them by mean comparisons, takes the longest prefix shared by a quorum of
//! the best `top_t`, and narrows the interval to the gammas realizing that
//! prefix.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use crate::error::{Error, Result};
use crate::exactroots::{
    compare_boundaries, enumerate_cells, gamma_range_for_prefix, BoundaryGamma, GammaInterval,
    SequenceCell,
};
use crate::gapseq::{parse_exact_rational, GapSequence};
use crate::sortbench::{run_bench, BenchResult, TrialSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StepSpec {
    pub n_elements: u64,
    pub trials: u64,
}

#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub initial_interval: GammaInterval,
    pub steps: Vec<StepSpec>,
    pub top_t: usize,
    /// Fraction of `top_t` that must share the carried prefix, as (num, den).
    pub quorum: (u64, u64),
    pub master_seed: u64,
}

pub const DEFAULT_TOP_T: usize = 8;
pub const DEFAULT_QUORUM: (u64, u64) = (5, 8);

impl SearchConfig {
    pub fn new(initial_interval: GammaInterval, steps: Vec<StepSpec>, master_seed: u64) -> Self {
        SearchConfig {
            initial_interval,
            steps,
            top_t: DEFAULT_TOP_T,
            quorum: DEFAULT_QUORUM,
            master_seed,
        }
    }

    /// `(2.24, 2.26]` with N = 10^4 and 10^5, 1000 trials each.
    pub fn desk(master_seed: u64) -> Self {
        let steps = [10_000, 100_000]
            .into_iter()
            .map(|n| StepSpec { n_elements: n, trials: 1000 })
            .collect();
        Self::new(GammaInterval::parse("2.24", "2.26").expect("valid"), steps, master_seed)
    }

    /// `(2.24, 2.26]` with N = 10^5 .. 10^8 and 10000 trials per step.
    /// Days of CPU time.
    pub fn full_scale(master_seed: u64) -> Self {
        let steps = [100_000, 1_000_000, 10_000_000, 100_000_000]
            .into_iter()
            .map(|n| StepSpec { n_elements: n, trials: 10_000 })
            .collect();
        Self::new(GammaInterval::parse("2.24", "2.26").expect("valid"), steps, master_seed)
    }

    /// `(2.37, 2.39]` with N = 4 * 10^4 and 4 * 10^5, 1000 trials each.
    pub fn ciura_branch_desk(master_seed: u64) -> Self {
        let steps = [40_000, 400_000]
            .into_iter()
            .map(|n| StepSpec { n_elements: n, trials: 1000 })
            .collect();
        Self::new(GammaInterval::parse("2.37", "2.39").expect("valid"), steps, master_seed)
    }

    pub fn quorum_count(&self, pool: usize) -> usize {
        quorum_count(self.quorum, pool)
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps.is_empty() {
            return Err(Error::Config("at least one step is required".into()));
        }
        if self.steps.windows(2).any(|w| w[0].n_elements >= w[1].n_elements) {
            return Err(Error::Config("step sizes must be strictly increasing".into()));
        }
        if self.steps.iter().any(|s| s.n_elements < 2 || s.trials == 0) {
            return Err(Error::Config("each step needs n >= 2 and at least one trial".into()));
        }
        if self.top_t == 0 {
            return Err(Error::Config("top_t must be positive".into()));
        }
        let (num, den) = self.quorum;
        if num == 0 || den == 0 || num > den {
            return Err(Error::Config("quorum must lie in (0, 1]".into()));
        }
        Ok(())
    }

    /// Parses the flat `key = value` config format:
    ///
    /// ```text
    /// # comments and blank lines are ignored
    /// lo = 2.24
    /// hi = 2.26
    /// steps = 10000:1000, 100000:1000   # n:trials per step
    /// top_t = 8
    /// quorum = 5/8
    /// seed = 20211101
    /// ```
    ///
    /// `preset = desk | full | ciura` fills every field first; later keys
    /// override it.
    pub fn parse(text: &str, default_seed: u64) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", lineno + 1)))?;
            map.insert(key.trim().to_string(), value.trim().to_string());
        }
        let seed = match map.get("seed") {
            Some(s) => s.parse().map_err(|_| Error::Config(format!("bad seed {s:?}")))?,
            None => default_seed,
        };
        let mut config = match map.get("preset").map(String::as_str) {
            None => None,
            Some("desk") => Some(Self::desk(seed)),
            Some("full") => Some(Self::full_scale(seed)),
            Some("ciura") => Some(Self::ciura_branch_desk(seed)),
            Some(other) => return Err(Error::Config(format!("unknown preset {other:?}"))),
        };
        for key in map.keys() {
            if !matches!(key.as_str(), "preset" | "lo" | "hi" | "steps" | "top_t" | "quorum" | "seed") {
                return Err(Error::Config(format!("unknown key {key:?}")));
            }
        }
        let interval = match (map.get("lo"), map.get("hi")) {
            (Some(lo), Some(hi)) => Some(GammaInterval::parse(lo, hi)?),
            (None, None) => None,
            _ => return Err(Error::Config("lo and hi must be given together".into())),
        };
        let steps = map.get("steps").map(|s| parse_steps(s)).transpose()?;
        let mut config = match (config.take(), interval, steps) {
            (Some(mut c), interval, steps) => {
                if let Some(i) = interval {
                    c.initial_interval = i;
                }
                if let Some(s) = steps {
                    c.steps = s;
                }
                c
            }
            (None, Some(i), Some(s)) => Self::new(i, s, seed),
            (None, _, _) => {
                return Err(Error::Config("lo, hi and steps are required without a preset".into()))
            }
        };
        config.master_seed = seed;
        if let Some(t) = map.get("top_t") {
            config.top_t = t.parse().map_err(|_| Error::Config(format!("bad top_t {t:?}")))?;
        }
        if let Some(q) = map.get("quorum") {
            config.quorum = parse_fraction(q)?;
        }
        config.validate()?;
        Ok(config)
    }
}

fn parse_steps(s: &str) -> Result<Vec<StepSpec>> {
    s.split(',')
        .map(|part| {
            let (n, t) = part
                .trim()
                .split_once(':')
                .ok_or_else(|| Error::Config(format!("step {part:?} is not n:trials")))?;
            let parse = |x: &str| {
                x.trim()
                    .replace('_', "")
                    .parse::<u64>()
                    .map_err(|_| Error::Config(format!("bad number {x:?}")))
            };
            Ok(StepSpec { n_elements: parse(n)?, trials: parse(t)? })
        })
        .collect()
}

fn parse_fraction(s: &str) -> Result<(u64, u64)> {
    let q = parse_exact_rational(s).ok_or_else(|| Error::Config(format!("bad quorum {s:?}")))?;
    if q <= BigRational::from_integer(0.into()) || q > BigRational::one() {
        return Err(Error::Config(format!("quorum {s} outside (0, 1]")));
    }
    match (q.numer().to_u64(), q.denom().to_u64()) {
        (Some(n), Some(d)) => Ok((n, d)),
        _ => Err(Error::Config(format!("bad quorum {s:?}"))),
    }
}

/// `ceil(num / den * pool)`, at least 1.
pub fn quorum_count((num, den): (u64, u64), pool: usize) -> usize {
    (num as u128 * pool as u128).div_ceil(den as u128).max(1) as usize
}

/// Longest prefix that at least `quorum_count` of `sequences` start with.
/// Among equally long candidates the one shared by the earliest listed
/// sequence wins.
pub fn common_prefix(sequences: &[GapSequence], quorum_count: usize) -> Result<GapSequence> {
    if sequences.is_empty() || quorum_count == 0 || quorum_count > sequences.len() {
        return Err(Error::Search {
            step: 0,
            reason: format!("quorum {quorum_count} unreachable among {} sequences", sequences.len()),
        });
    }
    let longest = sequences.iter().map(GapSequence::len).max().unwrap_or(0);
    let mut best: Option<&[u64]> = None;
    for len in 1..=longest {
        let mut groups: BTreeMap<&[u64], (usize, usize)> = BTreeMap::new();
        for (i, s) in sequences.iter().enumerate() {
            if s.len() >= len {
                let e = groups.entry(&s.increments()[..len]).or_insert((0, i));
                e.0 += 1;
            }
        }
        let winner = groups
            .into_iter()
            .filter(|(_, (count, _))| *count >= quorum_count)
            .min_by_key(|(_, (_, first))| *first);
        match winner {
            Some((prefix, _)) => best = Some(prefix),
            None => break,
        }
    }
    let prefix = best.ok_or_else(|| Error::Search {
        step: 0,
        reason: "no common first increment".into(),
    })?;
    GapSequence::explicit(prefix.to_vec())
}

#[derive(Debug)]
pub struct StepReport {
    pub step: usize,
    pub interval_in: GammaInterval,
    pub n_elements: u64,
    pub trials: TrialSet,
    /// All cells in increasing gamma order.
    pub cells: Vec<SequenceCell>,
    /// Benchmarks, aligned with `cells`.
    pub results: Vec<BenchResult>,
    /// Indices into `cells`, best first.
    pub ranking: Vec<usize>,
    pub top_t: usize,
    pub quorum_count: usize,
    pub consensus: GapSequence,
    pub interval_out: GammaInterval,
    /// The best cell does not start with the consensus prefix.
    pub best_diverges: bool,
}

impl StepReport {
    pub fn best(&self) -> (&SequenceCell, &BenchResult) {
        let i = self.ranking[0];
        (&self.cells[i], &self.results[i])
    }

    pub fn top(&self) -> impl Iterator<Item = (&SequenceCell, &BenchResult)> {
        self.ranking.iter().take(self.top_t).map(|&i| (&self.cells[i], &self.results[i]))
    }
}

fn cmp_labels(a: &Option<BoundaryGamma>, b: &Option<BoundaryGamma>) -> Ordering {
    match (a, b) {
        (Some(x), Some(y)) => compare_boundaries(x, y),
        (Some(_), None) => Ordering::Less,
        (None, Some(_)) => Ordering::Greater,
        (None, None) => Ordering::Equal,
    }
}

/// One narrowing step. `step` numbers the step from 1 and salts the trial seed.
pub fn run_step(
    step: usize,
    interval: &GammaInterval,
    spec: StepSpec,
    top_t: usize,
    quorum: (u64, u64),
    master_seed: u64,
) -> Result<StepReport> {
    let fail = |reason: String| Error::Search { step, reason };
    if top_t == 0 {
        return Err(fail("top_t must be positive".into()));
    }
    let cells = enumerate_cells(interval, spec.n_elements / 2);
    if cells.is_empty() {
        return Err(fail("no cells in interval".into()));
    }
    let trials = TrialSet::new(master_seed ^ step as u64, spec.trials, spec.n_elements)?;
    let sequences: Vec<GapSequence> = cells.iter().map(|c| c.sequence.clone()).collect();
    let results = run_bench(&sequences, &trials)?;

    let mut ranking: Vec<usize> = (0..cells.len()).collect();
    // Equal trial counts, so exact totals order the means.
    ranking.sort_by(|&a, &b| {
        results[a]
            .total_comparisons
            .cmp(&results[b].total_comparisons)
            .then_with(|| cmp_labels(&cells[a].label, &cells[b].label))
    });

    let pool = top_t.min(cells.len());
    let quorum_count = quorum_count(quorum, pool);
    let top: Vec<GapSequence> = ranking[..pool].iter().map(|&i| cells[i].sequence.clone()).collect();
    let consensus = common_prefix(&top, quorum_count).map_err(|e| match e {
        Error::Search { reason, .. } => fail(reason),
        other => other,
    })?;
    let interval_out = gamma_range_for_prefix(consensus.increments())?
        .intersect(interval)
        .map_err(|_| fail("consensus prefix range misses the interval".into()))?;
    let best_diverges = !top[0].starts_with(&consensus);

    Ok(StepReport {
        step,
        interval_in: interval.clone(),
        n_elements: spec.n_elements,
        trials,
        cells,
        results,
        ranking,
        top_t: pool,
        quorum_count,
        consensus,
        interval_out,
        best_diverges,
    })
}

#[derive(Debug)]
pub struct SearchReport {
    pub steps: Vec<StepReport>,
    /// Right endpoint of the best cell of the last step, refined to 1e-18.
    pub gamma: BoundaryGamma,
    pub best_sequence: GapSequence,
}

impl SearchReport {
    pub fn final_interval(&self) -> &GammaInterval {
        &self.steps.last().expect("at least one step").interval_out
    }
}

pub fn run_search(config: &SearchConfig) -> Result<SearchReport> {
    config.validate()?;
    let mut interval = config.initial_interval.clone();
    let mut steps = Vec::with_capacity(config.steps.len());
    for (i, spec) in config.steps.iter().enumerate() {
        let report = run_step(i + 1, &interval, *spec, config.top_t, config.quorum, config.master_seed)?;
        interval = report.interval_out.clone();
        steps.push(report);
    }
    let last = steps.last().expect("validated nonempty");
    let (cell, _) = last.best();
    let gamma = cell.label.clone().ok_or_else(|| Error::Search {
        step: last.step,
        reason: "best cell is unbounded".into(),
    })?;
    gamma.refine(&BigRational::new(1.into(), num_traits::pow(num_bigint::BigInt::from(10), 18)));
    let best_sequence = cell.sequence.clone();
    Ok(SearchReport { steps, gamma, best_sequence })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(v: &[u64]) -> GapSequence {
        GapSequence::explicit(v.to_vec()).unwrap()
    }

    const TOP8_ROWS: [&[u64]; 8] = [
        &[1, 4, 9, 20, 45, 102, 230, 516, 1158, 2599, 5831, 13082, 29351],
        &[1, 4, 9, 20, 46, 103, 233, 524, 1179, 2652, 5964, 13414, 30170],
        &[1, 4, 9, 20, 45, 102, 230, 516, 1158, 2599, 5831, 13082, 29353],
        &[1, 4, 9, 20, 46, 103, 233, 524, 1179, 2652, 5966, 13418, 30180],
        &[1, 4, 9, 20, 45, 102, 230, 516, 1158, 2599, 5831, 13083, 29353],
        &[1, 4, 9, 20, 45, 102, 230, 516, 1158, 2599, 5833, 13087, 29363],
        &[1, 4, 9, 20, 45, 102, 230, 516, 1158, 2599, 5831, 13083, 29355],
        &[1, 4, 9, 20, 46, 103, 233, 524, 1179, 2652, 5964, 13414, 30171],
    ];

    #[test]
    fn consensus_of_top_eight() {
        let rows: Vec<GapSequence> = TOP8_ROWS.iter().map(|r| seq(r)).collect();
        let p = common_prefix(&rows, 5).unwrap();
        assert_eq!(p.increments(), &[1, 4, 9, 20, 45, 102, 230, 516, 1158, 2599]);
        assert_eq!(common_prefix(&rows, 8).unwrap().increments(), &[1, 4, 9, 20]);
    }

    #[test]
    fn consensus_edge_cases() {
        let s = seq(&[1, 4, 9, 20]);
        assert_eq!(common_prefix(&[s.clone(), s.clone(), s.clone()], 2).unwrap(), s);
        let a = seq(&[1, 3, 7]);
        let b = seq(&[1, 4, 9]);
        assert_eq!(common_prefix(&[a.clone(), b.clone()], 2).unwrap().increments(), &[1]);
        // Ties in length go to the earliest listed sequence.
        assert_eq!(common_prefix(&[b.clone(), a.clone()], 1).unwrap(), b);
        assert!(common_prefix(std::slice::from_ref(&a), 2).is_err());
        assert!(common_prefix(&[], 1).is_err());
    }

    #[test]
    fn quorum_counts() {
        assert_eq!(quorum_count((5, 8), 8), 5);
        assert_eq!(quorum_count((5, 8), 3), 2);
        assert_eq!(quorum_count((5, 8), 1), 1);
        assert_eq!(quorum_count((1, 1), 8), 8);
    }

    #[test]
    fn step_inside_single_cell() {
        let iv = GammaInterval::parse("2.2436090613", "2.2436090614").unwrap();
        let r = run_step(1, &iv, StepSpec { n_elements: 2000, trials: 5 }, 1, (1, 1), 9).unwrap();
        assert_eq!(r.cells.len(), 1);
        assert_eq!(r.consensus.increments(), r.cells[0].sequence.increments());
        assert!(r.interval_out.is_subset_of(&iv));
        assert!(iv.is_subset_of(&r.interval_out));
        assert!(!r.best_diverges);
    }

    #[test]
    fn config_parsing() {
        let c = SearchConfig::parse(
            "# search\nlo = 2.24\nhi = 2.26\nsteps = 1000:10, 10000:5\ntop_t = 4\nquorum = 3/4\n",
            77,
        )
        .unwrap();
        assert_eq!(c.steps.len(), 2);
        assert_eq!(c.steps[1], StepSpec { n_elements: 10000, trials: 5 });
        assert_eq!((c.top_t, c.quorum, c.master_seed), (4, (3, 4), 77));
        let c = SearchConfig::parse("preset = desk\nseed = 5\n", 77).unwrap();
        assert_eq!(c.master_seed, 5);
        assert_eq!(c.steps.len(), 2);
        assert!(SearchConfig::parse("lo = 2.24\n", 0).is_err());
        assert!(SearchConfig::parse("preset = desk\nbogus = 1\n", 0).is_err());
        assert!(SearchConfig::parse("preset = desk\nsteps = 1000:1, 100:1\n", 0).is_err());
        assert!(SearchConfig::parse("preset = desk\nquorum = 3/2\n", 0).is_err());
        assert!(SearchConfig::parse("lo = 2.26\nhi = 2.24\nsteps = 100:1\n", 0).is_err());
    }
}
