use std::cmp::Ordering;

use num_traits::ToPrimitive;
use rayon::prelude::*;

use super::boundary::{ceil_sum_at, compare_boundaries, BoundaryGamma};
use super::interval::{compare_endpoints, Endpoint, GammaInterval};
use crate::error::{Error, Result};
use crate::gapseq::{GapSequence, GapSource, CIURA};

/// A maximal interval on which the truncated gamma-sequence is constant,
/// labeled by its right endpoint. The label is `None` only when the cell
/// extends to infinity.
#[derive(Clone, Debug)]
pub struct SequenceCell {
    pub label: Option<BoundaryGamma>,
    pub sequence: GapSequence,
}

/// The gamma-sequence evaluated exactly at a boundary root, up to `limit`.
/// Increment `k` of `b` equals `h`.
pub fn sequence_at_boundary(b: &BoundaryGamma, limit: u64) -> GapSequence {
    let mut increments = vec![1u64];
    for j in 2.. {
        let (c, _) = ceil_sum_at(b, j);
        match c.to_u64() {
            Some(c) if c <= limit => increments.push(c),
            _ => break,
        }
    }
    GapSequence::from_parts_unchecked(increments, GapSource::Boundary { k: b.k(), h: b.h() })
}

/// Per-degree data gathered from the interval endpoints.
struct DegreeSpan {
    k: u32,
    /// Increment k just above `lo`.
    first: u64,
    /// Last h whose boundary lies strictly inside the interval.
    last_interior: u64,
    /// Smallest h with boundary at or above `hi`, if within the limit.
    label_h: Option<u64>,
}

/// Enumerates every distinct truncated gamma-sequence on `interval`, in
/// increasing gamma order.
pub fn enumerate_cells(interval: &GammaInterval, limit: u64) -> Vec<SequenceCell> {
    let limit = limit.max(1);
    let mut spans = Vec::new();
    for k in 2u32.. {
        let (c_lo, exact_lo) = interval.lo().ceil_sum(k).expect("finite lower endpoint");
        let first = if exact_lo { c_lo + 1u32 } else { c_lo };
        let first = match first.to_u64() {
            Some(f) if f <= limit => f,
            _ => break,
        };
        let (last_interior, label_h) = match interval.hi().ceil_sum(k) {
            None => (limit, None),
            Some((c_hi, _)) => {
                let c_hi = c_hi.to_u64().unwrap_or(u64::MAX);
                (c_hi.saturating_sub(1).min(limit), (c_hi <= limit).then_some(c_hi))
            }
        };
        spans.push(DegreeSpan { k, first, last_interior, label_h });
    }

    let mut boundaries: Vec<BoundaryGamma> = spans
        .par_iter()
        .flat_map_iter(|s| {
            (s.first..=s.last_interior)
                .map(move |h| BoundaryGamma::new(s.k, h).expect("h above S_k(lo) >= k"))
        })
        .collect();
    // Runs are already sorted per degree; the stable sort merges them and
    // keeps the smallest degree first among coincident roots.
    boundaries.sort_by(compare_boundaries);

    let final_label = spans
        .iter()
        .filter_map(|s| s.label_h.map(|h| BoundaryGamma::new(s.k, h).expect("valid degree")))
        .min_by(compare_boundaries);

    let mut state: Vec<u64> = std::iter::once(1).chain(spans.iter().map(|s| s.first)).collect();
    let snapshot = |state: &[u64], label: &Option<BoundaryGamma>| {
        let increments: Vec<u64> = state.iter().copied().take_while(|&h| h <= limit).collect();
        let source = match label {
            Some(b) => GapSource::Boundary { k: b.k(), h: b.h() },
            None => GapSource::Explicit,
        };
        GapSequence::from_parts_unchecked(increments, source)
    };

    let mut cells = Vec::new();
    let mut i = 0;
    while i < boundaries.len() {
        let mut j = i + 1;
        while j < boundaries.len()
            && compare_boundaries(&boundaries[i], &boundaries[j]) == Ordering::Equal
        {
            j += 1;
        }
        let label = Some(boundaries[i].clone());
        cells.push(SequenceCell { sequence: snapshot(&state, &label), label });
        for b in &boundaries[i..j] {
            let slot = &mut state[b.k() as usize - 1];
            debug_assert_eq!(*slot, b.h());
            *slot = b.h() + 1;
        }
        i = j;
    }
    cells.push(SequenceCell { sequence: snapshot(&state, &final_label), label: final_label });
    cells
}

/// `{g : ceil(S_j(g)) = value}` as a half-open interval.
pub fn increment_range(j: u32, value: u64) -> Result<GammaInterval> {
    let unrealizable = || Error::UnrealizablePrefix(format!("increment {j} = {value}"));
    if j == 1 {
        return if value == 1 { Ok(GammaInterval::everything()) } else { Err(unrealizable()) };
    }
    if value <= j as u64 {
        return Err(unrealizable());
    }
    let lo = if value - 1 > j as u64 {
        Endpoint::Boundary(BoundaryGamma::new(j, value - 1)?)
    } else {
        Endpoint::one()
    };
    let hi = Endpoint::Boundary(BoundaryGamma::new(j, value)?);
    GammaInterval::new(lo, hi)
}

/// The exact set of gamma whose sequence starts with `prefix`.
pub fn gamma_range_for_prefix(prefix: &[u64]) -> Result<GammaInterval> {
    let describe = || format!("{prefix:?}");
    if prefix.is_empty() {
        return Err(Error::UnrealizablePrefix(describe()));
    }
    let mut lo = Endpoint::one();
    let mut hi = Endpoint::Infinity;
    for (i, &value) in prefix.iter().enumerate() {
        let range = increment_range(i as u32 + 1, value)
            .map_err(|_| Error::UnrealizablePrefix(describe()))?;
        if compare_endpoints(range.lo(), &lo) == Ordering::Greater {
            lo = range.lo().clone();
        }
        if compare_endpoints(range.hi(), &hi) == Ordering::Less {
            hi = range.hi().clone();
        }
        if compare_endpoints(&lo, &hi) != Ordering::Less {
            return Err(Error::UnrealizablePrefix(describe()));
        }
    }
    GammaInterval::new(lo, hi)
}

/// Per-increment gamma ranges of the Ciura sequence.
#[derive(Clone, Debug)]
pub struct CiuraRanges {
    pub rows: Vec<(u64, GammaInterval)>,
    /// Intersection of all rows; `None` when empty.
    pub intersection: Option<GammaInterval>,
}

pub fn ciura_increment_ranges() -> CiuraRanges {
    let rows: Vec<(u64, GammaInterval)> = CIURA
        .iter()
        .enumerate()
        .map(|(i, &h)| (h, increment_range(i as u32 + 1, h).expect("Ciura increments exceed index")))
        .collect();
    let intersection = rows
        .iter()
        .try_fold(GammaInterval::everything(), |acc, (_, r)| acc.intersect(r).ok());
    CiuraRanges { rows, intersection }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gapseq::{gamma_sequence, Gamma};
    use num_rational::BigRational;

    fn b(k: u32, h: u64) -> BoundaryGamma {
        BoundaryGamma::new(k, h).unwrap()
    }

    #[test]
    fn sequences_at_boundaries() {
        assert_eq!(
            sequence_at_boundary(&b(13, 28827), 50000).increments(),
            &[1, 4, 9, 20, 45, 102, 228, 511, 1145, 2565, 5745, 12869, 28827]
        );
        // The twelfth increment moves before the thirteenth.
        let s = sequence_at_boundary(&b(12, 12869), 50000);
        assert_eq!(&s.increments()[11..], &[12869, 28828]);
        let s = sequence_at_boundary(&b(13, 28828), 50000);
        assert_eq!(&s.increments()[11..], &[12870, 28828]);
        assert_eq!(sequence_at_boundary(&b(2, 4), 50).increments(), &[1, 4, 13, 40]);
    }

    #[test]
    fn prefix_ranges() {
        let r = gamma_range_for_prefix(&[1, 4]).unwrap();
        assert_eq!(r.lo().to_string(), "2.00000000000000000");
        assert_eq!(r.hi().to_string(), "3.00000000000000000");
        assert!(gamma_range_for_prefix(&[1]).unwrap().hi().as_boundary().is_none());
        assert!(matches!(gamma_range_for_prefix(&[2]), Err(Error::UnrealizablePrefix(_))));
        assert!(matches!(gamma_range_for_prefix(&[1, 2]), Err(Error::UnrealizablePrefix(_))));
        // Each entry alone is realizable, together not.
        assert!(matches!(gamma_range_for_prefix(&[1, 3, 13]), Err(Error::UnrealizablePrefix(_))));
        assert!(gamma_range_for_prefix(&[]).is_err());
    }

    #[test]
    fn ciura_ranges_are_disjoint() {
        let r = ciura_increment_ranges();
        assert_eq!(r.rows.len(), 8);
        assert!(r.intersection.is_none());
        assert!(r.rows[0].1.hi().as_boundary().is_none());
        let digits = |e: &Endpoint| e.as_boundary().unwrap().decimal(18);
        assert!(digits(r.rows[2].1.lo()).agrees_with("2.372281323269014"));
        assert!(digits(r.rows[2].1.hi()).agrees_with("2.541381265149110"));
        assert!(digits(r.rows[7].1.lo()).agrees_with("2.356357448679420"));
        assert!(digits(r.rows[7].1.hi()).agrees_with("2.356893893788949"));
    }

    #[test]
    fn small_enumeration_matches_sampling() {
        let iv = GammaInterval::parse("2.2", "2.3").unwrap();
        let cells = enumerate_cells(&iv, 2000);
        let seqs: Vec<&[u64]> = cells.iter().map(|c| c.sequence.increments()).collect();
        for w in seqs.windows(2) {
            assert_ne!(w[0], w[1]);
        }
        for i in 0..=1000 {
            let q = BigRational::new((2_200_000 + i * 100 + 1).into(), 1_000_000.into());
            let q = if i == 1000 { BigRational::new(23.into(), 10.into()) } else { q };
            let s = gamma_sequence(&Gamma::new(q).unwrap(), 2000);
            assert!(seqs.contains(&s.increments()), "{s}");
        }
    }

    #[test]
    fn interval_inside_one_cell() {
        let iv = GammaInterval::parse("2.2436090613", "2.2436090614").unwrap();
        let cells = enumerate_cells(&iv, 1000);
        assert_eq!(cells.len(), 1);
        assert_eq!(
            cells[0].sequence.increments(),
            gamma_sequence(&"2.2436090613".parse().unwrap(), 1000).increments()
        );
    }

    #[test]
    fn coincident_boundaries_collapse() {
        // gamma = 3 is a root for S_2 = 4, S_3 = 13 and S_4 = 40 at once.
        let iv = GammaInterval::parse("2.99", "3.01").unwrap();
        let cells = enumerate_cells(&iv, 100);
        assert_eq!(cells.len(), 2);
        assert_eq!(cells[0].sequence.increments(), &[1, 4, 13, 40]);
        assert_eq!(cells[1].sequence.increments(), &[1, 5, 14, 41]);
        assert_eq!(cells[0].label.as_ref().unwrap().k(), 2);
    }

    #[test]
    fn unbounded_interval_has_unlabeled_tail() {
        let cells = enumerate_cells(&GammaInterval::everything(), 10);
        let last = cells.last().unwrap();
        assert!(last.label.is_none());
        assert_eq!(last.sequence.increments(), &[1]);
        // Just above 1 every S_k exceeds k.
        assert_eq!(cells[0].sequence.increments(), &[1, 3, 4, 5, 6, 7, 8, 9, 10]);
        assert_eq!(cells[0].label.as_ref().unwrap().exact_value(), None);
    }
}
