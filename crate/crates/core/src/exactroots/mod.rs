//! Exact arithmetic on the boundary set: the gamma values where some partial
//! sum `S_k(g) = 1 + g + ... + g^(k-1)` is an integer, i.e. where a
//! gamma-sequence changes.
//!
//! Every decision (ordering, ceilings, equality) is made with integer or
//! rational sign tests. Floating point is used only to seed enclosures, and
//! every seed is verified exactly before use.

mod boundary;
mod cells;
mod dyadic;
mod interval;
mod poly;

pub use boundary::{boundary_gamma, compare_boundaries, truncate_decimal, BoundaryGamma, Decimal, DISPLAY_DIGITS};
pub use cells::{
    ciura_increment_ranges, enumerate_cells, gamma_range_for_prefix, increment_range,
    sequence_at_boundary, CiuraRanges, SequenceCell,
};
pub use interval::{compare_endpoints, Endpoint, GammaInterval};
