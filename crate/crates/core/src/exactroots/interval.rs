use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use super::boundary::{ceil_sum_at, ceil_sum_rational, compare_boundaries, truncate_decimal, BoundaryGamma, DISPLAY_DIGITS};
use crate::error::{Error, Result};
use crate::gapseq::parse_exact_rational;

/// An interval endpoint: an exact rational, a boundary root, or `+inf`
/// (upper endpoints only).
#[derive(Clone, Debug)]
pub enum Endpoint {
    Rational(BigRational),
    Boundary(BoundaryGamma),
    Infinity,
}

impl Endpoint {
    pub fn one() -> Self {
        Endpoint::Rational(BigRational::one())
    }

    /// `ceil(S_j(x))` at the endpoint and whether `S_j(x)` is an integer;
    /// `None` at infinity.
    pub(crate) fn ceil_sum(&self, j: u32) -> Option<(BigInt, bool)> {
        match self {
            Endpoint::Rational(q) => Some(ceil_sum_rational(j, q)),
            Endpoint::Boundary(b) => Some(ceil_sum_at(b, j)),
            Endpoint::Infinity => None,
        }
    }

    pub fn as_boundary(&self) -> Option<&BoundaryGamma> {
        match self {
            Endpoint::Boundary(b) => Some(b),
            _ => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        match self {
            Endpoint::Rational(q) => q.to_f64().unwrap_or(f64::NAN),
            Endpoint::Boundary(b) => b.to_f64(),
            Endpoint::Infinity => f64::INFINITY,
        }
    }
}

/// Exact order of two endpoints.
pub fn compare_endpoints(a: &Endpoint, b: &Endpoint) -> Ordering {
    use Endpoint::*;
    match (a, b) {
        (Infinity, Infinity) => Ordering::Equal,
        (Infinity, _) => Ordering::Greater,
        (_, Infinity) => Ordering::Less,
        (Rational(x), Rational(y)) => x.cmp(y),
        (Boundary(x), Rational(y)) => x.cmp_rational(y),
        (Rational(x), Boundary(y)) => y.cmp_rational(x).reverse(),
        (Boundary(x), Boundary(y)) => compare_boundaries(x, y),
    }
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Endpoint::Rational(q) => f.write_str(&truncate_decimal(q, DISPLAY_DIGITS)),
            Endpoint::Boundary(b) => b.fmt(f),
            Endpoint::Infinity => f.write_str("inf"),
        }
    }
}

/// Half-open interval `(lo, hi]` of gamma values with `1 <= lo < hi`.
#[derive(Clone, Debug)]
pub struct GammaInterval {
    lo: Endpoint,
    hi: Endpoint,
}

impl GammaInterval {
    pub fn new(lo: Endpoint, hi: Endpoint) -> Result<Self> {
        if matches!(lo, Endpoint::Infinity) {
            return Err(Error::EmptyInterval);
        }
        if let Endpoint::Rational(q) = &lo {
            if q < &BigRational::one() {
                return Err(Error::GammaDomain(q.to_string()));
            }
        }
        if compare_endpoints(&lo, &hi) != Ordering::Less {
            return Err(Error::EmptyInterval);
        }
        Ok(GammaInterval { lo, hi })
    }

    /// `(lo, hi]` from decimal or `p/q` literals.
    pub fn parse(lo: &str, hi: &str) -> Result<Self> {
        let parse = |s: &str| {
            parse_exact_rational(s)
                .map(Endpoint::Rational)
                .ok_or_else(|| Error::GammaParse(s.to_string()))
        };
        Self::new(parse(lo)?, parse(hi)?)
    }

    /// `(1, inf)`.
    pub fn everything() -> Self {
        GammaInterval { lo: Endpoint::one(), hi: Endpoint::Infinity }
    }

    pub fn lo(&self) -> &Endpoint {
        &self.lo
    }

    pub fn hi(&self) -> &Endpoint {
        &self.hi
    }

    pub fn contains_rational(&self, q: &BigRational) -> bool {
        let x = Endpoint::Rational(q.clone());
        self.contains(&x)
    }

    pub fn contains_boundary(&self, b: &BoundaryGamma) -> bool {
        let x = Endpoint::Boundary(b.clone());
        self.contains(&x)
    }

    pub fn contains(&self, x: &Endpoint) -> bool {
        compare_endpoints(&self.lo, x) == Ordering::Less
            && compare_endpoints(x, &self.hi) != Ordering::Greater
    }

    /// `self ⊆ other`.
    pub fn is_subset_of(&self, other: &GammaInterval) -> bool {
        compare_endpoints(&other.lo, &self.lo) != Ordering::Greater
            && compare_endpoints(&self.hi, &other.hi) != Ordering::Greater
    }

    pub fn intersect(&self, other: &GammaInterval) -> Result<GammaInterval> {
        let lo = if compare_endpoints(&self.lo, &other.lo) == Ordering::Less {
            other.lo.clone()
        } else {
            self.lo.clone()
        };
        let hi = if compare_endpoints(&self.hi, &other.hi) == Ordering::Greater {
            other.hi.clone()
        } else {
            self.hi.clone()
        };
        GammaInterval::new(lo, hi)
    }
}

impl fmt::Display for GammaInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}]", self.lo, self.hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn boundary(k: u32, h: u64) -> Endpoint {
        Endpoint::Boundary(BoundaryGamma::new(k, h).unwrap())
    }

    #[test]
    fn construction_rules() {
        assert!(GammaInterval::parse("2.26", "2.24").is_err());
        assert!(GammaInterval::parse("2.24", "2.24").is_err());
        assert!(GammaInterval::parse("0.5", "2").is_err());
        assert!(GammaInterval::parse("2.24", "2.26").is_ok());
        assert!(GammaInterval::new(Endpoint::one(), Endpoint::Infinity).is_ok());
    }

    #[test]
    fn half_open_membership() {
        // (2, 3] as boundaries of S_2.
        let iv = GammaInterval::new(boundary(2, 3), boundary(2, 4)).unwrap();
        assert!(!iv.contains_rational(&BigRational::from_integer(2.into())));
        assert!(iv.contains_rational(&BigRational::from_integer(3.into())));
        assert!(iv.contains_rational(&BigRational::new(5.into(), 2.into())));
        assert!(iv.contains_boundary(&BoundaryGamma::new(3, 13).unwrap()));
        assert!(!iv.contains_boundary(&BoundaryGamma::new(3, 14).unwrap()));
    }

    #[test]
    fn intersections() {
        let a = GammaInterval::parse("2", "3").unwrap();
        let b = GammaInterval::parse("2.5", "4").unwrap();
        let c = a.intersect(&b).unwrap();
        assert_eq!(c.to_string(), "(2.50000000000000000, 3.00000000000000000]");
        assert!(c.is_subset_of(&a) && c.is_subset_of(&b));
        assert!(!a.is_subset_of(&c));
        let d = GammaInterval::parse("3", "4").unwrap();
        assert!(a.intersect(&d).is_err());
    }
}
