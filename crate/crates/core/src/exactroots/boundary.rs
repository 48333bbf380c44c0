use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::dyadic::{self, cmp_dyadic, cmp_sum, Enclosure};
use super::poly;
use crate::error::{Error, Result};

/// Bits of enclosure precision after which an overlap triggers the exact
/// gcd equality test.
const EQUALITY_TEST_BITS: u32 = 96;

/// The root above 1 of `S_k(x) = h`, with a lazily refined rational
/// enclosure `(lo, hi]`.
///
/// Refinement goes through a `RefCell`: a value can be moved between threads
/// but not shared by them.
#[derive(Clone)]
pub struct BoundaryGamma {
    k: u32,
    h: u64,
    enclosure: RefCell<Enclosure>,
}

impl BoundaryGamma {
    pub fn new(k: u32, h: u64) -> Result<Self> {
        if k < 2 || h <= k as u64 {
            return Err(Error::BoundaryDomain { k, h });
        }
        Ok(BoundaryGamma { k, h, enclosure: RefCell::new(Enclosure::isolate(k, h)) })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn h(&self) -> u64 {
        self.h
    }

    /// Current `(lo, hi]` enclosure.
    pub fn enclosure(&self) -> (BigRational, BigRational) {
        let e = self.enclosure.borrow();
        (e.lo_rational(), e.hi_rational())
    }

    pub fn width(&self) -> BigRational {
        self.enclosure.borrow().width()
    }

    /// The root as a rational, when it is one (necessarily an integer).
    pub fn exact_value(&self) -> Option<BigRational> {
        let e = self.enclosure.borrow();
        e.exact.then(|| e.hi_rational())
    }

    /// Shrinks the enclosure until its width is at most `width`.
    pub fn refine(&self, width: &BigRational) {
        assert!(width > &BigRational::zero(), "refinement width must be positive");
        let hb = BigInt::from(self.h);
        let mut e = self.enclosure.borrow_mut();
        while &e.width() > width {
            e.bisect(self.k, &hb);
        }
    }

    pub(crate) fn refine_bits(&self, bits: u32) {
        let hb = BigInt::from(self.h);
        let mut e = self.enclosure.borrow_mut();
        while !e.is_narrower_than_bits(bits) {
            e.bisect(self.k, &hb);
        }
    }

    pub(crate) fn bisect(&self) {
        self.enclosure.borrow_mut().bisect(self.k, &BigInt::from(self.h));
    }

    pub(crate) fn with_enclosure<R>(&self, f: impl FnOnce(&Enclosure) -> R) -> R {
        f(&self.enclosure.borrow())
    }

    pub fn to_f64(&self) -> f64 {
        self.refine_bits(60);
        self.enclosure.borrow().hi_rational().to_f64().unwrap_or(f64::NAN)
    }

    /// Truncated decimal expansion with `sig` significant digits.
    pub fn decimal(&self, sig: usize) -> Decimal {
        if let Some(q) = self.exact_value() {
            return Decimal { digits: truncate_decimal(&q, sig), pinned: true };
        }
        // Irrational roots never sit on a decimal grid point, so this
        // terminates in practice; the cap guards pathological closeness.
        let mut bits = (sig as f64 * 3.33) as u32 + 8;
        loop {
            self.refine_bits(bits);
            let (lo, hi) = self.enclosure();
            let a = truncate_decimal(&lo, sig);
            let b = truncate_decimal(&hi, sig);
            if a == b {
                return Decimal { digits: a, pinned: true };
            }
            if self.exact_value().is_some() || bits > 2048 {
                let pinned = self.exact_value().is_some();
                let digits = if pinned { b } else { a };
                return Decimal { digits, pinned };
            }
            bits += 32;
        }
    }

    /// Compares the root with a rational, without refinement.
    pub fn cmp_rational(&self, q: &BigRational) -> Ordering {
        if q <= &BigRational::one() {
            return Ordering::Greater;
        }
        let s = dyadic::sum_rational(self.k, q);
        // S_k increasing on (1, inf): S_k(q) > h  <=>  root < q.
        BigRational::from_integer(BigInt::from(self.h)).cmp(&s)
    }

    /// Exact decision whether both boundaries are the same algebraic number.
    fn same_root(&self, other: &BoundaryGamma) -> bool {
        if (self.k, self.h) == (other.k, other.h) {
            return true;
        }
        let g = poly::gcd(
            &poly::defining_poly(self.k, self.h),
            &poly::defining_poly(other.k, other.h),
        );
        if g.len() < 2 {
            return false;
        }
        // g divides S_k - h, whose only root in (lo, hi] is simple, so a root
        // of g there shows up as a sign change or a zero at hi.
        let (lo, hi) = self.enclosure();
        let at_hi = poly::sign_at(&g, &hi);
        at_hi == Ordering::Equal || poly::sign_at(&g, &lo) != at_hi
    }
}

/// Exact order of two boundary values.
pub fn compare_boundaries(a: &BoundaryGamma, b: &BoundaryGamma) -> Ordering {
    if std::ptr::eq(a, b) || (a.k, a.h) == (b.k, b.h) {
        return Ordering::Equal;
    }
    if let Some(q) = a.exact_value() {
        return b.cmp_rational(&q).reverse();
    }
    if let Some(q) = b.exact_value() {
        return a.cmp_rational(&q);
    }
    let mut equality_tested = false;
    loop {
        let (a_wider, both_fine) = {
            let ea = a.enclosure.borrow();
            let eb = b.enclosure.borrow();
            if cmp_dyadic(&ea.hi, ea.exp, &eb.lo, eb.exp) != Ordering::Greater {
                return Ordering::Less;
            }
            if cmp_dyadic(&eb.hi, eb.exp, &ea.lo, ea.exp) != Ordering::Greater {
                return Ordering::Greater;
            }
            let wa = ea.width();
            let wb = eb.width();
            (
                wa >= wb,
                ea.is_narrower_than_bits(EQUALITY_TEST_BITS)
                    && eb.is_narrower_than_bits(EQUALITY_TEST_BITS),
            )
        };
        if both_fine && !equality_tested {
            if a.same_root(b) {
                return Ordering::Equal;
            }
            equality_tested = true;
        }
        if a_wider {
            a.bisect();
        } else {
            b.bisect();
        }
        // A refinement can land exactly on an integer root.
        if let Some(q) = a.exact_value() {
            return b.cmp_rational(&q).reverse();
        }
        if let Some(q) = b.exact_value() {
            return a.cmp_rational(&q);
        }
    }
}

impl PartialEq for BoundaryGamma {
    fn eq(&self, other: &Self) -> bool {
        compare_boundaries(self, other) == Ordering::Equal
    }
}

impl Eq for BoundaryGamma {}

impl PartialOrd for BoundaryGamma {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for BoundaryGamma {
    fn cmp(&self, other: &Self) -> Ordering {
        compare_boundaries(self, other)
    }
}

impl fmt::Debug for BoundaryGamma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e = self.enclosure.borrow();
        f.debug_struct("BoundaryGamma")
            .field("k", &self.k)
            .field("h", &self.h)
            .field("approx", &e.hi_rational().to_f64())
            .field("exp", &e.exp)
            .field("exact", &e.exact)
            .finish()
    }
}

impl fmt::Display for BoundaryGamma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.decimal(DISPLAY_DIGITS).fmt(f)
    }
}

/// Significant digits used whenever a boundary is printed.
pub const DISPLAY_DIGITS: usize = 18;

/// A truncated decimal expansion. `pinned` is false when the enclosure could
/// not settle every printed digit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decimal {
    pub digits: String,
    pub pinned: bool,
}

impl Decimal {
    /// True when a shorter printed expansion equals these digits either
    /// truncated or rounded to the printed length.
    pub fn agrees_with(&self, printed: &str) -> bool {
        let printed = printed.trim_end_matches(['.', '\u{2026}']);
        let n = printed.len();
        if n > self.digits.len() {
            return false;
        }
        let head = &self.digits[..n];
        if head == printed {
            return true;
        }
        let next = self.digits[n..].chars().find(|c| c.is_ascii_digit());
        if next.is_some_and(|c| c >= '5') {
            return round_up(head) == printed;
        }
        false
    }
}

/// Adds one unit in the last place of a decimal digit string.
fn round_up(digits: &str) -> String {
    let mut out: Vec<u8> = digits.bytes().collect();
    for i in (0..out.len()).rev() {
        match out[i] {
            b'.' => continue,
            b'9' => out[i] = b'0',
            d => {
                out[i] = d + 1;
                return String::from_utf8(out).expect("ascii");
            }
        }
    }
    let mut s = String::from("1");
    s.push_str(std::str::from_utf8(&out).expect("ascii"));
    s
}

impl fmt::Display for Decimal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.digits)?;
        if !self.pinned {
            f.write_str("?")?;
        }
        Ok(())
    }
}

/// Truncates a nonnegative rational to `sig` significant digits (counting
/// integer digits first; at least the integer part is kept).
pub fn truncate_decimal(q: &BigRational, sig: usize) -> String {
    let int_part = q.numer().div_floor(q.denom());
    let int_digits = if int_part.is_zero() { 0 } else { int_part.to_string().len() };
    let frac = sig.saturating_sub(int_digits);
    let scale = num_traits::pow(BigInt::from(10u32), frac);
    let scaled = (q.numer() * &scale).div_floor(q.denom());
    if frac == 0 {
        return scaled.to_string();
    }
    let s = format!("{scaled:0>width$}", width = frac + 1);
    let (ip, fp) = s.split_at(s.len() - frac);
    format!("{ip}.{fp}")
}

/// `ceil(S_j(g))` at the root `g` of `b`, and whether `S_j(g)` is an integer.
pub(crate) fn ceil_sum_at(b: &BoundaryGamma, j: u32) -> (BigInt, bool) {
    if j == 1 {
        return (BigInt::one(), true);
    }
    if j == b.k {
        return (BigInt::from(b.h), true);
    }
    if let Some(q) = b.exact_value() {
        return ceil_sum_rational(j, &q);
    }
    let mut floor_bound = BigInt::zero();
    loop {
        let (c, hi_at_or_below_c, hi_is_exact) = b.with_enclosure(|e| {
            let c = dyadic::sum_floor_plus_one(j, &e.lo, e.exp).max(floor_bound.clone());
            let ord = cmp_sum(j, &c, &e.hi, e.exp);
            (c, ord != Ordering::Greater, e.exact && ord == Ordering::Equal)
        });
        if hi_at_or_below_c {
            // S_j(g) in (c - 1, c]; it equals c only if g is hi itself.
            return (c, hi_is_exact);
        }
        let candidate = BoundaryGamma::new(j, c.to_u64().expect("increment fits in u64"))
            .expect("c exceeds S_j(1) = j");
        match compare_boundaries(b, &candidate) {
            Ordering::Equal => return (c, true),
            Ordering::Less => return (c, false),
            Ordering::Greater => floor_bound = c + 1,
        }
    }
}

/// `ceil(S_j(q))` and integrality, for rational `q`.
pub(crate) fn ceil_sum_rational(j: u32, q: &BigRational) -> (BigInt, bool) {
    let s = dyadic::sum_rational(j, q);
    (s.ceil().to_integer(), s.is_integer())
}

/// The exact boundary of `S_k(x) = h`, refined to width at most `width`.
pub fn boundary_gamma(k: u32, h: u64, width: &BigRational) -> Result<BoundaryGamma> {
    let b = BoundaryGamma::new(k, h)?;
    b.refine(width);
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(k: u32, h: u64) -> BoundaryGamma {
        BoundaryGamma::new(k, h).unwrap()
    }

    fn tiny() -> BigRational {
        BigRational::new(1.into(), num_traits::pow(BigInt::from(10), 16))
    }

    #[test]
    fn domain_errors() {
        assert!(BoundaryGamma::new(2, 2).is_err());
        assert!(BoundaryGamma::new(3, 3).is_err());
        assert!(BoundaryGamma::new(3, 2).is_err());
        assert!(BoundaryGamma::new(1, 5).is_err());
        assert!(BoundaryGamma::new(3, 4).is_ok());
    }

    #[test]
    fn small_examples() {
        let three = boundary_gamma(2, 4, &tiny()).unwrap();
        assert_eq!(three.exact_value(), Some(BigRational::from_integer(3.into())));
        assert_eq!(three.decimal(18).digits, "3.00000000000000000");
        // S_3 = 9 and S_3 = 10 bound the gammas whose third increment is 10.
        let r = boundary_gamma(3, 9, &tiny()).unwrap();
        assert!(r.decimal(18).agrees_with("2.372281323269014"));
        let r = boundary_gamma(3, 10, &tiny()).unwrap();
        assert!(r.decimal(18).agrees_with("2.541381265149110"));
        let r = boundary_gamma(13, 28827, &tiny()).unwrap();
        assert_eq!(r.decimal(18).digits, "2.24000416747832884");
        assert!(r.decimal(18).agrees_with("2.240004167478329"));
        assert!(r.width() <= tiny());
    }

    #[test]
    fn comparisons() {
        assert_eq!(compare_boundaries(&b(13, 28828), &b(12, 12870)), Ordering::Less);
        assert_eq!(compare_boundaries(&b(2, 4), &b(2, 4)), Ordering::Equal);
        assert_eq!(compare_boundaries(&b(2, 4), &b(3, 10)), Ordering::Greater);
        // All equal to 3.
        assert_eq!(compare_boundaries(&b(3, 13), &b(4, 40)), Ordering::Equal);
        assert_eq!(compare_boundaries(&b(4, 40), &b(2, 4)), Ordering::Equal);
        assert_eq!(compare_boundaries(&b(5, 121), &b(3, 13)), Ordering::Equal);
    }

    #[test]
    fn coincident_and_near_boundaries() {
        // x^2 + x - 6 = (x + 3)(x - 2)
        assert_eq!(compare_boundaries(&b(3, 7), &b(2, 3)), Ordering::Equal);
        // Adjacent h differ by far less than the seed width at large k.
        assert_eq!(compare_boundaries(&b(21, 42281871), &b(21, 42281870)), Ordering::Greater);
        assert_eq!(compare_boundaries(&b(13, 28827), &b(13, 28828)), Ordering::Less);
    }

    #[test]
    fn enclosure_invariant_under_refinement() {
        let x = b(17, 743735);
        let hb = BigInt::from(743735u64);
        for bits in [40u32, 60, 80, 120] {
            x.refine_bits(bits);
            x.with_enclosure(|e| {
                assert_eq!(cmp_sum(17, &hb, &e.lo, e.exp), Ordering::Less);
                assert_ne!(cmp_sum(17, &hb, &e.hi, e.exp), Ordering::Less);
                assert!(e.lo_rational() >= BigRational::one());
            });
        }
    }

    #[test]
    fn printed_digit_agreement() {
        let d = Decimal { digits: "2.24000416747832884".into(), pinned: true };
        assert!(d.agrees_with("2.240004167478328"));
        assert!(d.agrees_with("2.240004167478329"));
        assert!(d.agrees_with("2.240004167478329..."));
        assert!(!d.agrees_with("2.240004167478327"));
        assert!(!d.agrees_with("2.240004167478330"));
        let d = Decimal { digits: "2.99999999".into(), pinned: true };
        assert!(d.agrees_with("3.000"));
        assert_eq!(round_up("9.99"), "10.00");
    }

    #[test]
    fn truncation_of_decimals() {
        let q = BigRational::new(22.into(), 7.into());
        assert_eq!(truncate_decimal(&q, 5), "3.1428");
        let q = BigRational::from_integer(19.into());
        assert_eq!(truncate_decimal(&q, 4), "19.00");
        assert_eq!(truncate_decimal(&BigRational::new(1.into(), 3.into()), 3), "0.333");
    }

    #[test]
    fn ceil_sums_at_boundaries() {
        let x = b(13, 28827);
        let terms: Vec<u64> = (1..=13).map(|j| ceil_sum_at(&x, j).0.to_u64().unwrap()).collect();
        assert_eq!(terms, [1, 4, 9, 20, 45, 102, 228, 511, 1145, 2565, 5745, 12869, 28827]);
        let three = b(2, 4);
        assert_eq!(ceil_sum_at(&three, 4), (BigInt::from(40), true));
        assert_eq!(ceil_sum_at(&b(3, 13), 2), (BigInt::from(4), true));
    }
}
