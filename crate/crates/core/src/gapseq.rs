//! Gap sequence generators.
//!
//! A gamma-sequence has increments `h_k = ceil(S_k(g))` where
//! `S_k(g) = 1 + g + ... + g^(k-1) = (g^k - 1) / (g - 1)`. Every generator
//! here works in exact integer or rational arithmetic so that the ceiling is
//! never perturbed by rounding.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// The Ciura increments, in increasing order.
pub const CIURA: [u64; 8] = [1, 4, 10, 23, 57, 132, 301, 701];

/// A gamma parameter: an exact rational strictly greater than one.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Gamma(BigRational);

impl Gamma {
    pub fn new(value: BigRational) -> Result<Self> {
        if value <= BigRational::one() {
            return Err(Error::GammaDomain(value.to_string()));
        }
        Ok(Gamma(value))
    }

    pub fn from_ratio(numer: i64, denom: i64) -> Result<Self> {
        if denom == 0 {
            return Err(Error::GammaParse(format!("{numer}/{denom}")));
        }
        Self::new(BigRational::new(numer.into(), denom.into()))
    }

    /// The Tokuda parameter 9/4.
    pub fn tokuda() -> Self {
        Gamma(BigRational::new(9.into(), 4.into()))
    }

    pub fn value(&self) -> &BigRational {
        &self.0
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }
}

impl FromStr for Gamma {
    type Err = Error;

    /// Accepts `123`, `2.243609061420001` (any number of digits, parsed
    /// exactly), and `9/4`.
    fn from_str(s: &str) -> Result<Self> {
        let value = parse_exact_rational(s).ok_or_else(|| Error::GammaParse(s.to_string()))?;
        Gamma::new(value)
    }
}

impl fmt::Display for Gamma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_exact_rational(&self.0))
    }
}

/// Exact text form of `q`: a terminating decimal when one exists, else
/// `p/q`. Inverse of [`parse_exact_rational`].
pub fn format_exact_rational(q: &BigRational) -> String {
    match terminating_decimal(q) {
        Some(s) => s,
        None => format!("{}/{}", q.numer(), q.denom()),
    }
}

/// Parses a decimal or `p/q` literal into an exact rational.
pub fn parse_exact_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).ok()?;
        let d = BigInt::from_str(d.trim()).ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().all(|b| b.is_ascii_digit()) || !frac_part.bytes().all(|b| b.is_ascii_digit())
    {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let mut numer = BigInt::from_str(if digits.is_empty() { "0" } else { &digits }).ok()?;
    if neg {
        numer = -numer;
    }
    let denom = num_traits::pow(BigInt::from(10u32), frac_part.len());
    Some(BigRational::new(numer, denom))
}

fn terminating_decimal(q: &BigRational) -> Option<String> {
    let mut d = q.denom().clone();
    let (mut twos, mut fives) = (0usize, 0usize);
    let two = BigInt::from(2u32);
    let five = BigInt::from(5u32);
    while d.is_multiple_of(&two) {
        d /= &two;
        twos += 1;
    }
    while d.is_multiple_of(&five) {
        d /= &five;
        fives += 1;
    }
    if !d.is_one() {
        return None;
    }
    let places = twos.max(fives);
    let scaled = q * BigRational::from_integer(num_traits::pow(BigInt::from(10u32), places));
    let n = scaled.to_integer();
    let sign = if n.is_negative() { "-" } else { "" };
    let digits = n.abs().to_string();
    if places == 0 {
        return Some(format!("{sign}{digits}"));
    }
    let padded = format!("{digits:0>width$}", width = places + 1);
    let (ip, fp) = padded.split_at(padded.len() - places);
    Some(format!("{sign}{ip}.{fp}"))
}

/// Where a gap sequence came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GapSource {
    Gamma(Gamma),
    /// Evaluated exactly at the root of `S_k(x) = h`.
    Boundary { k: u32, h: u64 },
    Tokuda,
    Ciura,
    CiuraExtended,
    /// A user-supplied list.
    Explicit,
}

impl fmt::Display for GapSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GapSource::Gamma(g) => write!(f, "gamma={g}"),
            GapSource::Boundary { k, h } => write!(f, "boundary({k},{h})"),
            GapSource::Tokuda => f.write_str("tokuda"),
            GapSource::Ciura => f.write_str("ciura"),
            GapSource::CiuraExtended => f.write_str("ciura-extended"),
            GapSource::Explicit => f.write_str("explicit"),
        }
    }
}

/// A Shellsort gap sequence in increasing order: nonempty, strictly
/// increasing, first element 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GapSequence {
    increments: Vec<u64>,
    source: GapSource,
}

impl GapSequence {
    pub fn new(increments: Vec<u64>, source: GapSource) -> Result<Self> {
        validate(&increments)?;
        Ok(GapSequence { increments, source })
    }

    /// An explicit user-supplied sequence, given in any order.
    pub fn explicit(mut increments: Vec<u64>) -> Result<Self> {
        increments.sort_unstable();
        Self::new(increments, GapSource::Explicit)
    }

    pub(crate) fn from_parts_unchecked(increments: Vec<u64>, source: GapSource) -> Self {
        debug_assert!(validate(&increments).is_ok());
        GapSequence { increments, source }
    }

    pub fn increments(&self) -> &[u64] {
        &self.increments
    }

    pub fn source(&self) -> &GapSource {
        &self.source
    }

    pub fn len(&self) -> usize {
        self.increments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.increments.is_empty()
    }

    pub fn largest(&self) -> u64 {
        *self.increments.last().expect("nonempty")
    }

    /// True when `prefix` is a leading run of this sequence.
    pub fn starts_with(&self, prefix: &GapSequence) -> bool {
        self.increments.starts_with(&prefix.increments)
    }

    /// Space separated increments, the format used in CSV output.
    pub fn joined(&self) -> String {
        let parts: Vec<String> = self.increments.iter().map(u64::to_string).collect();
        parts.join(" ")
    }
}

impl fmt::Display for GapSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.increments.iter().map(u64::to_string).collect();
        f.write_str(&parts.join(", "))
    }
}

fn validate(increments: &[u64]) -> Result<()> {
    match increments.first() {
        None => return Err(Error::InvalidSequence("empty".into())),
        Some(&1) => {}
        Some(&x) => return Err(Error::InvalidSequence(format!("first increment is {x}, not 1"))),
    }
    if let Some(w) = increments.windows(2).find(|w| w[0] >= w[1]) {
        return Err(Error::InvalidSequence(format!(
            "not strictly increasing at {} -> {}",
            w[0], w[1]
        )));
    }
    Ok(())
}

fn ceil_div(n: &BigInt, d: &BigInt) -> BigInt {
    n.div_ceil(d)
}

/// `(p^k - q^k, q^(k-1) (p - q))`, the numerator and denominator of
/// `S_k(p/q)`, iterated over k = 1, 2, ...
struct PartialSums {
    p: BigInt,
    q: BigInt,
    p_pow: BigInt,
    q_pow: BigInt,
    q_prev: BigInt,
}

impl PartialSums {
    fn new(gamma: &Gamma) -> Self {
        let p = gamma.0.numer().clone();
        let q = gamma.0.denom().clone();
        PartialSums {
            p_pow: p.clone(),
            q_pow: q.clone(),
            q_prev: BigInt::one(),
            p,
            q,
        }
    }
}

impl Iterator for PartialSums {
    /// `ceil(S_k)` for the next k.
    type Item = BigInt;

    fn next(&mut self) -> Option<BigInt> {
        let numer = &self.p_pow - &self.q_pow;
        let denom = &self.q_prev * (&self.p - &self.q);
        let out = ceil_div(&numer, &denom);
        self.p_pow *= &self.p;
        self.q_prev = self.q_pow.clone();
        self.q_pow *= &self.q;
        Some(out)
    }
}

/// `ceil((g^k - 1) / (g - 1))`, exactly.
pub fn gamma_increment(gamma: &Gamma, k: u32) -> Result<BigUint> {
    if k == 0 {
        return Err(Error::InvalidSequence("increment index starts at 1".into()));
    }
    let p = gamma.0.numer();
    let q = gamma.0.denom();
    let numer = num_traits::pow(p.clone(), k as usize) - num_traits::pow(q.clone(), k as usize);
    let denom = num_traits::pow(q.clone(), k as usize - 1) * (p - q);
    Ok(ceil_div(&numer, &denom)
        .to_biguint()
        .expect("partial sums are positive"))
}

/// All increments `h_k <= limit` of the gamma-sequence.
pub fn gamma_sequence(gamma: &Gamma, limit: u64) -> GapSequence {
    let limit = BigInt::from(limit.max(1));
    let increments = PartialSums::new(gamma)
        .take_while(|h| *h <= limit)
        .map(|h| h.to_u64().expect("bounded by limit"))
        .collect();
    GapSequence::from_parts_unchecked(increments, GapSource::Gamma(gamma.clone()))
}

/// Tokuda's sequence: the gamma-sequence at 9/4.
pub fn tokuda_sequence(limit: u64) -> GapSequence {
    let seq = gamma_sequence(&Gamma::tokuda(), limit);
    GapSequence::from_parts_unchecked(seq.increments, GapSource::Tokuda)
}

/// Tokuda's k-th increment written as `ceil((9 (9/4)^(k-1) - 4) / 5)`,
/// i.e. `ceil((9^k - 4^k) / (5 * 4^(k-1)))`.
pub fn tokuda_increment_closed_form(k: u32) -> BigUint {
    assert!(k >= 1);
    let nine = num_traits::pow(BigUint::from(9u32), k as usize);
    let four = num_traits::pow(BigUint::from(4u32), k as usize);
    let denom = BigUint::from(5u32) * num_traits::pow(BigUint::from(4u32), k as usize - 1);
    (nine - four).div_ceil(&denom)
}

/// Ciura's increments up to `limit`; when `extended`, continued with
/// `h_k = floor(9 h_(k-1) / 4)`.
pub fn ciura_sequence(limit: u64, extended: bool) -> GapSequence {
    let mut increments: Vec<u64> = CIURA.iter().copied().take_while(|&h| h <= limit).collect();
    if increments.is_empty() {
        increments.push(1);
    }
    if extended && increments.len() == CIURA.len() {
        let mut last = *increments.last().unwrap() as u128;
        loop {
            last = last * 9 / 4;
            if last > limit as u128 {
                break;
            }
            increments.push(last as u64);
        }
    }
    let source = if extended {
        GapSource::CiuraExtended
    } else {
        GapSource::Ciura
    };
    GapSequence::from_parts_unchecked(increments, source)
}

/// Drops increments above `n_elements / 2` (compared exactly, as `2h <= n`).
/// Increment 1 is always kept.
pub fn truncate_for_size(seq: &GapSequence, n_elements: u64) -> GapSequence {
    let n = n_elements as u128;
    let kept: Vec<u64> = seq
        .increments
        .iter()
        .copied()
        .enumerate()
        .filter(|&(i, h)| i == 0 || 2 * h as u128 <= n)
        .map(|(_, h)| h)
        .collect();
    GapSequence::from_parts_unchecked(kept, seq.source.clone())
}
