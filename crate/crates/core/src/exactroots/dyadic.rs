//! Evaluation of `S_k(x) = 1 + x + ... + x^(k-1)` at dyadic points
//! `x = m / 2^e` using integer arithmetic only.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One};

/// Numerator `N` with `S_k(m / 2^e) = N / 2^(e (k-1))`.
///
/// Horner: `P_0 = 1`, `P_(j+1) = m P_j + 2^(e (j+1))`.
pub(crate) fn sum_numer(k: u32, m: &BigInt, e: u32) -> BigInt {
    let mut acc = BigInt::one();
    for j in 1..k {
        acc = acc * m + (BigInt::one() << (e as usize * j as usize));
    }
    acc
}

/// Sign of `S_k(m / 2^e) - h`.
pub(crate) fn cmp_sum(k: u32, h: &BigInt, m: &BigInt, e: u32) -> Ordering {
    let shift = e as usize * (k as usize - 1);
    sum_numer(k, m, e).cmp(&(h << shift))
}

/// `S_k(q)` for an arbitrary rational `q`.
pub(crate) fn sum_rational(k: u32, q: &BigRational) -> BigRational {
    let mut acc = BigRational::one();
    for _ in 1..k {
        acc = acc * q + BigRational::one();
    }
    acc
}

/// Smallest integer strictly greater than `S_k(m / 2^e)`, for `m >= 0`.
pub(crate) fn sum_floor_plus_one(k: u32, m: &BigInt, e: u32) -> BigInt {
    let shift = e as usize * (k as usize - 1);
    (sum_numer(k, m, e) >> shift) + 1
}

/// Float estimate of the root above 1 of `S_k(x) = h`, by Newton's method
/// started at the upper bound `h^(1/(k-1))`. Only used to seed an exactly
/// verified enclosure.
pub(crate) fn approx_root(k: u32, h: f64) -> f64 {
    if k == 2 {
        return h - 1.0;
    }
    let mut x = h.powf(1.0 / (k as f64 - 1.0));
    for _ in 0..200 {
        let (mut s, mut ds) = (1.0f64, 0.0f64);
        for _ in 1..k {
            ds = ds * x + s;
            s = s * x + 1.0;
        }
        let step = (s - h) / ds;
        let next = x - step;
        if !next.is_finite() || next <= 1.0 {
            break;
        }
        let done = step.abs() <= x * 1e-17;
        x = next;
        if done {
            break;
        }
    }
    x
}

/// `(lo, hi]` with `lo = lo_num / 2^exp` and `hi = hi_num / 2^exp`.
/// Holds `S_k(lo) < h <= S_k(hi)`; `exact` marks `S_k(hi) = h`.
#[derive(Clone, Debug)]
pub(crate) struct Enclosure {
    pub lo: BigInt,
    pub hi: BigInt,
    pub exp: u32,
    pub exact: bool,
}

const SEED_EXP: u32 = 64;

impl Enclosure {
    /// Caller guarantees `h > k >= 2`.
    pub fn isolate(k: u32, h: u64) -> Self {
        let hb = BigInt::from(h);
        let approx = approx_root(k, h as f64);

        // Rational roots of the monic integer polynomial S_k(x) - h are integers.
        for c in [approx.floor(), approx.ceil()] {
            if c >= 2.0 {
                let c = BigInt::from_f64(c).expect("finite");
                if cmp_sum(k, &hb, &c, 0) == Ordering::Equal {
                    return Enclosure { lo: &c - 1, hi: c, exp: 0, exact: true };
                }
            }
        }

        let one = BigInt::one() << SEED_EXP as usize;
        if let Some(center) = BigInt::from_f64((approx * 2f64.powi(SEED_EXP as i32)).floor()) {
            let mut delta = BigInt::from_f64((approx * 2f64.powi(16)).ceil())
                .unwrap_or_else(BigInt::one)
                .max(BigInt::one());
            for _ in 0..4 {
                let lo = &center - &delta;
                let hi = &center + &delta;
                if lo >= one && cmp_sum(k, &hb, &lo, SEED_EXP) == Ordering::Less {
                    match cmp_sum(k, &hb, &hi, SEED_EXP) {
                        Ordering::Less => {}
                        ord => {
                            return Enclosure {
                                lo,
                                hi,
                                exp: SEED_EXP,
                                exact: ord == Ordering::Equal,
                            }
                        }
                    }
                }
                delta <<= 8;
            }
        }

        // S_k(1) = k < h and S_k(h - 1) >= 1 + (h - 1) = h.
        let hi = BigInt::from(h - 1);
        let exact = cmp_sum(k, &hb, &hi, 0) == Ordering::Equal;
        Enclosure { lo: BigInt::one(), hi, exp: 0, exact }
    }

    /// Halves the width, preserving the bracketing invariant.
    pub fn bisect(&mut self, k: u32, h: &BigInt) {
        if &self.hi - &self.lo == BigInt::one() {
            self.exp += 1;
            self.lo <<= 1;
            self.hi <<= 1;
        }
        let mid: BigInt = (&self.lo + &self.hi) >> 1;
        match cmp_sum(k, h, &mid, self.exp) {
            Ordering::Less => self.lo = mid,
            Ordering::Equal => {
                self.hi = mid;
                self.exact = true;
            }
            Ordering::Greater => self.hi = mid,
        }
    }

    /// Width is at most `2^-bits`.
    pub fn is_narrower_than_bits(&self, bits: u32) -> bool {
        let diff = &self.hi - &self.lo;
        if self.exp >= bits {
            let allowed = BigInt::one() << (self.exp - bits) as usize;
            diff <= allowed
        } else {
            false
        }
    }

    pub fn lo_rational(&self) -> BigRational {
        BigRational::new(self.lo.clone(), BigInt::one() << self.exp as usize)
    }

    pub fn hi_rational(&self) -> BigRational {
        BigRational::new(self.hi.clone(), BigInt::one() << self.exp as usize)
    }

    pub fn width(&self) -> BigRational {
        BigRational::new(&self.hi - &self.lo, BigInt::one() << self.exp as usize)
    }
}

/// Compares `a / 2^ea` with `b / 2^eb`.
pub(crate) fn cmp_dyadic(a: &BigInt, ea: u32, b: &BigInt, eb: u32) -> Ordering {
    match ea.cmp(&eb) {
        Ordering::Equal => a.cmp(b),
        Ordering::Less => (a << (eb - ea) as usize).cmp(b),
        Ordering::Greater => a.cmp(&(b << (ea - eb) as usize)),
    }
}
