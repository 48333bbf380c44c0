//! Polynomial gcd over the rationals, used to decide whether two boundary
//! roots coincide.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Coefficients in ascending order; no trailing zeros.
type Poly = Vec<BigRational>;

/// `S_k(x) - h`.
pub(crate) fn defining_poly(k: u32, h: u64) -> Poly {
    let mut p = vec![BigRational::one(); k as usize];
    p[0] = BigRational::from_integer(BigInt::one() - BigInt::from(h));
    p
}

fn trim(p: &mut Poly) {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
}

fn make_monic(p: &mut Poly) {
    if let Some(lead) = p.last().cloned() {
        for c in p.iter_mut() {
            *c /= &lead;
        }
    }
}

fn rem(a: &Poly, b: &Poly) -> Poly {
    let mut r = a.clone();
    let db = b.len() - 1;
    let lead = b.last().expect("nonzero divisor").clone();
    while r.len() > db {
        let shift = r.len() - 1 - db;
        let factor = r.last().unwrap() / &lead;
        for (i, c) in b.iter().enumerate() {
            r[i + shift] -= &factor * c;
        }
        r.pop();
        trim(&mut r);
    }
    r
}

/// Monic gcd.
pub(crate) fn gcd(a: &Poly, b: &Poly) -> Poly {
    let (mut x, mut y) = (a.clone(), b.clone());
    trim(&mut x);
    trim(&mut y);
    while !y.is_empty() {
        let r = rem(&x, &y);
        x = y;
        y = r;
        make_monic(&mut y);
    }
    make_monic(&mut x);
    x
}

pub(crate) fn sign_at(p: &Poly, x: &BigRational) -> Ordering {
    let mut acc = BigRational::zero();
    for c in p.iter().rev() {
        acc = acc * x + c;
    }
    if acc.is_zero() {
        Ordering::Equal
    } else if acc.is_positive() {
        Ordering::Greater
    } else {
        Ordering::Less
    }
}
