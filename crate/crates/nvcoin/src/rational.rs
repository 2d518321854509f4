//! Exact scalar types: arbitrary-precision integers and reduced rationals.
//!
//! Rationals print as `p/q`, or just `p` when the denominator is 1, and are
//! parsed back from the same form.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Int = BigInt;
pub type Rat = BigRational;

pub fn int(v: i64) -> Int {
    Int::from(v)
}

pub fn rat(num: i64, den: i64) -> Rat {
    assert!(den != 0, "zero denominator");
    Rat::new(Int::from(num), Int::from(den))
}

pub fn rat_int(v: i64) -> Rat {
    Rat::from_integer(Int::from(v))
}

pub fn rat_of(v: &Int) -> Rat {
    Rat::from_integer(v.clone())
}

/// The integer value of `r`, if its reduced denominator is 1.
pub fn rat_to_int(r: &Rat) -> Option<Int> {
    if r.denom().is_one() {
        Some(r.numer().clone())
    } else {
        None
    }
}

pub fn is_integer(r: &Rat) -> bool {
    r.denom().is_one()
}

/// Floor of an exact integer quotient, rounding towards negative infinity.
pub fn div_floor(a: &Int, b: &Int) -> Int {
    num_integer::Integer::div_floor(a, b)
}

pub fn format_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: Int = num
        .parse()
        .map_err(|_| Error::Parse(format!("invalid rational {s:?}")))?;
    let d: Int = den
        .parse()
        .map_err(|_| Error::Parse(format!("invalid rational {s:?}")))?;
    if d.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(Rat::new(n, d))
}

/// Sign of a rational as -1, 0 or 1.
pub fn sign(r: &Rat) -> i32 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}
