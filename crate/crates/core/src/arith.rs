//! Exact big-rational helpers for thresholds built from powers.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};

use crate::graph::Rational;

pub fn big(q: Rational) -> BigRational {
    BigRational::new(BigInt::from(*q.numer()), BigInt::from(*q.denom()))
}

pub fn big_int(k: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(k))
}

pub fn pow(q: Rational, e: usize) -> BigRational {
    num_traits::pow(big(q), e)
}

/// `⌈x⌉` clamped to `[0, usize::MAX]`.
pub fn ceil(x: &BigRational) -> usize {
    if x.is_negative() {
        return 0;
    }
    x.ceil().to_integer().to_usize().unwrap_or(usize::MAX)
}

/// `⌊x⌋` clamped to `[0, usize::MAX]`.
pub fn floor(x: &BigRational) -> usize {
    if x.is_negative() {
        return 0;
    }
    x.floor().to_integer().to_usize().unwrap_or(usize::MAX)
}
