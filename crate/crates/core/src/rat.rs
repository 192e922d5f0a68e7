//! Exact rational scalars.
//!
//! Hot loops (sieving, window sums, correlation dot products) keep scaled
//! i64/i128 numerators over a small common denominator; the identity suites
//! combine those accumulators into `Rat`, which is backed by
//! arbitrary-precision integers so long sums of fractions with denominators
//! like lcm(1..Q) never overflow.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rat = num_rational::BigRational;

/// `num/den` as an exact rational. `den` must be nonzero.
pub fn rat(num: i64, den: i64) -> Rat {
    assert!(den != 0, "zero denominator");
    Rat::new(BigInt::from(num), BigInt::from(den))
}

/// Integer as an exact rational.
pub fn rint(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn rat_i128(num: i128, den: i128) -> Rat {
    assert!(den != 0, "zero denominator");
    Rat::new(BigInt::from(num), BigInt::from(den))
}

pub fn to_f64(x: &Rat) -> f64 {
    x.to_f64().expect("rational out of f64 range")
}

/// Fractional part with floor semantics: `{x} = x - floor(x)`, in `[0, 1)`.
pub fn frac(x: &Rat) -> Rat {
    x - x.floor()
}

pub fn is_zero(x: &Rat) -> bool {
    x.is_zero()
}

pub fn rabs(x: &Rat) -> Rat {
    x.abs()
}

/// lcm(1..=m) as a big integer; the shared denominator for sums of 1/d terms.
pub fn lcm_upto(m: i64) -> BigInt {
    let mut l = BigInt::one();
    for k in 2..=m.max(1) {
        l = l.lcm(&BigInt::from(k));
    }
    l
}
