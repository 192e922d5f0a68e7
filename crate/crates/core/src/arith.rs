//! Exact integer and rational primitives: gcd, modular inverses, Möbius and
//! totient, the first Bernoulli function B₁ with its finite Fourier
//! expansion, and exact arithmetic-progression counting.
//!
//! B₁ arguments coming out of the correlation formulas are always exact
//! rationals, so the "B₁ = 0 on the integers" convention is decided exactly,
//! never by floating-point proximity.

use crate::rat::{frac, rat, Rat};
use num_integer::Integer;
use num_traits::Zero;
use std::f64::consts::PI;
use thiserror::Error;

/// Möbius sieve memory budget, in table entries.
pub const MOEBIUS_BUDGET: i64 = 1 << 27;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ArithError {
    #[error("modulus must be >= 1, got {0}")]
    NonPositiveModulus(i64),
    #[error("{d} is not invertible modulo {q}")]
    NonInvertible { d: i64, q: i64 },
    #[error("sieve limit {limit} exceeds the memory budget {budget}")]
    LimitTooLarge { limit: i64, budget: i64 },
}

/// Nonnegative greatest common divisor; `gcd(0, 0) = 0`.
pub fn gcd(a: i64, b: i64) -> i64 {
    a.gcd(&b)
}

/// Reciprocal residue: the `r` in `[0, q-1]` with `r*d ≡ 1 (mod q)`.
/// For `q = 1` every residue is 0, so the inverse is 0.
pub fn mod_inverse(d: i64, q: i64) -> Result<i64, ArithError> {
    if q < 1 {
        return Err(ArithError::NonPositiveModulus(q));
    }
    if q == 1 {
        return Ok(0);
    }
    // Extended Euclid on (d mod q, q).
    let (mut r0, mut r1) = (d.rem_euclid(q), q);
    let (mut s0, mut s1) = (1i64, 0i64);
    while r1 != 0 {
        let k = r0 / r1;
        (r0, r1) = (r1, r0 - k * r1);
        (s0, s1) = (s1, s0 - k * s1);
    }
    if r0 != 1 {
        return Err(ArithError::NonInvertible { d, q });
    }
    Ok(s0.rem_euclid(q))
}

/// μ(n) for n in 1..=limit, via a linear sieve on smallest prime factors.
/// Entry 0 of the returned table is unused.
pub fn moebius_table(limit: i64) -> Result<Vec<i8>, ArithError> {
    assert!(limit >= 1, "limit must be >= 1");
    if limit > MOEBIUS_BUDGET {
        return Err(ArithError::LimitTooLarge {
            limit,
            budget: MOEBIUS_BUDGET,
        });
    }
    let n = limit as usize;
    let mut spf = vec![0u32; n + 1];
    let mut primes: Vec<u32> = Vec::new();
    let mut mu = vec![0i8; n + 1];
    mu[1] = 1;
    for i in 2..=n {
        if spf[i] == 0 {
            spf[i] = i as u32;
            primes.push(i as u32);
            mu[i] = -1;
        }
        for &p in &primes {
            let ip = i * p as usize;
            if p > spf[i] || ip > n {
                break;
            }
            spf[ip] = p;
            mu[ip] = if i % p as usize == 0 { 0 } else { -mu[i] };
        }
    }
    Ok(mu)
}

/// Euler totient by trial-division factorization.
pub fn euler_phi(q: i64) -> i64 {
    assert!(q >= 1, "phi needs q >= 1");
    let mut n = q;
    let mut phi = q;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            phi -= phi / p;
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        phi -= phi / n;
    }
    phi
}

/// First Bernoulli function: `{x} - 1/2` off the integers, 0 on them.
pub fn b1(x: &Rat) -> Rat {
    if x.is_integer() {
        return Rat::zero();
    }
    frac(x) - rat(1, 2)
}

/// Distance from the integers: `min({x}, 1 - {x})`, in `[0, 1/2]`.
pub fn dist_to_int(x: &Rat) -> Rat {
    let f = frac(x);
    let g = rat(1, 1) - &f;
    if f <= g {
        f
    } else {
        g
    }
}

/// B₁(n/q) numerator over the denominator 2q, computed in integers:
/// 0 when q | n, otherwise `2(n mod q) - q`.
pub(crate) fn b1_num_2q(n: i64, q: i64) -> i64 {
    let t = n.rem_euclid(q);
    if t == 0 {
        0
    } else {
        2 * t - q
    }
}

/// Finite Fourier expansion of B₁ at n/q:
/// `-(1/q) Σ_{j <= q/2} cot(πj/q) sin(2πjn/q)`.
/// Empty sum (hence 0) for q = 1.
pub fn b1_fourier(n: i64, q: i64) -> f64 {
    assert!(q >= 1, "b1_fourier needs q >= 1");
    let m = n.rem_euclid(q);
    let qf = q as f64;
    let mut acc = 0.0f64;
    let mut comp = 0.0f64;
    for j in 1..=(q / 2) {
        let cot = 1.0 / (PI * j as f64 / qf).tan();
        let s = (2.0 * PI * ((j * m) % q) as f64 / qf).sin();
        // Kahan accumulation; the cot factors span several orders of magnitude.
        let term = cot * s - comp;
        let t = acc + term;
        comp = (t - acc) - term;
        acc = t;
    }
    -acc / qf
}

/// Exact count of integers `m` with `M1 < m <= M2` and `m ≡ r (mod q)`.
pub fn count_in_ap(m1: i64, m2: i64, q: i64, r: i64) -> i64 {
    assert!(q >= 1, "count_in_ap needs q >= 1");
    Integer::div_floor(&(m2 - r), &q) - Integer::div_floor(&(m1 - r), &q)
}

/// The exact AP count split into density, Bernoulli, and integer-point parts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountDecomposition {
    pub density: Rat,
    pub bernoulli_part: Rat,
    pub indicator_part: Rat,
}

impl CountDecomposition {
    pub fn total(&self) -> Rat {
        &self.density + &self.bernoulli_part + &self.indicator_part
    }
}

/// Split `#{M1 < m <= M2 : m ≡ r (q)}` via `floor(t) = t - B₁(t) - ½·[t ∉ Z]`:
/// density `(M2-M1)/q`, Bernoulli part `-B₁((M2-r)/q) + B₁((M1-r)/q)`, and
/// the half-integer correction at the two endpoints. The three parts sum
/// exactly to `count_in_ap`.
pub fn count_b1_decomposition(m1: i64, m2: i64, q: i64, r: i64) -> CountDecomposition {
    assert!(q >= 1, "count_b1_decomposition needs q >= 1");
    let t1 = rat(m1 - r, q);
    let t2 = rat(m2 - r, q);
    let density = rat(m2 - m1, q);
    let bernoulli_part = b1(&t1) - b1(&t2);
    let hit = |m: i64| ((m - r).rem_euclid(q) == 0) as i64;
    let indicator_part = rat(hit(m2) - hit(m1), 2);
    CountDecomposition {
        density,
        bernoulli_part,
        indicator_part,
    }
}

/// Positive divisors of `n > 0`, ascending.
pub fn divisors(n: i64) -> Vec<i64> {
    assert!(n > 0, "divisors needs n > 0");
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    large.reverse();
    small.extend(large);
    small
}
