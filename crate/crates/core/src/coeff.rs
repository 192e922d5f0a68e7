//! Coefficient functions `g` supported on `[1, Q]`, presets, segment sieving
//! of `f = g ∗ 1`, mean values, and essential-boundedness diagnostics.
//!
//! Coefficient values are exact rationals stored as scaled i64 numerators
//! over one common denominator, so sieving and window sums stay in integer
//! arithmetic and identity suites can cancel exactly.

use crate::arith::moebius_table;
use crate::rat::{lcm_upto, rat, Rat};
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CoeffError {
    #[error("custom table has {got} entries, support bound wants {expected}")]
    BadTableLength { expected: usize, got: usize },
    #[error("support entry {offender} lies outside the dyadic block ]{base}, {double}]")]
    NonDyadicSupport {
        base: i64,
        double: i64,
        offender: i64,
    },
    #[error("common denominator of the table does not fit in 62 bits")]
    DenominatorOverflow,
    #[error("scaled coefficient at d={d} does not fit in 62 bits")]
    ValueOverflow { d: i64 },
    #[error("bad coefficient line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Built-in coefficient presets; `Custom` carries an explicit table.
#[derive(Debug, Clone)]
pub enum Preset {
    /// g ≡ 1 on [1, Q]; with Q >= n this sieves the divisor function d(n).
    UnitDivisor,
    /// g(d) = μ(d).
    Moebius,
    /// g(d) = μ(d)².
    MoebiusSquared,
    Custom(Vec<Rat>),
}

/// A real coefficient table on `[1, support_bound]`; zero beyond it.
#[derive(Debug, Clone)]
pub struct CoeffFn {
    support_bound: i64,
    /// Scaled numerators, index d-1; the exact value is nums[d-1] / den.
    nums: Vec<i64>,
    den: i64,
    label: String,
}

impl CoeffFn {
    pub fn make_preset(kind: Preset, q: i64) -> Result<CoeffFn, CoeffError> {
        assert!(q >= 1, "support bound must be >= 1");
        match kind {
            Preset::UnitDivisor => Ok(CoeffFn {
                support_bound: q,
                nums: vec![1; q as usize],
                den: 1,
                label: format!("unit_divisor({q})"),
            }),
            Preset::Moebius => {
                let mu = moebius_table(q).expect("mu table within budget");
                Ok(CoeffFn {
                    support_bound: q,
                    nums: (1..=q as usize).map(|d| mu[d] as i64).collect(),
                    den: 1,
                    label: format!("moebius({q})"),
                })
            }
            Preset::MoebiusSquared => {
                let mu = moebius_table(q).expect("mu table within budget");
                Ok(CoeffFn {
                    support_bound: q,
                    nums: (1..=q as usize).map(|d| (mu[d] * mu[d]) as i64).collect(),
                    den: 1,
                    label: format!("moebius_squared({q})"),
                })
            }
            Preset::Custom(table) => {
                if table.len() != q as usize {
                    return Err(CoeffError::BadTableLength {
                        expected: q as usize,
                        got: table.len(),
                    });
                }
                Self::from_table(&table, q, format!("custom({q})"))
            }
        }
    }

    /// Exact rational table over a common denominator.
    pub fn from_table(values: &[Rat], q: i64, label: String) -> Result<CoeffFn, CoeffError> {
        if values.len() != q as usize {
            return Err(CoeffError::BadTableLength {
                expected: q as usize,
                got: values.len(),
            });
        }
        let mut den_big = BigInt::from(1);
        for v in values {
            let d = v.denom();
            let g = num_integer::Integer::gcd(&den_big, d);
            den_big = &den_big / g * d;
        }
        let den = den_big.to_i64().filter(|&d| d < (1 << 62)).ok_or(CoeffError::DenominatorOverflow)?;
        let mut nums = Vec::with_capacity(values.len());
        for (i, v) in values.iter().enumerate() {
            let scaled = v.numer() * (den_big.clone() / v.denom());
            let n = scaled
                .to_i64()
                .filter(|n| n.abs() < (1 << 62))
                .ok_or(CoeffError::ValueOverflow { d: i as i64 + 1 })?;
            nums.push(n);
        }
        Ok(CoeffFn {
            support_bound: q,
            nums,
            den,
            label,
        })
    }

    /// Load a custom table from text: one `d num/den` line per nonzero
    /// coefficient (plain integers allowed); absent d means 0. The support
    /// bound is the largest d present.
    pub fn from_file(path: &Path) -> Result<CoeffFn, CoeffError> {
        let text = std::fs::read_to_string(path)?;
        let mut entries: Vec<(i64, Rat)> = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            let parse = |s: Option<&str>, reason: &str| {
                s.map(str::to_owned).ok_or_else(|| CoeffError::Parse {
                    line: idx + 1,
                    reason: reason.into(),
                })
            };
            let d_str = parse(parts.next(), "missing index")?;
            let v_str = parse(parts.next(), "missing value")?;
            let d: i64 = d_str.parse().map_err(|e| CoeffError::Parse {
                line: idx + 1,
                reason: format!("bad index: {e}"),
            })?;
            if d < 1 {
                return Err(CoeffError::Parse {
                    line: idx + 1,
                    reason: format!("index {d} must be >= 1"),
                });
            }
            let v = parse_rational(&v_str).ok_or_else(|| CoeffError::Parse {
                line: idx + 1,
                reason: format!("bad value {v_str:?}"),
            })?;
            entries.push((d, v));
        }
        let bound = entries.iter().map(|&(d, _)| d).max().unwrap_or(1);
        let mut table = vec![Rat::zero(); bound as usize];
        for (d, v) in entries {
            table[d as usize - 1] = v;
        }
        let label = format!("file:{}", path.display());
        Self::from_table(&table, bound, label)
    }

    pub fn support_bound(&self) -> i64 {
        self.support_bound
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn den(&self) -> i64 {
        self.den
    }

    /// g(d) as an exact rational; zero outside the support.
    pub fn value(&self, d: i64) -> Rat {
        if d < 1 || d > self.support_bound {
            return Rat::zero();
        }
        rat(self.nums[d as usize - 1], self.den)
    }

    /// Scaled numerator of g(d) over `den()`; zero outside the support.
    pub fn num_at(&self, d: i64) -> i64 {
        if d < 1 || d > self.support_bound {
            0
        } else {
            self.nums[d as usize - 1]
        }
    }

    /// Nonzero entries as (d, scaled numerator), ascending in d.
    pub fn support(&self) -> Vec<(i64, i64)> {
        self.nums
            .iter()
            .enumerate()
            .filter(|(_, &n)| n != 0)
            .map(|(i, &n)| (i as i64 + 1, n))
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.nums.iter().all(|&n| n == 0)
    }

    /// Σ_d |g(d)|.
    pub fn abs_sum(&self) -> Rat {
        let s: i128 = self.nums.iter().map(|&n| (n as i128).abs()).sum();
        Rat::new(BigInt::from(s), BigInt::from(self.den))
    }

    pub fn max_abs(&self) -> f64 {
        self.nums
            .iter()
            .map(|&n| (n.abs() as f64) / self.den as f64)
            .fold(0.0, f64::max)
    }

    /// `f(n) = Σ_{d|n, d <= Q} g(d)` for every n in `[a, b]`, by the
    /// segmented pattern: every support entry stamps its multiples.
    pub fn sieve_segment(&self, a: i64, b: i64) -> Segment {
        assert!(1 <= a && a <= b, "need 1 <= A <= B");
        let len = (b - a + 1) as usize;
        let support = self.support();
        let mut nums = vec![0i64; len];
        const CHUNK: usize = 1 << 16;
        nums.par_chunks_mut(CHUNK).enumerate().for_each(|(ci, chunk)| {
            let lo = a + (ci * CHUNK) as i64;
            for &(d, g) in &support {
                let mut idx = ((d - lo.rem_euclid(d)) % d) as usize;
                while idx < chunk.len() {
                    chunk[idx] = chunk[idx].checked_add(g).expect("sieve value overflow");
                    idx += d as usize;
                }
            }
        });
        Segment {
            start: a,
            nums,
            den: self.den,
        }
    }

    /// Per-point oracle for `sieve_segment`: direct divisor enumeration.
    pub fn f_at(&self, n: i64) -> Rat {
        assert!(n >= 1);
        let mut acc: i64 = 0;
        let mut d = 1;
        while d * d <= n {
            if n % d == 0 {
                acc += self.num_at(d);
                let e = n / d;
                if e != d {
                    acc += self.num_at(e);
                }
            }
            d += 1;
        }
        rat(acc, self.den)
    }

    /// Expected window mean `M_f(h) = h Σ_d g(d)/d`, exact.
    pub fn mean_value(&self, h: i64) -> Rat {
        assert!(h >= 1);
        let l = lcm_upto(self.support_bound);
        let mut num = BigInt::zero();
        for (d, n) in self.support() {
            num += &l / d * n;
        }
        Rat::new(num * h, l * self.den)
    }

    /// Long-sum sanity check at x: exact `Σ_{n<=x} f(n) = Σ_d g(d) [x/d]`
    /// against the smooth value `x Σ_d g(d)/d`; their difference is bounded
    /// by `Σ_d |g(d)|`.
    pub fn long_sum_check(&self, x: i64) -> LongSumCheck {
        assert!(x >= self.support_bound, "need x >= Q");
        let mut acc: i128 = 0;
        for (d, n) in self.support() {
            acc += n as i128 * (x / d) as i128;
        }
        let exact = Rat::new(BigInt::from(acc), BigInt::from(self.den));
        let smooth = self.mean_value(x);
        let diff = &exact - &smooth;
        LongSumCheck {
            exact,
            smooth,
            diff,
        }
    }

    /// Diagnostic for the essential-boundedness hypothesis:
    /// `max_d |g(d)| / d^eps`. Reported, never asserted.
    pub fn essential_bound_report(&self, eps: f64) -> f64 {
        assert!(eps > 0.0);
        self.support()
            .iter()
            .map(|&(d, n)| (n.abs() as f64 / self.den as f64) / (d as f64).powf(eps))
            .fold(0.0, f64::max)
    }
}

fn parse_rational(s: &str) -> Option<Rat> {
    if let Some((n, d)) = s.split_once('/') {
        let num: i64 = n.parse().ok()?;
        let den: i64 = d.parse().ok()?;
        if den == 0 {
            return None;
        }
        Some(rat(num, den))
    } else {
        let num: i64 = s.parse().ok()?;
        Some(rat(num, 1))
    }
}

#[derive(Debug, Clone)]
pub struct LongSumCheck {
    pub exact: Rat,
    pub smooth: Rat,
    pub diff: Rat,
}

/// Sieved values of `f = g ∗ 1` on an integer interval, scaled like the
/// coefficient table that produced them.
#[derive(Debug, Clone)]
pub struct Segment {
    start: i64,
    nums: Vec<i64>,
    den: i64,
}

impl Segment {
    pub fn start(&self) -> i64 {
        self.start
    }

    /// Last covered integer.
    pub fn end(&self) -> i64 {
        self.start + self.nums.len() as i64 - 1
    }

    pub fn den(&self) -> i64 {
        self.den
    }

    pub fn covers(&self, lo: i64, hi: i64) -> bool {
        self.start <= lo && hi <= self.end()
    }

    /// Scaled numerator of f(n); n must be covered.
    pub fn num_at(&self, n: i64) -> i64 {
        assert!(
            self.covers(n, n),
            "segment [{}, {}] does not cover {n}",
            self.start,
            self.end()
        );
        self.nums[(n - self.start) as usize]
    }

    pub fn value(&self, n: i64) -> Rat {
        rat(self.num_at(n), self.den)
    }

    pub fn value_f64(&self, n: i64) -> f64 {
        self.num_at(n) as f64 / self.den as f64
    }

    pub fn max_abs(&self) -> f64 {
        self.nums
            .iter()
            .map(|&n| n.abs() as f64 / self.den as f64)
            .fold(0.0, f64::max)
    }
}

/// A coefficient function constrained to one dyadic block `]base, 2·base]`.
#[derive(Debug, Clone)]
pub struct DyadicSupport {
    base: i64,
    coeff: CoeffFn,
}

impl DyadicSupport {
    pub fn new(base: i64, coeff: CoeffFn) -> Result<DyadicSupport, CoeffError> {
        assert!(base >= 1, "dyadic base must be >= 1");
        for (d, _) in coeff.support() {
            if d <= base || d > 2 * base {
                return Err(CoeffError::NonDyadicSupport {
                    base,
                    double: 2 * base,
                    offender: d,
                });
            }
        }
        Ok(DyadicSupport { base, coeff })
    }

    pub fn base(&self) -> i64 {
        self.base
    }

    pub fn coeff(&self) -> &CoeffFn {
        &self.coeff
    }
}
