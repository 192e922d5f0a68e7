//! Correlations `C_{f1,f2}(a) = Σ_{n∼N} f1(n) f2(n−a)` in direct, fast
//! cross-correlation, and exact AP-count forms; the smooth and floor main
//! terms; the Bernoulli remainder with its truncated-Fourier and
//! Σ-decomposition forms; Kloosterman-fraction bilinear sums; and the
//! AP-level discrepancy sum.
//!
//! Everything returning `Rat` is an exact identity component: the
//! symmetrized correlation equals floor main term + remainder/2 +
//! integer-point correction as a rational equality, not an approximation.

use crate::arith::{b1_num_2q, count_in_ap, divisors, euler_phi, gcd, mod_inverse, moebius_table};
use crate::coeff::{CoeffFn, DyadicSupport, Segment};
use crate::rat::{lcm_upto, rat_i128, to_f64, Rat};
use num_bigint::BigInt;
use num_traits::Zero;
use rustfft::{num_complex::Complex, FftPlanner};
use std::f64::consts::TAU;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CorrError {
    #[error("segment [{have_lo}, {have_hi}] does not cover [{need_lo}, {need_hi}]")]
    SegmentTooShort {
        need_lo: i64,
        need_hi: i64,
        have_lo: i64,
        have_hi: i64,
    },
    #[error("shift {a} is not in 0 < |a| < {n}")]
    ShiftTooLarge { a: i64, n: i64 },
}

/// Compensated (Kahan) accumulator; floating-point sums here have a fixed
/// term order so runs reproduce bit-for-bit.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct Kahan {
    sum: f64,
    comp: f64,
}

impl Kahan {
    pub fn add(&mut self, x: f64) {
        let y = x - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}

fn check_cover(seg: &Segment, lo: i64, hi: i64) -> Result<(), CorrError> {
    if seg.covers(lo, hi) {
        Ok(())
    } else {
        Err(CorrError::SegmentTooShort {
            need_lo: lo,
            need_hi: hi,
            have_lo: seg.start(),
            have_hi: seg.end(),
        })
    }
}

fn check_shift(n: i64, a: i64) -> Result<(), CorrError> {
    if a == 0 || a.abs() >= n {
        Err(CorrError::ShiftTooLarge { a, n })
    } else {
        Ok(())
    }
}

/// Exact `Σ_{n=N+1}^{2N} f1(n) f2(n−a)`.
pub fn correlation_direct(f1: &Segment, f2: &Segment, n: i64, a: i64) -> Result<Rat, CorrError> {
    check_shift(n, a)?;
    check_cover(f1, n + 1, 2 * n)?;
    check_cover(f2, n + 1 - a, 2 * n - a)?;
    let mut acc: i128 = 0;
    for m in n + 1..=2 * n {
        acc += f1.num_at(m) as i128 * f2.num_at(m - a) as i128;
    }
    Ok(rat_i128(acc, f1.den() as i128 * f2.den() as i128))
}

/// Exact `(C(a) + C(−a))/2`.
pub fn symmetrized_correlation(
    f1: &Segment,
    f2: &Segment,
    n: i64,
    a: i64,
) -> Result<Rat, CorrError> {
    let plus = correlation_direct(f1, f2, n, a)?;
    let minus = correlation_direct(f1, f2, n, -a)?;
    Ok((plus + minus) / Rat::from_integer(BigInt::from(2)))
}

/// Correlation values for every shift in `[-amax, amax]`, indexed by shift.
#[derive(Debug, Clone)]
pub struct CorrTable {
    amax: i64,
    values: Vec<f64>,
}

impl CorrTable {
    pub fn amax(&self) -> i64 {
        self.amax
    }

    pub fn get(&self, a: i64) -> f64 {
        assert!(a.abs() <= self.amax, "shift {a} outside table");
        self.values[(a + self.amax) as usize]
    }
}

/// All shifts at once by FFT cross-correlation: the reversal of the f1
/// window convolved with the f2 window. O((N + amax) log) instead of
/// O(N·amax).
pub fn correlation_all_shifts(
    f1: &Segment,
    f2: &Segment,
    n: i64,
    amax: i64,
) -> Result<CorrTable, CorrError> {
    assert!(amax >= 0);
    check_cover(f1, n + 1, 2 * n)?;
    check_cover(f2, n + 1 - amax, 2 * n + amax)?;
    let len1 = n as usize;
    let len2 = (n + 2 * amax) as usize;
    let out_len = len1 + len2 - 1;
    let size = out_len.next_power_of_two();

    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(size);
    let ifft = planner.plan_fft_inverse(size);

    let mut xa = vec![Complex::new(0.0, 0.0); size];
    let mut xb = vec![Complex::new(0.0, 0.0); size];
    for i in 0..len1 {
        // reversed f1 window
        xa[i].re = f1.num_at(2 * n - i as i64) as f64;
    }
    for j in 0..len2 {
        xb[j].re = f2.num_at(n + 1 - amax + j as i64) as f64;
    }
    fft.process(&mut xa);
    fft.process(&mut xb);
    let scale = 1.0 / (size as f64 * f1.den() as f64 * f2.den() as f64);
    for (a, b) in xa.iter_mut().zip(&xb) {
        *a *= b;
    }
    ifft.process(&mut xa);

    let mut values = Vec::with_capacity(2 * amax as usize + 1);
    for a in -amax..=amax {
        let k = (len1 as i64 - 1 + amax - a) as usize;
        values.push(xa[k].re * scale);
    }
    Ok(CorrTable { amax, values })
}

/// The symmetrized correlation re-derived by opening `f = g ∗ 1` and
/// organizing by gcd: exact AP counts over `m ∼ N/(ℓd')` in the classes
/// `±d̄'b (mod q')`. Equals `symmetrized_correlation` exactly.
pub fn open_correlation_exact(
    g1: &CoeffFn,
    g2: &CoeffFn,
    n: i64,
    a: i64,
) -> Result<Rat, CorrError> {
    check_shift(n, a)?;
    let aa = a.abs();
    let mut acc: i128 = 0;
    for ell in divisors(aa) {
        let b = aa / ell;
        let s1 = support_multiples(g1, ell);
        if s1.is_empty() {
            continue;
        }
        let s2 = support_multiples(g2, ell);
        for &(d, n1) in &s1 {
            let dd = ell * d;
            let m1 = n / dd;
            let m2 = 2 * n / dd;
            for &(q, n2) in &s2 {
                if gcd(d, q) != 1 {
                    continue;
                }
                let dbar = mod_inverse(d, q).expect("coprime by construction");
                let r = (dbar * (b % q)) % q;
                let cnt = count_in_ap(m1, m2, q, r) + count_in_ap(m1, m2, q, (q - r) % q);
                acc += n1 as i128 * n2 as i128 * cnt as i128;
            }
        }
    }
    Ok(rat_i128(acc, 2) / den_product(g1, g2))
}

/// Nonzero entries of g at multiples of `ell`, as (d = entry/ell, num).
fn support_multiples(g: &CoeffFn, ell: i64) -> Vec<(i64, i64)> {
    g.support()
        .into_iter()
        .filter(|&(d, _)| d % ell == 0)
        .map(|(d, n)| (d / ell, n))
        .collect()
}

fn den_product(g1: &CoeffFn, g2: &CoeffFn) -> Rat {
    Rat::from_integer(BigInt::from(g1.den()) * BigInt::from(g2.den()))
}

/// `Σ_q acc[q] / q`, exact, over the shared denominator lcm(1..qmax).
fn sum_over_index(acc: &[i128]) -> Rat {
    let qmax = acc.len() as i64 - 1;
    if qmax < 1 {
        return Rat::zero();
    }
    let l = lcm_upto(qmax);
    let mut num = BigInt::zero();
    for (q, &v) in acc.iter().enumerate().skip(1) {
        if v != 0 {
            num += &l / q as i64 * BigInt::from(v);
        }
    }
    Rat::new(num, l)
}

/// `Σ_{(d,q)=1} (g1(ℓd)/d)(g2(ℓq)/q)` decoupled by Möbius over the common
/// gcd divisor: `Σ_e μ(e) X_e Y_e` with X, Y accumulated over one shared
/// lcm denominator. Exact.
pub fn coprime_inverse_sum(g1: &CoeffFn, g2: &CoeffFn, ell: i64) -> Rat {
    let s1 = support_multiples(g1, ell);
    let s2 = support_multiples(g2, ell);
    if s1.is_empty() || s2.is_empty() {
        return Rat::zero();
    }
    let dmax = s1.iter().map(|&(d, _)| d).max().unwrap();
    let qmax = s2.iter().map(|&(q, _)| q).max().unwrap();
    let mut v1 = vec![0i64; dmax as usize + 1];
    for &(d, n1) in &s1 {
        v1[d as usize] = n1;
    }
    let mut v2 = vec![0i64; qmax as usize + 1];
    for &(q, n2) in &s2 {
        v2[q as usize] = n2;
    }
    let l = lcm_upto(dmax.max(qmax));
    let linv: Vec<BigInt> = (0..=dmax.max(qmax))
        .map(|m| if m == 0 { BigInt::zero() } else { &l / m })
        .collect();
    let emax = dmax.min(qmax);
    let mu = moebius_table(emax).expect("mu table within budget");
    let mut acc = BigInt::zero();
    for e in 1..=emax {
        if mu[e as usize] == 0 {
            continue;
        }
        let mut x = BigInt::zero();
        let mut m = e;
        while m <= dmax {
            if v1[m as usize] != 0 {
                x += &linv[m as usize] * v1[m as usize];
            }
            m += e;
        }
        if x.is_zero() {
            continue;
        }
        let mut y = BigInt::zero();
        let mut m = e;
        while m <= qmax {
            if v2[m as usize] != 0 {
                y += &linv[m as usize] * v2[m as usize];
            }
            m += e;
        }
        acc += x * y * mu[e as usize] as i64;
    }
    Rat::new(acc, &l * &l) / den_product(g1, g2)
}

/// Smooth main term of the correlation,
/// `N Σ_{ℓ|a} (1/ℓ) ΣΣ_{(d,q)=1} (g1(ℓd)/d)(g2(ℓq)/q)`, exact.
pub fn smooth_main_term(g1: &CoeffFn, g2: &CoeffFn, n: i64, a: i64) -> Rat {
    assert!(a != 0, "shift must be nonzero");
    let mut total = Rat::zero();
    for ell in divisors(a.abs()) {
        let inner = coprime_inverse_sum(g1, g2, ell);
        if !inner.is_zero() {
            total += inner * Rat::new(BigInt::from(n), BigInt::from(ell));
        }
    }
    total
}

/// The three exact pieces the symmetrized correlation splits into,
/// computed in one pass over the support pairs.
struct DecompositionSums {
    floor_main: Rat,
    bernoulli_r: Rat,
    integer_correction: Rat,
}

fn decomposition_pass(g1: &CoeffFn, g2: &CoeffFn, n: i64, a: i64) -> DecompositionSums {
    assert!(a != 0, "shift must be nonzero");
    let aa = a.abs();
    let qmax = g2.support_bound() as usize;
    let mut floor_acc = vec![0i128; qmax + 1];
    let mut bern_acc = vec![0i128; qmax + 1];
    let mut int_acc: i128 = 0;
    for ell in divisors(aa) {
        let b = aa / ell;
        let s1 = support_multiples(g1, ell);
        if s1.is_empty() {
            continue;
        }
        let s2 = support_multiples(g2, ell);
        for &(d, n1) in &s1 {
            let dd = ell * d;
            let m1 = n / dd;
            let m2 = 2 * n / dd;
            for &(q, n2) in &s2 {
                if gcd(d, q) != 1 {
                    continue;
                }
                let w = n1 as i128 * n2 as i128;
                floor_acc[q as usize] += w * (m2 - m1) as i128;
                let dbar = mod_inverse(d, q).expect("coprime by construction");
                let r = (dbar * (b % q)) % q;
                // Both B1 differences of the remainder, numerators over 2q.
                let s = (b1_num_2q(m2 - r, q) - b1_num_2q(m1 - r, q))
                    + (b1_num_2q(m2 + r, q) - b1_num_2q(m1 + r, q));
                bern_acc[q as usize] -= w * s as i128;
                // Integer-point hits q | d[cN/ℓd] ∓ b, i.e. [cN/ℓd] ≡ ±d̄b (q).
                let hit = |m: i64, rr: i64| ((m - rr).rem_euclid(q) == 0) as i128;
                int_acc += w
                    * ((hit(m2, r) - hit(m1, r)) + (hit(m2, q - r) - hit(m1, q - r)));
            }
        }
    }
    let dens = den_product(g1, g2);
    let two = Rat::from_integer(BigInt::from(2));
    let four = Rat::from_integer(BigInt::from(4));
    DecompositionSums {
        floor_main: sum_over_index(&floor_acc) * &dens,
        bernoulli_r: sum_over_index(&bern_acc) / two * &dens,
        integer_correction: rat_i128(int_acc, 1) / four * dens,
    }
}

/// Floor-bracket main term
/// `Σ_{ℓ|a} ΣΣ_{(d,q)=1} g1(ℓd) g2(ℓq) (1/q)([2N/ℓd] − [N/ℓd])`, exact.
pub fn floor_main_term(g1: &CoeffFn, g2: &CoeffFn, n: i64, a: i64) -> Rat {
    decomposition_pass(g1, g2, n, a).floor_main
}

/// The Bernoulli remainder `R_{D,Q}(|a|)`: both B1 difference sums with
/// their leading minus signs, evaluated on exact rationals.
pub fn bernoulli_remainder(g1: &DyadicSupport, g2: &DyadicSupport, n: i64, a: i64) -> Rat {
    decomposition_pass(g1.coeff(), g2.coeff(), n, a).bernoulli_r
}

/// The half-integer correction from endpoints hitting the progression:
/// `(1/4) Σ_{ℓ,d,q,±} g1(ℓd) g2(ℓq) ([[2N/ℓd] ≡ ±d̄b (q)] − [[N/ℓd] ≡ ±d̄b (q)])`.
pub fn integer_point_correction(g1: &DyadicSupport, g2: &DyadicSupport, n: i64, a: i64) -> Rat {
    decomposition_pass(g1.coeff(), g2.coeff(), n, a).integer_correction
}

/// One shift of the full decomposition chain, all pieces exact.
#[derive(Debug, Clone)]
pub struct CorrelationBreakdown {
    pub shift: i64,
    pub direct: Rat,
    pub symmetrized: Rat,
    pub smooth_main: Rat,
    pub floor_main: Rat,
    pub bernoulli_r: Rat,
    pub integer_correction: Rat,
    pub exact_residual: Rat,
}

impl CorrelationBreakdown {
    /// `symmetrized − (floor_main + R/2 + integer_correction)`; zero when the
    /// exact decomposition identity holds.
    pub fn identity_defect(&self) -> Rat {
        let half_r = &self.bernoulli_r / Rat::from_integer(BigInt::from(2));
        &self.symmetrized - (&self.floor_main + half_r + &self.integer_correction)
    }
}

/// Full decomposition for dyadic supports.
pub fn decompose_correlation(
    g1: &DyadicSupport,
    g2: &DyadicSupport,
    n: i64,
    a: i64,
) -> Result<CorrelationBreakdown, CorrError> {
    decompose_correlation_general(g1.coeff(), g2.coeff(), n, a)
}

/// Decomposition for arbitrary supports. The remainder and correction are
/// bilinear in (g1, g2), so the blockwise dyadic sums collapse to one pass
/// over the full supports.
pub fn decompose_correlation_general(
    g1: &CoeffFn,
    g2: &CoeffFn,
    n: i64,
    a: i64,
) -> Result<CorrelationBreakdown, CorrError> {
    check_shift(n, a)?;
    let f1 = g1.sieve_segment(n + 1, 2 * n);
    let aa = a.abs();
    let f2 = g2.sieve_segment((n + 1 - aa).max(1), 2 * n + aa);
    decompose_with_segments(g1, g2, &f1, &f2, n, a)
}

/// As `decompose_correlation_general`, with caller-provided segments so a
/// sweep can sieve once and decompose many shifts.
pub fn decompose_with_segments(
    g1: &CoeffFn,
    g2: &CoeffFn,
    f1: &Segment,
    f2: &Segment,
    n: i64,
    a: i64,
) -> Result<CorrelationBreakdown, CorrError> {
    check_shift(n, a)?;
    let direct = correlation_direct(f1, f2, n, a)?;
    let symmetrized = symmetrized_correlation(f1, f2, n, a)?;
    let sums = decomposition_pass(g1, g2, n, a);
    let smooth_main = smooth_main_term(g1, g2, n, a);
    let exact_residual = &symmetrized - &smooth_main;
    Ok(CorrelationBreakdown {
        shift: a,
        direct,
        symmetrized,
        smooth_main,
        floor_main: sums.floor_main,
        bernoulli_r: sums.bernoulli_r,
        integer_correction: sums.integer_correction,
        exact_residual,
    })
}

/// Truncated finite-Fourier form of the remainder:
/// `(2/π) Σ_{ℓ,d,q} g1 g2 Σ_{j≤J} (sin(2π[2N/ℓd]j/q) − sin(2π[N/ℓd]j/q))/j · cos(2πj d̄b/q)`
/// with `J = [ℓdq/N^{1−δ}]` per (ℓ, d, q). Floating point; compared against
/// the exact remainder as a report, never asserted.
pub fn fourier_truncated_remainder(
    g1: &DyadicSupport,
    g2: &DyadicSupport,
    n: i64,
    a: i64,
    delta: f64,
) -> f64 {
    assert!(a != 0, "shift must be nonzero");
    assert!(delta > 0.0 && delta < 0.5, "need 0 < delta < 1/2");
    let aa = a.abs();
    let nfloat = (n as f64).powf(1.0 - delta);
    let (c1, c2) = (g1.coeff(), g2.coeff());
    let gf = 1.0 / (c1.den() as f64 * c2.den() as f64);
    let mut acc = Kahan::default();
    for ell in divisors(aa) {
        let b = aa / ell;
        let s1 = support_multiples(c1, ell);
        if s1.is_empty() {
            continue;
        }
        let s2 = support_multiples(c2, ell);
        for &(d, n1) in &s1 {
            let dd = ell * d;
            let m1 = n / dd;
            let m2 = 2 * n / dd;
            for &(q, n2) in &s2 {
                if gcd(d, q) != 1 {
                    continue;
                }
                let jmax = ((dd * q) as f64 / nfloat).floor() as i64;
                if jmax < 1 {
                    continue;
                }
                let dbar = mod_inverse(d, q).expect("coprime by construction");
                let rb = (dbar * (b % q)) % q;
                let (r2, r1) = (m2 % q, m1 % q);
                let w = n1 as f64 * n2 as f64;
                for j in 1..=jmax {
                    let s2j = (TAU * ((r2 * j) % q) as f64 / q as f64).sin();
                    let s1j = (TAU * ((r1 * j) % q) as f64 / q as f64).sin();
                    let c = (TAU * ((rb * j) % q) as f64 / q as f64).cos();
                    acc.add(w * (s2j - s1j) / j as f64 * c);
                }
            }
        }
    }
    2.0 / std::f64::consts::PI * acc.value() * gf
}

/// The Σ(c) = Σ₀(c) − Σ₁(c) − Σ₂(c) split behind the bilinear-form step:
/// the floor bracket inside the sine is opened with the exact angle
/// subtraction identity, separating the smooth phase from the fractional
/// one.
#[derive(Debug, Clone)]
pub struct SigmaDecomposition {
    pub c: i64,
    pub sigma: f64,
    pub sigma0: f64,
    pub sigma1: f64,
    pub sigma2: f64,
}

impl SigmaDecomposition {
    pub fn identity_defect(&self) -> f64 {
        self.sigma - (self.sigma0 - self.sigma1 - self.sigma2)
    }
}

pub fn sigma_components(
    g1: &DyadicSupport,
    g2: &DyadicSupport,
    n: i64,
    a: i64,
    delta: f64,
    c: i64,
) -> SigmaDecomposition {
    assert!(c == 1 || c == 2, "c must be 1 or 2");
    assert!(a != 0, "shift must be nonzero");
    assert!(delta > 0.0 && delta < 0.5, "need 0 < delta < 1/2");
    let aa = a.abs();
    let nfloat = (n as f64).powf(1.0 - delta);
    let dq = (g1.base() * g2.base()) as f64;
    let ell_cut = dq / ((n as f64).ln() * nfloat);
    let (c1, c2) = (g1.coeff(), g2.coeff());
    let gf = 1.0 / (c1.den() as f64 * c2.den() as f64);
    let mut s = Kahan::default();
    let mut s0 = Kahan::default();
    let mut s1k = Kahan::default();
    let mut s2k = Kahan::default();
    for ell in divisors(aa) {
        if (ell as f64) > ell_cut {
            continue;
        }
        let b = aa / ell;
        let jmax = (4.0 * dq / (ell as f64 * nfloat)).floor() as i64;
        if jmax < 1 {
            continue;
        }
        let sup1 = support_multiples(c1, ell);
        if sup1.is_empty() {
            continue;
        }
        let sup2 = support_multiples(c2, ell);
        for &(d, n1) in &sup1 {
            let dd = ell * d;
            let m = c * n / dd;
            let fr = c * n % dd; // {cN/ℓd} = fr/dd
            for &(q, n2) in &sup2 {
                if gcd(d, q) != 1 {
                    continue;
                }
                let dbar = mod_inverse(d, q).expect("coprime by construction");
                let rb = (dbar * (b % q)) % q;
                let mq = m % q;
                let big_den = dd as i128 * q as i128;
                let cn = c as i128 * n as i128;
                let w = n1 as f64 * n2 as f64;
                for j in 1..=jmax {
                    let jf = j as f64;
                    let cosb = (TAU * ((rb * j) % q) as f64 / q as f64).cos();
                    let ang_floor = TAU * ((mq * j) % q) as f64 / q as f64;
                    let t0 = (cn % big_den * j as i128).rem_euclid(big_den);
                    let ang0 = TAU * t0 as f64 / big_den as f64;
                    let tf = (fr as i128 * j as i128).rem_euclid(big_den);
                    let ang_frac = TAU * tf as f64 / big_den as f64;
                    s.add(w * ang_floor.sin() / jf * cosb);
                    s0.add(w * ang0.sin() / jf * cosb);
                    s1k.add(w * (1.0 - ang_frac.cos()) * ang0.sin() / jf * cosb);
                    s2k.add(w * ang_frac.sin() / jf * ang0.cos() * cosb);
                }
            }
        }
    }
    SigmaDecomposition {
        c,
        sigma: s.value() * gf,
        sigma0: s0.value() * gf,
        sigma1: s1k.value() * gf,
        sigma2: s2k.value() * gf,
    }
}

/// Value of the bilinear Kloosterman-fraction form
/// `Σ_{d∼D} g1(d) Σ_{q∼Q, (q,d)=1} g2(q) e_q(k d̄)`.
#[derive(Debug, Clone)]
pub struct BilinearValue {
    pub re: f64,
    pub im: f64,
    /// `Σ|g1| · Σ|g2|`, the triangle-inequality ceiling.
    pub trivial_bound: f64,
}

impl BilinearValue {
    pub fn magnitude(&self) -> f64 {
        self.re.hypot(self.im)
    }
}

/// Optimized evaluation: per modulus q, all needed inverses d̄ are produced
/// by one batched inversion (prefix products and a single extended Euclid).
pub fn kloosterman_bilinear(g1: &DyadicSupport, g2: &DyadicSupport, k: i64) -> BilinearValue {
    assert!(k != 0, "frequency k must be nonzero");
    bilinear_impl(g1, g2, k, true)
}

/// Brute-force path: one extended Euclid per (d, q) pair. Same summation
/// order as the optimized path, so results agree to roundoff.
pub fn kloosterman_bilinear_bruteforce(
    g1: &DyadicSupport,
    g2: &DyadicSupport,
    k: i64,
) -> BilinearValue {
    assert!(k != 0, "frequency k must be nonzero");
    bilinear_impl(g1, g2, k, false)
}

fn bilinear_impl(g1: &DyadicSupport, g2: &DyadicSupport, k: i64, batched: bool) -> BilinearValue {
    let s1 = g1.coeff().support();
    let s2 = g2.coeff().support();
    let gf = 1.0 / (g1.coeff().den() as f64 * g2.coeff().den() as f64);
    let mut re = Kahan::default();
    let mut im = Kahan::default();
    for &(q, n2) in &s2 {
        let ds: Vec<(i64, i64)> = s1.iter().copied().filter(|&(d, _)| gcd(d, q) == 1).collect();
        if ds.is_empty() {
            continue;
        }
        let inverses = if batched {
            batch_inverses(&ds, q)
        } else {
            ds.iter()
                .map(|&(d, _)| mod_inverse(d, q).expect("coprime"))
                .collect()
        };
        let kq = k.rem_euclid(q);
        for (&(_, n1), &dbar) in ds.iter().zip(&inverses) {
            let ang = TAU * ((kq * dbar) % q) as f64 / q as f64;
            let w = n1 as f64 * n2 as f64;
            re.add(w * ang.cos());
            im.add(w * ang.sin());
        }
    }
    BilinearValue {
        re: re.value() * gf,
        im: im.value() * gf,
        trivial_bound: to_f64(&g1.coeff().abs_sum()) * to_f64(&g2.coeff().abs_sum()),
    }
}

/// Montgomery-trick batch inversion of all first components modulo q.
fn batch_inverses(ds: &[(i64, i64)], q: i64) -> Vec<i64> {
    if q == 1 {
        return vec![0; ds.len()];
    }
    let mut prefix = Vec::with_capacity(ds.len() + 1);
    prefix.push(1i64);
    for &(d, _) in ds {
        let last = *prefix.last().unwrap();
        prefix.push((last * (d % q)) % q);
    }
    let mut inv_all = mod_inverse(*prefix.last().unwrap(), q).expect("product coprime");
    let mut out = vec![0i64; ds.len()];
    for i in (0..ds.len()).rev() {
        out[i] = (prefix[i] * inv_all) % q;
        inv_all = (inv_all * (ds[i].0 % q)) % q;
    }
    out
}

/// One (D, Q) point of the bilinear magnitude survey: an ensemble of
/// coefficient pairs sharing the dyadic bases.
#[derive(Debug, Clone)]
pub struct BilinearTrialSet {
    pub pairs: Vec<(DyadicSupport, DyadicSupport)>,
}

#[derive(Debug, Clone)]
pub struct BilinearReportRow {
    pub d_base: i64,
    pub q_base: i64,
    pub mean_magnitude: f64,
    pub max_magnitude: f64,
    /// `(DQ)^{7/8} Q^{11/48}` — the published envelope, constant unknown.
    pub envelope: f64,
}

#[derive(Debug, Clone)]
pub struct BilinearReport {
    pub rows: Vec<BilinearReportRow>,
    /// Log-log slope of max |B| against DQ, when fittable.
    pub magnitude_slope: Option<f64>,
    /// Log-log slope of the envelope column against DQ.
    pub envelope_slope: Option<f64>,
}

/// Magnitudes of the bilinear form next to the theoretical envelope.
/// The envelope carries an unspecified constant, so nothing is asserted;
/// the slopes let a sweep compare growth rates.
pub fn bilinear_magnitude_report(sets: &[BilinearTrialSet], k: i64) -> BilinearReport {
    let mut rows = Vec::new();
    for set in sets {
        if set.pairs.is_empty() {
            continue;
        }
        let d_base = set.pairs[0].0.base();
        let q_base = set.pairs[0].1.base();
        let mags: Vec<f64> = set
            .pairs
            .iter()
            .map(|(a, b)| kloosterman_bilinear(a, b, k).magnitude())
            .collect();
        let mean = mags.iter().sum::<f64>() / mags.len() as f64;
        let max = mags.iter().copied().fold(0.0, f64::max);
        let dq = (d_base * q_base) as f64;
        rows.push(BilinearReportRow {
            d_base,
            q_base,
            mean_magnitude: mean,
            max_magnitude: max,
            envelope: dq.powf(7.0 / 8.0) * (q_base as f64).powf(11.0 / 48.0),
        });
    }
    let xs: Vec<f64> = rows.iter().map(|r| (r.d_base * r.q_base) as f64).collect();
    let mag_ys: Vec<f64> = rows.iter().map(|r| r.max_magnitude).collect();
    let env_ys: Vec<f64> = rows.iter().map(|r| r.envelope).collect();
    BilinearReport {
        magnitude_slope: loglog_slope(&xs, &mag_ys),
        envelope_slope: loglog_slope(&xs, &env_ys),
        rows,
    }
}

fn loglog_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(&x, &y)| x > 0.0 && y > 0.0)
        .map(|(&x, &y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let det = n * sxx - sx * sx;
    if det.abs() < 1e-12 {
        return None;
    }
    Some((n * sxy - sx * sy) / det)
}

/// Bombieri–Vinogradov-style discrepancy sum
/// `Σ_{q≤Qmax} max_{(a,q)=1} |Σ_{n≤x, n≡a(q)} f(n) − (1/φ(q)) Σ_{n≤x,(n,q)=1} f(n)|`,
/// inner sums exact.
pub fn ap_discrepancy_sum(g: &CoeffFn, x: i64, qmax: i64) -> f64 {
    assert!(x >= qmax && qmax >= 1, "need x >= Qmax >= 1");
    let f = g.sieve_segment(1, x);
    let den = BigInt::from(f.den());
    let mut total = Rat::zero();
    for q in 1..=qmax {
        let mut residue_sums = vec![0i128; q as usize];
        for n in 1..=x {
            residue_sums[(n % q) as usize] += f.num_at(n) as i128;
        }
        let phi = euler_phi(q);
        let coprime_total: i128 = (0..q)
            .filter(|&r| gcd(r.max(1), q) == 1 && (q == 1 || r != 0))
            .map(|r| residue_sums[r as usize])
            .sum();
        let coprime_total = if q == 1 { residue_sums[0] } else { coprime_total };
        let mut best: i128 = 0;
        for r in 0..q {
            if q != 1 && (r == 0 || gcd(r, q) != 1) {
                continue;
            }
            let dev = (residue_sums[r as usize] * phi as i128 - coprime_total).abs();
            best = best.max(dev);
        }
        total += Rat::new(BigInt::from(best), BigInt::from(phi) * &den);
    }
    to_f64(&total)
}
