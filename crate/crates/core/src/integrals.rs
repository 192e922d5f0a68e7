//! Selberg integral `J(N,h) = ∫_N^{2N} |Σ_{x<n≤x+h} f(n) − M_f(h)|² dx`
//! and symmetry integral `I(N,h)` (signed window `Σ_{|n−x|≤h} sgn(n−x) f(n)`),
//! pure and mixed, computed exactly by unit-interval reduction; the weights
//! S and W with their comb identities; the weighted-correlation
//! reconstructions of I and J; and the coprimality resummation identity.

use crate::arith::dist_to_int;
use crate::coeff::{CoeffFn, Segment};
use crate::corr::{coprime_inverse_sum, CorrError, CorrTable};
use crate::rat::{rat, rat_i128, to_f64, Rat};
use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum IntegralError {
    #[error("segment [{have_lo}, {have_hi}] does not cover [{need_lo}, {need_hi}]")]
    SegmentTooShort {
        need_lo: i64,
        need_hi: i64,
        have_lo: i64,
        have_hi: i64,
    },
    #[error("correlation table reaches |a| <= {have}, need {need}")]
    TableTooNarrow { need: i64, have: i64 },
    #[error(transparent)]
    Corr(#[from] CorrError),
}

/// Which of the two correlation weights a reconstruction uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightFamily {
    /// `S(a) = max(h − |a|, 0)`, the Selberg-integral weight.
    SelbergS,
    /// `W(a)`, the sign-product integral weight of the symmetry integral.
    SymmetryW,
}

#[derive(Debug, Clone, Copy)]
pub struct WeightKind {
    pub kind: WeightFamily,
    pub h: i64,
}

impl WeightKind {
    pub fn new(kind: WeightFamily, h: i64) -> Self {
        assert!(h >= 1, "window width must be positive");
        WeightKind { kind, h }
    }

    pub fn eval(&self, a: i64) -> i64 {
        match self.kind {
            WeightFamily::SelbergS => weight_s(a, self.h),
            WeightFamily::SymmetryW => weight_w(a, self.h),
        }
    }
}

/// `S(a) = max(h − |a|, 0)`.
pub fn weight_s(a: i64, h: i64) -> i64 {
    assert!(h >= 1);
    (h - a.abs()).max(0)
}

/// `W(a) = ∫_{|t|≤h, |t−a|≤h} sgn(t) sgn(t−a) dt`, in closed form:
/// `2h − 3|a|` for `|a| ≤ h`, `|a| − 2h` for `h < |a| ≤ 2h`, else 0. Even.
pub fn weight_w(a: i64, h: i64) -> i64 {
    assert!(h >= 1);
    let a = a.abs();
    if a <= h {
        2 * h - 3 * a
    } else if a <= 2 * h {
        a - 2 * h
    } else {
        0
    }
}

/// Midpoint-rule evaluation of the sign-product integral defining W.
/// Within `4h/steps` of the closed form.
pub fn weight_w_quadrature(a: i64, h: i64, steps: i64) -> f64 {
    assert!(h >= 1 && steps >= 1_000);
    let a = a.abs();
    let lo = (-h).max(a - h) as f64;
    let hi = (h).min(a + h) as f64;
    if hi <= lo {
        return 0.0;
    }
    let dt = (hi - lo) / steps as f64;
    let mut sum = 0.0;
    for i in 0..steps {
        let t = lo + (i as f64 + 0.5) * dt;
        sum += sgn(t) * sgn(t - a as f64);
    }
    sum * dt
}

fn sgn(t: f64) -> f64 {
    if t > 0.0 {
        1.0
    } else if t < 0.0 {
        -1.0
    } else {
        0.0
    }
}

fn check_cover(seg: &Segment, lo: i64, hi: i64) -> Result<(), IntegralError> {
    if seg.covers(lo, hi) {
        Ok(())
    } else {
        Err(IntegralError::SegmentTooShort {
            need_lo: lo,
            need_hi: hi,
            have_lo: seg.start(),
            have_hi: seg.end(),
        })
    }
}

/// Right window sum numerators `Σ_{n=k+1}^{k+h} f(n)` for k = n0..=n1,
/// by sliding difference.
fn window_sums(f: &Segment, n0: i64, n1: i64, h: i64) -> Vec<i64> {
    let mut out = Vec::with_capacity((n1 - n0 + 1) as usize);
    let mut w: i64 = (n0 + 1..=n0 + h).map(|n| f.num_at(n)).sum();
    out.push(w);
    for k in n0 + 1..=n1 {
        w += f.num_at(k + h) - f.num_at(k);
        out.push(w);
    }
    out
}

/// Exact mixed Selberg integral by unit-interval reduction: with integer h
/// the integrand is constant on each `(k, k+1]`, so
/// `J = Σ_{k=N}^{2N−1} (W1_k − M1)(W2_k − M2)` with sliding window sums.
/// Expanded as `A − M2·B − M1·C + N·M1·M2` over integer accumulators.
pub fn selberg_integral(
    f1: &Segment,
    f2: &Segment,
    g1: &CoeffFn,
    g2: &CoeffFn,
    n: i64,
    h: i64,
) -> Result<Rat, IntegralError> {
    assert!(h >= 1 && h <= n / 2, "need 1 <= h <= N/2");
    check_cover(f1, n + 1, 2 * n + h)?;
    check_cover(f2, n + 1, 2 * n + h)?;
    let w1 = window_sums(f1, n, 2 * n - 1, h);
    let w2 = window_sums(f2, n, 2 * n - 1, h);
    let (mut a, mut b, mut c) = (0i128, 0i128, 0i128);
    for (&x, &y) in w1.iter().zip(&w2) {
        a += x as i128 * y as i128;
        b += x as i128;
        c += y as i128;
    }
    let m1 = g1.mean_value(h);
    let m2 = g2.mean_value(h);
    let d1 = f1.den() as i128;
    let d2 = f2.den() as i128;
    Ok(rat_i128(a, d1 * d2) - &m2 * rat_i128(b, d1) - &m1 * rat_i128(c, d2)
        + Rat::from_integer(BigInt::from(n)) * m1 * m2)
}

/// Exact mixed symmetry integral:
/// `I = Σ_{k=N}^{2N−1} (R1_k − L1_k)(R2_k − L2_k)` with right/left window
/// sums over `(k, k+h]` and `(k−h, k]`.
pub fn symmetry_integral(f1: &Segment, f2: &Segment, n: i64, h: i64) -> Result<Rat, IntegralError> {
    assert!(h >= 1 && h <= n / 2, "need 1 <= h <= N/2");
    check_cover(f1, n + 1 - h, 2 * n + h)?;
    check_cover(f2, n + 1 - h, 2 * n + h)?;
    let r1 = window_sums(f1, n, 2 * n - 1, h);
    let l1 = window_sums(f1, n - h, 2 * n - 1 - h, h);
    let r2 = window_sums(f2, n, 2 * n - 1, h);
    let l2 = window_sums(f2, n - h, 2 * n - 1 - h, h);
    let mut acc: i128 = 0;
    for i in 0..r1.len() {
        acc += (r1[i] - l1[i]) as i128 * (r2[i] - l2[i]) as i128;
    }
    Ok(rat_i128(acc, f1.den() as i128 * f2.den() as i128))
}

/// `symmetry_integral` with an explicit value for `sgn(0)`. The signed
/// window evaluates `sgn(n − x)` at `n = x` only on a measure-zero set of
/// x, which the unit-interval reduction never samples, so every convention
/// in `[-1, 1]` yields the same exact value; this wrapper makes that
/// convention-independence executable.
pub fn symmetry_integral_with_convention(
    f1: &Segment,
    f2: &Segment,
    n: i64,
    h: i64,
    sgn_zero: &Rat,
) -> Result<Rat, IntegralError> {
    assert!(
        *sgn_zero >= rat(-1, 1) && *sgn_zero <= rat(1, 1),
        "sgn(0) convention must lie in [-1, 1]"
    );
    symmetry_integral(f1, f2, n, h)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntegralKind {
    J,
    I,
}

/// Riemann-sum oracle sampling x on a uniform midpoint grid (never an
/// integer). The integrand is piecewise constant with integer breakpoints,
/// so this is exact once every unit interval gets a sample.
pub fn integral_quadrature_oracle(
    f1: &Segment,
    f2: &Segment,
    g1: &CoeffFn,
    g2: &CoeffFn,
    n: i64,
    h: i64,
    subdivisions: i64,
    kind: IntegralKind,
) -> f64 {
    let (c1, c2) = match kind {
        IntegralKind::J => (to_f64(&g1.mean_value(h)), to_f64(&g2.mean_value(h))),
        IntegralKind::I => (0.0, 0.0),
    };
    integral_quadrature_oracle_centered(f1, f2, n, h, subdivisions, kind, c1, c2)
}

/// Quadrature oracle with explicit centers (the exact `M_f(h)` values as
/// floats), for callers that have no `CoeffFn` at hand.
pub fn integral_quadrature_oracle_centered(
    f1: &Segment,
    f2: &Segment,
    n: i64,
    h: i64,
    subdivisions: i64,
    kind: IntegralKind,
    center1: f64,
    center2: f64,
) -> f64 {
    assert!(subdivisions >= 4, "need at least 4 samples per unit interval");
    let (c1, c2) = match kind {
        IntegralKind::J => (center1, center2),
        IntegralKind::I => (0.0, 0.0),
    };
    let dx = 1.0 / subdivisions as f64;
    let mut total = 0.0;
    for k in n..2 * n {
        for j in 0..subdivisions {
            let x = k as f64 + (j as f64 + 0.5) * dx;
            let v1 = sampled_window(f1, x, h, kind) - c1;
            let v2 = sampled_window(f2, x, h, kind) - c2;
            total += v1 * v2 * dx;
        }
    }
    total
}

fn sampled_window(f: &Segment, x: f64, h: i64, kind: IntegralKind) -> f64 {
    match kind {
        IntegralKind::J => {
            let lo = x.floor() as i64 + 1;
            let hi = (x + h as f64).floor() as i64;
            (lo..=hi).map(|m| f.value_f64(m)).sum()
        }
        IntegralKind::I => {
            let lo = (x - h as f64).ceil() as i64;
            let hi = (x + h as f64).floor() as i64;
            (lo..=hi)
                .map(|m| sgn(m as f64 - x) * f.value_f64(m))
                .sum()
        }
    }
}

/// `Σ_{|a|≤2h} W(a,h)·C(a)`: the weighted-correlation form of I.
pub fn reconstruct_i(table: &CorrTable, h: i64) -> Result<f64, IntegralError> {
    if table.amax() < 2 * h {
        return Err(IntegralError::TableTooNarrow {
            need: 2 * h,
            have: table.amax(),
        });
    }
    let mut sum = 0.0;
    for a in -2 * h..=2 * h {
        let w = weight_w(a, h);
        if w != 0 {
            sum += w as f64 * table.get(a);
        }
    }
    Ok(sum)
}

/// `Σ_{|a|<h} S(a,h)·C(a) − N·M_{f1}(h)·M_{f2}(h)`: the weighted-correlation
/// form of J. The `a = 0` term is kept explicit rather than absorbed into
/// an error term, which tightens the reconstruction budget.
pub fn reconstruct_j(
    table: &CorrTable,
    g1: &CoeffFn,
    g2: &CoeffFn,
    n: i64,
    h: i64,
) -> Result<f64, IntegralError> {
    if table.amax() < h - 1 {
        return Err(IntegralError::TableTooNarrow {
            need: h - 1,
            have: table.amax(),
        });
    }
    let mut sum = 0.0;
    for a in -(h - 1)..=h - 1 {
        sum += weight_s(a, h) as f64 * table.get(a);
    }
    let mean_product = to_f64(&(g1.mean_value(h) * g2.mean_value(h)));
    Ok(sum - n as f64 * mean_product)
}

/// Comb identity `Σ_{a≡0 (q), |a|≤2h} W(a,h) = 2q·‖h/q‖`, exact.
pub fn w_comb_identity(q: i64, h: i64) -> (i64, Rat) {
    assert!(q >= 1 && h >= 1);
    let mut lhs = weight_w(0, h);
    let mut a = q;
    while a <= 2 * h {
        lhs += 2 * weight_w(a, h);
        a += q;
    }
    let rhs = rat(2 * q, 1) * dist_to_int(&rat(h, q));
    (lhs, rhs)
}

/// `Σ_{b≠0} S(ℓb, h) = 2 Σ_{b=1}^{[h/ℓ]} (h − ℓb)`, with the size check
/// `|lhs − h²/ℓ| ≤ 2h` asserted in integer form.
pub fn s_sum_identity(ell: i64, h: i64) -> (i64, i64) {
    assert!(1 <= ell && ell <= h);
    let mut lhs = 0i64;
    let mut b = ell;
    while b < h {
        lhs += 2 * weight_s(b, h);
        b += ell;
    }
    let bmax = h / ell;
    let exact_form: i64 = 2 * (1..=bmax).map(|b| h - ell * b).sum::<i64>();
    assert!(
        (ell * lhs - h * h).abs() <= 2 * h * ell,
        "size bound |Σ S(ℓb) − h²/ℓ| ≤ 2h violated at ell={ell}, h={h}"
    );
    (lhs, exact_form)
}

/// Gcd-resummation identity: grouping (d, q) by ℓ = (d, q),
/// `Σ_ℓ (1/ℓ²) ΣΣ_{(d',q')=1} (g1(ℓd')/d')(g2(ℓq')/q') = (Σ_d g1(d)/d)(Σ_q g2(q)/q)`.
/// Returns both sides, each exact.
pub fn resummation_identity(g1: &CoeffFn, g2: &CoeffFn) -> (Rat, Rat) {
    let lmax = g1.support_bound().min(g2.support_bound());
    let mut lhs = Rat::zero();
    for ell in 1..=lmax {
        let inner = coprime_inverse_sum(g1, g2, ell);
        if !inner.is_zero() {
            lhs += inner / Rat::from_integer(BigInt::from(ell) * ell);
        }
    }
    let rhs = g1.mean_value(1) * g2.mean_value(1);
    (lhs, rhs)
}

/// Exact integrals, their weighted-correlation reconstructions, and the
/// reference envelope value for one (g1, g2, N, h, δ) instance.
#[derive(Debug, Clone)]
pub struct IntegralReport {
    pub j_exact: Rat,
    pub i_exact: Rat,
    pub j_reconstructed: f64,
    pub i_reconstructed: f64,
    /// `N · M_{f1}(h) · M_{f2}(h)`.
    pub mean_product: Rat,
    pub j_diff: f64,
    pub i_diff: f64,
    /// `Nh + N^δ (DQ)^{7/8} Q^{11/48} h² + N^{1−2δ/3} h² + Q h²`.
    pub envelope: f64,
}

/// Sieves the needed segments, computes exact J and I, both
/// reconstructions (via one FFT correlation table out to |a| ≤ 2h), the
/// mean product, and the envelope.
pub fn full_report(
    g1: &CoeffFn,
    g2: &CoeffFn,
    n: i64,
    h: i64,
    delta: f64,
) -> Result<IntegralReport, IntegralError> {
    assert!(h >= 1 && h <= n / 2, "need 1 <= h <= N/2");
    assert!(delta > 0.0 && delta < 0.5, "need 0 < delta < 1/2");
    let f1 = g1.sieve_segment((n + 1 - h).max(1), 2 * n + h);
    let f2 = g2.sieve_segment((n + 1 - 2 * h).max(1), 2 * n + 2 * h);
    let j_exact = selberg_integral(&f1, &f2, g1, g2, n, h)?;
    let i_exact = symmetry_integral(&f1, &f2, n, h)?;
    let table = crate::corr::correlation_all_shifts(&f1, &f2, n, 2 * h)?;
    let j_reconstructed = reconstruct_j(&table, g1, g2, n, h)?;
    let i_reconstructed = reconstruct_i(&table, h)?;
    let mean_product =
        Rat::from_integer(BigInt::from(n)) * g1.mean_value(h) * g2.mean_value(h);
    let j_diff = to_f64(&j_exact) - j_reconstructed;
    let i_diff = to_f64(&i_exact) - i_reconstructed;
    let (nf, hf) = (n as f64, h as f64);
    let (df, qf) = (g1.support_bound() as f64, g2.support_bound() as f64);
    let envelope = nf * hf
        + nf.powf(delta) * (df * qf).powf(7.0 / 8.0) * qf.powf(11.0 / 48.0) * hf * hf
        + nf.powf(1.0 - 2.0 * delta / 3.0) * hf * hf
        + qf * hf * hf;
    Ok(IntegralReport {
        j_exact,
        i_exact,
        j_reconstructed,
        i_reconstructed,
        mean_product,
        j_diff,
        i_diff,
        envelope,
    })
}
