//! The exact-identity suites behind the `identities` CLI command: a quick,
//! self-contained battery over every identity the core modules promise
//! exactly. Each suite reports pass/fail with a failure detail.

use crate::sweep::{dyadic_block, preset_by_name};
use num_traits::Zero;
use sievelab_core::arith::{b1, b1_fourier, count_b1_decomposition, count_in_ap};
use sievelab_core::corr::{decompose_correlation, open_correlation_exact, symmetrized_correlation};
use sievelab_core::integrals::{
    integral_quadrature_oracle, resummation_identity, s_sum_identity, selberg_integral,
    symmetry_integral, w_comb_identity, weight_w, weight_w_quadrature, IntegralKind,
};
use sievelab_core::rat::{rat, rint, to_f64};

pub struct SuiteResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn suite(name: &'static str, outcome: Result<(), String>) -> SuiteResult {
    match outcome {
        Ok(()) => SuiteResult {
            name,
            passed: true,
            detail: String::new(),
        },
        Err(detail) => SuiteResult {
            name,
            passed: false,
            detail,
        },
    }
}

fn opening_suite() -> Result<(), String> {
    for preset in ["unit", "moebius"] {
        let g = preset_by_name(preset, 20).map_err(|e| e.to_string())?;
        let n = 1000i64;
        let amax = 12i64;
        let f1 = g.sieve_segment(n + 1, 2 * n);
        let f2 = g.sieve_segment(n + 1 - amax, 2 * n + amax);
        for a in (-amax..=amax).filter(|&a| a != 0) {
            let open = open_correlation_exact(&g, &g, n, a).map_err(|e| e.to_string())?;
            let sym = symmetrized_correlation(&f1, &f2, n, a).map_err(|e| e.to_string())?;
            if open != sym {
                return Err(format!("{preset}, N={n}, a={a}: open {open} != {sym}"));
            }
        }
    }
    Ok(())
}

fn decomposition_suite() -> Result<(), String> {
    for (d_base, q_base) in [(8i64, 8i64), (8, 16), (16, 16)] {
        let g1 = dyadic_block("unit", d_base).map_err(|e| e.to_string())?;
        let g2 = dyadic_block("moebius", q_base).map_err(|e| e.to_string())?;
        for a in 1..=8i64 {
            let b = decompose_correlation(&g1, &g2, 2000, a).map_err(|e| e.to_string())?;
            if !b.identity_defect().is_zero() {
                return Err(format!(
                    "D={d_base}, Q={q_base}, a={a}: defect {}",
                    b.identity_defect()
                ));
            }
        }
    }
    Ok(())
}

fn b1_fourier_suite() -> Result<(), String> {
    for q in 1..=100i64 {
        for n in 0..q {
            let exact = to_f64(&b1(&rat(n, q)));
            let approx = b1_fourier(n, q);
            if (approx - exact).abs() > 1e-9 {
                return Err(format!("n={n}, q={q}: |{approx} - {exact}| > 1e-9"));
            }
        }
    }
    Ok(())
}

fn ap_count_suite() -> Result<(), String> {
    for q in [1i64, 2, 3, 7, 12, 25, 50] {
        for m1 in [-500i64, -37, 0, 41, 500] {
            for len in [0i64, 1, 17, 333] {
                let m2 = m1 + len;
                for r in [0i64, 1, q - 1] {
                    let r = r.rem_euclid(q);
                    let brute = (m1 + 1..=m2).filter(|n| n.rem_euclid(q) == r).count() as i64;
                    if count_in_ap(m1, m2, q, r) != brute {
                        return Err(format!("count({m1},{m2},{q},{r}) != {brute}"));
                    }
                    if count_b1_decomposition(m1, m2, q, r).total() != rint(brute) {
                        return Err(format!("decomposition({m1},{m2},{q},{r}) != {brute}"));
                    }
                }
            }
        }
    }
    Ok(())
}

fn integral_reduction_suite() -> Result<(), String> {
    for (p1, p2) in [("unit", "unit"), ("moebius", "moebius"), ("unit", "moebius")] {
        let g1 = preset_by_name(p1, 8).map_err(|e| e.to_string())?;
        let g2 = preset_by_name(p2, 8).map_err(|e| e.to_string())?;
        for (n, h) in [(100i64, 5i64), (300, 7)] {
            let f1 = g1.sieve_segment(n - 2 * h, 2 * n + 2 * h);
            let f2 = g2.sieve_segment(n - 2 * h, 2 * n + 2 * h);
            let j = to_f64(&selberg_integral(&f1, &f2, &g1, &g2, n, h).map_err(|e| e.to_string())?);
            let jq = integral_quadrature_oracle(&f1, &f2, &g1, &g2, n, h, 4, IntegralKind::J);
            if (j - jq).abs() > 1e-9 * (1.0 + j.abs()) {
                return Err(format!("J {p1}x{p2} N={n} h={h}: {j} vs {jq}"));
            }
            let i = to_f64(&symmetry_integral(&f1, &f2, n, h).map_err(|e| e.to_string())?);
            let iq = integral_quadrature_oracle(&f1, &f2, &g1, &g2, n, h, 4, IntegralKind::I);
            if (i - iq).abs() > 1e-9 * (1.0 + i.abs()) {
                return Err(format!("I {p1}x{p2} N={n} h={h}: {i} vs {iq}"));
            }
        }
    }
    Ok(())
}

fn weight_suite() -> Result<(), String> {
    for h in 1..=100i64 {
        for q in 1..=4 * h {
            let (lhs, rhs) = w_comb_identity(q, h);
            if rint(lhs) != rhs {
                return Err(format!("comb identity q={q} h={h}: {lhs} != {rhs}"));
            }
        }
    }
    for h in 1..=200i64 {
        for ell in 1..=h {
            let (lhs, exact) = s_sum_identity(ell, h);
            if lhs != exact {
                return Err(format!("S identity ell={ell} h={h}: {lhs} != {exact}"));
            }
        }
    }
    for h in [1i64, 7, 20] {
        for a in -(2 * h + 2)..=2 * h + 2 {
            let quad = weight_w_quadrature(a, h, 100_000);
            if (quad - weight_w(a, h) as f64).abs() > 4.0 * h as f64 * 1e-5 {
                return Err(format!("W quadrature a={a} h={h}"));
            }
        }
    }
    Ok(())
}

fn resummation_suite() -> Result<(), String> {
    for p1 in ["unit", "moebius", "moebius_squared"] {
        for p2 in ["unit", "moebius"] {
            for (d, q) in [(10i64, 10i64), (50, 100), (100, 37)] {
                let g1 = preset_by_name(p1, d).map_err(|e| e.to_string())?;
                let g2 = preset_by_name(p2, q).map_err(|e| e.to_string())?;
                let (lhs, rhs) = resummation_identity(&g1, &g2);
                if lhs != rhs {
                    return Err(format!("{p1}({d}) x {p2}({q}): {lhs} != {rhs}"));
                }
            }
        }
    }
    Ok(())
}

/// Run every suite; the CLI prints one line per entry and exits nonzero if
/// any failed.
pub fn run_all() -> Vec<SuiteResult> {
    vec![
        suite("correlation opening", opening_suite()),
        suite("exact correlation decomposition", decomposition_suite()),
        suite("B1 finite Fourier", b1_fourier_suite()),
        suite("AP count decomposition", ap_count_suite()),
        suite("integral unit-interval reduction", integral_reduction_suite()),
        suite("weight comb identities", weight_suite()),
        suite("gcd resummation", resummation_suite()),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_suites_pass() {
        for result in run_all() {
            assert!(result.passed, "{}: {}", result.name, result.detail);
        }
    }
}
