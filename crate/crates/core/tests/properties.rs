//! Property tests for the exact identities: randomized instances of every
//! structural invariant the unit suites pin down on hand examples.

use num_bigint::BigInt;
use num_traits::Zero;
use proptest::prelude::*;
use sievelab_core::arith::{
    b1, count_b1_decomposition, count_in_ap, gcd, mod_inverse, moebius_table,
};
use sievelab_core::corr::{
    correlation_all_shifts, correlation_direct, decompose_correlation_general,
    kloosterman_bilinear, kloosterman_bilinear_bruteforce, open_correlation_exact,
    symmetrized_correlation,
};
use sievelab_core::integrals::{
    integral_quadrature_oracle, resummation_identity, s_sum_identity, selberg_integral,
    symmetry_integral, w_comb_identity, IntegralKind,
};
use sievelab_core::rat::{rat, rint, to_f64, Rat};
use sievelab_core::{CoeffFn, DyadicSupport, Preset};

fn preset_fn(which: u8, bound: i64) -> CoeffFn {
    match which % 3 {
        0 => CoeffFn::make_preset(Preset::UnitDivisor, bound).unwrap(),
        1 => CoeffFn::make_preset(Preset::Moebius, bound).unwrap(),
        _ => CoeffFn::make_preset(Preset::MoebiusSquared, bound).unwrap(),
    }
}

fn dyadic_block(which: u8, base: i64) -> DyadicSupport {
    let full = preset_fn(which, 2 * base);
    let table: Vec<Rat> = (1..=2 * base)
        .map(|d| {
            if d > base {
                full.value(d)
            } else {
                Rat::zero()
            }
        })
        .collect();
    let g = CoeffFn::from_table(&table, 2 * base, format!("block{which}({base})")).unwrap();
    DyadicSupport::new(base, g).unwrap()
}

proptest! {
    #[test]
    fn b1_is_periodic_and_odd(num in -200i64..200, den in 1i64..40, k in -5i64..5) {
        let x = rat(num, den);
        let shifted = &x + rint(k);
        prop_assert_eq!(b1(&shifted), b1(&x));
        // Odd away from the jump set: B1(-x) = -B1(x) when x is not an integer.
        if (&x - x.floor()).is_zero() {
            prop_assert!(b1(&x).is_zero());
        } else {
            prop_assert_eq!(b1(&(-&x)), -b1(&x));
        }
    }

    #[test]
    fn ap_count_decomposition_totals(m1 in 0i64..500, len in 0i64..300, q in 1i64..60, r in 0i64..60) {
        let r = r % q;
        let m2 = m1 + len;
        let d = count_b1_decomposition(m1, m2, q, r);
        let brute = (m1 + 1..=m2).filter(|n| n.rem_euclid(q) == r).count() as i64;
        prop_assert_eq!(count_in_ap(m1, m2, q, r), brute);
        prop_assert_eq!(d.total(), rint(brute));
    }

    #[test]
    fn mod_inverse_is_inverse(d in 1i64..100_000, q in 1i64..500) {
        prop_assume!(gcd(d, q) == 1);
        let inv = mod_inverse(d, q).unwrap();
        prop_assert_eq!((inv * (d % q)).rem_euclid(q), 1 % q);
        prop_assert!((0..q.max(1)).contains(&inv) || q == 1);
    }

    #[test]
    fn moebius_squarefree_support(n in 2i64..2000) {
        let mu = moebius_table(n).unwrap();
        for p in [4i64, 9, 25, 49] {
            let mut m = p;
            while m <= n {
                prop_assert_eq!(mu[m as usize], 0);
                m += p;
            }
        }
    }

    #[test]
    fn sieve_matches_pointwise_oracle(which in 0u8..3, bound in 1i64..40, start in 1i64..500, len in 0i64..80) {
        let g = preset_fn(which, bound);
        let f = g.sieve_segment(start, start + len);
        for n in start..=start + len {
            prop_assert_eq!(f.value(n), g.f_at(n));
        }
    }

    #[test]
    fn open_form_equals_symmetrized(which1 in 0u8..3, which2 in 0u8..3,
                                    b1 in 1i64..12, b2 in 1i64..12,
                                    n in 30i64..300, a in 1i64..24) {
        prop_assume!(a < n);
        let g1 = preset_fn(which1, b1);
        let g2 = preset_fn(which2, b2);
        let f1 = g1.sieve_segment(n + 1, 2 * n);
        let f2 = g2.sieve_segment((n + 1 - a).max(1), 2 * n + a);
        let sym = symmetrized_correlation(&f1, &f2, n, a).unwrap();
        prop_assert_eq!(open_correlation_exact(&g1, &g2, n, a).unwrap(), sym);
    }

    #[test]
    fn decomposition_identity_random(which1 in 0u8..3, which2 in 0u8..3,
                                     b1 in 1i64..16, b2 in 1i64..16,
                                     n in 40i64..400, a in -20i64..20) {
        prop_assume!(a != 0);
        let g1 = preset_fn(which1, b1);
        let g2 = preset_fn(which2, b2);
        let br = decompose_correlation_general(&g1, &g2, n, a).unwrap();
        prop_assert_eq!(br.identity_defect(), rint(0));
        prop_assert_eq!(&br.symmetrized - &br.smooth_main, br.exact_residual);
    }

    #[test]
    fn fft_matches_direct(which1 in 0u8..3, which2 in 0u8..3, n in 32i64..256, amax in 1i64..16) {
        let g1 = preset_fn(which1, 7);
        let g2 = preset_fn(which2, 9);
        let f1 = g1.sieve_segment(n + 1, 2 * n);
        let f2 = g2.sieve_segment((n + 1 - amax).max(1), 2 * n + amax);
        let table = correlation_all_shifts(&f1, &f2, n, amax).unwrap();
        for a in [-amax, -1, 1, amax] {
            if a.abs() < n {
                let exact = to_f64(&correlation_direct(&f1, &f2, n, a).unwrap());
                prop_assert!((table.get(a) - exact).abs() <= 1e-6 * (1.0 + exact.abs()));
            }
        }
    }

    #[test]
    fn bilinear_paths_agree_and_obey_trivial_bound(
        which1 in 0u8..3, which2 in 0u8..3, base1 in 1i64..32, base2 in 1i64..32, k in prop::sample::select(vec![-7i64, -1, 1, 2, 13])
    ) {
        let g1 = dyadic_block(which1, base1);
        let g2 = dyadic_block(which2, base2);
        let fast = kloosterman_bilinear(&g1, &g2, k);
        let slow = kloosterman_bilinear_bruteforce(&g1, &g2, k);
        prop_assert!((fast.re - slow.re).abs() < 1e-9);
        prop_assert!((fast.im - slow.im).abs() < 1e-9);
        prop_assert!(fast.magnitude() <= fast.trivial_bound * (1.0 + 1e-9) + 1e-12);
    }

    #[test]
    fn comb_identity_random(q in 1i64..800, h in 1i64..200) {
        prop_assume!(q <= 4 * h);
        let (lhs, rhs) = w_comb_identity(q, h);
        prop_assert_eq!(rint(lhs), rhs);
    }

    #[test]
    fn s_sum_identity_random(ell in 1i64..500, h in 1i64..500) {
        prop_assume!(ell <= h);
        let (lhs, exact_form) = s_sum_identity(ell, h);
        prop_assert_eq!(lhs, exact_form);
    }

    #[test]
    fn resummation_random(which1 in 0u8..3, which2 in 0u8..3, b1 in 1i64..60, b2 in 1i64..60) {
        let g1 = preset_fn(which1, b1);
        let g2 = preset_fn(which2, b2);
        let (lhs, rhs) = resummation_identity(&g1, &g2);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn integrals_match_quadrature(which1 in 0u8..3, which2 in 0u8..3, n in 20i64..120, h in 1i64..10) {
        prop_assume!(h <= n / 2);
        let g1 = preset_fn(which1, 6);
        let g2 = preset_fn(which2, 5);
        let f1 = g1.sieve_segment((n - 2 * h).max(1), 2 * n + 2 * h);
        let f2 = g2.sieve_segment((n - 2 * h).max(1), 2 * n + 2 * h);
        let j = to_f64(&selberg_integral(&f1, &f2, &g1, &g2, n, h).unwrap());
        let jq = integral_quadrature_oracle(&f1, &f2, &g1, &g2, n, h, 4, IntegralKind::J);
        prop_assert!((j - jq).abs() <= 1e-9 * (1.0 + j.abs()));
        let i = to_f64(&symmetry_integral(&f1, &f2, n, h).unwrap());
        let iq = integral_quadrature_oracle(&f1, &f2, &g1, &g2, n, h, 4, IntegralKind::I);
        prop_assert!((i - iq).abs() <= 1e-9 * (1.0 + i.abs()));
    }

    #[test]
    fn pure_integrals_are_nonnegative(which in 0u8..3, n in 20i64..200, h in 1i64..10) {
        prop_assume!(h <= n / 2);
        let g = preset_fn(which, 8);
        let f = g.sieve_segment((n - 2 * h).max(1), 2 * n + 2 * h);
        let j = selberg_integral(&f, &f, &g, &g, n, h).unwrap();
        prop_assert!(j >= Rat::from_integer(BigInt::from(0)));
        let i = symmetry_integral(&f, &f, n, h).unwrap();
        prop_assert!(i >= Rat::from_integer(BigInt::from(0)));
    }
}
