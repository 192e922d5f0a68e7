//! Sweep orchestration: one record per N, in config order, identical under
//! serial and parallel execution.

use crate::config::{derived, SweepConfig};
use crate::record::{dec_text, rat_dec_text, rat_text, sci_text, RunRecord, CODE_VERSION};
use num_bigint::BigInt;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use sievelab_core::coeff::Preset;
use sievelab_core::corr::decompose_with_segments;
use sievelab_core::integrals::full_report;
use sievelab_core::rat::rint;
use sievelab_core::{CoeffFn, Rat};
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("unknown preset `{0}` (expected unit, moebius, moebius_squared, or zero)")]
    UnknownPreset(String),
}

/// Build a coefficient function from a preset id, supported on [1, bound].
pub fn preset_by_name(name: &str, bound: i64) -> Result<CoeffFn, SweepError> {
    let kind = match name.to_ascii_lowercase().as_str() {
        "unit" | "unit_divisor" | "unitdivisor" | "divisor" => Preset::UnitDivisor,
        "moebius" | "mobius" | "mu" => Preset::Moebius,
        "moebius_squared" | "moebius2" | "mu2" | "squarefree" => Preset::MoebiusSquared,
        "zero" => Preset::Custom(vec![Rat::zero(); bound as usize]),
        _ => return Err(SweepError::UnknownPreset(name.to_string())),
    };
    Ok(CoeffFn::make_preset(kind, bound).expect("preset construction within bounds"))
}

/// A preset restricted to the dyadic block `]base, 2·base]`.
pub fn dyadic_block(preset: &str, base: i64) -> Result<sievelab_core::DyadicSupport, SweepError> {
    let full = preset_by_name(preset, 2 * base)?;
    let table: Vec<Rat> = (1..=2 * base)
        .map(|d| if d > base { full.value(d) } else { Rat::zero() })
        .collect();
    let g = CoeffFn::from_table(&table, 2 * base, format!("{preset}]{base},{}]", 2 * base))
        .expect("restricted table stays within bounds");
    Ok(sievelab_core::DyadicSupport::new(base, g).expect("support restricted to the block"))
}

/// The spot-check shifts for one point: 16 values in [1, 2h], always
/// including {1, 2, h}, the rest drawn from a ChaCha stream keyed by
/// (seed, N) so the sample is fixed per point.
pub fn spot_shifts(seed: u64, n: i64, h: i64) -> Vec<i64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (n as u64).rotate_left(17));
    let mut shifts = vec![1, 2.min(2 * h), h];
    while shifts.len() < 16 {
        shifts.push(rng.gen_range(1..=2 * h));
    }
    shifts.sort_unstable();
    shifts.dedup();
    shifts
}

/// One sweep point: sieve once, compute the integral report, then the
/// exact-decomposition spot checks on the sampled shifts.
pub fn run_point(cfg: &SweepConfig, n: i64) -> Result<RunRecord, SweepError> {
    let start = Instant::now();
    let h = derived(n, cfg.theta);
    let d_cap = derived(n, cfg.lambda1);
    let q_cap = derived(n, cfg.lambda2);
    let g1 = preset_by_name(&cfg.preset1, d_cap)?;
    let g2 = preset_by_name(&cfg.preset2, q_cap)?;

    let mut failure = String::new();
    let mut spot_identity_ok = true;

    let report = match full_report(&g1, &g2, n, h, cfg.delta) {
        Ok(r) => Some(r),
        Err(e) => {
            failure = format!("integral report failed: {e}");
            None
        }
    };

    let shifts = spot_shifts(cfg.seed, n, h);
    if failure.is_empty() {
        let f1 = g1.sieve_segment(n + 1, 2 * n);
        let f2 = g2.sieve_segment((n - 2 * h).max(1), 2 * n + 2 * h);
        for &a in &shifts {
            match decompose_with_segments(&g1, &g2, &f1, &f2, n, a) {
                Ok(b) => {
                    if !b.identity_defect().is_zero() {
                        spot_identity_ok = false;
                        failure = format!("decomposition identity defect at a = {a}");
                        break;
                    }
                }
                Err(e) => {
                    spot_identity_ok = false;
                    failure = format!("decomposition failed at a = {a}: {e}");
                    break;
                }
            }
        }
    }

    let nh2 = rint(n) * rint(h) * rint(h);
    let (j_exact, i_exact, j_diff, i_diff, envelope) = match &report {
        Some(r) => (
            r.j_exact.clone(),
            r.i_exact.clone(),
            r.j_diff,
            r.i_diff,
            r.envelope,
        ),
        None => (
            Rat::from_integer(BigInt::from(0)),
            Rat::from_integer(BigInt::from(0)),
            0.0,
            0.0,
            0.0,
        ),
    };
    let j_over = &j_exact / &nh2;
    let i_over = &i_exact / &nh2;

    Ok(RunRecord {
        n,
        theta: cfg.theta,
        lambda1: cfg.lambda1,
        lambda2: cfg.lambda2,
        delta: cfg.delta,
        preset1: cfg.preset1.clone(),
        preset2: cfg.preset2.clone(),
        seed: cfg.seed,
        h,
        d_cap,
        q_cap,
        j_exact: rat_text(&j_exact),
        j_exact_dec: rat_dec_text(&j_exact),
        i_exact: rat_text(&i_exact),
        i_exact_dec: rat_dec_text(&i_exact),
        j_over_nh2: rat_text(&j_over),
        j_over_nh2_dec: rat_dec_text(&j_over),
        i_over_nh2: rat_text(&i_over),
        i_over_nh2_dec: rat_dec_text(&i_over),
        j_diff: sci_text(j_diff),
        i_diff: sci_text(i_diff),
        envelope: dec_text(envelope),
        spot_shift_count: shifts.len(),
        spot_identity_ok,
        failure,
        code_version: CODE_VERSION.to_string(),
        wall_time_ms: start.elapsed().as_millis(),
    })
}

/// Run every N in config order. Parallel execution farms points to a
/// worker pool but collects in config order, so the record sequence is
/// identical to the serial one.
pub fn run_sweep(cfg: &SweepConfig, parallel: bool) -> Result<Vec<RunRecord>, SweepError> {
    if parallel {
        cfg.n_list
            .par_iter()
            .map(|&n| run_point(cfg, n))
            .collect::<Result<Vec<_>, _>>()
    } else {
        cfg.n_list.iter().map(|&n| run_point(cfg, n)).collect()
    }
}
