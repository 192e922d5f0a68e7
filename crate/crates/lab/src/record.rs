//! One sweep point's results. Exact rationals are carried as `num/den`
//! text plus a fixed 6-place decimal rendering, so CSV output is
//! byte-stable across runs and machines. Wall time is kept on the struct
//! for logging but never serialized: records must be byte-identical for
//! identical (config, seed).

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use sievelab_core::Rat;
use std::str::FromStr;

pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunRecord {
    pub n: i64,
    pub theta: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub delta: f64,
    pub preset1: String,
    pub preset2: String,
    pub seed: u64,
    pub h: i64,
    pub d_cap: i64,
    pub q_cap: i64,
    pub j_exact: String,
    pub j_exact_dec: String,
    pub i_exact: String,
    pub i_exact_dec: String,
    pub j_over_nh2: String,
    pub j_over_nh2_dec: String,
    pub i_over_nh2: String,
    pub i_over_nh2_dec: String,
    pub j_diff: String,
    pub i_diff: String,
    pub envelope: String,
    pub spot_shift_count: usize,
    pub spot_identity_ok: bool,
    pub failure: String,
    pub code_version: String,
    #[serde(skip)]
    pub wall_time_ms: u128,
}

impl PartialEq for RunRecord {
    /// Timing is observational, not part of the record's identity.
    fn eq(&self, other: &Self) -> bool {
        let a = serde_json::to_string(self).expect("record serializes");
        let b = serde_json::to_string(other).expect("record serializes");
        a == b
    }
}

/// Exact `num/den` rendering (`-1/3`, `7`, `0`).
pub fn rat_text(x: &Rat) -> String {
    let r = x.reduced();
    if r.denom() == &BigInt::from(1) {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Fixed 6-place decimal rendering, the format contract for CSV columns.
pub fn dec_text(x: f64) -> String {
    format!("{x:.6}")
}

/// Scientific rendering for small-magnitude report columns (diffs).
pub fn sci_text(x: f64) -> String {
    format!("{x:.6e}")
}

pub fn rat_dec_text(x: &Rat) -> String {
    dec_text(x.to_f64().expect("rational within f64 range"))
}

/// Parse a `num/den` field back to a rational.
pub fn parse_rat_text(s: &str) -> Option<Rat> {
    match s.split_once('/') {
        Some((n, d)) => Some(Rat::new(
            BigInt::from_str(n.trim()).ok()?,
            BigInt::from_str(d.trim()).ok()?,
        )),
        None => Some(Rat::from_integer(BigInt::from_str(s.trim()).ok()?)),
    }
}
