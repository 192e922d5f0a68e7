//! Computational laboratory for sieve functions `f = g ∗ 1` with `g`
//! supported on `[1, Q]`: exact correlations and their main-term /
//! Bernoulli-remainder decomposition, Selberg and symmetry integrals,
//! weight identities, and Kloosterman-fraction bilinear forms.
//!
//! Everything identity-shaped is computed in exact rational arithmetic;
//! trigonometric sums and large correlation tables use f64 with fixed
//! summation order so results reproduce bit-for-bit.

pub mod arith;
pub mod coeff;
pub mod corr;
pub mod integrals;
pub mod rat;

pub use coeff::{CoeffFn, DyadicSupport, Preset, Segment};
pub use rat::Rat;
