//! Error exponents of a discrete memoryless channel at a fixed input type or
//! optimized over input types: random coding `E_r`, sphere packing `e_sp`,
//! sphere packing with a pinned output marginal, and the Haroutunian
//! exponent together with its improved (tangent-line) version.
//!
//! Every constrained divergence minimization here is solved through its
//! exponential-family minimizers with a scalar multiplier found by a
//! bracketed one-dimensional root search.

mod cesp;
mod classic;
mod family;
mod haroutunian;
mod inputs;

use channel_core::{ConditionalChannel, Distribution};
use serde::{Deserialize, Serialize};

pub use cesp::{cesp, cesp_range, CespFamily, CespRange};
pub use classic::{critical_rate, prand, random_coding_exponent, sphere_packing_exponent};
pub use family::{SpFamily, SpPoint};
pub use haroutunian::{haroutunian, haroutunian_improved, haroutunian_point, ImprovedHaroutunian};
pub use inputs::maximize_over_inputs;

/// One point of an exponent curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentCurvePoint {
    pub rate: f64,
    /// Nats per channel use; `f64::INFINITY` when the program is infeasible.
    pub value: f64,
    /// Minimizing channel, absent when the value is infinite.
    pub witness_v: Option<ConditionalChannel>,
    /// Input type the value refers to (the maximizer when optimized over P).
    pub witness_p: Distribution,
}

/// A convex nonincreasing exponent curve traced by a tilt parameter: at
/// `s` in `[0, 1]` the curve passes through `tangent(s)` with slope
/// `-s/(1-s)`. `s = 0` is the right end of the decreasing part, `s = 1` the
/// smallest rate with a finite value.
pub trait TangentCurve {
    /// `(rate, value)` of the tangent point.
    fn tangent(&self, s: f64) -> (f64, f64);
    /// Curve value at rate `r`, infinite below the smallest feasible rate.
    fn value_at(&self, r: f64) -> f64;
}
