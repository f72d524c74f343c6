//! Achievable error exponents of a two-phase errors-and-erasures scheme
//! with feedback.
//!
//! A block of `n` uses is split into a data phase of `alpha n` uses, coded
//! with a fixed-composition code of type `P` and decoded tentatively by
//! maximum mutual information, and a control phase of `(1 - alpha) n` uses in
//! which the transmitter, having learned the tentative decision through
//! feedback, confirms or denies it with an accept/reject codeword pair of
//! joint type `x`. The decoder erases when the two phases together do not
//! give enough evidence.
//!
//! [`inner_exponent`] is the error exponent at fixed `(alpha, P, x)` and
//! erasure exponent `E_x`; [`inner_envelope`] optimizes over the three.

mod envelope;
mod exponent;
mod program;

use channel_core::{capacity, constants::burnashev_d, Channel, Distribution, Error, Result};
use control_phase::ControlType;
use serde::{Deserialize, Serialize};

pub use envelope::{envelope_controls, inner_envelope, inner_envelope_is_infinite};
pub use exponent::{alpha_star, inner_exponent};

/// Which sphere-packing quantity enters the inner program.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// `cesp(., P, Q)` with a shared output marginal `Q`.
    Exact,
    /// `e_sp(., P)`; never larger than the exact value.
    Relaxed,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::Relaxed => "relaxed",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InnerQuery {
    /// Nats per channel use.
    pub rate: f64,
    /// Target erasure exponent, nats per channel use.
    pub erasure_exponent: f64,
    pub mode: Mode,
}

impl InnerQuery {
    pub fn new(rate: f64, erasure_exponent: f64, mode: Mode) -> Self {
        Self { rate, erasure_exponent, mode }
    }
}

/// Minimizer of the inner program.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InnerPoint {
    /// Rate at which the erasure constraint is charged, `R1 >= R2`.
    pub r1: f64,
    /// Rate at which the error objective is charged, `R2 >= R`.
    pub r2: f64,
    /// Erasure budget spent in the control phase.
    pub t: f64,
    /// Shared output marginal (exact mode only).
    pub q: Option<Distribution>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InnerWitness {
    pub alpha: f64,
    pub p: Distribution,
    pub x: ControlType,
    /// Absent when the trivial decoder is used or the value is infinite.
    pub point: Option<InnerPoint>,
    /// Nats per channel use; `f64::INFINITY` when the scheme is error free.
    pub value: f64,
    pub mode: Mode,
}

/// `(1 - R/C) D`, the error exponent at zero erasure exponent.
pub fn inner_zero_erasure(w: &Channel, r: f64) -> Result<f64> {
    let c = capacity(w);
    if r.is_nan() || r < 0.0 || r > c + 1e-12 {
        return Err(Error::OutOfRange(format!("rate {r} outside [0, {c}]")));
    }
    let d = burnashev_d(w);
    Ok(if r >= c { 0.0 } else { (1.0 - r / c) * d })
}
