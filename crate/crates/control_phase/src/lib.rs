//! Control-phase machinery: the two-message exponent tradeoff `F(T, x)`,
//! its maximum `E2(T)` over joint input types, the fixed point `T*`, and the
//! overlap profile `beta(s)` that bounds erasures of error-free codes.
//!
//! A control phase sends one of two codewords, "accept" or "reject", whose
//! joint composition is a [`ControlType`] on `X x X`. Under accept the output
//! follows `W_a(y|x1, x2) = W(y|x1)`, under reject `W_r(y|x1, x2) = W(y|x2)`.

mod beta;
mod tradeoff;
mod types;

pub use beta::{beta, beta_profile, beta_sup, BetaSup};
pub use tradeoff::{e2bar, e2bar_with_pair, f_exponent, t_star, tilted_divergences, tilted_pair, tilted_q, TiltedPair};
pub use types::{ControlConditional, ControlType};
