//! Probability primitives for discrete memoryless channels.
//!
//! All information quantities are in nats. `f64::INFINITY` stands for an
//! infinite divergence or exponent; a zero weight times an infinite value is
//! taken to be zero.

pub mod capacity;
pub mod constants;
pub mod dist;
pub mod error;
pub mod info;
pub mod numeric;
pub mod presets;
pub mod tilt;
pub mod types;

pub use capacity::{capacity, capacity_with_input, Capacity};
pub use constants::{channel_constants, ChannelConstants};
pub use dist::{Channel, ConditionalChannel, Distribution};
pub use error::{Error, Result};
pub use info::{conditional_kl, entropy, kl, marginal, mutual_information, mutual_information_raw, output_marginal};
pub use types::empirical_types;

pub const INF: f64 = f64::INFINITY;
