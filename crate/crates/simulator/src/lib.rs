//! Monte Carlo simulation of the two-phase errors-and-erasures scheme.
//!
//! A random fixed-composition codebook carries the message for `n1` uses;
//! the receiver picks the codeword of largest empirical mutual information
//! and feeds it back. For the remaining `n - n1` uses the transmitter sends
//! an accept codeword if that decision is right and a reject codeword if
//! not. The receiver keeps its decision only if it dominates every other
//! message under the pairwise rule in [`dominates`], and erases otherwise.
//!
//! Trial `i` draws from its own ChaCha stream, so results do not depend on
//! the number of worker threads.

mod codebook;
mod config;
mod decoder;
mod monte_carlo;
mod two_message;

pub use codebook::{build_codebook, Codebook, Symbol};
pub use config::{delta, delta_prime, largest_remainder, ChannelSpec, Code, CodeConfig, Diagnostics};
pub use decoder::{dominates, run_trial, tentative_decision, Observation, Outcome, RuleParams, Simulator, TrialRecord, Triplet};
pub use monte_carlo::{run_monte_carlo, simulate, trial_records, RateEstimate, SimResult, CONFIDENCE};
pub use two_message::{z_channel_two_message, TwoMessageResult};

/// RNG stream `index` of `seed`; stream 0 draws the codebook and trial `i`
/// uses stream `i + 1`.
pub fn rng_stream(seed: u64, index: u64) -> rand_chacha::ChaCha8Rng {
    codebook::stream(seed, index)
}
