use channel_core::{Error, Result};
use rand::RngExt;
use serde::{Deserialize, Serialize};

use crate::codebook::stream;
use crate::monte_carlo::RateEstimate;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoMessageResult {
    pub n: usize,
    pub q: f64,
    pub trials: u64,
    pub errors: u64,
    pub erasure: RateEstimate,
    /// `q^floor(n/2)`.
    pub bound: f64,
}

/// Two messages over the Z channel with rows `(1-q, q)` and `(0, 1)`.
///
/// Message 0 sends the noiseless letter for the first `floor(n/2)` uses and
/// the noisy letter after; message 1 does the opposite. A received `0` can
/// only come from the noisy letter, so it identifies the message; the
/// decoder erases iff every output is `1`.
pub fn z_channel_two_message(n: usize, q: f64, trials: u64, seed: u64) -> Result<TwoMessageResult> {
    if n < 2 {
        return Err(Error::Invalid(format!("block length {n} below 2")));
    }
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::Invalid(format!("crossover {q} outside [0, 1]")));
    }
    if trials == 0 {
        return Err(Error::Invalid("at least one trial is needed".into()));
    }
    let half = n / 2;
    let mut rng = stream(seed, 0);
    let (mut erasures, mut errors) = (0u64, 0u64);
    for _ in 0..trials {
        let message = usize::from(rng.random_bool(0.5));
        let mut decoded = None;
        for t in 0..n {
            let noisy = (t < half) == (message == 1);
            // the noisy letter comes out as 0 with probability 1 - q
            if noisy && !rng.random_bool(q) {
                decoded.get_or_insert(if t < half { 1 } else { 0 });
            }
        }
        match decoded {
            None => erasures += 1,
            Some(m) if m != message => errors += 1,
            Some(_) => {}
        }
    }
    Ok(TwoMessageResult { n, q, trials, errors, erasure: RateEstimate::new(erasures, trials, n), bound: q.powi(half as i32) })
}
