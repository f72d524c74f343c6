//! Empirical types of sequences.

use crate::dist::{ConditionalChannel, Distribution};
use crate::error::{Error, Result};

/// Type of `x` and conditional type of `y` given `x`.
///
/// Rows of input letters that never occur in `x` are filled uniformly so the
/// result is always a valid stochastic matrix; they carry zero weight.
pub fn empirical_types(x: &[usize], y: &[usize], nx: usize, ny: usize) -> Result<(Distribution, ConditionalChannel)> {
    if x.is_empty() {
        return Err(Error::Invalid("empty sequences".into()));
    }
    crate::error::check_dim(x.len(), y.len())?;
    let mut joint = vec![0usize; nx * ny];
    let mut counts = vec![0usize; nx];
    for (&a, &b) in x.iter().zip(y) {
        if a >= nx || b >= ny {
            return Err(Error::Invalid(format!("symbol ({a}, {b}) outside the {nx}x{ny} alphabet")));
        }
        joint[a * ny + b] += 1;
        counts[a] += 1;
    }
    let n = x.len() as f64;
    let p = Distribution::from_unnormalized(counts.iter().map(|&c| c as f64 / n).collect())?;
    let mut data = vec![1.0 / ny as f64; nx * ny];
    for a in 0..nx {
        if counts[a] > 0 {
            for b in 0..ny {
                data[a * ny + b] = joint[a * ny + b] as f64 / counts[a] as f64;
            }
        }
    }
    Ok((p, ConditionalChannel::from_flat(nx, ny, data)?))
}
