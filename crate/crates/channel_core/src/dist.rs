use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Row sums and distribution totals must match 1 within this tolerance.
pub const STOCHASTIC_TOL: f64 = 1e-12;

fn validate_prob_vector(w: &[f64], what: &str) -> Result<()> {
    if w.is_empty() {
        return Err(Error::Invalid(format!("{what} is empty")));
    }
    if let Some(bad) = w.iter().find(|x| !x.is_finite() || **x < 0.0 || **x > 1.0) {
        return Err(Error::Invalid(format!("{what} has entry {bad} outside [0, 1]")));
    }
    let s: f64 = crate::numeric::nsum(w.iter().copied());
    if (s - 1.0).abs() > STOCHASTIC_TOL {
        return Err(Error::Invalid(format!("{what} sums to {s}")));
    }
    Ok(())
}

/// Probability vector over a finite alphabet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Distribution {
    weights: Vec<f64>,
}

impl TryFrom<Vec<f64>> for Distribution {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Distribution::new(v)
    }
}

impl From<Distribution> for Vec<f64> {
    fn from(d: Distribution) -> Self {
        d.weights
    }
}

impl Distribution {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        validate_prob_vector(&weights, "distribution")?;
        Ok(Self { weights })
    }

    /// Normalizes a nonnegative vector with positive total.
    pub fn from_unnormalized(mut weights: Vec<f64>) -> Result<Self> {
        if weights.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::Invalid("weights must be finite and nonnegative".into()));
        }
        let s: f64 = weights.iter().sum();
        if s <= 0.0 {
            return Err(Error::Invalid("weights sum to zero".into()));
        }
        for x in &mut weights {
            *x /= s;
        }
        Ok(Self { weights })
    }

    pub fn uniform(n: usize) -> Self {
        Self { weights: vec![1.0 / n as f64; n] }
    }

    pub fn point(n: usize, i: usize) -> Self {
        let mut weights = vec![0.0; n];
        weights[i] = 1.0;
        Self { weights }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.weights[i] > 0.0).collect()
    }

    /// `(1 - t) self + t other`.
    pub fn mix(&self, other: &Distribution, t: f64) -> Result<Self> {
        crate::error::check_dim(self.len(), other.len())?;
        let w = self.weights.iter().zip(&other.weights).map(|(a, b)| (1.0 - t) * a + t * b).collect();
        Self::from_unnormalized(w)
    }
}

impl Deref for Distribution {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.weights
    }
}

/// Row-stochastic matrix from an input alphabet to an output alphabet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct ConditionalChannel {
    nx: usize,
    ny: usize,
    data: Vec<f64>,
}

impl TryFrom<Vec<Vec<f64>>> for ConditionalChannel {
    type Error = Error;
    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        ConditionalChannel::new(rows)
    }
}

impl From<ConditionalChannel> for Vec<Vec<f64>> {
    fn from(v: ConditionalChannel) -> Self {
        v.rows().map(|r| r.to_vec()).collect()
    }
}

impl ConditionalChannel {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let nx = rows.len();
        if nx == 0 {
            return Err(Error::Invalid("matrix has no rows".into()));
        }
        let ny = rows[0].len();
        let mut data = Vec::with_capacity(nx * ny);
        for r in &rows {
            crate::error::check_dim(ny, r.len())?;
            data.extend_from_slice(r);
        }
        Self::from_flat(nx, ny, data)
    }

    pub fn from_flat(nx: usize, ny: usize, data: Vec<f64>) -> Result<Self> {
        crate::error::check_dim(nx * ny, data.len())?;
        if ny == 0 {
            return Err(Error::Invalid("output alphabet is empty".into()));
        }
        for (x, r) in data.chunks(ny).enumerate() {
            validate_prob_vector(r, &format!("row {x}"))?;
        }
        Ok(Self { nx, ny, data })
    }

    /// Normalizes each row of a nonnegative matrix.
    pub fn from_unnormalized_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let rows = rows.into_iter().map(|r| Distribution::from_unnormalized(r).map(Vec::from)).collect::<Result<Vec<_>>>()?;
        Self::new(rows)
    }

    /// Every row equal to `q`.
    pub fn constant(nx: usize, q: &[f64]) -> Result<Self> {
        Self::new(vec![q.to_vec(); nx])
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        Self { nx: n, ny: n, data }
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn row(&self, x: usize) -> &[f64] {
        &self.data[x * self.ny..(x + 1) * self.ny]
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[x * self.ny + y]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks(self.ny)
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.data
    }

    /// Largest absolute entrywise difference.
    pub fn max_abs_diff(&self, other: &ConditionalChannel) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

/// A discrete memoryless channel `W`. Both alphabets have at least two letters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct Channel {
    w: ConditionalChannel,
}

impl TryFrom<Vec<Vec<f64>>> for Channel {
    type Error = Error;
    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        Channel::new(rows)
    }
}

impl From<Channel> for Vec<Vec<f64>> {
    fn from(c: Channel) -> Self {
        c.w.into()
    }
}

impl Channel {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::from_conditional(ConditionalChannel::new(rows)?)
    }

    pub fn from_conditional(w: ConditionalChannel) -> Result<Self> {
        if w.nx() < 2 || w.ny() < 2 {
            return Err(Error::Invalid(format!("channel must be at least 2x2, got {}x{}", w.nx(), w.ny())));
        }
        Ok(Self { w })
    }

    pub fn as_conditional(&self) -> &ConditionalChannel {
        &self.w
    }

    /// Smallest nonzero transition probability.
    pub fn p_min(&self) -> f64 {
        self.w.as_flat().iter().copied().filter(|&v| v > 0.0).fold(1.0, f64::min)
    }

    /// Output letters reachable from `x`.
    pub fn support(&self, x: usize) -> Vec<usize> {
        (0..self.ny()).filter(|&y| self.get(x, y) > 0.0).collect()
    }

    /// Rows are permutations of each other and the columns split into
    /// classes whose submatrices have permuted rows and permuted columns.
    pub fn is_symmetric(&self) -> bool {
        let key = |v: f64| (v * 1e12).round() as i64;
        let sorted = |mut v: Vec<i64>| {
            v.sort_unstable();
            v
        };
        let col = |y: usize| sorted((0..self.nx()).map(|x| key(self.get(x, y))).collect());
        let mut classes: Vec<(Vec<i64>, Vec<usize>)> = Vec::new();
        for y in 0..self.ny() {
            let c = col(y);
            match classes.iter_mut().find(|(k, _)| *k == c) {
                Some((_, ys)) => ys.push(y),
                None => classes.push((c, vec![y])),
            }
        }
        classes.iter().all(|(_, ys)| {
            let first = sorted(ys.iter().map(|&y| key(self.get(0, y))).collect());
            (1..self.nx()).all(|x| sorted(ys.iter().map(|&y| key(self.get(x, y))).collect()) == first)
        })
    }
}

impl Deref for Channel {
    type Target = ConditionalChannel;
    fn deref(&self) -> &ConditionalChannel {
        &self.w
    }
}

impl AsRef<ConditionalChannel> for Channel {
    fn as_ref(&self) -> &ConditionalChannel {
        &self.w
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_rows() {
        assert!(ConditionalChannel::new(vec![vec![0.5, 0.6]]).is_err());
        assert!(ConditionalChannel::new(vec![vec![1.0, 0.0], vec![1.0]]).is_err());
        assert!(Channel::new(vec![vec![1.0, 0.0]]).is_err());
        assert!(Distribution::new(vec![0.5, 0.5 + 1e-9]).is_err());
        assert!(Distribution::new(vec![0.5, 0.5 + 1e-13]).is_ok());
    }

    #[test]
    fn symmetry_detection() {
        let bsc = Channel::new(vec![vec![0.75, 0.25], vec![0.25, 0.75]]).unwrap();
        assert!(bsc.is_symmetric());
        let z = Channel::new(vec![vec![0.8, 0.2], vec![0.0, 1.0]]).unwrap();
        assert!(!z.is_symmetric());
        // binary erasure channel: columns {0,1} and {e}
        let bec = Channel::new(vec![vec![0.7, 0.0, 0.3], vec![0.0, 0.7, 0.3]]).unwrap();
        assert!(bec.is_symmetric());
    }

    #[test]
    fn serde_round_trip() {
        let v = ConditionalChannel::new(vec![vec![0.3, 0.7], vec![1.0, 0.0]]).unwrap();
        let s = serde_json_like(&v);
        assert_eq!(s, vec![vec![0.3, 0.7], vec![1.0, 0.0]]);
    }

    fn serde_json_like(v: &ConditionalChannel) -> Vec<Vec<f64>> {
        v.clone().into()
    }
}
