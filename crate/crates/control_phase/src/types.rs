use channel_core::{Distribution, Error, Result};
use serde::{Deserialize, Serialize};

/// Joint type of the accept/reject codeword pair, stored row-major on `X x X`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlType {
    nx: usize,
    weights: Vec<f64>,
}

impl ControlType {
    pub fn new(nx: usize, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != nx * nx {
            return Err(Error::Dimension { expected: nx * nx, got: weights.len() });
        }
        Distribution::new(weights.clone())?;
        Ok(Self { nx, weights })
    }

    /// All weight on the pair `(a, b)`.
    pub fn point(nx: usize, a: usize, b: usize) -> Self {
        let mut weights = vec![0.0; nx * nx];
        weights[a * nx + b] = 1.0;
        Self { nx, weights }
    }

    /// `x_P(a, b) = P(a) P(b) 1{a != b} / (1 - sum P^2)`: independent letters
    /// conditioned on being different.
    pub fn product(p: &Distribution) -> Result<Self> {
        let nx = p.len();
        let mut weights = vec![0.0; nx * nx];
        for a in 0..nx {
            for b in 0..nx {
                if a != b {
                    weights[a * nx + b] = p[a] * p[b];
                }
            }
        }
        let z: f64 = weights.iter().sum();
        if z <= 0.0 {
            return Err(Error::Invalid("product control type needs at least two letters in supp P".into()));
        }
        weights.iter_mut().for_each(|w| *w /= z);
        Ok(Self { nx, weights })
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn weight(&self, a: usize, b: usize) -> f64 {
        self.weights[a * self.nx + b]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Pairs with positive weight as `(a, b, weight)`.
    pub fn pairs(&self) -> Vec<(usize, usize, f64)> {
        (0..self.nx)
            .flat_map(|a| (0..self.nx).map(move |b| (a, b)))
            .filter_map(|(a, b)| {
                let w = self.weight(a, b);
                (w > 0.0).then_some((a, b, w))
            })
            .collect()
    }

    /// Marginal of the accept codeword.
    pub fn accept_marginal(&self) -> Vec<f64> {
        (0..self.nx).map(|a| (0..self.nx).map(|b| self.weight(a, b)).sum()).collect()
    }

    /// Marginal of the reject codeword.
    pub fn reject_marginal(&self) -> Vec<f64> {
        (0..self.nx).map(|b| (0..self.nx).map(|a| self.weight(a, b)).sum()).collect()
    }
}

/// Output law `U(y | x1, x2)` for every input pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlConditional {
    nx: usize,
    ny: usize,
    data: Vec<f64>,
}

impl ControlConditional {
    pub fn from_rows(nx: usize, ny: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != nx * nx * ny {
            return Err(Error::Dimension { expected: nx * nx * ny, got: data.len() });
        }
        for r in data.chunks(ny) {
            Distribution::new(r.to_vec())?;
        }
        Ok(Self { nx, ny, data })
    }

    /// `W_a`: the channel seen through the accept letter.
    pub fn accept(w: &channel_core::Channel) -> Self {
        Self::induced(w, |a, _| a)
    }

    /// `W_r`: the channel seen through the reject letter.
    pub fn reject(w: &channel_core::Channel) -> Self {
        Self::induced(w, |_, b| b)
    }

    fn induced(w: &channel_core::Channel, pick: impl Fn(usize, usize) -> usize) -> Self {
        let (nx, ny) = (w.nx(), w.ny());
        let mut data = Vec::with_capacity(nx * nx * ny);
        for a in 0..nx {
            for b in 0..nx {
                data.extend_from_slice(w.row(pick(a, b)));
            }
        }
        Self { nx, ny, data }
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn row(&self, a: usize, b: usize) -> &[f64] {
        let i = (a * self.nx + b) * self.ny;
        &self.data[i..i + self.ny]
    }

    /// `sum_{a,b} x(a,b) D(self(.|a,b) || other(.|a,b))`.
    pub fn divergence(&self, other: &ControlConditional, x: &ControlType) -> f64 {
        let mut acc = channel_core::numeric::Neumaier::new();
        for (a, b, wt) in x.pairs() {
            acc.add(channel_core::numeric::wmul(wt, channel_core::kl(self.row(a, b), other.row(a, b))));
        }
        acc.value()
    }
}
