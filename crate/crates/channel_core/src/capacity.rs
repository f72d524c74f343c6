//! Channel capacity by Blahut-Arimoto alternating maximization.

use serde::{Deserialize, Serialize};

use crate::dist::{Channel, Distribution};
use crate::info::{kl, marginal, mutual_information_raw};

pub const CAPACITY_GAP_TOL: f64 = 1e-9;
pub const CAPACITY_MAX_ITER: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Capacity {
    /// `I(P, W)` at the returned input distribution (nats).
    pub value: f64,
    pub input: Distribution,
    /// `max_x D(W_x || PW) - I(P, W)`, an upper bound on the suboptimality.
    pub gap: f64,
    pub iterations: usize,
}

/// Iterates until the duality gap drops below 1e-9 or 10,000 iterations.
pub fn capacity_with_input(w: &Channel) -> Capacity {
    let nx = w.nx();
    let mut p = vec![1.0 / nx as f64; nx];
    let mut gap = f64::INFINITY;
    let mut iterations = 0;
    while iterations < CAPACITY_MAX_ITER {
        iterations += 1;
        let q = marginal(&p, w);
        let d: Vec<f64> = (0..nx).map(|x| kl(w.row(x), &q)).collect();
        let lower: f64 = p.iter().zip(&d).filter(|(px, _)| **px > 0.0).map(|(px, dx)| px * dx).sum();
        let upper = d.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        gap = upper - lower;
        if gap < CAPACITY_GAP_TOL {
            break;
        }
        // subtract the max before exponentiating to stay in range
        let mut z: Vec<f64> = p.iter().zip(&d).map(|(px, dx)| px * (dx - upper).exp()).collect();
        let s: f64 = z.iter().sum();
        for zi in &mut z {
            *zi /= s;
        }
        p = z;
    }
    let value = mutual_information_raw(&p, w);
    let input = Distribution::from_unnormalized(p).expect("BA iterate stays a distribution");
    Capacity { value, input, gap: gap.max(0.0), iterations }
}

pub fn capacity(w: &Channel) -> f64 {
    capacity_with_input(w).value
}
