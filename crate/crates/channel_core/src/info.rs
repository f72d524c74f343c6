//! Divergences and mutual information, all in nats.

use crate::dist::{ConditionalChannel, Distribution};
use crate::error::{check_dim, Result};
use crate::numeric::{nsum, plogpq, wmul, Neumaier};

/// `D(p || q)`; infinite when `p` charges a letter where `q` vanishes.
pub fn kl(p: &[f64], q: &[f64]) -> f64 {
    nsum(p.iter().zip(q).map(|(&a, &b)| plogpq(a, b)))
}

pub fn entropy(p: &[f64]) -> f64 {
    nsum(p.iter().map(|&a| if a > 0.0 { -a * a.ln() } else { 0.0 }))
}

/// `D(V || W | P) = sum_x P(x) D(V(.|x) || W(.|x))`.
pub fn conditional_kl(v: &ConditionalChannel, w: &ConditionalChannel, p: &Distribution) -> Result<f64> {
    check_dim(w.nx(), v.nx())?;
    check_dim(w.ny(), v.ny())?;
    check_dim(w.nx(), p.len())?;
    let mut acc = Neumaier::new();
    for x in 0..w.nx() {
        if p[x] > 0.0 {
            acc.add(wmul(p[x], kl(v.row(x), w.row(x))));
        }
    }
    Ok(acc.value())
}

/// `(PV)(y) = sum_x P(x) V(y|x)`.
pub fn output_marginal(p: &Distribution, v: &ConditionalChannel) -> Result<Distribution> {
    check_dim(v.nx(), p.len())?;
    let q = marginal(p, v);
    Distribution::from_unnormalized(q)
}

pub fn marginal(p: &[f64], v: &ConditionalChannel) -> Vec<f64> {
    let mut q = vec![0.0; v.ny()];
    for (x, &px) in p.iter().enumerate() {
        if px > 0.0 {
            for (qy, &vy) in q.iter_mut().zip(v.row(x)) {
                *qy += px * vy;
            }
        }
    }
    q
}

/// `I(P, V)` with the convention `0 ln(0/.) = 0`.
pub fn mutual_information(p: &Distribution, v: &ConditionalChannel) -> Result<f64> {
    check_dim(v.nx(), p.len())?;
    Ok(mutual_information_raw(p, v))
}

pub fn mutual_information_raw(p: &[f64], v: &ConditionalChannel) -> f64 {
    let q = marginal(p, v);
    let mut acc = Neumaier::new();
    for (x, &px) in p.iter().enumerate() {
        if px > 0.0 {
            acc.add(px * kl(v.row(x), &q));
        }
    }
    acc.value().max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kl_conventions() {
        assert_eq!(kl(&[0.0, 1.0], &[0.5, 0.5]), 2f64.ln());
        assert_eq!(kl(&[0.5, 0.5], &[1.0, 0.0]), f64::INFINITY);
        assert_eq!(kl(&[0.3, 0.7], &[0.3, 0.7]), 0.0);
    }

    #[test]
    fn marginal_of_point_mass_is_row() {
        let v = ConditionalChannel::new(vec![vec![0.2, 0.8], vec![0.6, 0.4]]).unwrap();
        let q = output_marginal(&Distribution::point(2, 1), &v).unwrap();
        assert_eq!(q.weights(), &[0.6, 0.4]);
    }
}
