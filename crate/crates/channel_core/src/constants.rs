//! Scalar constants of a channel used throughout the exponent computations.

use minilp::{ComparisonOp, OptimizationDirection, Problem};
use serde::{Deserialize, Serialize};

use crate::capacity::capacity;
use crate::dist::Channel;
use crate::info::kl;
use crate::numeric::nsum;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelConstants {
    pub capacity: f64,
    /// Largest divergence between two distinct rows (+inf if any pair is not
    /// mutually absolutely continuous).
    pub burnashev_d: f64,
    pub p_min: f64,
    pub t_zero: f64,
    pub r_infty: f64,
    pub zero_error_positive: bool,
}

pub fn channel_constants(w: &Channel) -> ChannelConstants {
    ChannelConstants {
        capacity: capacity(w),
        burnashev_d: burnashev_d(w),
        p_min: w.p_min(),
        t_zero: t_zero(w),
        r_infty: r_infty(w),
        zero_error_positive: zero_error_positive(w),
    }
}

fn distinct_pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |a| (0..n).filter(move |&b| b != a).map(move |b| (a, b)))
}

/// `max_{x != x~} D(W_x || W_x~)`.
pub fn burnashev_d(w: &Channel) -> f64 {
    distinct_pairs(w.nx()).map(|(a, b)| kl(w.row(a), w.row(b))).fold(0.0, f64::max)
}

/// `sum_{y : W(y|b) > 0} W(y|a)`.
pub fn mass_on_support(w: &Channel, a: usize, b: usize) -> f64 {
    nsum((0..w.ny()).filter(|&y| w.get(b, y) > 0.0).map(|y| w.get(a, y)))
}

/// `max_{x != x~} -ln sum_{y : W(y|x~) > 0} W(y|x)`.
pub fn t_zero(w: &Channel) -> f64 {
    distinct_pairs(w.nx()).map(|(a, b)| -mass_on_support(w, a, b).ln()).fold(0.0, f64::max)
}

/// Some pair of inputs has disjoint output supports.
pub fn zero_error_positive(w: &Channel) -> bool {
    distinct_pairs(w.nx()).any(|(a, b)| (0..w.ny()).all(|y| w.get(a, y) * w.get(b, y) == 0.0))
}

/// `-ln min_P max_y P({x : W(y|x) > 0})`, solved as a linear program.
pub fn r_infty(w: &Channel) -> f64 {
    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let p: Vec<_> = (0..w.nx()).map(|_| lp.add_var(0.0, (0.0, 1.0))).collect();
    let t = lp.add_var(1.0, (0.0, 1.0));
    let all: Vec<_> = p.iter().map(|&v| (v, 1.0)).collect();
    lp.add_constraint(&all, ComparisonOp::Eq, 1.0);
    for y in 0..w.ny() {
        let mut row: Vec<_> = (0..w.nx()).filter(|&x| w.get(x, y) > 0.0).map(|x| (p[x], 1.0)).collect();
        if row.is_empty() {
            continue;
        }
        row.push((t, -1.0));
        lp.add_constraint(&row, ComparisonOp::Le, 0.0);
    }
    let t_opt = lp.solve().expect("the covering LP is always feasible and bounded").objective();
    (-t_opt.ln()).max(0.0)
}

/// Output distribution maximizing `min_x Q(supp W(.|x))` and that minimum;
/// `-ln` of the minimum equals [`r_infty`] by LP duality.
pub fn r_infty_output(w: &Channel) -> (Vec<f64>, f64) {
    let mut lp = Problem::new(OptimizationDirection::Maximize);
    let q: Vec<_> = (0..w.ny()).map(|_| lp.add_var(0.0, (0.0, 1.0))).collect();
    let t = lp.add_var(1.0, (0.0, 1.0));
    let all: Vec<_> = q.iter().map(|&v| (v, 1.0)).collect();
    lp.add_constraint(&all, ComparisonOp::Eq, 1.0);
    for x in 0..w.nx() {
        let mut row: Vec<_> = w.support(x).into_iter().map(|y| (q[y], 1.0)).collect();
        row.push((t, -1.0));
        lp.add_constraint(&row, ComparisonOp::Ge, 0.0);
    }
    let sol = lp.solve().expect("the covering LP is always feasible and bounded");
    let mut qv: Vec<f64> = q.iter().map(|&v| sol[v].max(0.0)).collect();
    let z: f64 = qv.iter().sum();
    qv.iter_mut().for_each(|v| *v /= z);
    (qv, sol.objective())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::ConditionalChannel;

    #[test]
    fn r_infty_of_noiseless_is_log_size() {
        let w = Channel::from_conditional(ConditionalChannel::identity(4)).unwrap();
        assert!((r_infty(&w) - 4f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn r_infty_vanishes_without_zeros() {
        let w = Channel::new(vec![vec![0.9, 0.1], vec![0.2, 0.8]]).unwrap();
        assert!(r_infty(&w).abs() < 1e-12);
    }

    #[test]
    fn pentagon_r_infty() {
        let rows = (0..5)
            .map(|x| {
                let mut r = vec![0.0; 5];
                r[x] = 0.7;
                r[(x + 1) % 5] = 0.3;
                r
            })
            .collect();
        let w = Channel::new(rows).unwrap();
        assert!((r_infty(&w) - 2.5f64.ln()).abs() < 1e-9);
        assert!(zero_error_positive(&w));
        let (q, t) = r_infty_output(&w);
        assert!((-t.ln() - 2.5f64.ln()).abs() < 1e-9);
        assert!((q.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}
