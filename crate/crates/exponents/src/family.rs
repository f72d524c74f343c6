//! The sphere-packing family at a fixed input type.
//!
//! For `s` in `[0, 1]` let `V_s(y|x) ∝ W(y|x)^(1-s) Q_s(y)^s` with
//! `Q_s = P V_s`. This is the minimizer of `D(V || W | P) + s/(1-s) I(P, V)`,
//! so `(I(P, V_s), D(V_s || W | P))` traces the curve `e_sp(., P)` with
//! slope `-s/(1-s)`. At `s = 1` the rows are `Q` restricted to the support
//! of `W(.|x)`, and the rate is the smallest one with a finite exponent.

use std::cell::RefCell;

use channel_core::numeric::{illinois, Neumaier};
use channel_core::tilt::tilt;
use channel_core::{kl, Channel, ConditionalChannel, Distribution, Error, Result};
use serde::{Deserialize, Serialize};

const FIXED_POINT_TOL: f64 = 1e-15;
const FIXED_POINT_MAX_ITER: usize = 50_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpPoint {
    pub s: f64,
    /// `I(P, V_s)`
    pub rate: f64,
    /// `D(V_s || W | P)`
    pub value: f64,
    pub v: ConditionalChannel,
    pub q: Vec<f64>,
}

pub struct SpFamily<'a> {
    w: &'a Channel,
    p: &'a Distribution,
    support: Vec<usize>,
    warm: RefCell<Option<Vec<f64>>>,
}

impl<'a> SpFamily<'a> {
    pub fn new(w: &'a Channel, p: &'a Distribution) -> Result<Self> {
        if p.len() != w.nx() {
            return Err(Error::Dimension { expected: w.nx(), got: p.len() });
        }
        Ok(Self { w, p, support: p.support(), warm: RefCell::new(None) })
    }

    pub fn channel(&self) -> &Channel {
        self.w
    }

    pub fn input(&self) -> &Distribution {
        self.p
    }

    fn rows_for(&self, q: &[f64], s: f64) -> Vec<Vec<f64>> {
        (0..self.w.nx())
            .map(|x| {
                if self.p[x] > 0.0 {
                    tilt(self.w.row(x), q, s).expect("Q covers the support of every used row")
                } else {
                    self.w.row(x).to_vec()
                }
            })
            .collect()
    }

    fn marginal(&self, rows: &[Vec<f64>]) -> Vec<f64> {
        let mut q = vec![0.0; self.w.ny()];
        for &x in &self.support {
            for (qy, vy) in q.iter_mut().zip(&rows[x]) {
                *qy += self.p[x] * vy;
            }
        }
        q
    }

    /// Solves the fixed point at tilt `s`, warm-started from the previous call.
    pub fn at(&self, s: f64) -> SpPoint {
        let pw = channel_core::marginal(self.p, self.w);
        let mut q = match self.warm.borrow().as_ref() {
            // blended with PW so no output starts near zero: a collapsed warm
            // start (from s = 1) would otherwise look converged
            Some(prev) if s > 0.0 => prev.iter().zip(&pw).map(|(a, b)| 0.9 * a + 0.1 * b).collect(),
            _ => pw,
        };
        let mut rows = self.iterate(q.clone(), s);
        q = self.marginal(&rows);
        if s >= 1.0 {
            rows = self.prune(q, rows);
        }
        let q = self.marginal(&rows);
        *self.warm.borrow_mut() = Some(q.clone());
        let mut rate = Neumaier::new();
        let mut value = Neumaier::new();
        for &x in &self.support {
            rate.add(self.p[x] * kl(&rows[x], &q));
            value.add(self.p[x] * kl(&rows[x], self.w.row(x)));
        }
        let v = ConditionalChannel::new(rows).expect("tilted rows are distributions");
        SpPoint { s, rate: rate.value().max(0.0), value: value.value().max(0.0), v, q }
    }

    /// One step of the fixed-point map `Q -> P V(Q)`.
    fn step(&self, q: &[f64], s: f64) -> Vec<f64> {
        self.marginal(&self.rows_for(q, s))
    }

    /// Fixed point of `Q -> P V(Q)` with squared extrapolation (SQUAREM):
    /// the plain map converges linearly with ratio close to `s`, which is
    /// slow near `s = 1`. Extrapolated points that leave the simplex or
    /// increase the residual fall back to the plain double step.
    fn iterate(&self, mut q: Vec<f64>, s: f64) -> Vec<Vec<f64>> {
        let dist = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        for _ in 0..FIXED_POINT_MAX_ITER / 3 {
            let q1 = self.step(&q, s);
            let r: Vec<f64> = q1.iter().zip(&q).map(|(a, b)| a - b).collect();
            let rn = r.iter().map(|x| x * x).sum::<f64>().sqrt();
            if dist(&q1, &q) < FIXED_POINT_TOL {
                q = q1;
                break;
            }
            let q2 = self.step(&q1, s);
            let v: Vec<f64> = q2.iter().zip(&q1).zip(&r).map(|((a, b), c)| a - b - c).collect();
            let vn = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            let mut next = q2.clone();
            if vn > 0.0 {
                let alpha = (-rn / vn).min(-1.0);
                let cand: Vec<f64> = q.iter().zip(&r).zip(&v).map(|((x, ri), vi)| x - 2.0 * alpha * ri + alpha * alpha * vi).collect();
                let keeps_support = cand.iter().zip(&q).all(|(c, x)| if *x > 0.0 { *c > 0.0 } else { *c == 0.0 });
                if keeps_support {
                    let z: f64 = cand.iter().sum();
                    let cand: Vec<f64> = cand.iter().map(|c| c / z).collect();
                    let stepped = self.step(&cand, s);
                    if dist(&stepped, &cand) <= dist(&q2, &q1) {
                        next = stepped;
                    }
                }
            }
            q = next;
        }
        self.rows_for(&q, s)
    }

    /// At `s = 1` the iteration is the EM algorithm for
    /// `min_Q -sum_x P(x) ln Q(supp W_x)`, whose update multiplies `Q(y)` by
    /// `g(y) = sum_{x : W(y|x) > 0} P(x) / Q(supp W_x)`. Outputs the optimum
    /// does not charge have `g(y) < 1` and drain only geometrically (slowly
    /// when some `P(x)` is near 1), so they are dropped and the iteration is
    /// rerun. The pruned solution is kept only if it is at least as good.
    fn prune(&self, mut q: Vec<f64>, mut rows: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
        let objective = |q: &[f64]| -> f64 {
            self.support.iter().map(|&x| -self.p[x] * self.w.support(x).iter().map(|&y| q[y]).sum::<f64>().ln()).sum()
        };
        for _ in 0..self.w.ny() {
            let cover: Vec<f64> = (0..self.w.nx()).map(|x| self.w.support(x).iter().map(|&y| q[y]).sum()).collect();
            let g = |y: usize| -> f64 { self.support.iter().filter(|&&x| self.w.get(x, y) > 0.0).map(|&x| self.p[x] / cover[x]).sum() };
            let mut cand: Vec<f64> = (0..q.len()).map(|y| if q[y] > 0.0 && g(y) < 1.0 - 1e-12 { 0.0 } else { q[y] }).collect();
            if cand == q {
                break;
            }
            let z: f64 = cand.iter().sum();
            if z <= 0.0 || self.support.iter().any(|&x| self.w.support(x).iter().all(|&y| cand[y] == 0.0)) {
                break;
            }
            cand.iter_mut().for_each(|v| *v /= z);
            let cand_rows = self.iterate(cand, 1.0);
            let cand = self.marginal(&cand_rows);
            if objective(&cand) > objective(&q) {
                break;
            }
            q = cand;
            rows = cand_rows;
        }
        rows
    }

    /// `I(P, W)`
    pub fn max_rate(&self) -> f64 {
        channel_core::mutual_information_raw(self.p, self.w)
    }

    /// Smallest rate with a finite sphere-packing exponent.
    pub fn min_rate(&self) -> f64 {
        self.at(1.0).rate
    }

    /// The family point with rate `r`, i.e. the `e_sp(r, P)` minimizer;
    /// `None` below the smallest feasible rate.
    pub fn solve_rate(&self, r: f64) -> Option<SpPoint> {
        if r >= self.max_rate() {
            return Some(self.at(0.0));
        }
        let top = self.at(1.0);
        if r < top.rate - 1e-12 {
            return None;
        }
        if r <= top.rate {
            return Some(top);
        }
        let s = illinois(0.0, 1.0, 1e-13, |s| self.at(s).rate - r);
        Some(self.at(s))
    }
}

impl crate::TangentCurve for SpFamily<'_> {
    fn tangent(&self, s: f64) -> (f64, f64) {
        let pt = self.at(s);
        (pt.rate, pt.value)
    }

    fn value_at(&self, r: f64) -> f64 {
        self.solve_rate(r).map_or(f64::INFINITY, |pt| pt.value)
    }
}
