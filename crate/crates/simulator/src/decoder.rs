use std::cmp::Ordering;

use channel_core::{mutual_information_raw, Channel, ConditionalChannel, Distribution, Error, Result};
use control_phase::{ControlConditional, ControlType};
use exponents::prand;
use rand::{Rng, RngExt};
use serde::{Deserialize, Serialize};

use crate::codebook::{Codebook, Symbol};
use crate::config::Code;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Correct,
    Error,
    Erasure,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub message: usize,
    pub tentative: usize,
    pub outcome: Outcome,
}

/// Everything the decoder looks at after one block.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    /// Per message, a quantity increasing in the empirical mutual
    /// information; equal mutual informations give bit-identical scores.
    pub scores: Vec<f64>,
    /// `I(P, V_m)` for each message.
    pub mi: Vec<f64>,
    pub tentative: usize,
    /// `D(V || W | P)` of the tentative codeword.
    pub tentative_divergence: f64,
    /// `D(U || W_a | x)` of the control-phase output; NaN when the decoder
    /// is trivial and the control phase is not run.
    pub control_divergence: f64,
}

/// Parameters of the pairwise domination rule.
#[derive(Debug, Clone, Copy)]
pub struct RuleParams<'a> {
    pub w: &'a Channel,
    /// Overall rate `R`.
    pub rate: f64,
    pub erasure_exponent: f64,
    pub alpha: f64,
    pub p: &'a Distribution,
    pub x: &'a ControlType,
}

impl<'a> RuleParams<'a> {
    pub fn of(code: &'a Code) -> Self {
        Self { w: &code.w, rate: code.rate, erasure_exponent: code.erasure_exponent, alpha: code.alpha, p: &code.p, x: &code.x }
    }
}

/// Data-phase conditional type, control-phase conditional type and index of
/// one message.
#[derive(Debug, Clone, Copy)]
pub struct Triplet<'a> {
    pub v: &'a ConditionalChannel,
    pub u: &'a ControlConditional,
    pub index: usize,
}

/// Only the message with larger mutual information can dominate; on equal
/// mutual information only the lower index can. The threshold is inclusive.
fn rule(order: Ordering, i1: usize, i2: usize, cost: impl FnOnce() -> f64, ex: f64) -> bool {
    let gate = match order {
        Ordering::Greater => true,
        Ordering::Equal => i1 < i2,
        Ordering::Less => false,
    };
    gate && cost() <= ex
}

/// Whether `t1` dominates `t2`: the mutual-information gate above and
/// `alpha prand(R/alpha, P, V1, V2) + (1 - alpha) D(U || W_a | x) <= E_x`.
pub fn dominates(t1: &Triplet, t2: &Triplet, params: &RuleParams) -> Result<bool> {
    if t1.u != t2.u {
        return Err(Error::Precondition("triplets must share the control-phase output type".into()));
    }
    let RuleParams { w, rate, erasure_exponent, alpha, p, x } = *params;
    let order = mutual_information_raw(p, t1.v).total_cmp(&mutual_information_raw(p, t2.v));
    let mut failure = None;
    let cost = || {
        let d_u = t1.u.divergence(&ControlConditional::accept(w), x);
        match prand(w, rate / alpha, p, t1.v, t2.v) {
            Ok(v) => alpha * v + (1.0 - alpha) * d_u,
            Err(e) => {
                failure = Some(e);
                f64::INFINITY
            }
        }
    };
    let verdict = rule(order, t1.index, t2.index, cost, erasure_exponent);
    match failure {
        Some(e) => Err(e),
        None => Ok(verdict),
    }
}

impl Observation {
    fn cost(&self, code: &Code, other: usize) -> f64 {
        let a = code.alpha;
        a * (self.tentative_divergence + (self.mi[other] - code.phase_rate).max(0.0)) + (1.0 - a) * self.control_divergence
    }

    fn beats(&self, code: &Code, other: usize) -> bool {
        let t = self.tentative;
        rule(self.scores[t].total_cmp(&self.scores[other]), t, other, || self.cost(code, other), code.erasure_exponent)
    }

    /// Checks the tentative decision against every other message.
    pub fn accept_all_pairs(&self, code: &Code) -> bool {
        (0..self.scores.len()).filter(|&m| m != self.tentative).all(|m| self.beats(code, m))
    }

    /// Checks it against the runner-up only. The cost grows with the
    /// competitor's mutual information and the tentative decision passes
    /// every gate, so the runner-up is the hardest case.
    pub fn accept_top2(&self, code: &Code) -> bool {
        let t = self.tentative;
        let second = (0..self.scores.len()).filter(|&m| m != t).max_by(|&a, &b| self.scores[a].total_cmp(&self.scores[b]));
        second.is_none_or(|m| self.beats(code, m))
    }
}

/// Runs blocks of one code. Holds the tables the decoder reuses.
#[derive(Debug, Clone)]
pub struct Simulator<'a> {
    pub code: &'a Code,
    pub book: &'a Codebook,
    nx: usize,
    ny: usize,
    /// Prime factorization of every count up to `n1`, as (prime slot, power).
    factors: Vec<Vec<(usize, u32)>>,
    ln_primes: Vec<f64>,
    /// Sampling thresholds per input row.
    cumulative: Vec<f64>,
    /// `sum_a N_a ln N_a` of the composition.
    composition_entropy_term: f64,
}

fn primes_up_to(n: usize) -> Vec<usize> {
    let mut sieve = vec![true; n + 1];
    let mut out = Vec::new();
    for k in 2..=n {
        if sieve[k] {
            out.push(k);
            (k * k..=n).step_by(k).for_each(|j| sieve[j] = false);
        }
    }
    out
}

fn nlogn(k: usize) -> f64 {
    if k < 2 {
        0.0
    } else {
        k as f64 * (k as f64).ln()
    }
}

impl<'a> Simulator<'a> {
    pub fn new(code: &'a Code, book: &'a Codebook) -> Self {
        let (nx, ny) = (code.w.nx(), code.w.ny());
        let n1 = book.n1();
        let primes = primes_up_to(n1);
        let factors = (0..=n1)
            .map(|k| {
                let mut rest = k;
                let mut f = Vec::new();
                for (slot, &p) in primes.iter().enumerate() {
                    if rest < 2 {
                        break;
                    }
                    let mut e = 0;
                    while rest % p == 0 {
                        rest /= p;
                        e += 1;
                    }
                    if e > 0 {
                        f.push((slot, e));
                    }
                }
                f
            })
            .collect();
        let mut cumulative = Vec::with_capacity(nx * ny);
        for row in code.w.rows() {
            let last = row.iter().rposition(|&v| v > 0.0).expect("rows are stochastic");
            let mut acc = 0.0;
            for (y, &v) in row.iter().enumerate() {
                acc += v;
                cumulative.push(if y >= last { f64::INFINITY } else { acc });
            }
        }
        Self {
            code,
            book,
            nx,
            ny,
            factors,
            ln_primes: primes.iter().map(|&p| (p as f64).ln()).collect(),
            cumulative,
            composition_entropy_term: code.composition.iter().map(|&c| nlogn(c)).sum(),
        }
    }

    fn send<R: Rng + ?Sized>(&self, input: &[Symbol], rng: &mut R) -> Vec<Symbol> {
        input
            .iter()
            .map(|&a| {
                let u: f64 = rng.random();
                let row = &self.cumulative[a as usize * self.ny..(a as usize + 1) * self.ny];
                row.iter().position(|&c| u < c).expect("last threshold is infinite") as Symbol
            })
            .collect()
    }

    fn joint_counts(&self, word: &[Symbol], y: &[Symbol], counts: &mut [usize]) {
        counts.fill(0);
        for (&a, &b) in word.iter().zip(y) {
            counts[a as usize * self.ny + b as usize] += 1;
        }
    }

    /// `sum N ln N` over the joint counts, assembled from prime powers in a
    /// fixed order so that equal values are bit-identical.
    fn score(&self, counts: &[usize], powers: &mut [u64]) -> f64 {
        powers.fill(0);
        for &c in counts {
            for &(slot, e) in &self.factors[c] {
                powers[slot] += c as u64 * e as u64;
            }
        }
        powers.iter().zip(&self.ln_primes).map(|(&k, &l)| k as f64 * l).sum()
    }

    /// Scores and mutual informations of every codeword against `y1`.
    fn phase1(&self, y1: &[Symbol]) -> (Vec<f64>, Vec<f64>) {
        let n1 = self.book.n1();
        let mut counts = vec![0; self.nx * self.ny];
        let mut powers = vec![0; self.ln_primes.len()];
        let mut out_counts = vec![0usize; self.ny];
        y1.iter().for_each(|&b| out_counts[b as usize] += 1);
        let h_y = (n1 as f64).ln() - out_counts.iter().map(|&c| nlogn(c)).sum::<f64>() / n1 as f64;
        let mut scores = Vec::with_capacity(self.book.len());
        let mut mi = Vec::with_capacity(self.book.len());
        for m in 0..self.book.len() {
            self.joint_counts(self.book.word(m), y1, &mut counts);
            let s = self.score(&counts, &mut powers);
            scores.push(s);
            mi.push((h_y - (self.composition_entropy_term - s) / n1 as f64).max(0.0));
        }
        (scores, mi)
    }

    /// Maximum score, lowest index on ties.
    pub fn tentative(&self, y1: &[Symbol]) -> usize {
        argmax_first(&self.phase1(y1).0)
    }

    /// `(1/n) sum N(a,y) ln(N(a,y) / (N(a) W(y|a)))` where `a` ranges over
    /// `rows` of size `row_counts` and `row_letter` maps a row to its input.
    fn divergence(&self, counts: &[usize], row_counts: &[usize], row_letter: impl Fn(usize) -> usize, n: usize) -> f64 {
        let mut acc = 0.0;
        for (r, &nr) in row_counts.iter().enumerate() {
            if nr == 0 {
                continue;
            }
            let w = self.code.w.row(row_letter(r));
            for y in 0..self.ny {
                let c = counts[r * self.ny + y];
                if c == 0 {
                    continue;
                }
                if w[y] == 0.0 {
                    return f64::INFINITY;
                }
                acc += c as f64 * (c as f64 / (nr as f64 * w[y])).ln();
            }
        }
        (acc / n as f64).max(0.0)
    }

    /// One block with its decoder inputs. The control phase is skipped when
    /// the decoder is trivial.
    pub fn observe<R: Rng + ?Sized>(&self, rng: &mut R) -> (TrialRecord, Observation) {
        let code = self.code;
        let message = rng.random_range(0..self.book.len());
        let y1 = self.send(self.book.word(message), rng);
        let (scores, mi) = self.phase1(&y1);
        let tentative = argmax_first(&scores);
        let mut counts = vec![0; self.nx * self.ny];
        self.joint_counts(self.book.word(tentative), &y1, &mut counts);
        let tentative_divergence = self.divergence(&counts, &code.composition, |a| a, self.book.n1());

        let mut obs = Observation { scores, mi, tentative, tentative_divergence, control_divergence: f64::NAN };
        let outcome = if code.trivial {
            if tentative == message {
                Outcome::Correct
            } else {
                Outcome::Error
            }
        } else {
            let sent = if tentative == message { &self.book.accept } else { &self.book.reject };
            let y2 = self.send(sent, rng);
            let nx = self.nx;
            let mut pair_counts = vec![0; nx * nx * self.ny];
            for ((&a, &b), &y) in self.book.accept.iter().zip(&self.book.reject).zip(&y2) {
                pair_counts[(a as usize * nx + b as usize) * self.ny + y as usize] += 1;
            }
            obs.control_divergence = self.divergence(&pair_counts, &code.control, |ab| ab / nx, code.n2());
            match (obs.accept_top2(code), tentative == message) {
                (false, _) => Outcome::Erasure,
                (true, true) => Outcome::Correct,
                (true, false) => Outcome::Error,
            }
        };
        (TrialRecord { message, tentative, outcome }, obs)
    }

    pub fn run_trial<R: Rng + ?Sized>(&self, rng: &mut R) -> Outcome {
        self.observe(rng).0.outcome
    }
}

fn argmax_first(scores: &[f64]) -> usize {
    let mut best = 0;
    for (m, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] {
            best = m;
        }
    }
    best
}

/// Maximum empirical mutual information between `y1` and the codewords,
/// lowest index on ties.
pub fn tentative_decision(code: &Code, book: &Codebook, y1: &[Symbol]) -> usize {
    Simulator::new(code, book).tentative(y1)
}

pub fn run_trial<R: Rng + ?Sized>(code: &Code, book: &Codebook, rng: &mut R) -> Outcome {
    Simulator::new(code, book).run_trial(rng)
}
