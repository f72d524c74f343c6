use std::ops::Range;

use channel_core::Result;
use serde::{Deserialize, Serialize};
use statrs::distribution::{Beta, ContinuousCDF};

use crate::codebook::{build_codebook, stream, Codebook};
use crate::config::{Code, CodeConfig, Diagnostics};
use crate::decoder::{Outcome, Simulator, TrialRecord};

/// Confidence of the one-sided intervals.
pub const CONFIDENCE: f64 = 0.95;

/// Empirical probability of one event with one-sided Clopper-Pearson bounds
/// and the matching exponents `-ln(p)/n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateEstimate {
    pub count: u64,
    pub probability: f64,
    /// `P(Binomial(trials, p) <= count) = 5%`; zero when `count = 0`.
    pub probability_lower: f64,
    /// `P(Binomial(trials, p) >= count) = 5%`; one when `count = trials`.
    pub probability_upper: f64,
    /// Infinite (`null` in JSON) when the event never occurred.
    pub exponent: f64,
    pub exponent_lower: f64,
    pub exponent_upper: f64,
}

impl RateEstimate {
    pub fn new(count: u64, trials: u64, n: usize) -> Self {
        assert!(count <= trials && trials > 0, "{count} events in {trials} trials");
        let (k, t) = (count as f64, trials as f64);
        let lower = if count == 0 { 0.0 } else { beta_quantile(k, t - k + 1.0, 1.0 - CONFIDENCE) };
        let upper = if count == trials { 1.0 } else { beta_quantile(k + 1.0, t - k, CONFIDENCE) };
        let probability = k / t;
        let expo = |p: f64| -p.ln() / n as f64;
        Self {
            count,
            probability,
            probability_lower: lower.min(probability),
            probability_upper: upper.max(probability),
            exponent: expo(probability),
            exponent_lower: expo(upper.max(probability)),
            exponent_upper: expo(lower.min(probability)),
        }
    }
}

fn beta_quantile(a: f64, b: f64, level: f64) -> f64 {
    // the boundary cases have closed forms and avoid the inverse-CDF search
    if a == 1.0 {
        return 1.0 - (1.0 - level).powf(1.0 / b);
    }
    if b == 1.0 {
        return level.powf(1.0 / a);
    }
    Beta::new(a, b).expect("positive shape parameters").inverse_cdf(level)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub trials: u64,
    pub n: usize,
    pub n1: usize,
    pub messages: usize,
    pub correct_count: u64,
    pub error_count: u64,
    pub erasure_count: u64,
    /// Trials whose data-phase decision was wrong, before the control phase.
    pub tentative_error_count: u64,
    pub tentative_error_rate: f64,
    pub error: RateEstimate,
    pub erasure: RateEstimate,
    pub trivial_decoder: bool,
    pub diagnostics: Diagnostics,
}

impl SimResult {
    pub const CSV_HEADER: &'static str =
        "n,rate,erasure_exponent,alpha,seed,trials,errors,erasures,tentative_errors,error_exponent,erasure_exponent_empirical";

    /// One CSV line matching `CSV_HEADER`.
    pub fn csv_line(&self, code: &Code) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.n,
            code.rate,
            code.erasure_exponent,
            code.alpha,
            code.seed,
            self.trials,
            self.error_count,
            self.erasure_count,
            self.tentative_error_count,
            self.error.exponent,
            self.erasure.exponent
        )
    }
}

/// Outcome of every trial in `range`; trial `i` draws from its own stream.
pub fn trial_records(sim: &Simulator, range: Range<u64>) -> Vec<TrialRecord> {
    range
        .map(|i| {
            let mut rng = stream(sim.code.seed, i + 1);
            sim.observe(&mut rng).0
        })
        .collect()
}

#[derive(Debug, Default, Clone, Copy)]
struct Tally {
    correct: u64,
    error: u64,
    erasure: u64,
    tentative_error: u64,
}

impl Tally {
    fn add(&mut self, r: &TrialRecord) {
        match r.outcome {
            Outcome::Correct => self.correct += 1,
            Outcome::Error => self.error += 1,
            Outcome::Erasure => self.erasure += 1,
        }
        if r.tentative != r.message {
            self.tentative_error += 1;
        }
    }

    fn merge(mut self, o: Tally) -> Tally {
        self.correct += o.correct;
        self.error += o.error;
        self.erasure += o.erasure;
        self.tentative_error += o.tentative_error;
        self
    }
}

/// Runs all trials of `code` with `book` on `threads` workers. The counts do
/// not depend on the number of workers.
pub fn simulate(code: &Code, book: &Codebook, threads: usize) -> SimResult {
    let sim = Simulator::new(code, book);
    let trials = code.trials;
    let threads = (threads.max(1) as u64).min(trials);
    let chunk = trials.div_ceil(threads);
    let tally = std::thread::scope(|s| {
        let handles: Vec<_> = (0..threads)
            .map(|k| {
                let sim = &sim;
                s.spawn(move || {
                    let mut t = Tally::default();
                    for i in k * chunk..((k + 1) * chunk).min(trials) {
                        let mut rng = stream(code.seed, i + 1);
                        t.add(&sim.observe(&mut rng).0);
                    }
                    t
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).fold(Tally::default(), Tally::merge)
    });
    SimResult {
        trials,
        n: code.n,
        n1: code.n1,
        messages: code.messages,
        correct_count: tally.correct,
        error_count: tally.error,
        erasure_count: tally.erasure,
        tentative_error_count: tally.tentative_error,
        tentative_error_rate: tally.tentative_error as f64 / trials as f64,
        error: RateEstimate::new(tally.error, trials, code.n),
        erasure: RateEstimate::new(tally.erasure, trials, code.n),
        trivial_decoder: code.trivial,
        diagnostics: code.diagnostics,
    }
}

fn default_threads() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

/// Prepares the code, draws the codebook and runs every trial.
pub fn run_monte_carlo(config: &CodeConfig) -> Result<SimResult> {
    let code = config.prepare()?;
    let book = build_codebook(&code);
    Ok(simulate(&code, &book, default_threads()))
}
