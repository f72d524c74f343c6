use channel_core::numeric::{golden_max, grid_golden_max, minimize_on_simplex};
use channel_core::{capacity, capacity_with_input, Channel, Distribution, Error, Result};
use control_phase::ControlType;
use exponents::random_coding_exponent;

use crate::exponent::{alpha_star, control_candidates, AtInput};
use crate::{InnerQuery, InnerWitness};

/// Used in place of `alpha* = 0` (zero rate at zero erasure exponent).
const ALPHA_FLOOR: f64 = 1e-9;
const ALPHA_GRID: usize = 33;

enum Start {
    /// `E_x > E_r(R)`: single phase, no erasures.
    Trivial(InnerWitness),
    Search {
        alpha_min: f64,
    },
}

fn start(w: &Channel, q: &InnerQuery) -> Result<Start> {
    let c = capacity(w);
    if q.rate > c + 1e-12 {
        return Err(Error::OutOfRange(format!("rate {} exceeds capacity {c}", q.rate)));
    }
    let full = random_coding_exponent(w, q.rate, None)?;
    if q.erasure_exponent > full.value {
        let x = control_candidates(w, &full.witness_p).swap_remove(0);
        return Ok(Start::Trivial(InnerWitness { alpha: 1.0, p: full.witness_p, x, point: None, value: full.value, mode: q.mode }));
    }
    let alpha_min = alpha_star(w, q.rate.min(c), q.erasure_exponent, None)?.max(ALPHA_FLOOR);
    Ok(Start::Search { alpha_min })
}

fn alpha_grid(alpha_min: f64) -> Vec<f64> {
    (0..ALPHA_GRID).map(|i| alpha_min + (1.0 - alpha_min) * i as f64 / (ALPHA_GRID - 1) as f64).collect()
}

/// Input types tried first at a given `alpha`: the random-coding optimum at
/// `R / alpha`, the capacity-achieving input, the uniform input and two
/// mixtures.
fn input_starts(w: &Channel, q: &InnerQuery, alpha: f64) -> Result<Vec<Distribution>> {
    let nx = w.nx();
    let pr = random_coding_exponent(w, q.rate / alpha, None)?.witness_p;
    let pc = capacity_with_input(w).input;
    let u = Distribution::uniform(nx);
    Ok(vec![pr.mix(&u, 0.5)?, pr.mix(&pc, 0.5)?, pr, pc, u])
}

/// Input types scanned for an infinite exponent at a given `alpha`.
fn input_scan(w: &Channel, q: &InnerQuery, alpha: f64) -> Result<Vec<Distribution>> {
    if w.nx() == 2 {
        return Ok((0..=10).map(|i| Distribution::new(vec![i as f64 / 10.0, 1.0 - i as f64 / 10.0]).expect("grid point")).collect());
    }
    input_starts(w, q, alpha)
}

/// First `(alpha, P, x)` of the search with an infinite exponent.
fn find_infinite(w: &Channel, q: &InnerQuery, alpha_min: f64) -> Result<Option<InnerWitness>> {
    let scan = |alpha: f64, p: &Distribution| -> Result<Option<InnerWitness>> {
        let at = AtInput::new(w, q, alpha, p)?;
        if !at.admissible() {
            return Ok(None);
        }
        for x in control_candidates(w, p) {
            if at.is_infinite(&x)? {
                return Ok(Some(at.exponent(&x)?));
            }
        }
        Ok(None)
    };
    if w.is_symmetric() {
        return scan(alpha_min, &Distribution::uniform(w.nx()));
    }
    // without zero transitions every budget is reachable
    if w.as_flat().iter().all(|&v| v > 0.0) {
        return Ok(None);
    }
    for alpha in alpha_grid(alpha_min) {
        for p in input_scan(w, q, alpha)? {
            if let Some(wit) = scan(alpha, &p)? {
                return Ok(Some(wit));
            }
        }
    }
    Ok(None)
}

/// The envelope is infinite: the two-phase scheme is error free at `(R, E_x)`.
pub fn inner_envelope_is_infinite(w: &Channel, q: &InnerQuery) -> Result<bool> {
    match start(w, q)? {
        Start::Trivial(_) => Ok(false),
        Start::Search { alpha_min } => Ok(find_infinite(w, q, alpha_min)?.is_some()),
    }
}

/// Best control type at `(alpha, P)`.
fn best_x(at: &AtInput, w: &Channel, p: &Distribution) -> Result<InnerWitness> {
    let mut best: Option<InnerWitness> = None;
    for x in control_candidates(w, p) {
        let wit = at.exponent(&x)?;
        if best.as_ref().is_none_or(|b| wit.value > b.value) {
            best = Some(wit);
        }
    }
    Ok(best.expect("at least one control candidate"))
}

/// Best `(P, x)` at a fixed `alpha` with `P` in the admissible set; `None`
/// when the search finds no admissible input.
fn best_at_alpha(w: &Channel, q: &InnerQuery, alpha: f64) -> Result<Option<InnerWitness>> {
    let mut failure: Option<Error> = None;
    let mut objective = |p: &Distribution| -> f64 {
        let run = || -> Result<f64> {
            let at = AtInput::new(w, q, alpha, p)?;
            if !at.admissible() {
                return Ok(-1.0 - at.violation());
            }
            Ok(best_x(&at, w, p)?.value)
        };
        run().unwrap_or_else(|e| {
            failure.get_or_insert(e);
            f64::NEG_INFINITY
        })
    };
    let starts = input_starts(w, q, alpha)?;
    let found = if w.nx() == 2 {
        let (a, _) = grid_golden_max(0.0, 1.0, 11, 1e-4, |a| objective(&Distribution::new(vec![a, 1.0 - a]).expect("a in [0, 1]")));
        Distribution::new(vec![a, 1.0 - a]).expect("a in [0, 1]")
    } else {
        let raw: Vec<Vec<f64>> = starts.iter().map(|p| p.weights().to_vec()).collect();
        let (p, _) = minimize_on_simplex(&raw, 0.1, 1e-6, 150, |v| {
            -objective(&Distribution::from_unnormalized(v.to_vec()).expect("projected point"))
        });
        Distribution::from_unnormalized(p).expect("projected point")
    };
    // near alpha* the admissible set shrinks to the random-coding optimum,
    // which the search only approaches
    let mut p = found;
    let mut best = objective(&p);
    for s in starts {
        let v = objective(&s);
        if v > best {
            (p, best) = (s, v);
        }
    }
    if let Some(e) = failure {
        return Err(e);
    }
    let at = AtInput::new(w, q, alpha, &p)?;
    if !at.admissible() {
        return Ok(None);
    }
    Ok(Some(best_x(&at, w, &p)?))
}

/// `E(R, E_x)`: the best error exponent of the two-phase scheme at erasure
/// exponent `E_x`, a lower bound on the optimal tradeoff.
///
/// Above `E_r(R)` erasures are never declared and the value is `E_r(R)`.
/// Symmetric channels use `alpha*`, the uniform input and the best control
/// type. Other channels search `alpha` on a grid over `[alpha*, 1]` refined
/// by golden section around the best grid point, `P` over the admissible
/// set (golden section for binary inputs, Nelder-Mead from five starts
/// otherwise), and `x` over the point-mass pairs and the product type of
/// `P`. The value is infinite when some candidate is error free.
pub fn inner_envelope(w: &Channel, q: &InnerQuery) -> Result<InnerWitness> {
    let alpha_min = match start(w, q)? {
        Start::Trivial(wit) => return Ok(wit),
        Start::Search { alpha_min } => alpha_min,
    };
    if let Some(wit) = find_infinite(w, q, alpha_min)? {
        return Ok(wit);
    }
    if w.is_symmetric() {
        let p = Distribution::uniform(w.nx());
        let at = AtInput::new(w, q, alpha_min, &p)?;
        return best_x(&at, w, &p);
    }
    let grid = alpha_grid(alpha_min);
    let mut best: Option<(usize, InnerWitness)> = None;
    for (i, &alpha) in grid.iter().enumerate() {
        if let Some(wit) = best_at_alpha(w, q, alpha)? {
            if wit.value.is_infinite() {
                return Ok(wit);
            }
            if best.as_ref().is_none_or(|(_, b)| wit.value > b.value) {
                best = Some((i, wit));
            }
        }
    }
    let Some((i, mut wit)) = best else {
        return Err(Error::Infeasible("no admissible input type found".into()));
    };
    let lo = grid[i.saturating_sub(1)];
    let hi = grid[(i + 1).min(grid.len() - 1)];
    if hi > lo {
        let mut failure = None;
        let (alpha, _) = golden_max(lo, hi, 1e-4 * (1.0 - alpha_min), |a| match best_at_alpha(w, q, a) {
            Ok(Some(wt)) => wt.value,
            Ok(None) => f64::NEG_INFINITY,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NEG_INFINITY
            }
        });
        if let Some(e) = failure {
            return Err(e);
        }
        if let Some(refined) = best_at_alpha(w, q, alpha)? {
            if refined.value > wit.value {
                wit = refined;
            }
        }
    }
    Ok(wit)
}

/// Candidate control types used by the envelope at input type `P`.
pub fn envelope_controls(w: &Channel, p: &Distribution) -> Vec<ControlType> {
    control_candidates(w, p)
}
