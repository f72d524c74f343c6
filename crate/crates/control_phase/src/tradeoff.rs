use channel_core::numeric::{bisect, nsum, wmul};
use channel_core::tilt::tilt;
use channel_core::{Channel, Error, Result};
use serde::{Deserialize, Serialize};

use crate::types::{ControlConditional, ControlType};

/// The tilted control-phase law `q_s` and its divergences from `W_a`, `W_r`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TiltedPair {
    pub s: f64,
    pub q: ControlConditional,
    /// `D(q_s || W_a | x)`
    pub d_accept: f64,
    /// `D(q_s || W_r | x)`
    pub d_reject: f64,
}

/// `q_s(y) ∝ W(y|x1)^(1-s) W(y|x2)^s` on the common support.
pub fn tilted_q(w: &Channel, s: f64, x1: usize, x2: usize) -> Result<Vec<f64>> {
    if x1 == x2 {
        return Err(Error::Invalid(format!("tilted_q needs distinct letters, got ({x1}, {x2})")));
    }
    pair_tilt(w, s, x1, x2)
}

fn pair_tilt(w: &Channel, s: f64, a: usize, b: usize) -> Result<Vec<f64>> {
    tilt(w.row(a), w.row(b), s).map_err(|e| match e {
        Error::Infeasible(_) => Error::InfeasiblePair(a, b),
        other => other,
    })
}

/// Tilts every positive-weight pair of `x` with the same `s`. Zero-weight
/// pairs get `W(.|x1)` or the tilt where it exists.
pub fn tilted_pair(w: &Channel, x: &ControlType, s: f64) -> Result<TiltedPair> {
    check_shape(w, x)?;
    let (nx, ny) = (w.nx(), w.ny());
    let mut data = Vec::with_capacity(nx * nx * ny);
    for a in 0..nx {
        for b in 0..nx {
            match pair_tilt(w, s, a, b) {
                Ok(q) => data.extend(q),
                Err(Error::InfeasiblePair(..)) if x.weight(a, b) == 0.0 => data.extend_from_slice(w.row(a)),
                Err(e) => return Err(e),
            }
        }
    }
    let q = ControlConditional::from_rows(nx, ny, data)?;
    let d_accept = q.divergence(&ControlConditional::accept(w), x);
    let d_reject = q.divergence(&ControlConditional::reject(w), x);
    Ok(TiltedPair { s, q, d_accept, d_reject })
}

fn check_shape(w: &Channel, x: &ControlType) -> Result<()> {
    if w.nx() != x.nx() {
        return Err(Error::Dimension { expected: w.nx(), got: x.nx() });
    }
    Ok(())
}

/// Both divergences at tilt `s`, without materializing `q_s`.
fn divergences(w: &Channel, pairs: &[(usize, usize, f64)], s: f64) -> Result<(f64, f64)> {
    let mut da = Vec::with_capacity(pairs.len());
    let mut dr = Vec::with_capacity(pairs.len());
    for &(a, b, wt) in pairs {
        let q = pair_tilt(w, s, a, b)?;
        da.push(wmul(wt, channel_core::kl(&q, w.row(a)).max(0.0)));
        dr.push(wmul(wt, channel_core::kl(&q, w.row(b)).max(0.0)));
    }
    Ok((nsum(da), nsum(dr)))
}

/// `(D(q_s || W_a | x), D(q_s || W_r | x))`: the point of the `F(., x)`
/// curve where its slope is `-(1-s)/s`.
pub fn tilted_divergences(w: &Channel, x: &ControlType, s: f64) -> Result<(f64, f64)> {
    check_shape(w, x)?;
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::Invalid(format!("tilt {s} outside [0, 1]")));
    }
    divergences(w, &x.pairs(), s)
}

const DUST: f64 = 1e-12;

/// `F(T, x) = min { D(U || W_r | x) : D(U || W_a | x) <= T }`.
///
/// The minimizer is `q_s` with one `s` shared by all pairs; `s` is found by
/// bisection on the accept divergence. Infinite below `D(q_0 || W_a | x)`.
pub fn f_exponent(w: &Channel, t: f64, x: &ControlType) -> Result<f64> {
    check_shape(w, x)?;
    if t.is_nan() || t < 0.0 {
        return Err(Error::Invalid(format!("T = {t} must be nonnegative")));
    }
    let pairs = x.pairs();
    let (da0, dr0) = divergences(w, &pairs, 0.0)?;
    // rounding in the tilt leaves D(q_0 || W_a) ~ 1e-17 where it should be 0
    if t < da0 - DUST {
        return Ok(f64::INFINITY);
    }
    let (da1, dr1) = divergences(w, &pairs, 1.0)?;
    if t >= da1 {
        return Ok(dr1);
    }
    if t <= da0 + 1e-14 {
        return Ok(dr0);
    }
    let (s, _) = bisect(0.0, 1.0, 1e-15, |s| divergences(w, &pairs, s).map_or(true, |(da, _)| da > t));
    Ok(divergences(w, &pairs, s)?.1)
}

fn distinct_pairs(nx: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..nx).flat_map(move |a| (0..nx).filter(move |&b| b != a).map(move |b| (a, b)))
}

/// `E2(T) = max_x F(T, x)` and the maximizing pair.
///
/// `F(T, .)` is convex in `x` (a supremum of linear functions), so the max
/// is attained at a point-mass pair.
pub fn e2bar_with_pair(w: &Channel, t: f64) -> Result<(f64, (usize, usize))> {
    if channel_core::constants::zero_error_positive(w) {
        return Err(Error::Precondition("two-message tradeoff needs C0 = 0".into()));
    }
    let mut best = (f64::NEG_INFINITY, (0, 1));
    for (a, b) in distinct_pairs(w.nx()) {
        let v = f_exponent(w, t, &ControlType::point(w.nx(), a, b))?;
        if v > best.0 {
            best = (v, (a, b));
        }
    }
    Ok(best)
}

pub fn e2bar(w: &Channel, t: f64) -> Result<f64> {
    Ok(e2bar_with_pair(w, t)?.0)
}

/// `T* = max_T min{T, E2(T)}`; infinite when some pair of inputs has
/// disjoint output supports.
pub fn t_star(w: &Channel) -> f64 {
    if channel_core::constants::zero_error_positive(w) {
        return f64::INFINITY;
    }
    let e2 = |t: f64| e2bar(w, t).expect("C0 = 0 was checked");
    // E2 saturates once T exceeds every pair's accept divergence at s = 1
    let mut hi = 1.0;
    for (a, b) in distinct_pairs(w.nx()) {
        let q = pair_tilt(w, 1.0, a, b).expect("C0 = 0 was checked");
        hi = f64::max(hi, channel_core::kl(&q, w.row(a)) + channel_core::kl(&q, w.row(b)) + 1.0);
    }
    if e2(0.0) <= 0.0 {
        return 0.0;
    }
    let (_, t) = bisect(0.0, hi, 1e-12, |t| t - e2(t) >= 0.0);
    t
}
