//! Geometric interpolation between two distributions.
//!
//! `q_s(y) ∝ a(y)^(1-s) b(y)^s` on `supp a ∩ supp b`, for `s` in `[0, 1]`.
//! At `s = 0` this is `a` restricted to `supp b`, at `s = 1` it is `b`
//! restricted to `supp a`. Along the path `D(q_s || a)` is nondecreasing and
//! `D(q_s || b)` nonincreasing; each point minimizes `D(q || b)` subject to a
//! bound on `D(q || a)`.

use crate::error::{Error, Result};
use crate::info::kl;

#[derive(Debug, Clone, PartialEq)]
pub struct TiltPoint {
    pub s: f64,
    pub q: Vec<f64>,
    /// `D(q_s || a)`
    pub d_a: f64,
    /// `D(q_s || b)`
    pub d_b: f64,
}

/// Tilted distribution; fails when the supports of `a` and `b` are disjoint.
pub fn tilt(a: &[f64], b: &[f64], s: f64) -> Result<Vec<f64>> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::Invalid(format!("tilt {s} outside [0, 1]")));
    }
    crate::error::check_dim(a.len(), b.len())?;
    let logs: Vec<Option<f64>> =
        a.iter().zip(b).map(|(&ai, &bi)| (ai > 0.0 && bi > 0.0).then(|| (1.0 - s) * ai.ln() + s * bi.ln())).collect();
    let m = logs.iter().flatten().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return Err(Error::Infeasible("distributions have disjoint supports".into()));
    }
    let mut q: Vec<f64> = logs.iter().map(|l| l.map_or(0.0, |v| (v - m).exp())).collect();
    let z: f64 = q.iter().sum();
    for v in &mut q {
        *v /= z;
    }
    Ok(q)
}

pub fn tilt_point(a: &[f64], b: &[f64], s: f64) -> Result<TiltPoint> {
    let q = tilt(a, b, s)?;
    Ok(TiltPoint { s, d_a: kl(&q, a), d_b: kl(&q, b), q })
}

/// `min { D(q || b) : D(q || a) <= t }` together with its minimizer.
///
/// Returns `None` when the constraint set contains no `q` with finite
/// `D(q || b)`. The tilt solving `D(q_s || a) = t` is found by Newton steps
/// safeguarded by bisection, using `d/ds D(q_s || a) = s Var_q[ln(b/a)]`; the
/// returned point always satisfies the constraint.
pub fn constrained_tilt(a: &[f64], b: &[f64], t: f64) -> Result<Option<TiltPoint>> {
    crate::error::check_dim(a.len(), b.len())?;
    let common: Vec<usize> = (0..a.len()).filter(|&i| a[i] > 0.0 && b[i] > 0.0).collect();
    if common.is_empty() {
        return Err(Error::Infeasible("distributions have disjoint supports".into()));
    }
    let la: Vec<f64> = common.iter().map(|&i| a[i].ln()).collect();
    let l: Vec<f64> = common.iter().map(|&i| b[i].ln() - a[i].ln()).collect();
    // D(q_s || a) and its derivative in s
    let eval = |s: f64| -> (f64, f64) {
        let e: Vec<f64> = la.iter().zip(&l).map(|(x, y)| x + s * y).collect();
        let m = e.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let w: Vec<f64> = e.iter().map(|v| (v - m).exp()).collect();
        let z: f64 = w.iter().sum();
        let mean: f64 = w.iter().zip(&l).map(|(wi, li)| wi * li).sum::<f64>() / z;
        let var: f64 = w.iter().zip(&l).map(|(wi, li)| wi * (li - mean).powi(2)).sum::<f64>() / z;
        ((s * mean - (m + z.ln())).max(0.0), s * var)
    };
    let (d0, _) = eval(0.0);
    if t < d0 - 1e-15 {
        return Ok(None);
    }
    let (d1, _) = eval(1.0);
    if t >= d1 {
        return Ok(Some(tilt_point(a, b, 1.0)?));
    }
    if t <= d0 {
        return Ok(Some(tilt_point(a, b, 0.0)?));
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut s = 0.5;
    for _ in 0..200 {
        let (d, slope) = eval(s);
        if d > t {
            hi = s;
        } else {
            lo = s;
            if t - d <= 1e-15 {
                break;
            }
        }
        if hi - lo <= 1e-15 {
            break;
        }
        let newton = if slope > 0.0 { s - (d - t) / slope } else { f64::NAN };
        s = if newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
    }
    // the divergence recomputed from q may exceed t by rounding
    let mut pt = tilt_point(a, b, lo)?;
    let mut step = 1e-15;
    while pt.d_a > t && pt.s > 0.0 {
        pt = tilt_point(a, b, (pt.s - step).max(0.0))?;
        step *= 2.0;
    }
    Ok(Some(pt))
}
