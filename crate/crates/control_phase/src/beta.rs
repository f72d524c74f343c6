use channel_core::numeric::{golden_max, nsum};
use channel_core::{Channel, Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaSup {
    pub s: f64,
    pub value: f64,
}

fn overlap(a: &[f64], b: &[f64], s: f64) -> f64 {
    nsum(a.iter().zip(b).filter(|(x, y)| **x > 0.0 && **y > 0.0).map(|(x, y)| ((1.0 - s) * x.ln() + s * y.ln()).exp()))
}

/// `beta(s) = min_{x != x~} sum_y W(y|x)^(1-s) W(y|x~)^s`.
///
/// Terms with a zero factor are dropped, so `s = 0` gives the one-sided
/// limit `min sum_{y : W(y|x~) > 0} W(y|x)`. Ordered pairs cover `s` and
/// `1 - s`, hence the domain `[0, 1/2]`.
pub fn beta(w: &Channel, s: f64) -> Result<f64> {
    if !(0.0..=0.5).contains(&s) {
        return Err(Error::OutOfRange(format!("beta needs s in [0, 0.5], got {s}")));
    }
    let nx = w.nx();
    let mut m = f64::INFINITY;
    for a in 0..nx {
        for b in 0..nx {
            if a != b {
                m = m.min(overlap(w.row(a), w.row(b), s));
            }
        }
    }
    Ok(m)
}

/// `(s, beta(s))` on a uniform grid over `[0, 1/2]`.
pub fn beta_profile(w: &Channel, points: usize) -> Vec<(f64, f64)> {
    let n = points.max(2);
    (0..n)
        .map(|i| {
            let s = 0.5 * i as f64 / (n - 1) as f64;
            (s, beta(w, s).expect("grid stays in range"))
        })
        .collect()
}

/// Supremum of `beta` over `[0, 1/2]`: grid step 1e-4, then golden-section
/// refinement around the best grid point. `beta` is a minimum of convex
/// functions so the maximizer may sit anywhere in the interval.
pub fn beta_sup(w: &Channel) -> BetaSup {
    let b = |s: f64| beta(w, s).expect("s stays in range");
    let steps: usize = 5000;
    let h = 0.5 / steps as f64;
    let (mut i_best, mut v_best) = (0, b(0.0));
    for i in 1..=steps {
        let v = b(i as f64 * h);
        if v > v_best {
            i_best = i;
            v_best = v;
        }
    }
    let lo = i_best.saturating_sub(1) as f64 * h;
    let hi = ((i_best + 1).min(steps)) as f64 * h;
    let (s, v) = golden_max(lo, hi, 1e-12, b);
    if v > v_best {
        BetaSup { s, value: v }
    } else {
        BetaSup { s: i_best as f64 * h, value: v_best }
    }
}
