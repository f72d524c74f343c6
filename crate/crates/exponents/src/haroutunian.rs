//! The Haroutunian exponent `E_h(R) = min { max_x D(V_x || W_x) : C(V) <= R }`
//! and its tangent-line improvement from the point `(0, T*)`.
//!
//! Writing `C(V) = min_Q max_x D(V_x || Q)` decouples the rows:
//! `E_h(R) = min_Q max_x min { D(v || W_x) : D(v || Q) <= R }`. The inner
//! problem is a constrained tilt between `Q` and `W_x`; the outer one is a
//! convex minimization over output distributions.

use channel_core::constants::r_infty_output;
use channel_core::numeric::{grid_golden_min, minimize_on_simplex};
use channel_core::tilt::constrained_tilt;
use channel_core::{capacity_with_input, Channel, ConditionalChannel, Error, Result};
use serde::{Deserialize, Serialize};

use crate::classic::sphere_packing_exponent;

/// Largest output alphabet handled for channels that are not symmetric.
pub const MAX_OUTPUTS: usize = 8;

fn rows_for(w: &Channel, q: &[f64], r: f64) -> Option<(f64, Vec<Vec<f64>>)> {
    let mut worst = 0.0f64;
    let mut rows = Vec::with_capacity(w.nx());
    for x in 0..w.nx() {
        let pt = constrained_tilt(q, w.row(x), r).ok().flatten()?;
        worst = worst.max(pt.d_b);
        rows.push(pt.q);
    }
    Some((worst, rows))
}

/// Objective for the search over `Q`. Where some row cannot reach the
/// divergence budget the value is a large penalty growing with the shortfall
/// `-ln Q(supp W_x) - R`, which steers the search back to feasible `Q`.
fn objective(w: &Channel, q: &[f64], r: f64) -> f64 {
    if let Some((v, _)) = rows_for(w, q, r) {
        return v;
    }
    let shortfall = (0..w.nx()).map(|x| -w.support(x).iter().map(|&y| q[y]).sum::<f64>().ln() - r).fold(0.0, f64::max);
    1e6 * (1.0 + shortfall.min(1e6))
}

/// `E_h(R)` with a minimizing channel (absent when infinite).
pub fn haroutunian_point(w: &Channel, r: f64) -> Result<(f64, Option<ConditionalChannel>)> {
    if r.is_nan() || r < 0.0 {
        return Err(Error::Invalid(format!("rate {r} must be nonnegative")));
    }
    if w.is_symmetric() {
        let e = sphere_packing_exponent(w, r, None)?;
        return Ok((e.value, e.witness_v));
    }
    let cap = capacity_with_input(w);
    if r >= cap.value {
        return Ok((0.0, Some(w.as_conditional().clone())));
    }
    let ny = w.ny();
    let (q_cover, cover) = r_infty_output(w);
    if r < -cover.ln() {
        return Ok((f64::INFINITY, None));
    }
    if ny > MAX_OUTPUTS {
        return Err(Error::Unsupported(format!("Haroutunian exponent of a non-symmetric channel needs |Y| <= {MAX_OUTPUTS}, got {ny}")));
    }
    let q = if ny == 2 {
        let (a, _) = grid_golden_min(0.0, 1.0, 101, 1e-12, |a| objective(w, &[a, 1.0 - a], r));
        vec![a, 1.0 - a]
    } else {
        let mut starts = vec![channel_core::marginal(&cap.input, w), vec![1.0 / ny as f64; ny], q_cover];
        for x in 0..w.nx() {
            starts.push(w.row(x).iter().map(|v| 0.5 * v + 0.5 / ny as f64).collect());
        }
        minimize_on_simplex(&starts, 0.05, 1e-11, 6000, |q| objective(w, q, r)).0
    };
    Ok(match rows_for(w, &q, r) {
        Some((v, rows)) => (v, Some(ConditionalChannel::new(rows)?)),
        None => (f64::INFINITY, None),
    })
}

pub fn haroutunian(w: &Channel, r: f64) -> Result<f64> {
    Ok(haroutunian_point(w, r)?.0)
}

/// Tangent construction for `~E_h`: the line from `(0, T*)` touching the
/// convex curve `E_h` at `R_ht`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImprovedHaroutunian {
    pub capacity: f64,
    pub t_star: f64,
    pub r_ht: f64,
    pub e_h_at_r_ht: f64,
}

impl ImprovedHaroutunian {
    pub fn new(w: &Channel) -> Result<Self> {
        if channel_core::constants::zero_error_positive(w) {
            return Err(Error::Precondition("the improved Haroutunian bound needs C0 = 0".into()));
        }
        let capacity = channel_core::capacity(w);
        let t_star = control_phase::t_star(w);
        let e0 = haroutunian(w, 0.0)?;
        if e0 - t_star <= 1e-7 {
            return Ok(Self { capacity, t_star, r_ht: 0.0, e_h_at_r_ht: e0 });
        }
        // the tangent point minimizes the chord slope seen from (0, T*)
        let slope = |r: f64| (haroutunian(w, r).unwrap_or(f64::INFINITY) - t_star) / r;
        let (r_ht, _) = grid_golden_min(capacity * 1e-4, capacity, 41, 1e-10, slope);
        let r_ht = if capacity - r_ht < 1e-9 { capacity } else { r_ht };
        Ok(Self { capacity, t_star, r_ht, e_h_at_r_ht: haroutunian(w, r_ht)? })
    }

    pub fn value(&self, w: &Channel, r: f64) -> Result<f64> {
        if r.is_nan() || r < 0.0 {
            return Err(Error::Invalid(format!("rate {r} must be nonnegative")));
        }
        if r == 0.0 {
            return Ok(self.t_star);
        }
        if r >= self.r_ht {
            return haroutunian(w, r);
        }
        Ok(self.t_star + (self.e_h_at_r_ht - self.t_star) * r / self.r_ht)
    }
}

pub fn haroutunian_improved(w: &Channel, r: f64) -> Result<f64> {
    ImprovedHaroutunian::new(w)?.value(w, r)
}
