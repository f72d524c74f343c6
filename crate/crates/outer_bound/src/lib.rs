//! Upper bound on the error exponent of feedback codes with erasures, for
//! channels with zero zero-error capacity.
//!
//! Splitting the block at `n R / r` gives, for every `r` in `[r_h, C]`,
//!
//! ```text
//! E(R, E_x) <= (R/r) ~E_h(r) + (1 - R/r) E2((E_x - (R/r) ~E_h(r)) / (1 - R/r))
//! ```
//!
//! where `~E_h` is the improved Haroutunian exponent, `E2` the two-message
//! error/erasure tradeoff, and `r_h` the root of `R ~E_h(r) = r E_x`. The
//! first phase carries the message at rate `r`, the second resolves the
//! remaining two candidates.

use channel_core::numeric::{golden_min, illinois};
use channel_core::{constants::zero_error_positive, Channel, Error, Result};
use control_phase::e2bar;
use exponents::{haroutunian, ImprovedHaroutunian};
use serde::{Deserialize, Serialize};

/// Number of grid points over `[r_h, C]` before golden-section refinement.
const GRID: usize = 200;
/// Negative `E2` arguments up to this size are rounding, not infeasibility.
const DUST: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OuterQuery {
    /// Nats per channel use.
    pub rate: f64,
    /// Nats per channel use, at most `E_h(R)`.
    pub erasure_exponent: f64,
}

impl OuterQuery {
    pub fn new(rate: f64, erasure_exponent: f64) -> Self {
        Self { rate, erasure_exponent }
    }
}

/// Value of the best straight line and where it was found.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OuterPoint {
    pub value: f64,
    /// Rate of the first phase.
    pub r: f64,
    pub r_h: f64,
}

/// The straight-line family of one channel. Construction computes `T*` and
/// the tangency rate of `~E_h` once.
#[derive(Debug, Clone)]
pub struct OuterBound<'a> {
    w: &'a Channel,
    improved: ImprovedHaroutunian,
}

impl<'a> OuterBound<'a> {
    /// Fails with `Precondition` when the channel has positive zero-error
    /// capacity.
    pub fn new(w: &'a Channel) -> Result<Self> {
        if zero_error_positive(w) {
            return Err(Error::Precondition("the straight-line bound needs C0 = 0".into()));
        }
        Ok(Self { w, improved: ImprovedHaroutunian::new(w)? })
    }

    pub fn capacity(&self) -> f64 {
        self.improved.capacity
    }

    pub fn improved(&self) -> &ImprovedHaroutunian {
        &self.improved
    }

    /// `~E_h(r)`.
    pub fn e_h_tilde(&self, r: f64) -> Result<f64> {
        self.improved.value(self.w, r)
    }

    fn check(&self, q: &OuterQuery) -> Result<()> {
        let (r, ex) = (q.rate, q.erasure_exponent);
        let c = self.capacity();
        if r.is_nan() || r < 0.0 || r > c + 1e-12 {
            return Err(Error::OutOfRange(format!("rate {r} outside [0, {c}]")));
        }
        if ex.is_nan() || ex < 0.0 {
            return Err(Error::Invalid(format!("erasure exponent {ex} must be nonnegative")));
        }
        let eh = haroutunian(self.w, r.min(c))?;
        if ex > eh + 1e-12 {
            return Err(Error::OutOfRegime(format!("erasure exponent {ex} exceeds E_h(R) = {eh}")));
        }
        Ok(())
    }

    /// Root of `R ~E_h(r) - r E_x` on `[0, C]`, on the side where the
    /// difference is nonpositive. `C` at `E_x = 0`, `0` at `R = 0`.
    pub fn r_h(&self, q: &OuterQuery) -> Result<f64> {
        self.check(q)?;
        let (r, ex) = (q.rate, q.erasure_exponent);
        let c = self.capacity();
        if ex == 0.0 {
            return Ok(c);
        }
        if r == 0.0 {
            return Ok(0.0);
        }
        let mut failure = None;
        let mut g = |x: f64| match self.e_h_tilde(x) {
            Ok(v) => r * v - x * ex,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        };
        if g(0.0) <= 0.0 || g(c) > 0.0 {
            return Err(Error::Precondition(format!("no sign change of R ~E_h(r) - r E_x on [0, {c}]")));
        }
        let root = illinois(0.0, c, 1e-12, &mut g);
        match failure {
            Some(e) => Err(e),
            None => Ok(root),
        }
    }

    /// One member of the family. Requires `R <= r <= C`; the `E2` argument
    /// must be nonnegative (`r >= r_h`), otherwise `Infeasible`.
    pub fn straight_line(&self, q: &OuterQuery, r: f64) -> Result<f64> {
        self.check(q)?;
        self.line(q, r)
    }

    fn line(&self, q: &OuterQuery, r: f64) -> Result<f64> {
        let (rate, ex) = (q.rate, q.erasure_exponent);
        let c = self.capacity();
        if r.is_nan() || r < rate || r > c + 1e-12 {
            return Err(Error::OutOfRange(format!("first-phase rate {r} outside [{rate}, {c}]")));
        }
        let r = r.min(c);
        if rate == 0.0 {
            return e2bar(self.w, ex);
        }
        let eh = self.e_h_tilde(r)?;
        let lam = rate / r;
        if lam >= 1.0 {
            // the second phase has no length; only E_x <= ~E_h(R) is reachable
            if ex + DUST < eh {
                return Err(Error::Infeasible(format!("r = {r} is below r_h")));
            }
            return Ok(eh);
        }
        let arg = (ex - lam * eh) / (1.0 - lam);
        if arg < -DUST {
            return Err(Error::Infeasible(format!("r = {r} is below r_h (E2 argument {arg})")));
        }
        Ok(lam * eh + (1.0 - lam) * e2bar(self.w, arg.max(0.0))?)
    }

    /// `straight_line`, infinite where `r` tests below `r_h`. Just above `r_h`
    /// the optimizer noise in `~E_h` can flip the sign of the `E2` argument.
    fn member(&self, q: &OuterQuery, r: f64) -> Result<f64> {
        match self.line(q, r) {
            Err(Error::Infeasible(_)) => Ok(f64::INFINITY),
            other => other,
        }
    }

    /// Minimum of the family over `r` in `[max(r_h, R), C]`: a grid of 200
    /// points refined by golden section in the cells next to the best one.
    pub fn envelope(&self, q: &OuterQuery) -> Result<OuterPoint> {
        let r_h = self.r_h(q)?;
        let c = self.capacity();
        let lo = r_h.max(q.rate).min(c);
        if c - lo <= 0.0 || q.rate == 0.0 {
            return Ok(OuterPoint { value: self.line(q, lo)?, r: lo, r_h });
        }
        let grid: Vec<f64> = (0..GRID).map(|i| lo + (c - lo) * i as f64 / (GRID - 1) as f64).collect();
        let vals = grid.iter().map(|&r| self.member(q, r)).collect::<Result<Vec<f64>>>()?;
        let (i, &best) = vals.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).expect("nonempty grid");
        let (a, b) = (grid[i.saturating_sub(1)], grid[(i + 1).min(GRID - 1)]);
        let mut failure = None;
        let (r, v) = golden_min(a, b, 1e-12 * c.max(1.0), |r| {
            self.member(q, r).unwrap_or_else(|e| {
                failure.get_or_insert(e);
                f64::INFINITY
            })
        });
        if let Some(e) = failure {
            return Err(e);
        }
        Ok(if v < best { OuterPoint { value: v, r, r_h } } else { OuterPoint { value: best, r: grid[i], r_h } })
    }
}

/// `OuterBound::new(w)?.envelope(q)`.
pub fn outer_envelope(w: &Channel, q: &OuterQuery) -> Result<OuterPoint> {
    OuterBound::new(w)?.envelope(q)
}
