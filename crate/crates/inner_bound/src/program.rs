//! The inner minimization at fixed `(alpha, P, x)` and fixed exponent curve.
//!
//! With `e(r) = alpha c(r / alpha)` for a tangent curve `c` and
//! `f(T) = (1 - alpha) F(T / (1 - alpha), x)`, the program is
//!
//! ```text
//! min  e(R2) + R1 - R + f(T)
//! s.t. e(R1) + R2 - R + T <= E_x,   R1 >= R2 >= R,   T >= 0.
//! ```
//!
//! It is convex, so we follow its Lagrangian minimizers as the multiplier
//! `mu = sigma / (1 - sigma)` runs over `[0, inf]`. For a given `mu` the
//! minimizers are tangent points: `R1` where `e` has slope `-1/mu`, `R2`
//! where it has slope `-mu`, `T` where `f` has slope `-mu`, clamped to the
//! ordering constraints. In tilt coordinates these are `s = 1 - sigma`,
//! `s = sigma` and `s = 1 - sigma`. The constraint value is nonincreasing in
//! `sigma`; bisection locates the crossing and the two bracketing minimizers
//! are mixed to meet the constraint exactly.

use channel_core::{Channel, Result};
use control_phase::{tilted_divergences, ControlType};
use exponents::TangentCurve;

const SIGMA_TOL: f64 = 1e-15;
/// Slack allowed on the erasure constraint at `mu = inf`.
const FEAS_TOL: f64 = 1e-12;

/// One point of the program: the two rates, the control budget, and the
/// objective and constraint values there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Primal {
    pub r1: f64,
    pub r2: f64,
    pub t: f64,
    pub obj: f64,
    pub cons: f64,
    pub sigma: f64,
}

impl Primal {
    /// `theta * self + (1 - theta) * other`, componentwise.
    fn mix(&self, other: &Primal, theta: f64) -> Primal {
        let m = |a: f64, b: f64| theta * a + (1.0 - theta) * b;
        Primal {
            r1: m(self.r1, other.r1),
            r2: m(self.r2, other.r2),
            t: m(self.t, other.t),
            obj: m(self.obj, other.obj),
            cons: m(self.cons, other.cons),
            sigma: m(self.sigma, other.sigma),
        }
    }
}

pub(crate) struct Program<'a, C: TangentCurve> {
    curve: &'a C,
    w: &'a Channel,
    x: &'a ControlType,
    alpha: f64,
    rate: f64,
    /// `e(R)`
    at_rate: f64,
    /// scaled tangent point with slope -1
    half: (f64, f64),
}

impl<'a, C: TangentCurve> Program<'a, C> {
    pub fn new(curve: &'a C, w: &'a Channel, x: &'a ControlType, alpha: f64, rate: f64) -> Self {
        let at_rate = alpha * curve.value_at(rate / alpha);
        let (hr, hv) = curve.tangent(0.5);
        Self { curve, w, x, alpha, rate, at_rate, half: (alpha * hr, alpha * hv) }
    }

    fn scaled(&self, s: f64) -> (f64, f64) {
        let (r, v) = self.curve.tangent(s);
        (self.alpha * r, self.alpha * v)
    }

    /// `(T, f(T))` where `f` has slope `-sigma/(1-sigma)`. Without a control
    /// phase only `T = 0` is allowed and costs nothing.
    fn control(&self, sigma: f64) -> Result<(f64, f64)> {
        if self.alpha >= 1.0 {
            return Ok((0.0, 0.0));
        }
        let (da, dr) = tilted_divergences(self.w, self.x, 1.0 - sigma)?;
        Ok(((1.0 - self.alpha) * da, (1.0 - self.alpha) * dr))
    }

    fn lagrangian(&self, sigma: f64) -> Result<Primal> {
        let r = self.rate;
        let (a, ea) = self.scaled(1.0 - sigma);
        let (b, eb) = self.scaled(sigma);
        let (r1, e1, r2, e2) = if a >= b.max(r) {
            let (r2, e2) = if b >= r { (b, eb) } else { (r, self.at_rate) };
            (a, ea, r2, e2)
        } else {
            // the ordering constraint binds: R1 = R2 at the slope -1 point
            let (rho, e) = if self.half.0 >= r { self.half } else { (r, self.at_rate) };
            (rho, e, rho, e)
        };
        let (t, f) = self.control(sigma)?;
        Ok(Primal { r1, r2, t, obj: e2 + r1 - r + f, cons: e1 + r2 - r + t, sigma })
    }

    /// Minimizer of the program under erasure budget `ex`; `None` when no
    /// point with a finite objective meets the budget.
    pub fn solve(&self, ex: f64) -> Result<Option<Primal>> {
        let free = self.lagrangian(0.0)?;
        if free.cons <= ex {
            return Ok(Some(free));
        }
        let tight = self.lagrangian(1.0)?;
        if tight.cons > ex + FEAS_TOL {
            return Ok(None);
        }
        if tight.cons >= ex {
            return Ok(Some(tight));
        }
        let (mut lo, mut hi) = (free, tight);
        while hi.sigma - lo.sigma > SIGMA_TOL {
            let mid = 0.5 * (lo.sigma + hi.sigma);
            if mid <= lo.sigma || mid >= hi.sigma {
                break;
            }
            let p = self.lagrangian(mid)?;
            if p.cons <= ex {
                hi = p;
            } else {
                lo = p;
            }
        }
        let theta = ((ex - hi.cons) / (lo.cons - hi.cons)).clamp(0.0, 1.0);
        Ok(Some(lo.mix(&hi, theta)))
    }

    /// Only the feasibility part of [`Program::solve`].
    pub fn is_infeasible(&self, ex: f64) -> Result<bool> {
        if self.lagrangian(0.0)?.cons <= ex {
            return Ok(false);
        }
        Ok(self.lagrangian(1.0)?.cons > ex + FEAS_TOL)
    }
}
