//! Erasure exponents of error-free feedback codes.
//!
//! With positive zero-error capacity the erasure exponent of error-free codes
//! lies between `e_sp(R)` and `E_h(R)`. With zero zero-error capacity it is
//! at most `min_alpha alpha ~E_h(R/alpha) + (1 - alpha) E_x0(0)` with
//! `E_x0(0) <= -ln sup_s beta(s)`, and the two-phase scheme is error free
//! (a lower bound) wherever its error exponent is infinite.

use channel_core::constants::{mass_on_support, zero_error_positive};
use channel_core::numeric::grid_golden_min;
use channel_core::{capacity, Channel, Error, Result};
use control_phase::{beta, beta_sup};
use exponents::{haroutunian, random_coding_exponent, sphere_packing_exponent, ImprovedHaroutunian};
use inner_bound::{inner_envelope_is_infinite, InnerQuery, Mode};
use serde::{Deserialize, Serialize};

/// Resolution of the bisection for the error-free lower bound.
const LOWER_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    C0Positive,
    C0Zero,
}

impl Regime {
    pub fn of(w: &Channel) -> Self {
        if zero_error_positive(w) {
            Regime::C0Positive
        } else {
            Regime::C0Zero
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::C0Positive => "c0_positive",
            Regime::C0Zero => "c0_zero",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroErrorBounds {
    pub rate: f64,
    /// Nats per channel use; infinite only for noiseless channels.
    pub lower: f64,
    pub upper: f64,
    pub regime: Regime,
    /// Where the two values come from.
    pub note: String,
}

/// `E_x0(R)` bounds for `0 <= R < C`.
///
/// `C0 > 0`: `[e_sp(R), E_h(R)]`. The lower value assumes the confirmation
/// phase uses a zero-error code of a suitable list size, which is not built.
///
/// `C0 = 0`: the upper value minimizes `alpha ~E_h(R/alpha) + (1 - alpha)
/// E_x0(0)` over `alpha` in `[R/C, 1]`; the lower value is the largest `E_x`
/// (to 1e-6) at which the two-phase scheme is error free, 0 if there is none.
pub fn exz_bounds(w: &Channel, r: f64) -> Result<ZeroErrorBounds> {
    let c = capacity(w);
    if r.is_nan() || r < 0.0 || r >= c {
        return Err(Error::OutOfRange(format!("rate {r} outside [0, {c})")));
    }
    let regime = Regime::of(w);
    match regime {
        Regime::C0Positive => Ok(ZeroErrorBounds {
            rate: r,
            lower: sphere_packing_exponent(w, r, None)?.value,
            upper: haroutunian(w, r)?,
            regime,
            note: "lower: sphere packing, assuming a zero-error confirmation code; upper: Haroutunian".into(),
        }),
        Regime::C0Zero => Ok(ZeroErrorBounds {
            rate: r,
            lower: error_free_lower(w, r)?,
            upper: time_shared_upper(w, r, c)?,
            regime,
            note: "lower: largest erasure exponent with an error-free two-phase scheme; upper: improved Haroutunian time-shared with the zero-rate bound".into(),
        }),
    }
}

fn time_shared_upper(w: &Channel, r: f64, c: f64) -> Result<f64> {
    let zero_rate = exz_zero_rate_upper(w);
    let improved = ImprovedHaroutunian::new(w)?;
    let mut failure = None;
    let lo = r / c;
    let (_, v) = grid_golden_min(lo, 1.0, 41, 1e-10, |a| {
        if a <= 0.0 {
            return zero_rate;
        }
        match improved.value(w, (r / a).min(c)) {
            Ok(e) => a * e + (1.0 - a) * zero_rate,
            Err(e) => {
                failure.get_or_insert(e);
                f64::INFINITY
            }
        }
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(v),
    }
}

fn error_free_lower(w: &Channel, r: f64) -> Result<f64> {
    let free = |ex: f64| inner_envelope_is_infinite(w, &InnerQuery::new(r, ex, Mode::Relaxed));
    if !free(0.0)? {
        return Ok(0.0);
    }
    // above E_r(R) a single phase is used and its exponent is finite
    let (mut lo, mut hi) = (0.0, random_coding_exponent(w, r, None)?.value);
    if free(hi)? {
        return Ok(hi);
    }
    while hi - lo > LOWER_TOL {
        let mid = 0.5 * (lo + hi);
        if free(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// `-ln sup_s beta(s)`, an upper bound on the erasure exponent of error-free
/// codes at zero rate; infinite when `C0 > 0`.
pub fn exz_zero_rate_upper(w: &Channel) -> f64 {
    if zero_error_positive(w) {
        return f64::INFINITY;
    }
    -beta_sup(w).value.ln()
}

/// Lower bounds on the erasure probability of an error-free two-message
/// code of length `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErasureFloor {
    /// `(min_{x != x~} W(supp W_x~ | x))^n`: the wrong message is never
    /// ruled out.
    pub support: f64,
    /// `(1/2) (min_{x != x~} sum_y sqrt(W(y|x) W(y|x~)))^n`.
    pub bhattacharyya: f64,
    /// `(1/2) (sup_s beta(s))^n`.
    pub beta: f64,
}

impl ErasureFloor {
    pub fn best(&self) -> f64 {
        self.support.max(self.bhattacharyya).max(self.beta)
    }
}

pub fn two_message_erasure_floor(w: &Channel, n: u32) -> Result<ErasureFloor> {
    if n == 0 {
        return Err(Error::Invalid("block length must be at least 1".into()));
    }
    if w.nx() < 2 {
        return Err(Error::Invalid("two messages need two inputs".into()));
    }
    if zero_error_positive(w) {
        return Err(Error::Precondition("two inputs with disjoint outputs give error-free two-message codes".into()));
    }
    let nx = w.nx();
    let support = (0..nx)
        .flat_map(|a| (0..nx).filter(move |&b| b != a).map(move |b| (a, b)))
        .map(|(a, b)| mass_on_support(w, a, b))
        .fold(f64::INFINITY, f64::min);
    let n = n as i32;
    Ok(ErasureFloor { support: support.powi(n), bhattacharyya: 0.5 * beta(w, 0.5)?.powi(n), beta: 0.5 * beta_sup(w).value.powi(n) })
}
