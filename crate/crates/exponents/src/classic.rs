use channel_core::constants::r_infty;
use channel_core::{conditional_kl, mutual_information, Channel, ConditionalChannel, Distribution, Error, Result};

use crate::family::SpFamily;
use crate::inputs::maximize_over_inputs;
use crate::ExponentCurvePoint;

fn check_rate(r: f64) -> Result<()> {
    if r.is_nan() || r < 0.0 {
        return Err(Error::Invalid(format!("rate {r} must be nonnegative")));
    }
    Ok(())
}

/// `D(V || W | P) + |I(P, V^) - R|^+`
pub fn prand(w: &Channel, r: f64, p: &Distribution, v: &ConditionalChannel, v_hat: &ConditionalChannel) -> Result<f64> {
    let d = conditional_kl(v, w, p)?;
    let i = mutual_information(p, v_hat)?;
    Ok(d + (i - r).max(0.0))
}

/// Rate at which the sphere-packing curve at `P` has slope -1.
pub fn critical_rate(w: &Channel, p: &Distribution) -> Result<f64> {
    Ok(SpFamily::new(w, p)?.at(0.5).rate)
}

fn sp_at(w: &Channel, r: f64, p: &Distribution) -> Result<ExponentCurvePoint> {
    let fam = SpFamily::new(w, p)?;
    Ok(match fam.solve_rate(r) {
        Some(pt) => ExponentCurvePoint { rate: r, value: pt.value, witness_v: Some(pt.v), witness_p: p.clone() },
        None => ExponentCurvePoint { rate: r, value: f64::INFINITY, witness_v: None, witness_p: p.clone() },
    })
}

fn rc_at(w: &Channel, r: f64, p: &Distribution) -> Result<ExponentCurvePoint> {
    let fam = SpFamily::new(w, p)?;
    let half = fam.at(0.5);
    if r >= half.rate {
        return sp_at(w, r, p);
    }
    Ok(ExponentCurvePoint { rate: r, value: half.value + half.rate - r, witness_v: Some(half.v), witness_p: p.clone() })
}

fn optimize(w: &Channel, r: f64, at: fn(&Channel, f64, &Distribution) -> Result<ExponentCurvePoint>) -> Result<ExponentCurvePoint> {
    let (p, _) = maximize_over_inputs(w, |p| at(w, r, p).map_or(f64::NEG_INFINITY, |e| e.value));
    at(w, r, &p)
}

/// `e_sp(R, P) = min { D(V || W | P) : I(P, V) <= R }`, or its maximum over
/// `P` when no input type is given.
pub fn sphere_packing_exponent(w: &Channel, r: f64, p: Option<&Distribution>) -> Result<ExponentCurvePoint> {
    check_rate(r)?;
    match p {
        Some(p) => sp_at(w, r, p),
        None => {
            if r < r_infty(w) {
                // some input type has no channel V << W of rate r
                let (p, _) = maximize_over_inputs(w, |p| SpFamily::new(w, p).map_or(0.0, |f| f.min_rate()));
                return Ok(ExponentCurvePoint { rate: r, value: f64::INFINITY, witness_v: None, witness_p: p });
            }
            optimize(w, r, sp_at)
        }
    }
}

/// `E_r(R, P) = min_V D(V || W | P) + |I(P, V) - R|^+`, or its maximum over
/// `P` when no input type is given.
pub fn random_coding_exponent(w: &Channel, r: f64, p: Option<&Distribution>) -> Result<ExponentCurvePoint> {
    check_rate(r)?;
    match p {
        Some(p) => rc_at(w, r, p),
        None => optimize(w, r, rc_at),
    }
}
