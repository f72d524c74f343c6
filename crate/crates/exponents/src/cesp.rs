//! Sphere packing with the output marginal pinned to `Q`.
//!
//! On `{V : P V = Q}` the mutual information equals `D(V || Q | P)`, so the
//! minimizers of `D(V || W | P) + s/(1-s) I(P, V)` are the couplings of `P`
//! and `Q` obtained by diagonal scaling of the kernel `P(x) W(y|x)^(1-s)`.
//! At `s = 1` the kernel is the support indicator of `W`.

use channel_core::numeric::{illinois, Neumaier};
use channel_core::{kl, Channel, ConditionalChannel, Distribution, Error, Result};
use serde::{Deserialize, Serialize};

use crate::{ExponentCurvePoint, TangentCurve};

const SINKHORN_TOL: f64 = 1e-14;
const SINKHORN_MAX_ITER: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CespRange {
    pub r_low: f64,
    pub r_high: f64,
}

struct Coupling {
    rate: f64,
    value: f64,
    v: ConditionalChannel,
}

/// A coupling of `P` and `Q` supported inside `supp W` exists iff
/// `P(A) <= Q(N(A))` for every set `A` of used inputs.
fn hall_feasible(w: &Channel, p: &[f64], q: &[f64]) -> bool {
    let used: Vec<usize> = (0..w.nx()).filter(|&x| p[x] > 0.0).collect();
    if used.len() > 20 {
        return true;
    }
    (1u32..(1 << used.len())).all(|mask| {
        let members: Vec<usize> = (0..used.len()).filter(|i| mask >> i & 1 == 1).map(|i| used[i]).collect();
        let pa: f64 = members.iter().map(|&x| p[x]).sum();
        let qn: f64 = (0..w.ny()).filter(|&y| members.iter().any(|&x| w.get(x, y) > 0.0)).map(|y| q[y]).sum();
        pa <= qn + 1e-12
    })
}

fn couple(w: &Channel, p: &[f64], q: &[f64], s: f64) -> Coupling {
    let (nx, ny) = (w.nx(), w.ny());
    let kernel: Vec<f64> = (0..nx * ny)
        .map(|i| {
            let (x, y) = (i / ny, i % ny);
            let wv = w.get(x, y);
            if p[x] == 0.0 || q[y] == 0.0 || wv == 0.0 {
                0.0
            } else if s >= 1.0 {
                1.0
            } else {
                wv.powf(1.0 - s)
            }
        })
        .collect();
    let mut u = vec![1.0; nx];
    let mut v = vec![1.0; ny];
    for _ in 0..SINKHORN_MAX_ITER {
        for x in 0..nx {
            let z: f64 = (0..ny).map(|y| kernel[x * ny + y] * v[y]).sum();
            u[x] = if z > 0.0 { 1.0 / z } else { 0.0 };
        }
        let mut err = 0.0f64;
        for y in 0..ny {
            let z: f64 = (0..nx).map(|x| p[x] * kernel[x * ny + y] * u[x]).sum();
            err = err.max((z * v[y] - q[y]).abs());
            v[y] = if z > 0.0 { q[y] / z } else { 0.0 };
        }
        if err < SINKHORN_TOL {
            break;
        }
    }
    let rows: Vec<Vec<f64>> = (0..nx)
        .map(|x| {
            if p[x] == 0.0 {
                return w.row(x).to_vec();
            }
            let r: Vec<f64> = (0..ny).map(|y| kernel[x * ny + y] * u[x] * v[y]).collect();
            let z: f64 = r.iter().sum();
            r.into_iter().map(|e| e / z).collect()
        })
        .collect();
    let mut rate = Neumaier::new();
    let mut value = Neumaier::new();
    for x in 0..nx {
        if p[x] > 0.0 {
            rate.add(p[x] * kl(&rows[x], q));
            value.add(p[x] * kl(&rows[x], w.row(x)));
        }
    }
    let v = ConditionalChannel::new(rows).expect("scaled rows are distributions");
    Coupling { rate: rate.value().max(0.0), value: value.value().max(0.0), v }
}

fn check(w: &Channel, p: &Distribution, q: &Distribution) -> Result<()> {
    if p.len() != w.nx() {
        return Err(Error::Dimension { expected: w.nx(), got: p.len() });
    }
    if q.len() != w.ny() {
        return Err(Error::Dimension { expected: w.ny(), got: q.len() });
    }
    Ok(())
}

/// `[R_low, R_high]`: the smallest mutual information of a channel `V << W`
/// with `P V = Q`, and the rate of the marginal-only minimizer (beyond which
/// the rate constraint is inactive).
pub fn cesp_range(w: &Channel, p: &Distribution, q: &Distribution) -> Result<CespRange> {
    check(w, p, q)?;
    if !hall_feasible(w, p, q) {
        return Err(Error::Infeasible("no channel V << W has output marginal Q under P".into()));
    }
    let r_low = couple(w, p, q, 1.0).rate;
    let r_high = couple(w, p, q, 0.0).rate.max(r_low);
    Ok(CespRange { r_low, r_high })
}

/// The pinned-marginal curve `R -> cesp(R, P, Q)` through its tangent
/// points; `None` from [`CespFamily::new`] when `Q` is unreachable.
pub struct CespFamily<'a> {
    w: &'a Channel,
    p: &'a Distribution,
    q: Vec<f64>,
    range: CespRange,
}

impl<'a> CespFamily<'a> {
    pub fn new(w: &'a Channel, p: &'a Distribution, q: &Distribution) -> Result<Option<Self>> {
        check(w, p, q)?;
        match cesp_range(w, p, q) {
            Ok(range) => Ok(Some(Self { w, p, q: q.weights().to_vec(), range })),
            Err(Error::Infeasible(_)) => Ok(None),
            Err(e) => Err(e),
        }
    }

    pub fn range(&self) -> CespRange {
        self.range
    }

    fn couple(&self, s: f64) -> Coupling {
        couple(self.w, self.p.weights(), &self.q, s)
    }

    /// `(rate, value, V)` at rate `r`; `None` below `r_low`.
    fn solve(&self, r: f64) -> Option<Coupling> {
        let range = self.range;
        Some(if r >= range.r_high {
            self.couple(0.0)
        } else if r < range.r_low - 1e-12 {
            return None;
        } else if r <= range.r_low {
            self.couple(1.0)
        } else {
            let s = illinois(0.0, 1.0, 1e-13, |s| self.couple(s).rate - r);
            self.couple(s)
        })
    }
}

impl TangentCurve for CespFamily<'_> {
    fn tangent(&self, s: f64) -> (f64, f64) {
        let c = self.couple(s);
        (c.rate, c.value)
    }

    fn value_at(&self, r: f64) -> f64 {
        self.solve(r).map_or(f64::INFINITY, |c| c.value)
    }
}

/// `min { D(V || W | P) : P V = Q, I(P, V) <= R }`; infinite when no channel
/// `V << W` meets both constraints.
pub fn cesp(w: &Channel, r: f64, p: &Distribution, q: &Distribution) -> Result<ExponentCurvePoint> {
    if r.is_nan() || r < 0.0 {
        return Err(Error::Invalid(format!("rate {r} must be nonnegative")));
    }
    let infinite = || ExponentCurvePoint { rate: r, value: f64::INFINITY, witness_v: None, witness_p: p.clone() };
    let Some(fam) = CespFamily::new(w, p, q)? else {
        return Ok(infinite());
    };
    Ok(match fam.solve(r) {
        Some(c) => ExponentCurvePoint { rate: r, value: c.value, witness_v: Some(c.v), witness_p: p.clone() },
        None => infinite(),
    })
}
