use channel_core::numeric::{grid_golden_min, illinois, minimize_on_simplex};
use channel_core::{capacity, marginal, mutual_information_raw, Channel, Distribution, Error, Result};
use control_phase::ControlType;
use exponents::{random_coding_exponent, CespFamily, SpFamily};

use crate::program::{Primal, Program};
use crate::{InnerPoint, InnerQuery, InnerWitness, Mode};

fn check_query(q: &InnerQuery) -> Result<()> {
    if q.rate.is_nan() || q.rate < 0.0 {
        return Err(Error::Invalid(format!("rate {} must be nonnegative", q.rate)));
    }
    if q.erasure_exponent.is_nan() || q.erasure_exponent < 0.0 {
        return Err(Error::Invalid(format!("erasure exponent {} must be nonnegative", q.erasure_exponent)));
    }
    Ok(())
}

/// `E_r(R)` or `E_r(R, P)`.
fn er(w: &Channel, r: f64, p: Option<&Distribution>) -> Result<f64> {
    Ok(random_coding_exponent(w, r, p)?.value)
}

/// Smallest time-sharing constant that leaves room for the erasure exponent:
/// the root of `alpha E_r(R / alpha) = E_x`, with `E_r(., P)` when `P` is
/// given.
///
/// At `E_x = 0` every `alpha <= R/C` solves the equation; the result is
/// `R/C` (`R/I(P, W)` with `P`), the choice that keeps the first phase
/// reliable. Fails with `OutOfRegime` when `E_x > E_r(R)`.
pub fn alpha_star(w: &Channel, r: f64, ex: f64, p: Option<&Distribution>) -> Result<f64> {
    check_query(&InnerQuery::new(r, ex, Mode::Relaxed))?;
    if let Some(p) = p {
        if p.len() != w.nx() {
            return Err(Error::Dimension { expected: w.nx(), got: p.len() });
        }
    }
    let cap = match p {
        Some(p) => mutual_information_raw(p, w),
        None => capacity(w),
    };
    if ex == 0.0 {
        if r > cap {
            return Err(Error::OutOfRange(format!("rate {r} exceeds {cap}")));
        }
        return Ok(if r == 0.0 { 0.0 } else { r / cap });
    }
    let full = er(w, r, p)?;
    if ex > full {
        return Err(Error::OutOfRegime(format!("erasure exponent {ex} exceeds E_r(R) = {full}")));
    }
    if ex == full {
        return Ok(1.0);
    }
    if r == 0.0 {
        return Ok(ex / full);
    }
    // alpha E_r(R/alpha) increases from 0 at R/cap to E_r(R) at 1
    let mut failure = None;
    let alpha = illinois(r / cap, 1.0, 1e-12, |a| match er(w, r / a, p) {
        Ok(v) => ex - a * v,
        Err(e) => {
            failure = Some(e);
            0.0
        }
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(alpha),
    }
}

/// Candidate control types: every ordered pair of distinct letters and the
/// product type of `P`.
pub(crate) fn control_candidates(w: &Channel, p: &Distribution) -> Vec<ControlType> {
    let nx = w.nx();
    let mut xs: Vec<ControlType> =
        (0..nx).flat_map(|a| (0..nx).filter(move |&b| b != a).map(move |b| ControlType::point(nx, a, b))).collect();
    if let Ok(xp) = ControlType::product(p) {
        xs.push(xp);
    }
    if xs.is_empty() {
        xs.push(ControlType::point(nx, 0, 0));
    }
    xs
}

/// Some pair used by `x` has disjoint output supports, so `F(., x)` is
/// infinite everywhere.
fn has_disjoint_pair(w: &Channel, x: &ControlType) -> bool {
    x.pairs().iter().any(|&(a, b, _)| (0..w.ny()).all(|y| w.get(a, y) * w.get(b, y) == 0.0))
}

fn infinite(alpha: f64, p: &Distribution, x: &ControlType, mode: Mode) -> InnerWitness {
    InnerWitness { alpha, p: p.clone(), x: x.clone(), point: None, value: f64::INFINITY, mode }
}

fn witness(alpha: f64, p: &Distribution, x: &ControlType, mode: Mode, pr: &Primal, q: Option<Distribution>) -> InnerWitness {
    InnerWitness { alpha, p: p.clone(), x: x.clone(), point: Some(InnerPoint { r1: pr.r1, r2: pr.r2, t: pr.t, q }), value: pr.obj, mode }
}

/// Shared state for evaluating the exponent at one `(alpha, P)` and several
/// control types.
pub(crate) struct AtInput<'a> {
    w: &'a Channel,
    q: InnerQuery,
    alpha: f64,
    p: &'a Distribution,
    /// `alpha E_r(R / alpha, P)`
    pub trivial: f64,
    fam: SpFamily<'a>,
}

impl<'a> AtInput<'a> {
    pub fn new(w: &'a Channel, q: &InnerQuery, alpha: f64, p: &'a Distribution) -> Result<Self> {
        check_query(q)?;
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::Invalid(format!("alpha = {alpha} outside (0, 1]")));
        }
        let trivial = alpha * er(w, q.rate / alpha, Some(p))?;
        Ok(Self { w, q: *q, alpha, p, trivial, fam: SpFamily::new(w, p)? })
    }

    fn uses_trivial_decoder(&self) -> bool {
        self.q.erasure_exponent > self.trivial
    }

    /// `I(P, W) >= R / alpha` and `alpha E_r(R / alpha, P) >= E_x`.
    pub fn admissible(&self) -> bool {
        self.violation() == 0.0
    }

    pub fn violation(&self) -> f64 {
        let mi = self.fam.max_rate();
        (self.q.rate / self.alpha - mi - 1e-12).max(0.0) + (self.q.erasure_exponent - self.trivial - 1e-12).max(0.0)
    }

    pub fn exponent(&self, x: &ControlType) -> Result<InnerWitness> {
        let (alpha, p, mode) = (self.alpha, self.p, self.q.mode);
        if x.nx() != self.w.nx() {
            return Err(Error::Dimension { expected: self.w.nx(), got: x.nx() });
        }
        if self.uses_trivial_decoder() {
            return Ok(InnerWitness { alpha, p: p.clone(), x: x.clone(), point: None, value: self.trivial, mode });
        }
        if alpha < 1.0 && has_disjoint_pair(self.w, x) {
            return Ok(infinite(alpha, p, x, mode));
        }
        let ex = self.q.erasure_exponent;
        match mode {
            Mode::Relaxed => {
                let prog = Program::new(&self.fam, self.w, x, alpha, self.q.rate);
                Ok(match prog.solve(ex)? {
                    Some(pr) => witness(alpha, p, x, mode, &pr, None),
                    None => infinite(alpha, p, x, mode),
                })
            }
            Mode::Exact => self.exact(x),
        }
    }

    /// The program admits no finite objective under the erasure budget.
    pub fn is_infinite(&self, x: &ControlType) -> Result<bool> {
        if self.uses_trivial_decoder() {
            return Ok(false);
        }
        if self.alpha < 1.0 && has_disjoint_pair(self.w, x) {
            return Ok(true);
        }
        match self.q.mode {
            Mode::Relaxed => Program::new(&self.fam, self.w, x, self.alpha, self.q.rate).is_infeasible(self.q.erasure_exponent),
            // a shared output marginal changes which budgets are reachable
            Mode::Exact => Ok(self.exact(x)?.value.is_infinite()),
        }
    }

    fn exact_at(&self, x: &ControlType, q: &Distribution) -> Result<Option<Primal>> {
        match CespFamily::new(self.w, self.p, q)? {
            Some(fam) => Program::new(&fam, self.w, x, self.alpha, self.q.rate).solve(self.q.erasure_exponent),
            None => Ok(None),
        }
    }

    /// Minimum over the output marginal `Q` of the pinned program; the value
    /// is convex in `Q`.
    fn exact(&self, x: &ControlType) -> Result<InnerWitness> {
        let (alpha, p, mode) = (self.alpha, self.p, self.q.mode);
        let pw = marginal(p, self.w);
        let support: Vec<usize> = (0..pw.len()).filter(|&y| pw[y] > 0.0).collect();
        let embed = |z: &[f64]| -> Distribution {
            let mut full = vec![0.0; pw.len()];
            for (&y, &v) in support.iter().zip(z) {
                full[y] = v.max(0.0);
            }
            Distribution::from_unnormalized(full).expect("search point on the simplex")
        };
        let mut failure = None;
        let mut value = |z: &[f64]| -> f64 {
            match self.exact_at(x, &embed(z)) {
                Ok(pr) => pr.map_or(f64::INFINITY, |pr| pr.obj),
                Err(e) => {
                    failure = Some(e);
                    f64::INFINITY
                }
            }
        };
        let best: Vec<f64> = match support.len() {
            1 => vec![1.0],
            2 => {
                let (a, _) = grid_golden_min(0.0, 1.0, 41, 1e-11, |a| value(&[a, 1.0 - a]));
                vec![a, 1.0 - a]
            }
            k => {
                let mut starts = vec![support.iter().map(|&y| pw[y]).collect::<Vec<f64>>(), vec![1.0 / k as f64; k]];
                // output marginals of the relaxed minimizer's two rates
                let prog = Program::new(&self.fam, self.w, x, alpha, self.q.rate);
                if let Some(pr) = prog.solve(self.q.erasure_exponent)? {
                    for s in [pr.sigma, 1.0 - pr.sigma] {
                        let qs = self.fam.at(s).q;
                        starts.push(support.iter().map(|&y| qs[y]).collect());
                    }
                }
                minimize_on_simplex(&starts, 0.05, 1e-11, 3000, &mut value).0
            }
        };
        if let Some(e) = failure {
            return Err(e);
        }
        let q = embed(&best);
        Ok(match self.exact_at(x, &q)? {
            Some(pr) => witness(alpha, p, x, mode, &pr, Some(q)),
            None => infinite(alpha, p, x, mode),
        })
    }
}

/// `E_1(R, E_x, alpha, P, x)`: the error exponent of the two-phase scheme
/// with time sharing `alpha`, first-phase composition `P` and control type
/// `x`.
///
/// When `E_x > alpha E_r(R/alpha, P)` the decoder never erases and the value
/// is `alpha E_r(R/alpha, P)`. Otherwise it is the minimum over
/// `R1 >= R2 >= R`, `T >= 0` (and `Q` in exact mode) of
/// `alpha e(R2/alpha) + R1 - R + (1-alpha) F(T/(1-alpha), x)` subject to
/// `alpha e(R1/alpha) + R2 - R + T <= E_x`, where `e` is `cesp(., P, Q)`
/// in exact mode and `e_sp(., P)` in relaxed mode. At `alpha = 1` the control
/// term is 0 for `T = 0` and infinite otherwise.
pub fn inner_exponent(w: &Channel, q: &InnerQuery, alpha: f64, p: &Distribution, x: &ControlType) -> Result<InnerWitness> {
    AtInput::new(w, q, alpha, p)?.exponent(x)
}
