//! Scalar search routines and compensated summation.
//!
//! Everything here works on plain `f64` closures; `f64::INFINITY` is a valid
//! objective value and compares the usual way.

/// Neumaier-compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        if !x.is_finite() || !self.sum.is_finite() {
            self.sum += x;
            return;
        }
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        if self.sum.is_finite() {
            self.sum + self.comp
        } else {
            self.sum
        }
    }
}

pub fn nsum<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    let mut acc = Neumaier::new();
    for x in it {
        acc.add(x);
    }
    acc.value()
}

/// `p ln(p/q)` with `0 ln(0/q) = 0` and `p ln(p/0) = +inf`.
#[inline]
pub fn plogpq(p: f64, q: f64) -> f64 {
    if p <= 0.0 {
        0.0
    } else if q <= 0.0 {
        f64::INFINITY
    } else {
        p * (p / q).ln()
    }
}

/// Weight times value with `0 * inf = 0`.
#[inline]
pub fn wmul(weight: f64, value: f64) -> f64 {
    if weight == 0.0 {
        0.0
    } else {
        weight * value
    }
}

/// Boundary of a monotone predicate on `[lo, hi]`.
///
/// `pred` must be false at `lo` and true at `hi` (not checked). Returns the
/// final bracket `(last_false, first_true)`.
pub fn bisect<F: FnMut(f64) -> bool>(mut lo: f64, mut hi: f64, tol: f64, mut pred: F) -> (f64, f64) {
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (lo, hi)
}

/// Root of a decreasing function on `[lo, hi]` by the Illinois variant of
/// regula falsi.
///
/// `f(lo) > 0 >= f(hi)` is assumed. Returns a point `x` with `f(x) <= 0`
/// that is within `tol` of the root or has `|f(x)| <= 1e-15`.
pub fn illinois<F: FnMut(f64) -> f64>(mut lo: f64, mut hi: f64, tol: f64, mut f: F) -> f64 {
    let mut flo = f(lo);
    let mut fhi = f(hi);
    if fhi > 0.0 {
        return hi;
    }
    if flo <= 0.0 {
        return lo;
    }
    let mut side = 0i8;
    for _ in 0..200 {
        if hi - lo <= tol || fhi >= -1e-15 {
            break;
        }
        let mut x = hi - fhi * (hi - lo) / (fhi - flo);
        if !(x > lo && x < hi) {
            x = 0.5 * (lo + hi);
        }
        let fx = f(x);
        if fx <= 0.0 {
            hi = x;
            fhi = fx;
            if side == -1 {
                flo *= 0.5;
            }
            side = -1;
        } else {
            lo = x;
            flo = fx;
            if side == 1 {
                fhi *= 0.5;
            }
            side = 1;
        }
    }
    hi
}

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section minimization of a unimodal function on `[a, b]`.
pub fn golden_min<F: FnMut(f64) -> f64>(mut a: f64, mut b: f64, tol: f64, mut f: F) -> (f64, f64) {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..300 {
        if (b - a).abs() <= tol {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

pub fn golden_max<F: FnMut(f64) -> f64>(a: f64, b: f64, tol: f64, mut f: F) -> (f64, f64) {
    let (x, v) = golden_min(a, b, tol, |t| -f(t));
    (x, -v)
}

/// Uniform grid of `n` points followed by golden refinement around the best
/// grid cell. The result is never worse than the best grid value.
pub fn grid_golden_min<F: FnMut(f64) -> f64>(a: f64, b: f64, n: usize, tol: f64, mut f: F) -> (f64, f64) {
    let n = n.max(2);
    let h = (b - a) / (n - 1) as f64;
    let mut best = (a, f(a));
    let mut best_i = 0;
    for i in 1..n {
        let x = if i == n - 1 { b } else { a + h * i as f64 };
        let v = f(x);
        if v < best.1 {
            best = (x, v);
            best_i = i;
        }
    }
    let lo = if best_i == 0 { a } else { a + h * (best_i - 1) as f64 };
    let hi = if best_i + 1 >= n { b } else { a + h * (best_i + 1) as f64 };
    let refined = golden_min(lo, hi, tol, &mut f);
    if refined.1 < best.1 {
        refined
    } else {
        best
    }
}

pub fn grid_golden_max<F: FnMut(f64) -> f64>(a: f64, b: f64, n: usize, tol: f64, mut f: F) -> (f64, f64) {
    let (x, v) = grid_golden_min(a, b, n, tol, |t| -f(t));
    (x, -v)
}

/// Euclidean projection onto the probability simplex.
pub fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut u: Vec<f64> = v.to_vec();
    u.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    let mut css = 0.0;
    let mut theta = 0.0;
    for (i, &ui) in u.iter().enumerate() {
        css += ui;
        let t = (css - 1.0) / (i + 1) as f64;
        if ui - t > 0.0 {
            theta = t;
        }
    }
    let mut out: Vec<f64> = v.iter().map(|&x| (x - theta).max(0.0)).collect();
    let s: f64 = out.iter().sum();
    for x in &mut out {
        *x /= s;
    }
    out
}

/// Nelder-Mead minimization over the probability simplex.
///
/// Points are parametrized by their first `k-1` coordinates and projected
/// onto the simplex before evaluation; the projection distance is added as a
/// penalty so the search stays near the feasible set. Every start point is
/// run and the best result returned. Infinite objective values are allowed.
pub fn minimize_on_simplex<F: FnMut(&[f64]) -> f64>(
    starts: &[Vec<f64>],
    step: f64,
    tol: f64,
    max_evals: usize,
    mut f: F,
) -> (Vec<f64>, f64) {
    let k = starts[0].len();
    if k == 1 {
        let p = vec![1.0];
        let v = f(&p);
        return (p, v);
    }
    // returns (point, raw value, penalized value)
    let mut eval = |z: &[f64]| -> (Vec<f64>, f64, f64) {
        let mut full: Vec<f64> = z.to_vec();
        full.push(1.0 - z.iter().sum::<f64>());
        let p = project_simplex(&full);
        let dist2: f64 = full.iter().zip(&p).map(|(a, b)| (a - b) * (a - b)).sum();
        let v = f(&p);
        (p, v, v + 10.0 * dist2.sqrt())
    };

    let mut best: Option<(Vec<f64>, f64)> = None;
    for start in starts {
        let m = k - 1;
        let x0: Vec<f64> = start[..m].to_vec();
        let mut simplex: Vec<Vec<f64>> = vec![x0.clone()];
        for i in 0..m {
            let mut x = x0.clone();
            x[i] += if x[i] + step <= 1.0 { step } else { -step };
            simplex.push(x);
        }
        let mut vals: Vec<f64> = simplex.iter().map(|x| eval(x).2).collect();
        let mut evals = simplex.len();
        while evals < max_evals {
            let mut idx: Vec<usize> = (0..simplex.len()).collect();
            idx.sort_by(|&a, &b| vals[a].partial_cmp(&vals[b]).unwrap_or(std::cmp::Ordering::Equal));
            simplex = idx.iter().map(|&i| simplex[i].clone()).collect();
            vals = idx.iter().map(|&i| vals[i]).collect();
            let spread = simplex
                .iter()
                .skip(1)
                .map(|x| x.iter().zip(&simplex[0]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
                .fold(0.0, f64::max);
            let fspread = if vals[m].is_finite() { (vals[m] - vals[0]).abs() } else { f64::INFINITY };
            if spread < tol && fspread < tol {
                break;
            }
            let mut centroid = vec![0.0; m];
            for x in &simplex[..m] {
                for (c, xi) in centroid.iter_mut().zip(x) {
                    *c += xi / m as f64;
                }
            }
            let worst = simplex[m].clone();
            let along = |t: f64| -> Vec<f64> { centroid.iter().zip(&worst).map(|(c, w)| c + t * (w - c)).collect() };
            let xr = along(-1.0);
            let fr = eval(&xr).2;
            evals += 1;
            if fr < vals[0] {
                let xe = along(-2.0);
                let fe = eval(&xe).2;
                evals += 1;
                if fe < fr {
                    simplex[m] = xe;
                    vals[m] = fe;
                } else {
                    simplex[m] = xr;
                    vals[m] = fr;
                }
            } else if fr < vals[m - 1] {
                simplex[m] = xr;
                vals[m] = fr;
            } else {
                let (xc, fc) = if fr < vals[m] {
                    let xc = along(-0.5);
                    let fc = eval(&xc).2;
                    (xc, fc)
                } else {
                    let xc = along(0.5);
                    let fc = eval(&xc).2;
                    (xc, fc)
                };
                evals += 1;
                if fc < vals[m].min(fr) {
                    simplex[m] = xc;
                    vals[m] = fc;
                } else {
                    let x0 = simplex[0].clone();
                    for i in 1..=m {
                        simplex[i] = simplex[i].iter().zip(&x0).map(|(a, b)| b + 0.5 * (a - b)).collect();
                        vals[i] = eval(&simplex[i]).2;
                        evals += 1;
                    }
                }
            }
        }
        let i_best = (0..vals.len()).min_by(|&a, &b| vals[a].partial_cmp(&vals[b]).unwrap_or(std::cmp::Ordering::Equal)).unwrap_or(0);
        let (p, v, _) = eval(&simplex[i_best]);
        if best.as_ref().is_none_or(|b| v < b.1) {
            best = Some((p, v));
        }
    }
    best.expect("at least one start point")
}
