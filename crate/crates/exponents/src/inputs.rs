use channel_core::numeric::{grid_golden_max, minimize_on_simplex};
use channel_core::{Channel, Distribution};

/// Maximizes `f(P)` over input distributions.
///
/// Symmetric channels use the uniform input. Binary inputs get a grid plus
/// golden-section search; larger alphabets run Nelder-Mead from the uniform
/// point and from each vertex-leaning start.
pub fn maximize_over_inputs<F: FnMut(&Distribution) -> f64>(w: &Channel, mut f: F) -> (Distribution, f64) {
    let nx = w.nx();
    if w.is_symmetric() {
        let p = Distribution::uniform(nx);
        let v = f(&p);
        return (p, v);
    }
    let mut eval = |v: &[f64]| {
        let p = Distribution::from_unnormalized(v.to_vec()).expect("search stays on the simplex");
        f(&p)
    };
    if nx == 2 {
        let (a, v) = grid_golden_max(0.0, 1.0, 41, 1e-9, |a| eval(&[a, 1.0 - a]));
        return (Distribution::from_unnormalized(vec![a, 1.0 - a]).expect("a in [0, 1]"), v);
    }
    let mut starts = vec![vec![1.0 / nx as f64; nx]];
    for i in 0..nx {
        let mut s = vec![0.4 / (nx - 1) as f64; nx];
        s[i] = 0.6;
        starts.push(s);
    }
    let (p, v) = minimize_on_simplex(&starts, 0.1, 1e-9, 4000, |p| -eval(p));
    (Distribution::from_unnormalized(p).expect("projected point"), -v)
}
