use channel_core::presets::{bsc, noiseless, z_channel};
use channel_core::{capacity, kl, mutual_information, output_marginal, Channel, ConditionalChannel, Distribution, Error};
use exponents::{
    cesp, cesp_range, critical_rate, haroutunian, haroutunian_improved, prand, random_coding_exponent, sphere_packing_exponent,
    ImprovedHaroutunian,
};
use proptest::prelude::*;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn close(a: f64, b: f64, tol: f64) {
    assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
}

fn hb(p: f64) -> f64 {
    -p * p.ln() - (1.0 - p) * (1.0 - p).ln()
}

fn bkl(a: f64, b: f64) -> f64 {
    kl(&[a, 1.0 - a], &[b, 1.0 - b])
}

fn v2(a: f64, b: f64) -> ConditionalChannel {
    ConditionalChannel::new(vec![vec![a, 1.0 - a], vec![b, 1.0 - b]]).unwrap()
}

fn random_channel(rng: &mut ChaCha8Rng, nx: usize, ny: usize, floor: f64) -> Channel {
    let rows = (0..nx)
        .map(|_| {
            let r: Vec<f64> = (0..ny).map(|_| floor + rng.random::<f64>()).collect();
            let s: f64 = r.iter().sum();
            r.into_iter().map(|v| v / s).collect()
        })
        .collect();
    Channel::new(rows).unwrap()
}

/// Sphere packing on the BSC with uniform input: `D(d || p)` where
/// `ln 2 - H_b(d) = R`, with `d` found by bisection on `[p, 1/2]`.
fn bsc_sphere_packing(p: f64, r: f64) -> f64 {
    if r >= 2f64.ln() - hb(p) {
        return 0.0;
    }
    if r == 0.0 {
        return bkl(0.5, p);
    }
    let (mut lo, mut hi) = (p, 0.5);
    for _ in 0..200 {
        let m = 0.5 * (lo + hi);
        if 2f64.ln() - hb(m) > r {
            lo = m;
        } else {
            hi = m;
        }
    }
    bkl(lo, p)
}

/// Brute-force `E_r(R, P)` over a grid of binary-output channels.
fn grid_random_coding(w: &Channel, p: &Distribution, r: f64, steps: usize) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..=steps {
        for j in 0..=steps {
            let v = v2(i as f64 / steps as f64, j as f64 / steps as f64);
            let d = channel_core::conditional_kl(&v, w, p).unwrap();
            let val = d + (mutual_information(p, &v).unwrap() - r).max(0.0);
            best = best.min(val);
        }
    }
    best
}

fn bisect_boundary(mut ok: f64, mut bad: f64, feasible: impl Fn(f64) -> bool) -> f64 {
    for _ in 0..100 {
        let m = 0.5 * (ok + bad);
        if feasible(m) {
            ok = m;
        } else {
            bad = m;
        }
    }
    ok
}

/// Brute-force `cesp(R, P, Q)` on a 2x2 channel. With `P V = Q` fixed, `V` is
/// determined by its first entry `a`; the grid over `a` is completed by the
/// exact points where the rate constraint becomes active.
fn grid_cesp(w: &Channel, r: f64, p: &Distribution, q: &Distribution, steps: usize) -> f64 {
    let v_of = |a: f64| -> Option<ConditionalChannel> {
        let b = (q[0] - p[0] * a) / p[1];
        (-1e-15..=1.0 + 1e-15).contains(&b).then(|| v2(a, b.clamp(0.0, 1.0)))
    };
    let value = |a: f64| -> Option<(f64, f64)> {
        let v = v_of(a)?;
        let d = channel_core::conditional_kl(&v, w, p).unwrap();
        d.is_finite().then(|| (d, mutual_information(p, &v).unwrap()))
    };
    let feasible = |a: f64| value(a).is_some_and(|(_, i)| i <= r);
    let mut best = f64::INFINITY;
    for k in 0..=steps {
        let a = k as f64 / steps as f64;
        if let Some((d, i)) = value(a) {
            if i <= r {
                best = best.min(d);
            }
        }
        if k < steps {
            let a2 = (k + 1) as f64 / steps as f64;
            if feasible(a) != feasible(a2) {
                let edge = if feasible(a) { bisect_boundary(a, a2, feasible) } else { bisect_boundary(a2, a, feasible) };
                if let Some((d, _)) = value(edge) {
                    best = best.min(d);
                }
            }
        }
    }
    best
}

/// Capacity of a binary-input channel by ternary search over the input.
fn binary_capacity(v: &ConditionalChannel) -> f64 {
    let i = |a: f64| mutual_information(&Distribution::new(vec![a, 1.0 - a]).unwrap(), v).unwrap();
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..100 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if i(m1) < i(m2) {
            lo = m1;
        } else {
            hi = m2;
        }
    }
    i(0.5 * (lo + hi))
}

/// Brute-force `E_h(R)` on a 2x2 channel: a grid over `V = (a, b)` (first
/// entries of the two rows), plus, along every grid line in either
/// coordinate, the exact points where `C(V) = R`.
fn grid_haroutunian(w: &Channel, r: f64, steps: usize) -> f64 {
    let val = |a: f64, b: f64| bkl(a, w.get(0, 0)).max(bkl(b, w.get(1, 0)));
    let cap = |a: f64, b: f64| binary_capacity(&v2(a, b));
    let mut best = f64::INFINITY;
    for i in 0..=steps {
        let a = i as f64 / steps as f64;
        for j in 0..=steps {
            let b = j as f64 / steps as f64;
            if cap(a, b) <= r {
                best = best.min(val(a, b));
            }
        }
        // C(V) is convex along each line with minimum 0 on the diagonal
        for end in [0.0, 1.0] {
            if cap(a, end) > r {
                let b = bisect_boundary(a, end, |b| cap(a, b) <= r);
                best = best.min(val(a, b));
            }
            if cap(end, a) > r {
                let b = bisect_boundary(a, end, |b| cap(b, a) <= r);
                best = best.min(val(b, a));
            }
        }
    }
    best
}

#[test]
fn prand_examples() {
    let w = bsc(0.25).unwrap();
    let u = Distribution::uniform(2);
    let v = w.as_conditional().clone();
    assert_eq!(prand(&w, 0.2, &u, &v, &v).unwrap(), 0.0);
    close(prand(&w, 0.0, &u, &v, &ConditionalChannel::identity(2)).unwrap(), 2f64.ln(), 1e-15);

    let v1 = bsc(0.1).unwrap();
    let want = bkl(0.9, 0.75) + (2f64.ln() - hb(0.1) - 0.05);
    close(prand(&w, 0.05, &u, &v1, &v1).unwrap(), want, 1e-14);
    assert!(prand(&w, 0.05, &Distribution::uniform(3), &v1, &v1).is_err());
}

#[test]
fn random_coding_examples() {
    let w = bsc(0.25).unwrap();
    let u = Distribution::uniform(2);
    let c = 2f64.ln() - hb(0.25);
    let e = random_coding_exponent(&w, c + 0.01, Some(&u)).unwrap();
    assert_eq!(e.value, 0.0);
    assert!(e.witness_v.unwrap().max_abs_diff(&w) < 1e-12);

    // E_0(1) for the BSC gives the zero-rate value
    let e0 = 2f64.ln() - 2.0 * (0.75f64.sqrt() + 0.25f64.sqrt()).ln();
    for r in [0.0, 0.0862] {
        let got = random_coding_exponent(&w, r, Some(&u)).unwrap().value;
        close(got, grid_random_coding(&w, &u, r, 200), 1e-3);
        close(random_coding_exponent(&w, r, None).unwrap().value, got, 1e-9);
    }
    close(random_coding_exponent(&w, 0.0, Some(&u)).unwrap().value, e0, 1e-9);
}

#[test]
fn sphere_packing_examples() {
    let w = bsc(0.25).unwrap();
    let u = Distribution::uniform(2);
    assert_eq!(sphere_packing_exponent(&w, 0.2, Some(&u)).unwrap().value, 0.0);
    for r in [0.0, 0.02, 0.0862, 0.12] {
        close(sphere_packing_exponent(&w, r, Some(&u)).unwrap().value, bsc_sphere_packing(0.25, r), 1e-9);
    }
    close(bsc_sphere_packing(0.25, 0.0862), 0.0053041, 1e-7);

    let z = z_channel(0.2).unwrap();
    let p = Distribution::new(vec![0.4, 0.6]).unwrap();
    let e = sphere_packing_exponent(&z, 0.0, Some(&p)).unwrap();
    // rank-one V with both rows on the shared output
    close(e.value, 0.4 * 5f64.ln(), 1e-9);

    let id = noiseless(2).unwrap();
    let e = sphere_packing_exponent(&id, 0.0, Some(&u)).unwrap();
    assert_eq!(e.value, f64::INFINITY);
    assert!(e.witness_v.is_none());
    assert_eq!(sphere_packing_exponent(&id, 0.3, None).unwrap().value, f64::INFINITY);
}

#[test]
fn witnesses_satisfy_their_constraints() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let w = random_channel(&mut rng, 2, 3, 0.0);
        let p = Distribution::from_unnormalized(vec![rng.random(), rng.random()]).unwrap();
        let r = rng.random::<f64>() * mutual_information(&p, &w).unwrap();
        let e = sphere_packing_exponent(&w, r, Some(&p)).unwrap();
        let v = e.witness_v.unwrap();
        assert!(mutual_information(&p, &v).unwrap() <= r + 1e-6);
        close(channel_core::conditional_kl(&v, &w, &p).unwrap(), e.value, 1e-9);
    }
}

#[test]
fn random_coding_meets_sphere_packing_above_critical_rate() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..10 {
        let w = random_channel(&mut rng, 2, 2, 0.05);
        let p = Distribution::from_unnormalized(vec![0.2 + rng.random::<f64>(), 0.2 + rng.random::<f64>()]).unwrap();
        let ipw = mutual_information(&p, &w).unwrap();
        let rc = critical_rate(&w, &p).unwrap();
        // scan for the smallest rate where the two agree
        let mut first = None;
        for k in 0..=400 {
            let r = ipw * k as f64 / 400.0;
            let er = random_coding_exponent(&w, r, Some(&p)).unwrap().value;
            let sp = sphere_packing_exponent(&w, r, Some(&p)).unwrap().value;
            assert!(sp >= er - 1e-12);
            if first.is_none() && (sp - er).abs() <= 1e-6 {
                first = Some(r);
            }
        }
        // the curves touch with matching slopes, so agreement within 1e-6
        // starts about sqrt(2e-6 / curvature) before the critical rate
        let first = first.unwrap();
        let h = 1e-3 * ipw;
        let sp = |r: f64| sphere_packing_exponent(&w, r, Some(&p)).unwrap().value;
        let curvature = (sp(rc + h) - 2.0 * sp(rc) + sp(rc - h)) / (h * h);
        let step = ipw / 400.0;
        assert!(first <= rc + step, "{first} vs {rc}");
        assert!(rc - first <= 1.5 * (2e-6 / curvature).sqrt() + step, "{first} vs {rc}");
    }
}

#[test]
fn cesp_examples() {
    let w = bsc(0.25).unwrap();
    let u = Distribution::uniform(2);
    let pw = output_marginal(&u, &w).unwrap();
    let e = cesp(&w, 0.2, &u, &pw).unwrap();
    close(e.value, 0.0, 1e-12);
    assert!(e.witness_v.unwrap().max_abs_diff(&w) < 1e-9);

    // minimizing over Q recovers sphere packing
    let r = 0.0862;
    let mut best = f64::INFINITY;
    for k in 1..1000 {
        let q = Distribution::new(vec![k as f64 * 1e-3, 1.0 - k as f64 * 1e-3]).unwrap();
        best = best.min(cesp(&w, r, &u, &q).unwrap().value);
    }
    close(best, sphere_packing_exponent(&w, r, Some(&u)).unwrap().value, 1e-3);

    assert!(matches!(cesp(&w, r, &u, &Distribution::uniform(3)), Err(Error::Dimension { .. })));
}

#[test]
fn cesp_matches_grid_oracle_on_random_binary_channels() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..25 {
        let w = random_channel(&mut rng, 2, 2, 0.05);
        let p = Distribution::from_unnormalized(vec![0.2 + rng.random::<f64>(), 0.2 + rng.random::<f64>()]).unwrap();
        let q = Distribution::from_unnormalized(vec![0.2 + rng.random::<f64>(), 0.2 + rng.random::<f64>()]).unwrap();
        let range = cesp_range(&w, &p, &q).unwrap();
        let r = range.r_low + rng.random::<f64>() * 1.2 * (range.r_high - range.r_low);
        let got = cesp(&w, r, &p, &q).unwrap();
        let want = grid_cesp(&w, r, &p, &q, 400);
        close(got.value, want, 2e-3);
        let v = got.witness_v.unwrap();
        let pv = output_marginal(&p, &v).unwrap();
        assert!((pv[0] - q[0]).abs() <= 1e-8);
        assert!(mutual_information(&p, &v).unwrap() <= r + 1e-8);
    }
}

#[test]
fn cesp_range_examples() {
    let w = bsc(0.25).unwrap();
    let u = Distribution::uniform(2);
    let pw = output_marginal(&u, &w).unwrap();
    let range = cesp_range(&w, &u, &pw).unwrap();
    assert!(range.r_low.abs() < 1e-12);

    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..100 {
        let w = random_channel(&mut rng, 2, 2, 0.0);
        let p = Distribution::from_unnormalized(vec![rng.random(), rng.random()]).unwrap();
        let q = Distribution::from_unnormalized(vec![rng.random(), rng.random()]).unwrap();
        let range = cesp_range(&w, &p, &q).unwrap();
        assert!(0.0 <= range.r_low && range.r_low <= range.r_high);
    }

    // endpoints against a dense sweep over the one-parameter family P V = Q
    let w = Channel::new(vec![vec![0.8, 0.2], vec![0.35, 0.65]]).unwrap();
    let p = Distribution::new(vec![0.45, 0.55]).unwrap();
    let q = Distribution::new(vec![0.3, 0.7]).unwrap();
    let mut i_min = f64::INFINITY;
    let mut d_min = (f64::INFINITY, 0.0);
    for k in 0..=100_000 {
        let a = k as f64 / 100_000.0;
        let b = (q[0] - p[0] * a) / p[1];
        if !(0.0..=1.0).contains(&b) {
            continue;
        }
        let v = v2(a, b);
        let i = mutual_information(&p, &v).unwrap();
        i_min = i_min.min(i);
        let d = channel_core::conditional_kl(&v, &w, &p).unwrap();
        if d < d_min.0 {
            d_min = (d, i);
        }
    }
    let range = cesp_range(&w, &p, &q).unwrap();
    close(range.r_low, i_min, 1e-3);
    close(range.r_high, d_min.1, 1e-3);

    let z = z_channel(0.2).unwrap();
    // output 0 is unreachable from input 1, so Q(0) > P(0) is infeasible
    let q = Distribution::new(vec![0.8, 0.2]).unwrap();
    assert!(matches!(cesp_range(&z, &p, &q), Err(Error::Infeasible(_))));
    assert_eq!(cesp(&z, 0.1, &p, &q).unwrap().value, f64::INFINITY);
}

#[test]
fn haroutunian_examples() {
    let w = bsc(0.25).unwrap();
    close(haroutunian(&w, 0.0862).unwrap(), sphere_packing_exponent(&w, 0.0862, None).unwrap().value, 1e-6);
    assert_eq!(haroutunian(&w, 0.2).unwrap(), 0.0);

    let z = z_channel(0.3).unwrap();
    assert_eq!(haroutunian(&z, capacity(&z) + 1e-9).unwrap(), 0.0);
    let w = Channel::new(vec![vec![0.85, 0.15], vec![0.3, 0.7]]).unwrap();
    for r in [0.02, 0.08, 0.15] {
        close(haroutunian(&w, r).unwrap(), grid_haroutunian(&w, r, 200), 2e-3);
    }
    close(haroutunian(&z, 0.1).unwrap(), grid_haroutunian(&z, 0.1, 200), 2e-3);
}

#[test]
fn haroutunian_rejects_large_nonsymmetric_alphabets() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let w = random_channel(&mut rng, 2, 9, 0.1);
    assert!(matches!(haroutunian(&w, 0.01), Err(Error::Unsupported(_))));
}

/// `R_ht` by bisection on the tangency condition `E_h(R) - R E_h'(R) = T*`,
/// with central differences for the derivative.
fn tangency_rate(w: &Channel, t_star: f64, c: f64) -> f64 {
    let h = 1e-5;
    let g = |r: f64| {
        let d = (haroutunian(w, r + h).unwrap() - haroutunian(w, r - h).unwrap()) / (2.0 * h);
        haroutunian(w, r).unwrap() - r * d - t_star
    };
    if g(c - h) > 0.0 {
        return c;
    }
    let (mut lo, mut hi) = (2.0 * h, c - h);
    for _ in 0..40 {
        let m = 0.5 * (lo + hi);
        if g(m) > 0.0 {
            lo = m;
        } else {
            hi = m;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn improved_haroutunian_on_binary_inputs_is_plain() {
    // with two inputs T* is the equal-divergence point of E_h(0)
    for w in [bsc(0.25).unwrap(), z_channel(0.2).unwrap()] {
        let ih = ImprovedHaroutunian::new(&w).unwrap();
        assert_eq!(ih.r_ht, 0.0);
        close(ih.t_star, haroutunian(&w, 0.0).unwrap(), 1e-7);
        assert_eq!(haroutunian_improved(&w, 0.0).unwrap(), ih.t_star);
        for r in [0.01, 0.05, 0.1] {
            assert_eq!(haroutunian_improved(&w, r).unwrap(), haroutunian(&w, r).unwrap());
        }
    }
    assert!(matches!(ImprovedHaroutunian::new(&noiseless(2).unwrap()), Err(Error::Precondition(_))));
}

#[test]
fn improved_haroutunian_chord_on_three_inputs() {
    let w = Channel::new(vec![vec![0.7, 0.2, 0.1], vec![0.1, 0.7, 0.2], vec![0.25, 0.15, 0.6]]).unwrap();
    let ih = ImprovedHaroutunian::new(&w).unwrap();
    let t_star = control_phase::t_star(&w);
    assert!(haroutunian(&w, 0.0).unwrap() > t_star + 1e-3);
    let c = capacity(&w);
    let r_ht = tangency_rate(&w, t_star, c);
    close(ih.r_ht, r_ht, 1e-3);
    let r = r_ht / 2.0;
    let chord = t_star + (haroutunian(&w, r_ht).unwrap() - t_star) / r_ht * r;
    close(haroutunian_improved(&w, r).unwrap(), chord, 1e-6);
    close(haroutunian_improved(&w, 0.0).unwrap(), t_star, 1e-12);
    for r in [ih.r_ht, 0.5 * (ih.r_ht + c)] {
        assert_eq!(haroutunian_improved(&w, r).unwrap(), haroutunian(&w, r).unwrap());
    }
    // the tangent line stays below the convex curve
    for k in 1..20 {
        let r = ih.r_ht * k as f64 / 20.0;
        assert!(haroutunian_improved(&w, r).unwrap() <= haroutunian(&w, r).unwrap() + 1e-9);
    }
}

#[test]
fn exponents_are_nonincreasing_in_rate() {
    let w = Channel::new(vec![vec![0.7, 0.2, 0.1], vec![0.1, 0.7, 0.2], vec![0.25, 0.15, 0.6]]).unwrap();
    let z = z_channel(0.2).unwrap();
    for ch in [&w, &z] {
        let c = capacity(ch);
        let ih = ImprovedHaroutunian::new(ch).unwrap();
        let mut prev = [f64::INFINITY; 4];
        for k in 0..=20 {
            let r = c * k as f64 / 20.0;
            let cur = [
                random_coding_exponent(ch, r, None).unwrap().value,
                sphere_packing_exponent(ch, r, None).unwrap().value,
                haroutunian(ch, r).unwrap(),
                ih.value(ch, r).unwrap(),
            ];
            for i in 0..4 {
                assert!(cur[i] <= prev[i] + 1e-6, "curve {i} at R = {r}: {} > {}", cur[i], prev[i]);
            }
            prev = cur;
        }
    }
}

fn prob2() -> impl Strategy<Value = Distribution> {
    (0.05..0.95f64).prop_map(|a| Distribution::new(vec![a, 1.0 - a]).unwrap())
}

fn channel22() -> impl Strategy<Value = Channel> {
    (0.05..0.95f64, 0.05..0.95f64).prop_map(|(a, b)| Channel::new(vec![vec![a, 1.0 - a], vec![b, 1.0 - b]]).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sphere_packing_dominates_random_coding(w in channel22(), p in prob2(), t in 0.0..1.0f64) {
        let r = t * mutual_information(&p, &w).unwrap();
        let er = random_coding_exponent(&w, r, Some(&p)).unwrap().value;
        let sp = sphere_packing_exponent(&w, r, Some(&p)).unwrap().value;
        prop_assert!(sp >= er - 1e-12);
        if r >= critical_rate(&w, &p).unwrap() {
            prop_assert!((sp - er).abs() <= 1e-9);
        }
    }

    #[test]
    fn cesp_dominates_sphere_packing(w in channel22(), p in prob2(), q in prob2(), t in 0.0..1.2f64) {
        let r = t * mutual_information(&p, &w).unwrap();
        let c = cesp(&w, r, &p, &q).unwrap().value;
        prop_assert!(c >= sphere_packing_exponent(&w, r, Some(&p)).unwrap().value - 1e-9);
    }

    #[test]
    fn cesp_is_midpoint_convex(w in channel22(), p in prob2(), q1 in prob2(), q2 in prob2(), t1 in 0.0..1.0f64, t2 in 0.0..1.0f64) {
        let r1 = t1 * 0.4;
        let r2 = t2 * 0.4;
        let qm = q1.mix(&q2, 0.5).unwrap();
        let mid = cesp(&w, 0.5 * (r1 + r2), &p, &qm).unwrap().value;
        let avg = 0.5 * (cesp(&w, r1, &p, &q1).unwrap().value + cesp(&w, r2, &p, &q2).unwrap().value);
        prop_assert!(mid <= avg + 1e-9, "{} > {}", mid, avg);
    }
}
