//! The constant chain against direct floating-point evaluation, and the
//! first-passage time against quadrature of `dt = dφ / φ'`.

use std::f64::consts::{LN_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sphereflow::constants::{
    michael_simon_constant_3d, pinching_constant, sobolev_constant, t1_bound, t1_ode, ConstantChain,
};

/// `Γ(n/2 + 1)` by its product formula.
fn gamma_half_plus_one(n: u32) -> f64 {
    if n % 2 == 0 {
        (1..=n / 2).map(|k| k as f64).product()
    } else {
        PI.sqrt() * (0..=n / 2).map(|k| k as f64 + 0.5).product::<f64>()
    }
}

struct Direct {
    entries: Vec<(&'static str, f64)>,
}

fn direct_chain(n: usize, p: f64, q: f64, l: f64) -> Direct {
    let nf = n as f64;
    let sigma = PI.powf(nf / 2.0) / gamma_half_plus_one(n as u32);
    let cn = 4f64.powf(nf + 1.0) * sigma.powf(-1.0 / nf);
    let ct = (nf * cn).powf((nf - 2.0) / (nf - 1.0));
    let ch = (2.0 * ct).powf(2.0 * (nf - 1.0) / (nf - 2.0));
    let cb = 4.0 * ch;
    let g0 = nf * (p + nf - 2.0) / ((nf - 2.0) * (p - nf));
    let c = cb.powf(g0 + 1.0);
    let k = c.powf(nf / p);
    let e = nf / (p - nf);
    let c1 = 1.5
        * p
        * (nf.powf(e) * k + k * (p - nf) / p * (3.0 * nf * p * k / (8.0 * (p - 2.0))).powf(e));
    let t1 = p * LN_2
        / (p * (nf * p
            + 1.5 * p * k * (2.0 * l).powi(2)
            + c1 * (2.0 * l).powf(2.0 * p / (p - nf))));
    let ep = p / (p - nf);
    let bw = 1.0 + nf.powf(ep) * (2.0 * l).powf(2.0 * ep);
    let lk = (2.0 * l).powi(2) * k;
    let c2 = 13.0
        * (lk * bw.powf(nf / p) * q.powf(-(1.0 + e))
            + lk * (p - nf) / p * (13.0 * q * lk * (nf / p) / (3.0 * (q - 1.0))).powf(e));
    let t2 = t1.min(q * LN_2 / (c2 * q.powf(ep)));
    let c3 = c * (q / (q - 1.0)).max(bw * t2);
    let c4 = 4.0
        * (1.0 + 2.0 / nf).powf(nf * p * (nf + 2.0) / (2.0 * q * (p - nf)))
        * c3.powf(nf / q)
        * (c2 * q.powf(2.0 * nf / (p - nf) + 1.0) + (nf + 2.0).powi(2) / (2.0 * nf * t2))
            .powf((nf + 2.0) / q)
        * t2.powf(2.0 / q);
    let num = if n == 3 { 4.0 / 3.0 } else { 2.0 };
    let cap1 = (num / c4).sqrt();

    let w = 40_000.0;
    let kq = c.powf(nf / q);
    let b = 1.0 + (2.0 * l).powf(2.0 * p / (p - nf));
    let m1 = (nf / (p - nf)).max(nf / (q - nf)) + 1.0;
    let l2 = (2.0 * l).powi(2);
    let c5 = 2.0 * w * kq * nf / q + 2.0 / nf * l2 * k * nf / p;
    let x5 = c5 * p / (4.0 * (p - 2.0));
    let c6 = 2.0 * w * b.powf(nf / q) * kq
        + 2.0 * w * kq * (q - nf) / q * x5.powf(nf / (q - nf))
        + 2.0 / nf * l2 * b.powf(nf / p) * k
        + 2.0 / nf * l2 * k * (p - nf) / p * x5.powf(nf / (p - nf))
        + 2.0 * nf;
    let t1m = p * 1.5f64.ln() / (c6 * (p / 2.0).powf(m1));
    let c7 = 13.0 * w * kq * nf / q + 2.0 / nf * l2 * k * nf / p;
    let x7 = c7 * q / (3.0 * (q - 1.0));
    let c8 = 13.0 * w * b.powf(nf / q) * kq
        + 13.0 * w * kq * (q - nf) / q * x7.powf(nf / (q - nf))
        + 2.0 / nf * l2 * b.powf(nf / p) * k
        + 2.0 / nf * l2 * k * (p - nf) / p * x7.powf(nf / (p - nf));
    let t2m = p * 1.5f64.ln() / (c8 * q.powf(m1));
    let t0 = t1m.min(t2m);
    let c9 = c * (q / (q - 1.0)).max(b * t0);
    let qh = nf * (nf + 2.0) / (4.0 * q) * m1;
    let c10 = 4.0
        * (1.0 + 2.0 / nf).powf(2.0 * qh)
        * c9.powf(nf / q)
        * (c8 * q.powf(m1) + (nf + 2.0).powi(2) / (nf * t0)).powf((nf + 2.0) / q)
        * (t0 / 2.0).powf(2.0 / q);
    let cap2 = (num / c10).sqrt();
    Direct {
        entries: vec![
            ("sigma_n", sigma),
            ("c_n", cn),
            ("c_tilde_n", ct),
            ("c_hat_n", ch),
            ("C_n", cb),
            ("gamma_0", g0),
            ("C_n_alpha0", c),
            ("c_1", c1),
            ("T_1", t1),
            ("c_2", c2),
            ("T_2", t2),
            ("c_3", c3),
            ("c_4", c4),
            ("C_1", cap1),
            ("c_5", c5),
            ("c_6", c6),
            ("T_1'", t1m),
            ("c_7", c7),
            ("c_8", c8),
            ("T_2'", t2m),
            ("T_0", t0),
            ("c_9", c9),
            ("c_10", c10),
            ("C_2", cap2),
        ],
    }
}

fn assert_chain_matches(n: usize, p: f64, q: f64, l: f64, min_compared: usize) {
    let chain = ConstantChain::new(n, p, q, l).unwrap();
    let direct = direct_chain(n, p, q, l);
    let mut compared = 0;
    for (name, want) in direct.entries {
        let got = chain.get(name).unwrap();
        if !(want.is_normal()) {
            continue;
        }
        let got = got.try_f64().unwrap();
        assert!(
            (got - want).abs() <= 1e-12 * want.abs(),
            "{name} at ({n},{p},{q},{l}): {got:e} vs {want:e}"
        );
        compared += 1;
    }
    assert!(compared >= min_compared, "only {compared} entries fit f64");
}

#[test]
fn dual_evaluation_at_4_8_8_100() {
    assert_chain_matches(4, 8.0, 8.0, 100.0, 10);
}

#[test]
fn dual_evaluation_more_points() {
    assert_chain_matches(3, 6.0, 6.0, 100.0, 10);
    assert_chain_matches(3, 7.5, 9.0, 0.5, 10);
    assert_chain_matches(5, 9.0, 12.0, 2.0, 8);
}

#[test]
fn closed_form_values() {
    let cn = ConstantChain::new(3, 6.0, 6.0, 100.0)
        .unwrap()
        .get("c_n")
        .unwrap()
        .to_f64();
    let want = michael_simon_constant_3d();
    assert!((cn - want).abs() <= 1e-12 * want);
    assert!((want - 158.808).abs() < 2e-3);
    assert_eq!(sobolev_constant(3, 6.0).unwrap().gamma0, 7.0);
}

#[test]
fn chain_is_positive_and_sobolev_monotone() {
    for n in 3..=6 {
        let mut last = f64::INFINITY;
        for k in 1..=12 {
            let a = n as f64 + 0.5 * k as f64;
            let c = sobolev_constant(n, a).unwrap().c_n_alpha.ln();
            assert!(c <= last);
            last = c;
        }
        for p in [n as f64 + 1.0, 2.0 * n as f64] {
            let chain = ConstantChain::new(n, p, p, 100.0).unwrap();
            assert!(chain
                .entries
                .iter()
                .all(|e| !e.value.is_zero() && e.value.ln().is_finite()));
        }
    }
}

#[test]
fn pinching_grid_is_finite_and_at_most_100() {
    for n in 3..=6 {
        for p in (n + 1)..=(2 * n) {
            let c = pinching_constant(n, p as f64).unwrap();
            assert!(!c.is_zero() && c.ln().is_finite() && c.ln() <= 100f64.ln());
        }
    }
}

/// `ln(K)` and `ln(c₁)` of the comparison ODE, evaluated in logs.
fn ode_coefficients(n: usize, p: f64) -> (f64, f64) {
    let nf = n as f64;
    let ln_sigma = (nf / 2.0) * PI.ln() - gamma_half_plus_one(n as u32).ln();
    let ln_cn = (nf + 1.0) * 4f64.ln() - ln_sigma / nf;
    let e = (nf - 2.0) / (nf - 1.0);
    let ln_ct = e * (nf.ln() + ln_cn);
    let ln_cb = 4f64.ln() + (2.0 / e) * (2f64.ln() + ln_ct);
    let g0 = nf * (p + nf - 2.0) / ((nf - 2.0) * (p - nf));
    let ln_k = nf / p * (g0 + 1.0) * ln_cb;
    let x = nf / (p - nf);
    let a = x * nf.ln() + ln_k;
    let b = ln_k + ((p - nf) / p).ln() + x * ((3.0 * nf * p / (8.0 * (p - 2.0))).ln() + ln_k);
    let hi = a.max(b);
    let ln_c1 = (1.5 * p).ln() + hi + ((a - hi).exp() + (b - hi).exp()).ln();
    (ln_k, ln_c1)
}

/// `∫ ds / s'` over `[p ln Λ, p ln 2Λ]` by composite Simpson in `s = ln φ`,
/// returned as a logarithm.
fn ln_first_passage(n: usize, p: f64, l: f64) -> f64 {
    let nf = n as f64;
    let (ln_k, ln_c1) = ode_coefficients(n, p);
    let ln_rate = |s: f64| {
        let t = [
            (nf * p).ln(),
            (1.5 * p).ln() + ln_k + 2.0 / p * s,
            ln_c1 + 2.0 / (p - nf) * s,
        ];
        let hi = t.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        hi + t.iter().map(|x| (x - hi).exp()).sum::<f64>().ln()
    };
    let s0 = p * l.ln();
    let s1 = s0 + p * LN_2;
    let base = ln_rate(s0);
    let m = 200_000;
    let h = (s1 - s0) / m as f64;
    let f = |s: f64| (base - ln_rate(s)).exp();
    let mut acc = f(s0) + f(s1);
    for i in 1..m {
        acc += if i % 2 == 1 { 4.0 } else { 2.0 } * f(s0 + i as f64 * h);
    }
    (acc * h / 3.0).ln() - base
}

#[test]
fn first_passage_against_quadrature() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..50 {
        let n = rng.gen_range(3..=6);
        let p = n as f64 + rng.gen_range(0.5..2.0 * n as f64);
        let l = 10f64.powf(rng.gen_range(-2.0..3.0));
        let ode = t1_ode(n, p, l).unwrap();
        let bound = t1_bound(n, p, l).unwrap();
        assert!(bound <= ode, "({n},{p},{l}): {bound} > {ode}");
        let want = ln_first_passage(n, p, l);
        assert!(
            (ode.ln() - want).abs() < 1e-6,
            "({n},{p},{l}): {} vs {want}",
            ode.ln()
        );
    }
}
