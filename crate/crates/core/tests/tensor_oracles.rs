//! Pointwise tensor algebra against brute-force evaluation on nested
//! matrices, plus invariance and inequality properties.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sphereflow::sff::{
    andrews_baker_slacks, lili_slack, quartic_tolerance, reaction_terms, scalar_invariants,
    schwarz_slack, traceless_split, SffTensor,
};

type Mat = Vec<Vec<f64>>;

fn blocks(h: &SffTensor) -> Vec<Mat> {
    (0..h.d())
        .map(|a| {
            (0..h.n())
                .map(|i| (0..h.n()).map(|j| h.get(a, i, j)).collect())
                .collect()
        })
        .collect()
}

fn matmul(x: &Mat, y: &Mat) -> Mat {
    let n = x.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).map(|k| x[i][k] * y[k][j]).sum())
                .collect()
        })
        .collect()
}

fn frob(x: &Mat, y: &Mat) -> f64 {
    x.iter()
        .zip(y)
        .flat_map(|(a, b)| a.iter().zip(b).map(|(u, v)| u * v))
        .sum()
}

fn trace(x: &Mat) -> f64 {
    (0..x.len()).map(|i| x[i][i]).sum()
}

struct Oracle {
    a2: f64,
    h2: f64,
    aring2: f64,
    ah2: f64,
    r1: f64,
    r2: f64,
    r3: f64,
}

fn oracle(h: &SffTensor) -> Oracle {
    let b = blocks(h);
    let n = h.n();
    let hv: Vec<f64> = b.iter().map(trace).collect();
    let a2 = b.iter().map(|x| frob(x, x)).sum();
    let h2 = hv.iter().map(|x| x * x).sum::<f64>();
    let ring: Vec<Mat> = b
        .iter()
        .zip(&hv)
        .map(|(x, &t)| {
            let mut y = x.clone();
            for (i, row) in y.iter_mut().enumerate() {
                row[i] -= t / n as f64;
            }
            y
        })
        .collect();
    let aring2 = ring.iter().map(|x| frob(x, x)).sum();
    // Å contracted with the unit mean curvature direction
    let hn = h2.sqrt();
    let ah2 = if hn > 0.0 {
        let mut c = vec![vec![0.0; n]; n];
        for (x, &t) in ring.iter().zip(&hv) {
            for i in 0..n {
                for j in 0..n {
                    c[i][j] += t / hn * x[i][j];
                }
            }
        }
        frob(&c, &c)
    } else {
        0.0
    };
    let mut r1 = 0.0;
    let mut r2 = 0.0;
    for x in &b {
        for y in &b {
            r1 += frob(x, y).powi(2);
            let (xy, yx) = (matmul(x, y), matmul(y, x));
            let c: Mat = xy
                .iter()
                .zip(&yx)
                .map(|(u, v)| u.iter().zip(v).map(|(a, b)| a - b).collect())
                .collect();
            r2 += frob(&c, &c);
        }
    }
    let mut s = vec![vec![0.0; n]; n];
    for (x, &t) in b.iter().zip(&hv) {
        for i in 0..n {
            for j in 0..n {
                s[i][j] += t * x[i][j];
            }
        }
    }
    Oracle {
        a2,
        h2,
        aring2,
        ah2,
        r1,
        r2,
        r3: frob(&s, &s),
    }
}

fn close(a: f64, b: f64, scale: f64) -> bool {
    (a - b).abs() <= 1e-12 * scale.max(1e-300)
}

/// Orthogonal matrix from Gram–Schmidt on a seeded random matrix.
fn orthogonal(m: usize, entries: &[f64]) -> Vec<f64> {
    let mut q: Vec<Vec<f64>> = Vec::new();
    for r in 0..m {
        let mut v: Vec<f64> = entries[r * m..(r + 1) * m].to_vec();
        for _ in 0..2 {
            for u in &q {
                let d: f64 = v.iter().zip(u).map(|(a, b)| a * b).sum();
                for (x, y) in v.iter_mut().zip(u) {
                    *x -= d * y;
                }
            }
        }
        let l = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        q.push(v.iter().map(|x| x / l).collect());
    }
    q.concat()
}

#[test]
fn invariants_match_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in 2..=6 {
        for d in 1..=4 {
            for _ in 0..20 {
                let h = SffTensor::random(n, d, 3.0, &mut rng);
                let o = oracle(&h);
                let s = scalar_invariants(&h);
                let r = reaction_terms(&h);
                let split = traceless_split(&h);
                let q = o.a2 * o.a2;
                assert!(close(s.a2, o.a2, o.a2));
                assert!(close(s.h2, o.h2, o.a2));
                assert!(close(s.aring2, o.aring2, o.a2));
                assert!(close(split.a_h_norm2, o.ah2, o.a2));
                assert!(close(split.a_i_norm2, o.aring2 - o.ah2, o.a2));
                assert!(close(r.r1, o.r1, q));
                assert!(close(r.r2, o.r2, q), "{n} {d} {} {}", r.r2, o.r2);
                assert!(close(r.r3, o.r3, q));
            }
        }
    }
}

#[test]
fn umbilic_and_codimension_one_equalities() {
    // umbilic: Å = 0, R1 = |A|⁴, R2 = 0
    let h = SffTensor::umbilic(4, &[2.0, -1.0, 0.5]).unwrap();
    let s = scalar_invariants(&h);
    assert!(s.aring2 < 1e-28);
    let r = reaction_terms(&h);
    assert!(close(r.r1, s.a2 * s.a2, s.a2 * s.a2));
    assert!(r.r2.abs() < 1e-28);
    // hypersurfaces are tight in Cauchy–Schwarz
    let h = SffTensor::diagonal(&[1.0, -2.0, 3.5, 0.25]).unwrap();
    let a4 = scalar_invariants(&h).a2.powi(2);
    assert!(schwarz_slack(&h).abs() < 1e-12 * a4);
    assert!(reaction_terms(&h).r2 == 0.0);
}

fn arb_tensor() -> impl Strategy<Value = SffTensor> {
    (3usize..=5, 1usize..=3, any::<u64>(), 0.01f64..10.0).prop_map(|(n, d, seed, b)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        SffTensor::random(n, d, b, &mut rng)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn quartic_inequalities_hold(h in arb_tensor()) {
        let tol = quartic_tolerance(&h);
        prop_assert!(lili_slack(&h) >= -tol);
        prop_assert!(schwarz_slack(&h) >= -tol);
        let ab = andrews_baker_slacks(&h);
        prop_assert!(ab.first >= -tol);
        prop_assert!(ab.second >= -tol);
    }

    #[test]
    fn frame_invariance(h in arb_tensor(), seed in any::<u64>()) {
        use rand::Rng;
        let (n, d) = (h.n(), h.d());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = orthogonal(n, &(0..n * n).map(|_| rng.gen_range(-1.0..1.0)).collect::<Vec<_>>());
        let r = orthogonal(d, &(0..d * d).map(|_| rng.gen_range(-1.0..1.0)).collect::<Vec<_>>());
        let g = h.rotated(&q, &r).unwrap();
        let (a, b) = (scalar_invariants(&h), scalar_invariants(&g));
        let s = a.a2.max(1e-300);
        prop_assert!((a.a2 - b.a2).abs() <= 1e-10 * s);
        prop_assert!((a.h2 - b.h2).abs() <= 1e-10 * s);
        prop_assert!((a.aring2 - b.aring2).abs() <= 1e-10 * s);
        let (x, y) = (reaction_terms(&h), reaction_terms(&g));
        let s4 = s * s;
        prop_assert!((x.r1 - y.r1).abs() <= 1e-10 * s4);
        prop_assert!((x.r2 - y.r2).abs() <= 1e-10 * s4);
        prop_assert!((x.r3 - y.r3).abs() <= 1e-10 * s4);
        let (u, v) = (traceless_split(&h), traceless_split(&g));
        prop_assert!((u.a_h_norm2 - v.a_h_norm2).abs() <= 1e-10 * s);
    }

    #[test]
    fn scaling_homogeneity(h in arb_tensor(), k in 0.1f64..10.0) {
        let g = h.scaled(k);
        let (a, b) = (scalar_invariants(&h), scalar_invariants(&g));
        prop_assert!((b.a2 - k * k * a.a2).abs() <= 1e-12 * b.a2.max(1e-300));
        let (x, y) = (reaction_terms(&h), reaction_terms(&g));
        let k4 = k.powi(4);
        let s = y.r1.max(1e-300);
        prop_assert!((y.r1 - k4 * x.r1).abs() <= 1e-12 * s);
        prop_assert!((y.r2 - k4 * x.r2).abs() <= 1e-11 * s);
        prop_assert!((y.r3 - k4 * x.r3).abs() <= 1e-11 * s);
        prop_assert!((lili_slack(&g) - k4 * lili_slack(&h)).abs() <= 1e-11 * s);
    }
}
