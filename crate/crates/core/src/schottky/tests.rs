use super::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn cx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Two handles with small, slightly complex rho; circles near +-1 and +-2i.
fn sample_config() -> SchottkyConfig {
    SchottkyConfig::new(vec![
        Handle { w_plus: cx(1.0, 0.0), w_minus: cx(-1.0, 0.0), rho: cx(0.004, 0.0005) },
        Handle { w_plus: cx(0.0, 2.0), w_minus: cx(0.0, -2.0), rho: cx(0.003, -0.001) },
    ])
    .unwrap()
}

fn random_exterior_point(cfg: &SchottkyConfig, rng: &mut impl Rng) -> Complex64 {
    loop {
        let z = cx(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        if cfg.in_fundamental_exterior(z)
            && cfg.circles().iter().all(|(c, r)| (z - c).norm() > 3.0 * r)
        {
            return z;
        }
    }
}

#[test]
fn generator_satisfies_sewing_relation() {
    let cfg = sample_config();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for h in &cfg.handles {
        let g = schottky_generator(h);
        for _ in 0..10 {
            let z = cx(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            if (z - h.w_plus).norm() < 0.3 {
                continue;
            }
            let lhs = (g.apply(z) - h.w_minus) * (z - h.w_plus);
            assert!((lhs - h.rho).norm() < 1e-12, "relation violated: {lhs}");
        }
    }
}

#[test]
fn generator_values() {
    // w = 1, w- = -1, rho = 1/4: gamma(z) = -1 + (1/4)/(z-1), gamma(inf) = -1
    let h = Handle { w_plus: cx(1.0, 0.0), w_minus: cx(-1.0, 0.0), rho: cx(0.25, 0.0) };
    let g = schottky_generator(&h);
    assert!((g.apply(cx(2.0, 0.0)) - cx(-0.75, 0.0)).norm() < 1e-14);
    assert!((g.apply(cx(1e9, 0.0)) - cx(-1.0, 0.0)).norm() < 1e-8);
    // det normalized to 1
    assert!((g.det() - cx(1.0, 0.0)).norm() < 1e-12);
}

#[test]
fn fixed_points_are_fixed_and_ordered() {
    let cfg = sample_config();
    for h in &cfg.handles {
        let g = schottky_generator(h);
        let (att, rep) = g.fixed_points().unwrap();
        assert!((g.apply(att) - att).norm() < 1e-10);
        assert!((g.apply(rep) - rep).norm() < 1e-10);
        assert!(g.deriv(att).norm() < 1.0);
        assert!(g.deriv(rep).norm() > 1.0);
        // attracting point sits by w_minus, repelling by w_plus
        assert!((att - h.w_minus).norm() < 0.1);
        assert!((rep - h.w_plus).norm() < 0.1);
    }
}

#[test]
fn config_validation() {
    // overlapping circles: centers closer than the radius sum
    let bad = SchottkyConfig::new(vec![
        Handle { w_plus: cx(0.0, 0.0), w_minus: cx(0.05, 0.0), rho: cx(0.01, 0.0) },
        Handle { w_plus: cx(2.0, 0.0), w_minus: cx(-2.0, 0.0), rho: cx(0.01, 0.0) },
    ]);
    assert!(matches!(bad, Err(Error::CirclesOverlap(0, 1))));
    let degenerate = SchottkyConfig::new(vec![Handle {
        w_plus: cx(1.0, 0.0),
        w_minus: cx(-1.0, 0.0),
        rho: cx(0.0, 0.0),
    }]);
    assert!(matches!(degenerate, Err(Error::ZeroRho(1))));
}

#[test]
fn config_json_round_trip() {
    let text = r#"{
        "genus": 2,
        "handles": [
            {"w_plus": ["1.0", "0.0"], "w_minus": ["-1.0", "0.0"], "rho": "1/250"},
            {"w_plus": ["0.0", "2.0"], "w_minus": ["0.0", "-2.0"], "rho": ["0.003", "-0.001"]}
        ],
        "mode": "numeric",
        "max_word_len": 6
    }"#;
    let cfg = SchottkyConfig::parse_json(text).unwrap();
    assert_eq!(cfg.genus, 2);
    assert!((cfg.handles[0].rho - cx(0.004, 0.0)).norm() < 1e-15);
    assert_eq!(cfg.max_word_len, Some(6));
    let dumped = serde_json::to_string(&cfg).unwrap();
    let back = SchottkyConfig::parse_json(&dumped).unwrap();
    assert!((back.handles[1].rho - cfg.handles[1].rho).norm() < 1e-15);
}

#[test]
fn word_enumeration_counts_and_reducedness() {
    let cfg = sample_config();
    for max_len in 0..=4usize {
        let words = group_words(&cfg, max_len);
        assert_eq!(words.len(), word_count(2, max_len), "L={max_len}");
        for w in &words {
            assert!(w.letters.len() <= max_len);
            for pair in w.letters.windows(2) {
                assert_ne!(pair[0], -pair[1], "unreduced word {:?}", w.letters);
            }
        }
    }
    // g = 2 count examples: 1, 5, 17
    assert_eq!(word_count(2, 0), 1);
    assert_eq!(word_count(2, 1), 5);
    assert_eq!(word_count(2, 2), 17);
    assert_eq!(word_count(3, 2), 1 + 6 + 30);
}

#[test]
fn word_maps_compose() {
    let cfg = sample_config();
    let words = group_words(&cfg, 2);
    let g1 = schottky_generator(&cfg.handles[0]);
    let g2 = schottky_generator(&cfg.handles[1]);
    let w12 = words.iter().find(|w| w.letters == vec![1, 2]).unwrap();
    let z = cx(0.3, 0.4);
    assert!((w12.map.apply(z) - g1.apply(g2.apply(z))).norm() < 1e-12);
    let w1m = words.iter().find(|w| w.letters == vec![-1]).unwrap();
    assert!((g1.apply(w1m.map.apply(z)) - z).norm() < 1e-12);
}

#[test]
fn kernel_degree_one_form() {
    // single limit point: Pi = (y - A0)/((z - y)(z - A0))
    let a0 = cx(0.3, -0.2);
    let k = BersKernel::new(1, vec![a0]).unwrap();
    let (z, y) = (cx(1.5, 0.5), cx(-0.7, 0.1));
    let expect = (y - a0) / ((z - y) * (z - a0));
    assert!((k.pi(z, y).unwrap() - expect).norm() < 1e-14);
}

#[test]
fn kernel_residue_on_diagonal() {
    let cfg = sample_config();
    let k = BersKernel::default_for(&cfg, 2).unwrap();
    let y = cx(0.4, 0.9);
    for eps in [1e-4, 1e-5, 1e-6] {
        let z = y + cx(eps, eps / 3.0);
        let res = (z - y) * k.pi(z, y).unwrap();
        assert!((res - cx(1.0, 0.0)).norm() < 50.0 * eps, "eps={eps}");
    }
}

#[test]
fn kernel_sum_and_product_forms_agree() {
    // pi_dd(0,0) uses the Lagrange-sum representation; pi the product form
    let cfg = sample_config();
    for n in 1..=3u32 {
        let k = BersKernel::default_for(&cfg, n).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5 + n as u64);
        for _ in 0..6 {
            let z = random_exterior_point(&cfg, &mut rng);
            let y = random_exterior_point(&cfg, &mut rng);
            if (z - y).norm() < 0.2 {
                continue;
            }
            let a = k.pi(z, y).unwrap();
            let b = k.pi_dd(0, 0, z, y).unwrap();
            assert!((a - b).norm() < 1e-10 * (1.0 + a.norm()), "n={n}");
        }
    }
}

#[test]
fn kernel_divided_derivatives_match_finite_differences() {
    let cfg = sample_config();
    let k = BersKernel::default_for(&cfg, 2).unwrap();
    let (z, y) = (cx(1.9, 1.1), cx(-0.8, 0.7));
    let h = 1e-5;
    let dz = (k.pi(z + cx(h, 0.0), y).unwrap() - k.pi(z - cx(h, 0.0), y).unwrap()) / (2.0 * h);
    assert!((dz - k.pi_dd(1, 0, z, y).unwrap()).norm() < 1e-7 * (1.0 + dz.norm()));
    let dy = (k.pi(z, y + cx(h, 0.0)).unwrap() - k.pi(z, y - cx(h, 0.0)).unwrap()) / (2.0 * h);
    assert!((dy - k.pi_dd(0, 1, z, y).unwrap()).norm() < 1e-7 * (1.0 + dy.norm()));
    // second divided derivative: (1/2) d^2/dy^2
    let d2y = (k.pi(z, y + cx(h, 0.0)).unwrap() - 2.0 * k.pi(z, y).unwrap()
        + k.pi(z, y - cx(h, 0.0)).unwrap())
        / (2.0 * h * h);
    assert!((d2y - k.pi_dd(0, 2, z, y).unwrap()).norm() < 1e-4 * (1.0 + d2y.norm()));
}

#[test]
fn kernel_f_expansion_consistency() {
    // pi(z,y) - 1/(z-y) = sum_l f_l(z) y^l, exact in y (degree 2N-2)
    let cfg = sample_config();
    let k = BersKernel::default_for(&cfg, 2).unwrap();
    let (z, y) = (cx(2.1, -1.3), cx(0.5, 0.8));
    let f_part: Complex64 =
        (0..=2).map(|l| k.f_dd(l, 0, z).unwrap() * y.powu(l)).sum();
    let direct = k.pi(z, y).unwrap() - 1.0 / (z - y);
    assert!((f_part - direct).norm() < 1e-11 * (1.0 + direct.norm()));
    // e_0^0(y) = sum_l f_l(y) y^l equals the z -> y limit of that part
    let eps = 1e-6;
    let lim = k.pi(y + cx(eps, 0.0), y).unwrap() - 1.0 / cx(eps, 0.0);
    let e00 = k.e_mn(0, 0, y).unwrap();
    assert!((lim - e00).norm() < 1e-4 * (1.0 + e00.norm()));
    // e_m^n vanishes beyond the polynomial degree
    assert_eq!(k.e_mn(1, 3, y).unwrap(), cx(0.0, 0.0));
}

#[test]
fn mobius_invariance_of_kernel() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let cfg = sample_config();
    for n in [1u32, 2] {
        let k = BersKernel::default_for(&cfg, n).unwrap();
        for _ in 0..20 {
            let m = loop {
                let m = MobiusMap::new(
                    cx(rng.gen_range(-3i32..=3) as f64, 0.0),
                    cx(rng.gen_range(-3i32..=3) as f64, 0.0),
                    cx(rng.gen_range(-3i32..=3) as f64, 0.0),
                    cx(rng.gen_range(-3i32..=3) as f64, 0.0),
                );
                if let Ok(m) = m {
                    if m.det().norm() > 0.5 {
                        break m;
                    }
                }
            };
            let moved =
                BersKernel::new(n, k.points().iter().map(|a| m.apply(*a)).collect());
            let moved = match moved {
                Ok(km) => km,
                // a map can push two limit points too close together
                Err(_) => continue,
            };
            let z = cx(1.7, 0.9);
            let y = cx(-1.1, 0.6);
            let lhs = moved.pi(m.apply(z), m.apply(y)).unwrap()
                * m.deriv(z).powu(n)
                * m.deriv(y).powi(1 - n as i32);
            let rhs = k.pi(z, y).unwrap();
            assert!((lhs - rhs).norm() < 1e-9 * (1.0 + rhs.norm()), "n={n}");
        }
    }
}

#[test]
fn psi_identity_word_reduces_to_kernel() {
    let cfg = sample_config();
    let k = BersKernel::default_for(&cfg, 2).unwrap();
    let words = group_words(&cfg, 0);
    let (z, y) = (cx(1.6, 1.0), cx(-0.9, 0.9));
    let psi = psi_poincare(&k, &words, z, y).unwrap();
    assert_eq!(psi.value, k.pi(z, y).unwrap());
}

#[test]
fn psi_shells_decrease() {
    let cfg = sample_config();
    let k = BersKernel::default_for(&cfg, 2).unwrap();
    let (z, y) = (cx(1.6, 1.2), cx(-0.8, 0.8));
    let mut last = f64::INFINITY;
    for max_len in 2..=5usize {
        let words = group_words(&cfg, max_len);
        let psi = psi_poincare(&k, &words, z, y).unwrap();
        assert!(psi.tail < last, "shell grew at L={max_len}");
        last = psi.tail;
    }
    assert!(last < 1e-10);
}

#[test]
fn psi_pole_at_diagonal() {
    let cfg = sample_config();
    let k = BersKernel::default_for(&cfg, 2).unwrap();
    let words = group_words(&cfg, 4);
    let z = cx(1.5, 1.4);
    for dir in [cx(1.0, 0.0), cx(0.0, 1.0), cx(0.6, -0.8)] {
        let y = z + 1e-4 * dir;
        let psi = psi_poincare(&k, &words, z, y).unwrap();
        let res = (z - y) * psi.value;
        assert!((res - cx(1.0, 0.0)).norm() < 1e-3, "dir={dir}: {res}");
    }
}

#[test]
fn psi_is_n_differential_in_z() {
    let cfg = sample_config();
    let k = BersKernel::default_for(&cfg, 2).unwrap();
    let words = group_words(&cfg, 6);
    let (z, y) = (cx(1.4, 1.3), cx(-1.2, 0.9));
    let base = psi_poincare(&k, &words, z, y).unwrap();
    for a in 0..2 {
        let g = schottky_generator(&cfg.handles[a]);
        let moved = psi_poincare(&k, &words, g.apply(z), y).unwrap();
        let lhs = moved.value * g.deriv(z).powu(2);
        let err = (lhs - base.value).norm();
        let budget = 10.0 * (base.tail + moved.tail) + 1e-9;
        assert!(err < budget, "handle {a}: err {err} budget {budget}");
    }
}

#[test]
fn theta_reproduces_quasi_periodicity() {
    let cfg = sample_config();
    let k = BersKernel::default_for(&cfg, 2).unwrap();
    let words = group_words(&cfg, 5);
    let z = cx(1.5, 1.1);
    for a in 0..2 {
        let theta = theta_extract(&k, &cfg, &words, a, z).unwrap();
        assert_eq!(theta.len(), 3);
        // held-out sample: different radius and angle than the solve nodes
        let h = &cfg.handles[a];
        let ya = 2.6 * h.rho.norm().sqrt() * cx(0.9238, 0.3827);
        let y = h.w_plus + ya;
        let chi = chi_generator(&k, &cfg, &words, a, z, y).unwrap();
        let fit: Complex64 = theta
            .iter()
            .enumerate()
            .map(|(l, t)| -t * ya.powu(l as u32))
            .sum();
        assert!(
            (chi - fit).norm() < 1e-6 * (1.0 + chi.norm()),
            "handle {a}: chi {chi} fit {fit}"
        );
    }
}

#[test]
fn theta_span_has_expected_rank() {
    // g = 2, N = 2: the six coefficient functions span a space of dimension
    // (g-1)(2N-1) = 3, read off the singular values of a sample matrix
    let cfg = sample_config();
    let k = BersKernel::default_for(&cfg, 2).unwrap();
    let words = group_words(&cfg, 5);
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let zs: Vec<Complex64> = (0..12).map(|_| random_exterior_point(&cfg, &mut rng)).collect();
    let mut mat = nalgebra::DMatrix::<Complex64>::zeros(6, zs.len());
    for (col, z) in zs.iter().enumerate() {
        for a in 0..2 {
            let theta = theta_extract(&k, &cfg, &words, a, *z).unwrap();
            for l in 0..3 {
                mat[(3 * a + l, col)] = theta[l];
            }
        }
    }
    let sv = mat.svd(false, false).singular_values;
    let mut s: Vec<f64> = sv.iter().cloned().collect();
    s.sort_by(|p, q| q.partial_cmp(p).unwrap());
    assert!(s[2] / s[3] > 1e3, "singular values {s:?}");
}
