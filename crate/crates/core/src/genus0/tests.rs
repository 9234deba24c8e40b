use super::*;
use crate::exact::poly::v;
use crate::exact::rational::rat;
use crate::fock::{partitions, translate_pow};

fn ins(state: FockVector, name: &str) -> Insertion {
    Insertion::new(state, v(name))
}

/// c / (a - b)^k
fn pole(c: Rational, a: Var, b: Var, k: i64) -> RationalFunction {
    let dz = Poly::var(a).sub(&Poly::var(b));
    RationalFunction::inv_poly(dz).unwrap().pow_i(k).unwrap().scale(&c)
}

#[test]
fn vacuum_one_point_is_one() {
    let c = Correlator::new();
    let z = c.npoint0_value(&[ins(FockVector::vacuum(), "g0a")]).unwrap();
    assert!(z.eq_exact(&RationalFunction::one()));
}

#[test]
fn positive_weight_one_point_vanishes() {
    let c = Correlator::new();
    for st in [FockVector::a(), FockVector::omega(), FockVector::state(&[3, 1])] {
        assert!(c.npoint0_value(&[ins(st, "g0b")]).unwrap().is_zero());
    }
}

#[test]
fn frozen_two_point_values() {
    let c = Correlator::new();
    let (z, y) = (v("g0z"), v("g0y"));
    let cases = [
        // generator with itself: 1/(z-y)^2
        (FockVector::a(), FockVector::a(), pole(rat_i(1), z, y, 2)),
        // its translation descendant a(-2)1 against a: d_z of the above
        (FockVector::state(&[2]), FockVector::a(), pole(rat_i(-2), z, y, 3)),
        // stress tensor with itself: (1/2)/(z-y)^4, central charge 1
        (FockVector::omega(), FockVector::omega(), pole(rat(1, 2), z, y, 4)),
        // odd number of generator legs
        (FockVector::omega(), FockVector::a(), RationalFunction::zero()),
    ];
    for (u, w, expect) in cases {
        let got = c
            .npoint0_value(&[Insertion::new(u, z), Insertion::new(w, y)])
            .unwrap();
        assert!(got.eq_exact(&expect), "got {got}");
    }
}

#[test]
fn four_point_generators_sum_over_pairings() {
    let c = Correlator::new();
    let ys: Vec<Var> = (1..=4).map(|i| v(&format!("g0p{i}"))).collect();
    let insertions: Vec<Insertion> =
        ys.iter().map(|&y| Insertion::new(FockVector::a(), y)).collect();
    let got = c.npoint0_value(&insertions).unwrap();
    let pair = |i: usize, j: usize| pole(rat_i(1), ys[i], ys[j], 2);
    let expect = pair(0, 1)
        .mul(&pair(2, 3))
        .add(&pair(0, 2).mul(&pair(1, 3)))
        .add(&pair(0, 3).mul(&pair(1, 2)));
    assert!(got.eq_exact(&expect));
}

#[test]
fn two_point_matches_mode_expansion() {
    // Z(u,y1; v,y2) expanded at y2 = 0 must reproduce, order by order,
    // y1^{-wtu-wtv-i} <1', u(wtu+wtv+i-1) L(-1)^i v / i!> from the mode
    // picture in the domain |y1| > |y2|.
    let c = Correlator::new();
    let (y1, y2) = (v("g0m1"), v("g0m2"));
    let y1inv = RationalFunction::inv_poly(Poly::var(y1)).unwrap();
    for wu in 1..=3u32 {
        for wv in 1..=3u32 {
            for u in partitions(wu).iter() {
                for w in partitions(wv).iter() {
                    let uvec = FockVector::basis(u.clone());
                    let wvec = FockVector::basis(w.clone());
                    let z = c
                        .npoint0_value(&[
                            Insertion::new(uvec.clone(), y1),
                            Insertion::new(wvec.clone(), y2),
                        ])
                        .unwrap();
                    let mut cur = z;
                    for i in 0..=5u32 {
                        let coeff = cur
                            .substitute(y2, &RationalFunction::zero())
                            .unwrap()
                            .scale(&(Rational::one() / factorial(i)));
                        let k = (wu + wv + i) as i64;
                        let vac = vertex_mode(&uvec, k - 1, &translate_pow(i, &wvec))
                            .vacuum_coeff();
                        let expect = y1inv.pow_i(k).unwrap().scale(&vac);
                        assert!(
                            coeff.eq_exact(&expect),
                            "u={u} v={w} i={i}: {coeff} vs {expect}"
                        );
                        cur = cur.derivative(y2);
                    }
                }
            }
        }
    }
}

#[test]
fn wick_oracle_matches_mode_recursion_two_points() {
    let c = Correlator::new();
    let (y1, y2) = (v("g0w1"), v("g0w2"));
    for wu in 1..=4u32 {
        for wv in 1..=4u32 {
            for u in partitions(wu).iter() {
                for w in partitions(wv).iter() {
                    let list = [
                        Insertion::new(FockVector::basis(u.clone()), y1),
                        Insertion::new(FockVector::basis(w.clone()), y2),
                    ];
                    let got = c.npoint0_value(&list).unwrap();
                    let oracle = wick_npoint0(&list).unwrap();
                    assert!(got.eq_exact(&oracle), "u={u} v={w}");
                }
            }
        }
    }
}

#[test]
fn wick_oracle_matches_mode_recursion_three_points() {
    let c = Correlator::new();
    let ys: Vec<Var> = (1..=3).map(|i| v(&format!("g0t{i}"))).collect();
    let mut states: Vec<BasisState> = Vec::new();
    for w in 1..=2u32 {
        states.extend(partitions(w).iter().cloned());
    }
    states.push(BasisState::new(vec![3]));
    states.push(BasisState::new(vec![2, 1]));
    for u in &states {
        for w in &states {
            for x in &states {
                let list = [
                    Insertion::new(FockVector::basis(u.clone()), ys[0]),
                    Insertion::new(FockVector::basis(w.clone()), ys[1]),
                    Insertion::new(FockVector::basis(x.clone()), ys[2]),
                ];
                let got = c.npoint0_value(&list).unwrap();
                let oracle = wick_npoint0(&list).unwrap();
                assert!(got.eq_exact(&oracle), "{u} {w} {x}");
            }
        }
    }
}

#[test]
fn wick_handles_mixed_vectors() {
    let c = Correlator::new();
    let (y1, y2, y3) = (v("g0x1"), v("g0x2"), v("g0x3"));
    let list = [
        Insertion::new(FockVector::omega(), y1),
        Insertion::new(FockVector::a().add(&FockVector::state(&[2])), y2),
        Insertion::new(FockVector::a(), y3),
    ];
    let got = c.npoint0_value(&list).unwrap();
    let oracle = wick_npoint0(&list).unwrap();
    assert!(got.eq_exact(&oracle));
}

fn sample_lists(tag: &str) -> Vec<Vec<Insertion>> {
    let y1 = v(&format!("{tag}1"));
    let y2 = v(&format!("{tag}2"));
    let y3 = v(&format!("{tag}3"));
    vec![
        vec![Insertion::new(FockVector::a(), y1)],
        vec![Insertion::new(FockVector::a(), y1), Insertion::new(FockVector::a(), y2)],
        vec![Insertion::new(FockVector::omega(), y1), Insertion::new(FockVector::a(), y2)],
        vec![Insertion::new(FockVector::state(&[2]), y1), Insertion::new(FockVector::a(), y2)],
        vec![
            Insertion::new(FockVector::a(), y1),
            Insertion::new(FockVector::a(), y2),
            Insertion::new(FockVector::omega(), y3),
        ],
    ]
}

#[test]
fn reduction_inserts_translation_descendant() {
    let c = Correlator::new();
    let zv = v("g0rz");
    let k1 = ReductionKernel::with_default_nodes(1, v("$k1z"), v("$k1y")).unwrap();
    let k2 = ReductionKernel::with_default_nodes(2, v("$k2z"), v("$k2y")).unwrap();
    for (u, kernel) in [(FockVector::a(), &k1), (FockVector::omega(), &k2)] {
        for i in 0..=2u32 {
            for list in sample_lists("g0r") {
                let got = c.zhu_reduce0(&u, i, zv, kernel, &list).unwrap();
                let mut direct = vec![Insertion::new(translate_pow(i, &u), zv)];
                direct.extend(list.iter().cloned());
                let expect = c.npoint0_value(&direct).unwrap();
                assert!(got.value.eq_exact(&expect), "u={u} i={i}");
                assert_eq!(got.weights[0], u.weight().unwrap() + i);
            }
        }
    }
}

#[test]
fn reduction_on_vacuum_insertion() {
    let c = Correlator::new();
    let k1 = ReductionKernel::with_default_nodes(1, v("$k3z"), v("$k3y")).unwrap();
    let got = c
        .zhu_reduce0(
            &FockVector::a(),
            0,
            v("g0vz"),
            &k1,
            &[ins(FockVector::vacuum(), "g0vy")],
        )
        .unwrap();
    assert!(got.value.is_zero());
}

#[test]
fn ward_sum_vanishes() {
    let c = Correlator::new();
    let pv = v("g0wp");
    for u in [FockVector::a(), FockVector::omega()] {
        let n = u.weight().unwrap();
        for p in ward_polynomials(n, pv) {
            for list in sample_lists("g0wd") {
                let w = c.ward0_check(&u, &p, pv, &list).unwrap();
                assert!(w.is_zero(), "u={u} p={p} -> {w}");
            }
        }
    }
}

#[test]
fn reduction_independent_of_kernel_nodes() {
    let c = Correlator::new();
    let zv = v("g0kz");
    let ka = ReductionKernel::new(2, vec![rat_i(0), rat_i(1), rat_i(2)], v("$kaz"), v("$kay"))
        .unwrap();
    let kb = ReductionKernel::new(2, vec![rat_i(-1), rat_i(3), rat_i(7)], v("$kbz"), v("$kby"))
        .unwrap();
    for i in 0..=1u32 {
        for list in sample_lists("g0kd") {
            let a = c.zhu_reduce0(&FockVector::omega(), i, zv, &ka, &list).unwrap();
            let b = c.zhu_reduce0(&FockVector::omega(), i, zv, &kb, &list).unwrap();
            assert!(a.value.eq_exact(&b.value), "i={i}");
        }
    }
}

#[test]
fn coboundary_adjoins_insertion() {
    let c = Correlator::new();
    let (zv, yv) = (v("g0cz"), v("g0cy"));
    let k1 = ReductionKernel::with_default_nodes(1, v("$k4z"), v("$k4y")).unwrap();
    // on the empty collection: the one-point function of a
    let empty = c.coboundary0(&FockVector::a(), zv, &k1, &[]).unwrap();
    assert!(empty.value.is_zero());
    // on one generator insertion: the node term of the kernel drops and the
    // bare double pole survives
    let one = c
        .coboundary0(&FockVector::a(), zv, &k1, &[Insertion::new(FockVector::a(), yv)])
        .unwrap();
    assert!(one.value.eq_exact(&pole(rat_i(1), zv, yv, 2)));
}

#[test]
fn chain_diagnostic_reports_zero() {
    let c = Correlator::new();
    let zv = v("g0hz");
    let pv = v("g0hp");
    for u in [FockVector::a(), FockVector::omega()] {
        for up in [FockVector::a(), FockVector::omega()] {
            let n = up.weight().unwrap();
            for p in ward_polynomials(n, pv) {
                for list in sample_lists("g0hd") {
                    if list.iter().any(|x| x.var == zv) {
                        continue;
                    }
                    let w = c.chain0_diagnostic(&u, &up, zv, &p, pv, &list).unwrap();
                    assert!(w.is_zero(), "u={u} u'={up} p={p}");
                }
            }
        }
    }
}

#[test]
fn mobius_transport_fixes_quasiprimary_forms() {
    let c = Correlator::new();
    let list =
        [ins(FockVector::a(), "g0f1"), ins(FockVector::a(), "g0f2"), ins(FockVector::omega(), "g0f3")];
    let form = c.npoint0(&list).unwrap();
    let maps = [
        MobiusMatrix::identity(),
        MobiusMatrix::from_i64(1, 1, 0, 1).unwrap(), // translation
        MobiusMatrix::from_i64(0, 1, 1, 0).unwrap(), // inversion
        MobiusMatrix::from_i64(1, 2, 3, 4).unwrap(),
        MobiusMatrix::new(rat(1, 2), rat(-1, 3), rat_i(2), rat(5, 7)).unwrap(),
    ];
    for g in &maps {
        let moved = mobius_transport(&form, g).unwrap();
        assert!(moved.value.eq_exact(&form.value));
    }
}

#[test]
fn mobius_apply_fixes_general_correlators() {
    // descendant insertions probe the L(1) part of the twist and the order
    // of the two factors in it
    let c = Correlator::new();
    let lists = [
        vec![ins(FockVector::state(&[2]), "g0q1"), ins(FockVector::a(), "g0q2")],
        vec![ins(FockVector::state(&[3]), "g0q1"), ins(FockVector::a(), "g0q2")],
        vec![
            ins(FockVector::state(&[2]), "g0q1"),
            ins(FockVector::state(&[2]), "g0q2"),
            ins(FockVector::state(&[3]), "g0q3"),
        ],
    ];
    let maps = [
        MobiusMatrix::from_i64(1, 0, 1, 1).unwrap(),
        MobiusMatrix::from_i64(2, 1, 3, 2).unwrap(),
        MobiusMatrix::new(rat(1, 3), rat_i(1), rat(-2, 5), rat_i(1)).unwrap(),
    ];
    for list in &lists {
        let base = c.npoint0_value(list).unwrap();
        for g in &maps {
            let moved = c.mobius_apply0(list, g).unwrap();
            assert!(moved.value.eq_exact(&base), "map {g:?}");
        }
    }
}

#[test]
fn correlator_symmetric_under_insertion_swap() {
    let c = Correlator::new();
    let a = [
        ins(FockVector::omega(), "g0s1"),
        ins(FockVector::a(), "g0s2"),
        ins(FockVector::state(&[2]), "g0s3"),
    ];
    let mut b = a.to_vec();
    b.swap(0, 2);
    b.swap(0, 1);
    let za = c.npoint0_value(&a).unwrap();
    let zb = c.npoint0_value(&b).unwrap();
    assert!(za.eq_exact(&zb));
}

#[test]
fn error_paths() {
    let c = Correlator::new();
    let k1 = ReductionKernel::with_default_nodes(1, v("$k5z"), v("$k5y")).unwrap();
    let k2 = ReductionKernel::with_default_nodes(2, v("$k6z"), v("$k6y")).unwrap();
    let y = v("g0e1");
    // repeated points
    assert!(matches!(
        c.npoint0_value(&[ins(FockVector::a(), "g0e1"), ins(FockVector::a(), "g0e1")]),
        Err(Error::RepeatedPoint(_))
    ));
    // non-quasiprimary reduction state
    assert!(matches!(
        c.zhu_reduce0(&FockVector::state(&[2]), 0, v("g0e2"), &k2, &[]),
        Err(Error::NotQuasiprimary)
    ));
    // weight disagrees with the kernel degree
    assert!(matches!(
        c.zhu_reduce0(&FockVector::a(), 0, v("g0e2"), &k2, &[]),
        Err(Error::WeightMismatch(1, 2))
    ));
    // Ward polynomial degree out of range for N = 1
    let p = Poly::var(y).pow(1);
    assert!(c.ward0_check(&FockVector::a(), &p, y, &[]).is_err());
    let _ = k1;
}

#[test]
fn correlation_form_serializes_with_weights() {
    let c = Correlator::new();
    let form = c
        .npoint0(&[ins(FockVector::a(), "g0j1"), ins(FockVector::a(), "g0j2")])
        .unwrap();
    let js = serde_json::to_value(&form).unwrap();
    assert!(js.get("num").is_some());
    assert!(js.get("den").is_some());
    assert_eq!(js["weights"], serde_json::json!([1, 1]));
}
