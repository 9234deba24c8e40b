use super::*;
use crate::exact::rational::{rat, rat_i};

fn st(parts: &[u32]) -> FockVector {
    FockVector::state(parts)
}

#[test]
fn partition_counts() {
    assert_eq!(partitions(0).len(), 1);
    assert_eq!(partitions(1).len(), 1);
    assert_eq!(partitions(4).len(), 5);
    assert_eq!(partitions(5).len(), 7);
    assert_eq!(partitions(8).len(), 22);
}

#[test]
fn heisenberg_commutator() {
    // [a(m), a(n)] = m delta_{m+n,0}
    let samples = [st(&[3, 1]), st(&[2, 2]), FockVector::vacuum()];
    for v in &samples {
        for m in -3i64..=3 {
            for n in -3i64..=3 {
                let lhs = heisenberg_mode(m, &heisenberg_mode(n, v))
                    .sub(&heisenberg_mode(n, &heisenberg_mode(m, v)));
                let rhs = if m + n == 0 { v.scale(&rat_i(m)) } else { FockVector::zero() };
                assert_eq!(lhs, rhs, "m={m} n={n}");
            }
        }
    }
}

#[test]
fn annihilation_multiplicity() {
    // a(2) on a(-2)^2|0> = 2*2 a(-2)|0>
    assert_eq!(heisenberg_mode(2, &st(&[2, 2])), st(&[2]).scale(&rat_i(4)));
}

#[test]
fn vertex_mode_identity_field() {
    let v = st(&[2, 1]);
    assert_eq!(vertex_mode(&FockVector::vacuum(), -1, &v), v);
    assert!(vertex_mode(&FockVector::vacuum(), 0, &v).is_zero());
    assert!(vertex_mode(&FockVector::vacuum(), -2, &v).is_zero());
}

#[test]
fn vertex_mode_generator_matches_heisenberg() {
    let targets = [FockVector::vacuum(), st(&[1]), st(&[2, 1]), st(&[3, 2, 2])];
    for v in &targets {
        for m in -4i64..=4 {
            assert_eq!(vertex_mode(&FockVector::a(), m, v), heisenberg_mode(m, v), "m={m}");
        }
    }
}

#[test]
fn vertex_mode_creativity() {
    // u(-1)|0> = u and u(m)|0> = 0 for m >= 0; deeper modes give translates
    let vac = FockVector::vacuum();
    for u in [st(&[2]), st(&[1, 1]), st(&[3, 1]), FockVector::omega()] {
        assert_eq!(vertex_mode(&u, -1, &vac), u);
        for m in 0i64..3 {
            assert!(vertex_mode(&u, m, &vac).is_zero(), "m={m}");
        }
        for i in 1u32..=3 {
            let lhs = vertex_mode(&u, -1 - i as i64, &vac);
            assert_eq!(lhs, translate_pow(i, &u), "i={i}");
        }
    }
}

#[test]
fn conformal_vector_modes_are_virasoro() {
    let omega = FockVector::omega();
    let mut targets = vec![FockVector::vacuum()];
    for k in 1..=4 {
        for b in partitions(k).iter() {
            targets.push(FockVector::basis(b.clone()));
        }
    }
    for v in &targets {
        for n in -3i64..=3 {
            assert_eq!(vertex_mode(&omega, n + 1, v), virasoro_mode(n, v), "n={n}");
        }
    }
}

#[test]
fn virasoro_bracket_central_charge_one() {
    // [L(m), L(n)] = (m-n) L(m+n) + 1/2 binom(m+1, 3) delta_{m+n,0}
    let mut targets = vec![FockVector::vacuum()];
    for k in 1..=4 {
        for b in partitions(k).iter() {
            targets.push(FockVector::basis(b.clone()));
        }
    }
    for v in &targets {
        for m in -3i64..=3 {
            for n in -3i64..=3 {
                let lhs = virasoro_mode(m, &virasoro_mode(n, v))
                    .sub(&virasoro_mode(n, &virasoro_mode(m, v)));
                let mut rhs = virasoro_mode(m + n, v).scale(&rat_i(m - n));
                if m + n == 0 {
                    let central = binom(m + 1, 3) * rat(1, 2);
                    rhs = rhs.add(&v.scale(&central));
                }
                assert_eq!(lhs, rhs, "m={m} n={n}");
            }
        }
    }
}

#[test]
fn central_term_on_vacuum() {
    // L(2)L(-2)|0> = 1/2 |0>
    let v = virasoro_mode(2, &virasoro_mode(-2, &FockVector::vacuum()));
    assert_eq!(v, FockVector::vacuum().scale(&rat(1, 2)));
}

#[test]
fn virasoro_heisenberg_bracket() {
    // [L(m), a(n)] = -n a(m+n)
    let targets = [st(&[2, 1]), st(&[1]), FockVector::vacuum()];
    for v in &targets {
        for m in -2i64..=2 {
            for n in -3i64..=3 {
                let lhs = virasoro_mode(m, &heisenberg_mode(n, v))
                    .sub(&heisenberg_mode(n, &virasoro_mode(m, v)));
                let rhs = heisenberg_mode(m + n, v).scale(&rat_i(-n));
                assert_eq!(lhs, rhs, "m={m} n={n}");
            }
        }
    }
}

#[test]
fn borcherds_commutator_formula() {
    // [u(k), v(m)] = sum_j binom(k, j) (u(j) v)(k+m-j)
    let cases = [
        (FockVector::omega(), st(&[2]), st(&[1])),
        (st(&[2]), st(&[1, 1]), st(&[2, 1])),
        (st(&[1, 1]), FockVector::omega(), st(&[3])),
    ];
    for (u, v, w) in &cases {
        let jmax = (u.max_weight() + v.max_weight()) as i64;
        for k in -2i64..=2 {
            for m in -2i64..=2 {
                let lhs = vertex_mode(u, k, &vertex_mode(v, m, w))
                    .sub(&vertex_mode(v, m, &vertex_mode(u, k, w)));
                let mut rhs = FockVector::zero();
                for j in 0..=jmax {
                    let c = binom(k, j);
                    if c.is_zero() {
                        continue;
                    }
                    let uv = vertex_mode(u, j, v);
                    if uv.is_zero() {
                        continue;
                    }
                    rhs = rhs.add(&vertex_mode(&uv, k + m - j, w).scale(&c));
                }
                assert_eq!(lhs, rhs, "k={k} m={m}");
            }
        }
    }
}

#[test]
fn pairing_values() {
    assert_eq!(pairing_1(&FockVector::vacuum(), &FockVector::vacuum()), rat_i(1));
    assert_eq!(pairing_1(&FockVector::a(), &FockVector::a()), rat_i(-1));
    assert_eq!(pairing_1(&st(&[2]), &st(&[2])), rat_i(-2));
    assert_eq!(pairing_1(&st(&[1, 1]), &st(&[1, 1])), rat_i(2));
    assert_eq!(pairing_1(&st(&[2]), &st(&[1, 1])), rat_i(0));
    // distinct weights are orthogonal
    assert_eq!(pairing_1(&st(&[2]), &st(&[1])), rat_i(0));
}

#[test]
fn pairing_symmetry() {
    let xs = [st(&[3, 1]).add(&st(&[2, 2]).scale(&rat(1, 3))), st(&[4]), st(&[2, 1, 1])];
    for x in &xs {
        for y in &xs {
            assert_eq!(pairing_1(x, y), pairing_1(y, x));
        }
    }
}

#[test]
fn heisenberg_adjoint_under_pairing() {
    // <a(n) x, y> = -<x, a(-n) y>
    let x = st(&[2, 1]);
    let y = st(&[3, 1]).add(&st(&[2, 2]));
    for n in -3i64..=3 {
        if n == 0 {
            continue;
        }
        let lhs = pairing_1(&heisenberg_mode(n, &x), &y);
        let rhs = -pairing_1(&x, &heisenberg_mode(-n, &y));
        assert_eq!(lhs, rhs, "n={n}");
    }
}

#[test]
fn virasoro_adjoint_under_scaled_pairing() {
    // <L(n) x, y>_rho = rho^n <x, L(-n) y>_rho
    let rho = rat(3, 5);
    let x = st(&[2, 1]).add(&st(&[1]).scale(&rat(2, 7)));
    let y = st(&[3]).add(&st(&[1, 1, 1]).scale(&rat(-1, 2)));
    for n in -2i64..=2 {
        let lhs = pairing(&virasoro_mode(n, &x), &y, &rho).unwrap();
        let rhs = rat_pow(&rho, n).unwrap() * pairing(&x, &virasoro_mode(-n, &y), &rho).unwrap();
        assert_eq!(lhs, rhs, "n={n}");
    }
}

#[test]
fn quasiprimary_adjoint_for_generator() {
    // weight-1 quasiprimary u = a: u(m)^dagger = -rho^m u(-m) under <,>_rho
    let rho = rat(2, 3);
    let x = st(&[2]).add(&st(&[1, 1]).scale(&rat(1, 4)));
    let y = st(&[3, 1]);
    for m in -2i64..=2 {
        let lhs = pairing(&heisenberg_mode(m, &x), &y, &rho).unwrap();
        let rhs = -(rat_pow(&rho, m).unwrap()) * pairing(&x, &heisenberg_mode(-m, &y), &rho).unwrap();
        assert_eq!(lhs, rhs, "m={m}");
    }
}

#[test]
fn gram_weight_two() {
    let (basis, g) = gram_matrix(2);
    assert_eq!(basis, vec![BasisState::new(vec![1, 1]), BasisState::new(vec![2])]);
    assert_eq!(g.at(0, 0), &rat_i(2));
    assert_eq!(g.at(0, 1), &rat_i(0));
    assert_eq!(g.at(1, 0), &rat_i(0));
    assert_eq!(g.at(1, 1), &rat_i(-2));
}

#[test]
fn dual_basis_duality() {
    for k in 1..=4u32 {
        let pairs = dual_basis_1(k).unwrap();
        for (i, (_, dual_i)) in pairs.iter().enumerate() {
            for (j, (b_j, _)) in pairs.iter().enumerate() {
                let p = pairing_1(dual_i, &FockVector::basis(b_j.clone()));
                assert_eq!(p, if i == j { rat_i(1) } else { rat_i(0) }, "k={k} i={i} j={j}");
            }
        }
    }
}

#[test]
fn scaled_dual_basis_under_scaled_pairing() {
    // the sewn partner rho^k * dual_i is dual to b_j under <,>_rho
    let rho = rat(5, 7);
    for k in 0..=3u32 {
        let triples = dual_basis(k, &rho).unwrap();
        for (i, (_, _, sewn_i)) in triples.iter().enumerate() {
            for (j, (b_j, _, _)) in triples.iter().enumerate() {
                let p = pairing(sewn_i, &FockVector::basis(b_j.clone()), &rho).unwrap();
                assert_eq!(p, if i == j { rat_i(1) } else { rat_i(0) }, "k={k} i={i} j={j}");
            }
        }
    }
}

#[test]
fn dual_basis_weight_one() {
    let rho = rat(1, 2);
    let triples = dual_basis(1, &rho).unwrap();
    assert_eq!(triples.len(), 1);
    assert_eq!(triples[0].1, FockVector::a().scale(&rat_i(-1)));
    assert_eq!(triples[0].2, FockVector::a().scale(&rat(-1, 2)));
    let zero = dual_basis(0, &rho).unwrap();
    assert_eq!(zero[0].2, FockVector::vacuum());
}

#[test]
fn mode_operator_weight_shift() {
    let op = ModeOperator::new(vec![-3, 1, -2], rat(1, 2));
    assert_eq!(op.weight_shift(), 4);
    for k in 0..=4u32 {
        for b in partitions(k).iter() {
            let img = op.apply(&FockVector::basis(b.clone()));
            if let Some(w) = img.weight() {
                assert_eq!(w as i64, k as i64 + op.weight_shift());
            }
        }
    }
    // a(1) a(-1) on vacuum picks up the bracket
    let contract = ModeOperator::new(vec![1, -1], rat_i(1));
    assert_eq!(contract.apply(&FockVector::vacuum()), FockVector::vacuum());
}

#[test]
fn grading_discipline() {
    // u of weight N sends weight k to weight k+N-j-1, through weight 6 total
    for wu in 1..=3u32 {
        for u in partitions(wu).iter() {
            let uv = FockVector::basis(u.clone());
            for wv in 0..=(6 - wu) {
                for v in partitions(wv).iter() {
                    let vv = FockVector::basis(v.clone());
                    let bound = (wu + wv) as i64;
                    for j in -3..=bound + 2 {
                        let img = vertex_mode(&uv, j, &vv);
                        let expect = wu as i64 + wv as i64 - j - 1;
                        if j >= bound {
                            assert!(img.is_zero(), "u={u} j={j} v={v}");
                        }
                        if let Some(w) = img.weight() {
                            assert_eq!(w as i64, expect, "u={u} j={j} v={v}");
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn translation_derivative_property() {
    // (L(-1)u)(m) = -m u(m-1) as operators
    let us = [st(&[2]), st(&[1, 1]), FockVector::omega(), st(&[3, 1])];
    let vs = [FockVector::vacuum(), st(&[1]), st(&[2, 1])];
    for u in &us {
        let du = virasoro_mode(-1, u);
        for v in &vs {
            for m in -4i64..=4 {
                let lhs = vertex_mode(&du, m, v);
                let rhs = vertex_mode(u, m - 1, v).scale(&rat_i(-m));
                assert_eq!(lhs, rhs, "m={m}");
            }
        }
    }
}

#[test]
fn iterate_formula() {
    // (u(n)v)(m) w = sum_{j>=0} (-1)^j binom(n,j)
    //               (u(n-j) v(m+j) - (-1)^n v(n+m-j) u(j)) w
    let cases = [
        (st(&[1]), st(&[1]), st(&[2])),
        (st(&[2]), st(&[1, 1]), st(&[1])),
        (FockVector::omega(), st(&[1]), st(&[2, 1])),
    ];
    for (u, v, w) in &cases {
        for n in -2i64..=2 {
            for m in -2i64..=2 {
                let uv = vertex_mode(u, n, v);
                let lhs = vertex_mode(&uv, m, w);
                let mut rhs = FockVector::zero();
                // j bounded by when both u(j)w and the shifted modes die
                for j in 0..=((u.max_weight() + v.max_weight() + w.max_weight()) as i64 + n.abs() + m.abs() + 2) {
                    let c = binom(n, j);
                    if c.is_zero() {
                        continue;
                    }
                    let sign = if j % 2 == 0 { rat_i(1) } else { rat_i(-1) };
                    let t1 = vertex_mode(u, n - j, &vertex_mode(v, m + j, w));
                    let t2 = vertex_mode(v, n + m - j, &vertex_mode(u, j, w));
                    let nsign = if n % 2 == 0 { rat_i(1) } else { rat_i(-1) };
                    rhs = rhs.add(&t1.sub(&t2.scale(&nsign)).scale(&(sign * c)));
                }
                assert_eq!(lhs, rhs, "n={n} m={m}");
            }
        }
    }
}

#[test]
fn coordinate_change_multiplicative() {
    let beta = [rat_i(2), rat(1, 2), rat(-1, 3)];
    let gamma = [rat(1, 3), rat_i(2), rat_i(1), rat(1, 5)];
    // states through weight 5 feel L(m) for m <= 5
    let delta = compose_coordinate_changes(&beta, &gamma, 7).unwrap();
    for k in 0..=5u32 {
        for b in partitions(k).iter() {
            let v = FockVector::basis(b.clone());
            let lhs = coordinate_change(&delta, &v).unwrap();
            let rhs = coordinate_change(&beta, &coordinate_change(&gamma, &v).unwrap()).unwrap();
            assert_eq!(lhs, rhs, "state {b}");
        }
    }
}

#[test]
fn coordinate_change_identity_and_scaling() {
    let v = st(&[2, 1]).add(&st(&[1]).scale(&rat(1, 2)));
    assert_eq!(coordinate_change(&[rat_i(1)], &v).unwrap(), v);
    let s = rat(1, 3);
    let scaled = coordinate_change(&[s.clone()], &v).unwrap();
    let expected = st(&[2, 1]).scale(&rat_pow(&s, 3).unwrap()).add(
        &st(&[1]).scale(&(rat(1, 2) * rat_pow(&s, 1).unwrap())),
    );
    assert_eq!(scaled, expected);
}

#[test]
fn coordinate_change_translation_part() {
    // beta = (1, 1): exp(2 L(1)) on a(-2)|0> gives a(-2)|0> + 4 a(-1)|0>
    let got = coordinate_change(&[rat_i(1), rat_i(1)], &st(&[2])).unwrap();
    assert_eq!(got, st(&[2]).add(&st(&[1]).scale(&rat_i(4))));
}

#[test]
fn quasiprimary_examples() {
    assert!(is_quasiprimary(&FockVector::a()));
    assert!(is_quasiprimary(&FockVector::omega()));
    // a(-2)|0> = L(-1) a, pure translate
    let parts = quasiprimary_decompose(&st(&[2])).unwrap();
    assert_eq!(parts.len(), 2);
    assert!(parts[0].is_zero());
    assert_eq!(parts[1], FockVector::a());
}

#[test]
fn quasiprimary_decomposition_recomposes() {
    let mut targets = vec![];
    for k in 1..=5u32 {
        for b in partitions(k).iter() {
            targets.push(FockVector::basis(b.clone()));
        }
    }
    targets.push(st(&[3, 1]).add(&st(&[2]).scale(&rat(5, 3))));
    for v in &targets {
        let parts = quasiprimary_decompose(v).unwrap();
        let mut recomposed = FockVector::zero();
        for (i, u) in parts.iter().enumerate() {
            assert!(is_quasiprimary(u), "component {i} of {v} not quasiprimary");
            recomposed = recomposed.add(&translate_pow(i as u32, u));
        }
        assert_eq!(&recomposed, v);
    }
}

#[test]
fn fock_vector_json_round_trip() {
    let v = st(&[3, 1]).add(&st(&[2, 2]).scale(&rat(-7, 3)));
    let s = serde_json::to_string(&v).unwrap();
    let back: FockVector = serde_json::from_str(&s).unwrap();
    assert_eq!(back, v);
    assert_eq!(serde_json::to_string(&back).unwrap(), s);
}
