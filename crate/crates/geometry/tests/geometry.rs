use exact_scalars::{rat, rat_int, GaussianRational};
use geometry::*;
use indices::{CapIndex, MultiIndex, CAP_2X2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn ev(e: &Expr, pt: &Point) -> GaussianRational {
    eval_exact(e, pt).unwrap()
}

fn points(chart: &GrassmannChart, count: usize, seed: u64) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| random_regular_point(chart, &mut rng))
        .collect()
}

#[test]
fn wirtinger_basic_rules() {
    let i11 = CapIndex::new(1, 1);
    let e = Expr::z(i11).mul(&Expr::zbar(i11));
    let d = wirtinger_d(&e, Var::Z(i11));
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..5 {
        let pt = random_point(2, 2, &mut rng);
        assert_eq!(ev(&d, &pt), ev(&Expr::zbar(i11), &pt));
    }
    assert!(wirtinger_d(&Expr::int(7), Var::Z(i11)).is_syntactic_zero());
    assert!(wirtinger_d(&Expr::z(i11), Var::Zbar(i11)).is_syntactic_zero());
}

#[test]
fn b_entry_derivative_identity() {
    // d b_{k'-bar l'} / d zbar^{jj'} = delta_{j'k'} z^{jl'}
    let c = build_chart(2, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let pts: Vec<Point> = (0..3).map(|_| random_point(2, 2, &mut rng)).collect();
    for j in 1..=2u8 {
        for jp in 1..=2u8 {
            for kp in 1..=2usize {
                for lp in 1..=2usize {
                    let d = wirtinger_d(
                        &c.b_mat[kp - 1][lp - 1],
                        Var::Zbar(CapIndex::new(j, jp)),
                    );
                    let expect = if jp as usize == kp {
                        Expr::z(CapIndex::new(j, lp as u8))
                    } else {
                        Expr::zero()
                    };
                    for pt in &pts {
                        assert_eq!(ev(&d, pt), ev(&expect, pt));
                    }
                }
            }
        }
    }
}

#[test]
fn chart_entries_2x2() {
    let c = build_chart(2, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let pt = random_point(2, 2, &mut rng);
    for ip in 1..=2usize {
        for jp in 1..=2usize {
            let mut hand = if ip == jp {
                GaussianRational::one()
            } else {
                GaussianRational::zero()
            };
            for m in 1..=2u8 {
                let zb = pt.value(Var::Zbar(CapIndex::new(m, ip as u8)));
                let z = pt.value(Var::Z(CapIndex::new(m, jp as u8)));
                hand = &hand + &(&zb * &z);
            }
            assert_eq!(ev(&c.b_mat[ip - 1][jp - 1], &pt), hand);
        }
    }
    // at Z=0 the metric is the identity
    let origin = Point::origin();
    for r in 0..4 {
        for s in 0..4 {
            let expect = if r == s {
                GaussianRational::one()
            } else {
                GaussianRational::zero()
            };
            assert_eq!(ev(&c.metric[r][s], &origin), expect);
            assert_eq!(ev(&c.inv_metric[r][s], &origin), expect);
        }
    }
}

#[test]
fn projective_space_chart() {
    // p=1: B is 1x1, det B = 1 + sum |z|^2
    let c = build_chart(1, 3);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..4 {
        let pt = random_point(1, 3, &mut rng);
        let mut expect = GaussianRational::one();
        for m in 1..=3u8 {
            let z = pt.value(Var::Z(CapIndex::new(m, 1)));
            expect = &expect + &(&z * &z.conj());
        }
        assert_eq!(ev(&c.det_b, &pt), expect);
    }
}

#[test]
fn golden_point_values() {
    let c = build_chart(2, 2);
    let mut pt = Point::origin();
    pt.set(CapIndex::new(1, 1), GaussianRational::one());
    assert_eq!(ev(&c.det_b, &pt), GaussianRational::from_ints(2, 0));
    let g = metric_entry(&c, CapIndex::new(1, 1), CapIndex::new(1, 1));
    assert_eq!(ev(&g, &pt), GaussianRational::new(rat(1, 4), rat_int(0)));
    assert_eq!(potential_value_f64(&c, &Point::origin()).unwrap(), 0.0);
    assert!((potential_value_f64(&c, &pt).unwrap() - 2f64.ln()).abs() < 1e-12);
}

#[test]
fn hessian_is_metric() {
    let c = build_chart(2, 2);
    let pts = points(&c, 5, 5);
    for &i in &CAP_2X2 {
        for &j in &CAP_2X2 {
            // d_I d_{J-bar} log det B via the quotient rule on det B
            let dj = Expr::quot(wirtinger_d(&c.det_b, Var::Zbar(j)), c.det_b.clone());
            let hess = wirtinger_d(&dj, Var::Z(i));
            let g = metric_entry(&c, i, j);
            for pt in &pts {
                assert_eq!(ev(&hess, pt), ev(&g, pt));
            }
        }
    }
}

#[test]
fn first_derivative_matches_quotient_rule() {
    let c = build_chart(2, 2);
    let pts = points(&c, 3, 6);
    for &j in &CAP_2X2 {
        let plain = potential_first_deriv(&c, j, false);
        let barred = potential_first_deriv(&c, j, true);
        let oracle_plain = Expr::quot(wirtinger_d(&c.det_b, Var::Z(j)), c.det_b.clone());
        let oracle_barred = Expr::quot(wirtinger_d(&c.det_b, Var::Zbar(j)), c.det_b.clone());
        for pt in &pts {
            assert_eq!(ev(&plain, pt), ev(&oracle_plain, pt));
            assert_eq!(ev(&barred, pt), ev(&oracle_barred, pt));
        }
        assert_eq!(ev(&plain, &Point::origin()), GaussianRational::zero());
        assert_eq!(ev(&barred, &Point::origin()), GaussianRational::zero());
    }
}

#[test]
fn second_derivative_product_identity() {
    // d_I d_J Phi = -(d_{ij'} Phi)(d_{ji'} Phi), and the barred mirror
    let c = build_chart(2, 2);
    let pts = points(&c, 4, 7);
    for &i in &CAP_2X2 {
        for &j in &CAP_2X2 {
            let mixed_a = CapIndex::new(i.i, j.ip);
            let mixed_b = CapIndex::new(j.i, i.ip);
            let lhs = wirtinger_d(&potential_first_deriv(&c, j, false), Var::Z(i));
            let rhs = potential_first_deriv(&c, mixed_a, false)
                .mul(&potential_first_deriv(&c, mixed_b, false))
                .neg();
            let lhs_bar = wirtinger_d(&potential_first_deriv(&c, j, true), Var::Zbar(i));
            let rhs_bar = potential_first_deriv(&c, mixed_a, true)
                .mul(&potential_first_deriv(&c, mixed_b, true))
                .neg();
            for pt in &pts {
                assert_eq!(ev(&lhs, pt), ev(&rhs, pt));
                assert_eq!(ev(&lhs_bar, pt), ev(&rhs_bar, pt));
            }
        }
    }
}

#[test]
fn metric_hermitian_and_inverse() {
    let c = build_chart(2, 2);
    let pts = points(&c, 5, 8);
    for pt in &pts {
        let mut evr = ExactEvaluator::new(pt);
        for &d in &CAP_2X2 {
            for &x in &CAP_2X2 {
                let lhs = evr.eval(&metric_entry(&c, d, x)).unwrap();
                let rhs = evr.eval(&metric_entry(&c, x, d)).unwrap();
                assert_eq!(lhs, rhs.conj());
            }
        }
        // row-by-column products give the identity
        for r in 0..4 {
            for s in 0..4 {
                let mut acc = GaussianRational::zero();
                for k in 0..4 {
                    let a = evr.eval(&c.metric[r][k]).unwrap();
                    let b = evr.eval(&c.inv_metric[k][s]).unwrap();
                    acc = &acc + &(&a * &b);
                }
                let expect = if r == s {
                    GaussianRational::one()
                } else {
                    GaussianRational::zero()
                };
                assert_eq!(acc, expect);
            }
        }
    }
}

#[test]
fn d_operators_annihilate() {
    let c = build_chart(2, 2);
    let i11 = CapIndex::new(1, 1);
    let i22 = CapIndex::new(2, 2);
    let holo = Expr::z(i11).pow(2).mul(&Expr::z(i22)).add(&Expr::int(3));
    let anti = Expr::zbar(i11).mul(&Expr::zbar(i22)).add(&Expr::zbar(i22));
    for &k in &CAP_2X2 {
        assert!(d_up(&c, k, &holo).is_syntactic_zero());
        assert!(d_bar(&c, k, &anti).is_syntactic_zero());
        assert!(!d_up(&c, k, &anti).is_syntactic_zero());
    }
}

#[test]
fn multi_d_conventions() {
    let c = build_chart(2, 2);
    let e = Expr::z(CapIndex::new(1, 1)).mul(&Expr::zbar(CapIndex::new(2, 1)));
    let neg = MultiIndex(vec![1, -1, 0, 0]);
    assert!(apply_multi_d(&c, &neg, false, &e).is_syntactic_zero());
    assert!(apply_multi_d(&c, &neg, true, &e).is_syntactic_zero());
    // zero multi-index acts as the identity
    let same = apply_multi_d(&c, &MultiIndex::zero(4), false, &e);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let pt = random_point(2, 2, &mut rng);
    assert_eq!(ev(&same, &pt), ev(&e, &pt));
}

#[test]
fn curvature_constant_table() {
    let i11 = CapIndex::new(1, 1);
    assert_eq!(curvature_constant(i11, i11, i11, i11), -2);
    assert_eq!(
        curvature_constant(
            i11,
            CapIndex::new(1, 2),
            CapIndex::new(2, 1),
            CapIndex::new(2, 2)
        ),
        -1
    );
    for &l in &CAP_2X2 {
        assert_eq!(curvature_constant(i11, i11, CapIndex::new(2, 2), l), 0);
    }
    for &i in &CAP_2X2 {
        for &j in &CAP_2X2 {
            for &k in &CAP_2X2 {
                for &l in &CAP_2X2 {
                    let v = curvature_constant(i, j, k, l);
                    assert!((-2..=0).contains(&v));
                    assert_eq!(v, curvature_constant(l, j, k, i));
                    assert_eq!(v, curvature_constant(i, k, j, l));
                }
            }
        }
    }
}

#[test]
fn curvature_from_potential_matches_products_and_constants() {
    let c = build_chart(2, 2);
    let mut cache = DiffCache::new();
    // all 256 lowered components, shared derivative cache
    let mut lowered = Vec::new();
    for &i in &CAP_2X2 {
        for &p in &CAP_2X2 {
            for &l in &CAP_2X2 {
                for &q in &CAP_2X2 {
                    lowered.push((
                        (i, p, l, q),
                        curvature_from_potential_cached(&c, i, p, l, q, &mut cache),
                    ));
                }
            }
        }
    }
    let pts = {
        let mut v = vec![Point::origin()];
        v.extend(points(&c, 1, 10));
        v
    };
    for pt in &pts {
        let mut evr = ExactEvaluator::new(pt);
        let mut val = std::collections::BTreeMap::new();
        for ((i, p, l, q), e) in &lowered {
            let got = evr.eval(e).unwrap();
            // product form: g_{P,(il')-bar} g_{Q,(li')-bar} + (P <-> Q)
            let il = CapIndex::new(i.i, l.ip);
            let li = CapIndex::new(l.i, i.ip);
            let prod_form = metric_entry(&c, *p, il)
                .mul(&metric_entry(&c, *q, li))
                .add(&metric_entry(&c, *q, il).mul(&metric_entry(&c, *p, li)));
            assert_eq!(got, evr.eval(&prod_form).unwrap());
            val.insert((*i, *p, *l, *q), got);
        }
        // symmetry under swapping the barred slots
        for ((i, p, l, q), _) in &lowered {
            assert_eq!(val[&(*i, *p, *l, *q)], val[&(*l, *p, *i, *q)]);
        }
        // raising with two inverse metrics and a sign gives the constants
        let mut ginv = vec![vec![GaussianRational::zero(); 4]; 4];
        for (r, &a) in CAP_2X2.iter().enumerate() {
            for (s, &b) in CAP_2X2.iter().enumerate() {
                ginv[r][s] = evr.eval(&inv_metric_entry(&c, a, b)).unwrap();
            }
        }
        for &i in CAP_2X2.iter() {
            for (jj, &j) in CAP_2X2.iter().enumerate() {
                for (kk, &k) in CAP_2X2.iter().enumerate() {
                    for &l in CAP_2X2.iter() {
                        let mut acc = GaussianRational::zero();
                        for (pp, &p) in CAP_2X2.iter().enumerate() {
                            for (qq, &q) in CAP_2X2.iter().enumerate() {
                                let w = &ginv[jj][pp] * &ginv[kk][qq];
                                acc = &acc + &(&w * &val[&(i, p, l, q)]);
                            }
                        }
                        let raised = -&acc;
                        assert_eq!(
                            raised,
                            GaussianRational::from_ints(curvature_constant(i, j, k, l), 0)
                        );
                    }
                }
            }
        }
    }
}

#[test]
fn eval_modes_and_singularities() {
    let i11 = CapIndex::new(1, 1);
    let z = Expr::z(i11);
    let vanishing = z.sub(&z);
    let bad = Expr::quot(Expr::one(), vanishing);
    let pt = Point::origin();
    assert_eq!(eval_exact(&bad, &pt), Err(GeomError::EvalSingular));
    assert_eq!(eval_f64(&bad, &pt), Err(GeomError::EvalSingular));

    let mut pt2 = Point::origin();
    pt2.set(i11, GaussianRational::new(rat(1, 2), rat(-1, 3)));
    let e = z.pow(2).add(&Expr::constant(GaussianRational::from_ints(0, 1)));
    let exact = eval_exact(&e, &pt2).unwrap();
    let float = eval_f64(&e, &pt2).unwrap();
    let (re, im) = exact.to_f64s();
    assert!((float.re - re).abs() < 1e-12 && (float.im - im).abs() < 1e-12);
    match eval_expr(&e, &pt2, EvalMode::Exact).unwrap() {
        EvalOut::Exact(v) => assert_eq!(v, exact),
        _ => panic!("wrong mode"),
    }
}

#[test]
fn point_json_roundtrip() {
    let v: serde_json::Value =
        serde_json::from_str(r#"{"z[1,1]":["1/2","-1/3"],"z[2,2]":["3","0"]}"#).unwrap();
    let pt = Point::from_json(&v).unwrap();
    assert_eq!(
        pt.value(Var::Z(CapIndex::new(1, 1))),
        GaussianRational::new(rat(1, 2), rat(-1, 3))
    );
    assert_eq!(
        pt.value(Var::Zbar(CapIndex::new(1, 1))),
        GaussianRational::new(rat(1, 2), rat(1, 3))
    );
    assert_eq!(pt.value(Var::Z(CapIndex::new(2, 1))), GaussianRational::zero());
    let back = Point::from_json(&pt.to_json()).unwrap();
    assert_eq!(back, pt);
    assert!(Point::from_json(&serde_json::json!({"w[1,1]": ["0","0"]})).is_err());
    assert!(Point::from_json(&serde_json::json!({"z[1,1]": ["0"]})).is_err());
}
