use coefficients::{
    check_i_independence, closed_form, closed_form_naive, d_factor,
    delta_factor, lambda_factor, linear_system_table, naive_order_table, order_from_json,
    order_to_csv, order_to_json, recurrence_table, recurrence_table_sequential, residual_cor32,
    residual_general_grassmann, residual_hs, CoeffError, CoeffPoly, CoeffTable, DeltaPair,
    MetricSymbol, Monomial, SeqTuple,
};
use exact_scalars::{rat_int, HRational};
use indices::{mi_enumerate, mixed_col, mixed_row, slash, CapIndex, MultiIndex, CAP_2X2};
use proptest::prelude::*;

fn e(c: CapIndex) -> MultiIndex {
    MultiIndex::unit(c)
}

fn e2(a: CapIndex, b: CapIndex) -> MultiIndex {
    MultiIndex::unit(a).shifted(b, 1)
}

fn sym(barred: CapIndex, unbarred: CapIndex) -> MetricSymbol {
    MetricSymbol::new(barred, unbarred)
}

fn hpoly(num: &[i64], den: &[i64]) -> HRational {
    HRational::new(
        num.iter().map(|&n| rat_int(n)).collect(),
        den.iter().map(|&d| rat_int(d)).collect(),
    )
    .unwrap()
}

#[test]
fn d_factor_golden_values() {
    for j in CAP_2X2 {
        // k = j: plain Kronecker delta
        for x in CAP_2X2 {
            assert_eq!(d_factor(x, j, j.i), (x == j) as i64);
        }
        let other = 3 - j.i;
        assert_eq!(d_factor(j, j, other), 1);
        assert_eq!(d_factor(slash(j), j, other), 1);
        assert_eq!(d_factor(mixed_row(j), j, other), -1);
        assert_eq!(d_factor(mixed_col(j), j, other), 0);
        // every position feeds total weight one into the beta sum
        for k in 1..=2 {
            let total: i64 = CAP_2X2.into_iter().map(|s| d_factor(s, j, k)).sum();
            assert_eq!(total, 1);
        }
    }
}

#[test]
fn lambda_and_delta_tail_sums() {
    let p = CapIndex::new(1, 2);
    let seq = SeqTuple::new(vec![p, p], vec![p, p], vec![p.i, p.i]);
    // empty tails at l = n
    for s in CAP_2X2 {
        assert_eq!(lambda_factor(2, s, &seq), 0);
    }
    for i in CAP_2X2 {
        assert_eq!(delta_factor(DeltaPair::RefAndMixedCol, i, 2, &seq), 0);
        assert_eq!(delta_factor(DeltaPair::SlashAndMixedRow, i, 2, &seq), 0);
    }
    // J = (P,P), k = (p,p): Λ_{1,p∖p'} = d_{p∖p',P,p} = 0
    assert_eq!(lambda_factor(1, mixed_row(p), &seq), 0);
    assert_eq!(lambda_factor(1, p, &seq), 1);
    // Δ_{I,∖ii',1} = δ_{IP} + δ_{∖ii',P}
    for i in CAP_2X2 {
        let expect = (i == p) as i64 + (mixed_col(i) == p) as i64;
        assert_eq!(delta_factor(DeltaPair::RefAndMixedCol, i, 1, &seq), expect);
        let expect = (slash(i) == p) as i64 + (mixed_row(i) == p) as i64;
        assert_eq!(delta_factor(DeltaPair::SlashAndMixedRow, i, 1, &seq), expect);
    }
    // a tail with a flipped k picks up the negative d at the mixed row
    let seq = SeqTuple::new(vec![p, p], vec![p, p], vec![p.i, 3 - p.i]);
    assert_eq!(lambda_factor(1, mixed_row(p), &seq), -1);
    assert_eq!(lambda_factor(1, slash(p), &seq), 1);
}

#[test]
fn closed_form_order_zero_and_errors() {
    let zero = MultiIndex::zero(4);
    assert_eq!(closed_form(0, &zero, &zero).unwrap(), CoeffPoly::one());

    let bad = closed_form(1, &zero, &e(CAP_2X2[0]));
    assert_eq!(
        bad,
        Err(CoeffError::BadWeight {
            order: 1,
            alpha_weight: 0,
            beta_weight: 1
        })
    );
    // negative component: weight matches, admissibility does not
    let neg = MultiIndex(vec![2, -1, 0, 0]);
    assert!(closed_form(1, &neg, &e(CAP_2X2[0])).is_err());
    // wrong length
    assert!(closed_form(0, &MultiIndex::zero(3), &MultiIndex::zero(4)).is_err());
}

#[test]
fn order_one_is_hbar_times_metric() {
    let hbar = HRational::hbar();
    for m in CAP_2X2 {
        for l in CAP_2X2 {
            let mut expect = CoeffPoly::zero();
            expect.add_term(Monomial::one().times_symbol(sym(l, m)), &hbar);
            assert_eq!(closed_form(1, &e(m), &e(l)).unwrap(), expect);
        }
    }
}

/// The four order-2 beta patterns, transcribed from the displayed
/// results: scalar prefactor and the barred index pair of each product.
fn expected_order2(p: CapIndex, beta: &MultiIndex, alpha: &MultiIndex) -> CoeffPoly {
    let hbar = HRational::hbar();
    // -1 + 1/h and 1 + 1/h built literally
    let tau2_inv = hpoly(&[1, -1], &[0, 1]).inv().unwrap();
    let plus_inv = hpoly(&[1, 1], &[0, 1]).inv().unwrap();
    let half = HRational::new(vec![rat_int(1)], vec![rat_int(2)]).unwrap();

    // (barred1, barred2, scalar) per product term of the case
    let mut parts: Vec<(CapIndex, CapIndex, HRational)> = Vec::new();
    if *beta == e2(p, p) {
        parts.push((p, p, hbar.mul(&half).mul(&tau2_inv)));
    } else if *beta == e2(p, mixed_row(p)) {
        parts.push((p, mixed_row(p), hbar.mul(&tau2_inv)));
    } else if *beta == e2(p, mixed_col(p)) {
        parts.push((p, mixed_col(p), hbar.mul(&tau2_inv)));
    } else if *beta == e2(p, slash(p)) {
        let pref = tau2_inv.mul(&plus_inv);
        parts.push((p, slash(p), pref.clone()));
        parts.push((mixed_row(p), mixed_col(p), pref.mul(&hbar)));
    } else {
        panic!("beta is not one of the four order-2 patterns for this p");
    }

    let mut out = CoeffPoly::zero();
    for d1 in CAP_2X2 {
        for d2 in CAP_2X2 {
            if *alpha != e2(d1, d2) {
                continue;
            }
            for (b1, b2, c) in &parts {
                let mono = Monomial::one()
                    .times_symbol(sym(*b1, d1))
                    .times_symbol(sym(*b2, d2));
                out.add_term(mono, c);
            }
        }
    }
    out
}

#[test]
fn order_two_case_golden_values() {
    let alphas = mi_enumerate(2, 4);
    let rec = recurrence_table(2);
    for p in CAP_2X2 {
        for partner in [p, mixed_row(p), mixed_col(p), slash(p)] {
            let beta = e2(p, partner);
            for alpha in &alphas {
                let expect = expected_order2(p, &beta, alpha);
                assert!(!expect.is_zero(), "every weight-2 alpha is reachable");
                assert_eq!(closed_form(2, alpha, &beta).unwrap(), expect);
                assert_eq!(rec.value(2, alpha, &beta), expect);
            }
        }
    }
}

#[test]
fn three_route_agreement_through_order_three() {
    let rec = recurrence_table(3);
    let lin = linear_system_table(3);
    for n in 0..=3usize {
        let ms = mi_enumerate(n, 4);
        for a in &ms {
            for b in &ms {
                let cf = closed_form(n, a, b).unwrap();
                assert_eq!(cf, rec.value(n, a, b), "closed vs recurrence at n={n}");
                assert_eq!(cf, lin.value(n, a, b), "closed vs linear system at n={n}");
            }
        }
    }
}

#[test]
fn sequential_table_is_bit_identical() {
    assert_eq!(recurrence_table(2), recurrence_table_sequential(2));
}

#[test]
fn naive_enumeration_agrees() {
    let i11 = CapIndex::new(1, 1);
    for n in 0..=2usize {
        let ms = mi_enumerate(n, 4);
        for a in &ms {
            for b in &ms {
                assert_eq!(
                    closed_form_naive(n, a, b, i11).unwrap(),
                    closed_form(n, a, b).unwrap()
                );
            }
        }
    }
    // spot checks at order 3, including a flipped reference
    let a = MultiIndex(vec![1, 1, 1, 0]);
    let b = MultiIndex(vec![0, 1, 1, 1]);
    assert_eq!(
        closed_form_naive(3, &a, &b, CapIndex::new(2, 1)).unwrap(),
        closed_form(3, &a, &b).unwrap()
    );

    let table = naive_order_table(2, i11);
    let rec = recurrence_table(2);
    let ms = mi_enumerate(2, 4);
    let mut seen = 0;
    for a in &ms {
        for b in &ms {
            let naive = table
                .get(&(a.clone(), b.clone()))
                .cloned()
                .unwrap_or_else(CoeffPoly::zero);
            assert_eq!(naive, rec.value(2, a, b));
            if !naive.is_zero() {
                seen += 1;
            }
        }
    }
    assert_eq!(seen, 100, "every weight-2 pair carries a coefficient");
}

#[test]
fn residuals_vanish_on_the_solved_table() {
    let rec = recurrence_table(3);
    for n in 1..=3usize {
        let ms = mi_enumerate(n, 4);
        for i in CAP_2X2 {
            for a in &ms {
                for b in &ms {
                    assert!(
                        residual_cor32(n, i, a, b, &rec).is_zero(),
                        "cor32 residual at n={n}, I={i}, alpha={a}, beta={b}"
                    );
                    assert!(
                        residual_general_grassmann(2, 2, n, i, a, b, &rec).is_zero(),
                        "general residual at n={n}, I={i}"
                    );
                    assert!(
                        residual_hs(2, 2, n, i, a, b, &rec).is_zero(),
                        "hs residual at n={n}, I={i}, alpha={a}, beta={b}"
                    );
                }
            }
        }
    }
}

#[test]
fn general_residual_specializes_to_cor32_even_off_solution() {
    let mut broken = recurrence_table(2);
    let a0 = MultiIndex(vec![1, 1, 0, 0]);
    let b0 = MultiIndex(vec![0, 1, 0, 1]);
    let tampered = broken.value(2, &a0, &b0).scale(&hpoly(&[7], &[3]));
    broken.insert(2, a0, b0, tampered);

    let ms = mi_enumerate(2, 4);
    let mut nonzero = 0;
    for i in CAP_2X2 {
        for a in &ms {
            for b in &ms {
                let lhs = residual_cor32(2, i, a, b, &broken);
                let rhs = residual_general_grassmann(2, 2, 2, i, a, b, &broken);
                assert_eq!(lhs, rhs);
                if !lhs.is_zero() {
                    nonzero += 1;
                }
            }
        }
    }
    assert!(nonzero > 0, "tampering must surface in the residuals");
}

#[test]
fn truncated_table_fails_hs_residual() {
    // order 0 seed only: the first-order identity sees a nonzero LHS
    // against an all-zero RHS
    let mut table = CoeffTable::new();
    table.insert(0, MultiIndex::zero(4), MultiIndex::zero(4), CoeffPoly::one());
    let i = CapIndex::new(1, 2);
    let r = residual_hs(2, 2, 1, i, &e(CAP_2X2[0]), &e(i), &table);
    assert!(!r.is_zero());
    let r = residual_cor32(1, i, &e(CAP_2X2[0]), &e(i), &table);
    assert!(!r.is_zero());
}

#[test]
fn reference_index_independence() {
    for n in 0..=3usize {
        assert!(check_i_independence(n), "reference dependence at n={n}");
    }
}

#[test]
fn homogeneity_and_hbar_valuation() {
    let rec = recurrence_table(3);
    for ((n, _, _), poly) in rec.iter() {
        for (mono, coeff) in poly.terms() {
            assert_eq!(mono.degree() as usize, *n, "monomial degree equals order");
            let v = coeff.valuation().expect("stored coefficients are nonzero");
            assert!(v >= *n as i64, "h-valuation at least the order");
            // and the series route agrees with the valuation route
            let series = coeff.series_at_zero(*n + 2).unwrap();
            for c in series.iter().take(*n) {
                assert!(c == &rat_int(0));
            }
        }
    }
}

#[test]
fn beta_weight_identity() {
    // Σ_J β_J(τ_n + β_{∖J} + β_{j∖j'} + 1) = n(τ_n+1) + 2(β_{11'}+β_{21'})(β_{22'}+β_{12'})
    for n in 1..=6usize {
        let tau = HRational::tau(n as i64);
        for beta in mi_enumerate(n, 4) {
            let mut lhs = HRational::zero();
            for j in CAP_2X2 {
                let inner = tau.add(&HRational::from_int(
                    (beta.get(slash(j)) + beta.get(mixed_row(j)) + 1) as i64,
                ));
                lhs = lhs.add(&inner.mul(&HRational::from_int(beta.get(j) as i64)));
            }
            let col1 = (beta.0[0] + beta.0[2]) as i64;
            let col2 = (beta.0[1] + beta.0[3]) as i64;
            let rhs = tau
                .add(&HRational::one())
                .mul(&HRational::from_int(n as i64))
                .add(&HRational::from_int(2 * col1 * col2));
            assert_eq!(lhs, rhs, "beta = {beta}");
        }
    }
}

#[test]
fn inadmissible_entries_are_absent() {
    let rec = recurrence_table(2);
    let neg = MultiIndex(vec![-1, 2, 1, 0]);
    assert!(rec.get(2, &neg, &MultiIndex(vec![2, 0, 0, 0])).is_none());
    assert!(rec.value(2, &neg, &MultiIndex(vec![2, 0, 0, 0])).is_zero());
    // weight mismatch rows were never produced
    assert!(rec.get(1, &MultiIndex(vec![2, 0, 0, 0]), &e(CAP_2X2[0])).is_none());
}

#[test]
fn symbol_text_and_slot_roundtrip() {
    for slot in 0..16 {
        let s = MetricSymbol::from_slot(slot);
        assert_eq!(s.slot(), slot);
        let text = s.to_string();
        assert_eq!(text.parse::<MetricSymbol>().unwrap(), s);
    }
    let s = MetricSymbol::new(CapIndex::new(1, 2), CapIndex::new(2, 1));
    assert_eq!(s.to_string(), "g[12',21']");
    let mono = Monomial::one().times_symbol(s).times_symbol(s);
    assert_eq!(mono.to_string(), "g[12',21']^2");
    assert_eq!(Monomial::one().to_string(), "1");
    assert!("g[13',11']".parse::<MetricSymbol>().is_err());
    assert!("h[11',11']".parse::<MetricSymbol>().is_err());
}

#[test]
fn json_and_csv_exports() {
    let rec = recurrence_table(2);
    let v = order_to_json(&rec, 2);
    assert_eq!(v["n"], 2);
    let parsed = order_from_json(&v).unwrap();
    assert_eq!(parsed.len(), rec.order_entries(2).len());
    let mut rebuilt = CoeffTable::new();
    for (a, b, p) in parsed {
        rebuilt.insert(2, a, b, p);
    }
    for (a, b, p) in rec.order_entries(2) {
        assert_eq!(rebuilt.value(2, a, b), *p);
    }

    let csv = order_to_csv(&rec, 2);
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "n,alpha,beta,mono,hbar_num,hbar_den");
    let rows: Vec<&str> = lines.collect();
    let expected_rows: usize = rec.order_entries(2).iter().map(|(_, _, p)| p.num_terms()).sum();
    assert_eq!(rows.len(), expected_rows);
    assert!(rows.iter().all(|r| r.starts_with("2,")));
}

fn arb_poly() -> impl Strategy<Value = CoeffPoly> {
    proptest::collection::vec(
        (0usize..16, 0u8..3, -4i64..5, 1i64..4, 0u8..3),
        0..6,
    )
    .prop_map(|terms| {
        let mut p = CoeffPoly::zero();
        for (slot, extra, num, den, hpow) in terms {
            let mut mono = Monomial::one().bump(slot);
            for s in 0..extra {
                mono = mono.bump((slot + s as usize + 1) % 16);
            }
            let c = HRational::new(vec![exact_scalars::rat(num, den)], vec![rat_int(1)])
                .unwrap()
                .mul(&HRational::hbar_pow(hpow as i64));
            p.add_term(mono, &c);
        }
        p
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_addition_laws(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
        prop_assert_eq!(a.add(&b), b.add(&a));
        prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
        prop_assert_eq!(a.sub(&a), CoeffPoly::zero());
        prop_assert_eq!(a.add(&CoeffPoly::zero()), a);
    }

    #[test]
    fn scaling_distributes(a in arb_poly(), b in arb_poly()) {
        let s = HRational::tau(2);
        prop_assert_eq!(a.add(&b).scale(&s), a.scale(&s).add(&b.scale(&s)));
        prop_assert_eq!(a.scale(&HRational::zero()), CoeffPoly::zero());
    }

    #[test]
    fn symbol_multiplication_shifts_degree(a in arb_poly(), slot in 0usize..16) {
        let shifted = a.times_slot(slot);
        prop_assert_eq!(shifted.num_terms(), a.num_terms());
        let lhs: Vec<u32> = shifted.terms().map(|(m, _)| m.degree()).collect();
        let rhs: Vec<u32> = a.terms().map(|(m, _)| m.degree() + 1).collect();
        prop_assert_eq!(lhs, rhs);
    }
}
