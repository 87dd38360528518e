//! End-to-end acceptance: nine criteria, one test each, every one
//! printing a single summary line and enforcing its wall-clock budget.
//! Run with --nocapture to see the lines.

use coefficients::{closed_form, recurrence_table, CoeffPoly, MetricSymbol, Monomial};
use exact_scalars::{rat_int, HRational};
use fock::{build_t_n, matrix_element};
use indices::{mi_enumerate, mixed_col, mixed_row, slash, CapIndex, MultiIndex, CAP_2X2};
use starprod::{
    cmd_bench, four_route_agreement, suite_bracket, suite_geometry, suite_i_independence,
    suite_residuals, suite_star_axioms, BenchCutoff, OutputFormat, RunConfig, SuiteReport,
};
use std::time::{Duration, Instant};

const SEED: u64 = 20260814;

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

fn finish(criterion: usize, label: &str, started: Instant, budget_secs: u64, passed: bool) {
    let dt = started.elapsed();
    println!(
        "criterion {criterion}: {label}: {} ({dt:.1?})",
        if passed { "PASS" } else { "FAIL" }
    );
    assert!(passed, "criterion {criterion} failed");
    assert!(
        dt < Duration::from_secs(budget_secs),
        "criterion {criterion} exceeded its {budget_secs} s budget: {dt:?}"
    );
}

fn report_passed(rep: &SuiteReport) -> bool {
    print!("{}", rep.render(OutputFormat::Text));
    rep.passed
}

#[test]
fn criterion_1_initial_coefficients() {
    let t = Instant::now();
    let mut ok = true;

    let zero = MultiIndex::zero(4);
    let one = CoeffPoly::one();
    ok &= closed_form(0, &zero, &zero).unwrap() == one;
    let rec = recurrence_table(1);
    ok &= rec.value(0, &zero, &zero) == one;
    let t0 = build_t_n(0);
    ok &= matrix_element(&t0, &zero, &zero).unwrap() == one;

    // order one: hbar times one metric symbol, all 16 pairs, all routes
    let hbar = HRational::hbar();
    let t1 = build_t_n(1);
    for m in CAP_2X2 {
        for l in CAP_2X2 {
            let mut expect = CoeffPoly::zero();
            expect.add_term(Monomial::one().times_symbol(sym(l, m)), &hbar);
            ok &= closed_form(1, &e(m), &e(l)).unwrap() == expect;
            ok &= rec.value(1, &e(m), &e(l)) == expect;
            ok &= matrix_element(&t1, &e(m), &e(l)).unwrap() == expect;
        }
    }
    finish(1, "initial coefficients exact on all routes", t, 1, ok);
}

/// The four order-2 closed forms, transcribed term by term: scalar
/// prefactor and the barred index pair of each metric product.
fn order_two_expected(p: CapIndex, beta: &MultiIndex, alpha: &MultiIndex) -> CoeffPoly {
    let hbar = HRational::hbar();
    let tau2_inv = hpoly(&[1, -1], &[0, 1]).inv().unwrap(); // (-1 + 1/h)^-1
    let plus_inv = hpoly(&[1, 1], &[0, 1]).inv().unwrap(); // (1 + 1/h)^-1
    let half = HRational::new(vec![rat_int(1)], vec![rat_int(2)]).unwrap();

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
        // the mixed term carries an extra hbar
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
fn criterion_2_order_two_golden_cases() {
    let t = Instant::now();
    let mut ok = true;
    let alphas = mi_enumerate(2, 4);
    let rec = recurrence_table(2);
    for p in CAP_2X2 {
        for partner in [p, mixed_row(p), mixed_col(p), slash(p)] {
            let beta = e2(p, partner);
            for alpha in &alphas {
                let expect = order_two_expected(p, &beta, alpha);
                ok &= !expect.is_zero();
                ok &= closed_form(2, alpha, &beta).unwrap() == expect;
                ok &= rec.value(2, alpha, &beta) == expect;
            }
        }
    }
    finish(2, "order-2 case formulas reproduced exactly", t, 5, ok);
}

#[test]
fn criterion_3_four_route_equivalence() {
    let t = Instant::now();
    let rep = four_route_agreement(4);
    let ok = report_passed(&rep);
    finish(3, "four computation routes agree through order 4", t, 600, ok);
}

#[test]
fn criterion_4_residual_suites() {
    let t = Instant::now();
    let rep = suite_residuals(4);
    let ok = report_passed(&rep);
    finish(
        4,
        "all residual families vanish through order 4 for every reference index",
        t,
        600,
        ok,
    );
}

#[test]
fn criterion_5_reference_index_independence() {
    let t = Instant::now();
    let rep = suite_i_independence(3);
    let ok = report_passed(&rep);
    finish(5, "closed form independent of the reference index", t, 120, ok);
}

#[test]
fn criterion_6_geometry_suite() {
    let t = Instant::now();
    let rep = suite_geometry(2, 2, SEED, 5);
    let ok = report_passed(&rep);
    finish(6, "chart geometry identities hold at 5 points", t, 120, ok);
}

#[test]
fn criterion_7_star_product_axioms() {
    let t = Instant::now();
    let rep = suite_star_axioms(SEED, 3, 3, None);
    let ok = report_passed(&rep);
    finish(7, "star product axioms hold at desk scale", t, 900, ok);
}

#[test]
fn criterion_8_first_order_bracket() {
    let t = Instant::now();
    let rep = suite_bracket(SEED, 5);
    let ok = report_passed(&rep);
    finish(8, "first-order bracket structure verified", t, 60, ok);
}

#[test]
fn criterion_9_recurrence_speedup() {
    // timing criterion: 10x is a floor, there is no wall-clock budget.
    // the naive run is cut off at 12x the measured recurrence time,
    // which still proves the floor when it aborts.
    let cfg = RunConfig {
        n: Some(6),
        ..RunConfig::default()
    };
    let rep = cmd_bench(&cfg, Some(5), BenchCutoff::FactorOfRecurrence(12.0)).unwrap();
    print!("{}", rep.render(OutputFormat::Text));
    println!(
        "criterion 9: recurrence table at order 6 is {}{:.1}x faster than naive enumeration at order 5: {}",
        if rep.naive_finished { "" } else { ">= " },
        rep.ratio,
        if rep.meets_ten_x { "PASS" } else { "FAIL" }
    );
    assert!(rep.meets_ten_x, "criterion 9 failed: speedup below the 10x floor");
}
