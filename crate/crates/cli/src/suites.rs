//! Verification suites shared by the `verify` subcommand and the
//! acceptance tests. Suites report one line per check instead of
//! panicking, so the binary can render any format and exit nonzero on
//! failure.

use crate::commands::OutputFormat;
use coefficients::{
    check_i_independence, closed_form, linear_system_table, recurrence_table, residual_cor32,
    residual_general_grassmann, residual_hs, CoeffTable,
};
use exact_scalars::GaussianRational;
use fock::{build_t_n, matrix_element};
use geometry::{
    build_chart, curvature_constant, curvature_from_potential_cached, eval_exact,
    inv_metric_entry, metric_entry, potential_first_deriv, random_regular_point, wirtinger_d,
    DiffCache, Expr, Point, Var,
};
use indices::{mi_enumerate, CapIndex, MultiIndex, CAP_2X2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use star::{
    bracket_contraction, c1_antisymmetric_part, eval_series, star_coeff_form, star_direct_form,
    verify_associativity, verify_separation, verify_separation_right, verify_unit,
};
use std::collections::BTreeMap;

pub struct SuiteReport {
    pub name: String,
    pub checks: Vec<(String, bool)>,
    pub passed: bool,
}

impl SuiteReport {
    pub fn new(name: &str) -> Self {
        SuiteReport {
            name: name.into(),
            checks: Vec::new(),
            passed: true,
        }
    }

    pub fn check(&mut self, label: &str, ok: bool) {
        self.checks.push((label.into(), ok));
        self.passed &= ok;
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Text => {
                let mut out = String::new();
                for (label, ok) in &self.checks {
                    out.push_str(&format!(
                        "[{}] {label}\n",
                        if *ok { "PASS" } else { "FAIL" }
                    ));
                }
                out.push_str(&format!(
                    "suite {}: {}\n",
                    self.name,
                    if self.passed { "PASS" } else { "FAIL" }
                ));
                out
            }
            OutputFormat::Json => {
                let checks: Vec<serde_json::Value> = self
                    .checks
                    .iter()
                    .map(|(label, ok)| serde_json::json!({ "check": label, "ok": ok }))
                    .collect();
                let v = serde_json::json!({
                    "suite": self.name,
                    "checks": checks,
                    "passed": self.passed,
                });
                format!("{v}\n")
            }
            OutputFormat::Csv => {
                let mut out = String::from("check,result\n");
                for (label, ok) in &self.checks {
                    out.push_str(&format!(
                        "\"{}\",{}\n",
                        label.replace('"', "\"\""),
                        if *ok { "PASS" } else { "FAIL" }
                    ));
                }
                out
            }
        }
    }
}

fn ev(e: &Expr, pt: &Point) -> GaussianRational {
    eval_exact(e, pt).unwrap()
}

fn points(seed: u64, p: u8, q: u8, count: usize) -> Vec<Point> {
    let c = build_chart(p, q);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| random_regular_point(&c, &mut rng))
        .collect()
}

/// Every reference index, every admissible pair of weight n: residual
/// must be the zero polynomial.
fn order_residual_vanishes<F>(n: usize, table: &CoeffTable, residual: F) -> bool
where
    F: Fn(usize, CapIndex, &MultiIndex, &MultiIndex, &CoeffTable) -> coefficients::CoeffPoly,
{
    let ms = mi_enumerate(n, 4);
    CAP_2X2.into_iter().all(|i_ref| {
        ms.iter()
            .all(|a| ms.iter().all(|b| residual(n, i_ref, a, b, table).is_zero()))
    })
}

/// Closed form, recurrence solution and dense linear solve agree on
/// every admissible pair, plus both recurrence residuals vanish.
pub fn suite_recurrence(n_max: usize) -> SuiteReport {
    let mut rep = SuiteReport::new("recurrence");
    let rec = recurrence_table(n_max);
    let lin = linear_system_table(n_max);
    for n in 0..=n_max {
        let ms = mi_enumerate(n, 4);
        let mut ok = true;
        for a in &ms {
            for b in &ms {
                let cf = closed_form(n, a, b).unwrap();
                ok &= cf == rec.value(n, a, b) && cf == lin.value(n, a, b);
            }
        }
        rep.check(
            &format!(
                "order {n}: closed form = recurrence = linear system ({} pairs)",
                ms.len() * ms.len()
            ),
            ok,
        );
    }
    for n in 1..=n_max {
        rep.check(
            &format!("order {n}: lowering recurrence residual vanishes for every reference index"),
            order_residual_vanishes(n, &rec, residual_cor32),
        );
        rep.check(
            &format!("order {n}: shape-generic recurrence residual vanishes"),
            order_residual_vanishes(n, &rec, |n, i, a, b, t| {
                residual_general_grassmann(2, 2, n, i, a, b, t)
            }),
        );
    }
    rep
}

/// The dual-side recurrence residual vanishes on the solved table.
pub fn suite_hs_residual(n_max: usize) -> SuiteReport {
    let mut rep = SuiteReport::new("hs-residual");
    let table = recurrence_table(n_max);
    for n in 1..=n_max {
        rep.check(
            &format!("order {n}: dual recurrence residual vanishes for every reference index"),
            order_residual_vanishes(n, &table, |n, i, a, b, t| residual_hs(2, 2, n, i, a, b, t)),
        );
    }
    rep
}

/// All three residual families vanish on one solved table.
pub fn suite_residuals(n_max: usize) -> SuiteReport {
    let mut rep = SuiteReport::new("residuals");
    let table = recurrence_table(n_max);
    for n in 1..=n_max {
        rep.check(
            &format!("order {n}: lowering recurrence residual"),
            order_residual_vanishes(n, &table, residual_cor32),
        );
        rep.check(
            &format!("order {n}: shape-generic recurrence residual"),
            order_residual_vanishes(n, &table, |n, i, a, b, t| {
                residual_general_grassmann(2, 2, n, i, a, b, t)
            }),
        );
        rep.check(
            &format!("order {n}: dual recurrence residual"),
            order_residual_vanishes(n, &table, |n, i, a, b, t| residual_hs(2, 2, n, i, a, b, t)),
        );
    }
    rep
}

/// The closed form gives the same polynomial for all four reference
/// indices.
pub fn suite_i_independence(n_max: usize) -> SuiteReport {
    let mut rep = SuiteReport::new("i-independence");
    for n in 1..=n_max {
        rep.check(
            &format!("order {n}: closed form independent of the reference index"),
            check_i_independence(n),
        );
    }
    rep
}

/// Operator matrix elements reproduce the closed form pair by pair.
pub fn suite_fock(n_max: usize) -> SuiteReport {
    let mut rep = SuiteReport::new("fock");
    for n in 0..=n_max {
        let op = build_t_n(n);
        let ms = mi_enumerate(n, 4);
        let mut ok = true;
        for a in &ms {
            for b in &ms {
                ok &= matrix_element(&op, a, b).unwrap() == closed_form(n, a, b).unwrap();
            }
        }
        rep.check(
            &format!(
                "order {n}: operator matrix elements match the closed form ({} pairs)",
                ms.len() * ms.len()
            ),
            ok,
        );
    }
    rep
}

/// All four computation routes agree on every admissible pair.
pub fn four_route_agreement(n_max: usize) -> SuiteReport {
    let mut rep = SuiteReport::new("four-route agreement");
    let rec = recurrence_table(n_max);
    let lin = linear_system_table(n_max);
    for n in 0..=n_max {
        let op = build_t_n(n);
        let ms = mi_enumerate(n, 4);
        let mut ok = true;
        for a in &ms {
            for b in &ms {
                let cf = closed_form(n, a, b).unwrap();
                ok &= cf == rec.value(n, a, b)
                    && cf == lin.value(n, a, b)
                    && cf == matrix_element(&op, a, b).unwrap();
            }
        }
        rep.check(
            &format!(
                "order {n}: closed form = recurrence = linear system = operator ({} pairs)",
                ms.len() * ms.len()
            ),
            ok,
        );
    }
    rep
}

/// Chart geometry: potential hessian, derivative factorization, exact
/// inverse, and (on the 2x2 chart) the constant curvature table.
pub fn suite_geometry(p: u8, q: u8, seed: u64, n_points: usize) -> SuiteReport {
    let mut rep = SuiteReport::new("geometry");
    let c = build_chart(p, q);
    let pts = points(seed, p, q, n_points);
    let idxs = c.cap_indices();
    let dim = idxs.len();

    let mut ok = true;
    for &i in &idxs {
        for &j in &idxs {
            // d_I d_{J-bar} log det B via the quotient rule on det B
            let dj = Expr::quot(wirtinger_d(&c.det_b, Var::Zbar(j)), c.det_b.clone());
            let hess = wirtinger_d(&dj, Var::Z(i));
            let g = metric_entry(&c, i, j);
            for pt in &pts {
                ok &= ev(&hess, pt) == ev(&g, pt);
            }
        }
    }
    rep.check(
        &format!("metric entries equal the potential hessian at {n_points} points"),
        ok,
    );

    let mut ok = true;
    for &i in &idxs {
        for &j in &idxs {
            let ma = CapIndex::new(i.i, j.ip);
            let mb = CapIndex::new(j.i, i.ip);
            for (barred, var) in [(false, Var::Z(i)), (true, Var::Zbar(i))] {
                let lhs = wirtinger_d(&potential_first_deriv(&c, j, barred), var);
                let rhs = potential_first_deriv(&c, ma, barred)
                    .mul(&potential_first_deriv(&c, mb, barred))
                    .neg();
                for pt in &pts {
                    ok &= ev(&lhs, pt) == ev(&rhs, pt);
                }
            }
        }
    }
    rep.check(
        "second potential derivatives factor into first-derivative products",
        ok,
    );

    let mut ok = true;
    for pt in &pts {
        let mut evr = geometry::ExactEvaluator::new(pt);
        for &d in &idxs {
            for &x in &idxs {
                let lhs = evr.eval(&metric_entry(&c, d, x)).unwrap();
                let rhs = evr.eval(&metric_entry(&c, x, d)).unwrap();
                ok &= lhs == rhs.conj();
            }
        }
        for r in 0..dim {
            for s in 0..dim {
                let mut acc = GaussianRational::zero();
                for k in 0..dim {
                    let a = evr.eval(&c.metric[r][k]).unwrap();
                    let b = evr.eval(&c.inv_metric[k][s]).unwrap();
                    acc = &acc + &(&a * &b);
                }
                let expect = if r == s {
                    GaussianRational::one()
                } else {
                    GaussianRational::zero()
                };
                ok &= acc == expect;
            }
        }
    }
    rep.check("metric is hermitian and inverts exactly", ok);

    if (p, q) == (2, 2) {
        let mut ok = true;
        let mut cache = DiffCache::new();
        // all 256 lowered components with a shared derivative cache,
        // paired with their two-term metric product form
        let mut lowered = Vec::new();
        for &i in &CAP_2X2 {
            for &pp in &CAP_2X2 {
                for &l in &CAP_2X2 {
                    for &qq in &CAP_2X2 {
                        let il = CapIndex::new(i.i, l.ip);
                        let li = CapIndex::new(l.i, i.ip);
                        let prod = metric_entry(&c, pp, il)
                            .mul(&metric_entry(&c, qq, li))
                            .add(&metric_entry(&c, qq, il).mul(&metric_entry(&c, pp, li)));
                        lowered.push((
                            (i, pp, l, qq),
                            curvature_from_potential_cached(&c, i, pp, l, qq, &mut cache),
                            prod,
                        ));
                    }
                }
            }
        }
        for pt in &pts {
            let mut evr = geometry::ExactEvaluator::new(pt);
            let mut val = BTreeMap::new();
            for ((i, pp, l, qq), e, prod) in &lowered {
                let got = evr.eval(e).unwrap();
                ok &= got == evr.eval(prod).unwrap();
                val.insert((*i, *pp, *l, *qq), got);
            }
            let mut ginv = vec![vec![GaussianRational::zero(); 4]; 4];
            for (r, &a) in CAP_2X2.iter().enumerate() {
                for (s, &b) in CAP_2X2.iter().enumerate() {
                    ginv[r][s] = evr.eval(&inv_metric_entry(&c, a, b)).unwrap();
                }
            }
            for &i in &CAP_2X2 {
                for (jj, &j) in CAP_2X2.iter().enumerate() {
                    for (kk, &k) in CAP_2X2.iter().enumerate() {
                        for &l in &CAP_2X2 {
                            let mut acc = GaussianRational::zero();
                            for (ppi, &pp) in CAP_2X2.iter().enumerate() {
                                for (qqi, &qq) in CAP_2X2.iter().enumerate() {
                                    let w = &ginv[jj][ppi] * &ginv[kk][qqi];
                                    acc = &acc + &(&w * &val[&(i, pp, l, qq)]);
                                }
                            }
                            ok &= -&acc
                                == GaussianRational::from_ints(curvature_constant(i, j, k, l), 0);
                        }
                    }
                }
            }
        }
        rep.check(
            &format!("raised curvature equals the constant table on all 256 components at {n_points} points"),
            ok,
        );
    } else {
        rep.check("curvature constant table applies to the 2x2 chart only, skipped", true);
    }
    rep
}

fn z(r: u8, c: u8) -> Expr {
    Expr::z(CapIndex::new(r, c))
}

fn zb(r: u8, c: u8) -> Expr {
    Expr::zbar(CapIndex::new(r, c))
}

/// Mixed-character pairs exercising products, sums, powers and complex
/// constants.
fn corpus() -> Vec<(Expr, Expr)> {
    vec![
        (z(1, 1), zb(1, 1)),
        (zb(1, 1), z(1, 1)),
        (z(1, 2), zb(2, 1)),
        (z(1, 1).mul(&z(2, 2)), zb(1, 2)),
        (z(1, 1).add(&zb(1, 1)), z(2, 1)),
        (
            Expr::constant(GaussianRational::from_ints(2, 1)).add(&z(1, 2)),
            zb(2, 2).mul(&z(1, 2)),
        ),
        (z(1, 1).mul(&zb(1, 2)), z(2, 2).add(&z(1, 1))),
        (zb(1, 1).mul(&zb(2, 2)), z(1, 1).mul(&z(1, 2))),
        (z(2, 1).add(&z(1, 2).mul(&zb(1, 1))), zb(2, 1)),
        (z(1, 1).pow(2), zb(1, 1).pow(2)),
    ]
}

/// Unit law, separation of variables on both sides, agreement of the
/// two product constructions, associativity, and the first-order
/// bracket, all at seeded random regular points.
pub fn suite_star_axioms(
    seed: u64,
    order: usize,
    n_points: usize,
    extra_triple: Option<&[Expr; 3]>,
) -> SuiteReport {
    let mut rep = SuiteReport::new("star-axioms");
    let c = build_chart(2, 2);
    let pts = points(seed, 2, 2, n_points);

    let unit_fs = [
        z(1, 1),
        z(1, 1).mul(&zb(1, 2)).add(&Expr::int(3)),
        zb(2, 2).pow(2),
    ];
    let mut ok = true;
    for f in &unit_fs {
        ok &= verify_unit(&c, f, order, &pts).unwrap_or(false);
    }
    rep.check(
        &format!("1 is a two-sided unit through order {order}"),
        ok,
    );

    let holos = [z(1, 1), z(1, 1).mul(&z(1, 2)), z(2, 1).pow(2).add(&z(1, 1))];
    let antis = [
        zb(1, 1),
        zb(2, 1).mul(&zb(2, 2)),
        zb(1, 2).pow(2).add(&zb(2, 2)),
    ];
    let fs = [
        zb(1, 1).mul(&z(2, 2)),
        z(1, 2).add(&zb(2, 1)),
        z(1, 1).mul(&zb(1, 1)),
    ];
    let mut ok = true;
    for a in &holos {
        for f in &fs {
            ok &= verify_separation(&c, a, f, order, &pts).unwrap_or(false);
        }
    }
    for b in &antis {
        for f in &fs {
            ok &= verify_separation_right(&c, f, b, order, &pts).unwrap_or(false);
        }
    }
    rep.check(
        &format!("holomorphic left and antiholomorphic right factors multiply plainly through order {order}"),
        ok,
    );

    let two_path_order = order.min(2);
    let pairs = corpus();
    let mut ok = true;
    for (f, g) in &pairs {
        let a = star_coeff_form(&c, f, g, two_path_order);
        let b = star_direct_form(&c, f, g, two_path_order);
        for pt in &pts {
            ok &= match (eval_series(&a, pt), eval_series(&b, pt)) {
                (Ok(x), Ok(y)) => x == y,
                _ => false,
            };
        }
    }
    rep.check(
        &format!(
            "coefficient and direct constructions agree at order {two_path_order} on {} pairs",
            pairs.len()
        ),
        ok,
    );

    let assoc_order = order.min(2);
    let mut triples = vec![
        (z(1, 1), zb(1, 2), z(2, 1).mul(&zb(2, 1))),
        (z(1, 2), zb(1, 1).mul(&z(2, 2)), zb(2, 2)),
        (z(1, 1).add(&zb(1, 1)), z(1, 2), zb(1, 2).pow(2)),
    ];
    if let Some([f, g, h]) = extra_triple {
        triples.push((f.clone(), g.clone(), h.clone()));
    }
    let mut ok = true;
    for (f, g, h) in &triples {
        ok &= verify_associativity(&c, f, g, h, assoc_order, &pts).unwrap_or(false);
    }
    rep.check(
        &format!(
            "associativity holds through order {assoc_order} on {} triples",
            triples.len()
        ),
        ok,
    );

    let mut ok = true;
    for (f, g) in pairs.iter().take(3) {
        let anti = c1_antisymmetric_part(&c, f, g);
        let oracle = bracket_contraction(&c, f, g);
        for pt in &pts {
            ok &= ev(&anti, pt) == ev(&oracle, pt);
        }
    }
    rep.check(
        "first-order antisymmetric part is the inverse-metric bracket",
        ok,
    );
    rep
}

/// First-order bracket structure: contraction oracle, antisymmetry,
/// Leibniz rule.
pub fn suite_bracket(seed: u64, n_points: usize) -> SuiteReport {
    let mut rep = SuiteReport::new("bracket");
    let c = build_chart(2, 2);
    let pts = points(seed, 2, 2, n_points);
    let pairs = corpus();

    let mut ok = true;
    for (f, g) in &pairs {
        let anti = c1_antisymmetric_part(&c, f, g);
        let oracle = bracket_contraction(&c, f, g);
        for pt in &pts {
            ok &= ev(&anti, pt) == ev(&oracle, pt);
        }
    }
    rep.check(
        &format!(
            "antisymmetric first-order part equals the inverse-metric contraction on {} pairs",
            pairs.len()
        ),
        ok,
    );

    let mut ok = true;
    for (f, g) in &pairs {
        let a = c1_antisymmetric_part(&c, f, g);
        let b = c1_antisymmetric_part(&c, g, f);
        for pt in &pts {
            ok &= ev(&a, pt) == -&ev(&b, pt);
        }
    }
    rep.check("bracket is antisymmetric", ok);

    let triples = [
        (z(1, 1), zb(1, 1), z(1, 2)),
        (zb(2, 1), z(2, 2), zb(1, 2).add(&z(1, 1))),
        (z(1, 1).mul(&zb(2, 2)), z(2, 1), zb(1, 1).pow(2)),
    ];
    let mut ok = true;
    for (f, g, h) in &triples {
        let lhs = c1_antisymmetric_part(&c, f, &g.mul(h));
        let rhs = c1_antisymmetric_part(&c, f, g)
            .mul(h)
            .add(&g.mul(&c1_antisymmetric_part(&c, f, h)));
        for pt in &pts {
            ok &= ev(&lhs, pt) == ev(&rhs, pt);
        }
    }
    rep.check("bracket satisfies the Leibniz rule in the second slot", ok);
    rep
}
