//! Axiom checkers. Coefficient Exprs are never compared syntactically:
//! equality means equal exact values at supplied chart-regular points.

use exact_scalars::GaussianRational;
use geometry::{
    inv_metric_entry, random_regular_point, wirtinger_d, ExactEvaluator, Expr, GrassmannChart,
    Point, Var,
};
use rand::Rng;

use crate::{star_coeff_form, star_from_table, HSeries, StarError};
use coefficients::recurrence_table;

/// Chart-regular Gaussian-rational points (det B does not vanish, so every
/// metric quotient evaluates).
pub fn draw_regular_points<R: Rng + ?Sized>(
    c: &GrassmannChart,
    count: usize,
    rng: &mut R,
) -> Vec<Point> {
    (0..count).map(|_| random_regular_point(c, rng)).collect()
}

/// Values of every series coefficient at one point.
pub fn eval_series(series: &HSeries, point: &Point) -> Result<Vec<GaussianRational>, StarError> {
    let mut ev = ExactEvaluator::new(point);
    series
        .coeffs
        .iter()
        .map(|e| ev.eval(e).map_err(StarError::from))
        .collect()
}

fn eval_at(e: &Expr, point: &Point) -> Result<GaussianRational, StarError> {
    ExactEvaluator::new(point).eval(e).map_err(StarError::from)
}

/// f * 1 = 1 * f = f: order zero evaluates to f, every higher order to 0.
pub fn verify_unit(
    c: &GrassmannChart,
    f: &Expr,
    n_max: usize,
    points: &[Point],
) -> Result<bool, StarError> {
    let one = Expr::one();
    let right = star_coeff_form(c, f, &one, n_max);
    let left = star_coeff_form(c, &one, f, n_max);
    for p in points {
        let want = eval_at(f, p)?;
        for series in [&right, &left] {
            let vals = eval_series(series, p)?;
            if vals[0] != want || vals[1..].iter().any(|v| !v.is_zero()) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// a * f = a f for holomorphic a: all hbar^{>=1} coefficients vanish.
pub fn verify_separation(
    c: &GrassmannChart,
    a: &Expr,
    f: &Expr,
    n_max: usize,
    points: &[Point],
) -> Result<bool, StarError> {
    let series = star_coeff_form(c, a, f, n_max);
    check_collapses_to_product(&series, a, f, points)
}

/// Mirror law f * b = f b for antiholomorphic b.
pub fn verify_separation_right(
    c: &GrassmannChart,
    f: &Expr,
    b: &Expr,
    n_max: usize,
    points: &[Point],
) -> Result<bool, StarError> {
    let series = star_coeff_form(c, f, b, n_max);
    check_collapses_to_product(&series, f, b, points)
}

fn check_collapses_to_product(
    series: &HSeries,
    f: &Expr,
    g: &Expr,
    points: &[Point],
) -> Result<bool, StarError> {
    for p in points {
        let want = &eval_at(f, p)? * &eval_at(g, p)?;
        let vals = eval_series(series, p)?;
        if vals[0] != want || vals[1..].iter().any(|v| !v.is_zero()) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// u * h for a series u, coefficientwise: hbar^k picks up sum_{i+j=k}
/// C_j(u_i, h).
pub fn star_series_left(
    c: &GrassmannChart,
    u: &HSeries,
    h: &Expr,
    n_max: usize,
) -> HSeries {
    let table = recurrence_table(n_max);
    let mut acc = HSeries::zero(n_max);
    for i in 0..=n_max {
        let v = star_from_table(c, &table, &u.coeffs[i], h, n_max - i);
        for (j, e) in v.coeffs.iter().enumerate() {
            acc.coeffs[i + j] = acc.coeffs[i + j].add(e);
        }
    }
    acc
}

/// f * u for a series u.
pub fn star_series_right(
    c: &GrassmannChart,
    f: &Expr,
    u: &HSeries,
    n_max: usize,
) -> HSeries {
    let table = recurrence_table(n_max);
    let mut acc = HSeries::zero(n_max);
    for i in 0..=n_max {
        let v = star_from_table(c, &table, f, &u.coeffs[i], n_max - i);
        for (j, e) in v.coeffs.iter().enumerate() {
            acc.coeffs[i + j] = acc.coeffs[i + j].add(e);
        }
    }
    acc
}

/// (f * g) * h = f * (g * h) through hbar^n_max at the given points.
pub fn verify_associativity(
    c: &GrassmannChart,
    f: &Expr,
    g: &Expr,
    h: &Expr,
    n_max: usize,
    points: &[Point],
) -> Result<bool, StarError> {
    let lhs = star_series_left(c, &star_coeff_form(c, f, g, n_max), h, n_max);
    let rhs = star_series_right(c, f, &star_coeff_form(c, g, h, n_max), n_max);
    for p in points {
        let lv = eval_series(&lhs, p)?;
        let rv = eval_series(&rhs, p)?;
        if lv != rv {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Independent first-order bracket: g^{m l-bar} (d_{l-bar} f d_m g -
/// d_{l-bar} g d_m f), a plain inverse-metric contraction.
pub fn bracket_contraction(c: &GrassmannChart, f: &Expr, g: &Expr) -> Expr {
    let mut terms = Vec::new();
    for m in c.cap_indices() {
        for l in c.cap_indices() {
            let w = inv_metric_entry(c, l, m);
            let lhs = Expr::prod(vec![
                w.clone(),
                wirtinger_d(f, Var::Zbar(l)),
                wirtinger_d(g, Var::Z(m)),
            ]);
            let rhs = Expr::prod(vec![
                w,
                wirtinger_d(g, Var::Zbar(l)),
                wirtinger_d(f, Var::Z(m)),
            ]);
            terms.push(lhs.sub(&rhs));
        }
    }
    Expr::sum(terms)
}
