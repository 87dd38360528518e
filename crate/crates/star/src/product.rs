//! The two computable forms of the product. Both expand every scalar as a
//! series at hbar = 0 and collect the hbar^k coefficient Exprs for k up to
//! the requested truncation order.

use std::collections::BTreeMap;

use coefficients::{recurrence_table, CoeffTable, MetricSymbol};
use exact_scalars::{GaussianRational, HRational, Rational};
use geometry::{
    d_bar_cached, d_up_cached, metric_entry, DiffCache, Expr, GrassmannChart,
};
use indices::{mi_enumerate, mixed_row, psi_inv, slash, CapIndex, MultiIndex, CAP_2X2};
use num_traits::Zero;

use crate::{map_collect, HSeries};

/// All D^alpha f (barred or unbarred composites) for weights up to n_max,
/// built incrementally: the lowest occupied slot is the outermost operator
/// of the composite, so D^alpha = D^s (D^{alpha - e_s}) for s minimal.
fn deriv_table(
    c: &GrassmannChart,
    f: &Expr,
    barred: bool,
    n_max: usize,
    cache: &mut DiffCache,
) -> BTreeMap<MultiIndex, Expr> {
    let mut map = BTreeMap::new();
    map.insert(MultiIndex::zero(4), f.clone());
    for w in 1..=n_max {
        for mi in mi_enumerate(w, 4) {
            let slot = mi.0.iter().position(|&v| v > 0).expect("weight >= 1");
            let prev = map
                .get(&mi.shifted_at(slot, -1))
                .expect("lower weights already present");
            let k = psi_inv(slot + 1, 2);
            let e = if barred {
                d_bar_cached(c, k, prev, cache)
            } else {
                d_up_cached(c, k, prev, cache)
            };
            map.insert(mi, e);
        }
    }
    map
}

fn series_coeffs(h: &HRational, n_max: usize) -> Vec<Rational> {
    h.series_at_zero(n_max)
        .expect("product coefficients are regular at hbar = 0")
}

fn rational_const(r: &Rational) -> Expr {
    Expr::constant(GaussianRational::from_rational(r.clone()))
}

/// Collects per-order term lists into one HSeries.
fn collect_series(term_lists: Vec<Vec<Expr>>) -> HSeries {
    HSeries {
        coeffs: term_lists.into_iter().map(Expr::sum).collect(),
    }
}

/// Coefficient form driven by a prebuilt table: for each stored entry
/// T^n_{alpha,beta}, substitutes metric entries for the symbols, expands
/// the scalar in hbar, and attaches (D^alpha f)(D^{beta-bar} g).
pub fn star_from_table(
    c: &GrassmannChart,
    table: &CoeffTable,
    f: &Expr,
    g: &Expr,
    n_max: usize,
) -> HSeries {
    let mut cache = DiffCache::new();
    let df = deriv_table(c, f, false, n_max, &mut cache);
    let dg = deriv_table(c, g, true, n_max, &mut cache);

    let mut term_lists: Vec<Vec<Expr>> = vec![Vec::new(); n_max + 1];
    for n in 0..=n_max {
        let entries: Vec<(MultiIndex, MultiIndex, Vec<(Vec<(MetricSymbol, u8)>, HRational)>)> =
            table
                .order_entries(n)
                .into_iter()
                .map(|(a, b, p)| {
                    let terms = p
                        .terms()
                        .map(|(m, h)| (m.factors().collect(), h.clone()))
                        .collect();
                    (a.clone(), b.clone(), terms)
                })
                .collect();

        let partials = map_collect(entries, |(alpha, beta, terms)| {
            let dfa = &df[&alpha];
            let dgb = &dg[&beta];
            let mut out: Vec<(usize, Expr)> = Vec::new();
            if dfa.is_syntactic_zero() || dgb.is_syntactic_zero() {
                return out;
            }
            for (factors, h) in terms {
                let mut prod = Vec::new();
                for (s, e) in factors {
                    for _ in 0..e {
                        prod.push(metric_entry(c, s.unbarred, s.barred));
                    }
                }
                prod.push(dfa.clone());
                prod.push(dgb.clone());
                let base = Expr::prod(prod);
                if base.is_syntactic_zero() {
                    continue;
                }
                for (k, r) in series_coeffs(&h, n_max).iter().enumerate() {
                    if !r.is_zero() {
                        out.push((k, Expr::prod(vec![rational_const(r), base.clone()])));
                    }
                }
            }
            out
        });
        for items in partials {
            for (k, e) in items {
                term_lists[k].push(e);
            }
        }
    }
    collect_series(term_lists)
}

/// f * g through hbar^n_max, coefficients taken from the recurrence table.
pub fn star_coeff_form(c: &GrassmannChart, f: &Expr, g: &Expr, n_max: usize) -> HSeries {
    star_from_table(c, &recurrence_table(n_max), f, g, n_max)
}

/// d_{S,J,k} = delta_{S,J} + [k != j](delta_{S,slash J} - delta_{S,mixed_row J}).
fn d_factor(s: CapIndex, j: CapIndex, k: u8) -> i64 {
    let mut v = (s == j) as i64;
    if k != j.i {
        v += (s == slash(j)) as i64;
        v -= (s == mixed_row(j)) as i64;
    }
    v
}

#[derive(Clone)]
struct PathState {
    prefix: [i64; 4],
    cls1: i64,
    cls2: i64,
    scalar: HRational,
    barred: Vec<CapIndex>,
}

struct DirectWalker<'a> {
    n: usize,
    n_max: usize,
    c: &'a GrassmannChart,
    tau: Vec<HRational>,
    inv_tau: Vec<HRational>,
    l_tau1: Vec<HRational>,
    df: &'a BTreeMap<MultiIndex, Expr>,
    dg: &'a BTreeMap<MultiIndex, Expr>,
}

impl<'a> DirectWalker<'a> {
    /// Extends the path by position l's choice (J, k). Prefix sums run over
    /// positions 1..=l; a negative slot means a vanishing theta factor (for
    /// l < n) or a killed derivative on g (for l = n), so prune either way.
    fn step(&self, l: usize, st: &PathState, j: CapIndex, k: u8) -> Option<PathState> {
        let mut prefix = st.prefix;
        for (slot, s) in CAP_2X2.into_iter().enumerate() {
            prefix[slot] += d_factor(s, j, k);
        }
        if prefix.iter().any(|&v| v < 0) {
            return None;
        }

        // reference-index classes at I = 11': {I, mixed_col I} collects the
        // first primed column, {slash I, mixed_row I} the second.
        let cls1 = st.cls1 + (j.ip == 1) as i64;
        let cls2 = st.cls2 + (j.ip == 2) as i64;

        let p_mr = prefix[indices::psi(mixed_row(j), 2) - 1];
        let base = HRational::from_int(1 + p_mr);
        let num = if k == j.i {
            self.tau[l - 1].add(&base)
        } else {
            base
        };
        let den = self.l_tau1[l - 1].add(&HRational::from_int(2 * cls1 * cls2));
        let scalar = st
            .scalar
            .mul(&num)
            .mul(&self.inv_tau[l - 1])
            .mul(&den.inv().expect("denominator keeps an l/h pole"));

        let mut barred = st.barred.clone();
        barred.push(CapIndex::new(k, j.ip));
        Some(PathState {
            prefix,
            cls1,
            cls2,
            scalar,
            barred,
        })
    }

    fn walk(&self, l: usize, st: PathState, acc: &mut Vec<(usize, Expr)>) {
        if l > self.n {
            self.leaf(&st, acc);
            return;
        }
        for j in CAP_2X2 {
            for k in 1..=2u8 {
                if let Some(next) = self.step(l, &st, j, k) {
                    self.walk(l + 1, next, acc);
                }
            }
        }
    }

    /// Completed (J, k) path: attach the Y sum. The derivative on g is fixed
    /// by the prefix sums; each Y assignment contributes its metric factors
    /// and the derivative on f.
    fn leaf(&self, st: &PathState, acc: &mut Vec<(usize, Expr)>) {
        let beta = MultiIndex(st.prefix.iter().map(|&v| v as i32).collect());
        let dgb = &self.dg[&beta];
        if dgb.is_syntactic_zero() {
            return;
        }
        let series = series_coeffs(&st.scalar, self.n_max);

        let n = self.n;
        let mut y = vec![0usize; n];
        loop {
            let mut alpha = MultiIndex::zero(4);
            for &yl in &y {
                alpha.0[yl] += 1;
            }
            let dfa = &self.df[&alpha];
            if !dfa.is_syntactic_zero() {
                let mut prod: Vec<Expr> = y
                    .iter()
                    .zip(&st.barred)
                    .map(|(&yl, &b)| metric_entry(self.c, CAP_2X2[yl], b))
                    .collect();
                prod.push(dfa.clone());
                prod.push(dgb.clone());
                let base = Expr::prod(prod);
                if !base.is_syntactic_zero() {
                    for (k, r) in series.iter().enumerate() {
                        if !r.is_zero() {
                            acc.push((k, Expr::prod(vec![rational_const(r), base.clone()])));
                        }
                    }
                }
            }
            let mut pos = n;
            loop {
                if pos == 0 {
                    return;
                }
                pos -= 1;
                if y[pos] < 3 {
                    y[pos] += 1;
                    break;
                }
                y[pos] = 0;
            }
        }
    }
}

/// Direct single-sum form: ascending positions with running prefix sums,
/// the per-position factor g * Upsilon / tau accumulated exactly.
pub fn star_direct_form(c: &GrassmannChart, f: &Expr, g: &Expr, n_max: usize) -> HSeries {
    let mut cache = DiffCache::new();
    let df = deriv_table(c, f, false, n_max, &mut cache);
    let dg = deriv_table(c, g, true, n_max, &mut cache);

    let mut term_lists: Vec<Vec<Expr>> = vec![vec![Expr::prod(vec![f.clone(), g.clone()])]];
    term_lists.resize(n_max + 1, Vec::new());

    for n in 1..=n_max {
        let walker = DirectWalker {
            n,
            n_max,
            c,
            tau: (1..=n as i64).map(HRational::tau).collect(),
            inv_tau: (1..=n as i64)
                .map(|l| HRational::tau(l).inv().expect("tau has a 1/h pole"))
                .collect(),
            l_tau1: (1..=n as i64)
                .map(|l| HRational::from_int(l).mul(&HRational::tau(l).add(&HRational::one())))
                .collect(),
            df: &df,
            dg: &dg,
        };
        let firsts: Vec<(CapIndex, u8)> = CAP_2X2
            .into_iter()
            .flat_map(|j| [(j, 1u8), (j, 2u8)])
            .collect();
        let start = PathState {
            prefix: [0; 4],
            cls1: 0,
            cls2: 0,
            scalar: HRational::one(),
            barred: Vec::new(),
        };
        let partials = map_collect(firsts, |(j, k)| {
            let mut acc: Vec<(usize, Expr)> = Vec::new();
            if let Some(st) = walker.step(1, &start, j, k) {
                walker.walk(2, st, &mut acc);
            }
            acc
        });
        for items in partials {
            for (k, e) in items {
                term_lists[k].push(e);
            }
        }
    }
    collect_series(term_lists)
}

/// C_1(f,g) - C_1(g,f), read off the coefficient form at first order.
pub fn c1_antisymmetric_part(c: &GrassmannChart, f: &Expr, g: &Expr) -> Expr {
    let table = recurrence_table(1);
    let fg = star_from_table(c, &table, f, g, 1);
    let gf = star_from_table(c, &table, g, f, 1);
    fg.coeffs[1].sub(&gf.coeffs[1])
}
