//! The affine chart of G_{p,p+q}: B = Id + Z^dag Z, A = Id + Z Z^dag,
//! the metric g_{ii',jj'-bar} = a^{j-bar i} b^{i' j'-bar} from the potential
//! log det B, its exact inverse, the D operators, and the curvature tensor.

use crate::expr::{DiffCache, ExactEvaluator, Expr, Point, Var};
use crate::GeomError;
use exact_scalars::{rat, GaussianRational};
use indices::{cap_indices, psi, CapIndex, MultiIndex};
use rand::Rng;

pub struct GrassmannChart {
    pub p: u8,
    pub q: u8,
    /// b[r][c] = b_{(r+1)'-bar (c+1)'}, a p x p Hermitian matrix.
    pub b_mat: Vec<Vec<Expr>>,
    /// a[r][c] = a_{(r+1) (c+1)-bar}, q x q.
    pub a_mat: Vec<Vec<Expr>>,
    pub det_b: Expr,
    /// b_inv[r][c] = b^{(r+1)' (c+1)'-bar}.
    pub b_inv: Vec<Vec<Expr>>,
    /// a_inv[r][c] = a^{(r+1)-bar (c+1)}.
    pub a_inv: Vec<Vec<Expr>>,
    /// metric[psi(D)-1][psi(X)-1] = g_{D X-bar}.
    pub metric: Vec<Vec<Expr>>,
    /// inv_metric[psi(K)-1][psi(L)-1] = g^{K-bar L}.
    pub inv_metric: Vec<Vec<Expr>>,
}

/// Determinant by Laplace expansion with shared minors (subset dynamic
/// programming over column sets).
fn det_expr(m: &[Vec<Expr>]) -> Expr {
    let n = m.len();
    if n == 0 {
        return Expr::one();
    }
    // minors[mask] = det of the top-popcount(mask) rows on columns in mask
    let mut minors: Vec<Option<Expr>> = vec![None; 1 << n];
    minors[0] = Some(Expr::one());
    for mask in 1usize..(1 << n) {
        let row = (mask.count_ones() - 1) as usize;
        let mut terms = Vec::new();
        // expansion along `row`: sign (-1)^{row + position of col within mask}
        let mut sign_flip = row % 2 == 1;
        for col in 0..n {
            if mask & (1 << col) == 0 {
                continue;
            }
            let sub = minors[mask & !(1 << col)].clone().unwrap();
            let term = Expr::prod(vec![m[row][col].clone(), sub]);
            terms.push(if sign_flip { term.neg() } else { term });
            sign_flip = !sign_flip;
        }
        minors[mask] = Some(Expr::sum(terms));
    }
    minors[(1 << n) - 1].clone().unwrap()
}

/// Exact inverse as adjugate over determinant; returns (inverse, det).
fn invert_matrix(m: &[Vec<Expr>]) -> (Vec<Vec<Expr>>, Expr) {
    let n = m.len();
    let det = det_expr(m);
    let mut inv = vec![vec![Expr::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            // adj[i][j] = cofactor_{j i} = (-1)^{i+j} minor(del row j, col i)
            let sub: Vec<Vec<Expr>> = (0..n)
                .filter(|&r| r != j)
                .map(|r| {
                    (0..n)
                        .filter(|&c| c != i)
                        .map(|c| m[r][c].clone())
                        .collect()
                })
                .collect();
            let minor = det_expr(&sub);
            let signed = if (i + j) % 2 == 0 { minor } else { minor.neg() };
            inv[i][j] = Expr::quot(signed, det.clone());
        }
    }
    (inv, det)
}

pub fn build_chart(p: u8, q: u8) -> GrassmannChart {
    assert!(p >= 1 && q >= 1, "chart shape must be positive");
    let (pu, qu) = (p as usize, q as usize);
    let delta = |a: usize, b: usize| if a == b { Expr::one() } else { Expr::zero() };

    // b_{r-bar c} = delta_{rc} + sum_m zbar^{m r} z^{m c} (primed r, c)
    let b_mat: Vec<Vec<Expr>> = (1..=pu)
        .map(|r| {
            (1..=pu)
                .map(|c| {
                    let mut terms = vec![delta(r, c)];
                    for m in 1..=qu {
                        terms.push(Expr::prod(vec![
                            Expr::zbar(CapIndex::new(m as u8, r as u8)),
                            Expr::z(CapIndex::new(m as u8, c as u8)),
                        ]));
                    }
                    Expr::sum(terms)
                })
                .collect()
        })
        .collect();

    // a_{r c-bar} = delta_{rc} + sum_{l'} z^{r l'} zbar^{c l'}
    let a_mat: Vec<Vec<Expr>> = (1..=qu)
        .map(|r| {
            (1..=qu)
                .map(|c| {
                    let mut terms = vec![delta(r, c)];
                    for lp in 1..=pu {
                        terms.push(Expr::prod(vec![
                            Expr::z(CapIndex::new(r as u8, lp as u8)),
                            Expr::zbar(CapIndex::new(c as u8, lp as u8)),
                        ]));
                    }
                    Expr::sum(terms)
                })
                .collect()
        })
        .collect();

    let (b_inv, det_b) = invert_matrix(&b_mat);
    let (a_inv, _) = invert_matrix(&a_mat);

    let all = cap_indices(p, q);
    let n = all.len();
    let mut metric = vec![vec![Expr::zero(); n]; n];
    for &d in &all {
        for &x in &all {
            // g_{D X-bar} = a^{x-bar d} * b^{d' x'-bar}
            metric[psi(d, p) - 1][psi(x, p) - 1] = Expr::prod(vec![
                a_inv[x.i as usize - 1][d.i as usize - 1].clone(),
                b_inv[d.ip as usize - 1][x.ip as usize - 1].clone(),
            ]);
        }
    }
    let (inv_metric, _) = invert_matrix(&metric);

    GrassmannChart {
        p,
        q,
        b_mat,
        a_mat,
        det_b,
        b_inv,
        a_inv,
        metric,
        inv_metric,
    }
}

impl GrassmannChart {
    pub fn cap_indices(&self) -> Vec<CapIndex> {
        cap_indices(self.p, self.q)
    }

    fn slot(&self, idx: CapIndex) -> usize {
        psi(idx, self.p) - 1
    }
}

/// g_{D X-bar}: first index unbarred, second barred.
pub fn metric_entry(c: &GrassmannChart, d: CapIndex, xbar: CapIndex) -> Expr {
    c.metric[c.slot(d)][c.slot(xbar)].clone()
}

/// g^{K-bar L}: first index barred, second unbarred.
pub fn inv_metric_entry(c: &GrassmannChart, kbar: CapIndex, l: CapIndex) -> Expr {
    c.inv_metric[c.slot(kbar)][c.slot(l)].clone()
}

/// First derivative of the potential log det B without forming the log:
/// d_J Phi = sum_{l'} zbar^{j l'} b^{j' l'-bar} and the barred mirror.
pub fn potential_first_deriv(c: &GrassmannChart, j: CapIndex, barred: bool) -> Expr {
    let terms = (1..=c.p)
        .map(|lp| {
            if barred {
                Expr::prod(vec![
                    Expr::z(CapIndex::new(j.i, lp)),
                    c.b_inv[lp as usize - 1][j.ip as usize - 1].clone(),
                ])
            } else {
                Expr::prod(vec![
                    Expr::zbar(CapIndex::new(j.i, lp)),
                    c.b_inv[j.ip as usize - 1][lp as usize - 1].clone(),
                ])
            }
        })
        .collect();
    Expr::sum(terms)
}

/// D^k = g^{k l-bar} d_{l-bar}, with a caller-supplied derivative cache.
pub fn d_up_cached(c: &GrassmannChart, k: CapIndex, e: &Expr, cache: &mut DiffCache) -> Expr {
    let terms = c
        .cap_indices()
        .iter()
        .map(|&l| {
            // g^{k l-bar} = g^{l-bar k}
            Expr::prod(vec![
                inv_metric_entry(c, l, k),
                cache.diff(e, Var::Zbar(l)),
            ])
        })
        .collect();
    Expr::sum(terms)
}

/// D^{k-bar} = g^{k-bar l} d_l.
pub fn d_bar_cached(c: &GrassmannChart, k: CapIndex, e: &Expr, cache: &mut DiffCache) -> Expr {
    let terms = c
        .cap_indices()
        .iter()
        .map(|&l| Expr::prod(vec![inv_metric_entry(c, k, l), cache.diff(e, Var::Z(l))]))
        .collect();
    Expr::sum(terms)
}

pub fn d_up(c: &GrassmannChart, k: CapIndex, e: &Expr) -> Expr {
    d_up_cached(c, k, e, &mut DiffCache::new())
}

pub fn d_bar(c: &GrassmannChart, k: CapIndex, e: &Expr) -> Expr {
    d_bar_cached(c, k, e, &mut DiffCache::new())
}

/// Iterated D application in psi order: the composite
/// (D^1)^{alpha_1} ... (D^{qp})^{alpha_{qp}} acts with the highest psi slot
/// first. A negative entry yields the zero expression by convention.
pub fn apply_multi_d_cached(
    c: &GrassmannChart,
    alpha: &MultiIndex,
    barred: bool,
    e: &Expr,
    cache: &mut DiffCache,
) -> Expr {
    if !alpha.admissible() {
        return Expr::zero();
    }
    debug_assert_eq!(alpha.len(), (c.p as usize) * (c.q as usize));
    let mut cur = e.clone();
    for (slot0, &count) in alpha.0.iter().enumerate().rev() {
        let k = indices::psi_inv(slot0 + 1, c.p);
        for _ in 0..count {
            cur = if barred {
                d_bar_cached(c, k, &cur, cache)
            } else {
                d_up_cached(c, k, &cur, cache)
            };
        }
    }
    cur
}

pub fn apply_multi_d(c: &GrassmannChart, alpha: &MultiIndex, barred: bool, e: &Expr) -> Expr {
    apply_multi_d_cached(c, alpha, barred, e, &mut DiffCache::new())
}

/// The raised curvature R_{I-bar}^{J-bar K-bar}{}_{L-bar} of the 2x2 chart,
/// a constant in {-2,-1,0}:
/// -delta_{ij} delta_{kl} delta_{i'k'} delta_{j'l'}
/// -delta_{ik} delta_{jl} delta_{i'j'} delta_{k'l'}.
pub fn curvature_constant(i: CapIndex, j: CapIndex, k: CapIndex, l: CapIndex) -> i64 {
    let d = |a: u8, b: u8| (a == b) as i64;
    -d(i.i, j.i) * d(k.i, l.i) * d(i.ip, k.ip) * d(j.ip, l.ip)
        - d(i.i, k.i) * d(j.i, l.i) * d(i.ip, j.ip) * d(k.ip, l.ip)
}

/// Fully lowered curvature R_{I-bar P L-bar Q} from the potential:
/// -d_Q d_{L-bar} g_{P I-bar}
///   + sum_{M,N} g^{N-bar M} (d_Q g_{P N-bar}) (d_{L-bar} g_{M I-bar}).
pub fn curvature_from_potential(
    c: &GrassmannChart,
    i: CapIndex,
    p: CapIndex,
    l: CapIndex,
    q: CapIndex,
) -> Expr {
    let mut cache = DiffCache::new();
    curvature_from_potential_cached(c, i, p, l, q, &mut cache)
}

pub fn curvature_from_potential_cached(
    c: &GrassmannChart,
    i: CapIndex,
    p: CapIndex,
    l: CapIndex,
    q: CapIndex,
    cache: &mut DiffCache,
) -> Expr {
    let g_pi = &c.metric[c.slot(p)][c.slot(i)];
    let first = cache.diff(g_pi, Var::Zbar(l));
    let second = cache.diff(&first, Var::Z(q));
    let mut terms = vec![second.neg()];
    for &m in &c.cap_indices() {
        for &n in &c.cap_indices() {
            terms.push(Expr::prod(vec![
                inv_metric_entry(c, n, m),
                cache.diff(&c.metric[c.slot(p)][c.slot(n)], Var::Z(q)),
                cache.diff(&c.metric[c.slot(m)][c.slot(i)], Var::Zbar(l)),
            ]));
        }
    }
    Expr::sum(terms)
}

/// Numeric value of the potential log det B at a point.
pub fn potential_value_f64(c: &GrassmannChart, point: &Point) -> Result<f64, GeomError> {
    let det = crate::expr::eval_exact(&c.det_b, point)?;
    let (re, im) = det.to_f64s();
    let norm = re * re + im * im;
    if norm == 0.0 {
        return Err(GeomError::EvalSingular);
    }
    Ok(0.5 * norm.ln())
}

/// Random chart point with small Gaussian-rational coordinates
/// (|num| <= 3, den <= 4 componentwise).
pub fn random_point<R: Rng + ?Sized>(p: u8, q: u8, rng: &mut R) -> Point {
    let mut pt = Point::origin();
    let small = |rng: &mut R| {
        let num = rng.gen_range(-3i64..=3);
        let den = rng.gen_range(1i64..=4);
        rat(num, den)
    };
    for idx in cap_indices(p, q) {
        let re = small(rng);
        let im = small(rng);
        pt.set(idx, GaussianRational::new(re, im));
    }
    pt
}

/// Random point at which every chart denominator is verified nonzero;
/// redraws until the metric determinant evaluates regular.
pub fn random_regular_point<R: Rng + ?Sized>(c: &GrassmannChart, rng: &mut R) -> Point {
    loop {
        let pt = random_point(c.p, c.q, rng);
        let mut ev = ExactEvaluator::new(&pt);
        let ok = c
            .inv_metric
            .iter()
            .flatten()
            .all(|e| ev.eval(e).is_ok());
        if ok {
            return pt;
        }
    }
}
