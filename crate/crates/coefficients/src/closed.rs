//! Direct evaluation of the order-n coefficient as an explicit sum over
//! index sequences. `closed_form` walks the (J,k) tree from the last
//! position down, pruning on the step-function tails and deferring the
//! D-sum to one pass per surviving barred multiset. `closed_form_naive`
//! and `naive_order_table` spell out the same sum term by term with no
//! pruning or factoring; they exist as a cross-check and as the
//! benchmark baseline.

use crate::ring::{CoeffPoly, MetricSymbol, Monomial};
use crate::{map_collect, CoeffError};
use exact_scalars::HRational;
use indices::{mixed_col, mixed_row, psi, slash, CapIndex, MultiIndex, CAP_2X2};
use std::collections::BTreeMap;

/// Summation variables (J_m, D_m, k_m), m = 1..n.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeqTuple {
    pub j: Vec<CapIndex>,
    pub d: Vec<CapIndex>,
    pub k: Vec<u8>,
}

impl SeqTuple {
    pub fn new(j: Vec<CapIndex>, d: Vec<CapIndex>, k: Vec<u8>) -> Self {
        assert!(j.len() == d.len() && d.len() == k.len());
        SeqTuple { j, d, k }
    }

    pub fn len(&self) -> usize {
        self.j.len()
    }

    pub fn is_empty(&self) -> bool {
        self.j.is_empty()
    }
}

/// d_{S,J,k} = δ_{S,J} + [k ≠ j](δ_{S,∖J} − δ_{S,j∖j'}).
pub fn d_factor(s: CapIndex, jm: CapIndex, km: u8) -> i64 {
    let mut v = (s == jm) as i64;
    if km != jm.i {
        v += (s == slash(jm)) as i64;
        v -= (s == mixed_row(jm)) as i64;
    }
    v
}

/// Λ_{l,S} = Σ_{m=l+1..n} d_{S,J_m,k_m}; l is 1-based.
pub fn lambda_factor(l: usize, s: CapIndex, seq: &SeqTuple) -> i64 {
    (l..seq.len())
        .map(|m| d_factor(s, seq.j[m], seq.k[m]))
        .sum()
}

/// Which pair of capital indices a Δ tail counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeltaPair {
    /// J_m ∈ {I, ∖ii'}
    RefAndMixedCol,
    /// J_m ∈ {∖I, i∖i'}
    SlashAndMixedRow,
}

/// Δ tail sum Σ_{m=l+1..n} of pair hits; l is 1-based.
pub fn delta_factor(pair: DeltaPair, i_ref: CapIndex, l: usize, seq: &SeqTuple) -> i64 {
    let (a, b) = match pair {
        DeltaPair::RefAndMixedCol => (i_ref, mixed_col(i_ref)),
        DeltaPair::SlashAndMixedRow => (slash(i_ref), mixed_row(i_ref)),
    };
    (l..seq.len())
        .map(|m| (seq.j[m] == a) as i64 + (seq.j[m] == b) as i64)
        .sum()
}

fn slot(c: CapIndex) -> usize {
    psi(c, 2) - 1
}

fn check_weights(n: usize, alpha: &MultiIndex, beta: &MultiIndex) -> Result<(), CoeffError> {
    let ok = alpha.len() == 4
        && beta.len() == 4
        && alpha.admissible()
        && beta.admissible()
        && alpha.weight() == n as i64
        && beta.weight() == n as i64;
    if ok {
        Ok(())
    } else {
        Err(CoeffError::BadWeight {
            order: n,
            alpha_weight: alpha.weight(),
            beta_weight: beta.weight(),
        })
    }
}

/// Per-position scalar constants shared by every route through the sum.
struct Levels {
    /// 1/τ_l at index l-1
    inv_tau: Vec<HRational>,
    /// τ_l at index l-1
    tau: Vec<HRational>,
    /// l(τ_l + 1) at index l-1
    l_tau1: Vec<HRational>,
}

impl Levels {
    fn new(n: usize) -> Self {
        let tau: Vec<HRational> = (1..=n).map(|l| HRational::tau(l as i64)).collect();
        let inv_tau = tau
            .iter()
            .map(|t| t.inv().expect("tau_l is a nonzero rational function"))
            .collect();
        let l_tau1 = tau
            .iter()
            .enumerate()
            .map(|(i, t)| {
                t.add(&HRational::one())
                    .mul(&HRational::from_int(i as i64 + 1))
            })
            .collect();
        Levels { inv_tau, tau, l_tau1 }
    }

    /// C_l · τ_l^{-1} · F_l for one position, or None when the term dies.
    /// `lam` is Λ_{l,j∖j'}; `d1`,`d2` are the two Δ tails.
    fn step(
        &self,
        l: usize,
        diag: bool,
        beta_mr: i64,
        lam: i64,
        bg1: i64,
        d1: i64,
        bg2: i64,
        d2: i64,
    ) -> Option<HRational> {
        let c_int = beta_mr + 1 - lam;
        let c = if diag {
            self.tau[l - 1].add(&HRational::from_int(c_int))
        } else {
            if c_int == 0 {
                return None;
            }
            HRational::from_int(c_int)
        };
        let f_den = self.l_tau1[l - 1].add(&HRational::from_int(2 * (bg1 - d1) * (bg2 - d2)));
        // f_den keeps the l/h pole, so it is never the zero function
        let f = f_den.inv().expect("denominator of F_l is nonzero");
        Some(c.mul(&self.inv_tau[l - 1]).mul(&f))
    }
}

/// All D assignments with Σ e_{D_m} = alpha, grouped by the monomial
/// Π g[barred_m, D_m] with its multiplicity.
fn d_sum(barred: &[u8], alpha: &MultiIndex) -> BTreeMap<Monomial, i64> {
    let mut rem = [0i64; 4];
    for s in 0..4 {
        rem[s] = alpha.0[s] as i64;
    }
    let mut out = BTreeMap::new();
    d_sum_rec(barred, 0, &mut rem, Monomial::one(), &mut out);
    out
}

fn d_sum_rec(
    barred: &[u8],
    pos: usize,
    rem: &mut [i64; 4],
    mono: Monomial,
    out: &mut BTreeMap<Monomial, i64>,
) {
    if pos == barred.len() {
        debug_assert!(rem.iter().all(|&r| r == 0));
        *out.entry(mono).or_insert(0) += 1;
        return;
    }
    for s in 0..4 {
        if rem[s] > 0 {
            rem[s] -= 1;
            d_sum_rec(
                barred,
                pos + 1,
                rem,
                mono.bump(4 * barred[pos] as usize + s),
                out,
            );
            rem[s] += 1;
        }
    }
}

struct Walker<'a> {
    beta: [i64; 4],
    alpha: &'a MultiIndex,
    /// β_I + β_{∖ii'} and β_{∖I} + β_{i∖i'} for the fixed reference
    bg1: i64,
    bg2: i64,
    g1: [usize; 2],
    g2: [usize; 2],
    levels: Levels,
}

impl Walker<'_> {
    /// Chooses (J_l, k_l) for positions l = `level` down to 1. `tails`
    /// holds Σ_{m>level} d; `t1`,`t2` the Δ tails; `barred` the symbol
    /// rows picked so far (psi-1 values). Leaves accumulate scalars per
    /// sorted barred multiset.
    #[allow(clippy::too_many_arguments)]
    fn walk(
        &self,
        level: usize,
        tails: [i64; 4],
        t1: i64,
        t2: i64,
        scalar: &HRational,
        barred: &mut Vec<u8>,
        acc: &mut BTreeMap<Vec<u8>, HRational>,
    ) {
        if level == 0 {
            debug_assert_eq!(tails, self.beta);
            let mut key = barred.clone();
            key.sort_unstable();
            match acc.entry(key) {
                std::collections::btree_map::Entry::Vacant(v) => {
                    v.insert(scalar.clone());
                }
                std::collections::btree_map::Entry::Occupied(mut o) => {
                    let s = o.get().add(scalar);
                    *o.get_mut() = s;
                }
            }
            return;
        }
        for jl in CAP_2X2 {
            for kl in 1..=2u8 {
                self.walk_choice(level, jl, kl, tails, t1, t2, scalar, barred, acc);
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn walk_choice(
        &self,
        level: usize,
        jl: CapIndex,
        kl: u8,
        tails: [i64; 4],
        t1: i64,
        t2: i64,
        scalar: &HRational,
        barred: &mut Vec<u8>,
        acc: &mut BTreeMap<Vec<u8>, HRational>,
    ) {
        let mut new_tails = tails;
        for s in 0..4 {
            new_tails[s] += d_factor(CAP_2X2[s], jl, kl);
        }
        // θ(β_S − Σ_{m=level..n} d_S) for this level; later levels only
        // extend the head of the sequence, so a failure here kills every
        // extension.
        if (0..4).any(|s| self.beta[s] < new_tails[s]) {
            return;
        }
        let mr = slot(mixed_row(jl));
        let step = match self.levels.step(
            level,
            kl == jl.i,
            self.beta[mr],
            tails[mr],
            self.bg1,
            t1,
            self.bg2,
            t2,
        ) {
            Some(s) => s,
            None => return,
        };
        let new_scalar = scalar.mul(&step);
        let jslot = slot(jl);
        let n1 = t1 + (jslot == self.g1[0]) as i64 + (jslot == self.g1[1]) as i64;
        let n2 = t2 + (jslot == self.g2[0]) as i64 + (jslot == self.g2[1]) as i64;
        barred.push((kl - 1) * 2 + (jl.ip - 1));
        self.walk(level - 1, new_tails, n1, n2, &new_scalar, barred, acc);
        barred.pop();
    }
}

/// T^n for the fixed reference index 11'.
pub fn closed_form(n: usize, alpha: &MultiIndex, beta: &MultiIndex) -> Result<CoeffPoly, CoeffError> {
    closed_form_with_ref(n, alpha, beta, CapIndex::new(1, 1))
}

/// T^n with an explicit fixed reference index; the result does not
/// depend on it.
pub fn closed_form_with_ref(
    n: usize,
    alpha: &MultiIndex,
    beta: &MultiIndex,
    i_ref: CapIndex,
) -> Result<CoeffPoly, CoeffError> {
    check_weights(n, alpha, beta)?;
    if n == 0 {
        return Ok(CoeffPoly::one());
    }
    let mut b = [0i64; 4];
    for s in 0..4 {
        b[s] = beta.0[s] as i64;
    }
    let g1 = [slot(i_ref), slot(mixed_col(i_ref))];
    let g2 = [slot(slash(i_ref)), slot(mixed_row(i_ref))];
    let walker = Walker {
        beta: b,
        alpha,
        bg1: b[g1[0]] + b[g1[1]],
        bg2: b[g2[0]] + b[g2[1]],
        g1,
        g2,
        levels: Levels::new(n),
    };

    // one independent walk per first choice (J_n, k_n)
    let firsts: Vec<(CapIndex, u8)> = CAP_2X2
        .into_iter()
        .flat_map(|j| [(j, 1u8), (j, 2u8)])
        .collect();
    let partials = map_collect(firsts, |(jl, kl)| {
        let mut acc = BTreeMap::new();
        let mut barred = Vec::with_capacity(n);
        walker.walk_choice(
            n,
            jl,
            kl,
            [0; 4],
            0,
            0,
            &HRational::one(),
            &mut barred,
            &mut acc,
        );
        acc
    });

    let mut groups: BTreeMap<Vec<u8>, HRational> = BTreeMap::new();
    for part in partials {
        for (key, s) in part {
            match groups.entry(key) {
                std::collections::btree_map::Entry::Vacant(v) => {
                    v.insert(s);
                }
                std::collections::btree_map::Entry::Occupied(mut o) => {
                    let t = o.get().add(&s);
                    *o.get_mut() = t;
                }
            }
        }
    }

    let mut poly = CoeffPoly::zero();
    for (key, s) in &groups {
        if s.is_zero() {
            continue;
        }
        for (mono, count) in d_sum(key, walker.alpha) {
            poly.add_term(mono, &s.mul(&HRational::from_int(count)));
        }
    }
    Ok(poly)
}

/// Literal term-by-term evaluation over all 32^n tuples: every (J,D,k)
/// triple is visited, the step-function product and both Kronecker
/// deltas are evaluated, and the scalar product is recomputed from
/// scratch each time. Cross-check and benchmark baseline only.
pub fn closed_form_naive(
    n: usize,
    alpha: &MultiIndex,
    beta: &MultiIndex,
    i_ref: CapIndex,
) -> Result<CoeffPoly, CoeffError> {
    check_weights(n, alpha, beta)?;
    if n == 0 {
        return Ok(CoeffPoly::one());
    }
    let levels = Levels::new(n);
    let mut poly = CoeffPoly::zero();
    let mut jk = vec![(CAP_2X2[0], 1u8); n];
    loop {
        let seq_jk: Vec<(CapIndex, u8)> = jk.clone();
        naive_jk_term(n, alpha, beta, i_ref, &seq_jk, &levels, &mut poly);
        if !advance_jk(&mut jk) {
            break;
        }
    }
    Ok(poly)
}

fn advance_jk(jk: &mut [(CapIndex, u8)]) -> bool {
    for slot in jk.iter_mut() {
        let code = (psi(slot.0, 2) - 1) * 2 + (slot.1 - 1) as usize;
        let next = (code + 1) % 8;
        *slot = (CAP_2X2[next / 2], (next % 2) as u8 + 1);
        if next != 0 {
            return true;
        }
    }
    false
}

fn advance_d(d: &mut [usize]) -> bool {
    for s in d.iter_mut() {
        *s = (*s + 1) % 4;
        if *s != 0 {
            return true;
        }
    }
    false
}

fn naive_jk_term(
    n: usize,
    alpha: &MultiIndex,
    beta: &MultiIndex,
    i_ref: CapIndex,
    jk: &[(CapIndex, u8)],
    levels: &Levels,
    poly: &mut CoeffPoly,
) {
    let seq = SeqTuple::new(
        jk.iter().map(|&(j, _)| j).collect(),
        vec![CapIndex::new(1, 1); n],
        jk.iter().map(|&(_, k)| k).collect(),
    );
    // θ product over all positions and the β delta
    for r in 1..=n {
        for s in CAP_2X2 {
            let tail: i64 = (r..=n).map(|m| d_factor(s, seq.j[m - 1], seq.k[m - 1])).sum();
            if (beta.get(s) as i64) < tail {
                return;
            }
        }
    }
    for s in CAP_2X2 {
        let total: i64 = (1..=n).map(|m| d_factor(s, seq.j[m - 1], seq.k[m - 1])).sum();
        if beta.get(s) as i64 != total {
            return;
        }
    }
    // scalar recomputed per D assignment, as the raw sum reads
    let mut d = vec![0usize; n];
    loop {
        let alpha_sum = {
            let mut a = [0i32; 4];
            for &s in &d {
                a[s] += 1;
            }
            a
        };
        if alpha_sum.as_slice() == alpha.0.as_slice() {
            let mut scalar = HRational::one();
            let mut dead = false;
            for l in 1..=n {
                let mr = mixed_row(seq.j[l - 1]);
                let step = levels.step(
                    l,
                    seq.k[l - 1] == seq.j[l - 1].i,
                    beta.get(mr) as i64,
                    lambda_factor(l, mr, &seq),
                    (beta.get(i_ref) + beta.get(mixed_col(i_ref))) as i64,
                    delta_factor(DeltaPair::RefAndMixedCol, i_ref, l, &seq),
                    (beta.get(slash(i_ref)) + beta.get(mixed_row(i_ref))) as i64,
                    delta_factor(DeltaPair::SlashAndMixedRow, i_ref, l, &seq),
                );
                match step {
                    Some(f) => scalar = scalar.mul(&f),
                    None => {
                        dead = true;
                        break;
                    }
                }
            }
            if !dead {
                let mut mono = Monomial::one();
                for l in 0..n {
                    let barred = CapIndex::new(seq.k[l], seq.j[l].ip);
                    mono = mono.times_symbol(MetricSymbol::new(barred, CAP_2X2[d[l]]));
                }
                poly.add_term(mono, &scalar);
            }
        }
        if !advance_d(&mut d) {
            break;
        }
    }
}

/// Whole order-n table by one pass over all 32^n tuples, no pruning and
/// no sharing of scalar work between tuples. Benchmark baseline.
pub fn naive_order_table(n: usize, i_ref: CapIndex) -> BTreeMap<(MultiIndex, MultiIndex), CoeffPoly> {
    naive_order_table_budgeted(n, i_ref, None).expect("no budget given")
}

/// Same pass with an optional wall-clock budget. Returns None if the
/// budget ran out before the enumeration finished; the caller can then
/// report elapsed time as a lower bound.
pub fn naive_order_table_budgeted(
    n: usize,
    i_ref: CapIndex,
    budget: Option<std::time::Duration>,
) -> Option<BTreeMap<(MultiIndex, MultiIndex), CoeffPoly>> {
    let start = std::time::Instant::now();
    let mut out: BTreeMap<(MultiIndex, MultiIndex), CoeffPoly> = BTreeMap::new();
    if n == 0 {
        out.insert(
            (MultiIndex::zero(4), MultiIndex::zero(4)),
            CoeffPoly::one(),
        );
        return Some(out);
    }
    let levels = Levels::new(n);
    let mut jk = vec![(CAP_2X2[0], 1u8); n];
    let mut ticks = 0u32;
    loop {
        if let Some(limit) = budget {
            ticks += 1;
            if ticks % 64 == 0 && start.elapsed() > limit {
                return None;
            }
        }
        // β is pinned by the tuple; keep only admissible ones that pass θ
        let seq = SeqTuple::new(
            jk.iter().map(|&(j, _)| j).collect(),
            vec![CapIndex::new(1, 1); n],
            jk.iter().map(|&(_, k)| k).collect(),
        );
        let mut total = [0i64; 4];
        for m in 0..n {
            for s in 0..4 {
                total[s] += d_factor(CAP_2X2[s], seq.j[m], seq.k[m]);
            }
        }
        if total.iter().all(|&t| t >= 0) {
            let beta = MultiIndex(total.iter().map(|&t| t as i32).collect());
            let theta_ok = (1..=n).all(|r| {
                CAP_2X2.into_iter().all(|s| {
                    let tail: i64 =
                        (r..=n).map(|m| d_factor(s, seq.j[m - 1], seq.k[m - 1])).sum();
                    beta.get(s) as i64 >= tail
                })
            });
            if theta_ok {
                naive_all_d(n, &seq, &beta, i_ref, &levels, &mut out);
            }
        }
        if !advance_jk(&mut jk) {
            break;
        }
    }
    out.retain(|_, p| !p.is_zero());
    Some(out)
}

fn naive_all_d(
    n: usize,
    seq: &SeqTuple,
    beta: &MultiIndex,
    i_ref: CapIndex,
    levels: &Levels,
    out: &mut BTreeMap<(MultiIndex, MultiIndex), CoeffPoly>,
) {
    let mut d = vec![0usize; n];
    loop {
        let mut scalar = HRational::one();
        let mut dead = false;
        for l in 1..=n {
            let mr = mixed_row(seq.j[l - 1]);
            let step = levels.step(
                l,
                seq.k[l - 1] == seq.j[l - 1].i,
                beta.get(mr) as i64,
                lambda_factor(l, mr, seq),
                (beta.get(i_ref) + beta.get(mixed_col(i_ref))) as i64,
                delta_factor(DeltaPair::RefAndMixedCol, i_ref, l, seq),
                (beta.get(slash(i_ref)) + beta.get(mixed_row(i_ref))) as i64,
                delta_factor(DeltaPair::SlashAndMixedRow, i_ref, l, seq),
            );
            match step {
                Some(f) => scalar = scalar.mul(&f),
                None => {
                    dead = true;
                    break;
                }
            }
        }
        if !dead {
            let mut alpha = [0i32; 4];
            let mut mono = Monomial::one();
            for l in 0..n {
                alpha[d[l]] += 1;
                let barred = CapIndex::new(seq.k[l], seq.j[l].ip);
                mono = mono.times_symbol(MetricSymbol::new(barred, CAP_2X2[d[l]]));
            }
            let key = (MultiIndex(alpha.to_vec()), beta.clone());
            out.entry(key).or_insert_with(CoeffPoly::zero).add_term(mono, &scalar);
        }
        if !advance_d(&mut d) {
            break;
        }
    }
}
