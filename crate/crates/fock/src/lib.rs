//! Occupation-number realization of the coefficient operators: kets over
//! the four chart slots, normalized ladder transfers, and an operator
//! assembly whose matrix elements reproduce the explicit coefficient sum.
//!
//! Only composite ladder operators appear: a lowering always carries
//! 1/sqrt(N) and a raising 1/sqrt(N+1), so every transfer amplitude is 0
//! or 1 and no irrational scalar ever materializes.

use std::collections::BTreeMap;

use coefficients::{symbol_slot, CoeffError, CoeffPoly, Monomial};
use exact_scalars::HRational;
use indices::{mi_enumerate, mixed_row, slash, CapIndex, MultiIndex, CAP_2X2};

/// Basis ket labelled by its occupation numbers, one slot per capital index.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Ket {
    pub m: MultiIndex,
}

impl Ket {
    /// Panics on negative occupations; use `try_new` for unchecked input.
    pub fn new(m: MultiIndex) -> Self {
        assert!(
            m.0.iter().all(|&v| v >= 0),
            "ket occupations must be non-negative"
        );
        Ket { m }
    }

    pub fn try_new(m: MultiIndex) -> Option<Self> {
        if m.0.iter().all(|&v| v >= 0) {
            Some(Ket { m })
        } else {
            None
        }
    }

    pub fn vacuum(len: usize) -> Self {
        Ket {
            m: MultiIndex::zero(len),
        }
    }

    pub fn is_vacuum(&self) -> bool {
        self.m.0.iter().all(|&v| v == 0)
    }

    /// Eigenvalue of the number operator N_I.
    pub fn occupation(&self, i: CapIndex) -> i64 {
        self.m.get(i) as i64
    }

    pub fn weight(&self) -> i64 {
        self.m.weight()
    }
}

/// Evaluates a function of the number operators on a ket; N_I acts as the
/// occupation m_I, so f(N) is diagonal with eigenvalue f(m).
pub fn number_weight<T>(f: impl FnOnce(&MultiIndex) -> T, ket: &Ket) -> T {
    f(&ket.m)
}

/// Normalized lowering a_I / sqrt(N_I): 0/1 transfer. None encodes the zero
/// vector, produced exactly when the slot is empty.
pub fn ladder_down(i: CapIndex, ket: &Ket) -> Option<Ket> {
    if ket.m.get(i) > 0 {
        Some(Ket {
            m: ket.m.shifted(i, -1),
        })
    } else {
        None
    }
}

/// Normalized raising a_I^† / sqrt(N_I + 1): always a plain transfer.
pub fn ladder_up(i: CapIndex, ket: &Ket) -> Ket {
    Ket {
        m: ket.m.shifted(i, 1),
    }
}

/// One lowering composite of the operator assembly at pair (J, k):
/// when k differs from J's unprimed component, first a raising at
/// mixed_row(J) and a lowering at slash(J) (rightmost factor acts first),
/// then in every case a lowering at J itself. None encodes the zero vector.
pub fn lowering_step(j: CapIndex, k: u8, ket: &Ket) -> Option<Ket> {
    let mut cur = ket.clone();
    if k != j.i {
        cur = ladder_up(mixed_row(j), &cur);
        cur = ladder_down(slash(j), &cur)?;
    }
    ladder_down(j, &cur)
}

/// Sparse operator on weight-homogeneous kets: the value at (out, in) is
/// the coefficient of |out*⟩⟨in| as a polynomial over the metric symbols.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FockOperator {
    n: usize,
    entries: BTreeMap<(Ket, Ket), CoeffPoly>,
}

impl FockOperator {
    pub fn order(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, out: &Ket, inp: &Ket) -> Option<&CoeffPoly> {
        self.entries.get(&(out.clone(), inp.clone()))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(Ket, Ket), &CoeffPoly)> {
        self.entries.iter()
    }
}

/// ⟨α|T|β*⟩. Multi-indices with a negative slot label no ket, so the pairing
/// is zero; weight mismatches against the operator's order are rejected.
pub fn matrix_element(
    t: &FockOperator,
    alpha: &MultiIndex,
    beta: &MultiIndex,
) -> Result<CoeffPoly, CoeffError> {
    let (a, b) = match (Ket::try_new(alpha.clone()), Ket::try_new(beta.clone())) {
        (Some(a), Some(b)) => (a, b),
        _ => return Ok(CoeffPoly::zero()),
    };
    if a.weight() != t.n as i64 || b.weight() != t.n as i64 {
        return Err(CoeffError::BadWeight {
            order: t.n,
            alpha_weight: a.weight(),
            beta_weight: b.weight(),
        });
    }
    Ok(t.entries.get(&(a, b)).cloned().unwrap_or_else(CoeffPoly::zero))
}

/// Per-position scalar data shared by every tuple of one build.
struct Positions {
    tau: Vec<HRational>,
    inv_tau: Vec<HRational>,
    l_tau1: Vec<HRational>,
}

impl Positions {
    fn new(n: usize) -> Self {
        let mut tau = Vec::with_capacity(n);
        let mut inv_tau = Vec::with_capacity(n);
        let mut l_tau1 = Vec::with_capacity(n);
        for l in 1..=n as i64 {
            let t = HRational::tau(l);
            inv_tau.push(t.inv().expect("tau(l) has a 1/h pole, never zero"));
            l_tau1.push(HRational::from_int(l).mul(&t.add(&HRational::one())));
            tau.push(t);
        }
        Positions { tau, inv_tau, l_tau1 }
    }
}

/// Diagonal scalar of position l read off the current ket: the counting
/// factor tau_l δ_{jk} + N_{mixed_row(J)} + 1 times 1/tau_l times the
/// inverse normalization {l(tau_l+1) + 2(N_11' + N_21')(N_22' + N_12')}^{-1}.
/// Occupations enter as plain eigenvalues; the tail corrections of the
/// explicit sum are realized by the ladder shifts already applied.
fn diagonal_scalar(pos: &Positions, l: usize, j: CapIndex, k: u8, ket: &Ket) -> HRational {
    let counting = {
        let base = HRational::from_int(ket.occupation(mixed_row(j)) + 1);
        if k == j.i {
            pos.tau[l - 1].add(&base)
        } else {
            base
        }
    };
    let col1 = ket.occupation(CapIndex::new(1, 1)) + ket.occupation(CapIndex::new(2, 1));
    let col2 = ket.occupation(CapIndex::new(2, 2)) + ket.occupation(CapIndex::new(1, 2));
    let den = pos.l_tau1[l - 1].add(&HRational::from_int(2 * col1 * col2));
    counting
        .mul(&pos.inv_tau[l - 1])
        .mul(&den.inv().expect("normalization keeps an l/h pole, never zero"))
}

/// All (J, k) tuples of length n, J in ψ order and k in {1, 2}, odometer order.
fn jk_tuples(n: usize) -> Vec<Vec<(CapIndex, u8)>> {
    let mut all = Vec::with_capacity(8usize.pow(n as u32));
    let mut cur = vec![(CAP_2X2[0], 1u8); n];
    loop {
        all.push(cur.clone());
        let mut pos = n;
        loop {
            if pos == 0 {
                return all;
            }
            pos -= 1;
            let (j, k) = cur[pos];
            if k == 1 {
                cur[pos] = (j, 2);
                break;
            }
            let jn = indices::psi(j, 2);
            if jn < 4 {
                cur[pos] = (CAP_2X2[jn], 1);
                break;
            }
            cur[pos] = (CAP_2X2[0], 1);
        }
    }
}

/// Raising-chain targets with their metric-symbol monomials: for each D
/// tuple, the out-ket Σ e_{D_m} together with Π_l g[(k_l j_l')bar, D_l].
fn raising_targets(jk: &[(CapIndex, u8)]) -> Vec<(Ket, Monomial)> {
    let n = jk.len();
    let mut out = Vec::with_capacity(4usize.pow(n as u32));
    let mut d = vec![0usize; n];
    loop {
        let mut ket = Ket::vacuum(4);
        let mut mono = Monomial::one();
        for (l, &dl) in d.iter().enumerate() {
            ket = ladder_up(CAP_2X2[dl], &ket);
            let (j, k) = jk[l];
            let barred = CapIndex::new(k, j.ip);
            mono = mono.bump(symbol_slot(barred, CAP_2X2[dl], 2));
        }
        out.push((ket, mono));
        let mut pos = n;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            if d[pos] < 3 {
                d[pos] += 1;
                break;
            }
            d[pos] = 0;
        }
    }
}

/// Runs one (J, k) tuple against one in-ket: positions n down to 1, each
/// evaluating its diagonal scalar on the current ket and then applying the
/// lowering composite. Survives only if the chain never hits an empty slot
/// and lands on the vacuum.
fn tuple_scalar(pos: &Positions, jk: &[(CapIndex, u8)], inp: &Ket) -> Option<HRational> {
    let n = jk.len();
    let mut ket = inp.clone();
    let mut scalar = HRational::one();
    for l in (1..=n).rev() {
        let (j, k) = jk[l - 1];
        scalar = scalar.mul(&diagonal_scalar(pos, l, j, k, &ket));
        ket = lowering_step(j, k, &ket)?;
    }
    if ket.is_vacuum() {
        Some(scalar)
    } else {
        None
    }
}

/// Assembles the order-n operator: sum over (J, k) tuples of
/// raising chain · |0⟩⟨0| · lowering chain · diagonal scalars, the scalars
/// evaluated through number-operator semantics on the shifted kets.
pub fn build_t_n(n: usize) -> FockOperator {
    build_impl(n, true)
}

/// Same assembly without the per-tuple parallelism; bit-identical result.
pub fn build_t_n_sequential(n: usize) -> FockOperator {
    build_impl(n, false)
}

fn build_impl(n: usize, parallel: bool) -> FockOperator {
    let mut entries: BTreeMap<(Ket, Ket), CoeffPoly> = BTreeMap::new();
    if n == 0 {
        entries.insert((Ket::vacuum(4), Ket::vacuum(4)), CoeffPoly::one());
        return FockOperator { n, entries };
    }

    let pos = Positions::new(n);
    let in_kets: Vec<Ket> = mi_enumerate(n, 4).into_iter().map(Ket::new).collect();

    let per_tuple = |jk: Vec<(CapIndex, u8)>| -> Vec<((Ket, Ket), Monomial, HRational)> {
        let mut items = Vec::new();
        let mut targets: Option<Vec<(Ket, Monomial)>> = None;
        for inp in &in_kets {
            let Some(scalar) = tuple_scalar(&pos, &jk, inp) else {
                continue;
            };
            let targets = targets.get_or_insert_with(|| raising_targets(&jk));
            for (out, mono) in targets.iter() {
                items.push(((out.clone(), inp.clone()), mono.clone(), scalar.clone()));
            }
        }
        items
    };

    let tuples = jk_tuples(n);
    let partials: Vec<_> = if parallel {
        map_collect(tuples, per_tuple)
    } else {
        tuples.into_iter().map(per_tuple).collect()
    };

    for items in partials {
        for (key, mono, scalar) in items {
            entries
                .entry(key)
                .or_insert_with(CoeffPoly::zero)
                .add_term(mono, &scalar);
        }
    }
    entries.retain(|_, p| !p.is_zero());
    FockOperator { n, entries }
}

#[cfg(feature = "parallel")]
fn map_collect<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    use rayon::prelude::*;
    items.into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_collect<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    F: Fn(T) -> U,
{
    items.into_iter().map(f).collect()
}
