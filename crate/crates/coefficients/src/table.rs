//! Coefficient tables built order by order. Two independent routes:
//! `recurrence_table` applies the one-step recurrence whose denominator
//! is already collapsed to τ_n{n(τ_n+1) + 2(β_I+β_{∖ii'})(β_{∖I}+β_{i∖i'})},
//! while `linear_system_table` solves the underlying 2x2 system per
//! entry with its explicit inverse and serves as the cross-check oracle.

use crate::closed::closed_form_with_ref;
use crate::map_collect;
use crate::ring::{CoeffPoly, MetricSymbol};
use exact_scalars::HRational;
use indices::{mi_enumerate, mixed_col, mixed_row, slash, MultiIndex, CAP_2X2};
use serde_json::{json, Value};
use std::collections::BTreeMap;

/// Sparse map (n, α, β) → T^n. Entries that are zero or indexed by an
/// inadmissible pair are absent; `value` reads them as zero.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CoeffTable {
    entries: BTreeMap<(usize, MultiIndex, MultiIndex), CoeffPoly>,
    max_order: usize,
}

impl CoeffTable {
    pub fn new() -> Self {
        CoeffTable::default()
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, n: usize, alpha: &MultiIndex, beta: &MultiIndex) -> Option<&CoeffPoly> {
        self.entries.get(&(n, alpha.clone(), beta.clone()))
    }

    /// The coefficient as a ring element, zero when absent.
    pub fn value(&self, n: usize, alpha: &MultiIndex, beta: &MultiIndex) -> CoeffPoly {
        self.get(n, alpha, beta).cloned().unwrap_or_else(CoeffPoly::zero)
    }

    pub fn insert(&mut self, n: usize, alpha: MultiIndex, beta: MultiIndex, poly: CoeffPoly) {
        self.max_order = self.max_order.max(n);
        if poly.is_zero() {
            self.entries.remove(&(n, alpha, beta));
        } else {
            self.entries.insert((n, alpha, beta), poly);
        }
    }

    pub fn order_entries(&self, n: usize) -> Vec<(&MultiIndex, &MultiIndex, &CoeffPoly)> {
        self.entries
            .range((n, MultiIndex::zero(0), MultiIndex::zero(0))..(n + 1, MultiIndex::zero(0), MultiIndex::zero(0)))
            .map(|((_, a, b), p)| (a, b, p))
            .collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(usize, MultiIndex, MultiIndex), &CoeffPoly)> {
        self.entries.iter()
    }
}

/// Denominator of the one-step recurrence; the β product is the same
/// for every reference choice because {I,∖ii'} and {∖I,i∖i'} always
/// partition the four indices into the two primed-column classes.
fn order_denominator(n: usize, beta: &MultiIndex) -> HRational {
    let tau = HRational::tau(n as i64);
    let col1 = (beta.0[0] + beta.0[2]) as i64; // β_{11'} + β_{21'}
    let col2 = (beta.0[1] + beta.0[3]) as i64; // β_{12'} + β_{22'}
    let bracket = tau
        .add(&HRational::one())
        .mul(&HRational::from_int(n as i64))
        .add(&HRational::from_int(2 * col1 * col2));
    tau.mul(&bracket)
}

fn seeded() -> CoeffTable {
    let mut t = CoeffTable::new();
    t.insert(0, MultiIndex::zero(4), MultiIndex::zero(4), CoeffPoly::one());
    t
}

fn weight_pairs(n: usize) -> Vec<(MultiIndex, MultiIndex)> {
    let ms = mi_enumerate(n, 4);
    let mut out = Vec::with_capacity(ms.len() * ms.len());
    for a in &ms {
        for b in &ms {
            out.push((a.clone(), b.clone()));
        }
    }
    out
}

/// Table of all T^n for n ≤ n_max via the one-step recurrence.
pub fn recurrence_table(n_max: usize) -> CoeffTable {
    recurrence_table_impl(n_max, true)
}

/// Same computation with the per-order parallelism disabled; results
/// are bit-identical.
pub fn recurrence_table_sequential(n_max: usize) -> CoeffTable {
    recurrence_table_impl(n_max, false)
}

fn recurrence_table_impl(n_max: usize, parallel: bool) -> CoeffTable {
    let mut table = seeded();
    for n in 1..=n_max {
        let pairs = weight_pairs(n);
        let prev = &table;
        let computed: Vec<_> = if parallel {
            map_collect(pairs, |(a, b)| {
                let p = recurrence_entry(n, &a, &b, prev);
                (a, b, p)
            })
        } else {
            pairs
                .into_iter()
                .map(|(a, b)| {
                    let p = recurrence_entry(n, &a, &b, prev);
                    (a, b, p)
                })
                .collect()
        };
        for (a, b, p) in computed {
            table.insert(n, a, b, p);
        }
    }
    table
}

fn recurrence_entry(
    n: usize,
    alpha: &MultiIndex,
    beta: &MultiIndex,
    prev: &CoeffTable,
) -> CoeffPoly {
    let tau = HRational::tau(n as i64);
    let mut acc = CoeffPoly::zero();
    for jl in CAP_2X2 {
        let bmr = beta.get(mixed_row(jl)) as i64;
        let beta1 = beta.shifted(jl, -1);
        if beta1.admissible() {
            let c1 = tau.add(&HRational::from_int(bmr + 1));
            for dl in CAP_2X2 {
                let alpha1 = alpha.shifted(dl, -1);
                if let Some(t) = prev.get(n - 1, &alpha1, &beta1) {
                    acc.add_assign(&t.times_symbol(MetricSymbol::new(jl, dl)).scale(&c1));
                }
            }
        }
        let beta2 = beta
            .shifted(jl, -1)
            .shifted(slash(jl), -1)
            .shifted(mixed_row(jl), 1);
        if beta2.admissible() {
            let c2 = HRational::from_int(bmr + 1);
            for dl in CAP_2X2 {
                let alpha1 = alpha.shifted(dl, -1);
                if let Some(t) = prev.get(n - 1, &alpha1, &beta2) {
                    acc.add_assign(&t.times_symbol(MetricSymbol::new(mixed_col(jl), dl)).scale(&c2));
                }
            }
        }
    }
    let den = order_denominator(n, beta);
    acc.scale(&den.inv().expect("order denominator is nonzero"))
}

/// Independent table: each entry solved from the 2x2 linear system in
/// (β_I T^n_{α,β}, (β_{∖ii'}+1) T^n at the shifted β), using the first
/// reference I in psi order with β_I > 0 and the explicit inverse with
/// determinant τ_n(τ_n + β_{∖I} + β_{i∖i'} + 1).
pub fn linear_system_table(n_max: usize) -> CoeffTable {
    let mut table = seeded();
    for n in 1..=n_max {
        let pairs = weight_pairs(n);
        let prev = &table;
        let computed: Vec<_> = map_collect(pairs, |(a, b)| {
            let p = linear_system_entry(n, &a, &b, prev);
            (a, b, p)
        });
        for (a, b, p) in computed {
            table.insert(n, a, b, p);
        }
    }
    table
}

fn linear_system_entry(
    n: usize,
    alpha: &MultiIndex,
    beta: &MultiIndex,
    prev: &CoeffTable,
) -> CoeffPoly {
    let i_ref = CAP_2X2
        .into_iter()
        .find(|&c| beta.get(c) > 0)
        .expect("weight-n beta has a positive slot");
    let tau = HRational::tau(n as i64);
    let b_slash = beta.get(slash(i_ref)) as i64;
    let b_mr = beta.get(mixed_row(i_ref)) as i64;

    let mut v1 = CoeffPoly::zero();
    let beta1 = beta.shifted(i_ref, -1);
    if beta1.admissible() {
        for dl in CAP_2X2 {
            let alpha1 = alpha.shifted(dl, -1);
            if let Some(t) = prev.get(n - 1, &alpha1, &beta1) {
                v1.add_assign(&t.times_symbol(MetricSymbol::new(i_ref, dl)));
            }
        }
    }
    let mut v2 = CoeffPoly::zero();
    let beta2 = beta
        .shifted(i_ref, -1)
        .shifted(slash(i_ref), -1)
        .shifted(mixed_row(i_ref), 1);
    if beta2.admissible() {
        for dl in CAP_2X2 {
            let alpha1 = alpha.shifted(dl, -1);
            if let Some(t) = prev.get(n - 1, &alpha1, &beta2) {
                v2.add_assign(&t.times_symbol(MetricSymbol::new(mixed_col(i_ref), dl)));
            }
        }
    }

    let det = tau.mul(&tau.add(&HRational::from_int(b_slash + b_mr + 1)));
    let m11 = tau.add(&HRational::from_int(b_mr + 1));
    let m12 = HRational::from_int(b_mr + 1);
    let x1 = v1.scale(&m11).add(&v2.scale(&m12)).scale(&det.inv().expect("system determinant is nonzero"));
    x1.scale(
        &HRational::from_int(beta.get(i_ref) as i64)
            .inv()
            .expect("chosen reference has positive beta"),
    )
}

/// The explicit sum for T^n gives the same polynomial for every fixed
/// reference index.
pub fn check_i_independence(n: usize) -> bool {
    let pairs = weight_pairs(n);
    let flags = map_collect(pairs, |(a, b)| {
        let base = closed_form_with_ref(n, &a, &b, CAP_2X2[0]).expect("admissible pair");
        CAP_2X2[1..].iter().all(|&i_ref| {
            closed_form_with_ref(n, &a, &b, i_ref).expect("admissible pair") == base
        })
    });
    flags.into_iter().all(|f| f)
}

/// JSON for one order: {"n":…,"entries":[{"alpha":…,"beta":…,"terms":…}]}.
pub fn order_to_json(table: &CoeffTable, n: usize) -> Value {
    let entries: Vec<Value> = table
        .order_entries(n)
        .into_iter()
        .map(|(a, b, p)| {
            json!({
                "alpha": a.0,
                "beta": b.0,
                "terms": p.to_json_terms(),
            })
        })
        .collect();
    json!({ "n": n, "entries": entries })
}

pub fn order_from_json(v: &Value) -> Result<Vec<(MultiIndex, MultiIndex, CoeffPoly)>, String> {
    let entries = v
        .get("entries")
        .and_then(Value::as_array)
        .ok_or("missing entries array")?;
    let mut out = Vec::with_capacity(entries.len());
    for e in entries {
        let read_mi = |key: &str| -> Result<MultiIndex, String> {
            let arr = e.get(key).and_then(Value::as_array).ok_or_else(|| format!("missing {key}"))?;
            let comps: Option<Vec<i32>> =
                arr.iter().map(|x| x.as_i64().map(|v| v as i32)).collect();
            Ok(MultiIndex(comps.ok_or_else(|| format!("non-integer {key}"))?))
        };
        let alpha = read_mi("alpha")?;
        let beta = read_mi("beta")?;
        let poly = CoeffPoly::from_json_terms(e.get("terms").ok_or("missing terms")?)?;
        out.push((alpha, beta, poly));
    }
    Ok(out)
}

fn csv_quote(s: &str) -> String {
    if s.contains(',') || s.contains('"') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Flat CSV for one order, one monomial per row:
/// n,alpha,beta,mono,hbar_num,hbar_den with ascending h coefficients.
pub fn order_to_csv(table: &CoeffTable, n: usize) -> String {
    let mut out = String::from("n,alpha,beta,mono,hbar_num,hbar_den\n");
    for (a, b, p) in table.order_entries(n) {
        for (mono, c) in p.terms() {
            let join = |coeffs: &[exact_scalars::Rational]| {
                coeffs
                    .iter()
                    .map(|r| r.to_string())
                    .collect::<Vec<_>>()
                    .join(" ")
            };
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                n,
                csv_quote(&a.to_string()),
                csv_quote(&b.to_string()),
                csv_quote(&mono.to_string()),
                join(c.num_coeffs()),
                join(c.den_coeffs()),
            ));
        }
    }
    out
}
