//! LHS − RHS of the three order-lowering identities, evaluated on a
//! candidate coefficient table as ring elements. A table solves an
//! identity exactly when the residual is the zero polynomial.

use crate::ring::{symbol_slot, CoeffPoly, MetricSymbol};
use crate::table::CoeffTable;
use exact_scalars::HRational;
use geometry::curvature_constant;
use indices::{cap_indices, mixed_col, mixed_row, psi, psi_inv, slash, CapIndex, MultiIndex, CAP_2X2};

/// One-step identity on the 2x2 chart:
/// ℏ Σ_D g_{ĪD} T^{n-1}_{α-e_D,β-e_I}
///   = ℏ β_I (τ_n + β_{∖I}) T^n_{α,β}
///   − ℏ (β_{i∖i'}+1)(β_{∖ii'}+1) T^n_{α, β-e_I+e_{i∖i'}+e_{∖ii'}-e_{∖I}}.
pub fn residual_cor32(
    n: usize,
    i_ref: CapIndex,
    alpha: &MultiIndex,
    beta: &MultiIndex,
    table: &CoeffTable,
) -> CoeffPoly {
    assert!(n >= 1, "identity lowers the order by one");
    let hbar = HRational::hbar();
    let tau = HRational::tau(n as i64);

    let mut lhs = CoeffPoly::zero();
    let beta1 = beta.shifted(i_ref, -1);
    for d in CAP_2X2 {
        let t = table.value(n - 1, &alpha.shifted(d, -1), &beta1);
        lhs.add_assign(&t.times_symbol(MetricSymbol::new(i_ref, d)));
    }
    let lhs = lhs.scale(&hbar);

    let b_i = beta.get(i_ref) as i64;
    let b_slash = beta.get(slash(i_ref)) as i64;
    let b_mr = beta.get(mixed_row(i_ref)) as i64;
    let b_mc = beta.get(mixed_col(i_ref)) as i64;

    let rhs1 = table.value(n, alpha, beta).scale(
        &hbar
            .mul(&HRational::from_int(b_i))
            .mul(&tau.add(&HRational::from_int(b_slash))),
    );
    let beta_shift = beta
        .shifted(i_ref, -1)
        .shifted(mixed_row(i_ref), 1)
        .shifted(mixed_col(i_ref), 1)
        .shifted(slash(i_ref), -1);
    let rhs2 = table
        .value(n, alpha, &beta_shift)
        .scale(&hbar.mul(&HRational::from_int((b_mr + 1) * (b_mc + 1))));

    lhs.sub(&rhs1).add(&rhs2)
}

/// The same identity before specializing the chart shape:
/// ℏ Σ_D g_{ĪD} T^{n-1}_{α-e_D,β-e_I}
///   = β_I {1 + ℏ − ℏ(β_I + Σ_{j'≠i'} β_{ij'} + Σ_{j≠i} β_{ji'})} T^n_{α,β}
///   − ℏ Σ_{j≠i, j'≠i'} (β_{ij'}+1)(β_{ji'}+1) T^n_{α, β-e_{jj'}+e_{ij'}+e_{ji'}-e_I}.
/// Multi-indices have length pq in psi order; metric symbols must fit
/// the 16-slot ring (pq ≤ 4).
pub fn residual_general_grassmann(
    p: u8,
    q: u8,
    n: usize,
    i_ref: CapIndex,
    alpha: &MultiIndex,
    beta: &MultiIndex,
    table: &CoeffTable,
) -> CoeffPoly {
    assert!(n >= 1, "identity lowers the order by one");
    let np = p as usize * q as usize;
    assert!(alpha.len() == np && beta.len() == np);
    let sl = |c: CapIndex| psi(c, p) - 1;
    let at = |m: &MultiIndex, c: CapIndex| m.0[sl(c)] as i64;
    let hbar = HRational::hbar();

    let mut lhs = CoeffPoly::zero();
    let beta1 = beta.shifted_at(sl(i_ref), -1);
    for d in cap_indices(p, q) {
        let t = table.value(n - 1, &alpha.shifted_at(sl(d), -1), &beta1);
        lhs.add_assign(&t.times_slot(symbol_slot(i_ref, d, p)));
    }
    let lhs = lhs.scale(&hbar);

    let b_i = at(beta, i_ref);
    let mut row_col = b_i;
    for jp in 1..=p {
        if jp != i_ref.ip {
            row_col += at(beta, CapIndex::new(i_ref.i, jp));
        }
    }
    for j in 1..=q {
        if j != i_ref.i {
            row_col += at(beta, CapIndex::new(j, i_ref.ip));
        }
    }
    let factor = HRational::from_int(b_i).mul(
        &HRational::one()
            .add(&hbar)
            .sub(&hbar.mul(&HRational::from_int(row_col))),
    );
    let rhs1 = table.value(n, alpha, beta).scale(&factor);

    let mut rhs2 = CoeffPoly::zero();
    for j in 1..=q {
        for jp in 1..=p {
            if j == i_ref.i || jp == i_ref.ip {
                continue;
            }
            let b_ij = at(beta, CapIndex::new(i_ref.i, jp));
            let b_ji = at(beta, CapIndex::new(j, i_ref.ip));
            let shifted = beta
                .shifted_at(sl(CapIndex::new(j, jp)), -1)
                .shifted_at(sl(CapIndex::new(i_ref.i, jp)), 1)
                .shifted_at(sl(CapIndex::new(j, i_ref.ip)), 1)
                .shifted_at(sl(i_ref), -1);
            rhs2.add_assign(
                &table
                    .value(n, alpha, &shifted)
                    .scale(&hbar.mul(&HRational::from_int((b_ij + 1) * (b_ji + 1)))),
            );
        }
    }

    lhs.sub(&rhs1).add(&rhs2)
}

fn binom2(a: i64) -> i64 {
    debug_assert!(a >= 0);
    a * (a - 1) / 2
}

/// The original recurrence for a locally symmetric chart, with the
/// constant curvature values of this one:
/// ℏ Σ_d g_{īd} T^{n-1}_{α-e_d,β-e_i}
///   = β_i T^n
///   + Σ_{k,ρ} ℏ C(β_k−δ_{kρ}−δ_{ik}+2, 2) R_{ρ̄ī}^{k̄k̄} T^n_{α,β-e_ρ+2e_k-e_i}
///   + Σ_{k<k+l≤N} Σ_ρ ℏ (β_k−δ_{kρ}−δ_{ik}+1)(β_{k+l}−δ_{k+l,ρ}−δ_{i,k+l}+1)
///       R_{ρ̄ī}^{(k+l)‾k̄} T^n_{α,β-e_ρ+e_k+e_{k+l}-e_i}.
/// Scalar indices run over 1..pq in psi order.
pub fn residual_hs(
    p: u8,
    q: u8,
    n: usize,
    i_ref: CapIndex,
    alpha: &MultiIndex,
    beta: &MultiIndex,
    table: &CoeffTable,
) -> CoeffPoly {
    assert!(n >= 1, "identity lowers the order by one");
    let np = p as usize * q as usize;
    assert!(alpha.len() == np && beta.len() == np);
    let i_slot = psi(i_ref, p) - 1;
    let hbar = HRational::hbar();

    let mut lhs = CoeffPoly::zero();
    let beta1 = beta.shifted_at(i_slot, -1);
    for d in 1..=np {
        let t = table.value(n - 1, &alpha.shifted_at(d - 1, -1), &beta1);
        lhs.add_assign(&t.times_slot(symbol_slot(i_ref, psi_inv(d, p), p)));
    }
    let lhs = lhs.scale(&hbar);

    let b = |s: usize| beta.0[s - 1] as i64;
    let delta = |a: usize, b: usize| (a == b) as i64;
    let i = i_slot + 1;

    let mut rhs = table.value(n, alpha, beta).scale(&HRational::from_int(b(i)));

    // raised curvature is symmetric in both its upper and lower pairs,
    // so the argument order below is the only one needed
    let r_const = |rho: usize, up1: usize, up2: usize| {
        curvature_constant(psi_inv(rho, p), psi_inv(up1, p), psi_inv(up2, p), i_ref)
    };

    for k in 1..=np {
        for rho in 1..=np {
            let r = r_const(rho, k, k);
            if r == 0 {
                continue;
            }
            let c = binom2(b(k) - delta(k, rho) - delta(i, k) + 2);
            if c == 0 {
                continue;
            }
            let shifted = beta
                .shifted_at(rho - 1, -1)
                .shifted_at(k - 1, 2)
                .shifted_at(i_slot, -1);
            rhs.add_assign(
                &table
                    .value(n, alpha, &shifted)
                    .scale(&hbar.mul(&HRational::from_int(c * r))),
            );
        }
    }

    for k in 1..np {
        for l in 1..=(np - k) {
            for rho in 1..=np {
                let r = r_const(rho, k + l, k);
                if r == 0 {
                    continue;
                }
                let c = (b(k) - delta(k, rho) - delta(i, k) + 1)
                    * (b(k + l) - delta(k + l, rho) - delta(i, k + l) + 1);
                if c == 0 {
                    continue;
                }
                let shifted = beta
                    .shifted_at(rho - 1, -1)
                    .shifted_at(k - 1, 1)
                    .shifted_at(k + l - 1, 1)
                    .shifted_at(i_slot, -1);
                rhs.add_assign(
                    &table
                        .value(n, alpha, &shifted)
                        .scale(&hbar.mul(&HRational::from_int(c * r))),
                );
            }
        }
    }

    lhs.sub(&rhs)
}
