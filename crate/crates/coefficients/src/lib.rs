//! Star-product coefficients T^n on the 2x2 Grassmannian chart: an
//! exact formal ring over the 16 metric components, three independent
//! computation routes (explicit sum, one-step recurrence, per-entry
//! linear solve), and residual checkers for the order-lowering
//! identities the solution must satisfy.

pub mod closed;
pub mod residual;
pub mod ring;
pub mod table;

pub use closed::{
    closed_form, closed_form_naive, closed_form_with_ref, d_factor, delta_factor, lambda_factor,
    naive_order_table, naive_order_table_budgeted, DeltaPair, SeqTuple,
};
pub use residual::{residual_cor32, residual_general_grassmann, residual_hs};
pub use ring::{symbol_slot, CoeffPoly, MetricSymbol, Monomial, SYMBOL_COUNT};
pub use table::{
    check_i_independence, linear_system_table, order_from_json, order_to_csv, order_to_json,
    recurrence_table, recurrence_table_sequential, CoeffTable,
};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoeffError {
    /// Raised whenever (α, β) is not an admissible weight-n pair:
    /// mismatched weights, negative components, or wrong length.
    #[error("multi-index weights {alpha_weight}/{beta_weight} do not fit order {order}")]
    BadWeight {
        order: usize,
        alpha_weight: i64,
        beta_weight: i64,
    },
}

#[cfg(feature = "parallel")]
pub(crate) fn map_collect<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    use rayon::prelude::*;
    items.into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_collect<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    F: Fn(T) -> U,
{
    items.into_iter().map(f).collect()
}
