//! The star product on the 2x2 Grassmannian chart as truncated power
//! series in hbar: a coefficient form driven by the solved tables and a
//! direct single-sum form, plus exact verifiers for the product axioms
//! (unit, separation of variables, associativity) and the first-order
//! bracket.

pub mod product;
pub mod verify;

pub use product::{
    c1_antisymmetric_part, star_coeff_form, star_direct_form, star_from_table,
};
pub use verify::{
    bracket_contraction, draw_regular_points, eval_series, star_series_left, star_series_right,
    verify_associativity, verify_separation, verify_separation_right, verify_unit,
};

use geometry::{Expr, GeomError};
use thiserror::Error;

/// Truncated expansion sum_k coeffs[k] hbar^k; index = hbar power.
#[derive(Debug, Clone)]
pub struct HSeries {
    pub coeffs: Vec<Expr>,
}

impl HSeries {
    pub fn zero(n_max: usize) -> Self {
        HSeries {
            coeffs: vec![Expr::zero(); n_max + 1],
        }
    }

    /// Highest represented hbar power.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> &Expr {
        &self.coeffs[k]
    }

    pub fn add(&self, other: &HSeries) -> HSeries {
        assert_eq!(self.coeffs.len(), other.coeffs.len());
        HSeries {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn sub(&self, other: &HSeries) -> HSeries {
        assert_eq!(self.coeffs.len(), other.coeffs.len());
        HSeries {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a.sub(b))
                .collect(),
        }
    }
}

#[derive(Debug, Error)]
pub enum StarError {
    #[error(transparent)]
    Geom(#[from] GeomError),
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
