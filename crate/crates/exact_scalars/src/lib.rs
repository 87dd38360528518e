//! Exact scalar arithmetic for the star-product pipeline: arbitrary-precision
//! rationals, Gaussian rationals, and rational functions in the formal
//! deformation parameter h (written `hbar` in APIs), with Taylor expansion
//! at h = 0.
//!
//! Everything here is an immutable value type; all operations are pure.

mod gaussian;
mod hrational;
mod poly;

pub use gaussian::GaussianRational;
pub use hrational::HRational;

/// Canonical arbitrary-precision rational: denominator > 0, gcd = 1, zero is 0/1.
/// `num_rational::Ratio` maintains exactly these invariants.
pub type Rational = num_rational::BigRational;

pub use num_bigint::BigInt;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("pole at the evaluation value")]
    PoleAtValue,
    #[error("negative valuation at hbar = 0")]
    NegativeValuation,
}

/// Shorthand rational constructor. Panics on d = 0.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses decimal-string rationals of the form "n" or "n/d".
pub fn rat_parse(s: &str) -> Result<Rational, String> {
    s.trim()
        .parse::<Rational>()
        .map_err(|e| format!("bad rational {s:?}: {e}"))
}

pub fn rat_to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or_else(|| {
        // Fall back on a quotient of lossy conversions for out-of-range parts.
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}
