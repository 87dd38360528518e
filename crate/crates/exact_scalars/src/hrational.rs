//! Rational functions in the deformation parameter h, kept in a unique
//! canonical form: num/den coprime as polynomials, both with jointly
//! primitive integer coefficients, den's leading coefficient positive.
//! Laurent parts are never stored; the valuation shift happens on demand
//! in `series_at_zero`.

use crate::poly::{self, Poly};
use crate::{rat_int, Rational, ScalarError};
use num_traits::{One, Zero};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HRational {
    num: Poly,
    den: Poly,
}

impl HRational {
    /// Builds num/den from ascending coefficient sequences.
    pub fn new(num: Vec<Rational>, den: Vec<Rational>) -> Result<Self, ScalarError> {
        let mut num = num;
        let mut den = den;
        poly::trim(&mut num);
        poly::trim(&mut den);
        if den.is_empty() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(Self::canonical(num, den))
    }

    fn canonical(mut num: Poly, mut den: Poly) -> Self {
        debug_assert!(!den.is_empty());
        if num.is_empty() {
            return HRational {
                num: Vec::new(),
                den: vec![Rational::one()],
            };
        }
        let g = poly::gcd(&num, &den);
        if g.len() > 1 {
            num = poly::exact_div(&num, &g);
            den = poly::exact_div(&den, &g);
        }
        poly::normalize_pair(&mut num, &mut den);
        HRational { num, den }
    }

    /// Canonicalization skipping the polynomial gcd; for internal use when
    /// the inputs are already known coprime (cross-reduced products).
    fn canonical_coprime(mut num: Poly, mut den: Poly) -> Self {
        if num.is_empty() {
            return Self::zero();
        }
        poly::normalize_pair(&mut num, &mut den);
        HRational { num, den }
    }

    pub fn zero() -> Self {
        HRational {
            num: Vec::new(),
            den: vec![Rational::one()],
        }
    }

    pub fn one() -> Self {
        Self::from_rational(Rational::one())
    }

    pub fn from_rational(r: Rational) -> Self {
        HRational {
            num: poly::constant(r),
            den: vec![Rational::one()],
        }
        .reduced()
    }

    fn reduced(self) -> Self {
        Self::canonical(self.num, self.den)
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(rat_int(n))
    }

    /// The formal parameter h itself.
    pub fn hbar() -> Self {
        HRational {
            num: vec![Rational::zero(), Rational::one()],
            den: vec![Rational::one()],
        }
    }

    /// h^k for any integer k; negative powers give 1/h^|k|.
    pub fn hbar_pow(k: i64) -> Self {
        let mut num = vec![Rational::zero(); k.unsigned_abs() as usize];
        num.push(Rational::one());
        if k >= 0 {
            HRational {
                num,
                den: vec![Rational::one()],
            }
        } else {
            HRational {
                num: vec![Rational::one()],
                den: num,
            }
        }
    }

    /// tau_l = 1 - l + 1/h = ((1-l) h + 1)/h.
    pub fn tau(l: i64) -> Self {
        Self::new(vec![rat_int(1), rat_int(1 - l)], vec![rat_int(0), rat_int(1)]).unwrap()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.den.len() == 1
            && self.den[0].is_one()
            && self.num.len() == 1
            && self.num[0].is_one()
    }

    pub fn num_coeffs(&self) -> &[Rational] {
        &self.num
    }

    pub fn den_coeffs(&self) -> &[Rational] {
        &self.den
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        // Henrici's scheme: split the common denominator factor first so the
        // final reduction is a gcd against that factor only.
        let g = poly::gcd(&self.den, &other.den);
        let (bp, dp) = if g.len() > 1 {
            (
                poly::exact_div(&self.den, &g),
                poly::exact_div(&other.den, &g),
            )
        } else {
            (self.den.clone(), other.den.clone())
        };
        let mut t = poly::add(&poly::mul(&self.num, &dp), &poly::mul(&other.num, &bp));
        if t.is_empty() {
            return Self::zero();
        }
        let mut den = poly::mul(&poly::mul(&g, &bp), &dp);
        let g2 = poly::gcd(&t, &g);
        if g2.len() > 1 {
            t = poly::exact_div(&t, &g2);
            den = poly::exact_div(&den, &g2);
        }
        Self::canonical_coprime(t, den)
    }

    pub fn neg(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        // Negating num keeps joint primitivity and den's sign.
        HRational {
            num: poly::neg(&self.num),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        // Cross-reduce before multiplying: with both inputs reduced, the
        // product of the cross-reduced parts is already coprime.
        let g1 = poly::gcd(&self.num, &other.den);
        let g2 = poly::gcd(&other.num, &self.den);
        let n1 = if g1.len() > 1 {
            poly::exact_div(&self.num, &g1)
        } else {
            self.num.clone()
        };
        let d2 = if g1.len() > 1 {
            poly::exact_div(&other.den, &g1)
        } else {
            other.den.clone()
        };
        let n2 = if g2.len() > 1 {
            poly::exact_div(&other.num, &g2)
        } else {
            other.num.clone()
        };
        let d1 = if g2.len() > 1 {
            poly::exact_div(&self.den, &g2)
        } else {
            self.den.clone()
        };
        Self::canonical_coprime(poly::mul(&n1, &n2), poly::mul(&d1, &d2))
    }

    pub fn div(&self, other: &Self) -> Result<Self, ScalarError> {
        if other.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(self.mul(&HRational {
            num: other.den.clone(),
            den: other.num.clone(),
        }))
    }

    pub fn inv(&self) -> Result<Self, ScalarError> {
        Self::one().div(self)
    }

    pub fn pow(&self, k: i64) -> Result<Self, ScalarError> {
        let base = if k < 0 { self.inv()? } else { self.clone() };
        let mut acc = Self::one();
        for _ in 0..k.unsigned_abs() {
            acc = acc.mul(&base);
        }
        Ok(acc)
    }

    /// Exact substitution h := value.
    pub fn eval(&self, h: &Rational) -> Result<Rational, ScalarError> {
        let dv = poly::eval(&self.den, h);
        if dv.is_zero() {
            return Err(ScalarError::PoleAtValue);
        }
        Ok(poly::eval(&self.num, h) / dv)
    }

    /// Order of vanishing at h = 0 (negative at a pole); None for zero.
    pub fn valuation(&self) -> Option<i64> {
        let vn = poly::valuation(&self.num)? as i64;
        let vd = poly::valuation(&self.den).expect("den nonzero") as i64;
        Some(vn - vd)
    }

    /// First `order`+1 Taylor coefficients at h = 0. Errors when the function
    /// has a pole at 0 (negative valuation).
    pub fn series_at_zero(&self, order: usize) -> Result<Vec<Rational>, ScalarError> {
        if self.is_zero() {
            return Ok(vec![Rational::zero(); order + 1]);
        }
        let vd = poly::valuation(&self.den).expect("den nonzero");
        if vd == 0 {
            return Ok(poly::series_div(&self.num, &self.den, order));
        }
        let vn = poly::valuation(&self.num).expect("num nonzero");
        if vn < vd {
            return Err(ScalarError::NegativeValuation);
        }
        Ok(poly::series_div(&self.num[vd..], &self.den[vd..], order))
    }

    /// JSON form: two ascending-coefficient arrays of decimal strings.
    pub fn to_json(&self) -> serde_json::Value {
        let arr = |p: &[Rational]| {
            serde_json::Value::Array(
                p.iter()
                    .map(|c| serde_json::Value::String(c.to_string()))
                    .collect(),
            )
        };
        serde_json::json!({ "num": arr(&self.num), "den": arr(&self.den) })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self, String> {
        let get = |key: &str| -> Result<Vec<Rational>, String> {
            v.get(key)
                .and_then(|a| a.as_array())
                .ok_or_else(|| format!("missing array field {key:?}"))?
                .iter()
                .map(|c| {
                    c.as_str()
                        .ok_or_else(|| "coefficients must be strings".to_string())
                        .and_then(crate::rat_parse)
                })
                .collect()
        };
        HRational::new(get("num")?, get("den")?).map_err(|e| e.to_string())
    }
}

impl fmt::Display for HRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let n = poly::to_string_in(&self.num, "h");
        if self.den.len() == 1 && self.den[0].is_one() {
            write!(f, "{n}")
        } else {
            write!(f, "({n})/({})", poly::to_string_in(&self.den, "h"))
        }
    }
}

impl std::ops::Add for &HRational {
    type Output = HRational;
    fn add(self, rhs: &HRational) -> HRational {
        HRational::add(self, rhs)
    }
}

impl std::ops::Sub for &HRational {
    type Output = HRational;
    fn sub(self, rhs: &HRational) -> HRational {
        HRational::sub(self, rhs)
    }
}

impl std::ops::Mul for &HRational {
    type Output = HRational;
    fn mul(self, rhs: &HRational) -> HRational {
        HRational::mul(self, rhs)
    }
}

impl std::ops::Neg for &HRational {
    type Output = HRational;
    fn neg(self) -> HRational {
        HRational::neg(self)
    }
}
