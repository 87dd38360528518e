//! Dense univariate polynomials over the rationals, ascending powers,
//! trailing zeros trimmed, empty vector = zero polynomial.

use crate::Rational;
use num_traits::{One, Signed, Zero};

pub type Poly = Vec<Rational>;

pub fn trim(p: &mut Poly) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

pub fn is_zero(p: &[Rational]) -> bool {
    p.iter().all(|c| c.is_zero())
}

pub fn constant(r: Rational) -> Poly {
    let mut p = vec![r];
    trim(&mut p);
    p
}

pub fn add(a: &[Rational], b: &[Rational]) -> Poly {
    let mut out = vec![Rational::zero(); a.len().max(b.len())];
    for (i, c) in a.iter().enumerate() {
        out[i] += c;
    }
    for (i, c) in b.iter().enumerate() {
        out[i] += c;
    }
    trim(&mut out);
    out
}

pub fn neg(a: &[Rational]) -> Poly {
    a.iter().map(|c| -c).collect()
}

pub fn mul(a: &[Rational], b: &[Rational]) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, ca) in a.iter().enumerate() {
        if ca.is_zero() {
            continue;
        }
        for (j, cb) in b.iter().enumerate() {
            if !cb.is_zero() {
                out[i + j] += ca * cb;
            }
        }
    }
    trim(&mut out);
    out
}

pub fn eval(a: &[Rational], x: &Rational) -> Rational {
    let mut acc = Rational::zero();
    for c in a.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

/// Index of the lowest nonzero coefficient; None for the zero polynomial.
pub fn valuation(a: &[Rational]) -> Option<usize> {
    a.iter().position(|c| !c.is_zero())
}

/// Long division; rhs must be nonzero.
pub fn divrem(a: &[Rational], b: &[Rational]) -> (Poly, Poly) {
    assert!(!is_zero(b), "polynomial division by zero");
    let mut rem: Poly = a.to_vec();
    trim(&mut rem);
    let db = b.len() - 1;
    let lead = &b[db];
    if rem.len() <= db {
        return (Vec::new(), rem);
    }
    let mut quot = vec![Rational::zero(); rem.len() - db];
    while !rem.is_empty() && rem.len() - 1 >= db {
        let dr = rem.len() - 1;
        let coef = &rem[dr] / lead;
        let shift = dr - db;
        for (j, cb) in b.iter().enumerate() {
            let t = &coef * cb;
            rem[shift + j] -= t;
        }
        quot[shift] = coef;
        trim(&mut rem);
    }
    trim(&mut quot);
    (quot, rem)
}

/// Exact quotient; panics if the division leaves a remainder.
pub fn exact_div(a: &[Rational], b: &[Rational]) -> Poly {
    let (q, r) = divrem(a, b);
    debug_assert!(is_zero(&r), "non-exact polynomial division");
    q
}

/// Monic gcd by the Euclidean algorithm; gcd(0,0) = 0.
pub fn gcd(a: &[Rational], b: &[Rational]) -> Poly {
    let mut x: Poly = a.to_vec();
    let mut y: Poly = b.to_vec();
    trim(&mut x);
    trim(&mut y);
    while !y.is_empty() {
        let (_, r) = divrem(&x, &y);
        x = y;
        y = r;
    }
    if let Some(lead) = x.last().cloned() {
        if !lead.is_one() {
            x = x.iter().map(|c| c / &lead).collect();
        }
    }
    x
}

/// Scales the pair (num, den) to jointly-primitive integer coefficients with
/// den's leading coefficient positive. This pins the canonical representative
/// of the fraction after the polynomial gcd has been divided out.
pub fn normalize_pair(num: &mut Poly, den: &mut Poly) {
    use num_bigint::BigInt;
    use num_integer::Integer;
    let mut l = BigInt::one();
    for c in num.iter().chain(den.iter()) {
        l = l.lcm(c.denom());
    }
    let mut g = BigInt::zero();
    for c in num.iter().chain(den.iter()) {
        g = g.gcd(&(c.numer() * &l / c.denom()));
    }
    if g.is_zero() {
        g = BigInt::one();
    }
    if den.last().is_some_and(|c| c.is_negative()) {
        g = -g;
    }
    let f = Rational::new(l, g);
    for c in num.iter_mut() {
        *c *= &f;
    }
    for c in den.iter_mut() {
        *c *= &f;
    }
}

/// Taylor coefficients of num/den at 0 through `order`; requires den[0] != 0.
pub fn series_div(num: &[Rational], den: &[Rational], order: usize) -> Vec<Rational> {
    assert!(den.first().is_some_and(|c| !c.is_zero()));
    let d0 = &den[0];
    let mut s = Vec::with_capacity(order + 1);
    for k in 0..=order {
        let mut acc = num.get(k).cloned().unwrap_or_else(Rational::zero);
        for j in 1..=k.min(den.len() - 1) {
            acc -= &den[j] * &s[k - j];
        }
        s.push(acc / d0);
    }
    s
}

pub fn to_string_in(p: &[Rational], var: &str) -> String {
    if p.is_empty() {
        return "0".to_string();
    }
    let mut parts = Vec::new();
    for (k, c) in p.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let mono = match k {
            0 => String::new(),
            1 => var.to_string(),
            _ => format!("{var}^{k}"),
        };
        let part = if mono.is_empty() {
            format!("{c}")
        } else if c.is_one() {
            mono
        } else if (-c).is_one() {
            format!("-{mono}")
        } else {
            format!("{c}*{mono}")
        };
        parts.push(part);
    }
    let mut out = String::new();
    for (i, part) in parts.iter().enumerate() {
        if i == 0 {
            out.push_str(part);
        } else if let Some(stripped) = part.strip_prefix('-') {
            out.push_str(" - ");
            out.push_str(stripped);
        } else {
            out.push_str(" + ");
            out.push_str(part);
        }
    }
    out
}
