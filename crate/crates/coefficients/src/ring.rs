//! The coefficient ring: polynomials in the 16 formal metric components
//! g[X,D] (X barred, D unbarred) with rational functions of h as scalars.
//! The ring is purely formal; no metric identities are applied.

use exact_scalars::HRational;
use indices::{psi, psi_inv, CapIndex};
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

pub const SYMBOL_COUNT: usize = 16;

/// One metric factor g_{X̄D}. `barred` is X, `unbarred` is D.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MetricSymbol {
    pub barred: CapIndex,
    pub unbarred: CapIndex,
}

impl MetricSymbol {
    pub fn new(barred: CapIndex, unbarred: CapIndex) -> Self {
        MetricSymbol { barred, unbarred }
    }

    /// Exponent slot in a 2x2 chart: 4(psi(X)-1) + (psi(D)-1).
    pub fn slot(&self) -> usize {
        symbol_slot(self.barred, self.unbarred, 2)
    }

    pub fn from_slot(slot: usize) -> Self {
        assert!(slot < SYMBOL_COUNT);
        MetricSymbol {
            barred: psi_inv(slot / 4 + 1, 2),
            unbarred: psi_inv(slot % 4 + 1, 2),
        }
    }
}

/// Slot of g_{X̄D} for a chart with row bound `p`; the pair must fall in
/// the 16-slot grid, which holds whenever pq <= 4.
pub fn symbol_slot(barred: CapIndex, unbarred: CapIndex, p: u8) -> usize {
    let x = psi(barred, p);
    let d = psi(unbarred, p);
    assert!(x <= 4 && d <= 4, "metric symbol outside the 16-slot ring");
    4 * (x - 1) + (d - 1)
}

impl fmt::Display for MetricSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "g[{},{}]", self.barred, self.unbarred)
    }
}

impl FromStr for MetricSymbol {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let body = s
            .strip_prefix("g[")
            .and_then(|t| t.strip_suffix(']'))
            .ok_or_else(|| format!("bad metric symbol: {s}"))?;
        let (x, d) = body
            .split_once(',')
            .ok_or_else(|| format!("bad metric symbol: {s}"))?;
        let barred: CapIndex = x.parse().map_err(|e| format!("{e:?} in {s}"))?;
        let unbarred: CapIndex = d.parse().map_err(|e| format!("{e:?} in {s}"))?;
        if !barred.in_bounds(2, 2) || !unbarred.in_bounds(2, 2) {
            return Err(format!("index outside the 2x2 chart in {s}"));
        }
        Ok(MetricSymbol::new(barred, unbarred))
    }
}

/// Product of metric symbols, stored as exponents by slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(pub [u8; SYMBOL_COUNT]);

impl Monomial {
    pub fn one() -> Self {
        Monomial([0; SYMBOL_COUNT])
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn bump(&self, slot: usize) -> Self {
        let mut m = *self;
        debug_assert!(m.0[slot] < u8::MAX);
        m.0[slot] += 1;
        m
    }

    pub fn times_symbol(&self, s: MetricSymbol) -> Self {
        self.bump(s.slot())
    }

    /// Nonzero factors as (symbol, exponent), slot order.
    pub fn factors(&self) -> impl Iterator<Item = (MetricSymbol, u8)> + '_ {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(slot, &e)| (MetricSymbol::from_slot(slot), e))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        let mut first = true;
        for (sym, e) in self.factors() {
            if !first {
                write!(f, "*")?;
            }
            first = false;
            write!(f, "{sym}")?;
            if e > 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

/// Polynomial over monomials with HRational scalars. Zero coefficients
/// are never stored, so map equality is ring equality.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CoeffPoly {
    terms: BTreeMap<Monomial, HRational>,
}

impl CoeffPoly {
    pub fn zero() -> Self {
        CoeffPoly::default()
    }

    pub fn one() -> Self {
        CoeffPoly::constant(HRational::one())
    }

    pub fn constant(c: HRational) -> Self {
        let mut p = CoeffPoly::zero();
        p.add_term(Monomial::one(), &c);
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &HRational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, mono: &Monomial) -> HRational {
        self.terms.get(mono).cloned().unwrap_or_else(HRational::zero)
    }

    pub fn add_term(&mut self, mono: Monomial, coeff: &HRational) {
        if coeff.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(mono) {
            Entry::Vacant(v) => {
                v.insert(coeff.clone());
            }
            Entry::Occupied(mut o) => {
                let s = o.get().add(coeff);
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add_assign(&mut self, other: &Self) {
        for (m, c) in other.terms() {
            self.add_term(*m, c);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn neg(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| (*m, c.neg()))
            .collect();
        CoeffPoly { terms }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &HRational) -> Self {
        if c.is_zero() {
            return CoeffPoly::zero();
        }
        // products of nonzero rational functions are nonzero
        let terms = self
            .terms
            .iter()
            .map(|(m, v)| (*m, v.mul(c)))
            .collect();
        CoeffPoly { terms }
    }

    pub fn times_symbol(&self, s: MetricSymbol) -> Self {
        self.times_slot(s.slot())
    }

    pub fn times_slot(&self, slot: usize) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(m, v)| (m.bump(slot), v.clone()))
            .collect();
        CoeffPoly { terms }
    }

    /// Terms as the JSON array [{"mono":{"g[..,..]":e,...},"hbar":{...}}].
    pub fn to_json_terms(&self) -> Value {
        let arr: Vec<Value> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mut mono = serde_json::Map::new();
                for (sym, e) in m.factors() {
                    mono.insert(sym.to_string(), json!(e));
                }
                json!({ "mono": Value::Object(mono), "hbar": c.to_json() })
            })
            .collect();
        Value::Array(arr)
    }

    pub fn from_json_terms(v: &Value) -> Result<Self, String> {
        let arr = v.as_array().ok_or("terms: expected array")?;
        let mut poly = CoeffPoly::zero();
        for t in arr {
            let mono_obj = t
                .get("mono")
                .and_then(Value::as_object)
                .ok_or("term: missing mono object")?;
            let mut mono = Monomial::one();
            for (key, e) in mono_obj {
                let sym: MetricSymbol = key.parse()?;
                let e = e.as_u64().ok_or("term: exponent must be a nonnegative integer")?;
                for _ in 0..e {
                    mono = mono.times_symbol(sym);
                }
            }
            let coeff = HRational::from_json(t.get("hbar").ok_or("term: missing hbar")?)?;
            poly.add_term(mono, &coeff);
        }
        Ok(poly)
    }
}

impl fmt::Display for CoeffPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if m.is_one() {
                write!(f, "{c}")?;
            } else {
                write!(f, "{c}*{m}")?;
            }
        }
        Ok(())
    }
}
