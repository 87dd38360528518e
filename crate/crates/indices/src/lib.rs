//! Index algebra for charts on G_{p,p+q}: capital indices I = ii',
//! the psi total order, the slash involutions of the 2x2 case, and
//! multi-index (exponent vector) arithmetic.

use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IndexError {
    #[error("operation requires p = q = 2")]
    UnsupportedShape,
    #[error("index out of bounds for the chart shape")]
    BadIndex,
}

/// Capital index I = ii': unprimed component in 1..=q, primed in 1..=p.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CapIndex {
    pub i: u8,
    pub ip: u8,
}

impl CapIndex {
    pub const fn new(i: u8, ip: u8) -> Self {
        CapIndex { i, ip }
    }

    pub fn checked(i: u8, ip: u8, p: u8, q: u8) -> Result<Self, IndexError> {
        if i >= 1 && i <= q && ip >= 1 && ip <= p {
            Ok(CapIndex { i, ip })
        } else {
            Err(IndexError::BadIndex)
        }
    }

    pub fn in_bounds(&self, p: u8, q: u8) -> bool {
        self.i >= 1 && self.i <= q && self.ip >= 1 && self.ip <= p
    }
}

/// The four 2x2 capital indices in psi order: 11', 12', 21', 22'.
pub const CAP_2X2: [CapIndex; 4] = [
    CapIndex::new(1, 1),
    CapIndex::new(1, 2),
    CapIndex::new(2, 1),
    CapIndex::new(2, 2),
];

/// All capital indices of a (p,q) chart in psi order.
pub fn cap_indices(p: u8, q: u8) -> Vec<CapIndex> {
    let mut out = Vec::with_capacity((p * q) as usize);
    for i in 1..=q {
        for ip in 1..=p {
            out.push(CapIndex::new(i, ip));
        }
    }
    out
}

/// psi(ii') = p(i-1) + i', a 1-based bijection onto 1..=qp.
pub fn psi(idx: CapIndex, p: u8) -> usize {
    p as usize * (idx.i as usize - 1) + idx.ip as usize
}

pub fn psi_checked(idx: CapIndex, p: u8, q: u8) -> Result<usize, IndexError> {
    if idx.in_bounds(p, q) {
        Ok(psi(idx, p))
    } else {
        Err(IndexError::BadIndex)
    }
}

/// Inverse of psi: the capital index at 1-based position `n`.
pub fn psi_inv(n: usize, p: u8) -> CapIndex {
    let n0 = n - 1;
    CapIndex::new((n0 / p as usize) as u8 + 1, (n0 % p as usize) as u8 + 1)
}

fn flip(c: u8) -> u8 {
    3 - c
}

/// \I: flips both components (2x2 only).
pub fn slash(idx: CapIndex) -> CapIndex {
    CapIndex::new(flip(idx.i), flip(idx.ip))
}

/// i\i': flips only the primed component (2x2 only).
pub fn mixed_row(idx: CapIndex) -> CapIndex {
    CapIndex::new(idx.i, flip(idx.ip))
}

/// \i i': flips only the unprimed component (2x2 only).
pub fn mixed_col(idx: CapIndex) -> CapIndex {
    CapIndex::new(flip(idx.i), idx.ip)
}

fn check_2x2(idx: CapIndex, p: u8, q: u8) -> Result<(), IndexError> {
    if p != 2 || q != 2 {
        return Err(IndexError::UnsupportedShape);
    }
    if !idx.in_bounds(p, q) {
        return Err(IndexError::BadIndex);
    }
    Ok(())
}

pub fn slash_checked(idx: CapIndex, p: u8, q: u8) -> Result<CapIndex, IndexError> {
    check_2x2(idx, p, q).map(|_| slash(idx))
}

pub fn mixed_row_checked(idx: CapIndex, p: u8, q: u8) -> Result<CapIndex, IndexError> {
    check_2x2(idx, p, q).map(|_| mixed_row(idx))
}

pub fn mixed_col_checked(idx: CapIndex, p: u8, q: u8) -> Result<CapIndex, IndexError> {
    check_2x2(idx, p, q).map(|_| mixed_col(idx))
}

impl fmt::Display for CapIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}'", self.i, self.ip)
    }
}

impl FromStr for CapIndex {
    type Err = IndexError;
    fn from_str(s: &str) -> Result<Self, IndexError> {
        let body = s.strip_suffix('\'').ok_or(IndexError::BadIndex)?;
        let mut chars = body.chars();
        let (a, b) = (chars.next(), chars.next());
        if chars.next().is_some() {
            return Err(IndexError::BadIndex);
        }
        match (a.and_then(|c| c.to_digit(10)), b.and_then(|c| c.to_digit(10))) {
            (Some(i), Some(ip)) if i >= 1 && ip >= 1 => {
                Ok(CapIndex::new(i as u8, ip as u8))
            }
            _ => Err(IndexError::BadIndex),
        }
    }
}

/// Exponent vector ordered by psi. Entries may go negative transiently;
/// coefficients indexed by a non-admissible multi-index are zero by
/// convention, so shifts never fail.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex(pub Vec<i32>);

impl MultiIndex {
    pub fn zero(len: usize) -> Self {
        MultiIndex(vec![0; len])
    }

    /// Unit vector e_I in a 2x2 chart.
    pub fn unit(idx: CapIndex) -> Self {
        MultiIndex::zero(4).shifted(idx, 1)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Entry at the psi slot of `idx` (2x2 chart).
    pub fn get(&self, idx: CapIndex) -> i32 {
        debug_assert_eq!(self.0.len(), 4);
        self.0[psi(idx, 2) - 1]
    }

    /// Copy with the psi slot of `idx` bumped by `delta` (2x2 chart).
    pub fn shifted(&self, idx: CapIndex, delta: i32) -> Self {
        debug_assert_eq!(self.0.len(), 4);
        self.shifted_at(psi(idx, 2) - 1, delta)
    }

    /// Copy with 0-based slot `slot` bumped by `delta`.
    pub fn shifted_at(&self, slot: usize, delta: i32) -> Self {
        let mut v = self.0.clone();
        v[slot] += delta;
        MultiIndex(v)
    }

    pub fn weight(&self) -> i64 {
        self.0.iter().map(|&e| e as i64).sum()
    }

    pub fn admissible(&self) -> bool {
        self.0.iter().all(|&e| e >= 0)
    }
}

pub fn mi_weight(alpha: &MultiIndex) -> i64 {
    alpha.weight()
}

pub fn mi_shift(alpha: &MultiIndex, idx: CapIndex, delta: i32) -> MultiIndex {
    alpha.shifted(idx, delta)
}

pub fn mi_admissible(alpha: &MultiIndex) -> bool {
    alpha.admissible()
}

/// All nonnegative exponent vectors of weight n over `len` slots, in
/// lexicographic order.
pub fn mi_enumerate(n: usize, len: usize) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    let mut cur = vec![0i32; len];
    fill(&mut out, &mut cur, 0, n);
    out
}

fn fill(out: &mut Vec<MultiIndex>, cur: &mut Vec<i32>, slot: usize, rem: usize) {
    if slot + 1 == cur.len() {
        cur[slot] = rem as i32;
        out.push(MultiIndex(cur.clone()));
        cur[slot] = 0;
        return;
    }
    if cur.is_empty() {
        if rem == 0 {
            out.push(MultiIndex(Vec::new()));
        }
        return;
    }
    for k in 0..=rem {
        cur[slot] = k as i32;
        fill(out, cur, slot + 1, rem - k);
    }
    cur[slot] = 0;
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, e) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}
