//! Immutable expression trees over the chart variables z^I, zbar^I with
//! exact complex-rational constants. Subtrees are shared through Arc;
//! equality of expressions is decided by evaluation, never syntactically.

use crate::GeomError;
use exact_scalars::GaussianRational;
use indices::CapIndex;
use num_complex::Complex64;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

/// A chart variable: z^I or its formal conjugate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    Z(CapIndex),
    Zbar(CapIndex),
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::Z(i) => write!(f, "z[{},{}]", i.i, i.ip),
            Var::Zbar(i) => write!(f, "zb[{},{}]", i.i, i.ip),
        }
    }
}

#[derive(Debug)]
pub enum ExprNode {
    Const(GaussianRational),
    Var(Var),
    Sum(Vec<Expr>),
    Prod(Vec<Expr>),
    Pow(Expr, i64),
    Quot(Expr, Expr),
}

#[derive(Debug, Clone)]
pub struct Expr(Arc<ExprNode>);

impl Expr {
    pub fn node(&self) -> &ExprNode {
        &self.0
    }

    /// Stable address of the shared node, used as a memoization key while
    /// the expression is alive.
    pub fn key(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }

    pub fn constant(c: GaussianRational) -> Expr {
        Expr(Arc::new(ExprNode::Const(c)))
    }

    pub fn int(n: i64) -> Expr {
        Expr::constant(GaussianRational::from_ints(n, 0))
    }

    pub fn zero() -> Expr {
        Expr::int(0)
    }

    pub fn one() -> Expr {
        Expr::int(1)
    }

    pub fn var(v: Var) -> Expr {
        Expr(Arc::new(ExprNode::Var(v)))
    }

    pub fn z(i: CapIndex) -> Expr {
        Expr::var(Var::Z(i))
    }

    pub fn zbar(i: CapIndex) -> Expr {
        Expr::var(Var::Zbar(i))
    }

    pub fn as_const(&self) -> Option<&GaussianRational> {
        match self.node() {
            ExprNode::Const(c) => Some(c),
            _ => None,
        }
    }

    pub fn is_syntactic_zero(&self) -> bool {
        self.as_const().is_some_and(|c| c.is_zero())
    }

    pub fn is_syntactic_one(&self) -> bool {
        self.as_const()
            .is_some_and(|c| c == &GaussianRational::one())
    }

    /// n-ary sum with constant folding, zero elimination and one level of
    /// flattening.
    pub fn sum(terms: Vec<Expr>) -> Expr {
        let mut acc = GaussianRational::zero();
        let mut rest: Vec<Expr> = Vec::new();
        for t in terms {
            match t.node() {
                ExprNode::Const(c) => acc = &acc + c,
                ExprNode::Sum(inner) => {
                    for s in inner {
                        match s.node() {
                            ExprNode::Const(c) => acc = &acc + c,
                            _ => rest.push(s.clone()),
                        }
                    }
                }
                _ => rest.push(t),
            }
        }
        if !acc.is_zero() {
            rest.push(Expr::constant(acc));
        }
        match rest.len() {
            0 => Expr::zero(),
            1 => rest.pop().unwrap(),
            _ => Expr(Arc::new(ExprNode::Sum(rest))),
        }
    }

    /// n-ary product with constant folding, unit elimination and zero
    /// absorption.
    pub fn prod(factors: Vec<Expr>) -> Expr {
        let mut acc = GaussianRational::one();
        let mut rest: Vec<Expr> = Vec::new();
        for t in factors {
            match t.node() {
                ExprNode::Const(c) => acc = &acc * c,
                ExprNode::Prod(inner) => {
                    for s in inner {
                        match s.node() {
                            ExprNode::Const(c) => acc = &acc * c,
                            _ => rest.push(s.clone()),
                        }
                    }
                }
                _ => rest.push(t),
            }
        }
        if acc.is_zero() {
            return Expr::zero();
        }
        if !(acc == GaussianRational::one()) {
            rest.insert(0, Expr::constant(acc));
        }
        match rest.len() {
            0 => Expr::one(),
            1 => rest.pop().unwrap(),
            _ => Expr(Arc::new(ExprNode::Prod(rest))),
        }
    }

    pub fn add(&self, other: &Expr) -> Expr {
        Expr::sum(vec![self.clone(), other.clone()])
    }

    pub fn sub(&self, other: &Expr) -> Expr {
        Expr::sum(vec![self.clone(), other.neg()])
    }

    pub fn mul(&self, other: &Expr) -> Expr {
        Expr::prod(vec![self.clone(), other.clone()])
    }

    pub fn neg(&self) -> Expr {
        Expr::prod(vec![Expr::int(-1), self.clone()])
    }

    pub fn pow(&self, n: i64) -> Expr {
        if n == 0 {
            return Expr::one();
        }
        if n == 1 {
            return self.clone();
        }
        if let Some(c) = self.as_const() {
            if n > 0 {
                let mut acc = GaussianRational::one();
                for _ in 0..n {
                    acc = &acc * c;
                }
                return Expr::constant(acc);
            }
        }
        Expr(Arc::new(ExprNode::Pow(self.clone(), n)))
    }

    /// num/den; den must not be the syntactic zero.
    pub fn quot(num: Expr, den: Expr) -> Expr {
        assert!(!den.is_syntactic_zero(), "syntactic zero denominator");
        if num.is_syntactic_zero() || den.is_syntactic_one() {
            return num;
        }
        if let Some(c) = den.as_const() {
            let inv = GaussianRational::one()
                .checked_div(c)
                .expect("nonzero constant");
            return Expr::prod(vec![Expr::constant(inv), num]);
        }
        Expr(Arc::new(ExprNode::Quot(num, den)))
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node() {
            ExprNode::Const(c) => write!(f, "{c}"),
            ExprNode::Var(v) => write!(f, "{v}"),
            ExprNode::Sum(ts) => {
                write!(f, "(")?;
                for (k, t) in ts.iter().enumerate() {
                    if k > 0 {
                        write!(f, " + ")?;
                    }
                    write!(f, "{t}")?;
                }
                write!(f, ")")
            }
            ExprNode::Prod(ts) => {
                for (k, t) in ts.iter().enumerate() {
                    if k > 0 {
                        write!(f, "*")?;
                    }
                    write!(f, "{t}")?;
                }
                Ok(())
            }
            ExprNode::Pow(b, n) => write!(f, "({b})^{n}"),
            ExprNode::Quot(n, d) => write!(f, "({n})/({d})"),
        }
    }
}

/// Formal Wirtinger derivative with a throwaway cache.
pub fn wirtinger_d(e: &Expr, v: Var) -> Expr {
    DiffCache::new().diff(e, v)
}

/// Derivative cache reusable across calls. Keys are node addresses; every
/// keyed expression is pinned so an address is never recycled while cached.
pub struct DiffCache {
    map: HashMap<(usize, Var), Expr>,
    pins: Vec<Expr>,
}

impl Default for DiffCache {
    fn default() -> Self {
        Self::new()
    }
}

impl DiffCache {
    pub fn new() -> Self {
        DiffCache {
            map: HashMap::new(),
            pins: Vec::new(),
        }
    }

    pub fn diff(&mut self, e: &Expr, v: Var) -> Expr {
        let key = (e.key(), v);
        if let Some(d) = self.map.get(&key) {
            return d.clone();
        }
        let d = match e.node() {
            ExprNode::Const(_) => Expr::zero(),
            ExprNode::Var(w) => {
                if *w == v {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            }
            ExprNode::Sum(ts) => Expr::sum(ts.iter().map(|t| self.diff(t, v)).collect()),
            ExprNode::Prod(fs) => {
                let mut terms = Vec::new();
                for (k, fac) in fs.iter().enumerate() {
                    let df = self.diff(fac, v);
                    if df.is_syntactic_zero() {
                        continue;
                    }
                    let mut factors = Vec::with_capacity(fs.len());
                    factors.push(df);
                    for (j, other) in fs.iter().enumerate() {
                        if j != k {
                            factors.push(other.clone());
                        }
                    }
                    terms.push(Expr::prod(factors));
                }
                Expr::sum(terms)
            }
            ExprNode::Pow(b, n) => {
                let db = self.diff(b, v);
                Expr::prod(vec![Expr::int(*n), b.pow(n - 1), db])
            }
            ExprNode::Quot(num, den) => {
                let dn = self.diff(num, v);
                let dd = self.diff(den, v);
                Expr::quot(dn.mul(den).sub(&num.mul(&dd)), den.pow(2))
            }
        };
        self.pins.push(e.clone());
        self.map.insert(key, d.clone());
        d
    }
}

/// Point assignment: values for the z^I; conjugates supply the zbar^I.
/// Unassigned variables read as zero.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Point {
    pub z: BTreeMap<CapIndex, GaussianRational>,
}

impl Point {
    pub fn origin() -> Point {
        Point::default()
    }

    pub fn set(&mut self, idx: CapIndex, val: GaussianRational) {
        self.z.insert(idx, val);
    }

    pub fn value(&self, v: Var) -> GaussianRational {
        match v {
            Var::Z(i) => self.z.get(&i).cloned().unwrap_or_else(GaussianRational::zero),
            Var::Zbar(i) => self
                .z
                .get(&i)
                .map(|c| c.conj())
                .unwrap_or_else(GaussianRational::zero),
        }
    }

    /// JSON form {"z[1,1]": ["re","im"], ...} with decimal-string rationals.
    pub fn from_json(v: &serde_json::Value) -> Result<Point, String> {
        let obj = v.as_object().ok_or("point must be a JSON object")?;
        let mut pt = Point::origin();
        for (key, val) in obj {
            let inner = key
                .strip_prefix("z[")
                .and_then(|s| s.strip_suffix(']'))
                .ok_or_else(|| format!("bad point key {key:?}"))?;
            let (a, b) = inner
                .split_once(',')
                .ok_or_else(|| format!("bad point key {key:?}"))?;
            let i: u8 = a.trim().parse().map_err(|_| format!("bad index in {key:?}"))?;
            let ip: u8 = b.trim().parse().map_err(|_| format!("bad index in {key:?}"))?;
            let pair = val.as_array().filter(|p| p.len() == 2).ok_or_else(|| {
                format!("value for {key:?} must be a [re, im] pair of strings")
            })?;
            let re = pair[0].as_str().ok_or("re must be a string")?;
            let im = pair[1].as_str().ok_or("im must be a string")?;
            pt.set(
                CapIndex::new(i, ip),
                GaussianRational::from_str_pair(re, im)?,
            );
        }
        Ok(pt)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut obj = serde_json::Map::new();
        for (idx, val) in &self.z {
            obj.insert(
                format!("z[{},{}]", idx.i, idx.ip),
                serde_json::json!([val.re.to_string(), val.im.to_string()]),
            );
        }
        serde_json::Value::Object(obj)
    }
}

/// Exact evaluator with a cross-call memo table; reuse one instance to
/// evaluate many expressions sharing subtrees at the same point.
pub struct ExactEvaluator<'a> {
    point: &'a Point,
    memo: HashMap<usize, GaussianRational>,
    pins: Vec<Expr>,
}

impl<'a> ExactEvaluator<'a> {
    pub fn new(point: &'a Point) -> Self {
        ExactEvaluator {
            point,
            memo: HashMap::new(),
            pins: Vec::new(),
        }
    }

    pub fn eval(&mut self, e: &Expr) -> Result<GaussianRational, GeomError> {
        if let Some(v) = self.memo.get(&e.key()) {
            return Ok(v.clone());
        }
        let val = match e.node() {
            ExprNode::Const(c) => c.clone(),
            ExprNode::Var(v) => self.point.value(*v),
            ExprNode::Sum(ts) => {
                let mut acc = GaussianRational::zero();
                for t in ts {
                    acc = &acc + &self.eval(t)?;
                }
                acc
            }
            ExprNode::Prod(fs) => {
                let mut acc = GaussianRational::one();
                for t in fs {
                    acc = &acc * &self.eval(t)?;
                }
                acc
            }
            ExprNode::Pow(b, n) => {
                let bv = self.eval(b)?;
                let mut acc = GaussianRational::one();
                for _ in 0..n.unsigned_abs() {
                    acc = &acc * &bv;
                }
                if *n < 0 {
                    GaussianRational::one()
                        .checked_div(&acc)
                        .ok_or(GeomError::EvalSingular)?
                } else {
                    acc
                }
            }
            ExprNode::Quot(num, den) => {
                let dv = self.eval(den)?;
                if dv.is_zero() {
                    return Err(GeomError::EvalSingular);
                }
                self.eval(num)?.checked_div(&dv).unwrap()
            }
        };
        self.pins.push(e.clone());
        self.memo.insert(e.key(), val.clone());
        Ok(val)
    }
}

pub fn eval_exact(e: &Expr, point: &Point) -> Result<GaussianRational, GeomError> {
    ExactEvaluator::new(point).eval(e)
}

pub fn eval_f64(e: &Expr, point: &Point) -> Result<Complex64, GeomError> {
    fn go(
        e: &Expr,
        point: &Point,
        memo: &mut HashMap<usize, Complex64>,
    ) -> Result<Complex64, GeomError> {
        if let Some(v) = memo.get(&e.key()) {
            return Ok(*v);
        }
        let val = match e.node() {
            ExprNode::Const(c) => {
                let (re, im) = c.to_f64s();
                Complex64::new(re, im)
            }
            ExprNode::Var(v) => {
                let (re, im) = point.value(*v).to_f64s();
                Complex64::new(re, im)
            }
            ExprNode::Sum(ts) => {
                let mut acc = Complex64::new(0.0, 0.0);
                for t in ts {
                    acc += go(t, point, memo)?;
                }
                acc
            }
            ExprNode::Prod(fs) => {
                let mut acc = Complex64::new(1.0, 0.0);
                for t in fs {
                    acc *= go(t, point, memo)?;
                }
                acc
            }
            ExprNode::Pow(b, n) => {
                let bv = go(b, point, memo)?;
                if *n < 0 && bv.norm_sqr() == 0.0 {
                    return Err(GeomError::EvalSingular);
                }
                bv.powi(*n as i32)
            }
            ExprNode::Quot(num, den) => {
                let dv = go(den, point, memo)?;
                if dv.norm_sqr() == 0.0 {
                    return Err(GeomError::EvalSingular);
                }
                go(num, point, memo)? / dv
            }
        };
        memo.insert(e.key(), val);
        Ok(val)
    }
    go(e, point, &mut HashMap::new())
}

/// Evaluation mode selector mirrored by the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalMode {
    Exact,
    Float,
}

#[derive(Debug, Clone, PartialEq)]
pub enum EvalOut {
    Exact(GaussianRational),
    Float(Complex64),
}

pub fn eval_expr(e: &Expr, point: &Point, mode: EvalMode) -> Result<EvalOut, GeomError> {
    match mode {
        EvalMode::Exact => Ok(EvalOut::Exact(eval_exact(e, point)?)),
        EvalMode::Float => Ok(EvalOut::Float(eval_f64(e, point)?)),
    }
}
