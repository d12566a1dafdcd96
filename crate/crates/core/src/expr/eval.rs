use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use super::{rational_to_f64, BinOp, Expr, Func, Node, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum DomainError {
    #[error("logarithm of a non-positive number")]
    LogNonPositive,
    #[error("square root of a non-positive number")]
    SqrtNonPositive,
    #[error("division by zero")]
    DivisionByZero,
    #[error("zero raised to a negative power")]
    ZeroToNegativePower,
    #[error("even root of a negative number")]
    NegativeEvenRoot,
    #[error("non-finite intermediate value")]
    NonFinite,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error("parameter `{0}` is not bound")]
    UnboundParameter(String),
}

/// Parameter values, keyed by name.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Bindings(BTreeMap<String, Rational>);

impl Bindings {
    pub fn new() -> Bindings {
        Bindings::default()
    }

    pub fn insert(&mut self, name: impl Into<String>, value: Rational) -> Option<Rational> {
        self.0.insert(name.into(), value)
    }

    pub fn get(&self, name: &str) -> Option<Rational> {
        self.0.get(name).copied()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.0.contains_key(name)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, Rational)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }
}

impl<S: Into<String>> FromIterator<(S, Rational)> for Bindings {
    fn from_iter<I: IntoIterator<Item = (S, Rational)>>(iter: I) -> Bindings {
        Bindings(iter.into_iter().map(|(k, v)| (k.into(), v)).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Op {
    Const(f64),
    Var(usize),
    Add(usize, usize),
    Sub(usize, usize),
    Mul(usize, usize),
    Div(usize, usize),
    /// Base, exponent, and how a negative base is treated.
    Pow(usize, f64, RootKind),
    Neg(usize),
    Exp(usize),
    Ln(usize),
    Sqrt(usize),
    Root5(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum RootKind {
    Integer,
    OddRootOddPower,
    OddRootEvenPower,
    EvenRoot,
}

impl RootKind {
    fn of(r: Rational) -> RootKind {
        if r.is_integer() {
            RootKind::Integer
        } else if r.denom() % 2 == 0 {
            RootKind::EvenRoot
        } else if r.numer() % 2 != 0 {
            RootKind::OddRootOddPower
        } else {
            RootKind::OddRootEvenPower
        }
    }
}

/// One evaluation of a [`Program`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub value: f64,
    /// Largest absolute value among the top-level additive terms.
    pub scale: f64,
    /// First-order bound on accumulated rounding error, in units of machine
    /// epsilon.
    pub error: f64,
}

/// A compiled, straight-line form of an expression.
///
/// Structurally identical subexpressions are merged, so evaluation cost is
/// proportional to the number of distinct nodes, not the tree size.
#[derive(Debug, Clone)]
pub struct Program {
    ops: Vec<Op>,
    terms: Vec<usize>,
}

impl Program {
    pub fn compile(e: &Expr, bindings: &Bindings) -> Result<Program, EvalError> {
        let mut ops: Vec<Op> = Vec::new();
        let mut interned: HashMap<OpKey, usize> = HashMap::new();
        let mut slot: HashMap<usize, usize> = HashMap::new();
        for n in e.postorder() {
            let s = |c: &Expr| slot[&c.ptr()];
            let op = match n.node() {
                Node::Const(r) => Op::Const(rational_to_f64(*r)),
                Node::Real(v) => Op::Const(*v),
                Node::Param(name) => match bindings.get(name) {
                    Some(r) => Op::Const(rational_to_f64(r)),
                    None => return Err(EvalError::UnboundParameter(name.to_string())),
                },
                Node::Var(v) => Op::Var(v.index()),
                Node::Binary(op, a, b) => {
                    let (a, b) = (s(a), s(b));
                    match op {
                        BinOp::Add => Op::Add(a, b),
                        BinOp::Sub => Op::Sub(a, b),
                        BinOp::Mul => Op::Mul(a, b),
                        BinOp::Div => Op::Div(a, b),
                    }
                }
                Node::Pow(a, r) => Op::Pow(s(a), rational_to_f64(*r), RootKind::of(*r)),
                Node::Neg(a) => Op::Neg(s(a)),
                Node::Func(f, a) => {
                    let a = s(a);
                    match f {
                        Func::Exp => Op::Exp(a),
                        Func::Ln => Op::Ln(a),
                        Func::Sqrt => Op::Sqrt(a),
                        Func::Root5 => Op::Root5(a),
                    }
                }
            };
            let id = *interned.entry(OpKey::of(&op)).or_insert_with(|| {
                ops.push(op);
                ops.len() - 1
            });
            slot.insert(n.ptr(), id);
        }

        // Split the root along +, - and unary minus.
        let mut terms = Vec::new();
        let mut stack = vec![e.clone()];
        while let Some(t) = stack.pop() {
            match t.node() {
                Node::Binary(BinOp::Add | BinOp::Sub, a, b) => {
                    stack.push(b.clone());
                    stack.push(a.clone());
                }
                Node::Neg(a) => stack.push(a.clone()),
                _ => terms.push(slot[&t.ptr()]),
            }
        }
        Ok(Program { ops, terms })
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// Exact-arithmetic semantics: only true zeros are rejected as divisors.
    pub fn eval_exact(&self, point: &[f64; 4]) -> Result<f64, DomainError> {
        self.eval(point, 0.0).map(|s| s.value)
    }

    /// Evaluates at `point = (x, y, p, y'')`, rejecting divisors no larger
    /// than `min_divisor` times the magnitude of the terms they were
    /// computed from (a cancelled, numerically zero divisor).
    pub fn eval(&self, point: &[f64; 4], min_divisor: f64) -> Result<Sample, DomainError> {
        let mut val = vec![0.0f64; self.ops.len()];
        let mut err = vec![0.0f64; self.ops.len()];
        for (i, op) in self.ops.iter().enumerate() {
            let (v, m) = match *op {
                Op::Const(c) => (c, c.abs()),
                Op::Var(k) => (point[k], 0.0),
                Op::Add(a, b) => {
                    let v = val[a] + val[b];
                    (v, err[a] + err[b] + v.abs())
                }
                Op::Sub(a, b) => {
                    let v = val[a] - val[b];
                    (v, err[a] + err[b] + v.abs())
                }
                Op::Mul(a, b) => {
                    let v = val[a] * val[b];
                    (v, val[b].abs() * err[a] + val[a].abs() * err[b] + v.abs())
                }
                Op::Div(a, b) => {
                    let d = val[b];
                    if d == 0.0 || d.abs() <= min_divisor * err[b] {
                        return Err(DomainError::DivisionByZero);
                    }
                    let v = val[a] / d;
                    (v, (err[a] + v.abs() * err[b]) / d.abs() + v.abs())
                }
                Op::Pow(a, r, kind) => {
                    let b = val[a];
                    if b == 0.0 && r < 0.0 {
                        return Err(DomainError::ZeroToNegativePower);
                    }
                    let v = match kind {
                        RootKind::Integer => b.powi(r as i32),
                        _ if b >= 0.0 => b.powf(r),
                        RootKind::EvenRoot => return Err(DomainError::NegativeEvenRoot),
                        RootKind::OddRootOddPower => -(-b).powf(r),
                        RootKind::OddRootEvenPower => (-b).powf(r),
                    };
                    let dv = if b == 0.0 { 0.0 } else { (r * v / b).abs() };
                    (v, dv * err[a] + v.abs())
                }
                Op::Neg(a) => (-val[a], err[a]),
                Op::Exp(a) => {
                    let v = val[a].exp();
                    (v, v * err[a] + v)
                }
                Op::Ln(a) => {
                    let b = val[a];
                    if b <= 0.0 {
                        return Err(DomainError::LogNonPositive);
                    }
                    let v = b.ln();
                    (v, err[a] / b + v.abs())
                }
                Op::Sqrt(a) => {
                    let b = val[a];
                    if b <= 0.0 {
                        return Err(DomainError::SqrtNonPositive);
                    }
                    let v = b.sqrt();
                    (v, err[a] / (2.0 * v) + v)
                }
                Op::Root5(a) => {
                    let b = val[a];
                    let v = root5(b);
                    let m = if b == 0.0 {
                        0.0
                    } else {
                        err[a] / (5.0 * v.powi(4).abs())
                    };
                    (v, m + v.abs())
                }
            };
            if !v.is_finite() || !m.is_finite() {
                return Err(DomainError::NonFinite);
            }
            val[i] = v;
            err[i] = m;
        }
        let root = self.ops.len() - 1;
        let scale = self.terms.iter().fold(0.0f64, |acc, &t| acc.max(val[t].abs()));
        Ok(Sample {
            value: val[root],
            scale,
            error: err[root],
        })
    }
}

/// Sign-preserving real fifth root.
pub(crate) fn root5(t: f64) -> f64 {
    if t < 0.0 {
        -(-t).powf(0.2)
    } else {
        t.powf(0.2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum OpKey {
    Const(u64),
    Var(usize),
    Bin(u8, usize, usize),
    Pow(usize, u64),
    Un(u8, usize),
}

impl OpKey {
    fn of(op: &Op) -> OpKey {
        match *op {
            Op::Const(c) => OpKey::Const(c.to_bits()),
            Op::Var(k) => OpKey::Var(k),
            Op::Add(a, b) => OpKey::Bin(0, a, b),
            Op::Sub(a, b) => OpKey::Bin(1, a, b),
            Op::Mul(a, b) => OpKey::Bin(2, a, b),
            Op::Div(a, b) => OpKey::Bin(3, a, b),
            Op::Pow(a, r, _) => OpKey::Pow(a, r.to_bits()),
            Op::Neg(a) => OpKey::Un(0, a),
            Op::Exp(a) => OpKey::Un(1, a),
            Op::Ln(a) => OpKey::Un(2, a),
            Op::Sqrt(a) => OpKey::Un(3, a),
            Op::Root5(a) => OpKey::Un(4, a),
        }
    }
}

impl Expr {
    /// Evaluates at a full `(x, y, p, y'')` point.
    pub fn evaluate_at(&self, point: [f64; 4], bindings: &Bindings) -> Result<f64, EvalError> {
        Ok(Program::compile(self, bindings)?.eval_exact(&point)?)
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse;
    use super::*;

    fn ev(s: &str, x: f64, y: f64) -> Result<f64, EvalError> {
        parse(s).unwrap().evaluate(x, y, &Bindings::new())
    }

    #[test]
    fn fractional_power() {
        assert_eq!(ev("y^(3/2)", 0.0, 4.0).unwrap(), 8.0);
    }

    #[test]
    fn odd_root_keeps_sign() {
        assert_eq!(ev("root5(-32)", 0.0, 0.0).unwrap(), -2.0);
        assert_eq!(ev("y^(1/3)", 0.0, -8.0).unwrap(), -2.0);
        assert!((ev("y^(2/3)", 0.0, -8.0).unwrap() - 4.0).abs() < 1e-14);
        for t in [-32.0, -1.0, 0.0, 1.0, 32.0, 7.3f64] {
            let r = root5(t).powi(5);
            assert!((r - t).abs() <= 1e-12 * t.abs());
        }
    }

    #[test]
    fn domain_errors() {
        assert_eq!(
            ev("ln(y)", 0.0, -1.0),
            Err(EvalError::Domain(DomainError::LogNonPositive))
        );
        assert_eq!(
            ev("sqrt(y)", 0.0, -1.0),
            Err(EvalError::Domain(DomainError::SqrtNonPositive))
        );
        assert_eq!(
            ev("1/(x - 1)", 1.0, 0.0),
            Err(EvalError::Domain(DomainError::DivisionByZero))
        );
        assert_eq!(
            ev("y^(-2)", 0.0, 0.0),
            Err(EvalError::Domain(DomainError::ZeroToNegativePower))
        );
        assert_eq!(
            ev("y^(1/2)", 0.0, -4.0),
            Err(EvalError::Domain(DomainError::NegativeEvenRoot))
        );
    }

    #[test]
    fn unbound_parameter_is_named() {
        let e = parse_with_a("a*y");
        assert_eq!(
            e.evaluate(1.0, 1.0, &Bindings::new()),
            Err(EvalError::UnboundParameter("a".into()))
        );
        let b: Bindings = [("a", Rational::new(1, 2))].into_iter().collect();
        assert_eq!(e.evaluate(1.0, 3.0, &b).unwrap(), 1.5);
    }

    fn parse_with_a(s: &str) -> Expr {
        super::super::parse_with(s, &super::super::ParseOptions::with_params(["a"])).unwrap()
    }

    #[test]
    fn duplicate_subtrees_share_slots() {
        let a = parse("exp(x*y) + 1").unwrap();
        let b = parse("exp(x*y) + 1").unwrap();
        let prog = Program::compile(&(a * b), &Bindings::new()).unwrap();
        assert_eq!(prog.len(), 7);
    }

    #[test]
    fn scale_tracks_largest_term() {
        let e = parse("x*y - y*x + 3").unwrap();
        let s = Program::compile(&e, &Bindings::new())
            .unwrap()
            .eval(&[2.0, 5.0, 0.0, 0.0], 0.0)
            .unwrap();
        assert_eq!(s.value, 3.0);
        assert_eq!(s.scale, 10.0);
    }
}
