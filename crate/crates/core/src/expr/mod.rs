//! Immutable symbolic expressions over `x`, `y` (and `p = y'`, `y''` while an
//! equation is being normalized).
//!
//! Nodes are reference counted and shared freely; the same subexpression is
//! usually reachable along many paths once derivatives start piling up, so
//! every traversal here works on the DAG rather than the tree and none of them
//! recurse.

mod diff;
mod display;
mod eval;
mod parse;
mod probe;
mod snap;

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops;
use std::sync::Arc;

use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, One, Zero};

pub use diff::Derivatives;
pub use eval::{Bindings, DomainError, EvalError, Program};
pub use parse::{parse, parse_equation, parse_with, Equation, ParseError, ParseOptions};
pub use probe::{Probe, ProbeError, SampleBox};
pub use snap::{snap_rational, snap_rational_tol};

/// Exact rational used for literals, exponents and bound parameters.
pub type Rational = num_rational::Rational64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    X,
    Y,
    /// First derivative `y'`, only meaningful before normalization.
    P,
    /// Second derivative `y''`, only meaningful before normalization.
    Ypp,
}

impl Var {
    pub const ALL: [Var; 4] = [Var::X, Var::Y, Var::P, Var::Ypp];

    pub(crate) fn index(self) -> usize {
        match self {
            Var::X => 0,
            Var::Y => 1,
            Var::P => 2,
            Var::Ypp => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Var::X => "x",
            Var::Y => "y",
            Var::P => "p",
            Var::Ypp => "y''",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Func {
    Exp,
    Ln,
    Sqrt,
    /// Sign-preserving real fifth root.
    Root5,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
            Func::Root5 => "root5",
        }
    }

    pub(crate) fn from_name(name: &str) -> Option<Func> {
        match name {
            "exp" => Some(Func::Exp),
            "ln" => Some(Func::Ln),
            "sqrt" => Some(Func::Sqrt),
            "root5" => Some(Func::Root5),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Clone, Debug)]
pub enum Node {
    Const(Rational),
    /// Floating-point coefficient; only produced when instantiating model
    /// equations with irrational parameters.
    Real(f64),
    Param(Arc<str>),
    Var(Var),
    Binary(BinOp, Expr, Expr),
    /// Power with a rational exponent, stored in lowest terms.
    Pow(Expr, Rational),
    Neg(Expr),
    Func(Func, Expr),
}

struct Inner {
    node: Node,
    hash: u64,
}

impl Drop for Inner {
    // Long derivative chains produce deep trees; unlink children iteratively
    // so dropping one never overflows the stack.
    fn drop(&mut self) {
        let mut stack: Vec<Expr> = Vec::new();
        take_children(&mut self.node, &mut stack);
        while let Some(e) = stack.pop() {
            if let Ok(mut inner) = Arc::try_unwrap(e.0) {
                take_children(&mut inner.node, &mut stack);
            }
        }
    }
}

fn take_children(node: &mut Node, out: &mut Vec<Expr>) {
    let old = std::mem::replace(node, Node::Var(Var::X));
    match old {
        Node::Binary(_, a, b) => {
            out.push(a);
            out.push(b);
        }
        Node::Pow(a, _) | Node::Neg(a) | Node::Func(_, a) => out.push(a),
        _ => {}
    }
}

/// Cheap handle to an immutable expression node.
#[derive(Clone)]
pub struct Expr(Arc<Inner>);

fn mix(h: u64, v: u64) -> u64 {
    (h ^ v).wrapping_mul(0x100_0000_01b3).rotate_left(23) ^ 0x9e37_79b9_7f4a_7c15
}

fn node_hash(node: &Node) -> u64 {
    match node {
        Node::Const(r) => mix(mix(1, *r.numer() as u64), *r.denom() as u64),
        Node::Real(v) => mix(2, v.to_bits()),
        Node::Param(name) => name.bytes().fold(3, |h, b| mix(h, b as u64)),
        Node::Var(v) => mix(4, v.index() as u64),
        Node::Binary(op, a, b) => mix(mix(mix(5, *op as u64), a.0.hash), b.0.hash),
        Node::Pow(a, r) => mix(mix(mix(6, a.0.hash), *r.numer() as u64), *r.denom() as u64),
        Node::Neg(a) => mix(7, a.0.hash),
        Node::Func(f, a) => mix(mix(8, *f as u64), a.0.hash),
    }
}

#[allow(clippy::should_implement_trait)]
impl Expr {
    fn make(node: Node) -> Expr {
        let hash = node_hash(&node);
        Expr(Arc::new(Inner { node, hash }))
    }

    pub fn node(&self) -> &Node {
        &self.0.node
    }

    pub(crate) fn ptr(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }

    pub fn ptr_eq(&self, other: &Expr) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    pub fn constant(r: Rational) -> Expr {
        Expr::make(Node::Const(r))
    }

    pub fn int(n: i64) -> Expr {
        Expr::constant(Rational::from_integer(n))
    }

    pub fn rat(n: i64, d: i64) -> Expr {
        Expr::constant(Rational::new(n, d))
    }

    pub fn real(v: f64) -> Expr {
        Expr::make(Node::Real(v))
    }

    pub fn zero() -> Expr {
        Expr::int(0)
    }

    pub fn one() -> Expr {
        Expr::int(1)
    }

    pub fn var(v: Var) -> Expr {
        Expr::make(Node::Var(v))
    }

    pub fn x() -> Expr {
        Expr::var(Var::X)
    }

    pub fn y() -> Expr {
        Expr::var(Var::Y)
    }

    pub fn p() -> Expr {
        Expr::var(Var::P)
    }

    pub fn param(name: &str) -> Expr {
        Expr::make(Node::Param(Arc::from(name)))
    }

    pub fn as_rational(&self) -> Option<Rational> {
        match self.node() {
            Node::Const(r) => Some(*r),
            _ => None,
        }
    }

    /// Value of a literal constant (rational or real), if this node is one.
    pub fn as_f64(&self) -> Option<f64> {
        match self.node() {
            Node::Const(r) => Some(rational_to_f64(*r)),
            Node::Real(v) => Some(*v),
            _ => None,
        }
    }

    pub fn is_zero_literal(&self) -> bool {
        match self.node() {
            Node::Const(r) => r.is_zero(),
            Node::Real(v) => *v == 0.0,
            _ => false,
        }
    }

    fn is_one_literal(&self) -> bool {
        match self.node() {
            Node::Const(r) => r.is_one(),
            Node::Real(v) => *v == 1.0,
            _ => false,
        }
    }

    fn is_minus_one_literal(&self) -> bool {
        match self.node() {
            Node::Const(r) => *r == -Rational::one(),
            Node::Real(v) => *v == -1.0,
            _ => false,
        }
    }

    pub fn binary(op: BinOp, a: Expr, b: Expr) -> Expr {
        match op {
            BinOp::Add => Expr::add(a, b),
            BinOp::Sub => Expr::sub(a, b),
            BinOp::Mul => Expr::mul(a, b),
            BinOp::Div => Expr::div(a, b),
        }
    }

    pub fn add(a: Expr, b: Expr) -> Expr {
        if let (Node::Const(x), Node::Const(y)) = (a.node(), b.node()) {
            if let Some(r) = x.checked_add(y) {
                return Expr::constant(r);
            }
        }
        if let (Some(x), Some(y)) = (a.as_f64(), b.as_f64()) {
            if matches!(a.node(), Node::Real(_)) || matches!(b.node(), Node::Real(_)) {
                return Expr::real(x + y);
            }
        }
        if a.is_zero_literal() {
            return b;
        }
        if b.is_zero_literal() {
            return a;
        }
        Expr::make(Node::Binary(BinOp::Add, a, b))
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        if let (Node::Const(x), Node::Const(y)) = (a.node(), b.node()) {
            if let Some(r) = x.checked_sub(y) {
                return Expr::constant(r);
            }
        }
        if let (Some(x), Some(y)) = (a.as_f64(), b.as_f64()) {
            if matches!(a.node(), Node::Real(_)) || matches!(b.node(), Node::Real(_)) {
                return Expr::real(x - y);
            }
        }
        if b.is_zero_literal() {
            return a;
        }
        if a.is_zero_literal() {
            return Expr::neg(b);
        }
        Expr::make(Node::Binary(BinOp::Sub, a, b))
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        if let (Node::Const(x), Node::Const(y)) = (a.node(), b.node()) {
            if let Some(r) = x.checked_mul(y) {
                return Expr::constant(r);
            }
        }
        if let (Some(x), Some(y)) = (a.as_f64(), b.as_f64()) {
            if matches!(a.node(), Node::Real(_)) || matches!(b.node(), Node::Real(_)) {
                return Expr::real(x * y);
            }
        }
        if a.is_zero_literal() || b.is_zero_literal() {
            return Expr::zero();
        }
        if a.is_one_literal() {
            return b;
        }
        if b.is_one_literal() {
            return a;
        }
        if a.is_minus_one_literal() {
            return Expr::neg(b);
        }
        if b.is_minus_one_literal() {
            return Expr::neg(a);
        }
        Expr::make(Node::Binary(BinOp::Mul, a, b))
    }

    pub fn div(a: Expr, b: Expr) -> Expr {
        if let (Node::Const(x), Node::Const(y)) = (a.node(), b.node()) {
            if !y.is_zero() {
                if let Some(r) = x.checked_div(y) {
                    return Expr::constant(r);
                }
            }
        }
        if let (Some(x), Some(y)) = (a.as_f64(), b.as_f64()) {
            let has_real = matches!(a.node(), Node::Real(_)) || matches!(b.node(), Node::Real(_));
            if has_real && y != 0.0 {
                return Expr::real(x / y);
            }
        }
        if b.is_one_literal() {
            return a;
        }
        if b.is_minus_one_literal() {
            return Expr::neg(a);
        }
        if a.is_zero_literal() && !b.is_zero_literal() {
            return Expr::zero();
        }
        Expr::make(Node::Binary(BinOp::Div, a, b))
    }

    pub fn neg(a: Expr) -> Expr {
        match a.node() {
            Node::Const(r) => Expr::constant(-*r),
            Node::Real(v) => Expr::real(-*v),
            Node::Neg(inner) => inner.clone(),
            _ => Expr::make(Node::Neg(a)),
        }
    }

    pub fn pow(base: Expr, exp: Rational) -> Expr {
        if exp.is_zero() {
            return Expr::one();
        }
        if exp.is_one() {
            return base;
        }
        match base.node() {
            Node::Const(r) if exp.is_integer() => {
                if let Some(v) = checked_rational_pow(*r, *exp.numer()) {
                    return Expr::constant(v);
                }
            }
            Node::Real(v) if exp.is_integer() => {
                return Expr::real(v.powi(*exp.numer() as i32));
            }
            Node::Pow(inner, e0) if exp.is_integer() => {
                if let Some(e) = e0.checked_mul(&exp) {
                    return Expr::pow(inner.clone(), e);
                }
            }
            _ => {}
        }
        Expr::make(Node::Pow(base, exp))
    }

    pub fn powi(base: Expr, n: i64) -> Expr {
        Expr::pow(base, Rational::from_integer(n))
    }

    pub fn func(f: Func, a: Expr) -> Expr {
        match (f, a.node()) {
            (Func::Exp, Node::Const(r)) if r.is_zero() => Expr::one(),
            (Func::Ln, Node::Const(r)) if r.is_one() => Expr::zero(),
            (Func::Sqrt | Func::Root5, Node::Const(r)) if r.is_zero() || r.is_one() => a,
            _ => Expr::make(Node::Func(f, a)),
        }
    }

    pub fn exp(a: Expr) -> Expr {
        Expr::func(Func::Exp, a)
    }

    pub fn ln(a: Expr) -> Expr {
        Expr::func(Func::Ln, a)
    }

    pub fn sqrt(a: Expr) -> Expr {
        Expr::func(Func::Sqrt, a)
    }

    pub fn root5(a: Expr) -> Expr {
        Expr::func(Func::Root5, a)
    }

    /// Direct children, in evaluation order.
    pub(crate) fn children(&self) -> ChildIter<'_> {
        match self.node() {
            Node::Binary(_, a, b) => ChildIter {
                items: [Some(a), Some(b)],
                pos: 0,
            },
            Node::Pow(a, _) | Node::Neg(a) | Node::Func(_, a) => ChildIter {
                items: [Some(a), None],
                pos: 0,
            },
            _ => ChildIter {
                items: [None, None],
                pos: 0,
            },
        }
    }

    /// Distinct nodes reachable from `self`, children before parents.
    pub(crate) fn postorder(&self) -> Vec<Expr> {
        self.postorder_until(|_| false)
    }

    /// As [`Expr::postorder`], but does not descend into (or emit) nodes for
    /// which `stop` returns true.
    pub(crate) fn postorder_until(&self, stop: impl Fn(&Expr) -> bool) -> Vec<Expr> {
        let mut out = Vec::new();
        let mut seen: HashSet<usize> = HashSet::new();
        let mut stack: Vec<(Expr, bool)> = vec![(self.clone(), false)];
        while let Some((e, expanded)) = stack.pop() {
            if expanded {
                out.push(e);
                continue;
            }
            if !seen.insert(e.ptr()) || stop(&e) {
                continue;
            }
            stack.push((e.clone(), true));
            for c in e.children() {
                if !seen.contains(&c.ptr()) {
                    stack.push((c.clone(), false));
                }
            }
        }
        out
    }

    /// Number of distinct nodes in the DAG.
    pub fn node_count(&self) -> usize {
        self.postorder().len()
    }

    /// Number of nodes the expression would have written out as a tree
    /// (saturating).
    pub fn tree_size(&self) -> u64 {
        let mut sizes: HashMap<usize, u64> = HashMap::new();
        for e in self.postorder() {
            let s = e.children().fold(1u64, |acc, c| acc.saturating_add(sizes[&c.ptr()]));
            sizes.insert(e.ptr(), s);
        }
        sizes[&self.ptr()]
    }

    pub fn contains_var(&self, v: Var) -> bool {
        self.postorder()
            .iter()
            .any(|e| matches!(e.node(), Node::Var(w) if *w == v))
    }

    pub fn params(&self) -> BTreeSet<String> {
        self.postorder()
            .iter()
            .filter_map(|e| match e.node() {
                Node::Param(n) => Some(n.to_string()),
                _ => None,
            })
            .collect()
    }

    /// Rebuilds the expression bottom-up, replacing leaves through `leaf`.
    /// Interior nodes go through the smart constructors again, so constants
    /// introduced by the replacement are folded.
    pub fn map_leaves(&self, leaf: impl Fn(&Node) -> Option<Expr>) -> Expr {
        let mut done: HashMap<usize, Expr> = HashMap::new();
        for e in self.postorder() {
            let get = |c: &Expr| done[&c.ptr()].clone();
            let rebuilt = match e.node() {
                Node::Const(_) | Node::Real(_) | Node::Param(_) | Node::Var(_) => {
                    leaf(e.node()).unwrap_or_else(|| e.clone())
                }
                Node::Binary(op, a, b) => {
                    let (na, nb) = (get(a), get(b));
                    if na.ptr_eq(a) && nb.ptr_eq(b) {
                        e.clone()
                    } else {
                        Expr::binary(*op, na, nb)
                    }
                }
                Node::Pow(a, r) => {
                    let na = get(a);
                    if na.ptr_eq(a) {
                        e.clone()
                    } else {
                        Expr::pow(na, *r)
                    }
                }
                Node::Neg(a) => {
                    let na = get(a);
                    if na.ptr_eq(a) {
                        e.clone()
                    } else {
                        Expr::neg(na)
                    }
                }
                Node::Func(f, a) => {
                    let na = get(a);
                    if na.ptr_eq(a) {
                        e.clone()
                    } else {
                        Expr::func(*f, na)
                    }
                }
            };
            done.insert(e.ptr(), rebuilt);
        }
        done.remove(&self.ptr()).expect("root visited")
    }

    /// Substitutes expressions for variables.
    pub fn substitute(&self, subst: &[(Var, Expr)]) -> Expr {
        self.map_leaves(|n| match n {
            Node::Var(v) => subst.iter().find(|(w, _)| w == v).map(|(_, e)| e.clone()),
            _ => None,
        })
    }

    /// Replaces named parameters by their bound rational values. Unbound
    /// parameters are reported by name.
    pub fn bind_params(&self, bindings: &Bindings) -> Result<Expr, EvalError> {
        if let Some(missing) = self.params().into_iter().find(|n| !bindings.contains(n)) {
            return Err(EvalError::UnboundParameter(missing));
        }
        Ok(self.map_leaves(|n| match n {
            Node::Param(name) => bindings.get(name).map(Expr::constant),
            _ => None,
        }))
    }

    pub fn diff(&self, v: Var) -> Expr {
        Derivatives::new().diff(self, v)
    }

    /// Evaluates at `(x, y)`; `p` and `y''` evaluate to zero.
    pub fn evaluate(&self, x: f64, y: f64, bindings: &Bindings) -> Result<f64, EvalError> {
        Program::compile(self, bindings)?
            .eval_exact(&[x, y, 0.0, 0.0])
            .map_err(EvalError::Domain)
    }

    /// Renders the expression unless its tree form exceeds `limit` nodes.
    pub fn to_string_capped(&self, limit: u64) -> Option<String> {
        (self.tree_size() <= limit).then(|| self.to_string())
    }
}

pub(crate) struct ChildIter<'a> {
    items: [Option<&'a Expr>; 2],
    pos: usize,
}

impl<'a> Iterator for ChildIter<'a> {
    type Item = &'a Expr;
    fn next(&mut self) -> Option<&'a Expr> {
        while self.pos < 2 {
            let item = self.items[self.pos];
            self.pos += 1;
            if item.is_some() {
                return item;
            }
        }
        None
    }
}

pub(crate) fn rational_to_f64(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

fn checked_rational_pow(base: Rational, n: i64) -> Option<Rational> {
    if n < 0 && base.is_zero() {
        return None;
    }
    let e = u32::try_from(n.unsigned_abs()).ok()?;
    let num = base.numer().checked_pow(e)?;
    let den = base.denom().checked_pow(e)?;
    let r = Rational::new(num, den);
    Some(if n < 0 { r.recip() } else { r })
}

impl PartialEq for Expr {
    /// Structural equality.
    fn eq(&self, other: &Expr) -> bool {
        let mut stack = vec![(self.clone(), other.clone())];
        while let Some((a, b)) = stack.pop() {
            if a.ptr_eq(&b) {
                continue;
            }
            if a.0.hash != b.0.hash {
                return false;
            }
            let same = match (a.node(), b.node()) {
                (Node::Const(x), Node::Const(y)) => x == y,
                (Node::Real(x), Node::Real(y)) => x.to_bits() == y.to_bits(),
                (Node::Param(x), Node::Param(y)) => x == y,
                (Node::Var(x), Node::Var(y)) => x == y,
                (Node::Binary(o1, a1, b1), Node::Binary(o2, a2, b2)) if o1 == o2 => {
                    stack.push((a1.clone(), a2.clone()));
                    stack.push((b1.clone(), b2.clone()));
                    true
                }
                (Node::Pow(a1, r1), Node::Pow(a2, r2)) if r1 == r2 => {
                    stack.push((a1.clone(), a2.clone()));
                    true
                }
                (Node::Neg(a1), Node::Neg(a2)) => {
                    stack.push((a1.clone(), a2.clone()));
                    true
                }
                (Node::Func(f1, a1), Node::Func(f2, a2)) if f1 == f2 => {
                    stack.push((a1.clone(), a2.clone()));
                    true
                }
                _ => false,
            };
            if !same {
                return false;
            }
        }
        true
    }
}

impl Eq for Expr {}

impl Hash for Expr {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.0.hash);
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.to_string_capped(2_000) {
            Some(s) => write!(f, "Expr({s})"),
            None => write!(f, "Expr(<{} nodes>)", self.node_count()),
        }
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Expr {
        Expr::int(n)
    }
}

impl From<Rational> for Expr {
    fn from(r: Rational) -> Expr {
        Expr::constant(r)
    }
}

macro_rules! impl_binop {
    ($tr:ident, $method:ident, $ctor:ident) => {
        impl ops::$tr<Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                Expr::$ctor(self, rhs)
            }
        }
        impl ops::$tr<&Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                Expr::$ctor(self, rhs.clone())
            }
        }
        impl ops::$tr<Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                Expr::$ctor(self.clone(), rhs)
            }
        }
        impl ops::$tr<&Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                Expr::$ctor(self.clone(), rhs.clone())
            }
        }
        impl ops::$tr<i64> for Expr {
            type Output = Expr;
            fn $method(self, rhs: i64) -> Expr {
                Expr::$ctor(self, Expr::int(rhs))
            }
        }
        impl ops::$tr<i64> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: i64) -> Expr {
                Expr::$ctor(self.clone(), Expr::int(rhs))
            }
        }
        impl ops::$tr<Expr> for i64 {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                Expr::$ctor(Expr::int(self), rhs)
            }
        }
        impl ops::$tr<&Expr> for i64 {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                Expr::$ctor(Expr::int(self), rhs.clone())
            }
        }
    };
}

impl_binop!(Add, add, add);
impl_binop!(Sub, sub, sub);
impl_binop!(Mul, mul, mul);
impl_binop!(Div, div, div);

impl ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(self)
    }
}

impl ops::Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(self.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn folds_constants_and_absorbs_units() {
        let y = Expr::y();
        assert_eq!(Expr::rat(3, 5) + Expr::rat(2, 5), Expr::one());
        assert!((&y * Expr::zero()).is_zero_literal());
        assert!((&y * 1).ptr_eq(&y));
        assert!((0 + &y).ptr_eq(&y));
        assert_eq!(Expr::powi(Expr::rat(2, 3), -2), Expr::rat(9, 4));
        assert_eq!(-(-y.clone()), y);
    }

    #[test]
    fn integer_power_of_power_collapses() {
        let y = Expr::y();
        let e = Expr::powi(Expr::pow(y.clone(), Rational::new(1, 2)), 2);
        assert_eq!(e, y);
    }

    #[test]
    fn exponents_stay_in_lowest_terms() {
        let e = Expr::pow(Expr::y(), Rational::new(6, 4));
        match e.node() {
            Node::Pow(_, r) => assert_eq!((*r.numer(), *r.denom()), (3, 2)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn deep_chains_drop_without_overflow() {
        let mut e = Expr::x();
        for i in 0..200_000 {
            e = e + Expr::int(i % 7 + 1) * Expr::y();
        }
        assert!(e.node_count() > 200_000);
        drop(e);
    }

    #[test]
    fn tree_size_counts_shared_nodes_repeatedly() {
        let y = Expr::y();
        let s = &y + &y;
        let t = &s * &s;
        assert_eq!(t.node_count(), 3);
        assert_eq!(t.tree_size(), 7);
    }

    #[test]
    fn substitution_refolds() {
        let e = Expr::p() * Expr::y() + Expr::int(2);
        let s = e.substitute(&[(Var::P, Expr::zero())]);
        assert_eq!(s, Expr::int(2));
    }
}
