use std::cell::RefCell;
use std::collections::HashMap;

use super::{BinOp, Expr, Func, Node, Rational, Var};

/// Memoizing differentiator.
///
/// The invariant formulas take many mixed partials of the same subexpressions;
/// keeping one `Derivatives` per equation makes every node's derivative
/// computed once per variable and shared between all callers.
#[derive(Default)]
pub struct Derivatives {
    cache: RefCell<HashMap<(usize, Var), Expr>>,
    // Cache keys are node addresses, so every keyed node is kept alive.
    keepalive: RefCell<Vec<Expr>>,
}

impl Derivatives {
    pub fn new() -> Derivatives {
        Derivatives::default()
    }

    pub fn diff(&self, e: &Expr, v: Var) -> Expr {
        if let Some(d) = self.cache.borrow().get(&(e.ptr(), v)) {
            return d.clone();
        }
        let order = {
            let cache = self.cache.borrow();
            e.postorder_until(|n| cache.contains_key(&(n.ptr(), v)))
        };
        let mut cache = self.cache.borrow_mut();
        let mut keep = self.keepalive.borrow_mut();
        for n in order {
            let d = derivative_of(&n, v, |c| cache[&(c.ptr(), v)].clone());
            cache.insert((n.ptr(), v), d);
            keep.push(n);
        }
        cache[&(e.ptr(), v)].clone()
    }

    /// Mixed partial `∂^{i+j} e / ∂x^i ∂y^j`.
    pub fn partial(&self, e: &Expr, i: usize, j: usize) -> Expr {
        let mut out = e.clone();
        for _ in 0..i {
            out = self.diff(&out, Var::X);
        }
        for _ in 0..j {
            out = self.diff(&out, Var::Y);
        }
        out
    }
}

fn derivative_of(e: &Expr, v: Var, d: impl Fn(&Expr) -> Expr) -> Expr {
    match e.node() {
        Node::Const(_) | Node::Real(_) | Node::Param(_) => Expr::zero(),
        Node::Var(w) => Expr::int((*w == v) as i64),
        Node::Binary(op, a, b) => {
            let (da, db) = (d(a), d(b));
            match op {
                BinOp::Add => da + db,
                BinOp::Sub => da - db,
                BinOp::Mul => da * b + a * db,
                BinOp::Div => {
                    if db.is_zero_literal() {
                        da / b
                    } else {
                        (da - e * db) / b
                    }
                }
            }
        }
        Node::Pow(a, r) => {
            let da = d(a);
            if da.is_zero_literal() {
                return Expr::zero();
            }
            Expr::constant(*r) * Expr::pow(a.clone(), r - Rational::from_integer(1)) * da
        }
        Node::Neg(a) => -d(a),
        Node::Func(f, a) => {
            let da = d(a);
            if da.is_zero_literal() {
                return Expr::zero();
            }
            match f {
                Func::Exp => e * da,
                Func::Ln => da / a,
                Func::Sqrt => da / (Expr::int(2) * e),
                Func::Root5 => da / (Expr::int(5) * Expr::powi(e.clone(), 4)),
            }
        }
    }
}
