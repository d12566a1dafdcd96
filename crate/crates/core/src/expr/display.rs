use std::fmt;

use num_traits::Signed;

use super::{BinOp, Expr, Node, Rational};

// Binding strengths, mirrored by the parser.
const PREC_ADD: u8 = 1;
const PREC_MUL: u8 = 2;
const PREC_NEG: u8 = 3;
const PREC_POW: u8 = 4;
const PREC_ATOM: u8 = 5;

fn prec(e: &Expr) -> u8 {
    match e.node() {
        Node::Const(r) => {
            if !r.is_integer() {
                PREC_MUL
            } else if r.is_negative() {
                PREC_NEG
            } else {
                PREC_ATOM
            }
        }
        Node::Real(v) => {
            if v.is_sign_negative() {
                PREC_NEG
            } else {
                PREC_ATOM
            }
        }
        Node::Param(_) | Node::Var(_) | Node::Func(..) => PREC_ATOM,
        Node::Binary(BinOp::Add | BinOp::Sub, ..) => PREC_ADD,
        Node::Binary(BinOp::Mul | BinOp::Div, ..) => PREC_MUL,
        Node::Neg(_) => PREC_NEG,
        Node::Pow(..) => PREC_POW,
    }
}

fn write_child(f: &mut fmt::Formatter<'_>, e: &Expr, parens: bool) -> fmt::Result {
    if parens {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

fn write_rational(f: &mut fmt::Formatter<'_>, r: &Rational) -> fmt::Result {
    if r.is_integer() {
        write!(f, "{}", r.numer())
    } else {
        write!(f, "{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node() {
            Node::Const(r) => write_rational(f, r),
            Node::Real(v) => write!(f, "{v}"),
            Node::Param(name) => f.write_str(name),
            Node::Var(v) => f.write_str(v.name()),
            Node::Binary(op, a, b) => {
                let (p, sym) = match op {
                    BinOp::Add => (PREC_ADD, " + "),
                    BinOp::Sub => (PREC_ADD, " - "),
                    BinOp::Mul => (PREC_MUL, "*"),
                    BinOp::Div => (PREC_MUL, "/"),
                };
                write_child(f, a, prec(a) < p)?;
                f.write_str(sym)?;
                let pb = prec(b);
                write_child(f, b, pb <= p || pb == PREC_NEG)
            }
            Node::Neg(a) => {
                f.write_str("-")?;
                write_child(f, a, prec(a) <= PREC_NEG)
            }
            Node::Pow(a, r) => {
                write_child(f, a, prec(a) <= PREC_POW)?;
                f.write_str("^")?;
                if r.is_integer() && !r.is_negative() {
                    write_rational(f, r)
                } else {
                    f.write_str("(")?;
                    write_rational(f, r)?;
                    f.write_str(")")
                }
            }
            Node::Func(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}
