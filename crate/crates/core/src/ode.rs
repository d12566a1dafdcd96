//! Second-order equations cubic in the first derivative,
//! `y'' = P + 3Q y' + 3R y'^2 + S y'^3`.

use std::fmt;

use num_traits::Zero;
use thiserror::Error;

use crate::expr::{
    parse_equation, Bindings, Derivatives, EvalError, Expr, ParseError, Probe, ProbeError, Rational, SampleBox, Var,
};

#[derive(Debug, Clone)]
pub struct OdeCubic {
    pub p: Expr,
    pub q: Expr,
    pub r: Expr,
    pub s: Expr,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NormalizeError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("parameter `{0}` is not bound")]
    UnboundParameter(String),
    #[error("equation is not linear in y''")]
    NotLinearInYpp,
    #[error("coefficient of y'' is identically zero")]
    LeadingCoefficientZero,
    #[error("right-hand side has degree greater than 3 in y'")]
    DegreeExceedsThree,
    #[error("right-hand side is not polynomial in y'")]
    ResidualPDependence,
    #[error(transparent)]
    Probe(#[from] ProbeError),
}

impl From<EvalError> for NormalizeError {
    fn from(e: EvalError) -> NormalizeError {
        match e {
            EvalError::UnboundParameter(n) => NormalizeError::UnboundParameter(n),
            EvalError::Domain(d) => unreachable!("binding does not evaluate: {d}"),
        }
    }
}

impl OdeCubic {
    pub fn new(p: Expr, q: Expr, r: Expr, s: Expr) -> OdeCubic {
        OdeCubic { p, q, r, s }
    }

    /// `y'' = f(x, y)`.
    pub fn from_force(f: Expr) -> OdeCubic {
        OdeCubic::new(f, Expr::zero(), Expr::zero(), Expr::zero())
    }

    pub fn coefficients(&self) -> [&Expr; 4] {
        [&self.p, &self.q, &self.r, &self.s]
    }

    /// The right-hand side as a polynomial in `p`.
    pub fn rhs(&self) -> Expr {
        let p = Expr::p();
        &self.p
            + Expr::int(3) * &self.q * &p
            + Expr::int(3) * &self.r * Expr::powi(p.clone(), 2)
            + &self.s * Expr::powi(p, 3)
    }

    /// Coefficientwise map.
    pub fn map(&self, f: impl Fn(&Expr) -> Expr) -> OdeCubic {
        OdeCubic::new(f(&self.p), f(&self.q), f(&self.r), f(&self.s))
    }

    /// True when every coefficient is free of `x`.
    pub fn is_autonomous(&self, probe: &Probe) -> Result<bool, ProbeError> {
        for c in self.coefficients() {
            if !probe.is_identically_zero(&c.diff(Var::X))? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Coefficientwise equality under the probe.
    pub fn equivalent_coefficients(&self, other: &OdeCubic, probe: &Probe) -> Result<bool, ProbeError> {
        for (a, b) in self.coefficients().into_iter().zip(other.coefficients()) {
            if !probe.is_identically_zero(&(a - b))? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

impl fmt::Display for OdeCubic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "y'' = {}", self.rhs())
    }
}

/// Brings `y'' = f(x, y, y')` or `g(x, y, y', y'') = 0` (linear in `y''`) into
/// cubic form.
pub fn normalize_to_cubic(equation: &str, bindings: &Bindings, probe: &Probe) -> Result<OdeCubic, NormalizeError> {
    let names = bindings.iter().map(|(k, _)| k.to_string()).collect();
    let eq = parse_equation(equation, &names)?;
    let e = (eq.lhs - eq.rhs).bind_params(bindings)?;
    let d = Derivatives::new();

    let lead = d.diff(&e, Var::Ypp);
    if !probe.is_identically_zero(&d.diff(&lead, Var::Ypp))? {
        return Err(NormalizeError::NotLinearInYpp);
    }
    let lead = lead.substitute(&[(Var::Ypp, Expr::zero())]);
    if probe.is_identically_zero(&lead)? {
        return Err(NormalizeError::LeadingCoefficientZero);
    }
    let f = -e.substitute(&[(Var::Ypp, Expr::zero())]) / lead;

    let mut derivs = vec![f];
    for k in 1..=4 {
        derivs.push(d.diff(&derivs[k - 1], Var::P));
    }
    if !probe.is_identically_zero(&derivs[4])? {
        for _ in 5..=8 {
            let next = d.diff(derivs.last().expect("nonempty"), Var::P);
            if probe.is_identically_zero(&next)? {
                return Err(NormalizeError::DegreeExceedsThree);
            }
            derivs.push(next);
        }
        return Err(NormalizeError::ResidualPDependence);
    }

    let at0 = |e: &Expr| e.substitute(&[(Var::P, Expr::zero())]);
    Ok(OdeCubic::new(
        at0(&derivs[0]),
        at0(&derivs[1]) / Expr::int(3),
        at0(&derivs[2]) / Expr::int(6),
        at0(&derivs[3]) / Expr::int(6),
    ))
}

/// `x̃ = αx + β`, `ỹ = γy + δ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AffineMap {
    alpha: Rational,
    beta: Rational,
    gamma: Rational,
    delta: Rational,
}

impl AffineMap {
    pub fn new(alpha: Rational, beta: Rational, gamma: Rational, delta: Rational) -> Option<AffineMap> {
        (!alpha.is_zero() && !gamma.is_zero()).then_some(AffineMap {
            alpha,
            beta,
            gamma,
            delta,
        })
    }

    pub fn identity() -> AffineMap {
        let one = Rational::from_integer(1);
        let zero = Rational::zero();
        AffineMap {
            alpha: one,
            beta: zero,
            gamma: one,
            delta: zero,
        }
    }

    pub fn alpha(&self) -> Rational {
        self.alpha
    }

    pub fn beta(&self) -> Rational {
        self.beta
    }

    pub fn gamma(&self) -> Rational {
        self.gamma
    }

    pub fn delta(&self) -> Rational {
        self.delta
    }

    /// Image of a point `(x, y)`.
    pub fn apply(&self, x: f64, y: f64) -> (f64, f64) {
        let f = |r: Rational| *r.numer() as f64 / *r.denom() as f64;
        (f(self.alpha) * x + f(self.beta), f(self.gamma) * y + f(self.delta))
    }

    /// Image of a sample box.
    pub fn map_box(&self, b: &SampleBox) -> SampleBox {
        let (a0, c0) = self.apply(b.x0, b.y0);
        let (a1, c1) = self.apply(b.x1, b.y1);
        SampleBox {
            x0: a0.min(a1),
            x1: a0.max(a1),
            y0: c0.min(c1),
            y1: c0.max(c1),
        }
    }
}

/// The equation satisfied by `ỹ(x̃)` when `y(x)` solves `ode`.
///
/// With `y' = (α/γ) ỹ'` and `ỹ'' = (γ/α²) y''`:
/// `P̃ = (γ/α²) P`, `Q̃ = Q/α`, `R̃ = R/γ`, `S̃ = (α/γ²) S`,
/// each composed with the inverse map.
pub fn pullback_affine(ode: &OdeCubic, map: &AffineMap) -> OdeCubic {
    let c = Expr::constant;
    let inv = [
        (Var::X, (Expr::x() - c(map.beta)) / c(map.alpha)),
        (Var::Y, (Expr::y() - c(map.delta)) / c(map.gamma)),
    ];
    let (a, g) = (map.alpha, map.gamma);
    OdeCubic::new(
        c(g / (a * a)) * ode.p.substitute(&inv),
        ode.q.substitute(&inv) / c(a),
        ode.r.substitute(&inv) / c(g),
        c(a / (g * g)) * ode.s.substitute(&inv),
    )
}
