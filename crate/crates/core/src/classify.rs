//! The degeneration tree: from an equation to one of the eight equivalence
//! classes (or an honest catch-all), with parameters, model equation and
//! symmetry generators.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::expr::{snap_rational_tol, Derivatives, Expr, Probe, ProbeError, Rational, SampleBox, Var};
use crate::invariants::{Branch, InvariantEngine, InvariantError};
use crate::ode::OdeCubic;

/// Tolerance for matching probed invariant values against target constants.
pub const DEFAULT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FamilyType {
    I,
    II,
    III,
    IV,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Verdict {
    Linearizable,
    Theorem1,
    Theorem2,
    Theorem3,
    Theorem4,
    Theorem5,
    Theorem6,
    Theorem7,
    /// `Ω ≡ 0` with constant `I₁` but no equivalence theorem.
    FirstCaseFamily(FamilyType),
    IntermediateOther,
    GeneralOther,
    GeneralNonConstant,
}

impl Verdict {
    pub const CLASSES: [Verdict; 8] = [
        Verdict::Linearizable,
        Verdict::Theorem1,
        Verdict::Theorem2,
        Verdict::Theorem3,
        Verdict::Theorem4,
        Verdict::Theorem5,
        Verdict::Theorem6,
        Verdict::Theorem7,
    ];

    /// Dimension of the point symmetry algebra, when the verdict fixes it.
    pub fn algebra_dim(self) -> Option<u8> {
        match self {
            Verdict::Linearizable => Some(8),
            Verdict::Theorem1 => Some(3),
            Verdict::Theorem2
            | Verdict::Theorem3
            | Verdict::Theorem4
            | Verdict::Theorem5
            | Verdict::Theorem6
            | Verdict::Theorem7 => Some(2),
            _ => None,
        }
    }

    pub fn is_class(self) -> bool {
        Verdict::CLASSES.contains(&self)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::FirstCaseFamily(t) => write!(f, "FirstCaseFamily({t:?})"),
            other => write!(f, "{other:?}"),
        }
    }
}

impl FromStr for Verdict {
    type Err = String;

    fn from_str(s: &str) -> Result<Verdict, String> {
        let s = s.trim();
        let v = match s {
            "Linearizable" => Verdict::Linearizable,
            "Theorem1" => Verdict::Theorem1,
            "Theorem2" => Verdict::Theorem2,
            "Theorem3" => Verdict::Theorem3,
            "Theorem4" => Verdict::Theorem4,
            "Theorem5" => Verdict::Theorem5,
            "Theorem6" => Verdict::Theorem6,
            "Theorem7" => Verdict::Theorem7,
            "FirstCaseFamily(I)" => Verdict::FirstCaseFamily(FamilyType::I),
            "FirstCaseFamily(II)" => Verdict::FirstCaseFamily(FamilyType::II),
            "FirstCaseFamily(III)" => Verdict::FirstCaseFamily(FamilyType::III),
            "FirstCaseFamily(IV)" => Verdict::FirstCaseFamily(FamilyType::IV),
            "IntermediateOther" => Verdict::IntermediateOther,
            "GeneralOther" => Verdict::GeneralOther,
            "GeneralNonConstant" => Verdict::GeneralNonConstant,
            _ => return Err(format!("unknown verdict `{s}`")),
        };
        Ok(v)
    }
}

impl Serialize for Verdict {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// A named invariant with its probed constant value, if it has one.
#[derive(Debug, Clone)]
pub struct InvariantValue {
    pub name: String,
    pub expr: Expr,
    pub value: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct Classification {
    pub verdict: Verdict,
    pub params: BTreeMap<String, f64>,
    pub invariants: Vec<InvariantValue>,
    pub model: Option<OdeCubic>,
    /// A box on which the model's coefficients are defined.
    pub model_box: Option<SampleBox>,
    pub generators: Vec<(Expr, Expr)>,
    pub algebra_dim: Option<u8>,
    pub branch: Option<Branch>,
    pub branch_notes: Vec<String>,
    /// Which of the tested pseudoinvariants vanish identically.
    pub vanishing: BTreeMap<String, bool>,
    /// Residuals of the consistency relations checked on the way.
    pub relations: BTreeMap<String, f64>,
}

impl Classification {
    fn new() -> Classification {
        Classification {
            verdict: Verdict::IntermediateOther,
            params: BTreeMap::new(),
            invariants: Vec::new(),
            model: None,
            model_box: None,
            generators: Vec::new(),
            algebra_dim: None,
            branch: None,
            branch_notes: Vec::new(),
            vanishing: BTreeMap::new(),
            relations: BTreeMap::new(),
        }
    }

    pub fn invariant(&self, name: &str) -> Option<f64> {
        self.invariants.iter().find(|v| v.name == name).and_then(|v| v.value)
    }

    pub fn param(&self, name: &str) -> Option<f64> {
        self.params.get(name).copied()
    }
}

/// `|v − t| ≤ tol · max(1, |t|)`.
pub fn close(v: f64, t: f64, tol: f64) -> bool {
    (v - t).abs() <= tol * t.abs().max(1.0)
}

fn residual_ok(residual: f64, terms: &[f64], tol: f64) -> bool {
    let scale = terms.iter().fold(1.0f64, |acc, t| acc.max(t.abs()));
    residual.abs() <= tol * scale
}

/// Solves `I₁ = 3(c+5)/(5c)` for `c` and checks `I₃ = c(c+5)/(15(c+1)(c+2))`.
pub fn extract_theorem3(i1: f64, i3: f64, tol: f64) -> Option<f64> {
    if close(i1, 0.6, tol) {
        return None;
    }
    let c = 15.0 / (5.0 * i1 - 3.0);
    if [-5.0, -2.0, -1.0, 0.0].iter().any(|&bad| close(c, bad, tol)) {
        return None;
    }
    let target = c * (c + 5.0) / (15.0 * (c + 1.0) * (c + 2.0));
    close(i3, target, tol).then_some(c)
}

/// `I₁ = 18/5`, `I₂ = k ≠ 0`, `I₃ = 1/15 − 22k/3`.
pub fn extract_theorem4(i1: f64, i2: f64, i3: f64, tol: f64) -> Option<f64> {
    let k = i2;
    let ok = close(i1, 3.6, tol) && k.abs() > tol && close(i3, 1.0 / 15.0 - 22.0 * k / 3.0, tol);
    ok.then_some(k)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum Theorem7Error {
    #[error("no match: {0}")]
    NoMatch(&'static str),
    #[error("c6 = 6*I6 is not positive; complex parameters are not supported")]
    UnsupportedBranch,
}

/// Parameters of the Theorem 7 model, plus the residuals of the three
/// consistency relations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Theorem7Params {
    pub n: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub k: f64,
    pub m: f64,
    pub relation_c7: f64,
    pub relation_c3: f64,
    pub relation_nab: f64,
}

impl Theorem7Params {
    /// The model constants `c, d, k, m` in terms of `n, a, b`.
    pub fn from_nab(n: f64, a: f64, b: f64) -> Theorem7Params {
        Theorem7Params {
            n,
            a,
            b,
            c: n * (12.0 * a - 5.0) / 6.0,
            d: b * n * (6.0 * a - 1.0) / 6.0,
            k: 3.0 * b * n,
            m: 3.0 * n * n * (2.0 * a - 1.0) / 2.0,
            relation_c7: 0.0,
            relation_c3: 0.0,
            relation_nab: nab_terms(n, a, b).iter().sum(),
        }
    }

    pub fn named(&self) -> [(&'static str, f64); 7] {
        [
            ("n", self.n),
            ("a", self.a),
            ("b", self.b),
            ("c", self.c),
            ("d", self.d),
            ("k", self.k),
            ("m", self.m),
        ]
    }
}

fn nab_terms(n: f64, a: f64, b: f64) -> [f64; 5] {
    [
        18.0 * b * b,
        -18.0 * b * a * a * n,
        15.0 * n * a * b,
        -2.0 * b * n,
        -6.0,
    ]
}

/// Recovers `n, a, b` (and `c, d, k, m`) from the four general invariants.
pub fn extract_theorem7(i3: f64, i6: f64, i7: f64, i8: f64, tol: f64) -> Result<Theorem7Params, Theorem7Error> {
    let (c3, c6, c7, c8) = (i3, 6.0 * i6, i7, i8);
    if c6.abs() <= tol {
        return Err(Theorem7Error::NoMatch("I6 vanishes"));
    }
    let disc = c6 * c6 - 3.0 * c8;
    if disc.abs() <= tol * (c6 * c6).max(1.0) {
        return Err(Theorem7Error::NoMatch("I8 equals c6^2/3"));
    }
    let t1 = 4.0 * c8 * (c3 + c8) / c6;
    let t2 = -c6 * (5.0 * c3 + 8.0 * c8) / 6.0;
    let relation_c7 = c7 - (t1 + t2);
    if !residual_ok(relation_c7, &[c7, t1, t2], tol) {
        return Err(Theorem7Error::NoMatch("I7 relation fails"));
    }
    let u1 = 27.0 * c6;
    let u2 = disc * (c6 * c6 * (5.0 * c3 + 8.0 * c8) + 4.0 * (c3 + c8).powi(2));
    let relation_c3 = u1 + u2;
    if !residual_ok(relation_c3, &[u1, u2], tol) {
        return Err(Theorem7Error::NoMatch("I3 relation fails"));
    }
    if c6 <= 0.0 {
        return Err(Theorem7Error::UnsupportedBranch);
    }
    let n = c6.powf(2.5);
    let a = -2.0 * (c3 + c8) / (3.0 * c6 * c6);
    let b = -3.0 / (c6.sqrt() * disc);
    let mut params = Theorem7Params::from_nab(n, a, b);
    if !residual_ok(params.relation_nab, &nab_terms(n, a, b), tol) {
        return Err(Theorem7Error::NoMatch("n, a, b constraint fails"));
    }
    params.relation_c7 = relation_c7;
    params.relation_c3 = relation_c3;
    Ok(params)
}

/// A model equation with its symmetry generators `(ξ, η)`.
#[derive(Debug, Clone)]
pub struct Model {
    pub ode: OdeCubic,
    pub generators: Vec<(Expr, Expr)>,
    pub sample_box: SampleBox,
}

/// Exact rational when `v` is one to within rounding, a float otherwise.
fn number(v: f64) -> Expr {
    match snap_rational_tol(v, 1_000_000, 1e-13) {
        Some(r) => Expr::constant(r),
        None => Expr::real(v),
    }
}

/// The canonical representative of `verdict` for the given parameters.
pub fn model_equation(verdict: Verdict, params: &BTreeMap<String, f64>) -> Option<Model> {
    let x = Expr::x;
    let y = Expr::y;
    let int = Expr::int;
    let get = |k: &str| params.get(k).copied();
    let trans = (int(1), int(0));
    let mut sample_box = SampleBox::default();
    let (ode, generators) = match verdict {
        Verdict::Linearizable => (
            OdeCubic::from_force(int(0)),
            vec![
                (int(0), int(1)),
                trans.clone(),
                (int(0), x()),
                (int(0), y()),
                (x(), int(0)),
                (y(), int(0)),
                (x() * y(), Expr::powi(y(), 2)),
                (Expr::powi(x(), 2), x() * y()),
            ],
        ),
        Verdict::Theorem1 => (
            OdeCubic::from_force(Expr::powi(y(), -3)),
            vec![trans.clone(), (int(2) * x(), y()), (Expr::powi(x(), 2), x() * y())],
        ),
        Verdict::Theorem2 => (
            OdeCubic::from_force(Expr::exp(y())),
            vec![trans.clone(), (x(), int(-2))],
        ),
        Verdict::Theorem3 => {
            let c = get("c")?;
            let power = match snap_rational_tol(c, 10_000, 1e-12) {
                Some(r) => Expr::pow(y(), r + Rational::from_integer(2)),
                None => Expr::exp(number(c + 2.0) * Expr::ln(y())),
            };
            let force = power / number((c + 1.0) * (c + 2.0));
            (
                OdeCubic::from_force(force),
                vec![trans.clone(), (x() * number(c + 1.0), int(-2) * y())],
            )
        }
        Verdict::Theorem4 => {
            let k = get("k")?;
            if k < 0.0 {
                sample_box = SampleBox {
                    y0: -2.7,
                    y1: -0.3,
                    ..sample_box
                };
            }
            let ode = OdeCubic::new(
                number(2.0 * (1.0 - 2.0 * k) / 3.0) * Expr::powi(y(), 2),
                Expr::sqrt(number(6.0 * k) * y()) / int(3),
                Expr::one() / (int(6) * y()),
                int(0),
            );
            (ode, vec![trans.clone(), (x(), int(-2) * y())])
        }
        Verdict::Theorem5 => (
            OdeCubic::from_force(Expr::powi(y(), 2) / int(2)),
            vec![trans.clone(), (x(), int(-2) * y())],
        ),
        Verdict::Theorem6 => {
            let k = get("k")?;
            let ode = OdeCubic::new(
                number(1.0 / k) + number(k * k / 9.0) * y() - number(k.powi(3) / 27.0) * Expr::powi(y(), 3),
                number(k * k / 9.0) * Expr::powi(y(), 2),
                number(-k / 3.0) * y(),
                int(1),
            );
            (ode, vec![trans.clone(), (int(0), Expr::exp(number(k / 3.0) * x()))])
        }
        Verdict::Theorem7 => {
            let [n, a, b, c, d, k, m] = ["n", "a", "b", "c", "d", "k", "m"].map(get);
            let (n, a, b, c, d, k, m) = (n?, a?, b?, c?, d?, k?, m?);
            let y2 = || Expr::powi(y(), 2);
            let ode = OdeCubic::new(
                (number(d) * Expr::powi(y(), 3) + number(k) * y2() + number(m) * y() + number(n * n)) / int(2),
                (number(b) * y2() + number(c) * y() + number(n)) / y(),
                (number(6.0 * a - 1.0) * y() + int(6)) / (int(3) * y2()),
                number(4.0 / n) / Expr::powi(y(), 3),
            );
            let e = Expr::exp(number(n / 2.0) * x());
            (ode, vec![trans.clone(), (e.clone(), number(-n / 2.0) * y() * e)])
        }
        _ => return None,
    };
    Some(Model {
        ode,
        generators,
        sample_box,
    })
}

/// The determining expression for `X = ξ∂ₓ + η∂ᵧ` to be a point symmetry
/// of `ode`, as a function of `x, y, p`. Vanishes identically iff it is one.
pub fn symmetry_condition(ode: &OdeCubic, xi: &Expr, eta: &Expr) -> Expr {
    let d = Derivatives::new();
    let pd = |e: &Expr, i, j| d.partial(e, i, j);
    let p = Expr::p();
    let w = ode.rhs();
    let p2 = Expr::powi(p.clone(), 2);
    let p3 = Expr::powi(p.clone(), 3);
    let eta1 = pd(eta, 1, 0) + (pd(eta, 0, 1) - pd(xi, 1, 0)) * &p - pd(xi, 0, 1) * &p2;
    let eta2 = pd(eta, 2, 0)
        + (Expr::int(2) * pd(eta, 1, 1) - pd(xi, 2, 0)) * &p
        + (pd(eta, 0, 2) - Expr::int(2) * pd(xi, 1, 1)) * &p2
        - pd(xi, 0, 2) * &p3
        + (pd(eta, 0, 1) - Expr::int(2) * pd(xi, 1, 0) - Expr::int(3) * pd(xi, 0, 1) * &p) * &w;
    eta2 - xi * d.diff(&w, Var::X) - eta * d.diff(&w, Var::Y) - eta1 * d.diff(&w, Var::P)
}

/// Classifies with the default matching tolerance.
pub fn classify(ode: &OdeCubic, probe: &Probe) -> Result<Classification, ProbeError> {
    classify_with(ode, probe, DEFAULT_TOL)
}

pub fn classify_with(ode: &OdeCubic, probe: &Probe, tol: f64) -> Result<Classification, ProbeError> {
    let eng = InvariantEngine::new(ode);
    let mut out = Classification::new();
    let rel = eng.relative();
    let a0 = probe.is_identically_zero(&rel.a)?;
    let b0 = probe.is_identically_zero(&rel.b)?;
    out.vanishing.insert("A".into(), a0);
    out.vanishing.insert("B".into(), b0);
    out.verdict = if a0 && b0 {
        Verdict::Linearizable
    } else {
        let f0 = probe.is_identically_zero(&rel.f5)?;
        out.vanishing.insert("F".into(), f0);
        if f0 {
            intermediate(&eng, probe, tol, &mut out)?
        } else {
            general(&eng, probe, tol, &mut out)?
        }
    };
    out.algebra_dim = out.verdict.algebra_dim();
    if let Some(model) = model_equation(out.verdict, &out.params) {
        out.model = Some(model.ode);
        out.model_box = Some(model.sample_box);
        out.generators = model.generators;
    }
    Ok(out)
}

struct Recorder<'a> {
    eng: &'a InvariantEngine,
    probe: &'a Probe,
    out: &'a mut Classification,
}

impl Recorder<'_> {
    fn zero(&mut self, name: &str, e: &Expr) -> Result<bool, ProbeError> {
        let z = self.probe.is_identically_zero(e)?;
        self.out.vanishing.insert(name.into(), z);
        Ok(z)
    }

    fn value(&mut self, name: &str, e: &Expr) -> Result<Option<f64>, ProbeError> {
        let value = self.probe.constant_value_with(e, self.eng.derivatives())?;
        self.out.invariants.push(InvariantValue {
            name: name.into(),
            expr: e.clone(),
            value,
        });
        Ok(value)
    }
}

fn intermediate(
    eng: &InvariantEngine,
    probe: &Probe,
    tol: f64,
    out: &mut Classification,
) -> Result<Verdict, ProbeError> {
    let sel = match eng.select(probe) {
        Ok(sel) => sel,
        Err(InvariantError::Probe(e)) => return Err(e),
        Err(InvariantError::BothDegenerate) => unreachable!("linearizable equations are routed earlier"),
    };
    out.branch = Some(sel.bundle.branch);
    out.branch_notes = sel.notes;
    let pb = sel.bundle;
    let [(_, i1), (_, i2), (_, i3)] = pb.first_case();
    let mut rec = Recorder { eng, probe, out };

    if !rec.zero("N", &pb.n)? {
        let m0 = rec.zero("M", &pb.m)?;
        let o0 = rec.zero("Omega", &pb.omega_cap)?;
        match (m0, o0) {
            (true, true) => {
                if !rec.zero("Lambda", &pb.lambda)? {
                    return Ok(Verdict::IntermediateOther);
                }
                let k = rec.value("K", &pb.k)?;
                Ok(match k {
                    Some(k) if close(k, -5.0 / 9.0, tol) => Verdict::Theorem1,
                    _ => Verdict::IntermediateOther,
                })
            }
            (false, true) => {
                let v1 = rec.value("I1", &i1)?;
                let v3 = rec.value("I3", &i3)?;
                let Some(v1) = v1 else {
                    return Ok(Verdict::IntermediateOther);
                };
                if let Some(v3) = v3 {
                    if close(v1, 0.6, tol) && close(v3, 1.0 / 15.0, tol) {
                        return Ok(Verdict::Theorem2);
                    }
                    if let Some(c) = extract_theorem3(v1, v3, tol) {
                        rec.out.params.insert("c".into(), c);
                        return Ok(Verdict::Theorem3);
                    }
                }
                Ok(first_case_family(v1, tol, rec.out))
            }
            (false, false) => {
                let vals = (rec.value("I1", &i1)?, rec.value("I2", &i2)?, rec.value("I3", &i3)?);
                if let (Some(v1), Some(v2), Some(v3)) = vals {
                    if let Some(k) = extract_theorem4(v1, v2, v3, tol) {
                        rec.out.params.insert("k".into(), k);
                        return Ok(Verdict::Theorem4);
                    }
                }
                Ok(Verdict::IntermediateOther)
            }
            (true, false) => Ok(Verdict::IntermediateOther),
        }
    } else if rec.zero("Omega", &pb.omega_cap)? {
        Ok(if rec.zero("L", &pb.l)? {
            Verdict::Theorem5
        } else {
            Verdict::IntermediateOther
        })
    } else {
        Ok(Verdict::IntermediateOther)
    }
}

fn first_case_family(i1: f64, tol: f64, out: &mut Classification) -> Verdict {
    let t = if close(i1, 0.6, tol) {
        FamilyType::I
    } else if close(i1, -0.9, tol) {
        FamilyType::II
    } else if close(i1, -2.4, tol) {
        FamilyType::III
    } else if i1.abs() > tol {
        out.params.insert("C".into(), 15.0 / (5.0 * i1 - 3.0));
        FamilyType::IV
    } else {
        return Verdict::IntermediateOther;
    };
    Verdict::FirstCaseFamily(t)
}

fn general(eng: &InvariantEngine, probe: &Probe, tol: f64, out: &mut Classification) -> Result<Verdict, ProbeError> {
    let mut rec = Recorder { eng, probe, out };
    let mut vals = Vec::new();
    for (name, e) in eng.general_invariants() {
        vals.push(rec.value(name, &e)?);
    }
    let [Some(i3), Some(i6), Some(i7), Some(i8)] = vals[..] else {
        return Ok(Verdict::GeneralNonConstant);
    };
    if close(i6, 0.0, tol) && close(i8, 0.0, tol) && i3.abs() > tol && close(i7, 9.0 / i3, tol) {
        out.params.insert("k".into(), i3);
        return Ok(Verdict::Theorem6);
    }
    match extract_theorem7(i3, i6, i7, i8, tol) {
        Ok(t7) => {
            for (k, v) in t7.named() {
                out.params.insert(k.into(), v);
            }
            out.relations.insert("relation_c7".into(), t7.relation_c7);
            out.relations.insert("relation_c3".into(), t7.relation_c3);
            out.relations.insert("relation_nab".into(), t7.relation_nab);
            Ok(Verdict::Theorem7)
        }
        Err(e) => {
            out.branch_notes.push(format!("general case: {e}"));
            Ok(Verdict::GeneralOther)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    #[test]
    fn theorem3_extraction() {
        let c = extract_theorem3(3.6, 1.0 / 15.0, DEFAULT_TOL).unwrap();
        assert!((c - 1.0).abs() < 1e-12);
        let c = extract_theorem3(-1.2, 5.0 / 3.0, DEFAULT_TOL).unwrap();
        assert!((c + 5.0 / 3.0).abs() < 1e-12);
        assert_eq!(extract_theorem3(3.6, 0.2, DEFAULT_TOL), None);
        assert_eq!(extract_theorem3(0.6, 1.0 / 15.0, DEFAULT_TOL), None);
    }

    #[test]
    fn theorem4_extraction() {
        assert_eq!(extract_theorem4(3.6, 0.05, -0.3, DEFAULT_TOL), Some(0.05));
        assert_eq!(extract_theorem4(3.6, 0.5, -3.6, DEFAULT_TOL), Some(0.5));
        assert_eq!(extract_theorem4(3.6, 0.0, 1.0 / 15.0, DEFAULT_TOL), None);
    }

    #[test]
    fn theorem7_extraction_from_closed_forms() {
        let r5 = |t: f64| t.powf(0.2);
        let (i3, i6, i7, i8) = (
            -37.0 * r5(54.0) / 18.0,
            r5(648.0) / 9.0,
            -55.0 * r5(144.0) / 18.0,
            25.0 * r5(54.0) / 18.0,
        );
        let t = extract_theorem7(i3, i6, i7, i8, DEFAULT_TOL).unwrap();
        let s3 = 3f64.sqrt();
        assert!((t.n - 16.0 * s3 / 3.0).abs() < 1e-9);
        assert!((t.a - 1.0 / 6.0).abs() < 1e-9);
        assert!((t.b - s3 / 3.0).abs() < 1e-9);
        assert!((t.c + 8.0 * s3 / 3.0).abs() < 1e-9);
        assert!(t.d.abs() < 1e-9);
        assert!((t.k - 16.0).abs() < 1e-9);
        assert!((t.m + 256.0 / 3.0).abs() < 1e-9);
        assert!(t.relation_nab.abs() < 1e-9);
        assert_eq!(
            extract_theorem7(i3, -i6, i7, i8, DEFAULT_TOL).unwrap_err(),
            Theorem7Error::NoMatch("I7 relation fails")
        );
    }

    #[test]
    fn verdict_names_round_trip() {
        for v in Verdict::CLASSES.into_iter().chain([
            Verdict::FirstCaseFamily(FamilyType::III),
            Verdict::IntermediateOther,
            Verdict::GeneralOther,
            Verdict::GeneralNonConstant,
        ]) {
            assert_eq!(v.to_string().parse::<Verdict>().unwrap(), v);
        }
    }

    #[test]
    fn generators_of_exponential_model_are_x_free() {
        let probe = Probe::default();
        let m = model_equation(Verdict::Theorem2, &BTreeMap::new()).unwrap();
        assert!(m.ode.is_autonomous(&probe).unwrap());
        for (xi, eta) in &m.generators {
            assert!(probe.is_identically_zero(&symmetry_condition(&m.ode, xi, eta)).unwrap());
        }
        let not_sym = symmetry_condition(&m.ode, &Expr::zero(), &Expr::one());
        assert!(!probe.is_identically_zero(&not_sym).unwrap());
    }

    #[test]
    fn simple_verdicts() {
        let probe = Probe::default();
        let c = |s: &str| classify(&OdeCubic::from_force(parse(s).unwrap()), &probe).unwrap();
        assert_eq!(c("0").verdict, Verdict::Linearizable);
        assert_eq!(c("x*y + exp(x)").verdict, Verdict::Linearizable);
        assert_eq!(c("exp(y)").verdict, Verdict::Theorem2);
        assert_eq!(c("y^2/2").verdict, Verdict::Theorem5);
        assert_eq!(c("y^(-3)").verdict, Verdict::Theorem1);
        let t3 = c("y^3");
        assert_eq!(t3.verdict, Verdict::Theorem3);
        assert!((t3.param("c").unwrap() - 1.0).abs() < 1e-9);
        assert_eq!(t3.algebra_dim, Some(2));
        assert_eq!(c("-ln(y)").verdict, Verdict::FirstCaseFamily(FamilyType::II));
        assert_eq!(c("y*(ln(y) - 1)").verdict, Verdict::FirstCaseFamily(FamilyType::III));
    }
}
