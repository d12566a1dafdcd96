//! Relative invariants, pseudoinvariants and absolute invariants of
//! `y'' = P + 3Q y' + 3R y'^2 + S y'^3`.
//!
//! Everything here only builds expressions; deciding whether they vanish or
//! are constant is left to a [`Probe`].
//!
//! Several pseudoinvariants have two formulas, one dividing by `A` and one by
//! `B`. At four places the printed formulas admit two readings (see
//! [`TypoSite`]); both are available, and [`InvariantEngine::select`] picks
//! one by cross-branch agreement where that is testable.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::expr::{Derivatives, Expr, Probe, ProbeError};
use crate::ode::OdeCubic;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InvariantError {
    #[error("A and B both vanish identically; pseudoinvariants are undefined")]
    BothDegenerate,
    #[error(transparent)]
    Probe(#[from] ProbeError),
}

/// `A`, `B`, the field `β = (G, H)` and `F⁵ = (AG + BH)/3`.
#[derive(Debug, Clone)]
pub struct RelativeInvariants {
    pub a: Expr,
    pub b: Expr,
    pub g: Expr,
    pub h: Expr,
    pub f5: Expr,
    /// Real fifth root of `f5`.
    pub f: Expr,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Branch {
    /// Formulas dividing by `A`.
    A,
    /// Formulas dividing by `B`.
    B,
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Branch::A => "A",
            Branch::B => "B",
        })
    }
}

/// Terms whose printed form is suspect.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum TypoSite {
    /// `Λ`, `A` branch: `6N(BP + B₁₀)` printed, `6N(BP + A₁₀)` amended.
    LambdaA,
    /// `Ω`, `B` branch: sign of the `(2A₀₁ − 3AR)B₀₁/B²` term.
    OmegaB,
    /// `ω₁`, `B` branch: sign of the `3ARB₀₁` term.
    Omega1B,
    /// `γ¹`, `B` branch: `AN − B₀₁` printed, `AS − B₀₁` amended.
    Gamma1B,
    /// `L`, both branches: sign of the derivative bracket in `θ`.
    L,
}

impl TypoSite {
    pub const ALL: [TypoSite; 5] = [
        TypoSite::LambdaA,
        TypoSite::OmegaB,
        TypoSite::Omega1B,
        TypoSite::Gamma1B,
        TypoSite::L,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TypoSite::LambdaA => "Lambda/A",
            TypoSite::OmegaB => "Omega/B",
            TypoSite::Omega1B => "omega1/B",
            TypoSite::Gamma1B => "gamma1/B",
            TypoSite::L => "L",
        }
    }

    pub fn branch(self) -> Branch {
        match self {
            TypoSite::LambdaA | TypoSite::L => Branch::A,
            _ => Branch::B,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Reading {
    Printed,
    Amended,
}

/// One reading per typo site.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Readings {
    pub lambda_a: Reading,
    pub omega_b: Reading,
    pub omega1_b: Reading,
    pub gamma1_b: Reading,
    pub l: Reading,
}

impl Default for Readings {
    fn default() -> Readings {
        Readings::all(Reading::Amended)
    }
}

impl Readings {
    pub fn all(r: Reading) -> Readings {
        Readings {
            lambda_a: r,
            omega_b: r,
            omega1_b: r,
            gamma1_b: r,
            l: r,
        }
    }

    pub fn get(&self, site: TypoSite) -> Reading {
        match site {
            TypoSite::LambdaA => self.lambda_a,
            TypoSite::OmegaB => self.omega_b,
            TypoSite::Omega1B => self.omega1_b,
            TypoSite::Gamma1B => self.gamma1_b,
            TypoSite::L => self.l,
        }
    }

    pub fn with(mut self, site: TypoSite, r: Reading) -> Readings {
        match site {
            TypoSite::LambdaA => self.lambda_a = r,
            TypoSite::OmegaB => self.omega_b = r,
            TypoSite::Omega1B => self.omega1_b = r,
            TypoSite::Gamma1B => self.gamma1_b = r,
            TypoSite::L => self.l = r,
        }
        self
    }
}

/// Pseudoinvariants from one branch.
#[derive(Debug, Clone)]
pub struct PseudoBundle {
    pub branch: Branch,
    pub readings: Readings,
    pub n: Expr,
    pub m: Expr,
    pub omega_cap: Expr,
    pub lambda: Expr,
    pub k: Expr,
    pub l: Expr,
    pub phi: (Expr, Expr),
    pub omega: (Expr, Expr),
    pub gamma: (Expr, Expr),
    pub gamma_cap: Expr,
    pub theta_cap: Expr,
    pub theta: (Expr, Expr),
}

impl PseudoBundle {
    /// `I₁ = M/N²`, `I₂ = Ω²/N`, `I₃ = Γ/M`.
    pub fn first_case(&self) -> [(&'static str, Expr); 3] {
        [
            ("I1", &self.m / Expr::powi(self.n.clone(), 2)),
            ("I2", Expr::powi(self.omega_cap.clone(), 2) / &self.n),
            ("I3", &self.gamma_cap / &self.m),
        ]
    }
}

/// Result of the branch/reading selection.
#[derive(Debug, Clone)]
pub struct Selection {
    pub bundle: PseudoBundle,
    pub notes: Vec<String>,
}

fn q(n: i64, d: i64) -> Expr {
    Expr::rat(n, d)
}

fn sq(e: &Expr) -> Expr {
    Expr::powi(e.clone(), 2)
}

fn cube(e: &Expr) -> Expr {
    Expr::powi(e.clone(), 3)
}

/// Builds invariant expressions for one equation, sharing a derivative cache.
pub struct InvariantEngine {
    ode: OdeCubic,
    d: Derivatives,
    rel: RelativeInvariants,
}

impl InvariantEngine {
    pub fn new(ode: &OdeCubic) -> InvariantEngine {
        let d = Derivatives::new();
        let rel = relative_invariants_with(ode, &d);
        InvariantEngine {
            ode: ode.clone(),
            d,
            rel,
        }
    }

    pub fn ode(&self) -> &OdeCubic {
        &self.ode
    }

    pub fn relative(&self) -> &RelativeInvariants {
        &self.rel
    }

    pub fn derivatives(&self) -> &Derivatives {
        &self.d
    }

    fn pd(&self, e: &Expr, i: usize, j: usize) -> Expr {
        self.d.partial(e, i, j)
    }

    /// All pseudoinvariants from the given branch.
    pub fn pseudo(&self, branch: Branch, readings: Readings) -> PseudoBundle {
        match branch {
            Branch::A => self.pseudo_a(readings),
            Branch::B => self.pseudo_b(readings),
        }
    }

    fn pseudo_a(&self, readings: Readings) -> PseudoBundle {
        let OdeCubic { p, q: qq, r, s: _ } = &self.ode;
        let RelativeInvariants { a, b, h, .. } = &self.rel;
        let d = |e: &Expr, i, j| self.pd(e, i, j);
        let (a10, a01, b10, b01) = (d(a, 1, 0), d(a, 0, 1), d(b, 1, 0), d(b, 0, 1));
        let bp_a10 = b * p + &a10;

        let n = -(h / (Expr::int(3) * a));
        let (n10, n01) = (d(&n, 1, 0), d(&n, 0, 1));
        let m = -(Expr::int(12) * b * &n * &bp_a10) / (Expr::int(5) * a)
            + b * &n10
            + q(24, 5) * b * &n * qq
            + q(6, 5) * &n * &b10
            + q(6, 5) * &n * &a01
            - a * &n01
            - q(12, 5) * a * &n * r;
        let omega_cap = Expr::int(2) * b * &a10 * &bp_a10 / cube(a)
            - (Expr::int(2) * &b10 + Expr::int(3) * b * qq) * &a10 / sq(a)
            + (&a01 - Expr::int(2) * &b10) * b * p / sq(a)
            + d(b, 2, 0) / a
            - (b * d(a, 2, 0) + sq(b) * d(p, 1, 0)) / sq(a)
            + (Expr::int(3) * &b10 * qq + Expr::int(3) * b * d(qq, 1, 0) - &b01 * p - b * d(p, 0, 1)) / a
            + d(qq, 0, 1)
            - Expr::int(2) * d(r, 1, 0);
        let lambda_inner = match readings.lambda_a {
            Reading::Printed => b * p + &b10,
            Reading::Amended => bp_a10.clone(),
        };
        let lambda = Expr::int(6) * &n * lambda_inner / (Expr::int(5) * sq(a))
            - &n10 / a
            - Expr::int(6) * &n * qq / (Expr::int(5) * a)
            - Expr::int(2) * &omega_cap;
        let w1 = Expr::int(12) * p * r / (Expr::int(5) * a) - q(54, 25) * sq(qq) / a - d(p, 0, 1) / a
            + Expr::int(6) * d(qq, 1, 0) / (Expr::int(5) * a)
            - (p * &a01 + b * d(p, 1, 0) + d(a, 2, 0)) / (Expr::int(5) * sq(a))
            - Expr::int(2) * &b10 * p / (Expr::int(5) * sq(a))
            + (Expr::int(3) * qq * &a10 - Expr::int(12) * p * b * qq) / (Expr::int(25) * sq(a))
            + (Expr::int(6) * sq(b) * sq(p) + Expr::int(12) * &a10 * b * p + Expr::int(6) * sq(&a10))
                / (Expr::int(25) * cube(a));
        let w2 = (Expr::int(6) * &lambda + Expr::int(3) * &omega_cap) / (Expr::int(5) * a)
            + (Expr::int(-5) * b * d(p, 0, 1) + Expr::int(6) * b * d(qq, 1, 0) + Expr::int(12) * r * b * p)
                / (Expr::int(5) * sq(a))
            - q(54, 25) * b * sq(qq) / sq(a)
            - (Expr::int(12) * sq(b) * p * qq - Expr::int(3) * b * qq * &a10) / (Expr::int(25) * cube(a))
            - (Expr::int(2) * b * &b10 * p + b * &a01 * p + sq(b) * d(p, 1, 0) + b * d(a, 2, 0))
                / (Expr::int(5) * cube(a))
            + (Expr::int(6) * b * sq(&a10) + Expr::int(6) * cube(b) * sq(p) + Expr::int(12) * sq(b) * &a10 * p)
                / (Expr::int(25) * Expr::powi(a.clone(), 4));
        let phi1 = Expr::int(-3) * &bp_a10 / (Expr::int(5) * a) + q(3, 5) * qq;
        let phi2 = Expr::int(3) * b * &bp_a10 / (Expr::int(5) * sq(a))
            - Expr::int(3) * (&b10 + &a01 + Expr::int(3) * b * qq) / (Expr::int(5) * a)
            + q(6, 5) * r;
        let k = (d(&lambda, 1, 0) + &lambda * &phi1) / a
            + (d(&omega_cap, 1, 0) + &omega_cap * &phi1) / (Expr::int(3) * a)
            + &n * &w1 / a;
        let g1 = Expr::int(-6) * b * &n * &bp_a10 / (Expr::int(5) * sq(a))
            + Expr::int(18) * &n * b * qq / (Expr::int(5) * a)
            + Expr::int(6) * &n * (&b10 + &a01) / (Expr::int(5) * a)
            - &n01
            - q(12, 5) * &n * r
            - Expr::int(2) * &omega_cap * b;
        let g2 = Expr::int(-6) * &n * &bp_a10 / (Expr::int(5) * a)
            + &n10
            + q(6, 5) * &n * qq
            + Expr::int(2) * &omega_cap * a;
        let theta_cap = &w1 / a;
        self.finish(
            Branch::A,
            readings,
            n,
            m,
            omega_cap,
            lambda,
            k,
            (phi1, phi2),
            (w1, w2),
            (g1, g2),
            theta_cap,
        )
    }

    fn pseudo_b(&self, readings: Readings) -> PseudoBundle {
        let OdeCubic { p: _, q: qq, r, s } = &self.ode;
        let RelativeInvariants { a, b, g, .. } = &self.rel;
        let d = |e: &Expr, i, j| self.pd(e, i, j);
        let (a10, a01, b10, b01) = (d(a, 1, 0), d(a, 0, 1), d(b, 1, 0), d(b, 0, 1));
        let as_b01 = a * s - &b01;

        let n = g / (Expr::int(3) * b);
        let (n10, n01) = (d(&n, 1, 0), d(&n, 0, 1));
        let m = -(Expr::int(12) * a * &n * &as_b01) / (Expr::int(5) * b) - a * &n01 + q(24, 5) * a * &n * r
            - q(6, 5) * &n * &a01
            - q(6, 5) * &n * &b10
            + b * &n10
            - q(12, 5) * b * &n * qq;
        let second = (Expr::int(2) * &a01 - Expr::int(3) * a * r) * &b01 / sq(b);
        let second = match readings.omega_b {
            Reading::Printed => -second,
            Reading::Amended => second,
        };
        let omega_cap =
            Expr::int(2) * a * &b01 * &as_b01 / cube(b) + second + (&b10 - Expr::int(2) * &a01) * a * s / sq(b)
                - d(a, 0, 2) / b
                + (a * d(b, 0, 2) - sq(a) * d(s, 0, 1)) / sq(b)
                + (Expr::int(3) * &a01 * r + Expr::int(3) * a * d(r, 0, 1) - &a10 * s - a * d(s, 1, 0)) / b
                + d(r, 1, 0)
                - Expr::int(2) * d(qq, 0, 1);
        let lambda = Expr::int(-6) * &n * &as_b01 / (Expr::int(5) * sq(b)) - &n01 / b
            + Expr::int(6) * &n * r / (Expr::int(5) * b)
            - Expr::int(2) * &omega_cap;
        let arb = Expr::int(3) * a * r * &b01;
        let w1_typo = match readings.omega1_b {
            Reading::Printed => Expr::int(12) * sq(a) * s * r - arb,
            Reading::Amended => Expr::int(12) * sq(a) * s * r + arb,
        };
        let w1 = -((Expr::int(6) * &lambda + Expr::int(3) * &omega_cap) / (Expr::int(5) * b))
            + (Expr::int(5) * a * d(s, 1, 0) - Expr::int(6) * a * d(r, 0, 1) + Expr::int(12) * qq * a * s)
                / (Expr::int(5) * sq(b))
            - q(54, 25) * a * sq(r) / sq(b)
            - w1_typo / (Expr::int(25) * cube(b))
            + (Expr::int(2) * a * &a01 * s + a * &b10 * s + sq(a) * d(s, 0, 1) - a * d(b, 0, 2))
                / (Expr::int(5) * cube(b))
            + (Expr::int(6) * a * sq(&b01) + Expr::int(6) * cube(a) * sq(s) - Expr::int(12) * sq(a) * &b01 * s)
                / (Expr::int(25) * Expr::powi(b.clone(), 4));
        let w2 = Expr::int(12) * s * qq / (Expr::int(5) * b) - q(54, 25) * sq(r) / b + d(s, 1, 0) / b
            - Expr::int(6) * d(r, 0, 1) / (Expr::int(5) * b)
            + (s * &b10 + a * d(s, 0, 1) - d(b, 0, 2)) / (Expr::int(5) * sq(b))
            + Expr::int(2) * &a01 * s / (Expr::int(5) * sq(b))
            - (Expr::int(3) * r * &b01 + Expr::int(12) * s * a * r) / (Expr::int(25) * sq(b))
            + (Expr::int(6) * sq(a) * sq(s) - Expr::int(12) * &b01 * a * s + Expr::int(6) * sq(&b01))
                / (Expr::int(25) * cube(b));
        let phi1 = Expr::int(-3) * a * &as_b01 / (Expr::int(5) * sq(b))
            - Expr::int(3) * (&a01 + &b10 - Expr::int(3) * a * r) / (Expr::int(5) * b)
            - q(6, 5) * qq;
        let phi2 = Expr::int(3) * &as_b01 / (Expr::int(5) * b) - q(3, 5) * r;
        let k = (d(&lambda, 0, 1) + &lambda * &phi2) / b
            + (d(&omega_cap, 0, 1) + &omega_cap * &phi2) / (Expr::int(3) * b)
            + &n * &w2 / b;
        let g1_inner = match readings.gamma1_b {
            Reading::Printed => a * &n - &b01,
            Reading::Amended => as_b01.clone(),
        };
        let g1 = Expr::int(-6) * &n * g1_inner / (Expr::int(5) * b) - &n01 + q(6, 5) * &n * r
            - Expr::int(2) * &omega_cap * b;
        let g2 = Expr::int(-6) * a * &n * &as_b01 / (Expr::int(5) * sq(b))
            + Expr::int(18) * &n * a * r / (Expr::int(5) * b)
            - Expr::int(6) * &n * (&a01 + &b10) / (Expr::int(5) * b)
            + &n10
            - q(12, 5) * &n * qq
            + Expr::int(2) * &omega_cap * a;
        let theta_cap = &w2 / b;
        self.finish(
            Branch::B,
            readings,
            n,
            m,
            omega_cap,
            lambda,
            k,
            (phi1, phi2),
            (w1, w2),
            (g1, g2),
            theta_cap,
        )
    }

    #[allow(clippy::too_many_arguments)]
    fn finish(
        &self,
        branch: Branch,
        readings: Readings,
        n: Expr,
        m: Expr,
        omega_cap: Expr,
        lambda: Expr,
        k: Expr,
        phi: (Expr, Expr),
        omega: (Expr, Expr),
        gamma: (Expr, Expr),
        theta_cap: Expr,
    ) -> PseudoBundle {
        let d = |e: &Expr, i, j| self.pd(e, i, j);
        let gamma_cap = self.field_cubic(&gamma.0, &gamma.1, 1) / &m;
        let theta1 = d(&theta_cap, 0, 1) - Expr::int(2) * &phi.1 * &theta_cap;
        let theta2 = -d(&theta_cap, 1, 0) + Expr::int(2) * &phi.0 * &theta_cap;
        let l = match readings.l {
            Reading::Printed => self.field_cubic(&theta1, &theta2, -1),
            Reading::Amended => -self.field_cubic(&theta1, &theta2, 1),
        } - sq(&theta_cap) / Expr::int(2);
        PseudoBundle {
            branch,
            readings,
            n,
            m,
            omega_cap,
            lambda,
            k,
            l,
            phi,
            omega,
            gamma,
            gamma_cap,
            theta_cap,
            theta: (theta1, theta2),
        }
    }

    /// `v¹v²(v¹₁₀ − v²₀₁) + (v²)²v¹₀₁ − (v¹)²v²₁₀ ± (P(v¹)³ + 3Q(v¹)²v² + 3Rv¹(v²)² + S(v²)³)`.
    fn field_cubic(&self, v1: &Expr, v2: &Expr, sign: i64) -> Expr {
        let d = |e: &Expr, i, j| self.pd(e, i, j);
        let OdeCubic { p, q: qq, r, s } = &self.ode;
        let bracket = v1 * v2 * (d(v1, 1, 0) - d(v2, 0, 1)) + sq(v2) * d(v1, 0, 1) - sq(v1) * d(v2, 1, 0);
        let cubic = p * cube(v1) + Expr::int(3) * qq * sq(v1) * v2 + Expr::int(3) * r * v1 * sq(v2) + s * cube(v2);
        if sign > 0 {
            bracket + cubic
        } else {
            bracket - cubic
        }
    }

    /// Chooses a branch and typo readings.
    ///
    /// The `A` branch is used whenever `A ≢ 0`. When `B ≢ 0` as well and
    /// `F ≡ 0`, each suspect term is resolved by comparing the two branches;
    /// otherwise amended readings are used.
    pub fn select(&self, probe: &Probe) -> Result<Selection, InvariantError> {
        let a_zero = probe.is_identically_zero(&self.rel.a)?;
        let b_zero = probe.is_identically_zero(&self.rel.b)?;
        let mut notes = Vec::new();
        if a_zero && b_zero {
            return Err(InvariantError::BothDegenerate);
        }
        if a_zero {
            notes.push("branch B (A ≡ 0); B-branch suspect terms carry a factor of A and vanish".into());
            return Ok(Selection {
                bundle: self.pseudo(Branch::B, Readings::default()),
                notes,
            });
        }
        if b_zero || !probe.is_identically_zero(&self.rel.f5)? {
            let why = if b_zero { "B ≡ 0" } else { "F ≢ 0" };
            notes.push(format!(
                "branch A; {why}, cross-branch check unavailable; amended readings used"
            ));
            return Ok(Selection {
                bundle: self.pseudo(Branch::A, Readings::default()),
                notes,
            });
        }

        notes.push("branch A; both A and B nonzero, readings resolved by cross-branch agreement".into());
        let amended = Readings::default();
        let a_am = self.pseudo(Branch::A, amended);
        let b_am = self.pseudo(Branch::B, amended);
        let m_zero = probe.is_identically_zero(&a_am.m)?;
        let mut readings = amended;
        for site in TypoSite::ALL {
            let testable = match site {
                TypoSite::OmegaB => true,
                TypoSite::LambdaA | TypoSite::Omega1B => m_zero,
                TypoSite::Gamma1B | TypoSite::L => false,
            };
            if !testable {
                notes.push(format!("{}: not testable here, amended reading", site.name()));
                continue;
            }
            let pick = |bundle: &PseudoBundle| -> Expr {
                match site {
                    TypoSite::LambdaA => bundle.lambda.clone(),
                    TypoSite::OmegaB => bundle.omega_cap.clone(),
                    TypoSite::Omega1B => bundle.omega.0.clone(),
                    TypoSite::Gamma1B => bundle.gamma.0.clone(),
                    TypoSite::L => bundle.l.clone(),
                }
            };
            let mut agree = Vec::new();
            for reading in [Reading::Amended, Reading::Printed] {
                let alt = self.pseudo(site.branch(), amended.with(site, reading));
                let other = if site.branch() == Branch::A { &b_am } else { &a_am };
                if probe.is_identically_zero(&(pick(&alt) - pick(other)))? {
                    agree.push(reading);
                }
            }
            let (chosen, how) = match agree[..] {
                [r] => (r, "selected by agreement"),
                [] => (Reading::Amended, "no reading agrees, amended used"),
                _ => (Reading::Amended, "both readings agree, amended used"),
            };
            let label = match chosen {
                Reading::Printed => "printed",
                Reading::Amended => "amended",
            };
            notes.push(format!("{}: {label} reading, {how}", site.name()));
            readings = readings.with(site, chosen);
        }
        Ok(Selection {
            bundle: self.pseudo(Branch::A, readings),
            notes,
        })
    }

    /// Cross-branch comparison of `N`, `M`, `Ω` (amended readings). Returns
    /// `None` unless `A ≢ 0`, `B ≢ 0` and `F ≡ 0`.
    pub fn branch_agreement(&self, probe: &Probe) -> Result<Option<[(&'static str, bool); 3]>, ProbeError> {
        if probe.is_identically_zero(&self.rel.a)?
            || probe.is_identically_zero(&self.rel.b)?
            || !probe.is_identically_zero(&self.rel.f5)?
        {
            return Ok(None);
        }
        let x = self.pseudo(Branch::A, Readings::default());
        let y = self.pseudo(Branch::B, Readings::default());
        Ok(Some([
            ("N", probe.is_identically_zero(&(&x.n - &y.n))?),
            ("M", probe.is_identically_zero(&(&x.m - &y.m))?),
            ("Omega", probe.is_identically_zero(&(&x.omega_cap - &y.omega_cap))?),
        ]))
    }

    /// `I₃, I₆, I₇, I₈` of the general case, with `F = root5(F⁵)`.
    pub fn general_invariants(&self) -> [(&'static str, Expr); 4] {
        let OdeCubic { p, q: qq, r, s } = &self.ode;
        let RelativeInvariants { a, b, g, h, f, .. } = &self.rel;
        let d = |e: &Expr, i, j| self.pd(e, i, j);
        let fp = |k: i64| Expr::int(3) * Expr::powi(f.clone(), k);
        let (f10, f01) = (d(f, 1, 0), d(f, 0, 1));
        let (g10, g01, h10, h01) = (d(g, 1, 0), d(g, 0, 1), d(h, 1, 0), d(h, 0, 1));
        let (a10, a01, b10, b01) = (d(a, 1, 0), d(a, 0, 1), d(b, 1, 0), d(b, 0, 1));
        let two = || Expr::int(2);

        let hf_gf = h * &f01 + g * &f10;
        let tail9 = b * sq(g) * p / fp(9) - (a * sq(g) - two() * h * b * g) * qq / fp(9)
            + (b * sq(h) - two() * h * a * g) * r / fp(9)
            - a * sq(h) * s / fp(9);

        let i3 = b * (h * &g10 - g * &h10) / fp(9) - a * (h * &g01 - g * &h01) / fp(9) + &hf_gf / fp(5) + &tail9;
        let i6 = h * (a * &b01 - b * &a01) / fp(7) + g * (a * &b10 - b * &a10) / fp(7)
            - (a * &f01 - b * &f10) / fp(3)
            - g * sq(b) * p / fp(7)
            - (h * sq(b) - two() * g * b * a) * qq / fp(7)
            - (g * sq(a) - two() * h * b * a) * r / fp(7)
            - h * sq(a) * s / fp(7);
        let i7 = (g * h * &g10 - sq(g) * &h10 + sq(h) * &g01 - h * g * &h01
            + cube(g) * p
            + Expr::int(3) * sq(g) * h * qq
            + Expr::int(3) * g * sq(h) * r
            + cube(h) * s)
            / fp(11);
        let i8 = g * (a * &g10 + b * &h10) / fp(9) + h * (a * &g01 + b * &h01) / fp(9)
            - Expr::int(10) * &hf_gf / fp(5)
            - tail9;
        [("I3", i3), ("I6", i6), ("I7", i7), ("I8", i8)]
    }
}

/// `A`, `B`, `G`, `H`, `F⁵` and `F` of an equation.
pub fn relative_invariants(ode: &OdeCubic) -> RelativeInvariants {
    relative_invariants_with(ode, &Derivatives::new())
}

fn relative_invariants_with(ode: &OdeCubic, dv: &Derivatives) -> RelativeInvariants {
    let OdeCubic { p, q: qq, r, s } = ode;
    let d = |e: &Expr, i, j| dv.partial(e, i, j);
    let c = Expr::int;
    let a = d(p, 0, 2) - c(2) * d(qq, 1, 1) + d(r, 2, 0) + c(2) * p * d(s, 1, 0) + s * d(p, 1, 0)
        - c(3) * p * d(r, 0, 1)
        - c(3) * r * d(p, 0, 1)
        - c(3) * qq * d(r, 1, 0)
        + c(6) * qq * d(qq, 0, 1);
    let b = d(s, 2, 0) - c(2) * d(r, 1, 1) + d(qq, 0, 2) - c(2) * s * d(p, 0, 1) - p * d(s, 0, 1)
        + c(3) * s * d(qq, 1, 0)
        + c(3) * qq * d(s, 1, 0)
        + c(3) * r * d(qq, 0, 1)
        - c(6) * r * d(r, 1, 0);
    let (a10, a01, b10, b01) = (d(&a, 1, 0), d(&a, 0, 1), d(&b, 1, 0), d(&b, 0, 1));
    let g = -(&b * &b10) - c(3) * &a * &b01 + c(4) * &b * &a01 + c(3) * s * sq(&a) - c(6) * r * &b * &a
        + c(3) * qq * sq(&b);
    let h = -(&a * &a01) - c(3) * &b * &a10 + c(4) * &a * &b10 - c(3) * p * sq(&b) + c(6) * qq * &a * &b
        - c(3) * r * sq(&a);
    let f5 = (&a * &g + &b * &h) / c(3);
    let f = Expr::root5(f5.clone());
    RelativeInvariants { a, b, g, h, f5, f }
}

impl RelativeInvariants {
    pub fn items(&self) -> [(&'static str, &Expr); 5] {
        [
            ("A", &self.a),
            ("B", &self.b),
            ("G", &self.g),
            ("H", &self.h),
            ("F5", &self.f5),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn force(s: &str) -> OdeCubic {
        OdeCubic::from_force(parse(s).unwrap())
    }

    fn probe() -> Probe {
        Probe::default()
    }

    fn zero(e: &Expr) -> bool {
        probe().is_identically_zero(e).unwrap()
    }

    fn val(e: &Expr) -> f64 {
        probe().constant_value(e).unwrap().expect("constant")
    }

    fn eq_expr(e: &Expr, s: &str) -> bool {
        zero(&(e - parse(s).unwrap()))
    }

    #[test]
    fn relative_invariants_of_simple_forces() {
        let rel = relative_invariants(&OdeCubic::from_force(Expr::zero()));
        for (_, e) in rel.items() {
            assert!(zero(e));
        }
        let rel = relative_invariants(&force("6*y^2"));
        assert!(eq_expr(&rel.a, "12") && zero(&rel.b) && zero(&rel.g) && zero(&rel.h) && zero(&rel.f5));
        let rel = relative_invariants(&force("exp(y)"));
        assert!(eq_expr(&rel.a, "exp(y)") && eq_expr(&rel.h, "-exp(2*y)") && zero(&rel.f5));
    }

    #[test]
    fn b_vanishes_for_first_kamke_example() {
        let ode = OdeCubic::new(
            parse("y^3").unwrap(),
            parse("-y/3").unwrap(),
            Expr::zero(),
            Expr::zero(),
        );
        assert!(zero(&relative_invariants(&ode).b));
    }

    #[test]
    fn first_case_chain_for_cubic_force() {
        let eng = InvariantEngine::new(&force("y^3"));
        let pb = eng.pseudo(Branch::A, Readings::default());
        assert!((val(&pb.n) - 2.0).abs() < 1e-9);
        assert!((val(&pb.m) - 72.0 / 5.0).abs() < 1e-9);
        assert!(zero(&pb.omega_cap));
        assert!(zero(&pb.phi.0));
        assert!(eq_expr(&pb.gamma.0, "12/(5*y)") && zero(&pb.gamma.1));
        assert!((val(&pb.gamma_cap) - 24.0 / 25.0).abs() < 1e-9);
        let [(_, i1), _, (_, i3)] = pb.first_case();
        assert!((val(&i1) - 3.6).abs() < 1e-9);
        assert!((val(&i3) - 1.0 / 15.0).abs() < 1e-9);
    }

    #[test]
    fn exponential_force() {
        let eng = InvariantEngine::new(&force("exp(y)"));
        let pb = eng.pseudo(Branch::A, Readings::default());
        assert!(eq_expr(&pb.n, "exp(y)/3"));
        assert!(eq_expr(&pb.m, "exp(2*y)/15"));
        assert!(eq_expr(&pb.phi.1, "-3/5"));
        assert!(eq_expr(&pb.gamma.0, "exp(y)/15"));
        assert!(eq_expr(&pb.gamma_cap, "exp(2*y)/225"));
    }

    #[test]
    fn seventh_case_l() {
        let eng = InvariantEngine::new(&force("y^2/2"));
        let pb = eng.pseudo(Branch::A, Readings::default());
        assert!(zero(&pb.n) && zero(&pb.omega_cap) && zero(&pb.l));
        let eng = InvariantEngine::new(&force("y^2/2 + 1"));
        assert!((val(&eng.pseudo(Branch::A, Readings::default()).l) - 1.0).abs() < 1e-9);
        let eng = InvariantEngine::new(&force("y^2/2 + x*y + x^2/2"));
        assert!(zero(&eng.pseudo(Branch::A, Readings::default()).l));
    }

    #[test]
    fn l_reduces_to_s_t_form() {
        // y'' = y^2/2 + s y + t has L = s'' - s^2/2 + t.
        let eng = InvariantEngine::new(&force("y^2/2 - x^2*y + x^4/2 + 2"));
        assert!(zero(&eng.pseudo(Branch::A, Readings::default()).l));
        let printed = eng.pseudo(Branch::A, Readings::default().with(TypoSite::L, Reading::Printed));
        assert!((val(&printed.l) - 4.0).abs() < 1e-9);
        let eng = InvariantEngine::new(&force("y^2/2 + x^3*y"));
        assert!(eq_expr(&eng.pseudo(Branch::A, Readings::default()).l, "6*x - x^6/2"));
    }

    #[test]
    fn k_of_inverse_cube() {
        let eng = InvariantEngine::new(&force("y^(-3)"));
        let pb = eng.pseudo(Branch::A, Readings::default());
        assert!(zero(&pb.m) && zero(&pb.omega_cap) && zero(&pb.lambda));
        assert!((val(&pb.k) + 5.0 / 9.0).abs() < 1e-9);
    }

    #[test]
    fn definitional_identities() {
        let ode = OdeCubic::new(
            parse("x*y").unwrap(),
            parse("exp(x) - y").unwrap(),
            parse("y^2/x").unwrap(),
            parse("ln(y) + 1").unwrap(),
        );
        let rel = relative_invariants(&ode);
        assert!(zero(&(Expr::int(3) * &rel.f5 - (&rel.a * &rel.g + &rel.b * &rel.h))));
        assert!(zero(&(Expr::powi(rel.f.clone(), 5) - &rel.f5)));
    }
}
