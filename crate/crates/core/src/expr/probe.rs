use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::eval::Sample;
use super::{Bindings, Derivatives, EvalError, Expr, Program, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProbeError {
    #[error("no valid sample point found after {attempts} attempts")]
    Exhausted { attempts: usize },
    #[error("parameter `{0}` is not bound")]
    UnboundParameter(String),
}

/// Closed rectangle `[x0, x1] × [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleBox {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Default for SampleBox {
    fn default() -> SampleBox {
        SampleBox {
            x0: 0.3,
            x1: 2.7,
            y0: 0.3,
            y1: 2.7,
        }
    }
}

impl SampleBox {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Result<SampleBox, String> {
        let ok = [x0, x1, y0, y1].iter().all(|v| v.is_finite()) && x0 <= x1 && y0 <= y1;
        if ok {
            Ok(SampleBox { x0, x1, y0, y1 })
        } else {
            Err(format!("invalid sample box {x0},{x1},{y0},{y1}"))
        }
    }
}

impl FromStr for SampleBox {
    type Err = String;

    /// Parses `x0,x1,y0,y1`.
    fn from_str(s: &str) -> Result<SampleBox, String> {
        let parts: Vec<f64> = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|_| format!("bad number `{}` in box", t.trim()))
            })
            .collect::<Result<_, _>>()?;
        match parts[..] {
            [x0, x1, y0, y1] => SampleBox::new(x0, x1, y0, y1),
            _ => Err(format!("expected x0,x1,y0,y1, got `{s}`")),
        }
    }
}

impl fmt::Display for SampleBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{},{}", self.x0, self.x1, self.y0, self.y1)
    }
}

/// Seeded random evaluation context deciding "≡ 0" and "= const".
///
/// Every query restarts the generator from `seed`, so a given expression is
/// always judged on the same points.
#[derive(Debug, Clone, PartialEq)]
pub struct Probe {
    pub seed: u64,
    pub sample_box: SampleBox,
    pub npoints: usize,
    pub atol: f64,
    pub rtol: f64,
    pub max_resample: usize,
    /// `p` and `y''` are drawn from `[-aux_range, aux_range]`.
    pub aux_range: f64,
}

impl Default for Probe {
    fn default() -> Probe {
        Probe {
            seed: 0,
            sample_box: SampleBox::default(),
            npoints: 12,
            atol: 1e-9,
            rtol: 1e-7,
            max_resample: 200,
            aux_range: 2.0,
        }
    }
}

// Rounding-error allowance on top of the absolute tolerance.
const ERROR_FACTOR: f64 = 1e3 * f64::EPSILON;

impl Probe {
    pub fn with_seed(seed: u64) -> Probe {
        Probe {
            seed,
            ..Probe::default()
        }
    }

    fn zero_threshold(&self, s: &Sample) -> f64 {
        self.atol * (1.0 + s.scale) + ERROR_FACTOR * s.error
    }

    /// Evaluates `e` at `npoints` accepted points. Points where any
    /// subexpression leaves its domain are redrawn.
    pub fn samples(&self, e: &Expr) -> Result<Vec<([f64; 4], Sample)>, ProbeError> {
        let prog = Program::compile(e, &Bindings::new()).map_err(|err| match err {
            EvalError::UnboundParameter(n) => ProbeError::UnboundParameter(n),
            EvalError::Domain(_) => unreachable!("compilation does not evaluate"),
        })?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let b = &self.sample_box;
        let mut out = Vec::with_capacity(self.npoints);
        let mut rejected = 0;
        while out.len() < self.npoints {
            let pt = [
                draw(&mut rng, b.x0, b.x1),
                draw(&mut rng, b.y0, b.y1),
                draw(&mut rng, -self.aux_range, self.aux_range),
                draw(&mut rng, -self.aux_range, self.aux_range),
            ];
            match prog.eval(&pt, self.atol) {
                Ok(s) => out.push((pt, s)),
                Err(_) => {
                    rejected += 1;
                    if rejected > self.max_resample {
                        return Err(ProbeError::Exhausted {
                            attempts: rejected + out.len(),
                        });
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn sample_values(&self, e: &Expr) -> Result<Vec<f64>, ProbeError> {
        Ok(self.samples(e)?.into_iter().map(|(_, s)| s.value).collect())
    }

    pub fn is_identically_zero(&self, e: &Expr) -> Result<bool, ProbeError> {
        if let Some(v) = e.as_f64() {
            return Ok(v == 0.0);
        }
        let samples = self.samples(e)?;
        Ok(samples.iter().all(|(_, s)| s.value.abs() <= self.zero_threshold(s)))
    }

    /// A point where `e` is certainly nonzero, if one was sampled.
    pub fn witness(&self, e: &Expr) -> Result<Option<([f64; 4], f64)>, ProbeError> {
        let samples = self.samples(e)?;
        Ok(samples
            .into_iter()
            .find(|(_, s)| s.value.abs() > self.zero_threshold(s))
            .map(|(pt, s)| (pt, s.value)))
    }

    /// The constant value of `e`, or `None` if it varies.
    pub fn constant_value(&self, e: &Expr) -> Result<Option<f64>, ProbeError> {
        self.constant_value_with(e, &Derivatives::new())
    }

    /// As [`Probe::constant_value`], sharing a derivative cache.
    pub fn constant_value_with(&self, e: &Expr, d: &Derivatives) -> Result<Option<f64>, ProbeError> {
        if let Some(v) = e.as_f64() {
            return Ok(Some(v));
        }
        let samples = self.samples(e)?;
        let n = samples.len() as f64;
        let mean = samples.iter().map(|(_, s)| s.value).sum::<f64>() / n;
        let (lo, hi) = samples
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (_, s)| {
                (lo.min(s.value), hi.max(s.value))
            });
        let noise = samples
            .iter()
            .fold(0.0f64, |acc, (_, s)| acc.max(ERROR_FACTOR * s.error));
        if hi - lo > self.rtol * (1.0 + mean.abs()) + noise {
            return Ok(None);
        }
        for v in [Var::X, Var::Y] {
            if !self.is_identically_zero(&d.diff(e, v))? {
                return Ok(None);
            }
        }
        Ok(Some(mean))
    }
}

fn draw(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    if lo == hi {
        lo
    } else {
        rng.gen_range(lo..=hi)
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse;
    use super::*;

    #[test]
    fn commuted_product_is_zero() {
        let probe = Probe::default();
        assert!(probe.is_identically_zero(&parse("x*y - y*x").unwrap()).unwrap());
        assert!(!probe.is_identically_zero(&parse("x*y").unwrap()).unwrap());
    }

    #[test]
    fn small_but_nonzero_is_not_zero() {
        let probe = Probe::default();
        let e = parse("(x - y)/100000 + x*y/1000000").unwrap();
        assert!(!probe.is_identically_zero(&e).unwrap());
        assert!(probe.witness(&e).unwrap().is_some());
    }

    #[test]
    fn constants() {
        let probe = Probe::default();
        assert_eq!(probe.constant_value(&Expr::rat(18, 5)).unwrap(), Some(3.6));
        assert_eq!(probe.constant_value(&parse("exp(y)").unwrap()).unwrap(), None);
        let v = probe
            .constant_value(&parse("(x*y + y)/(y*(x + 1))").unwrap())
            .unwrap()
            .unwrap();
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn resamples_outside_domain() {
        let probe = Probe::default();
        let e = parse("ln(y - 2) - ln(y - 2)").unwrap();
        assert!(probe.is_identically_zero(&e).unwrap());
        let e = parse("sqrt(-y)").unwrap();
        assert!(matches!(
            probe.is_identically_zero(&e),
            Err(ProbeError::Exhausted { .. })
        ));
    }

    #[test]
    fn deterministic_for_equal_seeds() {
        let e = parse("exp(x)*ln(y) + p^2").unwrap();
        let a = Probe::with_seed(7).sample_values(&e).unwrap();
        let b = Probe::with_seed(7).sample_values(&e).unwrap();
        let c = Probe::with_seed(8).sample_values(&e).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn box_parses() {
        let b: SampleBox = "0.5, 2, -1, 3".parse().unwrap();
        assert_eq!(
            b,
            SampleBox {
                x0: 0.5,
                x1: 2.0,
                y0: -1.0,
                y1: 3.0
            }
        );
        assert!("1,0,0,1".parse::<SampleBox>().is_err());
        assert!("1,2,3".parse::<SampleBox>().is_err());
    }
}
