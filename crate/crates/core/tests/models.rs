use std::collections::BTreeMap;

use cubic_ode::classify::{classify, model_equation, symmetry_condition, Theorem7Params, Verdict};
use cubic_ode::expr::Probe;

fn params(kv: &[(&str, f64)]) -> BTreeMap<String, f64> {
    kv.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

fn theorem7(n: f64, a: f64) -> BTreeMap<String, f64> {
    let beta = -18.0 * a * a * n + 15.0 * n * a - 2.0 * n;
    let b = (-beta + (beta * beta + 432.0).sqrt()) / 36.0;
    let t = Theorem7Params::from_nab(n, a, b);
    assert!(t.relation_nab.abs() < 1e-9);
    t.named().iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

fn cases() -> Vec<(Verdict, BTreeMap<String, f64>)> {
    let s3 = 3f64.sqrt();
    vec![
        (Verdict::Linearizable, params(&[])),
        (Verdict::Theorem1, params(&[])),
        (Verdict::Theorem2, params(&[])),
        (Verdict::Theorem3, params(&[("c", 1.0)])),
        (Verdict::Theorem3, params(&[("c", -5.0 / 3.0)])),
        (Verdict::Theorem3, params(&[("c", 0.5)])),
        (Verdict::Theorem3, params(&[("c", 2f64.sqrt())])),
        (Verdict::Theorem4, params(&[("k", 0.05)])),
        (Verdict::Theorem4, params(&[("k", 0.5)])),
        (Verdict::Theorem4, params(&[("k", -0.2)])),
        (Verdict::Theorem5, params(&[])),
        (Verdict::Theorem6, params(&[("k", 1.0)])),
        (Verdict::Theorem6, params(&[("k", -3.0)])),
        (Verdict::Theorem7, theorem7(16.0 * s3 / 3.0, 1.0 / 6.0)),
        (Verdict::Theorem7, theorem7(1.0, 0.3)),
        (Verdict::Theorem7, theorem7(2.5, -0.4)),
    ]
}

#[test]
fn models_classify_to_themselves() {
    for (verdict, p) in cases() {
        let m = model_equation(verdict, &p).unwrap();
        let probe = Probe {
            sample_box: m.sample_box,
            ..Probe::default()
        };
        let c = classify(&m.ode, &probe).unwrap();
        assert_eq!(
            c.verdict,
            verdict,
            "{verdict} {p:?}: {:?}",
            c.invariants.iter().map(|i| (&i.name, i.value)).collect::<Vec<_>>()
        );
        for (k, v) in &p {
            let got = c.param(k).unwrap();
            assert!(
                (got - v).abs() <= 1e-6 * v.abs().max(1.0),
                "{verdict} {k}: {got} vs {v}"
            );
        }
    }
}

#[test]
fn model_generators_are_symmetries() {
    for (verdict, p) in cases() {
        let m = model_equation(verdict, &p).unwrap();
        let probe = Probe {
            sample_box: m.sample_box,
            ..Probe::default()
        };
        assert_eq!(m.generators.len(), verdict.algebra_dim().unwrap() as usize);
        for (xi, eta) in &m.generators {
            let cond = symmetry_condition(&m.ode, xi, eta);
            assert!(probe.is_identically_zero(&cond).unwrap(), "{verdict} ({xi}, {eta})");
        }
    }
}
