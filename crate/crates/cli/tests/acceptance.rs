//! Acceptance suite: one PASS/FAIL line per criterion.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::{Command, ExitCode};

use cubic_ode::classify::{classify, model_equation, Classification, Verdict};
use cubic_ode::corpus::{classify_equation, parse_corpus, record_seed, CorpusRecord};
use cubic_ode::expr::{Bindings, Expr, Probe, Rational, Var};
use cubic_ode::invariants::InvariantEngine;
use cubic_ode::ode::{pullback_affine, AffineMap, OdeCubic};
use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use rayon::prelude::*;

const TOL: f64 = 1e-6;

fn corpus_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus/kamke.corpus")
}

struct Entry {
    record: CorpusRecord,
    probe: Probe,
    ode: OdeCubic,
    class: Classification,
}

fn load() -> Vec<Entry> {
    let corpus = parse_corpus(&std::fs::read_to_string(corpus_path()).expect("corpus file"));
    assert!(corpus.errors.is_empty(), "{:?}", corpus.errors);
    corpus
        .records
        .into_iter()
        .map(|record| {
            let probe = Probe {
                seed: record_seed(0, &record.id),
                sample_box: record.sample_box.unwrap_or_default(),
                ..Probe::default()
            };
            let (ode, class) = classify_equation(&record.equation, &record.params, &probe, TOL)
                .unwrap_or_else(|e| panic!("{}: {e}", record.id));
            Entry {
                record,
                probe,
                ode,
                class,
            }
        })
        .collect()
}

struct Check {
    ok: bool,
    failures: Vec<String>,
}

impl Check {
    fn new() -> Check {
        Check {
            ok: true,
            failures: Vec::new(),
        }
    }

    fn require(&mut self, cond: bool, what: impl FnOnce() -> String) {
        if !cond {
            self.ok = false;
            self.failures.push(what());
        }
    }

    fn near(&mut self, id: &str, name: &str, got: Option<f64>, want: f64, tol: f64) {
        let ok = got.is_some_and(|g| (g - want).abs() <= tol);
        self.require(ok, || format!("{id}: {name} = {got:?}, want {want} ± {tol:e}"));
    }

    fn verdict(&mut self, e: &Entry, want: Verdict) {
        let got = e.class.verdict;
        self.require(got == want, || format!("{}: verdict {got}, want {want}", e.record.id));
    }

    fn vanishes(&mut self, e: &Entry, names: &[&str]) {
        for n in names {
            let z = e.class.vanishing.get(*n).copied();
            self.require(z == Some(true), || {
                format!("{}: {n} ≡ 0 expected, got {z:?}", e.record.id)
            });
        }
    }
}

fn value(e: &Entry, name: &str) -> Option<f64> {
    e.class.invariant(name).or_else(|| e.class.param(name))
}

fn criterion(n: u32, title: &str, check: Check, results: &mut Vec<bool>) {
    let mark = if check.ok { "PASS" } else { "FAIL" };
    println!("criterion {n:>2} [{mark}] {title}");
    for f in check.failures.iter().take(12) {
        println!("    {f}");
    }
    results.push(check.ok);
}

fn main() -> ExitCode {
    let entries = load();
    let by_id: BTreeMap<&str, &Entry> = entries.iter().map(|e| (e.record.id.as_str(), e)).collect();
    let get = |id: &str| *by_id.get(id).unwrap_or_else(|| panic!("corpus lacks {id}"));
    let mut results = Vec::new();

    let mut c = Check::new();
    for id in ["6.113", "6.134", "6.169"] {
        c.verdict(get(id), Verdict::Linearizable);
        c.vanishes(get(id), &["A", "B"]);
    }
    criterion(1, "Linearizable: Kamke 6.113, 6.134, 6.169", c, &mut results);

    let mut c = Check::new();
    for id in ["6.81", "6.138", "inverse-cube"] {
        let e = get(id);
        c.verdict(e, Verdict::Theorem1);
        c.near(id, "K", value(e, "K"), -5.0 / 9.0, TOL);
    }
    criterion(
        2,
        "Theorem 1: Kamke 6.81, 6.138, y'' = 1/y^3 with K = -5/9",
        c,
        &mut results,
    );

    let mut c = Check::new();
    for id in ["6.76", "6.83", "6.110", "6.111", "painleve-3", "exponential"] {
        let e = get(id);
        c.verdict(e, Verdict::Theorem2);
        c.near(id, "I1", value(e, "I1"), 0.6, TOL);
        c.near(id, "I3", value(e, "I3"), 1.0 / 15.0, TOL);
    }
    criterion(
        3,
        "Theorem 2: Kamke 6.76, 6.83, 6.110, 6.111, Painleve III, y'' = e^y",
        c,
        &mut results,
    );

    let mut c = Check::new();
    for (id, i1, i3, cc) in [("6.7", 3.6, 1.0 / 15.0, 1.0), ("6.126", -1.2, 5.0 / 3.0, -5.0 / 3.0)] {
        let e = get(id);
        c.verdict(e, Verdict::Theorem3);
        c.near(id, "I1", value(e, "I1"), i1, TOL);
        c.near(id, "I3", value(e, "I3"), i3, TOL);
        c.near(id, "c", e.class.param("c"), cc, TOL);
    }
    criterion(4, "Theorem 3: Kamke 6.7 (a=1), 6.126 (a=2)", c, &mut results);

    let mut c = Check::new();
    for (id, i2, i3) in [("6.30", 0.05, -0.3), ("6.174", 0.5, -3.6)] {
        let e = get(id);
        c.verdict(e, Verdict::Theorem4);
        c.near(id, "I1", value(e, "I1"), 3.6, TOL);
        c.near(id, "I2", value(e, "I2"), i2, TOL);
        c.near(id, "I3", value(e, "I3"), i3, TOL);
    }
    criterion(5, "Theorem 4: Kamke 6.30, 6.174", c, &mut results);

    let mut c = Check::new();
    for id in ["6.2", "half-square"] {
        c.verdict(get(id), Verdict::Theorem5);
        c.vanishes(get(id), &["N", "Omega", "L"]);
    }
    criterion(6, "Theorem 5: Kamke 6.2, y'' = y^2/2", c, &mut results);

    let mut c = Check::new();
    {
        let e = get("6.130");
        c.verdict(e, Verdict::Theorem6);
        c.near("6.130", "I6", value(e, "I6"), 0.0, TOL);
        c.near("6.130", "I8", value(e, "I8"), 0.0, TOL);
        c.near("6.130", "I3", value(e, "I3"), 182.25f64.powf(0.2), TOL);
        let prod = value(e, "I7").zip(value(e, "I3")).map(|(a, b)| a * b);
        c.near("6.130", "I7*I3", prod, 9.0, 1e-5);
    }
    criterion(7, "Theorem 6: Kamke 6.130 (a=1, b=3, c=3/4)", c, &mut results);

    let mut c = Check::new();
    {
        let e = get("6.109");
        c.verdict(e, Verdict::Theorem7);
        let r5 = |t: f64| t.powf(0.2);
        for (name, want) in [
            ("I3", -37.0 * r5(54.0) / 18.0),
            ("I6", r5(648.0) / 9.0),
            ("I7", -55.0 * r5(144.0) / 18.0),
            ("I8", 25.0 * r5(54.0) / 18.0),
        ] {
            c.near("6.109", name, value(e, name), want, TOL * want.abs());
        }
        let s3 = 3f64.sqrt();
        for (name, want) in [
            ("n", 16.0 * s3 / 3.0),
            ("a", 1.0 / 6.0),
            ("b", s3 / 3.0),
            ("c", -8.0 * s3 / 3.0),
            ("d", 0.0),
            ("k", 16.0),
            ("m", -256.0 / 3.0),
        ] {
            c.near("6.109", name, e.class.param(name), want, TOL);
        }
        for name in ["relation_c7", "relation_c3", "relation_nab"] {
            c.near("6.109", name, e.class.relations.get(name).copied(), 0.0, TOL);
        }
    }
    criterion(
        8,
        "Theorem 7: Kamke 6.109 invariants, parameters, relations",
        c,
        &mut results,
    );

    criterion(9, "Property suite", property_suite(&entries), &mut results);
    criterion(
        10,
        "Determinism: corpus --seed 0 twice gives identical JSON",
        determinism(),
        &mut results,
    );

    let passed = results.iter().filter(|r| **r).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn property_suite(entries: &[Entry]) -> Check {
    let mut c = Check::new();

    let mut compared = 0;
    for e in entries {
        let eng = InvariantEngine::new(&e.ode);
        let rel = eng.relative();
        let identity = Expr::int(3) * &rel.f5 - (&rel.a * &rel.g + &rel.b * &rel.h);
        let holds = e.probe.is_identically_zero(&identity).unwrap_or(false);
        c.require(holds, || format!("{}: 3F5 != AG + BH", e.record.id));
        if let Some(agree) = eng.branch_agreement(&e.probe).expect("probe") {
            compared += 1;
            for (name, ok) in agree {
                c.require(ok, || format!("{}: branches disagree on {name}", e.record.id));
            }
        }
    }
    c.require(compared >= 5, || {
        format!("only {compared} corpus equations exercise both branches")
    });
    println!(
        "    dual-branch agreement checked on {compared} equations; 3F5 = AG + BH on {}",
        entries.len()
    );

    let halves = [
        Rational::new(1, 2),
        Rational::from_integer(1),
        Rational::from_integer(3),
    ];
    let shifts = [Rational::from_integer(0), Rational::from_integer(1)];
    let mut maps = Vec::new();
    for &alpha in &halves {
        for &gamma in &halves {
            for &beta in &shifts {
                for &delta in &shifts {
                    maps.push(AffineMap::new(alpha, beta, gamma, delta).expect("nonzero scale"));
                }
            }
        }
    }
    let affine: Vec<String> = entries
        .par_iter()
        .flat_map_iter(|e| maps.iter().filter_map(move |m| affine_mismatch(e, m)))
        .collect();
    let n_affine = entries.len() * maps.len();
    for f in affine {
        c.require(false, || f);
    }
    println!("    affine invariance checked on {n_affine} (equation, map) pairs");

    let mut classes = BTreeMap::new();
    for e in entries.iter().filter(|e| e.class.verdict.is_class()) {
        classes.entry(e.class.verdict).or_insert_with(Vec::new).push(e);
    }
    c.require(classes.len() == 8, || {
        format!("corpus instantiates {} of 8 classes", classes.len())
    });
    let mut closures = 0;
    for (verdict, list) in &classes {
        for e in list {
            closures += 1;
            let model = model_equation(*verdict, &e.class.params).expect("model for class");
            let probe = Probe {
                sample_box: model.sample_box,
                ..Probe::default()
            };
            match classify(&model.ode, &probe) {
                Ok(m) => {
                    c.require(m.verdict == *verdict, || {
                        format!("{}: model classifies as {}", e.record.id, m.verdict)
                    });
                    for (k, v) in &e.class.params {
                        let got = m.param(k);
                        let ok = got.is_some_and(|g| (g - v).abs() <= TOL * v.abs().max(1.0));
                        c.require(ok, || format!("{}: model param {k} = {got:?}, want {v}", e.record.id));
                    }
                }
                Err(err) => c.require(false, || format!("{}: model: {err}", e.record.id)),
            }
        }
    }
    println!(
        "    fixed-point closure checked on {closures} models across {} classes",
        classes.len()
    );

    let (checked, bad) = derivative_agreement(100);
    c.require(checked == 100, || {
        format!("only {checked} random expressions evaluated")
    });
    for b in bad {
        c.require(false, || b);
    }
    println!("    symbolic vs finite-difference derivatives on {checked} random expressions");
    c
}

fn affine_mismatch(e: &Entry, map: &AffineMap) -> Option<String> {
    let mapped = pullback_affine(&e.ode, map);
    let probe = Probe {
        sample_box: map.map_box(&e.probe.sample_box),
        ..e.probe.clone()
    };
    let label = || {
        format!(
            "{} under ({}, {}, {}, {})",
            e.record.id,
            map.alpha(),
            map.beta(),
            map.gamma(),
            map.delta()
        )
    };
    let m = match classify(&mapped, &probe) {
        Ok(m) => m,
        Err(err) => return Some(format!("{}: {err}", label())),
    };
    if m.verdict != e.class.verdict {
        return Some(format!("{}: verdict {} vs {}", label(), m.verdict, e.class.verdict));
    }
    let close = |a: f64, b: f64| (a - b).abs() <= TOL * a.abs().max(b.abs()).max(1.0);
    for inv in &e.class.invariants {
        let (Some(want), got) = (inv.value, m.invariant(&inv.name)) else {
            continue;
        };
        if !got.is_some_and(|g| close(g, want)) {
            return Some(format!("{}: {} = {got:?} vs {want}", label(), inv.name));
        }
    }
    for (k, want) in &e.class.params {
        if !m.param(k).is_some_and(|g| close(g, *want)) {
            return Some(format!("{}: param {k} = {:?} vs {want}", label(), m.param(k)));
        }
    }
    None
}

fn random_expr() -> impl Strategy<Value = Expr> {
    use proptest::prelude::*;
    let leaf = prop_oneof![
        Just(Expr::x()),
        Just(Expr::y()),
        (1i64..6).prop_map(Expr::int),
        (-5i64..6, 1i64..5).prop_map(|(n, d)| Expr::rat(n, d)),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        let positive = inner.clone().prop_map(|e| Expr::powi(e, 2) + Expr::one());
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a + b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a * b),
            (inner.clone(), positive.clone()).prop_map(|(a, b)| a / b),
            (positive.clone(), -3i64..4, 1i64..4).prop_map(|(a, n, d)| Expr::pow(a, Rational::new(n, d))),
            inner
                .clone()
                .prop_map(|a| Expr::exp(a.clone() / (Expr::powi(a, 2) + Expr::one()))),
            positive.clone().prop_map(Expr::ln),
            positive.prop_map(Expr::sqrt),
            inner.prop_map(Expr::root5),
        ]
    })
}

/// Checks `∂/∂x` and `∂/∂y` against a five-point stencil, relative `1e-5`.
fn derivative_agreement(count: usize) -> (usize, Vec<String>) {
    let config = Config::default();
    let rng = TestRng::deterministic_rng(RngAlgorithm::ChaCha);
    let mut runner = TestRunner::new_with_rng(config, rng);
    let strategy = (random_expr(), 0.6f64..1.9, 0.6f64..1.9);
    let b = Bindings::new();
    let mut bad = Vec::new();
    let mut checked = 0;
    while checked < count {
        let (e, x, y) = strategy.new_tree(&mut runner).expect("strategy").current();
        let at = |e: &Expr, x: f64, y: f64| e.evaluate(x, y, &b).expect("domain");
        let v = at(&e, x, y);
        if v.abs() > 1e6 {
            continue;
        }
        let (Ok(dx), Ok(dy)) = (e.diff(Var::X).evaluate(x, y, &b), e.diff(Var::Y).evaluate(x, y, &b)) else {
            continue;
        };
        checked += 1;
        let h = 1e-3;
        let stencil = |f: &dyn Fn(f64) -> f64, t: f64| {
            (-f(t + 2.0 * h) + 8.0 * f(t + h) - 8.0 * f(t - h) + f(t - 2.0 * h)) / (12.0 * h)
        };
        let pairs = [
            (dx, stencil(&|t| at(&e, t, y), x), "x"),
            (dy, stencil(&|t| at(&e, x, t), y), "y"),
        ];
        for (d, fd, v_name) in pairs {
            if (d - fd).abs() > 1e-5 * d.abs().max(1.0).max(1e-3 * v.abs()) {
                bad.push(format!("d/d{v_name} of {e} at ({x}, {y}): {d} vs {fd}"));
            }
        }
    }
    (checked, bad)
}

fn determinism() -> Check {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_cubic-ode"))
            .args([
                "corpus",
                corpus_path().to_str().unwrap(),
                "--seed",
                "0",
                "--json",
                "--no-timing",
            ])
            .output()
            .expect("binary runs")
    };
    let (a, b) = (run(), run());
    let mut c = Check::new();
    c.require(a.status.success() && b.status.success(), || {
        "corpus run failed".to_string()
    });
    c.require(!a.stdout.is_empty() && a.stdout == b.stdout, || {
        "outputs differ".to_string()
    });
    c
}
