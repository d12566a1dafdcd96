use std::path::PathBuf;

use cubic_ode::corpus::parse_corpus;
use cubic_ode::expr::{Bindings, Probe, Program, Rational};
use cubic_ode::ode::{normalize_to_cubic, pullback_affine, AffineMap, OdeCubic};

fn corpus() -> Vec<(String, OdeCubic, [f64; 2])> {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus/kamke.corpus");
    let corpus = parse_corpus(&std::fs::read_to_string(path).unwrap());
    assert!(corpus.errors.is_empty());
    corpus
        .records
        .iter()
        .map(|r| {
            let b = r.sample_box.unwrap_or_default();
            let probe = Probe {
                sample_box: b,
                ..Probe::default()
            };
            let bindings: Bindings = r.params.iter().map(|(k, v)| (k.clone(), *v)).collect();
            let ode = normalize_to_cubic(&r.equation, &bindings, &probe).unwrap();
            (r.id.clone(), ode, [(b.x0 + b.x1) / 2.0, (b.y0 + b.y1) / 2.0])
        })
        .collect()
}

fn rhs(ode: &OdeCubic) -> impl Fn(f64, f64, f64) -> f64 {
    let prog = Program::compile(&ode.rhs(), &Bindings::new()).unwrap();
    move |x, y, p| {
        prog.eval_exact(&[x, y, p, 0.0])
            .unwrap_or_else(|e| panic!("{e} at ({x}, {y}, {p})"))
    }
}

fn rk4(f: &impl Fn(f64, f64, f64) -> f64, x0: f64, y0: f64, p0: f64, h: f64, steps: usize) -> Vec<(f64, f64)> {
    let (mut x, mut y, mut p) = (x0, y0, p0);
    let mut out = vec![(x, y)];
    for _ in 0..steps {
        let (k1y, k1p) = (p, f(x, y, p));
        let (k2y, k2p) = (p + h / 2.0 * k1p, f(x + h / 2.0, y + h / 2.0 * k1y, p + h / 2.0 * k1p));
        let (k3y, k3p) = (p + h / 2.0 * k2p, f(x + h / 2.0, y + h / 2.0 * k2y, p + h / 2.0 * k2p));
        let (k4y, k4p) = (p + h * k3p, f(x + h, y + h * k3y, p + h * k3p));
        y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
        p += h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
        x += h;
        out.push((x, y));
    }
    out
}

#[test]
fn mapped_solutions_solve_the_pulled_back_equation() {
    let map = AffineMap::new(
        Rational::new(3, 2),
        Rational::new(1, 2),
        Rational::new(2, 1),
        Rational::new(1, 4),
    )
    .unwrap();
    let alpha = 1.5;
    let h = 1e-3;
    let mut detected = 0;
    for (id, ode, [x0, y0]) in corpus() {
        let f = rhs(&ode);
        let g = rhs(&pullback_affine(&ode, &map));
        let traj: Vec<(f64, f64)> = rk4(&f, x0, y0, -0.5, h, 100)
            .into_iter()
            .map(|(x, y)| map.apply(x, y))
            .collect();
        let hh = alpha * h;
        let worst = |eq: &dyn Fn(f64, f64, f64) -> f64| {
            traj.windows(3).fold(0.0f64, |acc, w| {
                let [(_, ym), (xc, yc), (_, yp)] = [w[0], w[1], w[2]];
                let d1 = (yp - ym) / (2.0 * hh);
                let d2 = (yp - 2.0 * yc + ym) / (hh * hh);
                acc.max((d2 - eq(xc, yc, d1)).abs() / (1.0 + d2.abs()))
            })
        };
        let r = worst(&g);
        assert!(r < 1e-5, "{id}: residual {r:e}");
        if worst(&f) > 1e-3 {
            detected += 1;
        }
    }
    assert!(detected > 20, "unmapped equations should not fit the mapped solutions");
}
