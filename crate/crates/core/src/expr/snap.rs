use super::Rational;

/// Default relative tolerance for [`snap_rational`].
pub const SNAP_RTOL: f64 = 1e-7;

/// Best rational approximation of `v` with denominator at most `maxden`,
/// returned only if it lies within relative `1e-7` of `v`.
pub fn snap_rational(v: f64, maxden: i64) -> Option<Rational> {
    snap_rational_tol(v, maxden, SNAP_RTOL)
}

pub fn snap_rational_tol(v: f64, maxden: i64, rtol: f64) -> Option<Rational> {
    if !v.is_finite() || maxden < 1 || v.abs() >= i64::MAX as f64 / 2.0 {
        return None;
    }
    let best = best_approximation(v.abs(), maxden)?;
    let approx = best.0 as f64 / best.1 as f64;
    if (approx - v.abs()).abs() > rtol * v.abs().max(f64::MIN_POSITIVE) {
        return None;
    }
    let r = Rational::new(best.0, best.1);
    Some(if v < 0.0 { -r } else { r })
}

// Continued-fraction convergents, finishing with the best semiconvergent
// once the denominator bound is reached.
fn best_approximation(v: f64, maxden: i64) -> Option<(i64, i64)> {
    let (mut p0, mut q0, mut p1, mut q1) = (0i128, 1i128, 1i128, 0i128);
    let maxden = maxden as i128;
    let mut x = v;
    loop {
        let a = x.floor();
        if a > 1e18 {
            break;
        }
        let a = a as i128;
        let q2 = q0 + a * q1;
        if q2 > maxden {
            // Largest admissible semiconvergent.
            let k = (maxden - q0) / q1;
            let (ps, qs) = (p0 + k * p1, q0 + k * q1);
            let err = |p: i128, q: i128| (p as f64 / q as f64 - v).abs();
            if err(ps, qs) < err(p1, q1) {
                return to_i64(ps, qs);
            }
            break;
        }
        let p2 = p0 + a * p1;
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        let frac = x - a as f64;
        if frac <= f64::EPSILON * x.max(1.0) {
            break;
        }
        x = 1.0 / frac;
    }
    to_i64(p1, q1)
}

fn to_i64(p: i128, q: i128) -> Option<(i64, i64)> {
    Some((i64::try_from(p).ok()?, i64::try_from(q).ok()?))
}
