//! Scalar root finding: Newton steps safeguarded by a sign-change bracket.

/// Root of `f` in `[lo, hi]`, where `f_df` returns `(f(x), f'(x))` and
/// `f(lo)`, `f(hi)` differ in sign (or one of them is zero). A Newton step is
/// taken whenever it stays inside the current bracket and shrinks it fast
/// enough; otherwise the bracket is bisected. Returns `None` without a sign
/// change.
pub fn newton_bisect<F>(f_df: F, mut lo: f64, mut hi: f64, xtol: f64, max_iter: usize) -> Option<f64>
where
    F: Fn(f64) -> (f64, f64),
{
    let (mut flo, _) = f_df(lo);
    let (fhi, _) = f_df(hi);
    if flo == 0.0 {
        return Some(lo);
    }
    if fhi == 0.0 {
        return Some(hi);
    }
    if flo.signum() == fhi.signum() || !flo.is_finite() || !fhi.is_finite() {
        return None;
    }
    let mut x = 0.5 * (lo + hi);
    let mut dx_old = hi - lo;
    let mut dx = dx_old;
    let (mut fx, mut dfx) = f_df(x);
    for _ in 0..max_iter {
        if fx == 0.0 {
            return Some(x);
        }
        // keep [lo, hi] as a sign-change bracket
        if fx.signum() == flo.signum() {
            lo = x;
            flo = fx;
        } else {
            hi = x;
        }
        let newton_ok = dfx != 0.0 && {
            let nx = x - fx / dfx;
            nx > lo && nx < hi && (2.0 * fx).abs() <= (dx_old * dfx).abs()
        };
        dx_old = dx;
        if newton_ok {
            dx = fx / dfx;
            x -= dx;
        } else {
            dx = 0.5 * (hi - lo);
            x = lo + dx;
        }
        if dx.abs() <= xtol || hi - lo <= xtol {
            return Some(x);
        }
        (fx, dfx) = f_df(x);
    }
    Some(x)
}

#[allow(dead_code)]
/// Plain bisection for functions without a convenient derivative.
pub fn bisect<F>(f: F, mut lo: f64, mut hi: f64, xtol: f64, max_iter: usize) -> Option<f64>
where
    F: Fn(f64) -> f64,
{
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Some(lo);
    }
    if fhi == 0.0 {
        return Some(hi);
    }
    if flo.signum() == fhi.signum() {
        return None;
    }
    for _ in 0..max_iter {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= xtol || mid == lo || mid == hi {
            return Some(mid);
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Some(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_two() {
        let r = newton_bisect(|x| (x * x - 2.0, 2.0 * x), 0.0, 2.0, 1e-14, 60).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-14);
        let b = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-14, 200).unwrap();
        assert!((b - 2f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn bad_derivative_falls_back_to_bisection() {
        // derivative deliberately wrong: Newton steps leave the bracket
        let r = newton_bisect(|x| (x.powi(3) - 0.001, -1.0), -1.0, 1.0, 1e-13, 200).unwrap();
        assert!((r - 0.1).abs() < 1e-12);
    }

    #[test]
    fn no_sign_change() {
        assert!(newton_bisect(|x| (x * x + 1.0, 2.0 * x), -1.0, 1.0, 1e-12, 60).is_none());
        assert!(bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-12, 60).is_none());
    }
}
