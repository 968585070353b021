//! Locating the cut-tail point.
//!
//! For `T > 0` the minimax value on `[0, T]` equals one exactly when `x(T)`
//! still lies on the boundary of the symmetrized hull, i.e. when `T ≤ T_cut`,
//! and the set of such `T` is an interval. `T_cut` is therefore the flip
//! point of a monotone predicate and is found by doubling then bisection.
//! Two-dimensional spectra also have closed forms via the tangent line from
//! the reflected starting point.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::chebexchange::{exchange_solve, ExchangeOptions, ExtremalResult};
use crate::error::{Error, Result};
use crate::quasipoly::{build_basis, Basis, QuasiPolynomial};
use crate::roots::newton_bisect;
use crate::spectra::Spectrum;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutTailOptions {
    /// Bracket width requested from each exchange solve.
    pub eps: f64,
    /// `x(T)` counts as a boundary point while the value is `≤ 1 + value_tol`.
    pub value_tol: f64,
    /// Final width of the time bracket.
    pub time_tol: f64,
    pub max_doublings: usize,
    pub exchange: ExchangeOptions,
}

pub const DEFAULT_EPS: f64 = 1e-7;
pub const DEFAULT_VALUE_TOL: f64 = 1e-6;
pub const DEFAULT_TIME_TOL: f64 = 1e-4;

impl Default for CutTailOptions {
    fn default() -> Self {
        Self {
            eps: DEFAULT_EPS,
            value_tol: DEFAULT_VALUE_TOL,
            time_tol: DEFAULT_TIME_TOL,
            max_doublings: 60,
            exchange: ExchangeOptions::with_eps(DEFAULT_EPS),
        }
    }
}

impl CutTailOptions {
    pub fn exchange_options(&self) -> ExchangeOptions {
        ExchangeOptions {
            eps: self.eps,
            decision: Some(1.0 + self.value_tol),
            ..self.exchange
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("eps", self.eps), ("value_tol", self.value_tol), ("time_tol", self.time_tol)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidInput(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ExchangeBisection,
    ClosedFormReal,
    ClosedFormComplex,
}

/// One evaluation of the boundary predicate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PredicateEval {
    pub t: f64,
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    pub on_boundary: bool,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutTailResult {
    pub t_cut: f64,
    pub bracket: (f64, f64),
    /// Minimax polynomial at the lower bracket end (value one there).
    pub certificate: Option<QuasiPolynomial>,
    pub predicate_evals: Vec<PredicateEval>,
    pub method: Method,
    /// Set for a single real exponential, whose trajectory is a ray.
    pub degenerate: bool,
}

/// Exchange value at `t_end` and whether it certifies `t_end ≤ T_cut`.
pub fn evaluate_predicate(basis: &Basis, t_end: f64, opts: &CutTailOptions) -> Result<(bool, ExtremalResult)> {
    let res = exchange_solve(basis, t_end, &opts.exchange_options())?;
    Ok((res.value <= 1.0 + opts.value_tol, res))
}

/// True iff `x(t_end)` lies on the boundary of the symmetrized hull, i.e.
/// `t_end ≤ T_cut`.
pub fn boundary_predicate(basis: &Basis, t_end: f64, eps: f64, value_tol: f64) -> Result<bool> {
    let opts = CutTailOptions { eps, value_tol, ..CutTailOptions::default() };
    evaluate_predicate(basis, t_end, &opts).map(|(b, _)| b)
}

/// Computes `T_cut` for a Hurwitz spectrum by bracketing and bisection.
pub fn find_cut_tail(s: &Spectrum, opts: &CutTailOptions) -> Result<CutTailResult> {
    opts.validate()?;
    s.require_hurwitz()?;
    if s.dim_pa() == 1 {
        return Ok(CutTailResult {
            t_cut: 0.0,
            bracket: (0.0, 0.0),
            certificate: None,
            predicate_evals: Vec::new(),
            method: Method::ClosedFormReal,
            degenerate: true,
        });
    }
    let basis = build_basis(s);
    let mut evals = Vec::new();
    let probe = |t: f64, evals: &mut Vec<PredicateEval>| -> Result<(bool, ExtremalResult)> {
        let (flag, res) = evaluate_predicate(&basis, t, opts)?;
        evals.push(PredicateEval {
            t,
            value: res.value,
            lower: res.bounds.0,
            upper: res.bounds.1,
            on_boundary: flag,
            iterations: res.iterations,
        });
        Ok((flag, res))
    };

    let t_init = 1.0 / s.min_abs_alpha();
    let (first, first_res) = probe(t_init, &mut evals)?;
    let (mut lo, mut hi, mut lo_res);
    if first {
        lo = t_init;
        lo_res = first_res;
        hi = f64::NAN;
        for _ in 0..opts.max_doublings {
            let t = 2.0 * lo;
            let (flag, res) = probe(t, &mut evals)?;
            if flag {
                lo = t;
                lo_res = res;
            } else {
                hi = t;
                break;
            }
        }
        if hi.is_nan() {
            return Err(Error::Bracketing(format!("predicate still true at T = {lo}")));
        }
    } else {
        hi = t_init;
        let mut found = None;
        for _ in 0..opts.max_doublings {
            let t = 0.5 * hi;
            let (flag, res) = probe(t, &mut evals)?;
            if flag {
                found = Some((t, res));
                break;
            }
            hi = t;
        }
        let Some((t, res)) = found else {
            return Err(Error::Bracketing(format!("predicate still false at T = {hi}")));
        };
        lo = t;
        lo_res = res;
    }

    while hi - lo > opts.time_tol {
        let mid = 0.5 * (lo + hi);
        let (flag, res) = probe(mid, &mut evals)?;
        if flag {
            lo = mid;
            lo_res = res;
        } else {
            hi = mid;
        }
    }

    Ok(CutTailResult {
        t_cut: 0.5 * (lo + hi),
        bracket: (lo, hi),
        certificate: Some(lo_res.certificate),
        predicate_evals: evals,
        method: Method::ExchangeBisection,
        degenerate: false,
    })
}

const ROOT_XTOL: f64 = 1e-14;

/// Positive root of `(1 + e^{-a1 t})/a1 = (1 + e^{-a2 t})/a2` for distinct
/// negative `a1`, `a2` (diagonal 2×2 systems).
pub fn cut_tail_2d_real(a1: f64, a2: f64) -> Result<f64> {
    if !(a1 < 0.0 && a2 < 0.0) || a1 == a2 {
        return Err(Error::InvalidInput(format!(
            "need two distinct negative eigenvalues, got {a1} and {a2}"
        )));
    }
    let f = |t: f64| {
        let (e1, e2) = ((-a1 * t).exp(), (-a2 * t).exp());
        ((1.0 + e1) / a1 - (1.0 + e2) / a2, -e1 + e2)
    };
    let f0 = f(0.0).0;
    let mut hi = 1.0 / a1.abs().min(a2.abs());
    let mut found = false;
    for _ in 0..200 {
        let fh = f(hi).0;
        if fh.is_finite() && fh.signum() != f0.signum() {
            found = true;
            break;
        }
        hi *= 2.0;
    }
    if !found {
        return Err(Error::Bracketing("no sign change for the real closed form".into()));
    }
    newton_bisect(f, 0.0, hi, ROOT_XTOL * hi, 200)
        .ok_or_else(|| Error::Bracketing("real closed form lost its bracket".into()))
}

/// Smallest positive root of `α sin βt + β cos βt + β e^{αt} = 0` (rotating
/// 2×2 systems with eigenvalues `α ± iβ`).
pub fn cut_tail_2d_complex(alpha: f64, beta: f64) -> Result<f64> {
    if !(alpha < 0.0 && beta > 0.0) {
        return Err(Error::InvalidInput(format!(
            "need alpha < 0 and beta > 0, got {alpha} and {beta}"
        )));
    }
    let g = |t: f64| {
        let (s, c, e) = ((beta * t).sin(), (beta * t).cos(), (alpha * t).exp());
        (
            alpha * s + beta * c + beta * e,
            alpha * beta * c - beta * beta * s + alpha * beta * e,
        )
    };
    let period = 2.0 * PI / beta;
    let n = 4096;
    let mut prev = (0.0, g(0.0).0);
    for i in 1..=n {
        let t = period * i as f64 / n as f64;
        let v = g(t).0;
        if v == 0.0 {
            return Ok(t);
        }
        if v.signum() != prev.1.signum() {
            return newton_bisect(g, prev.0, t, ROOT_XTOL * period, 200)
                .ok_or_else(|| Error::Bracketing("complex closed form lost its bracket".into()));
        }
        prev = (t, v);
    }
    Err(Error::Bracketing("no sign change within one period".into()))
}

/// Closed-form `T_cut` for a two-dimensional spectrum with distinct real
/// eigenvalues or a complex pair.
pub fn cut_tail_closed_form(s: &Spectrum) -> Result<CutTailResult> {
    s.require_hurwitz()?;
    let c = s.components();
    let (t, method) = match c {
        [x, y] if s.dim_pa() == 2 && x.is_real() && y.is_real() => (cut_tail_2d_real(x.alpha, y.alpha)?, Method::ClosedFormReal),
        [x] if s.dim_pa() == 2 && !x.is_real() => (cut_tail_2d_complex(x.alpha, x.beta)?, Method::ClosedFormComplex),
        _ => {
            return Err(Error::InvalidInput(format!(
                "closed forms need two distinct real eigenvalues or one complex pair, got {s}"
            )))
        }
    };
    Ok(CutTailResult {
        t_cut: t,
        bracket: (t, t),
        certificate: None,
        predicate_evals: Vec::new(),
        method,
        degenerate: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_closed_form_example() {
        let t = cut_tail_2d_real(-0.2, -0.5).unwrap();
        assert!((t - 3.868743).abs() < 1e-5, "{t}");
        assert_eq!(t, cut_tail_2d_real(-0.5, -0.2).unwrap());
        let scaled = cut_tail_2d_real(-0.4, -1.0).unwrap();
        assert!((scaled - t / 2.0).abs() < 1e-12);
    }

    #[test]
    fn complex_closed_form_example() {
        let t = cut_tail_2d_complex(-0.1, 0.3).unwrap();
        assert!((t - 5.990737).abs() < 1e-5, "{t}");
        let slow = cut_tail_2d_complex(-0.05, 0.15).unwrap();
        assert!((slow - 2.0 * t).abs() < 1e-11);
        let residual = -0.1 * (0.3 * t).sin() + 0.3 * (0.3 * t).cos() + 0.3 * (-0.1 * t).exp();
        assert!(residual.abs() <= 1e-10 * 0.4);
    }

    #[test]
    fn closed_forms_reject_bad_input() {
        assert!(cut_tail_2d_real(-0.2, -0.2).is_err());
        assert!(cut_tail_2d_real(0.1, -0.2).is_err());
        assert!(cut_tail_2d_complex(-0.1, 0.0).is_err());
        assert!(cut_tail_closed_form(&"-0.3:2".parse().unwrap()).is_err());
    }

    #[test]
    fn predicate_around_example_one() {
        let b = build_basis(&"-0.2, -0.5".parse().unwrap());
        assert!(boundary_predicate(&b, 3.0, 1e-7, 1e-6).unwrap());
        assert!(!boundary_predicate(&b, 5.0, 1e-7, 1e-6).unwrap());
    }

    #[test]
    fn single_exponential_is_degenerate() {
        let r = find_cut_tail(&"-0.4".parse().unwrap(), &CutTailOptions::default()).unwrap();
        assert!(r.degenerate);
        assert_eq!(r.t_cut, 0.0);
    }

    #[test]
    fn rejects_unstable() {
        let err = find_cut_tail(&"0.1, -0.5".parse().unwrap(), &CutTailOptions::default()).unwrap_err();
        assert!(matches!(err, Error::NotHurwitz { .. }));
    }

    #[test]
    fn example_one_end_to_end() {
        let r = find_cut_tail(&"-0.2, -0.5".parse().unwrap(), &CutTailOptions::default()).unwrap();
        assert!(r.t_cut > 3.85 && r.t_cut < 3.89, "{}", r.t_cut);
        assert!(r.bracket.1 - r.bracket.0 <= 1e-4);
        assert_eq!(r.method, Method::ExchangeBisection);
    }
}
