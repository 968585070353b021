//! Minimax quasipolynomials on a segment by an exchange method.
//!
//! For a fixed `T`, [`exchange_solve`] computes
//!
//! ```text
//! min ‖p‖_{C[0,T]}   subject to   p(T) = 1,  p ∈ span(basis)
//! ```
//!
//! by alternating a finite linear program over a point set (whose value is a
//! lower bound) with a global maximization of the resulting polynomial
//! (whose norm is an upper bound), exchanging points until the two bounds
//! meet. For real spectra the basis is a Chebyshev system and this reduces
//! to a Remez-type iteration; complex spectra need not alternate.

mod simplex;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quasipoly::{local_abs_maxima, Basis, QuasiPolynomial};

pub use simplex::{solve_lp, Constraint, LinearProgram, LpSolution, Relation};

pub const DEFAULT_EPS: f64 = 1e-6;
/// Largest grid refinement factor used after stalls.
const MAX_DENSITY: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExchangeOptions {
    /// Stop once `upper - lower < eps`.
    pub eps: f64,
    pub max_iter: usize,
    /// A point is dropped when `|p(t)| < r - removal_slack·(1 + r)`.
    pub removal_slack: f64,
    /// Maxima within `activity_tol·(1 + B)` of the top are treated as active.
    pub activity_tol: f64,
    /// Iterations without progress before the maximization grid is densified.
    pub stall_window: usize,
    /// Stop early once the bracket lies entirely on one side of this value.
    /// Used when only the comparison `value ≤ threshold` matters.
    pub decision: Option<f64>,
}

impl Default for ExchangeOptions {
    fn default() -> Self {
        Self {
            eps: DEFAULT_EPS,
            max_iter: 500,
            removal_slack: 1e-9,
            activity_tol: 1e-9,
            stall_window: 20,
            decision: None,
        }
    }
}

impl ExchangeOptions {
    pub fn with_eps(eps: f64) -> Self {
        Self { eps, ..Self::default() }
    }
}

/// Loop state: the current point set and the bracket `[lower, upper]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExchangeState {
    pub points: Vec<f64>,
    pub lower: f64,
    pub upper: f64,
    pub incumbent: QuasiPolynomial,
    pub iteration: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub lp_value: f64,
    pub lower: f64,
    pub upper: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtremalResult {
    /// Norm of the certificate on `[0, T]`; the true minimum lies in `bounds`.
    pub value: f64,
    pub certificate: QuasiPolynomial,
    /// Local maxima of `|certificate|` within the activity tolerance (or the
    /// final bracket width, if larger) of `value`.
    pub active_points: Vec<f64>,
    pub bounds: (f64, f64),
    pub iterations: usize,
    pub history: Vec<IterationRecord>,
}

/// Minimizes `r` subject to `|p(t_j)| ≤ r` on `points` and `p(t_end) = 1`.
/// Returns the optimal `r`, a lower bound for the minimax value.
pub fn lp_subproblem(points: &[f64], basis: &Basis, t_end: f64) -> Result<(f64, QuasiPolynomial)> {
    let d = basis.dim();
    if d == 0 {
        return Err(Error::InvalidInput("empty basis".into()));
    }
    let rows: Vec<Vec<f64>> = points.iter().map(|&t| basis.eval_row(t)).collect();
    let at_end = basis.eval_row(t_end);
    let scale = rows
        .iter()
        .chain(std::iter::once(&at_end))
        .flatten()
        .fold(0.0f64, |m, x| m.max(x.abs()));
    for (i, f) in basis.functions().iter().enumerate() {
        let vanishes = rows
            .iter()
            .chain(std::iter::once(&at_end))
            .all(|r| r[i].abs() <= 1e-14 * scale);
        if vanishes {
            return Err(Error::DegenerateBasis { function: f.to_string() });
        }
    }

    // The LP works in a basis orthonormalized on a reference grid, which is
    // far better conditioned than raw exponentials; coefficients map back
    // through the triangular factor.
    let r_factor = reference_factor(basis, t_end)?;
    let to_q = |row: &[f64]| -> Vec<f64> {
        // q = v R^{-1}, i.e. R^T q^T = v^T
        let mut q = row.to_vec();
        for k in 0..d {
            for j in 0..k {
                q[k] -= r_factor[j * d + k] * q[j];
            }
            q[k] /= r_factor[k * d + k];
        }
        q
    };

    // variables: coefficients y_1..y_d, then r
    let mut objective = vec![0.0; d + 1];
    objective[d] = 1.0;
    let mut lp = LinearProgram::new(objective);
    for row in &rows {
        let mut up = to_q(row);
        let mut down: Vec<f64> = up.iter().map(|x| -x).collect();
        up.push(-1.0);
        down.push(-1.0);
        lp.add(up, Relation::Le, 0.0)?;
        lp.add(down, Relation::Le, 0.0)?;
    }
    let mut eq = to_q(&at_end);
    eq.push(0.0);
    lp.add(eq, Relation::Eq, 1.0)?;

    let sol = solve_lp(&lp)?;
    // c = R^{-1} y
    let mut coeffs = sol.solution[..d].to_vec();
    for k in (0..d).rev() {
        for j in k + 1..d {
            coeffs[k] -= r_factor[k * d + j] * coeffs[j];
        }
        coeffs[k] /= r_factor[k * d + k];
    }
    Ok((sol.optimum, QuasiPolynomial::new(basis.clone(), coeffs)))
}

/// Upper-triangular `R` (row-major, d×d) with `V = Q R`, where `V` holds the
/// basis sampled at Chebyshev points of `[0, t_end]` and `Q` has orthonormal
/// columns. Gram-Schmidt runs twice for stability.
fn reference_factor(basis: &Basis, t_end: f64) -> Result<Vec<f64>> {
    let d = basis.dim();
    let m = (8 * d).max(64);
    let mut grid = chebyshev_points(m, t_end);
    grid.push(0.0);
    grid.push(t_end);
    let samples: Vec<Vec<f64>> = grid.iter().map(|&t| basis.eval_row(t)).collect();
    let mut cols: Vec<Vec<f64>> = (0..d).map(|k| samples.iter().map(|r| r[k]).collect()).collect();
    let mut r = vec![0.0; d * d];
    for k in 0..d {
        let norm0 = cols[k].iter().map(|x| x * x).sum::<f64>().sqrt();
        for _ in 0..2 {
            for j in 0..k {
                let dot: f64 = cols[j].iter().zip(&cols[k]).map(|(a, b)| a * b).sum();
                r[j * d + k] += dot;
                let qj = cols[j].clone();
                cols[k].iter_mut().zip(&qj).for_each(|(x, q)| *x -= dot * q);
            }
        }
        let norm = cols[k].iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(norm > 1e-14 * norm0) {
            return Err(Error::DegenerateBasis { function: basis.functions()[k].to_string() });
        }
        r[k * d + k] = norm;
        cols[k].iter_mut().for_each(|x| *x /= norm);
    }
    Ok(r)
}

/// Chebyshev-distributed `n` points on `[0, t_end]`.
fn chebyshev_points(n: usize, t_end: f64) -> Vec<f64> {
    (0..n)
        .map(|j| {
            let theta = std::f64::consts::PI * (2 * j + 1) as f64 / (2 * n) as f64;
            0.5 * t_end * (1.0 - theta.cos())
        })
        .collect()
}

fn normalize_points(points: &mut Vec<f64>, t_end: f64) {
    points.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let tol = 1e-12 * t_end.max(1.0);
    points.dedup_by(|a, b| (*a - *b).abs() <= tol);
    // the constraint point is always present, exactly
    if let Some(last) = points.last_mut() {
        if (*last - t_end).abs() <= tol {
            *last = t_end;
        }
    }
    if points.last() != Some(&t_end) {
        points.push(t_end);
    }
}

fn decided(threshold: Option<f64>, lower: f64, upper: f64) -> bool {
    threshold.is_some_and(|c| upper <= c || lower > c)
}

/// Top of the local maxima, ties toward the largest location.
fn global_max(maxima: &[(f64, f64)]) -> (f64, f64) {
    let top = maxima.iter().map(|m| m.1).fold(0.0, f64::max);
    let tie = 8.0 * f64::EPSILON * top;
    let arg = maxima
        .iter()
        .filter(|m| m.1 >= top - tie)
        .map(|m| m.0)
        .fold(f64::NEG_INFINITY, f64::max);
    (top, arg)
}

/// Solves the minimax problem on `[0, t_end]` to bracket width `opts.eps`.
pub fn exchange_solve(basis: &Basis, t_end: f64, opts: &ExchangeOptions) -> Result<ExtremalResult> {
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidInput(format!("segment end {t_end} must be positive")));
    }
    if !(opts.eps > 0.0) {
        return Err(Error::InvalidInput("eps must be positive".into()));
    }
    let d = basis.dim();
    if d == 0 {
        return Err(Error::InvalidInput("empty basis".into()));
    }

    // least-norm admissible start: c = a / |a|², so p0(T) = 1
    let a = basis.eval_row(t_end);
    let a2: f64 = a.iter().map(|x| x * x).sum();
    if a2 == 0.0 {
        return Err(Error::LpInfeasible);
    }
    let p0 = QuasiPolynomial::new(basis.clone(), a.iter().map(|x| x / a2).collect());
    let mut density = 1usize;
    let b0 = global_max(&local_abs_maxima(&p0, t_end, density)).0;

    let mut points = chebyshev_points(d, t_end);
    normalize_points(&mut points, t_end);
    let mut state = ExchangeState {
        points,
        lower: 1.0,
        upper: b0.max(1.0),
        incumbent: p0,
        iteration: 0,
    };
    let mut history = Vec::new();
    let mut stalled = 0usize;
    let mut last_r = f64::NEG_INFINITY;

    while state.upper - state.lower >= opts.eps && !decided(opts.decision, state.lower, state.upper) {
        if state.iteration >= opts.max_iter {
            return Err(Error::ExchangeNoConvergence {
                iterations: state.iteration,
                lower: state.lower,
                upper: state.upper,
            });
        }
        state.iteration += 1;
        let (r, pbar) = lp_subproblem(&state.points, basis, t_end)?;
        let maxima = local_abs_maxima(&pbar, t_end, density);
        let (top, _) = global_max(&maxima);

        let (prev_lower, prev_upper) = (state.lower, state.upper);
        state.lower = state.lower.max(r);
        if top < state.upper {
            state.upper = top;
            state.incumbent = pbar.clone();
        }
        // floating noise can push r a hair past the achieved norm
        if state.lower > state.upper {
            state.lower = state.upper;
        }
        history.push(IterationRecord {
            iteration: state.iteration,
            lp_value: r,
            lower: state.lower,
            upper: state.upper,
            points: state.points.len(),
        });

        if (state.lower - prev_lower).abs() < opts.eps / 10.0 && (prev_upper - state.upper).abs() < opts.eps / 10.0 {
            stalled += 1;
            if stalled >= opts.stall_window && density < MAX_DENSITY {
                density *= 4;
                stalled = 0;
            }
        } else {
            stalled = 0;
        }
        if state.upper - state.lower < opts.eps || decided(opts.decision, state.lower, state.upper) {
            break;
        }

        // Dropping points is only safe while r is climbing. With r stuck (the
        // optimal face is not a vertex, typically r = 1) the LP may jump
        // between vertices and removal would cycle, so points accumulate.
        if r > last_r + opts.removal_slack * (1.0 + r) {
            let keep_above = r - opts.removal_slack * (1.0 + r);
            state.points.retain(|&t| t == t_end || pbar.evaluate(t).abs() >= keep_above);
        }
        last_r = r;
        let add_above = top - opts.activity_tol * (1.0 + state.upper);
        state
            .points
            .extend(maxima.iter().filter(|m| m.1 >= add_above).map(|m| m.0));
        normalize_points(&mut state.points, t_end);
    }

    let certificate = state.incumbent;
    let cert_max = local_abs_maxima(&certificate, t_end, density);
    let value = state.upper;
    // the certificate is only as accurate as the bracket, so extrema within
    // its width of the top are indistinguishable from the top
    let active_above = value - (opts.activity_tol * (1.0 + value)).max(state.upper - state.lower);
    let active_points = cert_max.iter().filter(|m| m.1 >= active_above).map(|m| m.0).collect();
    Ok(ExtremalResult {
        value,
        certificate,
        active_points,
        bounds: (state.lower, state.upper),
        iterations: state.iteration,
        history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quasipoly::build_basis;
    use crate::spectra::Spectrum;

    fn basis(s: &str) -> Basis {
        build_basis(&s.parse::<Spectrum>().unwrap())
    }

    #[test]
    fn constraint_point_only() {
        let (r, p) = lp_subproblem(&[1.0], &basis("-0.2, -0.5"), 1.0).unwrap();
        assert!((r - 1.0).abs() < 1e-12);
        assert!((p.evaluate(1.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn one_exponential_two_points() {
        let (r, p) = lp_subproblem(&[0.0, 1.0], &basis("-0.2"), 1.0).unwrap();
        assert!((r - 0.2f64.exp()).abs() < 1e-12);
        assert!((p.coeffs()[0] - 0.2f64.exp()).abs() < 1e-12);
    }

    #[test]
    fn vanishing_function_is_named() {
        // sin(πt) vanishes at t = 0 and t = 1
        let s: Spectrum = format!("-0.1+{}i", std::f64::consts::PI).parse().unwrap();
        let b = basis(&s.to_string());
        let err = lp_subproblem(&[0.0], &b, 2.0).unwrap_err();
        match err {
            Error::DegenerateBasis { function } => assert!(function.contains("sin")),
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn below_and_above_cut_tail() {
        let b = basis("-0.2, -0.5");
        let opts = ExchangeOptions::default();
        let below = exchange_solve(&b, 3.0, &opts).unwrap();
        assert!(below.value - 1.0 < opts.eps, "{below:?}");
        let above = exchange_solve(&b, 5.0, &opts).unwrap();
        assert!(above.value > 1.0 + opts.eps);
        assert!(above.bounds.1 - above.bounds.0 < opts.eps);
    }

    #[test]
    fn bounds_are_monotone() {
        let b = basis("-0.1+0.7i, -0.5+0.3i");
        let res = exchange_solve(&b, 12.0, &ExchangeOptions::default()).unwrap();
        for w in res.history.windows(2) {
            assert!(w[1].lower >= w[0].lower);
            assert!(w[1].upper <= w[0].upper);
        }
        assert!(res.history.iter().all(|h| h.lower <= h.upper));
        assert!((res.certificate.evaluate(12.0) - 1.0).abs() < 1e-10);
    }
}
