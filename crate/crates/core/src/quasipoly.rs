//! The quasipolynomial space spanned by the coordinates of `e^{tA}x`:
//! linear combinations of `t^k e^{αt} cos βt` and `t^k e^{αt} sin βt`.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::roots::newton_bisect;
use crate::spectra::Spectrum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Cos,
    Sin,
}

/// `t^power e^{alpha t} cos(beta t)` or the sine variant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BasisFunction {
    pub power: u32,
    pub alpha: f64,
    pub beta: f64,
    pub phase: Phase,
}

impl BasisFunction {
    pub fn eval(&self, t: f64) -> f64 {
        let magnitude = if self.power == 0 {
            (self.alpha * t).exp()
        } else if t == 0.0 {
            0.0
        } else if t > 0.0 && (self.alpha * t).abs() > 700.0 {
            (self.alpha * t + self.power as f64 * t.ln()).exp()
        } else {
            t.powi(self.power as i32) * (self.alpha * t).exp()
        };
        match self.phase {
            Phase::Cos if self.beta == 0.0 => magnitude,
            Phase::Cos => magnitude * (self.beta * t).cos(),
            Phase::Sin => magnitude * (self.beta * t).sin(),
        }
    }

    fn same_family(&self, power: u32, phase: Phase, other: &BasisFunction) -> bool {
        other.power == power && other.alpha == self.alpha && other.beta == self.beta && other.phase == phase
    }
}

impl fmt::Display for BasisFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.power {
            0 => {}
            1 => f.write_str("t*")?,
            k => write!(f, "t^{k}*")?,
        }
        write!(f, "exp({}t)", self.alpha)?;
        if self.beta != 0.0 {
            let trig = if self.phase == Phase::Cos { "cos" } else { "sin" };
            write!(f, "*{trig}({}t)", self.beta)?;
        }
        Ok(())
    }
}

/// Ordered basis of the quasipolynomial space of a spectrum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Basis {
    functions: Vec<BasisFunction>,
}

/// Powers `k = 0..r-1` for each component, with a sine partner for every
/// cosine when `beta > 0`.
pub fn build_basis(s: &Spectrum) -> Basis {
    let mut functions = Vec::with_capacity(s.dim_pa());
    for c in s.components() {
        for k in 0..c.block as u32 {
            functions.push(BasisFunction { power: k, alpha: c.alpha, beta: c.beta, phase: Phase::Cos });
            if !c.is_real() {
                functions.push(BasisFunction { power: k, alpha: c.alpha, beta: c.beta, phase: Phase::Sin });
            }
        }
    }
    Basis { functions }
}

impl Basis {
    pub fn from_spectrum(s: &Spectrum) -> Self {
        build_basis(s)
    }

    pub fn functions(&self) -> &[BasisFunction] {
        &self.functions
    }

    pub fn dim(&self) -> usize {
        self.functions.len()
    }

    /// Values of every basis function at `t`.
    pub fn eval_row(&self, t: f64) -> Vec<f64> {
        self.functions.iter().map(|f| f.eval(t)).collect()
    }

    pub fn max_beta(&self) -> f64 {
        self.functions.iter().map(|f| f.beta).fold(0.0, f64::max)
    }

    fn position(&self, power: u32, phase: Phase, like: &BasisFunction) -> usize {
        self.functions
            .iter()
            .position(|g| like.same_family(power, phase, g))
            .expect("basis is closed under differentiation")
    }

    /// Coefficients of `p'` given those of `p`.
    fn differentiate(&self, coeffs: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        for (f, &c) in self.functions.iter().zip(coeffs) {
            if c == 0.0 {
                continue;
            }
            let i = self.position(f.power, f.phase, f);
            out[i] += c * f.alpha;
            if f.power > 0 {
                out[self.position(f.power - 1, f.phase, f)] += c * f.power as f64;
            }
            if f.beta != 0.0 {
                match f.phase {
                    Phase::Cos => out[self.position(f.power, Phase::Sin, f)] -= c * f.beta,
                    Phase::Sin => out[self.position(f.power, Phase::Cos, f)] += c * f.beta,
                }
            }
        }
        out
    }
}

/// A coefficient vector over a [`Basis`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuasiPolynomial {
    basis: Basis,
    coeffs: Vec<f64>,
}

impl QuasiPolynomial {
    pub fn new(basis: Basis, coeffs: Vec<f64>) -> Self {
        assert_eq!(basis.dim(), coeffs.len(), "coefficient count must match basis dimension");
        Self { basis, coeffs }
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn evaluate(&self, t: f64) -> f64 {
        self.basis
            .functions
            .iter()
            .zip(&self.coeffs)
            .filter(|(_, c)| **c != 0.0)
            .map(|(f, c)| c * f.eval(t))
            .sum()
    }

    pub fn derivative(&self) -> QuasiPolynomial {
        QuasiPolynomial {
            basis: self.basis.clone(),
            coeffs: self.basis.differentiate(&self.coeffs),
        }
    }

    /// `Σ |c_i| · sup_{t ≥ t0} |f_i(t)|`, an upper bound for `|p|` on
    /// `[t0, ∞)`. Infinite unless every exponent is negative.
    pub fn tail_bound(&self, t0: f64) -> f64 {
        self.basis
            .functions
            .iter()
            .zip(&self.coeffs)
            .map(|(f, c)| {
                if *c == 0.0 {
                    return 0.0;
                }
                if f.alpha >= 0.0 {
                    return f64::INFINITY;
                }
                // t^k e^{αt} peaks at t = k/|α|
                let peak = f.power as f64 / -f.alpha;
                let t = t0.max(peak);
                let m = if f.power == 0 {
                    (f.alpha * t).exp()
                } else {
                    (f.alpha * t + f.power as f64 * t.ln()).exp()
                };
                c.abs() * m
            })
            .sum()
    }
}

/// Number of uniform samples used to locate maxima on `[0, t_end]`, scaled by
/// `density`: at least 64 samples per period of the fastest oscillation.
pub fn grid_size(basis: &Basis, t_end: f64, density: usize) -> usize {
    let per_period = (64.0 * t_end * basis.max_beta() / (2.0 * PI)).ceil() as usize;
    (2048usize).max(per_period + 64 * basis.dim()) * density.max(1)
}

const NEWTON_XTOL: f64 = 1e-12;
const NEWTON_MAX_ITER: usize = 60;

/// Local maxima of `|p|` on `[0, t_end]` as `(t, |p(t)|)`, sorted by `t`.
/// Endpoints are included when `|p|` does not increase into the interval.
pub fn local_abs_maxima(p: &QuasiPolynomial, t_end: f64, density: usize) -> Vec<(f64, f64)> {
    assert!(t_end > 0.0);
    let dp = p.derivative();
    let ddp = dp.derivative();
    let n = grid_size(p.basis(), t_end, density);
    let ts: Vec<f64> = (0..n).map(|i| t_end * i as f64 / (n - 1) as f64).collect();
    let vals: Vec<f64> = ts.iter().map(|&t| p.evaluate(t)).collect();
    let slopes: Vec<f64> = ts.iter().map(|&t| dp.evaluate(t)).collect();
    // sign of d|p|²/dt
    let g: Vec<f64> = vals.iter().zip(&slopes).map(|(v, s)| v * s).collect();

    let mut out = Vec::new();
    if g[0] <= 0.0 {
        out.push((0.0, vals[0].abs()));
    }
    for i in 0..n - 1 {
        if !(g[i] > 0.0 && g[i + 1] <= 0.0) {
            continue;
        }
        let (a, b) = (ts[i], ts[i + 1]);
        if i + 1 == n - 1 && g[i + 1] == 0.0 {
            continue; // handled as the right endpoint
        }
        let root = newton_bisect(|t| (dp.evaluate(t), ddp.evaluate(t)), a, b, NEWTON_XTOL, NEWTON_MAX_ITER);
        let cand = match root {
            Some(t) => (t, p.evaluate(t).abs()),
            None => {
                // p' keeps its sign: p crossed zero inside, keep the better end
                if vals[i].abs() >= vals[i + 1].abs() {
                    (a, vals[i].abs())
                } else {
                    (b, vals[i + 1].abs())
                }
            }
        };
        let best_grid = vals[i].abs().max(vals[i + 1].abs());
        if cand.1 >= best_grid {
            out.push(cand);
        } else if vals[i].abs() >= vals[i + 1].abs() {
            out.push((a, vals[i].abs()));
        } else {
            out.push((b, vals[i + 1].abs()));
        }
    }
    if g[n - 1] >= 0.0 {
        out.push((t_end, vals[n - 1].abs()));
    }
    out.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    out.dedup_by(|x, y| (x.0 - y.0).abs() <= 1e-12 * t_end.max(1.0));
    out
}

/// Global maximum of `|p|` on `[0, t_end]` and its location; among values
/// tied to within a few ulps the largest location wins.
pub fn sup_abs_on_interval(p: &QuasiPolynomial, t_end: f64, density: usize) -> (f64, f64) {
    let maxima = local_abs_maxima(p, t_end, density);
    let top = maxima.iter().map(|m| m.1).fold(0.0, f64::max);
    let tie = 8.0 * f64::EPSILON * top;
    let arg = maxima
        .iter()
        .filter(|m| m.1 >= top - tie)
        .map(|m| m.0)
        .fold(f64::NEG_INFINITY, f64::max);
    (top, arg)
}
