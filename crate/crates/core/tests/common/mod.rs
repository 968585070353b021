#![allow(dead_code)]

use cuttail::quasipoly::{sup_abs_on_interval, Basis, QuasiPolynomial};
use cuttail::{RealMatrix, SpectralComponent, Spectrum};
use microlp::{ComparisonOp, OptimizationDirection, Problem};
use rand::Rng;

/// Classical fourth-order Runge-Kutta for `x' = A x` over `[0, t]`.
pub fn rk4(a: &RealMatrix, x0: &[f64], t: f64, steps: usize) -> Vec<f64> {
    let h = t / steps as f64;
    let f = |x: &[f64]| a.mul_vec(x);
    let axpy = |x: &[f64], k: &[f64], s: f64| -> Vec<f64> { x.iter().zip(k).map(|(a, b)| a + s * b).collect() };
    let mut x = x0.to_vec();
    for _ in 0..steps {
        let k1 = f(&x);
        let k2 = f(&axpy(&x, &k1, h / 2.0));
        let k3 = f(&axpy(&x, &k2, h / 2.0));
        let k4 = f(&axpy(&x, &k3, h));
        for i in 0..x.len() {
            x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    x
}

pub fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Minimax on a uniform grid of `n` points by an independent LP solver.
/// Returns the grid value `v_g` (a lower bound for the continuous problem)
/// and the true sup `u_g` of the grid optimizer on `[0, T]` (an upper bound).
pub fn grid_minimax(basis: &Basis, t_end: f64, n: usize) -> (f64, f64) {
    let d = basis.dim();
    let grid: Vec<f64> = (0..n).map(|i| t_end * i as f64 / (n - 1) as f64).collect();
    let rows: Vec<Vec<f64>> = grid.iter().map(|&t| basis.eval_row(t)).collect();
    // column scaling keeps the independent solver well conditioned
    let scale: Vec<f64> = (0..d)
        .map(|k| rows.iter().fold(0.0f64, |m, r| m.max(r[k].abs())).max(1e-300))
        .collect();
    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let c: Vec<_> = (0..d).map(|_| lp.add_var(0.0, (f64::NEG_INFINITY, f64::INFINITY))).collect();
    let r = lp.add_var(1.0, (0.0, f64::INFINITY));
    for row in &rows {
        let mut up: Vec<_> = c.iter().enumerate().map(|(k, &v)| (v, row[k] / scale[k])).collect();
        up.push((r, -1.0));
        lp.add_constraint(&up[..], ComparisonOp::Le, 0.0);
        let mut down: Vec<_> = c.iter().enumerate().map(|(k, &v)| (v, -row[k] / scale[k])).collect();
        down.push((r, -1.0));
        lp.add_constraint(&down[..], ComparisonOp::Le, 0.0);
    }
    let end = rows.last().unwrap();
    let eq: Vec<_> = c.iter().enumerate().map(|(k, &v)| (v, end[k] / scale[k])).collect();
    lp.add_constraint(&eq[..], ComparisonOp::Eq, 1.0);
    let sol = lp.solve().expect("grid LP").into_solution().expect("grid LP solution");
    let v_g = sol.objective();
    let coeffs: Vec<f64> = (0..d).map(|k| sol.var_value(c[k]) / scale[k]).collect();
    let p = QuasiPolynomial::new(basis.clone(), coeffs);
    // the grid optimizer satisfies p(T) = 1 only up to solver precision
    let pt = p.evaluate(t_end);
    let u_g = sup_abs_on_interval(&p, t_end, 4).0 / pt;
    (v_g, u_g)
}

/// Random Hurwitz spectrum with `dim_pa` in 2..=4 and well separated modes.
pub fn random_spectrum(rng: &mut impl Rng) -> Spectrum {
    loop {
        let target = rng.random_range(2..=4usize);
        let mut comps: Vec<SpectralComponent> = Vec::new();
        let mut width = 0;
        while width < target {
            let alpha = -rng.random_range(0.05..1.0);
            let c = if target - width >= 2 && rng.random_bool(0.5) {
                SpectralComponent::complex(alpha, rng.random_range(0.1..1.5))
            } else {
                SpectralComponent::real(alpha)
            };
            width += c.width();
            comps.push(c);
        }
        let separated = comps.iter().enumerate().all(|(i, a)| {
            comps[..i]
                .iter()
                .all(|b| (a.alpha - b.alpha).abs() > 0.05 || (a.beta - b.beta).abs() > 0.05)
        });
        if separated {
            if let Ok(s) = Spectrum::new(comps) {
                return s;
            }
        }
    }
}

pub fn random_planar_spectrum(rng: &mut impl Rng, complex: bool) -> Spectrum {
    if complex {
        Spectrum::new(vec![SpectralComponent::complex(
            -rng.random_range(0.05..1.0),
            rng.random_range(0.1..2.0),
        )])
        .unwrap()
    } else {
        let a1: f64 = -rng.random_range(0.05..1.0);
        let mut a2 = a1;
        while (a2 - a1).abs() < 0.1 * a1.abs() {
            a2 = -rng.random_range(0.05..1.0);
        }
        Spectrum::new(vec![SpectralComponent::real(a1), SpectralComponent::real(a2)]).unwrap()
    }
}

/// `I + 0.4·G` with Gaussian-like entries, rejected until its condition
/// number (in the Frobenius norm) is below 20.
pub fn random_similarity(rng: &mut impl Rng, d: usize) -> RealMatrix {
    loop {
        let mut data = vec![0.0; d * d];
        for (i, x) in data.iter_mut().enumerate() {
            let g: f64 = (0..4).map(|_| rng.random_range(-1.0..1.0)).sum::<f64>() / 2.0;
            *x = 0.4 * g + if i % (d + 1) == 0 { 1.0 } else { 0.0 };
        }
        let s = RealMatrix::new(d, data).unwrap();
        if let Some(inv) = s.inverse() {
            if s.norm_fro() * inv.norm_fro() < 20.0 {
                return s;
            }
        }
    }
}
