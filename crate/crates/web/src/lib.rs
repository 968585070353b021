//! WebAssembly bindings behind the static page in `www/`.
//!
//! Each exported function takes plain strings and numbers and returns a JSON
//! document. The work is done by `*_json` functions that are ordinary Rust,
//! so they are tested natively.

use cuttail::chebexchange::{exchange_solve, ExchangeOptions};
use cuttail::cuttail::{cut_tail_closed_form, find_cut_tail, CutTailOptions, Method};
use cuttail::geometry2d::{sample_canonical, symmetrized_hull, CanonicalTrajectory, Point2};
use cuttail::quasipoly::build_basis;
use cuttail::Spectrum;
use serde::Serialize;
use wasm_bindgen::prelude::*;

const MAX_SAMPLES: usize = 20_000;

fn parse(spectrum: &str) -> Result<Spectrum, String> {
    let s: Spectrum = spectrum.parse().map_err(|e: cuttail::Error| e.to_string())?;
    s.require_hurwitz().map_err(|e| e.to_string())?;
    Ok(s)
}

fn to_json(v: &impl Serialize) -> Result<String, String> {
    serde_json::to_string(v).map_err(|e| e.to_string())
}

fn check_samples(n: usize) -> Result<(), String> {
    if (3..=MAX_SAMPLES).contains(&n) {
        Ok(())
    } else {
        Err(format!("samples must lie in 3..={MAX_SAMPLES}, got {n}"))
    }
}

#[derive(Debug, Serialize)]
pub struct CutTailView {
    pub spectrum: String,
    pub dim_pa: usize,
    pub t_cut: f64,
    pub bracket: (f64, f64),
    pub method: Method,
    pub closed_form: Option<f64>,
    pub basis: Vec<String>,
    pub coeffs: Vec<f64>,
    pub evaluations: usize,
}

pub fn cut_tail_json(spectrum: &str) -> Result<String, String> {
    let s = parse(spectrum)?;
    let r = find_cut_tail(&s, &CutTailOptions::default()).map_err(|e| e.to_string())?;
    let (basis, coeffs) = match &r.certificate {
        Some(p) => (p.basis().functions().iter().map(ToString::to_string).collect(), p.coeffs().to_vec()),
        None => (Vec::new(), Vec::new()),
    };
    to_json(&CutTailView {
        spectrum: s.to_string(),
        dim_pa: s.dim_pa(),
        t_cut: r.t_cut,
        bracket: r.bracket,
        method: r.method,
        closed_form: cut_tail_closed_form(&s).ok().map(|c| c.t_cut),
        basis,
        coeffs,
        evaluations: r.predicate_evals.len(),
    })
}

#[derive(Debug, Serialize)]
pub struct PlanarView {
    pub t_cut: f64,
    pub trajectory: Vec<Point2>,
    pub hull: Vec<Point2>,
    pub marker: Point2,
}

/// Trajectory, symmetrized hull and the point `x(T_cut)` for a 2D spectrum.
/// The hull is taken over `[0, 1.5·T_cut]`, which already contains every
/// extreme point.
pub fn planar_json(spectrum: &str, samples: usize) -> Result<String, String> {
    check_samples(samples)?;
    let s = parse(spectrum)?;
    if s.dim_pa() != 2 {
        return Err(format!("the planar view needs a two-dimensional spectrum, got dim {}", s.dim_pa()));
    }
    let t_cut = cut_tail_closed_form(&s).map_err(|e| e.to_string())?.t_cut;
    let traj = CanonicalTrajectory::from_spectrum(&s).map_err(|e| e.to_string())?;
    let horizon = (12.0 / s.min_abs_alpha()).max(1.5 * t_cut);
    let trajectory: Vec<Point2> = sample_canonical(&traj, 0.0, horizon, samples).into_iter().map(|p| p.1).collect();
    let arc: Vec<Point2> = sample_canonical(&traj, 0.0, 1.5 * t_cut, samples).into_iter().map(|p| p.1).collect();
    let hull = symmetrized_hull(&arc).map_err(|e| e.to_string())?;
    to_json(&PlanarView { t_cut, trajectory, hull: hull.vertices().to_vec(), marker: traj.at(t_cut) })
}

#[derive(Debug, Serialize)]
pub struct CertificateView {
    pub t: f64,
    pub value: f64,
    pub bounds: (f64, f64),
    pub active_points: Vec<f64>,
    pub curve: Vec<(f64, f64)>,
}

/// Minimax quasipolynomial on `[0, t]` sampled at `samples` points.
pub fn certificate_json(spectrum: &str, t: f64, samples: usize) -> Result<String, String> {
    check_samples(samples)?;
    if !(t > 0.0 && t.is_finite()) {
        return Err(format!("T must be positive, got {t}"));
    }
    let s = parse(spectrum)?;
    let r = exchange_solve(&build_basis(&s), t, &ExchangeOptions::default()).map_err(|e| e.to_string())?;
    let curve = (0..samples)
        .map(|i| {
            let x = t * i as f64 / (samples - 1) as f64;
            (x, r.certificate.evaluate(x))
        })
        .collect();
    to_json(&CertificateView { t, value: r.value, bounds: r.bounds, active_points: r.active_points, curve })
}

#[wasm_bindgen]
pub fn cut_tail(spectrum: &str) -> Result<String, JsError> {
    cut_tail_json(spectrum).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn planar(spectrum: &str, samples: usize) -> Result<String, JsError> {
    planar_json(spectrum, samples).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn certificate(spectrum: &str, t: f64, samples: usize) -> Result<String, JsError> {
    certificate_json(spectrum, t, samples).map_err(|e| JsError::new(&e))
}
