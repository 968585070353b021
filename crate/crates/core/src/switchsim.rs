//! Switching-system simulator with dwell windows.
//!
//! A system is a finite set of Hurwitz modes, each with a minimal dwell time
//! `m(A)`. A law is a sequence of `(mode, duration)` segments. Capped laws
//! also respect `duration ≤ m(A) + T_cut(A)`. The randomized search below
//! compares the worst growth found under both regimes. It is an empirical
//! probe and certifies nothing.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::catalog;
use crate::cuttail::{find_cut_tail, CutTailOptions};
use crate::error::{Error, Result};
use crate::matrix::RealMatrix;
use crate::spectra::{analyze, default_cluster_tol, matrix_exponential, Spectrum, DEFAULT_RANK_TOL};

/// Candidates drawn per greedy step.
pub const CANDIDATES_PER_STEP: usize = 32;
/// Uncapped durations are drawn from `[m, m + UNCAPPED_SPAN · T_cut]`.
pub const UNCAPPED_SPAN: f64 = 4.0;
const INTERIOR_SAMPLES: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mode {
    pub label: String,
    pub matrix: RealMatrix,
    pub spectrum: Spectrum,
    pub t_cut: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwitchingSystem {
    modes: Vec<Mode>,
    dwell_min: Vec<f64>,
    /// `m + T_cut` per mode; the upper end of the capped window.
    dwell_max: Vec<f64>,
}

impl SwitchingSystem {
    pub fn new(modes: Vec<Mode>, dwell_min: Vec<f64>) -> Result<Self> {
        if modes.is_empty() {
            return Err(Error::InvalidInput("a switching system needs at least one mode".into()));
        }
        if modes.len() != dwell_min.len() {
            return Err(Error::InvalidInput("one minimal dwell time per mode is required".into()));
        }
        let dim = modes[0].matrix.dim();
        for (mode, &m) in modes.iter().zip(&dwell_min) {
            mode.spectrum.require_hurwitz()?;
            if mode.matrix.dim() != dim {
                return Err(Error::InvalidInput(format!("mode {} has a different dimension", mode.label)));
            }
            if !(m > 0.0 && m.is_finite()) {
                return Err(Error::InvalidInput(format!("dwell time of mode {} must be positive", mode.label)));
            }
        }
        let dwell_max = modes.iter().zip(&dwell_min).map(|(mode, m)| m + mode.t_cut).collect();
        Ok(Self { modes, dwell_min, dwell_max })
    }

    /// Builds modes from matrices, computing spectra and cut-tail points.
    pub fn from_matrices(mats: Vec<(String, RealMatrix)>, dwell_min: Vec<f64>, opts: &CutTailOptions) -> Result<Self> {
        let modes = mats
            .into_iter()
            .map(|(label, matrix)| {
                let spectrum = analyze(&matrix, default_cluster_tol(&matrix), DEFAULT_RANK_TOL)?.spectrum;
                let t_cut = find_cut_tail(&spectrum, opts)?.t_cut;
                Ok(Mode { label, matrix, spectrum, t_cut })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(modes, dwell_min)
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn dim(&self) -> usize {
        self.modes[0].matrix.dim()
    }

    pub fn dwell_min(&self, mode: usize) -> f64 {
        self.dwell_min[mode]
    }

    /// Longest admissible duration for `mode`.
    pub fn dwell_max(&self, mode: usize, capped: bool) -> f64 {
        if capped {
            self.dwell_max[mode]
        } else {
            f64::INFINITY
        }
    }
}

/// The two planar reference modes (a diagonal pair and a damped rotation)
/// with a common minimal dwell time.
pub fn bundled_system(dwell_min: f64) -> Result<SwitchingSystem> {
    SwitchingSystem::from_matrices(
        vec![
            ("diagonal".to_string(), catalog::diagonal_pair()),
            ("rotation".to_string(), catalog::damped_rotation()),
        ],
        vec![dwell_min; 2],
        &CutTailOptions::default(),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub mode: usize,
    pub duration: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SwitchingLaw {
    segments: Vec<Segment>,
}

impl SwitchingLaw {
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        for (i, s) in segments.iter().enumerate() {
            if !(s.duration > 0.0 && s.duration.is_finite()) {
                return Err(Error::InvalidInput(format!("segment {i} has non-positive duration")));
            }
            if i > 0 && segments[i - 1].mode == s.mode {
                return Err(Error::InvalidInput(format!("segments {} and {i} use the same mode", i - 1)));
            }
        }
        Ok(Self { segments })
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn total_time(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).sum()
    }
}

/// Every duration lies in `[m, M]`, with `M = m + T_cut` when capped.
pub fn validate_law(sys: &SwitchingSystem, law: &SwitchingLaw, capped: bool) -> bool {
    law.segments.iter().all(|s| {
        s.mode < sys.modes.len() && s.duration >= sys.dwell_min(s.mode) && s.duration <= sys.dwell_max(s.mode, capped)
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Simulation {
    pub final_point: Vec<f64>,
    /// `(time, ‖x‖₂)` at segment ends and interior points.
    pub norms: Vec<(f64, f64)>,
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Exact piecewise propagation `x ← e^{d·A} x`.
pub fn simulate(sys: &SwitchingSystem, law: &SwitchingLaw, x0: &[f64]) -> Result<Simulation> {
    if x0.len() != sys.dim() {
        return Err(Error::InvalidInput(format!("initial point has length {}, system dimension is {}", x0.len(), sys.dim())));
    }
    if law.segments.iter().any(|s| s.mode >= sys.modes.len()) {
        return Err(Error::InvalidInput("law refers to an unknown mode".into()));
    }
    let mut x = x0.to_vec();
    let mut t = 0.0;
    let mut norms = vec![(0.0, norm(&x))];
    for seg in &law.segments {
        let a = &sys.modes[seg.mode].matrix;
        for k in 1..=INTERIOR_SAMPLES {
            let h = seg.duration * k as f64 / (INTERIOR_SAMPLES + 1) as f64;
            norms.push((t + h, norm(&matrix_exponential(a, h)?.mul_vec(&x))));
        }
        x = matrix_exponential(a, seg.duration)?.mul_vec(&x);
        t += seg.duration;
        norms.push((t, norm(&x)));
    }
    Ok(Simulation { final_point: x, norms })
}

/// Spectral norm, in closed form for 2×2 matrices.
fn spectral_norm(m: &RealMatrix) -> f64 {
    if m.dim() == 2 {
        let (a, b, c, d) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
        let f2 = a * a + b * b + c * c + d * d;
        let det = a * d - b * c;
        let disc = (f2 * f2 - 4.0 * det * det).max(0.0).sqrt();
        ((f2 + disc) / 2.0).sqrt()
    } else {
        m.norm_2()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub law: SwitchingLaw,
    /// `log ‖Φ‖₂ / t` for the product `Φ` of the law over its total time `t`.
    pub exponent: f64,
}

/// Randomized greedy search for a fast-growing (slowest-decaying) law.
/// `budget` independent greedy runs are made; each grows a law step by step
/// toward `horizon`, keeping the best of [`CANDIDATES_PER_STEP`] random
/// `(mode, duration)` candidates by running growth exponent.
pub fn worst_case_search(
    sys: &SwitchingSystem,
    horizon: f64,
    capped: bool,
    budget: usize,
    seed: u64,
) -> Result<SearchResult> {
    if budget == 0 {
        return Err(Error::InvalidInput("budget must be at least 1".into()));
    }
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::InvalidInput("horizon must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = sys.modes.len();
    let mut best: Option<SearchResult> = None;

    for _ in 0..budget {
        let mut phi = RealMatrix::identity(sys.dim());
        let mut elapsed = 0.0;
        let mut segments: Vec<Segment> = Vec::new();
        loop {
            let remaining = horizon - elapsed;
            let last = segments.last().map(|s| s.mode);
            let allowed: Vec<usize> = (0..n).filter(|&i| Some(i) != last && sys.dwell_min(i) <= remaining).collect();
            if allowed.is_empty() {
                break;
            }
            let mut step_best: Option<(f64, Segment, RealMatrix)> = None;
            for _ in 0..CANDIDATES_PER_STEP {
                let mode = allowed[rng.random_range(0..allowed.len())];
                let lo = sys.dwell_min(mode);
                let span = if capped { 1.0 } else { UNCAPPED_SPAN };
                let hi = (lo + span * sys.modes[mode].t_cut).min(sys.dwell_max(mode, capped));
                let u: f64 = rng.random();
                let mut duration = lo * (hi / lo).powf(u);
                // a one-mode law cannot switch, so it simply runs to the horizon
                if n == 1 && !capped {
                    duration = remaining;
                }
                duration = duration.min(remaining).max(lo);
                let next = &matrix_exponential(&sys.modes[mode].matrix, duration)? * &phi;
                let score = spectral_norm(&next).ln() / (elapsed + duration);
                if step_best.as_ref().is_none_or(|b| score > b.0) {
                    step_best = Some((score, Segment { mode, duration }, next));
                }
            }
            let (_, seg, next) = step_best.expect("at least one candidate");
            phi = next;
            elapsed += seg.duration;
            segments.push(seg);
            if horizon - elapsed <= 1e-12 * horizon {
                break;
            }
        }
        if segments.is_empty() {
            return Err(Error::InvalidInput("horizon is shorter than every minimal dwell time".into()));
        }
        let exponent = spectral_norm(&phi).ln() / elapsed;
        if best.as_ref().is_none_or(|b| exponent > b.exponent) {
            best = Some(SearchResult { law: SwitchingLaw { segments }, exponent });
        }
    }
    Ok(best.expect("budget ≥ 1"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn system() -> SwitchingSystem {
        bundled_system(0.1).unwrap()
    }

    #[test]
    fn window_checks() {
        let sys = system();
        let m = sys.dwell_min(0);
        let t_cut = sys.modes()[0].t_cut;
        let at_min = SwitchingLaw::new(vec![Segment { mode: 0, duration: m }]).unwrap();
        assert!(validate_law(&sys, &at_min, true));
        let long = SwitchingLaw::new(vec![Segment { mode: 0, duration: m + t_cut + 0.1 }]).unwrap();
        assert!(!validate_law(&sys, &long, true));
        assert!(validate_law(&sys, &long, false));
        let short = SwitchingLaw::new(vec![Segment { mode: 1, duration: 0.05 }]).unwrap();
        assert!(!validate_law(&sys, &short, false));
    }

    #[test]
    fn law_invariants() {
        assert!(SwitchingLaw::new(vec![Segment { mode: 0, duration: 1.0 }, Segment { mode: 0, duration: 1.0 }]).is_err());
        assert!(SwitchingLaw::new(vec![Segment { mode: 0, duration: 0.0 }]).is_err());
    }

    #[test]
    fn decay_and_empty_law() {
        let sys = system();
        let x0 = [1.0, -2.0];
        let empty = simulate(&sys, &SwitchingLaw::default(), &x0).unwrap();
        assert_eq!(empty.final_point, x0.to_vec());
        let long = SwitchingLaw::new(vec![Segment { mode: 1, duration: 200.0 }]).unwrap();
        let sim = simulate(&sys, &long, &x0).unwrap();
        assert!(norm(&sim.final_point) < 1e-6 * norm(&x0));
        assert_eq!(sim.norms.len(), 1 + INTERIOR_SAMPLES + 1);
    }

    #[test]
    fn one_segment_is_one_exponential() {
        let sys = system();
        let x0 = [0.3, 0.7];
        let law = SwitchingLaw::new(vec![Segment { mode: 1, duration: 2.5 }]).unwrap();
        let sim = simulate(&sys, &law, &x0).unwrap();
        let direct = matrix_exponential(&sys.modes()[1].matrix, 2.5).unwrap().mul_vec(&x0);
        assert_eq!(sim.final_point, direct);
    }

    #[test]
    fn spectral_norm_closed_form() {
        let m = RealMatrix::from_rows(vec![vec![1.0, 2.0], vec![-0.5, 3.0]]).unwrap();
        assert!((spectral_norm(&m) - m.norm_2()).abs() < 1e-12);
    }

    #[test]
    fn search_is_deterministic_and_nested() {
        let sys = system();
        let a = worst_case_search(&sys, 30.0, true, 2, 7).unwrap();
        let b = worst_case_search(&sys, 30.0, true, 2, 7).unwrap();
        assert_eq!(a, b);
        assert!(validate_law(&sys, &a.law, true));
        assert!(validate_law(&sys, &a.law, false));
        let u = worst_case_search(&sys, 30.0, false, 2, 7).unwrap();
        assert!(validate_law(&sys, &u.law, false));
    }

    #[test]
    fn single_mode_exponent() {
        let m = catalog::diagonal_pair();
        let sys = SwitchingSystem::from_matrices(vec![("d".into(), m)], vec![0.1], &CutTailOptions::default()).unwrap();
        let r = worst_case_search(&sys, 50.0, false, 3, 1).unwrap();
        assert!(r.exponent <= -0.2 + 0.01, "{}", r.exponent);
    }
}
