//! Planar geometric oracle: sampled trajectories, symmetrized convex hulls
//! and boundary/interior classification.
//!
//! This is a brute-force cross-check of the optimization pipeline for
//! two-dimensional spectra. It knows nothing about minimax polynomials; it
//! just samples `x(t)`, builds `co{Γ, -Γ}` and asks where `x(t)` sits.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectra::Spectrum;

pub type Point2 = [f64; 2];

const DUPLICATE_TOL: f64 = 1e-12;

fn cross(o: Point2, a: Point2, b: Point2) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

fn dist(a: Point2, b: Point2) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Convex polygon with counterclockwise vertices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanarHull {
    vertices: Vec<Point2>,
    symmetric: bool,
}

impl PlanarHull {
    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn area(&self) -> f64 {
        let n = self.vertices.len();
        0.5 * (0..n)
            .map(|i| {
                let (a, b) = (self.vertices[i], self.vertices[(i + 1) % n]);
                a[0] * b[1] - a[1] * b[0]
            })
            .sum::<f64>()
    }

    pub fn diameter(&self) -> f64 {
        let v = &self.vertices;
        if self.symmetric {
            return 2.0 * v.iter().map(|p| p[0].hypot(p[1])).fold(0.0, f64::max);
        }
        let mut best = 0.0f64;
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                best = best.max(dist(v[i], v[j]));
            }
        }
        best
    }

    /// Smallest signed distance from `q` to the edge lines, positive inside.
    pub fn signed_distance(&self, q: Point2) -> f64 {
        let n = self.vertices.len();
        (0..n)
            .map(|i| {
                let (a, b) = (self.vertices[i], self.vertices[(i + 1) % n]);
                cross(a, b, q) / dist(a, b)
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Euclidean distance from `q` to the polygon (zero inside).
    pub fn distance_to(&self, q: Point2) -> f64 {
        if self.signed_distance(q) >= 0.0 {
            return 0.0;
        }
        let n = self.vertices.len();
        (0..n)
            .map(|i| segment_distance(q, self.vertices[i], self.vertices[(i + 1) % n]))
            .fold(f64::INFINITY, f64::min)
    }

    /// True when every vertex of `inner` lies in `self` up to `tol`.
    pub fn contains_hull(&self, inner: &PlanarHull, tol: f64) -> bool {
        inner.vertices.iter().all(|&v| self.signed_distance(v) >= -tol)
    }

    /// Checks that `-v` is within `tol` of some vertex, for every vertex `v`.
    pub fn check_central_symmetry(&self, tol: f64) -> bool {
        self.vertices
            .iter()
            .all(|v| self.vertices.iter().any(|w| dist([-v[0], -v[1]], *w) <= tol))
    }
}

fn segment_distance(q: Point2, a: Point2, b: Point2) -> f64 {
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let len2 = dx * dx + dy * dy;
    let s = if len2 > 0.0 {
        (((q[0] - a[0]) * dx + (q[1] - a[1]) * dy) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    dist(q, [a[0] + s * dx, a[1] + s * dy])
}

/// Hausdorff distance between two convex polygons. For convex sets the
/// largest point-to-set distance is attained at a vertex.
pub fn hull_distance(a: &PlanarHull, b: &PlanarHull) -> f64 {
    let one = |x: &PlanarHull, y: &PlanarHull| x.vertices.iter().map(|&v| y.distance_to(v)).fold(0.0, f64::max);
    one(a, b).max(one(b, a))
}

/// Monotone-chain convex hull. Collinear boundary points are dropped.
pub fn convex_hull(points: &[Point2]) -> Result<PlanarHull> {
    if points.iter().any(|p| !(p[0].is_finite() && p[1].is_finite())) {
        return Err(Error::InvalidInput("hull points must be finite".into()));
    }
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    let scale = pts.iter().fold(1.0f64, |m, p| m.max(p[0].abs()).max(p[1].abs()));
    pts.dedup_by(|a, b| dist(*a, *b) <= DUPLICATE_TOL * scale);
    if pts.len() < 3 {
        return Err(Error::DegenerateGeometry(format!("{} distinct points", pts.len())));
    }
    let area_tol = DUPLICATE_TOL * scale * scale;
    let mut hull: Vec<Point2> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &Point2>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for &p in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= area_tol {
                hull.pop();
            }
            hull.push(p);
        }
        // the chain's last point starts the next one
        hull.pop();
    }
    if hull.len() < 3 {
        return Err(Error::DegenerateGeometry("points are collinear".into()));
    }
    Ok(PlanarHull { vertices: hull, symmetric: false })
}

/// Convex hull of `points ∪ -points`.
pub fn symmetrized_hull(points: &[Point2]) -> Result<PlanarHull> {
    let mut all = points.to_vec();
    all.extend(points.iter().map(|p| [-p[0], -p[1]]));
    let mut hull = convex_hull(&all)?;
    hull.symmetric = true;
    Ok(hull)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Interiority {
    Interior,
    Boundary,
    Exterior,
}

pub fn interiority(hull: &PlanarHull, q: Point2, margin: f64) -> Interiority {
    let d = hull.signed_distance(q);
    if d > margin {
        Interiority::Interior
    } else if d >= -margin {
        Interiority::Boundary
    } else {
        Interiority::Exterior
    }
}

/// Canonical planar trajectory of a two-dimensional spectrum:
/// `(e^{a1 t}, e^{a2 t})` for two real modes, `e^{αt}(cos βt, sin βt)` for a
/// complex pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CanonicalTrajectory {
    Real { a1: f64, a2: f64 },
    Rotation { alpha: f64, beta: f64 },
}

impl CanonicalTrajectory {
    pub fn from_spectrum(s: &Spectrum) -> Result<Self> {
        match s.components() {
            [x, y] if x.is_real() && y.is_real() && x.block == 1 && y.block == 1 => {
                Ok(Self::Real { a1: x.alpha, a2: y.alpha })
            }
            [x] if !x.is_real() && x.block == 1 => Ok(Self::Rotation { alpha: x.alpha, beta: x.beta }),
            _ => Err(Error::InvalidInput(format!(
                "the planar oracle needs two simple real eigenvalues or one complex pair, got {s}"
            ))),
        }
    }

    pub fn at(&self, t: f64) -> Point2 {
        match *self {
            Self::Real { a1, a2 } => [(a1 * t).exp(), (a2 * t).exp()],
            Self::Rotation { alpha, beta } => {
                let r = (alpha * t).exp();
                [r * (beta * t).cos(), r * (beta * t).sin()]
            }
        }
    }

    fn slowest_rate(&self) -> f64 {
        match *self {
            Self::Real { a1, a2 } => a1.abs().min(a2.abs()),
            Self::Rotation { alpha, .. } => alpha.abs(),
        }
    }
}

/// Uniform samples `(t_i, x(t_i))`, `i = 0..samples`, on `[t0, t1]`.
pub fn sample_canonical(traj: &CanonicalTrajectory, t0: f64, t1: f64, samples: usize) -> Vec<(f64, Point2)> {
    let n = samples.max(2);
    (0..n)
        .map(|i| {
            let t = t0 + (t1 - t0) * i as f64 / (n - 1) as f64;
            (t, traj.at(t))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometricOptions {
    /// Defaults to `12 / min|α|`.
    pub horizon: Option<f64>,
    pub samples: usize,
    /// Boundary margin as a fraction of the hull diameter.
    pub relative_margin: f64,
}

impl Default for GeometricOptions {
    fn default() -> Self {
        Self { horizon: None, samples: 4000, relative_margin: 1e-8 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometricCut {
    pub t_cut: f64,
    /// Sampling step of the final scan.
    pub step: f64,
    pub margin: f64,
    /// Hull of the final (windowed) sample set.
    pub hull: PlanarHull,
    pub samples: Vec<(f64, Point2)>,
    /// True when the scan splits cleanly into boundary then interior.
    pub monotone: bool,
}

/// Largest sampled `t` whose `x(t)` classifies as boundary against the
/// symmetrized hull of the whole sampled trajectory.
pub fn cut_tail_geometric(s: &Spectrum, opts: &GeometricOptions) -> Result<GeometricCut> {
    s.require_hurwitz()?;
    let traj = CanonicalTrajectory::from_spectrum(s)?;
    if opts.samples < 3 {
        return Err(Error::InvalidInput("need at least 3 samples".into()));
    }
    let horizon = opts.horizon.unwrap_or(12.0 / traj.slowest_rate());
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::InvalidInput(format!("horizon {horizon} must be positive")));
    }
    let p0 = traj.at(0.0);
    let ph = traj.at(horizon);
    let ratio = ph[0].hypot(ph[1]) / p0[0].hypot(p0[1]);
    if ratio > 1e-4 {
        return Err(Error::HorizonTooShort { horizon, ratio });
    }

    let coarse = scan(&traj, horizon, opts)?;
    // Extreme points of the hull lie on the arc up to the cut point, so a
    // window a little past the provisional value gives the same hull with a
    // finer step.
    let window = (1.5 * coarse.t_cut + 2.0 * coarse.step).min(horizon);
    if window < horizon && coarse.t_cut > 0.0 {
        let fine = scan(&traj, window, opts)?;
        if fine.monotone && fine.t_cut < window - 2.0 * fine.step {
            return Ok(fine);
        }
    }
    Ok(coarse)
}

fn scan(traj: &CanonicalTrajectory, t_end: f64, opts: &GeometricOptions) -> Result<GeometricCut> {
    let samples = sample_canonical(traj, 0.0, t_end, opts.samples);
    let pts: Vec<Point2> = samples.iter().map(|s| s.1).collect();
    let hull = symmetrized_hull(&pts)?;
    let margin = opts.relative_margin * hull.diameter();
    let classes: Vec<Interiority> = pts.iter().map(|&p| interiority(&hull, p, margin)).collect();
    let last_boundary = classes.iter().rposition(|c| *c != Interiority::Interior).unwrap_or(0);
    let monotone = classes[..=last_boundary].iter().all(|c| *c == Interiority::Boundary)
        && classes[last_boundary + 1..].iter().all(|c| *c == Interiority::Interior);
    Ok(GeometricCut {
        t_cut: samples[last_boundary].0,
        step: t_end / (samples.len() - 1) as f64,
        margin,
        hull,
        samples,
        monotone,
    })
}
