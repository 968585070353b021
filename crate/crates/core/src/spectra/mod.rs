//! Real-matrix analysis: eigenvalues grouped into conjugate-closed
//! components, the Hurwitz test, the degree of the minimal polynomial, the
//! matrix exponential and trajectory sampling.

mod expm;
mod schur;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::RealMatrix;

pub use expm::matrix_exponential;
pub use schur::eigenvalues_raw;

/// One eigenvalue `alpha ± i beta` (stored once, `beta >= 0`) together with
/// the size of its largest Jordan block.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralComponent {
    pub alpha: f64,
    pub beta: f64,
    pub block: usize,
}

impl SpectralComponent {
    pub fn real(alpha: f64) -> Self {
        Self { alpha, beta: 0.0, block: 1 }
    }

    pub fn complex(alpha: f64, beta: f64) -> Self {
        Self { alpha, beta, block: 1 }
    }

    pub fn with_block(mut self, block: usize) -> Self {
        self.block = block;
        self
    }

    pub fn is_real(&self) -> bool {
        self.beta == 0.0
    }

    /// Number of quasipolynomial basis functions this component contributes.
    pub fn width(&self) -> usize {
        if self.is_real() {
            self.block
        } else {
            2 * self.block
        }
    }
}

/// A validated list of spectral components. `dim_pa` is the dimension of the
/// quasipolynomial space the components span.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<SpectralComponent>", into = "Vec<SpectralComponent>")]
pub struct Spectrum {
    components: Vec<SpectralComponent>,
    dim_pa: usize,
}

impl Spectrum {
    pub fn new(components: Vec<SpectralComponent>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidInput("spectrum has no components".into()));
        }
        for (i, c) in components.iter().enumerate() {
            if !c.alpha.is_finite() || !c.beta.is_finite() {
                return Err(Error::InvalidInput(format!("component {i} is not finite")));
            }
            if c.beta < 0.0 {
                return Err(Error::InvalidInput(format!(
                    "component {i} has negative imaginary part; store conjugate pairs once with beta >= 0"
                )));
            }
            if c.block == 0 {
                return Err(Error::InvalidInput(format!("component {i} has block size 0")));
            }
            if components[..i]
                .iter()
                .any(|o| o.alpha == c.alpha && o.beta == c.beta)
            {
                return Err(Error::InvalidInput(format!(
                    "duplicate eigenvalue {}",
                    format_eigenvalue(c.alpha, c.beta)
                )));
            }
        }
        let dim_pa = components.iter().map(SpectralComponent::width).sum();
        Ok(Self { components, dim_pa })
    }

    pub fn components(&self) -> &[SpectralComponent] {
        &self.components
    }

    pub fn dim_pa(&self) -> usize {
        self.dim_pa
    }

    /// True iff every component has `alpha < -margin`.
    pub fn is_hurwitz(&self, margin: f64) -> bool {
        self.components.iter().all(|c| c.alpha < -margin)
    }

    /// Rejects non-Hurwitz spectra with the offending real part.
    pub fn require_hurwitz(&self) -> Result<()> {
        match self.components.iter().find(|c| c.alpha >= 0.0) {
            Some(c) => Err(Error::NotHurwitz { alpha: c.alpha, bound: 0.0 }),
            None => Ok(()),
        }
    }

    /// Smallest `|alpha|` over all components (the slowest mode).
    pub fn min_abs_alpha(&self) -> f64 {
        self.components.iter().map(|c| c.alpha.abs()).fold(f64::INFINITY, f64::min)
    }

    pub fn max_beta(&self) -> f64 {
        self.components.iter().map(|c| c.beta).fold(0.0, f64::max)
    }

    /// The spectrum of `c·A`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c > 0.0) {
            return Err(Error::InvalidInput(format!("time scale {c} must be positive")));
        }
        Self::new(
            self.components
                .iter()
                .map(|s| SpectralComponent { alpha: s.alpha * c, beta: s.beta * c, block: s.block })
                .collect(),
        )
    }

    /// Real Jordan realization: a block-diagonal matrix of size `dim_pa` whose
    /// minimal polynomial has exactly this spectrum and block structure.
    pub fn to_matrix(&self) -> RealMatrix {
        let n = self.dim_pa;
        let mut m = RealMatrix::zeros(n);
        let mut off = 0;
        for c in &self.components {
            if c.is_real() {
                for k in 0..c.block {
                    m[(off + k, off + k)] = c.alpha;
                    if k + 1 < c.block {
                        m[(off + k, off + k + 1)] = 1.0;
                    }
                }
            } else {
                for k in 0..c.block {
                    let i = off + 2 * k;
                    m[(i, i)] = c.alpha;
                    m[(i + 1, i + 1)] = c.alpha;
                    m[(i, i + 1)] = c.beta;
                    m[(i + 1, i)] = -c.beta;
                    if k + 1 < c.block {
                        m[(i, i + 2)] = 1.0;
                        m[(i + 1, i + 3)] = 1.0;
                    }
                }
            }
            off += c.width();
        }
        m
    }
}

impl TryFrom<Vec<SpectralComponent>> for Spectrum {
    type Error = Error;
    fn try_from(c: Vec<SpectralComponent>) -> Result<Self> {
        Self::new(c)
    }
}

impl From<Spectrum> for Vec<SpectralComponent> {
    fn from(s: Spectrum) -> Self {
        s.components
    }
}

fn format_eigenvalue(alpha: f64, beta: f64) -> String {
    if beta == 0.0 {
        format!("{alpha}")
    } else {
        format!("{alpha}+{beta}i")
    }
}

impl fmt::Display for Spectrum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.components.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str(&format_eigenvalue(c.alpha, c.beta))?;
            if c.block > 1 {
                write!(f, ":{}", c.block)?;
            }
        }
        Ok(())
    }
}

/// Parses the compact spectrum grammar: comma-separated terms `a`, `a+bi`
/// or `a-bi`, each with an optional `:r` block-size suffix, for example
/// `"-0.3:2, -0.8+0.9i"`.
impl FromStr for Spectrum {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut comps = Vec::new();
        for (idx, term) in s.split(',').enumerate() {
            let term = term.trim();
            let bad = |why: &str| Error::InvalidInput(format!("spectrum term {} '{term}': {why}", idx + 1));
            if term.is_empty() {
                return Err(bad("empty term"));
            }
            let (value, block) = match term.split_once(':') {
                Some((v, b)) => {
                    let b: usize = b.trim().parse().map_err(|_| bad("block size is not a positive integer"))?;
                    if b == 0 {
                        return Err(bad("block size must be at least 1"));
                    }
                    (v.trim(), b)
                }
                None => (term, 1),
            };
            let (alpha, beta) = parse_eigenvalue(value).ok_or_else(|| bad("expected a, a+bi or a-bi"))?;
            comps.push(SpectralComponent { alpha, beta: beta.abs(), block });
        }
        Self::new(comps)
    }
}

fn parse_eigenvalue(v: &str) -> Option<(f64, f64)> {
    let v: String = v.chars().filter(|c| !c.is_whitespace()).collect();
    let Some(body) = v.strip_suffix('i') else {
        return v.parse().ok().map(|a| (a, 0.0));
    };
    // split at the last sign that is not the leading one or part of an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'))?;
    let alpha: f64 = body[..split].parse().ok()?;
    let imag = &body[split..];
    let beta: f64 = match imag {
        "+" => 1.0,
        "-" => -1.0,
        _ => imag.parse().ok()?,
    };
    (beta != 0.0).then_some((alpha, beta))
}

/// A group of numerically coincident eigenvalues.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenCluster {
    pub alpha: f64,
    pub beta: f64,
    /// Algebraic multiplicity (conjugate pairs counted once).
    pub multiplicity: usize,
    /// Assigned largest Jordan block.
    pub block: usize,
}

/// Everything learned about a matrix on the way to its [`Spectrum`]; kept so
/// callers can log how the Jordan structure was decided.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralAnalysis {
    pub eigenvalues: Vec<(f64, f64)>,
    pub clusters: Vec<EigenCluster>,
    pub minimal_poly_degree: usize,
    pub cluster_tol: f64,
    pub merge_radius: f64,
    pub spectrum: Spectrum,
}

impl SpectralAnalysis {
    /// Human-readable account of the block-size assignment.
    pub fn jordan_summary(&self) -> String {
        let parts: Vec<String> = self
            .clusters
            .iter()
            .map(|c| {
                let kind = if c.multiplicity > 1 && c.block == 1 {
                    "semisimple"
                } else if c.block > 1 {
                    "defective"
                } else {
                    "simple"
                };
                format!(
                    "{} (multiplicity {}, block {}, {kind})",
                    format_eigenvalue(c.alpha, c.beta),
                    c.multiplicity,
                    c.block
                )
            })
            .collect();
        format!(
            "minimal polynomial degree {}; {}",
            self.minimal_poly_degree,
            parts.join("; ")
        )
    }
}

pub fn default_cluster_tol(m: &RealMatrix) -> f64 {
    1e-8 * (1.0 + m.norm_inf())
}

pub const DEFAULT_RANK_TOL: f64 = 1e-8;

/// Eigenvalues of `m` grouped into conjugate-closed components with Jordan
/// block sizes reconciled against the minimal-polynomial degree.
pub fn eigenvalues(m: &RealMatrix, cluster_tol: f64) -> Result<Spectrum> {
    analyze(m, cluster_tol, DEFAULT_RANK_TOL).map(|a| a.spectrum)
}

/// Full spectral analysis with explicit tolerances.
///
/// Eigenvalues within `cluster_tol` always merge. A defective eigenvalue of
/// multiplicity two is only resolved to about `sqrt(eps)` by any backward
/// stable method, so conjugate pairs closer to the real axis than
/// `merge_radius = max(cluster_tol, sqrt(cluster_tol·(1 + ‖m‖∞)))` are snapped
/// onto it and eigenvalues within that radius are clustered. If the clusters
/// still describe more distinct eigenvalues than the minimal polynomial
/// allows, the closest same-kind clusters are merged. Block sizes are then
/// raised, largest multiplicity first, until the total matches the degree.
pub fn analyze(m: &RealMatrix, cluster_tol: f64, rank_tol: f64) -> Result<SpectralAnalysis> {
    if !(cluster_tol > 0.0) || !(rank_tol > 0.0) {
        return Err(Error::InvalidInput("tolerances must be positive".into()));
    }
    let raw = eigenvalues_raw(m)?;
    let scale = 1.0 + m.norm_inf();
    let radius = cluster_tol.max((cluster_tol * scale).sqrt());

    // upper half plane, with near-real pairs snapped to the axis
    let mut points: Vec<(f64, f64)> = raw
        .iter()
        .filter_map(|&(re, im)| {
            if im.abs() <= radius {
                Some((re, 0.0))
            } else if im > 0.0 {
                Some((re, im))
            } else {
                None
            }
        })
        .collect();
    points.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let mut clusters: Vec<(f64, f64, usize)> = Vec::new();
    for (re, im) in points {
        let hit = clusters.iter_mut().find(|c| {
            let (ca, cb) = (c.0 / c.2 as f64, c.1 / c.2 as f64);
            (cb == 0.0) == (im == 0.0) && (ca - re).hypot(cb - im) <= radius
        });
        match hit {
            Some(c) => {
                c.0 += re;
                c.1 += im;
                c.2 += 1;
            }
            None => clusters.push((re, im, 1)),
        }
    }
    let mut clusters: Vec<EigenCluster> = clusters
        .into_iter()
        .map(|(sa, sb, k)| EigenCluster {
            alpha: sa / k as f64,
            beta: sb / k as f64,
            multiplicity: k,
            block: 1,
        })
        .collect();

    let degree = minimal_poly_degree(m, rank_tol);
    let width = |c: &EigenCluster| if c.beta == 0.0 { 1 } else { 2 };
    let total = |cs: &[EigenCluster]| cs.iter().map(|c| width(c) * c.block).sum::<usize>();

    while total(&clusters) > degree {
        let mut best: Option<(usize, usize, f64)> = None;
        for i in 0..clusters.len() {
            for j in i + 1..clusters.len() {
                if (clusters[i].beta == 0.0) != (clusters[j].beta == 0.0) {
                    continue;
                }
                let d = (clusters[i].alpha - clusters[j].alpha).hypot(clusters[i].beta - clusters[j].beta);
                if best.is_none_or(|b| d < b.2) {
                    best = Some((i, j, d));
                }
            }
        }
        let Some((i, j, _)) = best else { break };
        let cj = clusters.remove(j);
        let ci = &mut clusters[i];
        let (wi, wj) = (ci.multiplicity as f64, cj.multiplicity as f64);
        ci.alpha = (ci.alpha * wi + cj.alpha * wj) / (wi + wj);
        ci.beta = (ci.beta * wi + cj.beta * wj) / (wi + wj);
        ci.multiplicity += cj.multiplicity;
    }

    loop {
        let remaining = degree.saturating_sub(total(&clusters));
        if remaining == 0 {
            break;
        }
        let pick = clusters
            .iter()
            .enumerate()
            .filter(|(_, c)| c.block < c.multiplicity && width(c) <= remaining)
            .max_by(|(ia, a), (ib, b)| a.multiplicity.cmp(&b.multiplicity).then(ib.cmp(ia)))
            .map(|(i, _)| i);
        match pick {
            Some(i) => clusters[i].block += 1,
            None => break,
        }
    }

    clusters.sort_by(|a, b| b.alpha.partial_cmp(&a.alpha).unwrap().then(a.beta.partial_cmp(&b.beta).unwrap()));
    let spectrum = Spectrum::new(
        clusters
            .iter()
            .map(|c| SpectralComponent { alpha: c.alpha, beta: c.beta, block: c.block })
            .collect(),
    )?;
    Ok(SpectralAnalysis {
        eigenvalues: raw,
        clusters,
        minimal_poly_degree: degree,
        cluster_tol,
        merge_radius: radius,
        spectrum,
    })
}

/// Degree of the minimal annihilating polynomial: the smallest `k` for which
/// `vec(M^k)` lies within `rank_tol` (relative) of `span{vec(I), …, vec(M^{k-1})}`.
pub fn minimal_poly_degree(m: &RealMatrix, rank_tol: f64) -> usize {
    let d = m.dim();
    let norm = m.norm_inf();
    if norm == 0.0 {
        return 1;
    }
    let scaled = m.scaled(1.0 / norm);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(d);
    let mut power = RealMatrix::identity(d);
    let unit = |v: &[f64]| -> Option<Vec<f64>> {
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        (n > 0.0).then(|| v.iter().map(|x| x / n).collect())
    };
    basis.push(unit(power.as_slice()).unwrap());
    for k in 1..d {
        power = &power * &scaled;
        let Some(mut v) = unit(power.as_slice()) else {
            return k;
        };
        for _ in 0..2 {
            for q in &basis {
                let dot: f64 = q.iter().zip(&v).map(|(a, b)| a * b).sum();
                v.iter_mut().zip(q).for_each(|(x, y)| *x -= dot * y);
            }
        }
        let residual = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if residual <= rank_tol {
            return k;
        }
        basis.push(v.iter().map(|x| x / residual).collect());
    }
    d
}

/// Points `e^{t·m} x0` for sorted nonnegative `times`, stepping with cached
/// exponentials of the increments.
pub fn sample_trajectory(m: &RealMatrix, x0: &[f64], times: &[f64]) -> Result<Vec<Vec<f64>>> {
    if x0.len() != m.dim() {
        return Err(Error::InvalidInput(format!(
            "initial point has {} entries, matrix is {}x{}",
            x0.len(),
            m.dim(),
            m.dim()
        )));
    }
    if times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) || times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidInput("sample times must be finite, nonnegative and sorted".into()));
    }
    let mut cache: HashMap<u64, RealMatrix> = HashMap::new();
    let mut out = Vec::with_capacity(times.len());
    let mut x = x0.to_vec();
    let mut prev = 0.0;
    for &t in times {
        let dt = t - prev;
        if dt > 0.0 {
            let step = match cache.get(&dt.to_bits()) {
                Some(e) => e,
                None => {
                    let e = matrix_exponential(m, dt)?;
                    cache.entry(dt.to_bits()).or_insert(e)
                }
            };
            x = step.mul_vec(&x);
        }
        prev = t;
        out.push(x.clone());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example4() -> RealMatrix {
        RealMatrix::from_rows(vec![
            vec![22.8, 15.7, -74.5, -41.9],
            vec![-11.6, -8.6, 35.8, 20.4],
            vec![-1.2, -0.3, 5.8, 3.0],
            vec![10.2, 5.7, -41.4, -21.2],
        ])
        .unwrap()
    }

    fn close(s: &Spectrum, want: &[(f64, f64, usize)], tol: f64) -> bool {
        s.components().len() == want.len()
            && want.iter().all(|&(a, b, r)| {
                s.components()
                    .iter()
                    .any(|c| (c.alpha - a).abs() < tol && (c.beta - b).abs() < tol && c.block == r)
            })
    }

    #[test]
    fn diagonal_spectrum() {
        let m = RealMatrix::diag(&[-0.2, -0.5]).unwrap();
        let s = eigenvalues(&m, default_cluster_tol(&m)).unwrap();
        assert!(close(&s, &[(-0.2, 0.0, 1), (-0.5, 0.0, 1)], 1e-12));
        assert_eq!(s.dim_pa(), 2);
    }

    #[test]
    fn rotation_spectrum() {
        let m = RealMatrix::from_rows(vec![vec![-0.1, -0.3], vec![0.3, -0.1]]).unwrap();
        let s = eigenvalues(&m, default_cluster_tol(&m)).unwrap();
        assert!(close(&s, &[(-0.1, 0.3, 1)], 1e-12));
        assert_eq!(s.dim_pa(), 2);
    }

    #[test]
    fn two_complex_pairs() {
        let m = example4();
        let s = eigenvalues(&m, default_cluster_tol(&m)).unwrap();
        assert!(close(&s, &[(-0.1, 0.7, 1), (-0.5, 0.3, 1)], 1e-8), "{s}");
        assert_eq!(s.dim_pa(), 4);
    }

    #[test]
    fn hurwitz_checks() {
        let s: Spectrum = "-0.2, -0.5".parse().unwrap();
        assert!(s.is_hurwitz(0.0));
        assert!(!"0+1i".parse::<Spectrum>().unwrap().is_hurwitz(0.0));
        assert!(!"-0.1".parse::<Spectrum>().unwrap().is_hurwitz(0.2));
    }

    #[test]
    fn minimal_degree_cases() {
        assert_eq!(minimal_poly_degree(&RealMatrix::diag(&[-0.2, -0.5]).unwrap(), DEFAULT_RANK_TOL), 2);
        assert_eq!(minimal_poly_degree(&RealMatrix::identity(3).scaled(-2.0), DEFAULT_RANK_TOL), 1);
        assert_eq!(minimal_poly_degree(&RealMatrix::zeros(3), DEFAULT_RANK_TOL), 1);
        let semisimple = RealMatrix::diag(&[-0.3, -0.3, -1.0]).unwrap();
        assert_eq!(minimal_poly_degree(&semisimple, DEFAULT_RANK_TOL), 2);
        let defective: Spectrum = "-0.3:2, -1".parse().unwrap();
        assert_eq!(minimal_poly_degree(&defective.to_matrix(), DEFAULT_RANK_TOL), 3);
    }

    #[test]
    fn semisimple_double_eigenvalue_keeps_block_one() {
        let m = RealMatrix::diag(&[-0.3, -0.3, -1.0]).unwrap();
        let a = analyze(&m, default_cluster_tol(&m), DEFAULT_RANK_TOL).unwrap();
        assert!(close(&a.spectrum, &[(-0.3, 0.0, 1), (-1.0, 0.0, 1)], 1e-12));
        assert!(a.jordan_summary().contains("semisimple"));
    }

    #[test]
    fn defective_block_is_recovered() {
        let s: Spectrum = "-0.3:2, -0.8+0.9i".parse().unwrap();
        let got = eigenvalues(&s.to_matrix(), default_cluster_tol(&s.to_matrix())).unwrap();
        assert!(close(&got, &[(-0.3, 0.0, 2), (-0.8, 0.9, 1)], 1e-6), "{got}");
    }

    #[test]
    fn spectrum_grammar() {
        let s: Spectrum = "-0.3:2, -0.8+0.9i".parse().unwrap();
        assert_eq!(
            s.components(),
            &[SpectralComponent::real(-0.3).with_block(2), SpectralComponent::complex(-0.8, 0.9)]
        );
        assert_eq!(s.dim_pa(), 4);
        assert_eq!(s.to_string().parse::<Spectrum>().unwrap(), s);
        let c: Spectrum = "-0.1-0.3i".parse().unwrap();
        assert_eq!(c.components()[0], SpectralComponent::complex(-0.1, 0.3));
        let e: Spectrum = "-1e-1+3e-1i".parse().unwrap();
        assert_eq!(e.components()[0], SpectralComponent::complex(-0.1, 0.3));
        for bad in ["", "-0.1,", "x", "-0.1:0", "-0.2, -0.2", "-0.1+0i"] {
            assert!(bad.parse::<Spectrum>().is_err(), "{bad}");
        }
    }

    #[test]
    fn trajectory_basics() {
        let m = RealMatrix::from_rows(vec![vec![-0.1, -0.3], vec![0.3, -0.1]]).unwrap();
        let x0 = [1.0, 0.5];
        let pts = sample_trajectory(&m, &x0, &[0.0, 1.0, 2.0, 500.0]).unwrap();
        assert_eq!(pts[0], x0.to_vec());
        let n = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!(n(&pts[3]) <= 1e-3 * n(&x0));
        assert!(sample_trajectory(&m, &x0, &[1.0, 0.5]).is_err());
    }
}
