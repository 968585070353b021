//! Plot data: CSV samples plus standalone SVG drawings.
//!
//! Trajectories are drawn for the real Jordan realization of the spectrum
//! started from the all-ones vector, which is a generic initial point. Any
//! other generic trajectory of the same matrix is a linear image of it and
//! has the same cut-tail point.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use cuttail::geometry2d::{sample_canonical, symmetrized_hull, CanonicalTrajectory, Point2};
use cuttail::spectra::sample_trajectory;
use cuttail::Spectrum;

use crate::error::CliError;
use crate::input::ResolvedInput;
use crate::job::PlotRequest;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum PlotKind {
    /// Hull and norm plots in 2D, the norm plot otherwise.
    Auto,
    Hull,
    Norm,
}

pub const DEFAULT_PLOT_SAMPLES: usize = 2000;

const SIZE: f64 = 640.0;
const PAD: f64 = 48.0;

fn default_horizon(s: &Spectrum, t_cut: f64) -> f64 {
    (12.0 / s.min_abs_alpha()).max(1.5 * t_cut)
}

/// Writes the requested plots into `req.dir` and returns the file paths.
pub fn emit_plot_data(
    input: &ResolvedInput,
    t_cut: f64,
    horizon: Option<f64>,
    samples: Option<usize>,
    req: &PlotRequest,
) -> Result<Vec<String>, CliError> {
    let d = input.state_dim().max(input.spectrum.dim_pa());
    let (hull, norm) = match req.kind {
        PlotKind::Auto => (d == 2 && input.spectrum.dim_pa() == 2, true),
        PlotKind::Hull => (true, false),
        PlotKind::Norm => (false, true),
    };
    if hull && (d != 2 || input.spectrum.dim_pa() != 2) {
        return Err(CliError::Usage(format!(
            "refusing hull plot: it needs a two-dimensional trajectory spanning the plane, got d = {d} with spectrum {}",
            input.spectrum
        )));
    }
    fs::create_dir_all(&req.dir)?;
    let horizon = horizon.unwrap_or_else(|| default_horizon(&input.spectrum, t_cut));
    let n = samples.unwrap_or(DEFAULT_PLOT_SAMPLES);
    let mut written = Vec::new();
    if hull {
        written.extend(hull_plot(&input.spectrum, t_cut, horizon, n, &req.dir)?);
    }
    if norm {
        written.extend(norm_plot(&input.spectrum, t_cut, horizon, n, &req.dir)?);
    }
    Ok(written)
}

fn write_csv(path: &Path, header: &[&str], rows: impl Iterator<Item = Vec<f64>>) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::Usage(e.to_string()))?;
    w.write_record(header).map_err(|e| CliError::Usage(e.to_string()))?;
    for r in rows {
        w.write_record(r.iter().map(|v| v.to_string())).map_err(|e| CliError::Usage(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

/// Maps data coordinates into the SVG canvas (y pointing up).
struct Frame {
    x0: f64,
    y0: f64,
    sx: f64,
    sy: f64,
}

impl Frame {
    fn new(xmin: f64, xmax: f64, ymin: f64, ymax: f64, equal: bool) -> Self {
        let span = SIZE - 2.0 * PAD;
        let (mut sx, mut sy) = (span / (xmax - xmin).max(1e-300), span / (ymax - ymin).max(1e-300));
        if equal {
            sx = sx.min(sy);
            sy = sx;
        }
        Self { x0: xmin, y0: ymin, sx, sy }
    }

    fn map(&self, p: Point2) -> (f64, f64) {
        (PAD + (p[0] - self.x0) * self.sx, SIZE - PAD - (p[1] - self.y0) * self.sy)
    }

    fn path(&self, pts: impl Iterator<Item = Point2>) -> String {
        let mut s = String::new();
        for p in pts {
            let (x, y) = self.map(p);
            let _ = write!(s, "{x:.2},{y:.2} ");
        }
        s.trim_end().to_string()
    }
}

fn svg_open(title: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SIZE}\" height=\"{SIZE}\" viewBox=\"0 0 {SIZE} {SIZE}\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n\
         <text x=\"{PAD}\" y=\"28\" font-family=\"sans-serif\" font-size=\"15\">{title}</text>\n"
    )
}

fn hull_plot(s: &Spectrum, t_cut: f64, horizon: f64, n: usize, dir: &Path) -> Result<Vec<String>, CliError> {
    let traj = CanonicalTrajectory::from_spectrum(s)?;
    let samples = sample_canonical(&traj, 0.0, horizon, n);
    let pts: Vec<Point2> = samples.iter().map(|s| s.1).collect();
    let hull = symmetrized_hull(&pts)?;
    let marker = traj.at(t_cut);

    let csv_path = dir.join("trajectory.csv");
    write_csv(&csv_path, &["t", "x1", "x2"], samples.iter().map(|(t, p)| vec![*t, p[0], p[1]]))?;

    let r = hull.vertices().iter().fold(0.0f64, |m, v| m.max(v[0].abs()).max(v[1].abs())) * 1.05;
    let frame = Frame::new(-r, r, -r, r, true);
    let mut svg = svg_open(&format!("spectrum {s}: trajectory, symmetrized hull, x(T_cut) at T_cut = {t_cut:.6}"));
    let _ = writeln!(
        svg,
        "<polygon points=\"{}\" fill=\"#dde8f5\" stroke=\"#1f4e8c\" stroke-width=\"1.5\"/>",
        frame.path(hull.vertices().iter().copied())
    );
    let _ = writeln!(
        svg,
        "<polyline points=\"{}\" fill=\"none\" stroke=\"#333\" stroke-width=\"1\"/>",
        frame.path(pts.iter().copied())
    );
    let (mx, my) = frame.map(marker);
    let _ = writeln!(svg, "<circle cx=\"{mx:.2}\" cy=\"{my:.2}\" r=\"5\" fill=\"#c0392b\"/>");
    svg.push_str("</svg>\n");
    let svg_path = dir.join("hull.svg");
    fs::write(&svg_path, svg)?;
    Ok(vec![csv_path.display().to_string(), svg_path.display().to_string()])
}

fn norm_plot(s: &Spectrum, t_cut: f64, horizon: f64, n: usize, dir: &Path) -> Result<Vec<String>, CliError> {
    let a = s.to_matrix();
    let x0 = vec![1.0; a.dim()];
    let times: Vec<f64> = (0..n).map(|i| horizon * i as f64 / (n - 1) as f64).collect();
    let norm = |x: &Vec<f64>| x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let norms: Vec<f64> = sample_trajectory(&a, &x0, &times)?.iter().map(norm).collect();
    let at_cut = norm(&sample_trajectory(&a, &x0, &[t_cut])?[0]);

    let csv_path = dir.join("norm.csv");
    write_csv(&csv_path, &["t", "norm"], times.iter().zip(&norms).map(|(t, v)| vec![*t, *v]))?;

    let top = norms.iter().fold(0.0f64, |m, v| m.max(*v)) * 1.05;
    let frame = Frame::new(0.0, horizon, 0.0, top, false);
    let mut svg = svg_open(&format!("spectrum {s}: |x(t)|, T_cut = {t_cut:.6}"));
    let (ax0, ay0) = frame.map([0.0, 0.0]);
    let (ax1, ay1) = frame.map([horizon, top]);
    let _ = writeln!(
        svg,
        "<polyline points=\"{ax0:.2},{ay1:.2} {ax0:.2},{ay0:.2} {ax1:.2},{ay0:.2}\" fill=\"none\" stroke=\"#999\"/>"
    );
    let _ = writeln!(
        svg,
        "<polyline points=\"{}\" fill=\"none\" stroke=\"#1f4e8c\" stroke-width=\"1.5\"/>",
        frame.path(times.iter().zip(&norms).map(|(t, v)| [*t, *v]))
    );
    let (cx, cy) = frame.map([t_cut, at_cut]);
    let _ = writeln!(
        svg,
        "<line x1=\"{cx:.2}\" y1=\"{ay0:.2}\" x2=\"{cx:.2}\" y2=\"{ay1:.2}\" stroke=\"#c0392b\" stroke-dasharray=\"4 4\"/>"
    );
    let _ = writeln!(svg, "<circle cx=\"{cx:.2}\" cy=\"{cy:.2}\" r=\"5\" fill=\"#c0392b\"/>");
    let _ = writeln!(
        svg,
        "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"13\" fill=\"#c0392b\">{t_cut:.5}</text>",
        cx + 8.0,
        ay1 + 16.0
    );
    svg.push_str("</svg>\n");
    let svg_path = dir.join("norm.svg");
    fs::write(&svg_path, svg)?;
    Ok(vec![csv_path.display().to_string(), svg_path.display().to_string()])
}
