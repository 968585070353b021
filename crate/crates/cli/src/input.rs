//! Matrix files and the other ways a job names its input.

use std::path::{Path, PathBuf};

use cuttail::catalog;
use cuttail::spectra::{analyze, default_cluster_tol, DEFAULT_RANK_TOL};
use cuttail::{RealMatrix, Spectrum};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Where a job's matrix or spectrum comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum InputSource {
    MatrixFile(PathBuf),
    Spectrum(String),
    Example(String),
}

/// The input as recorded in a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputEcho {
    pub source: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<String>,
}

/// A resolved input: the spectrum to work with plus what was learned
/// getting there.
#[derive(Debug, Clone)]
pub struct ResolvedInput {
    pub echo: InputEcho,
    pub matrix: Option<RealMatrix>,
    pub spectrum: Spectrum,
    pub jordan: Option<String>,
}

impl ResolvedInput {
    /// State-space dimension: the matrix size, or `dim P_A` for a bare spectrum.
    pub fn state_dim(&self) -> usize {
        self.matrix.as_ref().map_or(self.spectrum.dim_pa(), RealMatrix::dim)
    }

    /// Short label used for switching modes and sweep rows.
    pub fn label(&self) -> String {
        self.echo
            .name
            .clone()
            .or_else(|| {
                self.echo
                    .path
                    .as_ref()
                    .map(|p| Path::new(p).file_stem().map_or(p.clone(), |s| s.to_string_lossy().into_owned()))
            })
            .or_else(|| self.echo.spectrum.clone())
            .unwrap_or_default()
    }
}

impl InputSource {
    pub fn resolve(&self) -> Result<ResolvedInput, CliError> {
        match self {
            InputSource::MatrixFile(path) => {
                let m = parse_matrix_file(path)?;
                let echo = InputEcho {
                    source: "matrix-file".into(),
                    path: Some(path.display().to_string()),
                    name: None,
                    matrix: Some(m.rows()),
                    spectrum: None,
                };
                from_matrix(echo, m)
            }
            InputSource::Example(name) => {
                let m = catalog::by_name(name).ok_or_else(|| {
                    let known: Vec<_> = catalog::all().into_iter().map(|(n, _)| n).collect();
                    CliError::Usage(format!("unknown example '{name}'; known: {}", known.join(", ")))
                })?;
                let echo = InputEcho {
                    source: "example".into(),
                    path: None,
                    name: Some(name.clone()),
                    matrix: Some(m.rows()),
                    spectrum: None,
                };
                from_matrix(echo, m)
            }
            InputSource::Spectrum(text) => {
                let spectrum: Spectrum = text.parse()?;
                let echo = InputEcho {
                    source: "spectrum".into(),
                    path: None,
                    name: None,
                    matrix: None,
                    spectrum: Some(text.clone()),
                };
                Ok(ResolvedInput { echo, matrix: None, spectrum, jordan: None })
            }
        }
    }
}

fn from_matrix(echo: InputEcho, m: RealMatrix) -> Result<ResolvedInput, CliError> {
    let a = analyze(&m, default_cluster_tol(&m), DEFAULT_RANK_TOL)?;
    Ok(ResolvedInput { echo, jordan: Some(a.jordan_summary()), spectrum: a.spectrum, matrix: Some(m) })
}

pub fn parse_matrix_file(path: &Path) -> Result<RealMatrix, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    parse_matrix_text(&text).map_err(|e| match e {
        CliError::Parse(msg) => CliError::Parse(format!("{}: {msg}", path.display())),
        other => other,
    })
}

/// Accepts either `{"matrix": [[...], ...]}` or the plain layout: a line
/// holding `d` followed by `d` rows of `d` numbers. Blank lines and lines
/// starting with `#` are ignored in the plain layout.
pub fn parse_matrix_text(text: &str) -> Result<RealMatrix, CliError> {
    if text.trim_start().starts_with('{') {
        parse_structured(text)
    } else {
        parse_plain(text)
    }
}

#[derive(Deserialize)]
struct MatrixDoc {
    matrix: Vec<Vec<f64>>,
}

fn parse_structured(text: &str) -> Result<RealMatrix, CliError> {
    let doc: MatrixDoc = serde_json::from_str(text)
        .map_err(|e| CliError::Parse(format!("line {}, column {}: {e}", e.line(), e.column())))?;
    let d = doc.matrix.len();
    if d == 0 {
        return Err(CliError::Parse("\"matrix\" has no rows".into()));
    }
    if let Some((i, r)) = doc.matrix.iter().enumerate().find(|(_, r)| r.len() != d) {
        return Err(CliError::Parse(format!("row {} has {} entries, expected {d}", i + 1, r.len())));
    }
    Ok(RealMatrix::from_rows(doc.matrix)?)
}

fn parse_plain(text: &str) -> Result<RealMatrix, CliError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
    let (dim_line, first) = lines.next().ok_or_else(|| CliError::Parse("empty matrix file".into()))?;
    let d: usize = match first.trim().parse() {
        Ok(d) if d > 0 => d,
        _ => {
            let col = first.len() - first.trim_start().len() + 1;
            return Err(CliError::Parse(format!(
                "line {dim_line}, column {col}: expected a positive dimension, found '{}'",
                first.trim()
            )));
        }
    };
    let mut rows = Vec::with_capacity(d);
    for (line_no, line) in lines {
        if rows.len() == d {
            return Err(CliError::Parse(format!("line {line_no}: unexpected content after {d} rows")));
        }
        let mut row = Vec::with_capacity(d);
        for (col, token) in tokens(line) {
            let v: f64 = token.parse().map_err(|_| {
                CliError::Parse(format!("line {line_no}, column {col}: non-numeric token '{token}'"))
            })?;
            row.push(v);
        }
        if row.len() != d {
            return Err(CliError::Parse(format!(
                "line {line_no}: row {} has {} entries, expected {d}",
                rows.len() + 1,
                row.len()
            )));
        }
        rows.push(row);
    }
    if rows.len() != d {
        return Err(CliError::Parse(format!("expected {d} rows, found {}", rows.len())));
    }
    Ok(RealMatrix::from_rows(rows)?)
}

/// Whitespace-separated tokens with their 1-based starting column.
fn tokens(line: &str) -> impl Iterator<Item = (usize, &str)> {
    line.split_whitespace().map(move |tok| {
        let offset = tok.as_ptr() as usize - line.as_ptr() as usize;
        (line[..offset].chars().count() + 1, tok)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plain_diagonal() {
        let m = parse_matrix_text("2\n-0.2 0\n0 -0.5\n").unwrap();
        assert_eq!(m.rows(), vec![vec![-0.2, 0.0], vec![0.0, -0.5]]);
    }

    #[test]
    fn one_by_one() {
        let m = parse_matrix_text("1\n-1\n").unwrap();
        assert_eq!(m.dim(), 1);
        assert_eq!(m[(0, 0)], -1.0);
    }

    #[test]
    fn short_row_is_named() {
        let err = parse_matrix_text("2\n-0.2 0\n0\n").unwrap_err().to_string();
        assert!(err.contains("line 3") && err.contains("row 2"), "{err}");
    }

    #[test]
    fn bad_token_has_column() {
        let err = parse_matrix_text("2\n-0.2 x\n0 -0.5\n").unwrap_err().to_string();
        assert!(err.contains("line 2, column 6") && err.contains("'x'"), "{err}");
    }

    #[test]
    fn missing_rows_and_trailing_content() {
        assert!(parse_matrix_text("2\n-1 0\n").unwrap_err().to_string().contains("expected 2 rows"));
        assert!(parse_matrix_text("1\n-1\n3\n").unwrap_err().to_string().contains("line 3"));
        assert!(parse_matrix_text("x\n").unwrap_err().to_string().contains("line 1, column 1"));
    }

    #[test]
    fn comments_and_blank_lines() {
        let m = parse_matrix_text("# example\n\n2\n-1 0\n\n0 -2\n").unwrap();
        assert_eq!(m[(1, 1)], -2.0);
    }

    #[test]
    fn structured_format() {
        let m = parse_matrix_text(r#"{"matrix": [[-0.1, -0.3], [0.3, -0.1]]}"#).unwrap();
        assert_eq!(m[(1, 0)], 0.3);
        let err = parse_matrix_text(r#"{"matrix": [[-0.1, -0.3], [0.3]]}"#).unwrap_err().to_string();
        assert!(err.contains("row 2"), "{err}");
        let err = parse_matrix_text("{\"matrix\": [[-0.1, oops]]}").unwrap_err().to_string();
        assert!(err.contains("line 1, column"), "{err}");
    }
}
