//! Serializing reports as json-lines or csv.

use std::io::Write;

use crate::error::CliError;
use crate::input::InputEcho;
use crate::job::{OutputFormat, Report};

fn input_label(e: &InputEcho) -> String {
    e.path.clone().or_else(|| e.name.clone()).or_else(|| e.spectrum.clone()).unwrap_or_default()
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Flat `(column, value)` view of a report. Cut-tail and error records share
/// one layout so sweep output stays rectangular.
fn columns(r: &Report) -> Vec<(&'static str, String)> {
    match r {
        Report::CutTail(c) => vec![
            ("command", "cut-tail".into()),
            ("input", input_label(&c.input)),
            ("spectrum", c.spectrum.clone()),
            ("dim_pa", c.dim_pa.to_string()),
            ("t_cut", c.t_cut.to_string()),
            ("bracket_lo", c.bracket.0.to_string()),
            ("bracket_hi", c.bracket.1.to_string()),
            ("method", serde_json::to_value(c.method).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default()),
            ("closed_form", opt(c.closed_form)),
            ("wall_time_s", opt(c.wall_time_s)),
            ("error", String::new()),
        ],
        Report::Error(e) => vec![
            ("command", "error".into()),
            ("input", input_label(&e.input)),
            ("spectrum", e.input.spectrum.clone().unwrap_or_default()),
            ("dim_pa", String::new()),
            ("t_cut", String::new()),
            ("bracket_lo", String::new()),
            ("bracket_hi", String::new()),
            ("method", String::new()),
            ("closed_form", String::new()),
            ("wall_time_s", String::new()),
            ("error", e.message.clone()),
        ],
        Report::Extremal(x) => vec![
            ("command", "extremal".into()),
            ("input", input_label(&x.input)),
            ("spectrum", x.spectrum.clone()),
            ("t", x.t.to_string()),
            ("value", x.value.to_string()),
            ("lower", x.bounds.0.to_string()),
            ("upper", x.bounds.1.to_string()),
            ("active_points", x.active_points.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(" ")),
            ("iterations", x.iterations.to_string()),
            ("wall_time_s", opt(x.wall_time_s)),
        ],
        Report::Verify2d(v) => vec![
            ("command", "verify2d".into()),
            ("input", input_label(&v.input)),
            ("spectrum", v.spectrum.clone()),
            ("closed_form", v.closed_form.to_string()),
            ("exchange", v.exchange.to_string()),
            ("geometric", v.geometric.to_string()),
            ("geometric_step", v.geometric_step.to_string()),
            ("exchange_agrees", v.exchange_agrees.to_string()),
            ("geometric_agrees", v.geometric_agrees.to_string()),
            ("wall_time_s", opt(v.wall_time_s)),
        ],
        Report::Simulate(s) => vec![
            ("command", "simulate".into()),
            ("modes", s.modes.iter().map(|m| m.label.as_str()).collect::<Vec<_>>().join(" ")),
            ("dwell_min", s.dwell_min.to_string()),
            ("horizon", s.horizon.to_string()),
            ("seed", s.seed.to_string()),
            ("restarts", s.restarts.to_string()),
            ("uncapped_exponent", s.uncapped.exponent.to_string()),
            ("capped_exponent", s.capped.exponent.to_string()),
            ("gap", s.gap.to_string()),
            ("wall_time_s", opt(s.wall_time_s)),
        ],
    }
}

/// Writes all reports. Each json line is assembled first and written with a
/// single call, so concurrent writers never interleave within a line.
pub fn write_reports(out: &mut impl Write, reports: &[Report], format: OutputFormat) -> Result<(), CliError> {
    match format {
        OutputFormat::JsonLines => {
            for r in reports {
                let mut line = serde_json::to_string(r).map_err(|e| CliError::Numeric(e.to_string()))?;
                line.push('\n');
                out.write_all(line.as_bytes())?;
            }
        }
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(&mut *out);
            let csv_err = |e: csv::Error| CliError::Usage(e.to_string());
            if let Some(first) = reports.first() {
                w.write_record(columns(first).iter().map(|c| c.0)).map_err(csv_err)?;
            }
            for r in reports {
                w.write_record(columns(r).iter().map(|c| c.1.as_str())).map_err(csv_err)?;
            }
            w.flush()?;
        }
    }
    out.flush()?;
    Ok(())
}
