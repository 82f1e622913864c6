//! JSON, CSV and plot-data rendering. Output bytes depend only on the
//! artifact; floats use the shortest representation that round-trips.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use hardy_core::identities::IdentityReport;
use hardy_core::sharpness::WindowSide;

use crate::config::Format;
use crate::run::Artifact;

/// One output file: `suffix` distinguishes the curves of a plot.
#[derive(Clone, Debug, PartialEq)]
pub struct Rendered {
    pub suffix: Option<String>,
    pub body: String,
}

fn num(x: f64) -> String {
    ryu::Buffer::new().format(x).to_owned()
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

pub fn render(artifact: &Artifact, format: Format) -> Result<Vec<Rendered>> {
    if artifact.is_empty() {
        bail!("nothing to emit: the report list is empty");
    }
    match format {
        Format::Json => {
            let mut body = serde_json::to_string_pretty(artifact)?;
            body.push('\n');
            Ok(vec![Rendered { suffix: None, body }])
        }
        Format::Csv => Ok(vec![Rendered {
            suffix: None,
            body: csv_body(artifact)?,
        }]),
        Format::Plot => plot_curves(artifact),
    }
}

fn csv_body(artifact: &Artifact) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    match artifact {
        Artifact::Reports(reports) => {
            w.write_record([
                "identity_id",
                "n",
                "R",
                "p",
                "lhs",
                "main_term",
                "remainder_term",
                "cross_term",
                "residual_abs",
                "residual_rel",
                "quad_error_budget",
                "passed",
            ])?;
            for r in reports {
                w.write_record(report_row(r))?;
            }
        }
        Artifact::Sweeps(sweeps) => {
            w.write_record([
                "identity_id",
                "family_label",
                "eps",
                "quotient",
                "budget",
                "sharp_value",
                "fraction",
                "monotone",
                "bounded",
            ])?;
            for s in sweeps {
                for p in &s.points {
                    w.write_record([
                        s.identity_id.to_string(),
                        s.family_label.clone(),
                        num(p.eps),
                        num(p.quotient),
                        num(p.budget),
                        num(s.sharp_value),
                        num(p.quotient / s.sharp_value),
                        s.monotone.to_string(),
                        s.bounded.to_string(),
                    ])?;
                }
            }
        }
        Artifact::Divergence(reports) => {
            w.write_record([
                "identity_id",
                "side",
                "lo",
                "hi",
                "log_width",
                "integral",
                "error_estimate",
                "fitted_slope",
                "expected_slope",
                "slope_rel_error",
                "fit_residual",
                "passed",
            ])?;
            for r in reports {
                for p in &r.points {
                    w.write_record([
                        r.identity_id.clone(),
                        side_name(p.side).to_owned(),
                        num(p.lo),
                        num(p.hi),
                        num(p.log_width),
                        num(p.integral),
                        num(p.error_estimate),
                        num(r.fitted_slope),
                        num(r.expected_slope),
                        num(r.slope_rel_error),
                        num(r.fit_residual),
                        r.passed.to_string(),
                    ])?;
                }
            }
        }
        Artifact::Lemma(reports) => {
            w.write_record([
                "trials",
                "dim",
                "seed",
                "max_consistency",
                "max_polarization",
                "max_equality_residual",
                "max_orthogonal_residual",
                "cauchy_schwarz_ok",
                "tolerance",
                "passed",
            ])?;
            for r in reports {
                w.write_record([
                    r.trials.to_string(),
                    r.dim.to_string(),
                    r.seed.to_string(),
                    num(r.max_consistency),
                    num(r.max_polarization),
                    num(r.max_equality_residual),
                    num(r.max_orthogonal_residual),
                    r.cauchy_schwarz_ok.to_string(),
                    num(r.tolerance),
                    r.passed.to_string(),
                ])?;
            }
        }
        Artifact::Criteria(outcomes) => {
            w.write_record(["index", "name", "passed", "checks", "worst", "tolerance"])?;
            for o in outcomes {
                w.write_record([
                    o.index.to_string(),
                    o.name.clone(),
                    o.passed.to_string(),
                    o.checks.to_string(),
                    num(o.worst),
                    num(o.tolerance),
                ])?;
            }
        }
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn report_row(r: &IdentityReport) -> Vec<String> {
    vec![
        r.identity_id.to_string(),
        r.params.n.map(|n| n.to_string()).unwrap_or_default(),
        opt(r.params.R),
        opt(r.params.p),
        num(r.lhs),
        num(r.main_term),
        num(r.remainder_term),
        num(r.cross_term),
        num(r.residual_abs),
        num(r.residual_rel),
        num(r.quad_error_budget),
        r.passed.to_string(),
    ]
}

fn side_name(side: WindowSide) -> &'static str {
    match side {
        WindowSide::Whole => "whole",
        WindowSide::Inner => "inner",
        WindowSide::Outer => "outer",
    }
}

fn two_columns(rows: impl IntoIterator<Item = (f64, f64)>) -> String {
    rows.into_iter()
        .map(|(x, y)| format!("{} {}\n", num(x), num(y)))
        .collect()
}

/// Sweeps: `ln ε` against the quotient, ε descending. Divergence: log
/// window against the integral, one curve per side. Radius sweeps: `R`
/// against the left side.
fn plot_curves(artifact: &Artifact) -> Result<Vec<Rendered>> {
    let curves: Vec<(String, String)> = match artifact {
        Artifact::Sweeps(sweeps) => sweeps
            .iter()
            .map(|s| {
                let mut pts: Vec<(f64, f64)> = s.points.iter().map(|p| (p.eps, p.quotient)).collect();
                pts.sort_by(|a, b| b.0.total_cmp(&a.0));
                (
                    format!("{}-{}", s.identity_id, s.family_label),
                    two_columns(pts.into_iter().map(|(e, q)| (e.ln(), q))),
                )
            })
            .collect(),
        Artifact::Divergence(reports) => reports
            .iter()
            .flat_map(|r| {
                [WindowSide::Whole, WindowSide::Inner, WindowSide::Outer]
                    .into_iter()
                    .filter(|side| r.points.iter().any(|p| p.side == *side))
                    .map(|side| {
                        let rows = r
                            .points
                            .iter()
                            .filter(|p| p.side == side)
                            .map(|p| (p.log_width, p.integral));
                        (format!("{}-{}", r.identity_id, side_name(side)), two_columns(rows))
                    })
                    .collect::<Vec<_>>()
            })
            .collect(),
        Artifact::Reports(reports) => {
            if reports.iter().any(|r| r.params.R.is_none()) {
                bail!("plot output needs reports with a radius; use json or csv");
            }
            vec![(
                "lhs-vs-radius".to_owned(),
                two_columns(reports.iter().map(|r| (r.params.R.unwrap_or(f64::NAN), r.lhs))),
            )]
        }
        Artifact::Lemma(_) | Artifact::Criteria(_) => bail!("plot output is not available for this command"),
    };
    let single = curves.len() == 1;
    Ok(curves
        .into_iter()
        .map(|(label, body)| Rendered {
            suffix: (!single).then(|| sanitize(&label)),
            body,
        })
        .collect())
}

fn sanitize(label: &str) -> String {
    label
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' || c == '.' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

/// `out.dat` with suffix `s` becomes `out-s.dat`.
pub fn suffixed_path(path: &Path, suffix: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}-{suffix}.{}", ext.to_string_lossy()),
        None => format!("{stem}-{suffix}"),
    };
    path.with_file_name(name)
}

/// Writes rendered files under `path`, or concatenated to `stdout`.
pub fn write_rendered(rendered: Vec<Rendered>, path: Option<&Path>, stdout: &mut dyn Write) -> Result<Vec<PathBuf>> {
    let Some(path) = path else {
        for r in &rendered {
            stdout.write_all(r.body.as_bytes())?;
        }
        return Ok(Vec::new());
    };
    let mut written = Vec::new();
    for r in rendered {
        let target = match &r.suffix {
            Some(s) => suffixed_path(path, s),
            None => path.to_path_buf(),
        };
        std::fs::write(&target, r.body).with_context(|| format!("writing {}", target.display()))?;
        written.push(target);
    }
    Ok(written)
}

/// Renders `artifact` and writes it to `path`, or to stdout when `path`
/// is `None` (plot output requires a path). Returns the files written.
pub fn emit_report(artifact: &Artifact, format: Format, path: Option<&Path>) -> Result<Vec<PathBuf>> {
    if format == Format::Plot && path.is_none() {
        bail!("plot output needs --output");
    }
    let rendered = render(artifact, format)?;
    write_rendered(rendered, path, &mut std::io::stdout())
}
