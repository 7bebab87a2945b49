//! `risk-curve`: risk reduction of EB or shrinkage predictives relative to
//! the Jeffreys predictive along a μ grid. The Jeffreys risk depends on the
//! individual rates, so each μ is evaluated at the symmetric point λ_i = μ/d.

use clap::Args;
use ebpois::curve::{log_space, Comparison, RiskCurve};
use ebpois::hyper::natural_b;
use serde::Serialize;

use crate::output::{csv_text, ensure_dir, log_or_nan, num, write_file};
use crate::svg::{Chart, Series};
use crate::{CliError, Format, Settings};

#[derive(Debug, Args)]
pub struct RiskCurveArgs {
    /// Moment-rule constants b (comma separated; "auto" means d/2 - 1)
    #[arg(long, value_delimiter = ',')]
    b: Option<Vec<String>>,
    /// Add the shrinkage-versus-Jeffreys curve
    #[arg(long)]
    shrinkage: bool,
    /// Explicit μ grid (comma separated, strictly increasing)
    #[arg(long, value_delimiter = ',')]
    mu: Option<Vec<f64>>,
    /// Lower end of the log-spaced μ grid (default 0.05)
    #[arg(long)]
    mu_min: Option<f64>,
    /// Upper end of the log-spaced μ grid (default 50)
    #[arg(long)]
    mu_max: Option<f64>,
    /// Number of log-spaced μ points (default 60)
    #[arg(long)]
    points: Option<usize>,
    /// Add a log_value column (natural log of the difference)
    #[arg(long)]
    log_values: bool,
    /// Also write an SVG chart of all curves
    #[arg(long)]
    plot: bool,
}

/// The μ grid from an explicit list or from `(min, max, points)`.
pub fn grid(explicit: Option<Vec<f64>>, min: f64, max: f64, points: usize) -> Result<Vec<f64>, CliError> {
    let grid = match explicit {
        Some(g) => g,
        None => {
            if points < 2 || !(min > 0.0 && min < max && max.is_finite()) {
                return Err(CliError::Usage(format!(
                    "μ grid needs 0 < mu-min < mu-max and at least 2 points, got [{min}, {max}] with {points}"
                )));
            }
            log_space(min, max, points).map_err(|e| CliError::Usage(e.to_string()))?
        }
    };
    if grid.is_empty() || grid.iter().any(|m| !(m.is_finite() && *m > 0.0)) || grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CliError::Usage("μ grid must be positive and strictly increasing".into()));
    }
    Ok(grid)
}

/// CSV text with columns mu, value, err_bound and optionally log_value.
pub fn curve_csv(curve: &RiskCurve, log_values: bool) -> Result<String, CliError> {
    let mut header = vec!["mu".to_string(), "value".to_string(), "err_bound".to_string()];
    if log_values {
        header.push("log_value".to_string());
    }
    let rows: Vec<Vec<String>> = curve
        .rows
        .iter()
        .map(|row| {
            let mut cells = vec![num(row.mu), num(row.value), num(row.err_bound)];
            if log_values {
                cells.push(num(log_or_nan(row.value)));
            }
            cells
        })
        .collect();
    csv_text(&header, &rows)
}

/// File-name fragment for a comparison, e.g. `eb_b0.5` or `shrinkage`.
pub fn slug(c: &Comparison) -> String {
    match c {
        Comparison::EbVsJeffreys { b } => format!("eb_b{b}"),
        Comparison::ShrinkageVsJeffreys => "shrinkage".to_string(),
    }
}

/// One chart series per curve, plotting the value or its logarithm.
pub fn series(curve: &RiskCurve, log_values: bool) -> Series {
    let points = curve.rows.iter().map(|r| (r.mu, if log_values { log_or_nan(r.value) } else { r.value })).collect();
    Series { label: curve.comparison.label(), points }
}

fn comparisons(args: &RiskCurveArgs, settings: &Settings, d: usize) -> Result<Vec<Comparison>, CliError> {
    let file = &settings.file;
    let shrinkage = file.switch(args.shrinkage, "shrinkage")?;
    let bs = file.pick_list(args.b.clone(), "b")?;
    let bs = match (bs, shrinkage) {
        (Some(bs), _) => bs,
        (None, true) => Vec::new(),
        (None, false) => vec!["auto".to_string()],
    };
    let mut out = Vec::new();
    for raw in bs {
        let b = if raw.trim() == "auto" {
            natural_b(d)
        } else {
            raw.trim().parse::<f64>().map_err(|_| CliError::Usage(format!("--b expects numbers or auto, got {raw:?}")))?
        };
        if !(b.is_finite() && b > 0.0) {
            return Err(CliError::Usage(format!("moment rule requires b > 0, got {b} (d = {d})")));
        }
        out.push(Comparison::EbVsJeffreys { b });
    }
    if shrinkage {
        out.push(Comparison::ShrinkageVsJeffreys);
    }
    Ok(out)
}

#[derive(Serialize)]
struct Written<'a> {
    curves: &'a [RiskCurve],
    files: Vec<String>,
}

pub fn run(args: RiskCurveArgs, settings: &Settings) -> Result<(), CliError> {
    let file = &settings.file;
    let d = settings.d.unwrap_or(3);
    let cfg = settings.model(d)?;
    let mu = grid(
        file.pick_list(args.mu.clone(), "mu")?,
        file.pick(args.mu_min, "mu-min")?.unwrap_or(0.05),
        file.pick(args.mu_max, "mu-max")?.unwrap_or(50.0),
        file.pick(args.points, "points")?.unwrap_or(60),
    )?;
    let log_values = args.log_values;
    let comps = comparisons(&args, settings, d)?;
    let curves = comps
        .iter()
        .map(|c| RiskCurve::compute(*c, &mu, &cfg, &settings.policy).map_err(CliError::from))
        .collect::<Result<Vec<_>, _>>()?;
    ensure_dir(&settings.out_dir)?;
    let mut files = Vec::new();
    for curve in &curves {
        let name = format!("risk_curve_d{d}_{}.csv", slug(&curve.comparison));
        files.push(write_file(&settings.out_dir, &name, &curve_csv(curve, log_values)?)?);
    }
    if args.plot {
        let chart = Chart {
            title: format!("Risk reduction relative to Jeffreys (d={d}, r={}, s={})", cfg.r, cfg.s),
            x_label: "μ".into(),
            y_label: if log_values { "log risk difference".into() } else { "risk difference".into() },
            log_x: true,
            log_y: false,
            series: curves.iter().map(|c| series(c, log_values)).collect(),
        };
        files.push(write_file(&settings.out_dir, &format!("risk_curve_d{d}.svg"), &chart.render())?);
    }
    let files: Vec<String> = files.iter().map(|p| p.display().to_string()).collect();
    match settings.format.unwrap_or(Format::Table) {
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(&Written { curves: &curves, files }).map_err(|e| CliError::Io(e.to_string()))?
        ),
        Format::Csv | Format::Table => {
            for f in files {
                println!("wrote {f}");
            }
        }
    }
    Ok(())
}
