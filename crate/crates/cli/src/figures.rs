//! `figures`: data and charts for the standard set of risk plots.
//!
//! * fig1 — EB (b = d/2 - 1) risk reduction against μ for several d.
//! * fig2a / fig2b — log risk reductions for d = 3 (b = 0.5, 1) and d = 8
//!   (b = 3, 6), each with the shrinkage curve.
//! * fig3 — f(λ) on (0, 20].

use clap::Args;
use ebpois::curve::{log_space, Comparison, RiskCurve};
use ebpois::hyper::natural_b;
use ebpois::risk::f_shrink;
use rayon::prelude::*;

use crate::output::{csv_text, ensure_dir, log_or_nan, num, write_file};
use crate::risk_curve::series;
use crate::svg::{Chart, Series};
use crate::{CliError, Settings};

#[derive(Debug, Args)]
pub struct FiguresArgs {
    /// Dimensions shown in fig1 (comma separated)
    #[arg(long, value_delimiter = ',')]
    fig1_d: Option<Vec<usize>>,
    /// Number of log-spaced μ points on [0.05, 50]
    #[arg(long)]
    points: Option<usize>,
    /// Write CSV files only
    #[arg(long)]
    no_plot: bool,
}

/// Step of the fig3 λ grid.
const FIG3_STEP: f64 = 0.02;

fn fig1(ds: &[usize], mu: &[f64], settings: &Settings) -> Result<(String, Chart), CliError> {
    let mut rows = Vec::new();
    let mut chart_series = Vec::new();
    for &d in ds {
        let b = natural_b(d);
        if b <= 0.0 {
            return Err(CliError::Usage(format!("fig1 needs d >= 3 so that b = d/2 - 1 > 0, got d = {d}")));
        }
        let cfg = settings.model(d)?;
        let curve = RiskCurve::compute(Comparison::EbVsJeffreys { b }, mu, &cfg, &settings.policy)?;
        for row in &curve.rows {
            rows.push(vec![d.to_string(), num(b), num(row.mu), num(row.value), num(row.err_bound)]);
        }
        let mut s = series(&curve, false);
        s.label = format!("d={d}, b={b}");
        chart_series.push(s);
    }
    let header = ["d", "b", "mu", "value", "err_bound"].map(String::from);
    let chart = Chart {
        title: format!("Risk difference, Jeffreys minus EB (r={}, s={})", settings.r, settings.s),
        x_label: "μ".into(),
        y_label: "risk difference".into(),
        log_x: true,
        log_y: false,
        series: chart_series,
    };
    Ok((csv_text(&header, &rows)?, chart))
}

fn fig2(d: usize, bs: [f64; 2], mu: &[f64], settings: &Settings) -> Result<(String, Chart), CliError> {
    let cfg = settings.model(d)?;
    let comps = [Comparison::EbVsJeffreys { b: bs[0] }, Comparison::EbVsJeffreys { b: bs[1] }, Comparison::ShrinkageVsJeffreys];
    let mut rows = Vec::new();
    let mut chart_series = Vec::new();
    for c in comps {
        let curve = RiskCurve::compute(c, mu, &cfg, &settings.policy)?;
        for row in &curve.rows {
            rows.push(vec![c.label(), num(row.mu), num(row.value), num(row.err_bound), num(log_or_nan(row.value))]);
        }
        chart_series.push(series(&curve, true));
    }
    let header = ["curve", "mu", "value", "err_bound", "log_value"].map(String::from);
    let chart = Chart {
        title: format!("Log risk difference relative to Jeffreys (d={d}, r={}, s={})", settings.r, settings.s),
        x_label: "μ".into(),
        y_label: "log risk difference".into(),
        log_x: true,
        log_y: false,
        series: chart_series,
    };
    Ok((csv_text(&header, &rows)?, chart))
}

fn fig3(settings: &Settings) -> Result<(String, Chart), CliError> {
    let n = (20.0 / FIG3_STEP).round() as usize;
    let lambdas: Vec<f64> = (1..=n).map(|i| i as f64 * FIG3_STEP).collect();
    let values = lambdas.par_iter().map(|&l| f_shrink(l, &settings.policy)).collect::<Result<Vec<_>, _>>()?;
    let rows: Vec<Vec<String>> =
        lambdas.iter().zip(&values).map(|(l, f)| vec![num(*l), num(f.value), num(f.err_bound)]).collect();
    let header = ["lambda", "value", "err_bound"].map(String::from);
    let chart = Chart {
        title: "f(λ) = λ E[ln((x+1/2)/λ)], x ~ Po(λ)".into(),
        x_label: "λ".into(),
        y_label: "f(λ)".into(),
        log_x: false,
        log_y: false,
        series: vec![Series {
            label: "f(λ)".into(),
            points: lambdas.iter().zip(&values).map(|(l, f)| (*l, f.value)).collect(),
        }],
    };
    Ok((csv_text(&header, &rows)?, chart))
}

pub fn run(args: FiguresArgs, settings: &Settings) -> Result<(), CliError> {
    let file = &settings.file;
    let ds = file.pick_list(args.fig1_d.clone(), "fig1-d")?.unwrap_or_else(|| vec![3, 4, 6, 8]);
    let points = file.pick(args.points, "points")?.unwrap_or(60);
    if points < 2 {
        return Err(CliError::Usage("--points must be at least 2".into()));
    }
    let mu = log_space(0.05, 50.0, points)?;
    ensure_dir(&settings.out_dir)?;
    let figures = [
        ("fig1", fig1(&ds, &mu, settings)?),
        ("fig2a", fig2(3, [0.5, 1.0], &mu, settings)?),
        ("fig2b", fig2(8, [3.0, 6.0], &mu, settings)?),
        ("fig3", fig3(settings)?),
    ];
    for (name, (csv, chart)) in &figures {
        let path = write_file(&settings.out_dir, &format!("{name}.csv"), csv)?;
        println!("wrote {}", path.display());
        if !args.no_plot {
            let path = write_file(&settings.out_dir, &format!("{name}.svg"), &chart.render())?;
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}
