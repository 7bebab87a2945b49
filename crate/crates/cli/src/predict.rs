//! `predict`: the predictive pmf of y given x, listed until a mass target is reached.

use clap::{Args, ValueEnum};
use ebpois::hyper::{moment_dominates, natural_b};
use ebpois::predictive::TableError;
use ebpois::{estimate, pred_pmf_table, Counts, HyperRule, ModelConfig, PredictiveFamily};
use serde::Serialize;

use crate::output::{csv_text, num};
use crate::{CliError, Format, Settings};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Jeffreys,
    Gamma,
    Eb,
    Shrinkage,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RuleArg {
    Moment,
    Mle,
    Ure,
}

macro_rules! value_enum_from_str {
    ($t:ty) => {
        impl std::str::FromStr for $t {
            type Err = String;
            fn from_str(s: &str) -> Result<Self, String> {
                <$t as ValueEnum>::from_str(s, true)
            }
        }
    };
}
value_enum_from_str!(FamilyArg);
value_enum_from_str!(RuleArg);

#[derive(Debug, Args)]
pub struct PredictArgs {
    /// Observed counts, comma separated (d is their number)
    #[arg(long, value_delimiter = ',')]
    x: Option<Vec<u64>>,
    /// Predictive family (default jeffreys)
    #[arg(long, value_enum)]
    family: Option<FamilyArg>,
    /// Prior rate α for the fixed-gamma family
    #[arg(long)]
    alpha: Option<f64>,
    /// Hyperparameter rule for the empirical-Bayes family (default moment)
    #[arg(long, value_enum)]
    rule: Option<RuleArg>,
    /// Moment-rule constant b, or "auto" for b = d/2 - 1 (default auto)
    #[arg(long)]
    b: Option<String>,
    /// Stop listing y once this much probability mass is covered (default 0.99)
    #[arg(long)]
    mass: Option<f64>,
    /// Treat the all-zero fallback of the MLE and URE rules as an error
    #[arg(long)]
    strict: bool,
}

#[derive(Debug, Serialize)]
struct PmfRow {
    y: Vec<u64>,
    probability: f64,
    err_bound: f64,
}

#[derive(Debug, Serialize)]
struct PmfOutput {
    family: String,
    d: usize,
    r: f64,
    s: f64,
    x: Vec<u64>,
    /// Prior rate actually used (absent for the shrinkage family).
    alpha: Option<f64>,
    mass: f64,
    rows: Vec<PmfRow>,
}

/// Parses `--b`: a positive number or `auto`.
fn resolve_b(raw: Option<&str>, d: usize) -> Result<f64, CliError> {
    match raw.unwrap_or("auto") {
        "auto" => {
            let b = natural_b(d);
            eprintln!("info: moment rule with b = {b} (d/2 - 1)");
            if b <= 0.0 {
                return Err(CliError::Usage(format!("b = d/2 - 1 = {b} is not positive for d = {d}; give --b explicitly")));
            }
            Ok(b)
        }
        other => other.parse::<f64>().map_err(|_| CliError::Usage(format!("--b expects a number or auto, got {other:?}"))),
    }
}

fn resolve_family(args: &PredictArgs, settings: &Settings, x: &Counts, cfg: &ModelConfig) -> Result<PredictiveFamily, CliError> {
    let file = &settings.file;
    let family = file.pick(args.family, "family")?.unwrap_or(FamilyArg::Jeffreys);
    Ok(match family {
        FamilyArg::Jeffreys => PredictiveFamily::Jeffreys,
        FamilyArg::Shrinkage => PredictiveFamily::Shrinkage,
        FamilyArg::Gamma => {
            let alpha = file
                .pick(args.alpha, "alpha")?
                .ok_or_else(|| CliError::Usage("--family gamma requires --alpha".into()))?;
            PredictiveFamily::FixedGamma { alpha }
        }
        FamilyArg::Eb => {
            let rule = match file.pick(args.rule, "rule")?.unwrap_or(RuleArg::Moment) {
                RuleArg::Moment => {
                    let b_raw = file.pick(args.b.clone(), "b")?;
                    let b = resolve_b(b_raw.as_deref(), cfg.d)?;
                    if !moment_dominates(b, cfg.d) {
                        eprintln!(
                            "warning: b = {b} lies outside 0 < b <= d - 2 = {}; no dominance over the Jeffreys predictive is guaranteed",
                            cfg.d as f64 - 2.0
                        );
                    }
                    HyperRule::Moment { b }
                }
                RuleArg::Mle => HyperRule::Mle,
                RuleArg::Ure => HyperRule::Ure,
            };
            if matches!(rule, HyperRule::Mle | HyperRule::Ure) && x.sum() == 0 {
                let fallback = HyperRule::fallback_moment(cfg.d);
                if file.switch(args.strict, "strict")? {
                    return Err(CliError::Numeric(format!(
                        "the {} estimate of α is undefined when every count is zero (--strict)",
                        rule.name()
                    )));
                }
                let HyperRule::Moment { b } = fallback else { unreachable!() };
                eprintln!(
                    "warning: the {} estimate of α is undefined when every count is zero; falling back to the moment rule with b = {b:e}",
                    rule.name()
                );
                PredictiveFamily::EmpiricalBayes { rule: fallback }
            } else {
                PredictiveFamily::EmpiricalBayes { rule }
            }
        }
    })
}

/// Rounding estimate for a probability assembled from log-gamma terms.
fn pmf_err_bound(p: f64, x: &Counts, y: &Counts) -> f64 {
    let n = (x.sum() + y.sum() + x.len() as u64) as f64;
    p * 16.0 * f64::EPSILON * (x.len() as f64 + 4.0) * (1.0 + (n + 1.0) * (n + 2.0).ln())
}

pub fn run(args: PredictArgs, settings: &Settings) -> Result<(), CliError> {
    let x = settings
        .file
        .pick_list(args.x.clone(), "x")?
        .ok_or_else(|| CliError::Usage("predict requires --x (comma-separated counts)".into()))?;
    if x.is_empty() {
        return Err(CliError::Usage("--x must list at least one count".into()));
    }
    if let Some(d) = settings.d {
        if d != x.len() {
            return Err(CliError::Usage(format!("--d {d} does not match the {} counts given in --x", x.len())));
        }
    }
    let cfg = settings.model(x.len())?;
    let counts = Counts::new(x.clone());
    let family = resolve_family(&args, settings, &counts, &cfg)?;
    let mass = settings.file.pick(args.mass, "mass")?.unwrap_or(0.99);
    if !(mass > 0.0 && mass < 1.0) {
        return Err(CliError::Usage(format!("--mass must lie in (0, 1), got {mass}")));
    }
    let alpha = match family {
        PredictiveFamily::Jeffreys => Some(0.0),
        PredictiveFamily::FixedGamma { alpha } => Some(alpha),
        PredictiveFamily::EmpiricalBayes { rule } => Some(estimate(rule, &counts, &cfg)?.alpha),
        PredictiveFamily::Shrinkage => None,
    };
    let table = pred_pmf_table(&counts, family, &cfg, 1.0 - mass).map_err(|e| match e {
        TableError::Model(m) => CliError::from(m),
        TableError::Truncated { partial } => CliError::Numeric(format!(
            "enumeration stopped after {} outcomes covering mass {}; lower --mass",
            partial.entries.len(),
            partial.mass
        )),
    })?;
    let out = PmfOutput {
        family: family.name().to_string(),
        d: cfg.d,
        r: cfg.r,
        s: cfg.s,
        x,
        alpha,
        mass: table.mass,
        rows: table
            .entries
            .iter()
            .map(|(y, p)| PmfRow { y: y.values().to_vec(), probability: *p, err_bound: pmf_err_bound(*p, &counts, y) })
            .collect(),
    };
    print!("{}", render(&out, settings.format.unwrap_or(Format::Table))?);
    Ok(())
}

fn render(out: &PmfOutput, format: Format) -> Result<String, CliError> {
    Ok(match format {
        Format::Json => {
            serde_json::to_string_pretty(out).map_err(|e| CliError::Io(format!("json: {e}")))? + "\n"
        }
        Format::Csv => {
            let mut header: Vec<String> = (1..=out.d).map(|i| format!("y{i}")).collect();
            header.extend(["probability".to_string(), "err_bound".to_string()]);
            let rows: Vec<Vec<String>> = out
                .rows
                .iter()
                .map(|row| {
                    let mut cells: Vec<String> = row.y.iter().map(u64::to_string).collect();
                    cells.extend([num(row.probability), num(row.err_bound)]);
                    cells
                })
                .collect();
            csv_text(&header, &rows)?
        }
        Format::Table => {
            let mut s = format!(
                "# family={} d={} r={} s={} x={:?}{} listed mass={:.12}\n",
                out.family,
                out.d,
                out.r,
                out.s,
                out.x,
                out.alpha.map(|a| format!(" alpha={a}")).unwrap_or_default(),
                out.mass
            );
            s.push_str(&format!("{:<24} {:<24} {}\n", "y", "probability", "err_bound"));
            for row in &out.rows {
                let y = row.y.iter().map(u64::to_string).collect::<Vec<_>>().join(",");
                s.push_str(&format!("{:<24} {:<24} {:.2e}\n", y, row.probability, row.err_bound));
            }
            s
        }
    })
}
