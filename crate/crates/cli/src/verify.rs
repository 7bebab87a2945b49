//! `verify`: runs the verification suite and writes JSON and text reports.

use clap::Args;
use ebpois::verify::{run_all, VerifyConfig, CHECK_NAMES};

use crate::output::{ensure_dir, write_file};
use crate::{CliError, Format, Settings};

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Random samples per sampled inequality (default 100000; "1e6" accepted)
    #[arg(long)]
    samples: Option<f64>,
    /// Restrict to these check families (repeatable or comma separated)
    #[arg(long, value_delimiter = ',')]
    only: Vec<String>,
}

pub fn run(args: VerifyArgs, settings: &Settings) -> Result<(), CliError> {
    let samples = settings.file.pick(args.samples, "samples")?.unwrap_or(1e5);
    if !(samples >= 1.0 && samples.fract() == 0.0 && samples <= 1e9) {
        return Err(CliError::Usage(format!("--samples must be a whole number in [1, 1e9], got {samples}")));
    }
    let only = if args.only.is_empty() { settings.file.pick_list(None::<Vec<String>>, "only")?.unwrap_or_default() } else { args.only };
    for family in &only {
        let known = CHECK_NAMES
            .iter()
            .any(|n| n == family || n.strip_prefix(family.as_str()).is_some_and(|r| r.starts_with('.')));
        if !known {
            return Err(CliError::Usage(format!("unknown check {family:?}; known checks: {}", CHECK_NAMES.join(", "))));
        }
    }
    let config = VerifyConfig {
        seed: settings.seed,
        samples: samples as usize,
        tail_tol: settings.policy.tail_tol,
        quad_tol: settings.quad.abs_tol,
    };
    let report = run_all(&config, &only);
    let json = serde_json::to_string_pretty(&report).map_err(|e| CliError::Io(format!("json: {e}")))? + "\n";
    let summary = report.summary();
    ensure_dir(&settings.out_dir)?;
    write_file(&settings.out_dir, "verification_report.json", &json)?;
    write_file(&settings.out_dir, "verification_report.txt", &summary)?;
    match settings.format.unwrap_or(Format::Table) {
        Format::Json => print!("{json}"),
        Format::Table | Format::Csv => print!("{summary}"),
    }
    if report.passed() {
        Ok(())
    } else {
        Err(CliError::Verification("one or more checks failed".into()))
    }
}
