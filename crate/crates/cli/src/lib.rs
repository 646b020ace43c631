//! The `rw` command line: loads catalogs and category tables, dispatches to
//! the checkers in `rw-core`, and writes JSON reports with replayable
//! certificates.

pub mod args;
pub mod commands;
pub mod input;
pub mod monotest;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::time::Instant;

use anyhow::Context as _;
use clap::Parser;
use serde_json::Value;

use rw_core::report::{Report, Verdict};
use rw_core::Status;

use crate::args::Cli;

/// Exit code for usage and input errors.
pub const EXIT_USAGE: i32 = 3;

/// What a subcommand produces.
pub enum Outcome {
    Report { status: Status, config: BTreeMap<String, Value>, context: rw_core::report::Context, verdicts: Vec<Verdict> },
    /// A data file (catalog, category table, expanded catalog).
    Data(String),
    /// Output for a check that failed outright (exit 1).
    Failed(String),
}

pub fn run(argv: Vec<OsString>) -> i32 {
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let start = Instant::now();
    let outcome = match commands::dispatch(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e:#}");
            return EXIT_USAGE;
        }
    };
    let (text, code) = match outcome {
        Outcome::Data(text) => (text, 0),
        Outcome::Failed(text) => (text, Status::Fails.exit_code()),
        Outcome::Report { status, mut config, context, verdicts } => {
            config.insert("seed".into(), cli.global.seed.into());
            config.insert("budget_nodes".into(), cli.global.budget_nodes.into());
            config.insert("budget_secs".into(), cli.global.budget_secs.into());
            config.insert("catalog".into(), cli.global.catalog.as_ref().map(|p| p.display().to_string()).into());
            config.insert("category".into(), cli.global.category.as_ref().map(|p| p.display().to_string()).into());
            config.insert("op".into(), cli.global.op.into());
            let report = Report {
                command: argv.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect(),
                config,
                context,
                status,
                verdicts,
                timing_secs: cli.global.timing.then(|| start.elapsed().as_secs_f64()),
            };
            if cli.global.verbose {
                eprint!("{}", human(&report));
            }
            (serde_json::to_string_pretty(&report).expect("report serializes") + "\n", status.exit_code())
        }
    };
    match write_output(cli.global.output.as_deref(), &text) {
        Ok(()) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_USAGE
        }
    }
}

fn write_output(path: Option<&std::path::Path>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

/// One line per verdict.
pub fn human(report: &Report) -> String {
    let mut out = format!("{}: {}\n", report.command.first().map_or("rw", String::as_str), report.status);
    for v in &report.verdicts {
        out.push_str(&format!(
            "  {:<18} {}  ({} certificates, {} exhaustion statements)\n",
            v.status.to_string(),
            v.check,
            v.certificates.len(),
            v.exhaustion.len()
        ));
    }
    if let Some(t) = report.timing_secs {
        out.push_str(&format!("  time {t:.3}s\n"));
    }
    out
}
