use anyhow::{Context as _, Result};
use serde_json::json;

use rw_core::report::{replay, Report};
use rw_core::Error;

use crate::args::ReplayArgs;
use crate::Outcome;

pub fn run(args: &ReplayArgs) -> Result<Outcome> {
    let text = std::fs::read_to_string(&args.report).with_context(|| format!("reading {}", args.report.display()))?;
    let value: serde_json::Value = serde_json::from_str(&text).with_context(|| format!("{}: malformed report", args.report.display()))?;
    if value.as_object().is_some_and(|o| o.is_empty()) {
        return Ok(Outcome::Data(json!({ "status": "HOLDS", "verdicts": 0 }).to_string() + "\n"));
    }
    let report: Report = serde_json::from_value(value).with_context(|| format!("{}: malformed report", args.report.display()))?;
    match replay(&report, args.deep) {
        Ok(s) => {
            let out = json!({
                "status": "HOLDS",
                "verdicts": s.verdicts,
                "certificates": s.certificates,
                "exhaustion_statements": s.exhaustion_statements,
                "reruns": s.reruns,
            });
            Ok(Outcome::Data(serde_json::to_string_pretty(&out)? + "\n"))
        }
        Err(Error::CorruptCertificate(m)) => {
            let out = json!({ "status": "FAILS", "error": m });
            Ok(Outcome::Failed(serde_json::to_string_pretty(&out)? + "\n"))
        }
        Err(e) => Err(e.into()),
    }
}
