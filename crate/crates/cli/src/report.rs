//! Aggregation of run summaries from an output directory into a single
//! long-format CSV.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Deserialize;
use std::collections::BTreeMap;

use crate::table::format_sig17;

/// The subset of the summary schema the aggregator needs.
#[derive(Debug, Deserialize)]
struct SummaryFile {
    experiment: String,
    config_hash: String,
    metrics: BTreeMap<String, f64>,
    flags: BTreeMap<String, bool>,
    #[serde(default)]
    violations: Vec<String>,
    converged: bool,
}

/// Collect every `*summary.json` under `dir` (sorted by file name) into one
/// long-format CSV: one row per metric or flag, tagged with its source.
pub fn aggregate(dir: &Path) -> Result<String> {
    let mut files: Vec<String> = fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .filter_map(|e| e.ok())
        .filter_map(|e| e.file_name().into_string().ok())
        .filter(|n| n.ends_with("summary.json"))
        .collect();
    files.sort();
    if files.is_empty() {
        bail!("no summary.json files under {}", dir.display());
    }

    let mut out = String::from("source,experiment,config_hash,kind,name,value\n");
    for name in &files {
        let text = fs::read_to_string(dir.join(name))
            .with_context(|| format!("reading {name}"))?;
        let s: SummaryFile =
            serde_json::from_str(&text).with_context(|| format!("parsing {name}"))?;
        let tag = |kind: &str, key: &str, value: String| {
            format!(
                "{name},{},{},{kind},{key},{value}\n",
                s.experiment, s.config_hash
            )
        };
        for (k, v) in &s.metrics {
            out.push_str(&tag("metric", k, format_sig17(*v)));
        }
        for (k, v) in &s.flags {
            out.push_str(&tag("flag", k, (*v as u8).to_string()));
        }
        out.push_str(&tag(
            "flag",
            "converged",
            (s.converged as u8).to_string(),
        ));
        out.push_str(&tag(
            "metric",
            "violation_count",
            s.violations.len().to_string(),
        ));
    }
    Ok(out)
}
