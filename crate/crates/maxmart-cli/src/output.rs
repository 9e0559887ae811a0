//! Summary and table writers. Summaries are pretty JSON with the wall time
//! as its own top-level field, so byte-comparisons across reruns only need
//! to drop that one line; tables are plain CSV.

use std::path::Path;
use std::time::Instant;

use anyhow::Context;
use serde_json::{json, Value};

pub struct Timer(Instant);

impl Timer {
    pub fn start() -> Self {
        Timer(Instant::now())
    }

    pub fn seconds(&self) -> f64 {
        self.0.elapsed().as_secs_f64()
    }
}

/// Write `<name>_summary.json` with the payload, pass verdict and wall time,
/// and echo a one-line verdict to stdout.
pub fn write_summary(
    out: &Path,
    name: &str,
    pass: bool,
    payload: Value,
    timer: &Timer,
) -> anyhow::Result<()> {
    let doc = json!({
        "command": name,
        "pass": pass,
        "result": payload,
        "wall_time_s": timer.seconds(),
    });
    let path = out.join(format!("{name}_summary.json"));
    std::fs::write(&path, serde_json::to_string_pretty(&doc)? + "\n")
        .with_context(|| format!("writing {}", path.display()))?;
    println!(
        "{name}: {} ({:.2}s) -> {}",
        if pass { "PASS" } else { "FAIL" },
        timer.seconds(),
        path.display()
    );
    Ok(())
}

/// Write a CSV table with the given header and rows of already-formatted
/// cells.
pub fn write_csv(
    out: &Path,
    name: &str,
    header: &str,
    rows: &[Vec<String>],
) -> anyhow::Result<()> {
    let mut text = String::from(header);
    text.push('\n');
    for row in rows {
        text.push_str(&row.join(","));
        text.push('\n');
    }
    let path = out.join(format!("{name}.csv"));
    std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}
