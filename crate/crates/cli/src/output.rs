//! Output plumbing shared by the subcommands: file-or-stdout writing,
//! timestamping, and fixed-width float formatting for CSV.

use std::io::Write;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde_json::Value;

use crate::errors::CliResult;

/// Write `content` to `out`, or to stdout when no path was given.
pub fn write_out(out: Option<&Path>, content: &str) -> CliResult<()> {
    match out {
        Some(path) => {
            std::fs::write(path, content)?;
            Ok(())
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(content.as_bytes())?;
            Ok(())
        }
    }
}

/// Seconds since the epoch, or `None` when the run asked for reproducible
/// bytes via `--no-timestamp`.
pub fn timestamp(no_timestamp: bool) -> Option<u64> {
    if no_timestamp {
        return None;
    }
    Some(
        SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
    )
}

/// Attach the timestamp field to a JSON object if one was taken.
pub fn stamp_json(value: &mut Value, ts: Option<u64>) {
    if let (Some(ts), Some(map)) = (ts, value.as_object_mut()) {
        map.insert("timestamp".into(), Value::from(ts));
    }
}

/// Render a JSON report: pretty-printed, newline-terminated.
pub fn render_json(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serialization");
    s.push('\n');
    s
}

/// CSV float format: 17 significant digits, scientific.
pub fn fmt_f(x: f64) -> String {
    format!("{x:.16e}")
}
