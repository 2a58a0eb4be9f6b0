//! Flat key=value config files, merged under explicit CLI flags.
//!
//! `--config PATH` may appear anywhere after the subcommand. Each line of
//! the file is `key = value` (or `key=value`), where `key` is a long option
//! name without the leading dashes; `#` starts a comment. Keys already
//! present on the command line are skipped, so flags always win. A key may
//! repeat to feed repeatable options such as `query`. Boolean options take
//! `true` (inject the flag) or `false` (leave it out).

use crate::errors::{CliError, CliResult};

/// Strip `--config PATH` / `--config=PATH` out of `argv` and splice the
/// file's settings in as trailing flags.
pub fn inject_config(argv: Vec<String>) -> CliResult<Vec<String>> {
    let mut out: Vec<String> = Vec::with_capacity(argv.len());
    let mut path: Option<String> = None;
    let mut it = argv.into_iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            let p = it
                .next()
                .ok_or_else(|| CliError::usage("--config needs a file path"))?;
            path = Some(p);
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        } else {
            out.push(a);
        }
    }
    let Some(path) = path else { return Ok(out) };
    // Snapshot before injection: a key is "given on the CLI" only if the
    // user typed it, not if an earlier config line injected it (keys may
    // repeat in the file to feed repeatable options).
    let cli_args: Vec<String> = out.clone();

    let text = std::fs::read_to_string(&path)?;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::usage(format!(
                "{path}:{}: expected key=value, got {raw:?}",
                i + 1
            )));
        };
        let key = key.trim();
        let value = value.trim();
        if key.is_empty() {
            return Err(CliError::usage(format!("{path}:{}: empty key", i + 1)));
        }
        let flag = format!("--{key}");
        let given_on_cli = cli_args
            .iter()
            .any(|a| a == &flag || a.starts_with(&format!("{flag}=")));
        if given_on_cli {
            continue;
        }
        match value {
            "true" => out.push(flag),
            "false" => {}
            v => {
                out.push(flag);
                out.push(v.to_string());
            }
        }
    }
    Ok(out)
}
