use std::fmt::Write as _;
use std::path::PathBuf;

use clap::Args;
use serde_json::json;

use ricci_core::bounds::{greedy_epsilon_net, verify_net};
use ricci_core::cloud::load_csv;

use crate::errors::{CliError, CliResult};
use crate::output::{fmt_f, render_json, stamp_json, timestamp, write_out};

/// Build a greedy epsilon-net over a stored cloud and verify its separation
/// and covering properties.
#[derive(Args, Debug)]
pub struct NetArgs {
    /// Cloud CSV
    #[arg(long)]
    cloud: PathBuf,

    /// Net radius
    #[arg(long)]
    eps: f64,

    /// Output format: json (report with indices) or csv (center rows)
    #[arg(long, default_value = "json")]
    format: String,

    /// Output file; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,

    /// Omit the timestamp for byte-reproducible output
    #[arg(long)]
    no_timestamp: bool,
}

pub fn run(args: &NetArgs) -> CliResult<()> {
    let cloud = load_csv(&args.cloud)?;
    let net = greedy_epsilon_net(&cloud, args.eps)?;
    let check = verify_net(&cloud, args.eps, &net);

    match args.format.as_str() {
        "json" => {
            let mut report = json!({
                "command": "net",
                "cloud": args.cloud.display().to_string(),
                "n": cloud.n(),
                "eps": args.eps,
                "size": net.len(),
                "separated": check.separated,
                "covering": check.covering,
                "indices": net,
            });
            stamp_json(&mut report, timestamp(args.no_timestamp));
            write_out(args.out.as_deref(), &render_json(&report))
        }
        "csv" => {
            let mut body = String::new();
            writeln!(
                body,
                "# net eps={} size={} separated={} covering={}",
                fmt_f(args.eps),
                net.len(),
                check.separated,
                check.covering
            )
            .expect("string write");
            if let Some(stamp) = timestamp(args.no_timestamp) {
                writeln!(body, "# timestamp={stamp}").expect("string write");
            }
            let dim = cloud.ambient_dim();
            let cols: Vec<String> = (0..dim).map(|k| format!("x{k}")).collect();
            writeln!(body, "index,{}", cols.join(",")).expect("string write");
            for &i in &net {
                let coords: Vec<String> =
                    cloud.point(i).iter().map(|&c| fmt_f(c)).collect();
                writeln!(body, "{i},{}", coords.join(",")).expect("string write");
            }
            write_out(args.out.as_deref(), &body)
        }
        other => Err(CliError::usage(format!(
            "unknown format {other:?}: expected json or csv"
        ))),
    }
}
