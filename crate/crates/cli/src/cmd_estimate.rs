use std::path::PathBuf;

use clap::Args;
use serde_json::json;

use ricci_core::cloud::load_csv;
use ricci_core::kernel::{
    gamma2_hat, gamma_hat, kernel_row, l_t_alpha_hat, l_t_hat, theta_alpha_hat, Alpha,
};

use crate::errors::{CliError, CliResult};
use crate::output::{render_json, stamp_json, timestamp, write_out};
use crate::{bandwidth, fields};

/// Evaluate the kernel operators on a stored cloud at one or more query
/// points and emit a JSON report.
#[derive(Args, Debug)]
pub struct EstimateArgs {
    /// Cloud CSV produced by `sample` (or compatible)
    #[arg(long)]
    cloud: PathBuf,

    /// Kernel bandwidth
    #[arg(long)]
    t: Option<f64>,

    /// Bandwidth schedule kind (gamma | gamma2 | weighted) keyed to the cloud size
    #[arg(long)]
    schedule: Option<String>,

    /// Schedule slack exponent
    #[arg(long, default_value_t = 0.5)]
    sigma: f64,

    /// Intrinsic dimension for the schedule (defaults to the cloud's manifold metadata)
    #[arg(long)]
    dim: Option<usize>,

    /// Scalar field, e.g. coord:2 | const:1 | sqdist:0,0,1 | fxy:X;Y | Fxy:X;Y
    #[arg(long)]
    field: String,

    /// Second field for the bilinear form (defaults to --field)
    #[arg(long)]
    field2: Option<String>,

    /// Density-correction exponent in [0, 1]; adds alpha-normalized mass and
    /// Laplacian values to the report
    #[arg(long)]
    alpha: Option<f64>,

    /// Query point, comma-separated; repeatable
    #[arg(long = "query", required = true)]
    queries: Vec<String>,

    /// Which operators to report: theta | lap | gamma | gamma2 | all
    #[arg(long, default_value = "all")]
    op: String,

    /// Output file; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,

    /// Omit the timestamp field for byte-reproducible output
    #[arg(long)]
    no_timestamp: bool,
}

pub fn run(args: &EstimateArgs) -> CliResult<()> {
    let cloud = load_csv(&args.cloud)?;
    let t = bandwidth::resolve(
        args.t,
        args.schedule.as_deref(),
        args.sigma,
        args.dim,
        cloud.n(),
        cloud.spec().map(|s| s.intrinsic_dim()),
    )?;
    let f = fields::parse_field(&args.field)?;
    let h = match &args.field2 {
        Some(s) => Some(fields::parse_field(s)?),
        None => None,
    };
    let alpha = match args.alpha {
        Some(a) => Some(Alpha::new(a)?),
        None => None,
    };
    // theta and n_eff are always reported as row diagnostics; --op selects
    // which of the derived operators join them.
    let (want_lap, want_gamma, want_gamma2) = match args.op.as_str() {
        "all" => (true, true, true),
        "theta" => (false, false, false),
        "lap" => (true, false, false),
        "gamma" => (false, true, false),
        "gamma2" => (false, false, true),
        other => return Err(CliError::usage(format!("unknown op {other:?}"))),
    };

    let queries: Vec<Vec<f64>> = args
        .queries
        .iter()
        .map(|q| fields::parse_vector(q))
        .collect::<CliResult<_>>()?;

    let mut reports = Vec::with_capacity(queries.len());
    for (index, q) in queries.iter().enumerate() {
        let at = |e: ricci_core::Error| CliError::QueryFailed { index, source: e };
        let row = kernel_row(&cloud, t, q).map_err(at)?;
        let mut entry = json!({
            "query": q,
            "theta": row.theta,
            "n_eff": row.n_eff,
        });
        let obj = entry.as_object_mut().expect("entry is an object");
        if want_lap {
            let lap = l_t_hat(&cloud, t, &f, q).map_err(at)?;
            obj.insert("lap".into(), lap.into());
        }
        if want_gamma {
            let g = match &h {
                Some(h) => gamma_hat(&cloud, t, &f, h, q).map_err(at)?,
                None => gamma_hat(&cloud, t, &f, &f, q).map_err(at)?,
            };
            obj.insert("gamma".into(), g.into());
        }
        if want_gamma2 {
            let g2 = gamma2_hat(&cloud, t, &f, q).map_err(at)?;
            obj.insert("gamma2".into(), g2.into());
        }
        if let Some(a) = alpha {
            let ta = theta_alpha_hat(&cloud, t, a, q).map_err(at)?;
            obj.insert("theta_alpha".into(), ta.into());
            if want_lap {
                let la = l_t_alpha_hat(&cloud, t, a, &f, q).map_err(at)?;
                obj.insert("lap_alpha".into(), la.into());
            }
        }
        reports.push(entry);
    }

    let mut report = json!({
        "command": "estimate",
        "cloud": args.cloud.display().to_string(),
        "n": cloud.n(),
        "spec": cloud.spec_string(),
        "t": t.get(),
        "alpha": args.alpha,
        "field": args.field,
        "field2": args.field2,
        "op": args.op,
        "queries": reports,
    });
    stamp_json(&mut report, timestamp(args.no_timestamp));
    write_out(args.out.as_deref(), &render_json(&report))
}
