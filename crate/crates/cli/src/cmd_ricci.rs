use std::path::PathBuf;

use clap::Args;
use serde_json::json;

use ricci_core::cloud::{load_csv, sq_dist};
use ricci_core::geometry::true_ricci;
use ricci_core::kernel::Bandwidth;
use ricci_core::ricci::{
    empirical_coarse_ricci, empirical_life_sized, ricci_limit_estimate, BandwidthRule,
    LimitSchedule,
};

use crate::errors::{CliError, CliResult};
use crate::fields::{parse_f64_list, parse_vector};
use crate::output::{render_json, stamp_json, timestamp, write_out};

/// Coarse Ricci curvature of a stored cloud: either for one point pair, or
/// swept along a geodesic toward zero separation.
#[derive(Args, Debug)]
pub struct RicciArgs {
    /// Cloud CSV
    #[arg(long)]
    cloud: PathBuf,

    /// Base point, comma-separated
    #[arg(long)]
    x: String,

    /// Second point: selects pairwise mode
    #[arg(long, conflicts_with = "v")]
    y: Option<String>,

    /// Unit tangent direction at x: selects limit mode (needs manifold metadata)
    #[arg(long)]
    v: Option<String>,

    /// Bandwidth; pairwise default 0.01, limit default 0.005 (fixed rule)
    #[arg(long, conflicts_with = "t_coeff")]
    t: Option<f64>,

    /// Limit mode: couple the bandwidth to the separation as t = coeff * lambda^2
    #[arg(long)]
    t_coeff: Option<f64>,

    /// Limit mode separations, strictly decreasing
    #[arg(long, default_value = "0.5,0.35,0.25")]
    lambdas: String,

    /// Pairwise mode: insist on the distance-normalized form (errors when x = y)
    #[arg(long)]
    life_sized: bool,

    /// Output file; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,

    /// Omit the timestamp field for byte-reproducible output
    #[arg(long)]
    no_timestamp: bool,
}

pub fn run(args: &RicciArgs) -> CliResult<()> {
    let cloud = load_csv(&args.cloud)?;
    let x = parse_vector(&args.x)?;
    let mut report = match (&args.y, &args.v) {
        (Some(y), None) => pairwise(args, &cloud, &x, &parse_vector(y)?)?,
        (None, Some(v)) => limit(args, &cloud, &x, &parse_vector(v)?)?,
        (None, None) => return Err(CliError::usage("pass --y (pairwise) or --v (limit)")),
        (Some(_), Some(_)) => unreachable!("clap rejects --y with --v"),
    };
    stamp_json(&mut report, timestamp(args.no_timestamp));
    write_out(args.out.as_deref(), &render_json(&report))
}

fn pairwise(
    args: &RicciArgs,
    cloud: &ricci_core::PointCloud,
    x: &[f64],
    y: &[f64],
) -> CliResult<serde_json::Value> {
    let t = Bandwidth::new(args.t.unwrap_or(0.01))?;
    let plain = empirical_coarse_ricci(cloud, t, x, y)?;
    let d2 = sq_dist(x, y);
    // The distance-normalized value and the cross-check that multiplying it
    // back by d^2 recovers the raw form; both need x != y.
    let (life, residual) = if d2 > 0.0 {
        let scaled = empirical_life_sized(cloud, t, x, y)?;
        let residual = (scaled.value * d2 - plain.value).abs();
        (Some(scaled.value), Some(residual))
    } else {
        if args.life_sized {
            return Err(CliError::Core(ricci_core::Error::InvalidParameter(
                "life-sized form needs distinct points x and y".into(),
            )));
        }
        (None, None)
    };
    Ok(json!({
        "command": "ricci",
        "mode": "pairwise",
        "cloud": args.cloud.display().to_string(),
        "n": cloud.n(),
        "spec": cloud.spec_string(),
        "x": x,
        "y": y,
        "t": t.get(),
        "sq_dist": d2,
        "value": plain.value,
        "life_sized": life,
        "homogeneity_residual": residual,
    }))
}

fn limit(
    args: &RicciArgs,
    cloud: &ricci_core::PointCloud,
    x: &[f64],
    v: &[f64],
) -> CliResult<serde_json::Value> {
    let lambdas = parse_f64_list(&args.lambdas)?;
    let rule = match (args.t, args.t_coeff) {
        (None, Some(c)) => BandwidthRule::QuadraticInLambda { c },
        (t, None) => BandwidthRule::Fixed(t.unwrap_or(0.005)),
        (Some(_), Some(_)) => unreachable!("clap rejects --t with --t-coeff"),
    };
    let sched = LimitSchedule::new(lambdas, rule)?;
    let est = ricci_limit_estimate(cloud, x, v, &sched)?;
    let oracle = match cloud.spec() {
        Some(spec) => Some(true_ricci(spec, x, v)?),
        None => None,
    };
    let points: Vec<_> = est
        .points
        .iter()
        .map(|p| json!({"lambda": p.lambda, "t": p.t, "value": p.value}))
        .collect();
    let rule_json = match rule {
        BandwidthRule::Fixed(t) => json!({"kind": "fixed", "t": t}),
        BandwidthRule::QuadraticInLambda { c } => json!({"kind": "quadratic", "coeff": c}),
    };
    Ok(json!({
        "command": "ricci",
        "mode": "limit",
        "cloud": args.cloud.display().to_string(),
        "n": cloud.n(),
        "spec": cloud.spec_string(),
        "x": x,
        "v": v,
        "rule": rule_json,
        "points": points,
        "limit": est.limit,
        "richardson": est.richardson,
        "true_ricci": oracle,
    }))
}
