use std::fmt::Write as _;
use std::path::PathBuf;

use clap::Args;
use rayon::prelude::*;

use ricci_core::cloud::{parse_spec, quadrature_grid, sample_uniform, ManifoldSpec, PointCloud};
use ricci_core::geometry::{
    analytic_gamma, analytic_gamma2, analytic_laplacian, ScalarField,
};
use ricci_core::kernel::{gamma2_hat, gamma_hat, l_t_hat, Bandwidth};
use ricci_core::Error as CoreError;

use crate::errors::{CliError, CliResult};
use crate::fields::{parse_field, parse_seeds, parse_usize_list, parse_vector};
use crate::output::{fmt_f, timestamp, write_out};
use crate::bandwidth;

/// Sweep sample size and seed, estimating one operator at fixed query points
/// against a deterministic reference, and tabulate the errors as CSV.
#[derive(Args, Debug)]
pub struct ConvergeArgs {
    /// Manifold to sample, e.g. sphere:d=2,r=1 (uniform laws only)
    #[arg(long)]
    spec: String,

    /// Strictly increasing sample sizes, e.g. 500,1000,2000,4000
    #[arg(long = "n-sweep")]
    n_sweep: String,

    /// Seeds: a..b (exclusive) or a comma list
    #[arg(long)]
    seeds: String,

    /// Scalar field fed to the operator
    #[arg(long)]
    field: String,

    /// Operator to sweep: lap | gamma | gamma2
    #[arg(long, default_value = "gamma2")]
    op: String,

    /// Bandwidth schedule kind; defaults to the kind matching --op
    #[arg(long)]
    schedule: Option<String>,

    /// Schedule slack exponent
    #[arg(long, default_value_t = 0.5)]
    sigma: f64,

    /// Fixed bandwidth instead of a schedule
    #[arg(long)]
    t: Option<f64>,

    /// Query point, comma-separated; repeatable
    #[arg(long = "query", required = true)]
    queries: Vec<String>,

    /// Resolution of the quadrature reference grid (non-analytic fields only)
    #[arg(long)]
    ref_res: Option<usize>,

    /// Output file; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,

    /// Omit the timestamp line for byte-reproducible output
    #[arg(long)]
    no_timestamp: bool,
}

#[derive(Clone, Copy, PartialEq)]
enum Op {
    Lap,
    Gamma,
    Gamma2,
}

impl Op {
    fn parse(s: &str) -> CliResult<Self> {
        match s {
            "lap" => Ok(Op::Lap),
            "gamma" => Ok(Op::Gamma),
            "gamma2" => Ok(Op::Gamma2),
            other => Err(CliError::usage(format!(
                "unknown op {other:?}: expected lap, gamma, or gamma2"
            ))),
        }
    }

    fn apply(
        self,
        cloud: &PointCloud,
        t: Bandwidth,
        f: &ScalarField,
        q: &[f64],
    ) -> Result<f64, CoreError> {
        match self {
            Op::Lap => l_t_hat(cloud, t, f, q),
            Op::Gamma => gamma_hat(cloud, t, f, f, q),
            Op::Gamma2 => gamma2_hat(cloud, t, f, q),
        }
    }

    fn analytic(
        self,
        spec: &ManifoldSpec,
        f: &ScalarField,
        q: &[f64],
    ) -> Result<f64, CoreError> {
        match self {
            Op::Lap => analytic_laplacian(spec, f, q),
            Op::Gamma => analytic_gamma(spec, f, q),
            Op::Gamma2 => analytic_gamma2(spec, f, q),
        }
    }
}

pub fn run(args: &ConvergeArgs) -> CliResult<()> {
    let parsed = parse_spec(&args.spec)?;
    if parsed.density_amplitude.is_some() {
        return Err(CliError::usage(
            "convergence references assume a uniform law; weighted circle specs are not supported here",
        ));
    }
    let spec = parsed.spec;
    let ns = parse_usize_list(&args.n_sweep)?;
    if !ns.windows(2).all(|w| w[0] < w[1]) {
        return Err(CliError::usage("--n-sweep must be strictly increasing"));
    }
    let seeds = parse_seeds(&args.seeds)?;
    let field = parse_field(&args.field)?;
    let op = Op::parse(&args.op)?;
    let queries: Vec<Vec<f64>> = args
        .queries
        .iter()
        .map(|q| parse_vector(q))
        .collect::<CliResult<_>>()?;

    // Bandwidth per sweep size: a fixed --t, or the schedule keyed to the
    // operator (the iterated form needs the slower 3d+3 decay).
    let default_kind = match op {
        Op::Lap | Op::Gamma => "gamma",
        Op::Gamma2 => "gamma2",
    };
    let schedule = match (&args.schedule, args.t) {
        (Some(k), _) => Some(k.clone()),
        (None, None) => Some(default_kind.to_string()),
        (None, Some(_)) => None,
    };
    let mode_desc = match (&schedule, args.t) {
        (Some(k), _) => format!("schedule={k} sigma={}", args.sigma),
        (None, Some(t)) => format!("t={}", fmt_f(t)),
        (None, None) => unreachable!("one of the two is always set"),
    };
    let ts: Vec<Bandwidth> = ns
        .iter()
        .map(|&n| {
            bandwidth::resolve(
                args.t,
                schedule.as_deref(),
                args.sigma,
                None,
                n,
                Some(spec.intrinsic_dim()),
            )
        })
        .collect::<CliResult<_>>()?;

    let refs = reference_values(args, &spec, op, &field, &queries, &ns, &ts)?;

    // Sweep cells in parallel; indexed collect keeps (n, seed) order, so
    // the bytes written never depend on the worker count.
    let cells: Vec<(usize, usize)> = (0..ns.len())
        .flat_map(|ni| (0..seeds.len()).map(move |si| (ni, si)))
        .collect();
    let results: Vec<Result<Vec<f64>, CoreError>> = cells
        .par_iter()
        .map(|&(ni, si)| {
            let cloud = sample_uniform(&spec, ns[ni], seeds[si])?;
            queries
                .iter()
                .map(|q| op.apply(&cloud, ts[ni], &field, q))
                .collect()
        })
        .collect();

    let mut body = String::new();
    writeln!(
        body,
        "# converge spec={} field={} op={} {}",
        spec.spec_string(),
        args.field,
        args.op,
        mode_desc
    )
    .expect("string write");
    if let Some(stamp) = timestamp(args.no_timestamp) {
        writeln!(body, "# timestamp={stamp}").expect("string write");
    }
    writeln!(body, "n,t,seed,query,estimate,oracle,abs_error").expect("string write");

    let mut per_n_errors: Vec<Vec<f64>> = vec![Vec::new(); ns.len()];
    for (&(ni, si), result) in cells.iter().zip(results) {
        let estimates = match result {
            Ok(v) => v,
            Err(e) => {
                // Surface the failing cell, keep the core error so the exit
                // code still reflects its kind.
                log::error!("sweep cell n={} seed={} failed", ns[ni], seeds[si]);
                return Err(e.into());
            }
        };
        for (qi, &est) in estimates.iter().enumerate() {
            let oracle = refs[ni][qi];
            let err = (est - oracle).abs();
            per_n_errors[ni].push(err);
            writeln!(
                body,
                "{},{},{},{},{},{},{}",
                ns[ni],
                fmt_f(ts[ni].get()),
                seeds[si],
                qi,
                fmt_f(est),
                fmt_f(oracle),
                fmt_f(err)
            )
            .expect("string write");
        }
    }
    for (ni, errs) in per_n_errors.iter_mut().enumerate() {
        writeln!(
            body,
            "# summary n={} median_abs_error={}",
            ns[ni],
            fmt_f(median(errs))
        )
        .expect("string write");
    }
    write_out(args.out.as_deref(), &body)
}

/// Reference value per (sweep size, query): the closed-form operator when
/// the field and manifold admit one, otherwise the same empirical operator
/// on a deterministic quadrature grid at the bandwidth of that sweep size.
fn reference_values(
    args: &ConvergeArgs,
    spec: &ManifoldSpec,
    op: Op,
    field: &ScalarField,
    queries: &[Vec<f64>],
    ns: &[usize],
    ts: &[Bandwidth],
) -> CliResult<Vec<Vec<f64>>> {
    match op.analytic(spec, field, &queries[0]) {
        Ok(_) => {
            let mut refs = Vec::with_capacity(ns.len());
            let row: Vec<f64> = queries
                .iter()
                .map(|q| op.analytic(spec, field, q))
                .collect::<Result<_, _>>()?;
            for _ in ns {
                refs.push(row.clone());
            }
            Ok(refs)
        }
        Err(CoreError::Unsupported(_)) => {
            let res = args.ref_res.unwrap_or_else(|| default_ref_res(spec, op, ns));
            log::info!("using a quadrature reference grid at resolution {res}");
            let grid = quadrature_grid(spec, res)?;
            let mut refs = Vec::with_capacity(ns.len());
            for &t in ts {
                let row: Vec<f64> = queries
                    .iter()
                    .map(|q| op.apply(&grid, t, field, q))
                    .collect::<Result<_, _>>()?;
                refs.push(row);
            }
            Ok(refs)
        }
        Err(e) => Err(e.into()),
    }
}

/// Grid resolution for the quadrature reference: four times the resolution
/// the largest sweep size corresponds to, capped so the reference itself
/// stays tractable (the iterated form costs quadratically in grid size).
fn default_ref_res(spec: &ManifoldSpec, op: Op, ns: &[usize]) -> usize {
    let n_max = *ns.last().expect("validated nonempty") as f64;
    let implied = match spec {
        ManifoldSpec::Circle { .. } => n_max,
        ManifoldSpec::Sphere { .. } => (n_max / 2.0).sqrt(),
        ManifoldSpec::CliffordTorus { .. } => n_max.sqrt(),
    };
    let wanted = (4.0 * implied).ceil() as usize;
    let cap_points = match op {
        Op::Lap | Op::Gamma => 20_000usize,
        Op::Gamma2 => 6_000,
    };
    let cap = match spec {
        ManifoldSpec::Circle { .. } => cap_points,
        ManifoldSpec::Sphere { .. } => ((cap_points / 2) as f64).sqrt() as usize,
        ManifoldSpec::CliffordTorus { .. } => (cap_points as f64).sqrt() as usize,
    };
    let res = wanted.clamp(2, cap.max(2));
    if res < wanted {
        log::warn!(
            "quadrature reference resolution capped at {res} (wanted {wanted}); pass --ref-res to override"
        );
    }
    res
}

fn median(errs: &mut [f64]) -> f64 {
    errs.sort_by(|a, b| a.partial_cmp(b).expect("errors are finite"));
    let k = errs.len();
    if k % 2 == 1 {
        errs[k / 2]
    } else {
        0.5 * (errs[k / 2 - 1] + errs[k / 2])
    }
}
