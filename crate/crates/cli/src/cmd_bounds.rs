use std::path::PathBuf;

use clap::Args;
use serde_json::json;

use ricci_core::bounds::{
    ambient_covering_bound, class_constants, envelope_constant, q_t_report, required_n,
    BoundParams, FunctionClass,
};

use crate::errors::{CliError, CliResult};
use crate::fields;
use crate::output::{render_json, stamp_json, timestamp, write_out};

/// Evaluate the concentration-bound calculators: the two-term deviation
/// probability over a sample-size grid, or its inversion to a required
/// sample count, plus covering numbers and class constants.
#[derive(Args, Debug)]
pub struct BoundsArgs {
    /// Manifold volume
    #[arg(long)]
    volume: f64,

    /// Manifold reach
    #[arg(long)]
    reach: f64,

    /// Intrinsic dimension
    #[arg(long)]
    d: usize,

    /// Covering constant (default 8^d)
    #[arg(long = "c-d")]
    c_d: Option<f64>,

    /// Small-bandwidth threshold (default 0.2)
    #[arg(long)]
    t0: Option<f64>,

    /// Function class: pair | kernel | kernel-times
    #[arg(long, default_value = "kernel")]
    class: String,

    /// Pair class: Lipschitz constants and C1 bounds of the two factors
    #[arg(long, default_value_t = 1.0)]
    f_lip: f64,
    #[arg(long, default_value_t = 1.0)]
    h_lip: f64,
    #[arg(long, default_value_t = 1.0)]
    f_c1: f64,
    #[arg(long, default_value_t = 1.0)]
    h_c1: f64,

    /// kernel-times class: sup norm of the bounded factor
    #[arg(long, default_value_t = 1.0)]
    h_sup: f64,

    /// Bandwidth-free sup-norm factor; defaults to the class's own
    #[arg(long)]
    m: Option<f64>,

    /// Deviation size
    #[arg(long)]
    eps: f64,

    /// Bandwidth
    #[arg(long)]
    t: f64,

    /// Sample sizes, comma-separated (forward mode)
    #[arg(long, required_unless_present = "invert", conflicts_with = "invert")]
    n: Option<String>,

    /// Invert: find the smallest n with probability at most --delta
    #[arg(long)]
    invert: bool,

    /// Target probability for --invert
    #[arg(long, required_if_eq("invert", "true"))]
    delta: Option<f64>,

    /// Also report the ambient covering count at this radius
    #[arg(long)]
    cover_eps: Option<f64>,

    /// Output file; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,

    /// Omit the timestamp field for byte-reproducible output
    #[arg(long)]
    no_timestamp: bool,
}

pub fn run(args: &BoundsArgs) -> CliResult<()> {
    let mut params = BoundParams::new(args.volume, args.reach, args.d)?;
    if let Some(c) = args.c_d {
        params = params.with_c_d(c)?;
    }
    if let Some(t0) = args.t0 {
        params = params.with_t0(t0)?;
    }
    let class = match args.class.as_str() {
        "pair" => FunctionClass::PairProduct {
            f_lip: args.f_lip,
            h_lip: args.h_lip,
            f_c1: args.f_c1,
            h_c1: args.h_c1,
        },
        "kernel" => FunctionClass::Kernel,
        "kernel-times" => FunctionClass::KernelTimes { h_sup: args.h_sup },
        other => {
            return Err(CliError::usage(format!(
                "unknown class {other:?}: expected pair, kernel, or kernel-times"
            )))
        }
    };
    let constants = class_constants(&class)?;
    let m = args.m.unwrap_or(constants.m_factor);

    let mut report = json!({
        "command": "bounds",
        "params": {
            "volume": params.volume(),
            "reach": params.reach(),
            "d": params.dim(),
            "c_d": params.c_d(),
            "t0": params.t0(),
            "lambda0": params.lambda0(),
        },
        "class": {
            "kind": args.class,
            "lipschitz": constants.lipschitz,
            "m_factor": constants.m_factor,
            "sup_bound_at_t": constants.sup_bound(args.t),
        },
        "envelope_constant": envelope_constant(),
        "eps": args.eps,
        "t": args.t,
        "m": m,
    });
    let obj = report.as_object_mut().expect("report is an object");

    if let Some(ce) = args.cover_eps {
        let count = ambient_covering_bound(&params, ce)?;
        obj.insert("ambient_cover".into(), json!({"eps": ce, "count": count}));
    }

    if args.invert {
        let delta = args.delta.expect("clap enforces --delta with --invert");
        let n = required_n(&class, &params, args.eps, m, args.t, delta)?;
        obj.insert("delta".into(), delta.into());
        obj.insert("required_n".into(), n.into());
    } else {
        let ns = fields::parse_usize_list(args.n.as_deref().expect("clap enforces --n"))?;
        let rows: Vec<serde_json::Value> = ns
            .iter()
            .map(|&n| -> CliResult<serde_json::Value> {
                let r = q_t_report(&class, &params, args.eps, m, n as u64, args.t)?;
                Ok(json!({
                    "n": n,
                    "value": r.value,
                    "term_kernel": r.term_kernel,
                    "term_class": r.term_class,
                    "radius_kernel": r.radius_kernel,
                    "radius_class": r.radius_class,
                    "cover_kernel": r.cover_kernel,
                    "cover_class": r.cover_class,
                    "exponent_kernel": r.exponent_kernel,
                    "exponent_class": r.exponent_class,
                }))
            })
            .collect::<CliResult<_>>()?;
        obj.insert("q".into(), rows.into());
    }

    stamp_json(&mut report, timestamp(args.no_timestamp));
    write_out(args.out.as_deref(), &render_json(&report))
}
