//! Bandwidth resolution shared by `estimate` and `converge`: either an
//! explicit `--t`, or a sample-size schedule `--schedule KIND --sigma S`.

use ricci_core::kernel::Bandwidth;
use ricci_core::ricci::{schedule_t, ScheduleConfig, ScheduleKind};

use crate::errors::{CliError, CliResult};

pub fn resolve(
    t: Option<f64>,
    schedule: Option<&str>,
    sigma: f64,
    dim_flag: Option<usize>,
    n: usize,
    spec_dim: Option<usize>,
) -> CliResult<Bandwidth> {
    match (t, schedule) {
        (Some(t), None) => Ok(Bandwidth::new(t)?),
        (None, Some(kind)) => {
            let kind = ScheduleKind::parse(kind)?;
            let d = dim_flag.or(spec_dim).ok_or_else(|| {
                CliError::usage(
                    "schedules need an intrinsic dimension: pass --dim or use a cloud with manifold metadata",
                )
            })?;
            Ok(schedule_t(n, ScheduleConfig::new(d, sigma, kind)?)?)
        }
        (Some(_), Some(_)) => Err(CliError::usage("--t and --schedule are mutually exclusive")),
        (None, None) => Err(CliError::usage("pass --t or --schedule")),
    }
}
