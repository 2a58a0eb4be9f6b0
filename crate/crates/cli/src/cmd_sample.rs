use std::path::PathBuf;

use clap::Args;
use ricci_core::cloud::{
    parse_spec, quadrature_grid, sample_uniform, sample_weighted_circle, save_csv, write_csv,
};

use crate::errors::{CliError, CliResult};

/// Draw a seeded random sample (or build a quadrature grid) on a manifold
/// and write it as a cloud CSV.
#[derive(Args, Debug)]
pub struct SampleArgs {
    /// Manifold, e.g. sphere:d=2,r=1 | circle:r=1 | torus:r1=1,r2=1 | wcircle:r=1,a=0.5
    #[arg(long)]
    spec: String,

    /// Number of random points to draw
    #[arg(long, required_unless_present = "grid_res", conflicts_with = "grid_res")]
    n: Option<usize>,

    /// RNG seed (point i depends only on the seed and i)
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Build a deterministic quadrature grid at this resolution instead of sampling
    #[arg(long)]
    grid_res: Option<usize>,

    /// Output file; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn run(args: &SampleArgs) -> CliResult<()> {
    let parsed = parse_spec(&args.spec)?;
    let cloud = if let Some(res) = args.grid_res {
        if parsed.density_amplitude.is_some() {
            return Err(CliError::usage(
                "quadrature grids carry uniform weight; use a plain circle spec or drop --grid-res",
            ));
        }
        quadrature_grid(&parsed.spec, res)?
    } else {
        let n = args.n.expect("clap enforces --n without --grid-res");
        match parsed.density_amplitude {
            Some(a) => {
                let r = match parsed.spec {
                    ricci_core::ManifoldSpec::Circle { r } => r,
                    _ => unreachable!("density amplitudes only attach to circles"),
                };
                sample_weighted_circle(r, a, n, args.seed)?
            }
            None => sample_uniform(&parsed.spec, n, args.seed)?,
        }
    };

    match &args.out {
        Some(path) => save_csv(&cloud, path)?,
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            write_csv(&cloud, &mut lock)?;
        }
    }
    Ok(())
}
