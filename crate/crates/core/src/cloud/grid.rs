//! Deterministic quadrature grids with area weights.
//!
//! These stand in for "infinite sample" clouds: a kernel sum over a grid
//! with its weights is a quadrature rule for the corresponding population
//! integral. Supported: circles (equispaced), the 2-sphere (latitude bands
//! at midpoint rule, exact per-band area weights), and the flat torus
//! (equispaced product grid).

use std::f64::consts::PI;

use crate::cloud::{ManifoldSpec, PointCloud};
use crate::error::{Error, Result};
use crate::sum::CompensatedSum;

/// Build a quadrature grid over `spec` at the given resolution.
///
/// Point counts: `resolution` on a circle, `2 * resolution^2` on the
/// 2-sphere (`resolution` latitude bands, `2 * resolution` longitudes),
/// `resolution^2` on the torus. Weights are attached and sum to 1.
pub fn quadrature_grid(spec: &ManifoldSpec, resolution: usize) -> Result<PointCloud> {
    spec.validate()?;
    if resolution < 2 {
        return Err(Error::invalid(format!("grid resolution must be >= 2, got {resolution}")));
    }
    match *spec {
        ManifoldSpec::Circle { r } => {
            let n = resolution;
            let mut points = Vec::with_capacity(2 * n);
            for k in 0..n {
                let theta = 2.0 * PI * k as f64 / n as f64;
                points.push(r * theta.cos());
                points.push(r * theta.sin());
            }
            PointCloud::from_flat(points, 2)?
                .with_weights(vec![1.0 / n as f64; n])
                .map(|c| c.with_spec(*spec))
        }
        ManifoldSpec::Sphere { d: 2, r } => {
            let bands = resolution;
            let longs = 2 * resolution;
            let mut points = Vec::with_capacity(3 * bands * longs);
            let mut raw = Vec::with_capacity(bands * longs);
            let mut total = CompensatedSum::new();
            for i in 0..bands {
                // Midpoint latitude; cos(lat) is proportional to the exact
                // band area since integral of cos over the band equals
                // 2 sin(delta/2) cos(lat_mid).
                let lat = -PI / 2.0 + PI * (i as f64 + 0.5) / bands as f64;
                let (sin_lat, cos_lat) = lat.sin_cos();
                for j in 0..longs {
                    let lon = 2.0 * PI * j as f64 / longs as f64;
                    points.push(r * cos_lat * lon.cos());
                    points.push(r * cos_lat * lon.sin());
                    points.push(r * sin_lat);
                    raw.push(cos_lat);
                    total.add(cos_lat);
                }
            }
            let total = total.value();
            let weights: Vec<f64> = raw.into_iter().map(|w| w / total).collect();
            PointCloud::from_flat(points, 3)?.with_weights(weights).map(|c| c.with_spec(*spec))
        }
        ManifoldSpec::Sphere { d, .. } => Err(Error::Unsupported(format!(
            "quadrature grids exist only for the 2-sphere, got d={d}"
        ))),
        ManifoldSpec::CliffordTorus { r1, r2 } => {
            let n = resolution * resolution;
            let mut points = Vec::with_capacity(4 * n);
            for i in 0..resolution {
                let a = 2.0 * PI * i as f64 / resolution as f64;
                for j in 0..resolution {
                    let b = 2.0 * PI * j as f64 / resolution as f64;
                    points.push(r1 * a.cos());
                    points.push(r1 * a.sin());
                    points.push(r2 * b.cos());
                    points.push(r2 * b.sin());
                }
            }
            PointCloud::from_flat(points, 4)?
                .with_weights(vec![1.0 / n as f64; n])
                .map(|c| c.with_spec(*spec))
        }
    }
}
