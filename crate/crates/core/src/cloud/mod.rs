//! Point clouds on embedded manifolds.
//!
//! A [`PointCloud`] is a flat, row-major block of ambient coordinates with
//! optional per-point weights and optional provenance metadata (which
//! manifold it was drawn from, and with which seed). Clouds are immutable
//! once built; the samplers in [`sample`], the quadrature grids in [`grid`],
//! and the CSV reader in [`csv`] are the only producers in this crate.

mod csv;
mod grid;
mod sample;

pub use csv::{load_csv, read_csv, save_csv, write_csv};
pub use grid::quadrature_grid;
pub use sample::{sample_uniform, sample_weighted_circle};

use crate::error::{Error, Result};
use crate::sum::CompensatedSum;

/// Tolerance on `|sum of weights - 1|` for normalized weight vectors.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;

/// One of the supported closed manifolds, with its embedding parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ManifoldSpec {
    /// Round d-sphere of radius `r`, embedded in `R^{d+1}`.
    Sphere { d: usize, r: f64 },
    /// Circle of radius `r` in `R^2`.
    Circle { r: f64 },
    /// Product of two circles of radii `r1`, `r2`, embedded flat in `R^4`
    /// as `(r1 cos a, r1 sin a, r2 cos b, r2 sin b)`.
    CliffordTorus { r1: f64, r2: f64 },
}

impl ManifoldSpec {
    pub fn validate(&self) -> Result<()> {
        let ok = |r: f64| r.is_finite() && r > 0.0;
        match *self {
            ManifoldSpec::Sphere { d, r } => {
                if d < 1 {
                    return Err(Error::invalid("sphere dimension must be >= 1"));
                }
                if !ok(r) {
                    return Err(Error::invalid(format!("sphere radius must be positive, got {r}")));
                }
            }
            ManifoldSpec::Circle { r } => {
                if !ok(r) {
                    return Err(Error::invalid(format!("circle radius must be positive, got {r}")));
                }
            }
            ManifoldSpec::CliffordTorus { r1, r2 } => {
                if !ok(r1) || !ok(r2) {
                    return Err(Error::invalid(format!(
                        "torus radii must be positive, got r1={r1}, r2={r2}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Dimension of the ambient Euclidean space the manifold sits in.
    pub fn ambient_dim(&self) -> usize {
        match *self {
            ManifoldSpec::Sphere { d, .. } => d + 1,
            ManifoldSpec::Circle { .. } => 2,
            ManifoldSpec::CliffordTorus { .. } => 4,
        }
    }

    /// Intrinsic dimension of the manifold itself.
    pub fn intrinsic_dim(&self) -> usize {
        match *self {
            ManifoldSpec::Sphere { d, .. } => d,
            ManifoldSpec::Circle { .. } => 1,
            ManifoldSpec::CliffordTorus { .. } => 2,
        }
    }

    /// Riemannian volume (surface measure) of the manifold.
    pub fn volume(&self) -> f64 {
        use std::f64::consts::PI;
        match *self {
            // Area of S^d(r): 2 pi^{(d+1)/2} / Gamma((d+1)/2) * r^d.
            ManifoldSpec::Sphere { d, r } => {
                2.0 * PI.powf((d as f64 + 1.0) / 2.0) / gamma_half(d + 1) * r.powi(d as i32)
            }
            ManifoldSpec::Circle { r } => 2.0 * PI * r,
            ManifoldSpec::CliffordTorus { r1, r2 } => (2.0 * PI * r1) * (2.0 * PI * r2),
        }
    }

    /// Canonical textual form, e.g. `sphere:d=2,r=1`.
    pub fn spec_string(&self) -> String {
        match *self {
            ManifoldSpec::Sphere { d, r } => format!("sphere:d={d},r={}", fmt_param(r)),
            ManifoldSpec::Circle { r } => format!("circle:r={}", fmt_param(r)),
            ManifoldSpec::CliffordTorus { r1, r2 } => {
                format!("torus:r1={},r2={}", fmt_param(r1), fmt_param(r2))
            }
        }
    }

    /// Parse the canonical form produced by [`spec_string`](Self::spec_string).
    pub fn parse(s: &str) -> Result<Self> {
        let parsed = parse_spec(s)?;
        if parsed.density_amplitude.is_some() {
            return Err(Error::invalid(format!(
                "'{s}' names a sampling density, not a plain manifold"
            )));
        }
        Ok(parsed.spec)
    }

    /// Largest relative defect of the manifold's defining equations at `z`.
    /// Zero (up to rounding) exactly when `z` lies on the manifold.
    pub fn residual(&self, z: &[f64]) -> Result<f64> {
        let want = self.ambient_dim();
        if z.len() != want {
            return Err(Error::DimensionMismatch { expected: want, got: z.len() });
        }
        let defect = |sq: f64, r: f64| ((sq.sqrt() - r) / r).abs();
        Ok(match *self {
            ManifoldSpec::Sphere { r, .. } | ManifoldSpec::Circle { r } => {
                defect(z.iter().map(|c| c * c).sum(), r)
            }
            ManifoldSpec::CliffordTorus { r1, r2 } => {
                let a = defect(z[0] * z[0] + z[1] * z[1], r1);
                let b = defect(z[2] * z[2] + z[3] * z[3], r2);
                a.max(b)
            }
        })
    }
}

/// Gamma(k/2) for k >= 1, by the half-integer recursion.
fn gamma_half(k: usize) -> f64 {
    match k {
        0 => f64::INFINITY,
        1 => std::f64::consts::PI.sqrt(),
        2 => 1.0,
        k => (k as f64 / 2.0 - 1.0) * gamma_half(k - 2),
    }
}

/// Render a radius for a spec string: integral values print bare ("2"),
/// everything else in full precision so parsing round-trips.
fn fmt_param(r: f64) -> String {
    if r.fract() == 0.0 && r.abs() < 1e15 {
        format!("{}", r as i64)
    } else {
        format!("{r:.16e}")
    }
}

/// A spec string together with an optional sampling-density amplitude
/// (`wcircle:r=..,a=..` clouds record the `a` they were drawn with).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParsedSpec {
    pub spec: ManifoldSpec,
    pub density_amplitude: Option<f64>,
}

/// Parse `sphere:d=2,r=1`, `circle:r=1`, `torus:r1=1,r2=1`, or
/// `wcircle:r=1,a=0.5` (a circle tagged with a density amplitude).
pub fn parse_spec(s: &str) -> Result<ParsedSpec> {
    let bad = |msg: String| Error::invalid(format!("spec '{s}': {msg}"));
    let (name, rest) = s.split_once(':').unwrap_or((s, ""));
    let mut kv: Vec<(&str, &str)> = Vec::new();
    if !rest.is_empty() {
        for part in rest.split(',') {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| bad(format!("expected key=value, got '{part}'")))?;
            kv.push((k.trim(), v.trim()));
        }
    }
    let take = |key: &str| -> Result<f64> {
        let v = kv
            .iter()
            .find(|(k, _)| *k == key)
            .map(|(_, v)| *v)
            .ok_or_else(|| bad(format!("missing parameter '{key}'")))?;
        v.parse::<f64>().map_err(|_| bad(format!("parameter '{key}' is not a number: '{v}'")))
    };
    let parsed = match name {
        "sphere" => {
            let d = take("d")?;
            if d.fract() != 0.0 || d < 1.0 || d > 64.0 {
                return Err(bad(format!("dimension d must be a small positive integer, got {d}")));
            }
            ParsedSpec {
                spec: ManifoldSpec::Sphere { d: d as usize, r: take("r")? },
                density_amplitude: None,
            }
        }
        "circle" => ParsedSpec {
            spec: ManifoldSpec::Circle { r: take("r")? },
            density_amplitude: None,
        },
        "torus" => ParsedSpec {
            spec: ManifoldSpec::CliffordTorus { r1: take("r1")?, r2: take("r2")? },
            density_amplitude: None,
        },
        "wcircle" => {
            let a = take("a")?;
            if !(0.0..1.0).contains(&a) {
                return Err(bad(format!("density amplitude must lie in [0,1), got {a}")));
            }
            ParsedSpec {
                spec: ManifoldSpec::Circle { r: take("r")? },
                density_amplitude: Some(a),
            }
        }
        other => return Err(bad(format!("unknown manifold '{other}'"))),
    };
    parsed.spec.validate()?;
    Ok(parsed)
}

/// Immutable set of ambient points with optional weights and provenance.
#[derive(Debug, Clone)]
pub struct PointCloud {
    points: Vec<f64>, // row-major, n * dim
    n: usize,
    dim: usize,
    weights: Option<Vec<f64>>,
    spec: Option<ManifoldSpec>,
    seed: Option<u64>,
    density_amplitude: Option<f64>,
}

impl PointCloud {
    /// Build from a flat row-major coordinate block.
    pub fn from_flat(points: Vec<f64>, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("ambient dimension must be >= 1"));
        }
        if points.is_empty() || points.len() % dim != 0 {
            return Err(Error::invalid(format!(
                "coordinate block of length {} is not a positive multiple of dim {dim}",
                points.len()
            )));
        }
        if let Some(bad) = points.iter().find(|c| !c.is_finite()) {
            return Err(Error::invalid(format!("non-finite coordinate {bad}")));
        }
        let n = points.len() / dim;
        Ok(Self { points, n, dim, weights: None, spec: None, seed: None, density_amplitude: None })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map(Vec::len).unwrap_or(0);
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::invalid("rows have inconsistent lengths"));
        }
        Self::from_flat(rows.concat(), dim)
    }

    /// Attach a normalized weight vector: strictly positive entries summing
    /// to 1 within [`WEIGHT_SUM_TOL`].
    pub fn with_weights(self, weights: Vec<f64>) -> Result<Self> {
        let this = self.with_unnormalized_weights(weights)?;
        let total = {
            let mut acc = CompensatedSum::new();
            for &w in this.weights.as_deref().unwrap() {
                acc.add(w);
            }
            acc.value()
        };
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::invalid(format!(
                "weights must sum to 1 within {WEIGHT_SUM_TOL:e}, got {total:.17}"
            )));
        }
        Ok(this)
    }

    /// Attach weights without the sum-to-one check. The kernel estimators
    /// are invariant under a global rescaling of the weights, so raw
    /// (unnormalized) measures are acceptable wherever a cloud is.
    pub fn with_unnormalized_weights(mut self, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != self.n {
            return Err(Error::invalid(format!(
                "{} weights for {} points",
                weights.len(),
                self.n
            )));
        }
        if let Some(bad) = weights.iter().find(|w| !w.is_finite() || **w <= 0.0) {
            return Err(Error::invalid(format!("weights must be finite and positive, got {bad}")));
        }
        self.weights = Some(weights);
        Ok(self)
    }

    pub fn with_spec(mut self, spec: ManifoldSpec) -> Self {
        self.spec = Some(spec);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub(crate) fn with_density_amplitude(mut self, a: f64) -> Self {
        self.density_amplitude = Some(a);
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points_flat(&self) -> &[f64] {
        &self.points
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.points.chunks_exact(self.dim)
    }

    pub fn weights(&self) -> Option<&[f64]> {
        self.weights.as_deref()
    }

    /// Weight of point `i`; uniform `1/n` when no weights are attached.
    #[inline]
    pub fn weight(&self, i: usize) -> f64 {
        match &self.weights {
            Some(w) => w[i],
            None => 1.0 / self.n as f64,
        }
    }

    pub fn spec(&self) -> Option<&ManifoldSpec> {
        self.spec.as_ref()
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn density_amplitude(&self) -> Option<f64> {
        self.density_amplitude
    }

    /// Spec string including the density tag when present, `none` otherwise.
    pub fn spec_string(&self) -> String {
        match (self.spec, self.density_amplitude) {
            (Some(ManifoldSpec::Circle { r }), Some(a)) => {
                format!("wcircle:r={},a={}", fmt_param(r), fmt_param(a))
            }
            (Some(spec), _) => spec.spec_string(),
            (None, _) => "none".to_owned(),
        }
    }
}

/// Squared Euclidean distance between two slices of equal length.
#[inline]
pub fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut s = 0.0;
    for (x, y) in a.iter().zip(b) {
        let d = x - y;
        s += d * d;
    }
    s
}

/// Dense matrix of pairwise squared distances.
#[derive(Debug, Clone)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<f64>, // row-major n*n
}

impl DistanceMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Squared distance between cloud points `i` and `j`.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }
}

/// All pairwise squared distances of a cloud. Symmetric by construction:
/// each pair is computed once and mirrored.
pub fn pairwise_sq_dists(cloud: &PointCloud) -> DistanceMatrix {
    let n = cloud.n();
    let mut data = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d2 = sq_dist(cloud.point(i), cloud.point(j));
            data[i * n + j] = d2;
            data[j * n + i] = d2;
        }
    }
    DistanceMatrix { n, data }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_dimensions_and_volume() {
        let s2 = ManifoldSpec::Sphere { d: 2, r: 1.0 };
        assert_eq!(s2.ambient_dim(), 3);
        assert_eq!(s2.intrinsic_dim(), 2);
        assert!((s2.volume() - 4.0 * std::f64::consts::PI).abs() < 1e-12);

        let s3 = ManifoldSpec::Sphere { d: 3, r: 2.0 };
        // Area of S^3(r) = 2 pi^2 r^3.
        assert!((s3.volume() - 2.0 * std::f64::consts::PI.powi(2) * 8.0).abs() < 1e-10);

        let t = ManifoldSpec::CliffordTorus { r1: 1.0, r2: 0.5 };
        assert_eq!(t.ambient_dim(), 4);
        assert!((t.volume() - 2.0 * std::f64::consts::PI.powi(2)).abs() < 1e-12);
    }

    #[test]
    fn spec_string_round_trips() {
        let specs = [
            ManifoldSpec::Sphere { d: 2, r: 1.0 },
            ManifoldSpec::Sphere { d: 5, r: 0.3 },
            ManifoldSpec::Circle { r: 2.0 },
            ManifoldSpec::CliffordTorus { r1: 1.0, r2: 0.25 },
        ];
        for spec in specs {
            let s = spec.spec_string();
            assert_eq!(ManifoldSpec::parse(&s).unwrap(), spec, "string was {s}");
        }
        let w = parse_spec("wcircle:r=1,a=0.5").unwrap();
        assert_eq!(w.spec, ManifoldSpec::Circle { r: 1.0 });
        assert_eq!(w.density_amplitude, Some(0.5));
    }

    #[test]
    fn parse_rejects_garbage() {
        for bad in [
            "sphere",
            "sphere:d=2",
            "sphere:d=0,r=1",
            "sphere:d=2,r=-1",
            "sphere:d=2.5,r=1",
            "klein:r=1",
            "circle:r=abc",
            "torus:r1=1,r2=0",
            "wcircle:r=1,a=1.0",
            "circle:radius=1",
        ] {
            assert!(parse_spec(bad).is_err(), "{bad} should not parse");
        }
    }

    #[test]
    fn residual_flags_off_manifold_points() {
        let s = ManifoldSpec::Sphere { d: 2, r: 2.0 };
        assert!(s.residual(&[2.0, 0.0, 0.0]).unwrap() < 1e-15);
        assert!(s.residual(&[2.2, 0.0, 0.0]).unwrap() > 0.09);
        let t = ManifoldSpec::CliffordTorus { r1: 1.0, r2: 1.0 };
        assert!(t.residual(&[1.0, 0.0, 0.0, 1.0]).unwrap() < 1e-15);
        assert!(t.residual(&[1.0, 0.0, 0.5, 0.5]).unwrap() > 0.2);
        assert!(t.residual(&[1.0, 0.0]).is_err());
    }

    #[test]
    fn cloud_construction_checks() {
        assert!(PointCloud::from_flat(vec![], 2).is_err());
        assert!(PointCloud::from_flat(vec![1.0, 2.0, 3.0], 2).is_err());
        assert!(PointCloud::from_flat(vec![1.0, f64::NAN], 2).is_err());

        let c = PointCloud::from_flat(vec![0.0, 1.0, 2.0, 3.0], 2).unwrap();
        assert_eq!(c.n(), 2);
        assert_eq!(c.point(1), &[2.0, 3.0]);
        assert_eq!(c.weight(0), 0.5);

        assert!(c.clone().with_weights(vec![0.5]).is_err());
        assert!(c.clone().with_weights(vec![0.5, -0.5]).is_err());
        assert!(c.clone().with_weights(vec![0.7, 0.4]).is_err());
        let w = c.clone().with_weights(vec![0.25, 0.75]).unwrap();
        assert_eq!(w.weight(1), 0.75);
        // Raw measures skip only the normalization check.
        assert!(c.clone().with_unnormalized_weights(vec![3.0, 4.0]).is_ok());
        assert!(c.with_unnormalized_weights(vec![3.0, 0.0]).is_err());
    }

    #[test]
    fn distance_matrix_is_symmetric_with_zero_diagonal() {
        let c = PointCloud::from_rows(&[
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![0.0, 2.0],
        ])
        .unwrap();
        let m = pairwise_sq_dists(&c);
        assert_eq!(m.n(), 3);
        for i in 0..3 {
            assert_eq!(m.get(i, i), 0.0);
            for j in 0..3 {
                assert_eq!(m.get(i, j), m.get(j, i));
            }
        }
        assert_eq!(m.get(0, 1), 1.0);
        assert_eq!(m.get(0, 2), 4.0);
        assert_eq!(m.get(1, 2), 5.0);
    }
}
