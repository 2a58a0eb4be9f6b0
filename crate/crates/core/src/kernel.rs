//! Gaussian-kernel operator stack over a point cloud.
//!
//! For a cloud `{xi_j}` with weights `mu_j` and bandwidth `t`, the raw
//! kernel weights at a query `x` are `w_j = exp(-|x - xi_j|^2 / 2t)`.
//! Everything builds on the empirical mass `theta_hat = sum mu_j w_j`:
//!
//! * `l_t_hat`: `(2/t) (1/theta) sum mu_j w_j (f_j - f(x))`, a rescaled
//!   generator converging to the Laplace-Beltrami operator plus a density
//!   drift;
//! * `gamma_hat`: `(1/t) (1/theta) sum mu_j w_j (f_j - f(x)) (h_j - h(x))`,
//!   the squared-gradient (carré du champ) form;
//! * `gamma2_hat`: the iterated form
//!   `(L G(f,f) - 2 G(Lf, f)) / 2`, assembled by tabulating
//!   `u_j = gamma_hat(f,f)(xi_j)` and `v_j = l_t_hat f(xi_j)` over the whole
//!   cloud (cost `O(n^2)`);
//! * `gamma2_hat_direct`: the same quantity expanded by hand into four
//!   explicit double sums. Kept strictly independent of `gamma2_hat` as a
//!   cross-check; do not "optimize" one in terms of the other;
//! * `theta_alpha_hat` / `l_t_alpha_hat`: the density-corrected family,
//!   where each sample's kernel weight is divided by `theta_hat(xi_j)^alpha`
//!   before normalizing. `alpha = 1` cancels the sampling density to leading
//!   order; `alpha = 0` reduces bitwise to the plain operators.
//!
//! Normalization is by the empirical mass, not by `(2 pi t)^{d/2}`; the
//! latter is available through [`gaussian_normalizer`] and
//! [`l_t_hat_mass_normalized`] for density diagnostics, where the estimator
//! targets `density(x) * (Laplacian + drift)` instead.
//!
//! Every sum is compensated and runs in cloud index order, so values do not
//! depend on thread count. Parallelism only splits *independent* inner
//! tabulations (one task per sample point), never a single reduction.

use rayon::prelude::*;

use crate::cloud::{sq_dist, PointCloud};
use crate::error::{Error, Result};
use crate::geometry::FieldEval;
use crate::sum::CompensatedSum;

/// Hard-error floor for the empirical mass at a query point.
pub const THETA_FLOOR: f64 = 1e-300;
/// Hard-error floor for `n_eff` relative to `n`.
pub const NEFF_RELATIVE_FLOOR: f64 = 1e-8;
/// Below this effective count the row is usable but noisy; a warning is
/// logged and the computation proceeds.
pub const NEFF_WARN_THRESHOLD: f64 = 10.0;

/// Validated positive kernel bandwidth.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Bandwidth(f64);

impl Bandwidth {
    pub fn new(t: f64) -> Result<Self> {
        if !t.is_finite() || t <= 0.0 {
            return Err(Error::invalid(format!("bandwidth must be positive and finite, got {t}")));
        }
        Ok(Self(t))
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }
}

/// Validated density-correction exponent in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Alpha(f64);

impl Alpha {
    pub fn new(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() || !(0.0..=1.0).contains(&alpha) {
            return Err(Error::invalid(format!("alpha must lie in [0,1], got {alpha}")));
        }
        Ok(Self(alpha))
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }
}

/// Kernel weights of one query point against the whole cloud.
#[derive(Debug, Clone)]
pub struct KernelRow {
    /// `w_j = exp(-|x - xi_j|^2 / 2t)`, unweighted.
    pub weights: Vec<f64>,
    /// `sum_j mu_j w_j`.
    pub theta: f64,
    /// `sum_j w_j`, the effective number of samples the row sees.
    pub n_eff: f64,
}

fn check_query_dim(cloud: &PointCloud, x: &[f64]) -> Result<()> {
    if x.len() != cloud.ambient_dim() {
        return Err(Error::DimensionMismatch { expected: cloud.ambient_dim(), got: x.len() });
    }
    Ok(())
}

fn kernel_row_quiet(cloud: &PointCloud, t: Bandwidth, x: &[f64]) -> Result<KernelRow> {
    check_query_dim(cloud, x)?;
    let n = cloud.n();
    let inv_2t = 1.0 / (2.0 * t.get());
    let mut weights = Vec::with_capacity(n);
    let mut theta = CompensatedSum::new();
    let mut n_eff = CompensatedSum::new();
    for j in 0..n {
        let w = (-sq_dist(x, cloud.point(j)) * inv_2t).exp();
        theta.add(cloud.weight(j) * w);
        n_eff.add(w);
        weights.push(w);
    }
    let row = KernelRow { weights, theta: theta.value(), n_eff: n_eff.value() };
    if row.theta < THETA_FLOOR || row.n_eff < NEFF_RELATIVE_FLOOR * n as f64 {
        return Err(Error::BandwidthTooSmall { theta: row.theta, n_eff: row.n_eff, n });
    }
    Ok(row)
}

/// Kernel weights, mass, and effective count at `x`. Warns (once) when the
/// row sees fewer than [`NEFF_WARN_THRESHOLD`] effective samples.
pub fn kernel_row(cloud: &PointCloud, t: Bandwidth, x: &[f64]) -> Result<KernelRow> {
    let row = kernel_row_quiet(cloud, t, x)?;
    if row.n_eff < NEFF_WARN_THRESHOLD {
        log::warn!(
            "kernel row at query sees only n_eff={:.2} of n={} samples (t={:.3e})",
            row.n_eff,
            cloud.n(),
            t.get()
        );
    }
    Ok(row)
}

/// Mass and effective count only; skips storing the weight vector.
fn theta_only(cloud: &PointCloud, t: Bandwidth, x: &[f64]) -> Result<(f64, f64)> {
    check_query_dim(cloud, x)?;
    let n = cloud.n();
    let inv_2t = 1.0 / (2.0 * t.get());
    let mut theta = CompensatedSum::new();
    let mut n_eff = CompensatedSum::new();
    for j in 0..n {
        let w = (-sq_dist(x, cloud.point(j)) * inv_2t).exp();
        theta.add(cloud.weight(j) * w);
        n_eff.add(w);
    }
    let (theta, n_eff) = (theta.value(), n_eff.value());
    if theta < THETA_FLOOR || n_eff < NEFF_RELATIVE_FLOOR * n as f64 {
        return Err(Error::BandwidthTooSmall { theta, n_eff, n });
    }
    Ok((theta, n_eff))
}

/// Empirical kernel mass `sum_j mu_j exp(-|x - xi_j|^2 / 2t)`.
pub fn theta_hat(cloud: &PointCloud, t: Bandwidth, x: &[f64]) -> Result<f64> {
    Ok(kernel_row(cloud, t, x)?.theta)
}

/// Rescaled generator at `x`.
pub fn l_t_hat<F: FieldEval + ?Sized>(
    cloud: &PointCloud,
    t: Bandwidth,
    field: &F,
    x: &[f64],
) -> Result<f64> {
    field.check_cloud(cloud.n(), cloud.ambient_dim())?;
    let fx = field.at_point(x)?;
    let row = kernel_row(cloud, t, x)?;
    let mut s = CompensatedSum::new();
    for j in 0..cloud.n() {
        s.add(cloud.weight(j) * row.weights[j] * (field.at_sample(j, cloud.point(j)) - fx));
    }
    Ok(2.0 / t.get() * s.value() / row.theta)
}

/// Squared-gradient form at `x`.
pub fn gamma_hat<F: FieldEval + ?Sized, H: FieldEval + ?Sized>(
    cloud: &PointCloud,
    t: Bandwidth,
    f: &F,
    h: &H,
    x: &[f64],
) -> Result<f64> {
    f.check_cloud(cloud.n(), cloud.ambient_dim())?;
    h.check_cloud(cloud.n(), cloud.ambient_dim())?;
    let fx = f.at_point(x)?;
    let hx = h.at_point(x)?;
    let row = kernel_row(cloud, t, x)?;
    let mut s = CompensatedSum::new();
    for j in 0..cloud.n() {
        let p = cloud.point(j);
        s.add(
            cloud.weight(j)
                * row.weights[j]
                * (f.at_sample(j, p) - fx)
                * (h.at_sample(j, p) - hx),
        );
    }
    Ok(s.value() / (t.get() * row.theta))
}

/// `gamma_hat(f, f)` and `l_t_hat(f)` against a precomputed kernel row.
fn gamma_and_l_from_row(
    cloud: &PointCloud,
    t: Bandwidth,
    row: &KernelRow,
    fvals: &[f64],
    f_at_query: f64,
) -> (f64, f64) {
    let mut sq = CompensatedSum::new();
    let mut lin = CompensatedSum::new();
    for j in 0..cloud.n() {
        let w = cloud.weight(j) * row.weights[j];
        let df = fvals[j] - f_at_query;
        sq.add(w * df * df);
        lin.add(w * df);
    }
    let gamma = sq.value() / (t.get() * row.theta);
    let l = 2.0 / t.get() * lin.value() / row.theta;
    (gamma, l)
}

fn field_values<F: FieldEval + ?Sized>(cloud: &PointCloud, field: &F) -> Vec<f64> {
    (0..cloud.n()).map(|j| field.at_sample(j, cloud.point(j))).collect()
}

fn warn_low_mass_rows(counts: impl IntoIterator<Item = f64>, n: usize, t: Bandwidth) {
    let low = counts.into_iter().filter(|&ne| ne < NEFF_WARN_THRESHOLD).count();
    if low > 0 {
        log::warn!(
            "{low} of {n} interior kernel rows see fewer than {NEFF_WARN_THRESHOLD} effective \
             samples (t={:.3e})",
            t.get()
        );
    }
}

/// Iterated squared-gradient form at `x`, assembled as
/// `(L u - 2 G(v, f)) / 2` with `u = gamma_hat(f,f)` and `v = l_t_hat f`
/// tabulated over the cloud. Cost `O(n^2)`; the tabulation is parallel with
/// each inner sum kept serial, so results are thread-count independent.
pub fn gamma2_hat<F: FieldEval + ?Sized>(
    cloud: &PointCloud,
    t: Bandwidth,
    f: &F,
    x: &[f64],
) -> Result<f64> {
    check_query_dim(cloud, x)?;
    f.check_cloud(cloud.n(), cloud.ambient_dim())?;
    let fx = f.at_point(x)?;
    let n = cloud.n();
    let fvals = field_values(cloud, f);

    let per_point: Vec<Result<(f64, f64, f64)>> = (0..n)
        .into_par_iter()
        .map(|j| {
            let row = kernel_row_quiet(cloud, t, cloud.point(j))?;
            let (u, v) = gamma_and_l_from_row(cloud, t, &row, &fvals, fvals[j]);
            Ok((u, v, row.n_eff))
        })
        .collect();
    // Surface the lowest-index failure so the error does not depend on
    // scheduling.
    let mut u = Vec::with_capacity(n);
    let mut v = Vec::with_capacity(n);
    let mut n_effs = Vec::with_capacity(n);
    for r in per_point {
        let (uj, vj, ne) = r?;
        u.push(uj);
        v.push(vj);
        n_effs.push(ne);
    }
    warn_low_mass_rows(n_effs, n, t);

    let row_x = kernel_row(cloud, t, x)?;
    let (u_x, v_x) = gamma_and_l_from_row(cloud, t, &row_x, &fvals, fx);

    let mut l_of_u = CompensatedSum::new();
    let mut g_of_vf = CompensatedSum::new();
    for j in 0..n {
        let w = cloud.weight(j) * row_x.weights[j];
        l_of_u.add(w * (u[j] - u_x));
        g_of_vf.add(w * (v[j] - v_x) * (fvals[j] - fx));
    }
    let l_term = 2.0 / t.get() * l_of_u.value() / row_x.theta;
    let g_term = g_of_vf.value() / (t.get() * row_x.theta);
    Ok(0.5 * l_term - g_term)
}

/// The iterated form written out as four explicit double sums over sample
/// pairs `(j, k)`:
///
/// ```text
/// (1/t^2) [  sum mu_j mu_k K(x,xi_k) K(xi_k,xi_j) (f_j - f_k)^2 / (theta_k theta_x)
///          - sum mu_j mu_k K(x,xi_j) K(x,xi_k)    (f_k - f_x)^2 / theta_x^2
///        - 2 sum mu_j mu_k K(x,xi_j) K(xi_j,xi_k) (f_k - f_j)(f_j - f_x) / (theta_j theta_x)
///        + 2 sum mu_j mu_k K(x,xi_j) K(x,xi_k)    (f_k - f_x)(f_j - f_x) / theta_x^2 ]
/// ```
///
/// Serial reference implementation, used as the cross-check oracle for
/// [`gamma2_hat`]; the two must agree to rounding since the composed form is
/// an exact rearrangement of these sums.
pub fn gamma2_hat_direct<F: FieldEval + ?Sized>(
    cloud: &PointCloud,
    t: Bandwidth,
    f: &F,
    x: &[f64],
) -> Result<f64> {
    f.check_cloud(cloud.n(), cloud.ambient_dim())?;
    let fx = f.at_point(x)?;
    let n = cloud.n();
    let fvals = field_values(cloud, f);

    let per_point: Vec<Result<(f64, f64)>> =
        (0..n).into_par_iter().map(|j| theta_only(cloud, t, cloud.point(j))).collect();
    let mut thetas = Vec::with_capacity(n);
    let mut n_effs = Vec::with_capacity(n);
    for r in per_point {
        let (th, ne) = r?;
        thetas.push(th);
        n_effs.push(ne);
    }
    warn_low_mass_rows(n_effs, n, t);

    let row_x = kernel_row(cloud, t, x)?;
    let theta_x = row_x.theta;
    let inv_2t = 1.0 / (2.0 * t.get());

    let mut t1 = CompensatedSum::new();
    let mut t2 = CompensatedSum::new();
    let mut t3 = CompensatedSum::new();
    let mut t4 = CompensatedSum::new();
    for j in 0..n {
        let pj = cloud.point(j);
        let mu_j = cloud.weight(j);
        let kxj = row_x.weights[j];
        let fj = fvals[j];
        for k in 0..n {
            let mu = mu_j * cloud.weight(k);
            let kxk = row_x.weights[k];
            let kjk = (-sq_dist(pj, cloud.point(k)) * inv_2t).exp();
            let fk = fvals[k];
            t1.add(mu * kxk * kjk * (fj - fk) * (fj - fk) / thetas[k]);
            t2.add(mu * kxj * kxk * (fk - fx) * (fk - fx));
            t3.add(mu * kxj * kjk * (fk - fj) * (fj - fx) / thetas[j]);
            t4.add(mu * kxj * kxk * (fk - fx) * (fj - fx));
        }
    }
    let tt = t.get() * t.get();
    Ok((t1.value() / theta_x - t2.value() / (theta_x * theta_x) - 2.0 * t3.value() / theta_x
        + 2.0 * t4.value() / (theta_x * theta_x))
        / tt)
}

fn pow_alpha(theta: f64, alpha: f64) -> f64 {
    if alpha == 1.0 {
        theta
    } else {
        theta.powf(alpha)
    }
}

/// Density-corrected mass and generator numerator at `x`; shared core of
/// the alpha-normalized operators.
fn alpha_sums<F: FieldEval + ?Sized>(
    cloud: &PointCloud,
    t: Bandwidth,
    alpha: Alpha,
    field: Option<(&F, f64)>,
    x: &[f64],
) -> Result<(f64, f64)> {
    let n = cloud.n();
    let per_point: Vec<Result<(f64, f64)>> =
        (0..n).into_par_iter().map(|j| theta_only(cloud, t, cloud.point(j))).collect();
    let mut thetas = Vec::with_capacity(n);
    let mut n_effs = Vec::with_capacity(n);
    for r in per_point {
        let (th, ne) = r?;
        thetas.push(th);
        n_effs.push(ne);
    }
    warn_low_mass_rows(n_effs, n, t);

    let row_x = kernel_row(cloud, t, x)?;
    let a = alpha.get();
    let mut mass = CompensatedSum::new();
    let mut lin = CompensatedSum::new();
    for j in 0..n {
        let w = cloud.weight(j) * row_x.weights[j] / pow_alpha(thetas[j], a);
        mass.add(w);
        if let Some((f, fx)) = field {
            lin.add(w * (f.at_sample(j, cloud.point(j)) - fx));
        }
    }
    Ok((mass.value(), lin.value()))
}

/// Alpha-normalized empirical mass
/// `sum_j mu_j w_j / theta_hat(xi_j)^alpha`. At `alpha = 0` this is exactly
/// [`theta_hat`] (the plain path is taken, skipping the inner masses).
pub fn theta_alpha_hat(cloud: &PointCloud, t: Bandwidth, alpha: Alpha, x: &[f64]) -> Result<f64> {
    if alpha.get() == 0.0 {
        return theta_hat(cloud, t, x);
    }
    let (mass, _) =
        alpha_sums::<crate::geometry::ScalarField>(cloud, t, alpha, None, x)?;
    Ok(mass)
}

/// Alpha-normalized generator: kernel weights are divided by
/// `theta_hat(xi_j)^alpha` in both the numerator and the mass, which cancels
/// the sampling density's drift term at `alpha = 1`. At `alpha = 0` this is
/// exactly [`l_t_hat`].
pub fn l_t_alpha_hat<F: FieldEval + ?Sized>(
    cloud: &PointCloud,
    t: Bandwidth,
    alpha: Alpha,
    field: &F,
    x: &[f64],
) -> Result<f64> {
    if alpha.get() == 0.0 {
        return l_t_hat(cloud, t, field, x);
    }
    field.check_cloud(cloud.n(), cloud.ambient_dim())?;
    let fx = field.at_point(x)?;
    let (mass, lin) = alpha_sums(cloud, t, alpha, Some((field, fx)), x)?;
    Ok(2.0 / t.get() * lin / mass)
}

/// `(2 pi t)^{d/2}`, the flat-space Gaussian mass at bandwidth `t` in
/// intrinsic dimension `d`. Exact (one power, no logs) for even `d`.
pub fn gaussian_normalizer(d: usize, t: Bandwidth) -> f64 {
    let s = 2.0 * std::f64::consts::PI * t.get();
    let half = s.powi((d / 2) as i32);
    if d % 2 == 0 {
        half
    } else {
        half * s.sqrt()
    }
}

/// Generator normalized by the flat Gaussian mass instead of the empirical
/// mass: `(2/t) (2 pi t)^{-d/2} sum mu_j w_j (f_j - f(x))`. This estimates
/// `density(x) * (Laplacian f + drift)` rather than the operator itself; it
/// exists for density diagnostics, not as a replacement for [`l_t_hat`].
pub fn l_t_hat_mass_normalized<F: FieldEval + ?Sized>(
    cloud: &PointCloud,
    t: Bandwidth,
    field: &F,
    x: &[f64],
    d: usize,
) -> Result<f64> {
    field.check_cloud(cloud.n(), cloud.ambient_dim())?;
    let fx = field.at_point(x)?;
    let row = kernel_row(cloud, t, x)?;
    let mut s = CompensatedSum::new();
    for j in 0..cloud.n() {
        s.add(cloud.weight(j) * row.weights[j] * (field.at_sample(j, cloud.point(j)) - fx));
    }
    Ok(2.0 / t.get() * s.value() / gaussian_normalizer(d, t))
}
