//! Deviation-probability and covering calculators for the kernel estimators.
//!
//! Everything here is closed-form arithmetic on user-supplied geometry
//! summaries (volume, reach, dimension): Hoeffding tails for a single
//! bounded average, covering-number bounds for an ambient tube around the
//! manifold, the two-term uniform deviation bound [`q_t`] for the kernel
//! operator pair, its inversion [`required_n`], and a greedy metric net
//! with a posteriori verification. None of it touches sample data except
//! [`greedy_epsilon_net`] / [`verify_net`], which work on a [`PointCloud`].
//!
//! Probabilities are capped at 1 after assembly, so returned values are
//! always in `[0, 1]`; monotonicity tests should stay below the cap.

use std::sync::OnceLock;

use crate::cloud::{sq_dist, PointCloud};
use crate::error::{Error, Result};

/// Lipschitz constant of `s ↦ e^{-s²/2}` on the half-line, attained at `s = 1`.
const KERNEL_LIP: f64 = 0.606_530_659_712_633_4; // e^{-1/2}

/// Geometry summary controlling covering numbers and the kernel mass scale.
///
/// `volume` and `reach` describe the embedded manifold; `d` is its intrinsic
/// dimension. The covering constant `c_d` defaults to `8^d` and can be
/// replaced when a sharper constant is known. `t0` marks the bandwidth above
/// which the small-`t` regime assumed by the tail bounds is doubtful; the
/// calculators still evaluate there but log a warning.
#[derive(Debug, Clone, Copy)]
pub struct BoundParams {
    volume: f64,
    reach: f64,
    d: usize,
    c_d: f64,
    t0: f64,
}

impl BoundParams {
    /// Covering/tail parameters for a manifold of volume `volume`, reach
    /// `reach`, and intrinsic dimension `d`, with default `c_d = 8^d` and
    /// `t0 = 0.2`.
    pub fn new(volume: f64, reach: f64, d: usize) -> Result<Self> {
        if !(volume.is_finite() && volume > 0.0) {
            return Err(Error::invalid(format!("volume must be positive, got {volume}")));
        }
        if !(reach.is_finite() && reach > 0.0) {
            return Err(Error::invalid(format!("reach must be positive, got {reach}")));
        }
        if d == 0 {
            return Err(Error::invalid("dimension must be at least 1"));
        }
        if d > 64 {
            return Err(Error::invalid(format!("dimension {d} out of supported range 1..=64")));
        }
        Ok(BoundParams { volume, reach, d, c_d: 8.0f64.powi(d as i32), t0: 0.2 })
    }

    /// Replace the covering constant `c_d`.
    pub fn with_c_d(mut self, c_d: f64) -> Result<Self> {
        if !(c_d.is_finite() && c_d > 0.0) {
            return Err(Error::invalid(format!("covering constant must be positive, got {c_d}")));
        }
        self.c_d = c_d;
        Ok(self)
    }

    /// Replace the small-bandwidth threshold `t0`.
    pub fn with_t0(mut self, t0: f64) -> Result<Self> {
        if !(t0.is_finite() && t0 > 0.0) {
            return Err(Error::invalid(format!("t0 must be positive, got {t0}")));
        }
        self.t0 = t0;
        Ok(self)
    }

    pub fn volume(&self) -> f64 {
        self.volume
    }

    pub fn reach(&self) -> f64 {
        self.reach
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn c_d(&self) -> f64 {
        self.c_d
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    /// Lower bound on the rescaled kernel mass: `(2π)^{d/2} / 4`.
    ///
    /// Computed with integer powers of `2π` (times a single square root in
    /// odd dimension), so `lambda0` at `d = 2` is exactly `π/2`.
    pub fn lambda0(&self) -> f64 {
        let two_pi = 2.0 * std::f64::consts::PI;
        let mut v = two_pi.powi((self.d / 2) as i32);
        if self.d % 2 == 1 {
            v *= two_pi.sqrt();
        }
        v / 4.0
    }
}

/// Function class fed to the kernel deviation bound, identified by the shape
/// of the summand whose empirical average is being controlled.
///
/// Norm inputs are Lipschitz constants and `C¹` (sup of derivative) bounds of
/// the factors; all must be positive and finite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FunctionClass {
    /// Kernel times a product of two centered differences, the shape that
    /// appears in the carré-du-champ sums.
    PairProduct { f_lip: f64, h_lip: f64, f_c1: f64, h_c1: f64 },
    /// The bare Gaussian kernel (mass/density sums).
    Kernel,
    /// Kernel times a fixed bounded function with sup norm `h_sup`.
    KernelTimes { h_sup: f64 },
}

/// Constants attached to a [`FunctionClass`]: a Lipschitz constant for the
/// summand as a function of the query point, and a bandwidth-free factor
/// `m_factor` whose product with `√t` bounds the summand's sup norm.
#[derive(Debug, Clone, Copy)]
pub struct ClassConstants {
    pub lipschitz: f64,
    pub m_factor: f64,
}

impl ClassConstants {
    /// Sup-norm bound of the class at bandwidth `t`, namely `m_factor · √t`.
    pub fn sup_bound(&self, t: f64) -> f64 {
        self.m_factor * t.sqrt()
    }
}

/// Largest value of `ρ³ e^{-ρ²/2}` and `ρ e^{-ρ/2}` over `ρ ≥ 0`, the
/// envelope constant absorbing kernel-derivative peaks into Lipschitz bounds.
///
/// Both maxima are located by golden-section search on `[0, 10]` down to an
/// interval of `1e-12` and the larger one is returned (it is the cubic one,
/// `3√3·e^{-3/2} ≈ 1.15943`). The value is computed once and cached.
pub fn envelope_constant() -> f64 {
    static C0: OnceLock<f64> = OnceLock::new();
    *C0.get_or_init(|| {
        let cubic = golden_max(|r| r.powi(3) * (-0.5 * r * r).exp(), 0.0, 10.0);
        let linear = golden_max(|r| r * (-0.5 * r).exp(), 0.0, 10.0);
        cubic.max(linear)
    })
}

/// Golden-section maximization of a unimodal function on `[a, b]`, run until
/// the bracket is shorter than `1e-12`.
fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while b - a > 1e-12 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    f(0.5 * (a + b))
}

/// Lipschitz and sup-norm constants for a [`FunctionClass`].
///
/// For the pair-product class the Lipschitz constant is
/// `C₀ · (f_lip·h_lip + f_c1·h_lip + h_c1·f_lip)` with `C₀` the
/// [`envelope_constant`], and `m_factor = (2/e) · f_lip · h_lip`. The bare
/// kernel has Lipschitz constant `e^{-1/2}` and `m_factor = 1`; a bounded
/// multiplier scales both by its sup norm.
pub fn class_constants(class: &FunctionClass) -> Result<ClassConstants> {
    let pos = |name: &str, v: f64| -> Result<f64> {
        if v.is_finite() && v > 0.0 {
            Ok(v)
        } else {
            Err(Error::invalid(format!("{name} must be positive and finite, got {v}")))
        }
    };
    match *class {
        FunctionClass::PairProduct { f_lip, h_lip, f_c1, h_c1 } => {
            let fl = pos("f_lip", f_lip)?;
            let hl = pos("h_lip", h_lip)?;
            let fc = pos("f_c1", f_c1)?;
            let hc = pos("h_c1", h_c1)?;
            let c0 = envelope_constant();
            Ok(ClassConstants {
                lipschitz: c0 * (fl * hl + fc * hl + hc * fl),
                m_factor: (2.0 / std::f64::consts::E) * fl * hl,
            })
        }
        FunctionClass::Kernel => Ok(ClassConstants { lipschitz: KERNEL_LIP, m_factor: 1.0 }),
        FunctionClass::KernelTimes { h_sup } => {
            let hs = pos("h_sup", h_sup)?;
            Ok(ClassConstants { lipschitz: hs * KERNEL_LIP, m_factor: hs })
        }
    }
}

/// Two-sided Hoeffding tail for an average of `n` i.i.d. terms bounded by
/// `sup_norm` in absolute value: `min(1, 2·exp(-ε²n / (2·sup_norm²)))`.
pub fn hoeffding_bound(eps: f64, n: u64, sup_norm: f64) -> Result<f64> {
    check_positive("eps", eps)?;
    check_positive("sup_norm", sup_norm)?;
    if n == 0 {
        return Err(Error::invalid("sample count must be at least 1"));
    }
    let expo = -(eps * eps) * (n as f64) / (2.0 * sup_norm * sup_norm);
    Ok((2.0 * expo.exp()).min(1.0))
}

/// Uniform deviation bound over a class covered by `n_cover` balls, each
/// summand bounded by `m`: `min(1, 2·n_cover·exp(-ε²n / (8·m²)))`.
pub fn gc_bound(eps: f64, n: u64, m: f64, n_cover: u64) -> Result<f64> {
    check_positive("eps", eps)?;
    check_positive("m", m)?;
    if n == 0 {
        return Err(Error::invalid("sample count must be at least 1"));
    }
    if n_cover == 0 {
        return Err(Error::invalid("covering count must be at least 1"));
    }
    let expo = -(eps * eps) * (n as f64) / (8.0 * m * m);
    Ok((2.0 * (n_cover as f64) * expo.exp()).min(1.0))
}

/// Upper bound on the number of ambient `eps`-balls needed to cover the
/// manifold: `⌈c_d · volume · (reach^{-d} + eps^{-d})⌉`.
///
/// `eps = +∞` is accepted and leaves only the reach term. Returns
/// [`Error::NotAttainable`] when the count overflows `u64`.
pub fn ambient_covering_bound(p: &BoundParams, eps: f64) -> Result<u64> {
    if eps.is_nan() || eps <= 0.0 {
        return Err(Error::invalid(format!("eps must be positive, got {eps}")));
    }
    let raw = covering_f64(p, eps);
    if !raw.is_finite() || raw >= 9.2e18 {
        return Err(Error::NotAttainable(format!(
            "covering count {raw:.3e} exceeds the u64 range"
        )));
    }
    Ok(raw as u64)
}

fn covering_f64(p: &BoundParams, eps: f64) -> f64 {
    let d = p.d as i32;
    (p.c_d * p.volume * (p.reach.powi(-d) + eps.powi(-d))).ceil()
}

/// Breakdown of the two-term kernel deviation bound returned by
/// [`q_t_report`]. `value = min(1, term_kernel + term_class)`; the `radius_*`
/// fields are the discretization radii fed to the covering bound, `cover_*`
/// the resulting ball counts, and `exponent_*` the (negative) exponents of
/// the two tails.
#[derive(Debug, Clone, Copy)]
pub struct QtReport {
    pub value: f64,
    pub term_kernel: f64,
    pub term_class: f64,
    pub radius_kernel: f64,
    pub radius_class: f64,
    pub cover_kernel: f64,
    pub cover_class: f64,
    pub exponent_kernel: f64,
    pub exponent_class: f64,
}

/// Probability bound for a uniform deviation of size `eps` of the normalized
/// kernel-average pair (mass term and class term together) at bandwidth `t`
/// with `n` samples, with full intermediate detail.
///
/// The kernel tail uses discretization radius
/// `ε·t^{d+1}·λ₀² / (4·√t·m)` and exponent `-ε²·t^{2d+1}·λ₀⁴·n / (8·t·m²)`;
/// the class tail uses radius `ε·λ₀·t^{(d+1)/2} / 4` and exponent
/// `-ε²·λ₀²·t^{d+1}·n / (8·t·m²)`. Each radius is divided by the matching
/// Lipschitz constant before the covering bound, each tail is doubled and
/// multiplied by its ball count, and the sum is capped at 1.
///
/// `m` is the bandwidth-free sup-norm factor of the class (see
/// [`ClassConstants::sup_bound`]); pass `class_constants(class)?.m_factor`
/// unless a sharper bound is known. A warning is logged when `t ≥ t0`, where
/// the small-bandwidth expansion behind these tails loses its footing.
pub fn q_t_report(
    class: &FunctionClass,
    p: &BoundParams,
    eps: f64,
    m: f64,
    n: u64,
    t: f64,
) -> Result<QtReport> {
    if t >= p.t0 {
        log::warn!(
            "deviation bound evaluated at t={t} above the small-bandwidth threshold t0={}",
            p.t0
        );
    }
    q_t_unwarned(class, p, eps, m, n, t)
}

fn q_t_unwarned(
    class: &FunctionClass,
    p: &BoundParams,
    eps: f64,
    m: f64,
    n: u64,
    t: f64,
) -> Result<QtReport> {
    check_positive("eps", eps)?;
    check_positive("m", m)?;
    check_positive("t", t)?;
    if n == 0 {
        return Err(Error::invalid("sample count must be at least 1"));
    }
    let cc = class_constants(class)?;
    let l0 = p.lambda0();
    let d = p.d as i32;
    let nf = n as f64;
    let sqrt_t = t.sqrt();

    let radius_kernel = eps * t.powi(d + 1) * l0 * l0 / (4.0 * sqrt_t * m);
    // -ε²·t^{2d+1}·λ₀⁴·n / (8·t·m²), with one power of t cancelled.
    let exponent_kernel = -(eps * eps) * t.powi(2 * d) * l0.powi(4) * nf / (8.0 * m * m);
    let radius_class = eps * l0 * half_power(t, d + 1) / 4.0;
    // -ε²·λ₀²·t^{d+1}·n / (8·t·m²), same cancellation.
    let exponent_class = -(eps * eps) * l0 * l0 * t.powi(d) * nf / (8.0 * m * m);

    let cover_kernel = covering_f64(p, radius_kernel / KERNEL_LIP);
    let cover_class = covering_f64(p, radius_class / cc.lipschitz);
    let term_kernel = 2.0 * cover_kernel * exponent_kernel.exp();
    let term_class = 2.0 * cover_class * exponent_class.exp();
    Ok(QtReport {
        value: (term_kernel + term_class).min(1.0),
        term_kernel,
        term_class,
        radius_kernel,
        radius_class,
        cover_kernel,
        cover_class,
        exponent_kernel,
        exponent_class,
    })
}

/// `t^{k/2}` using integer powers plus at most one square root.
fn half_power(t: f64, k: i32) -> f64 {
    let mut v = t.powi(k / 2);
    if k % 2 == 1 {
        v *= t.sqrt();
    }
    v
}

/// The probability value of [`q_t_report`] without the breakdown.
pub fn q_t(
    class: &FunctionClass,
    p: &BoundParams,
    eps: f64,
    m: f64,
    n: u64,
    t: f64,
) -> Result<f64> {
    Ok(q_t_report(class, p, eps, m, n, t)?.value)
}

/// Smallest sample count `n` with `q_t(n) ≤ delta`, for `delta ∈ (0, 1]`.
///
/// Doubles `n` until the bound drops below `delta` (capped at `2^62`, past
/// which [`Error::NotAttainable`] is returned), then bisects for the minimal
/// count. `delta = 1` always yields 1 because the bound is capped at 1.
pub fn required_n(
    class: &FunctionClass,
    p: &BoundParams,
    eps: f64,
    m: f64,
    t: f64,
    delta: f64,
) -> Result<u64> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::invalid(format!("delta must lie in (0, 1], got {delta}")));
    }
    if t >= p.t0 {
        log::warn!(
            "deviation bound inverted at t={t} above the small-bandwidth threshold t0={}",
            p.t0
        );
    }
    let q = |n: u64| -> Result<f64> { Ok(q_t_unwarned(class, p, eps, m, n, t)?.value) };
    if q(1)? <= delta {
        return Ok(1);
    }
    let mut hi: u64 = 1;
    while q(hi)? > delta {
        if hi >= (1 << 62) {
            return Err(Error::NotAttainable(format!(
                "bound still exceeds {delta:.3e} at n = 2^62"
            )));
        }
        hi <<= 1;
    }
    let mut lo = hi >> 1;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if q(mid)? <= delta {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Greedy `eps`-net over the cloud in index order: point `i` joins the net
/// when its distance to every current net point exceeds `eps`.
///
/// The result is deterministic, sorted, and always contains index 0.
/// Distances are ambient Euclidean, compared squared to avoid roots.
pub fn greedy_epsilon_net(cloud: &PointCloud, eps: f64) -> Result<Vec<usize>> {
    check_positive("eps", eps)?;
    let eps2 = eps * eps;
    let mut net: Vec<usize> = Vec::new();
    for i in 0..cloud.n() {
        let xi = cloud.point(i);
        let covered = net.iter().any(|&c| sq_dist(xi, cloud.point(c)) <= eps2);
        if !covered {
            net.push(i);
        }
    }
    Ok(net)
}

/// Outcome of [`verify_net`]: whether the net points are pairwise more than
/// `eps` apart, and whether every cloud point lies within `eps` of the net.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NetCheck {
    pub separated: bool,
    pub covering: bool,
}

/// Brute-force check of the `eps`-net postconditions for `net` (indices into
/// `cloud`). An empty net is vacuously separated and covers nothing.
pub fn verify_net(cloud: &PointCloud, eps: f64, net: &[usize]) -> NetCheck {
    let eps2 = eps * eps;
    let separated = net.iter().enumerate().all(|(a, &i)| {
        net[a + 1..].iter().all(|&j| sq_dist(cloud.point(i), cloud.point(j)) > eps2)
    });
    let covering = (0..cloud.n()).all(|i| {
        net.iter().any(|&c| sq_dist(cloud.point(i), cloud.point(c)) <= eps2)
    });
    NetCheck { separated, covering }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} must be positive and finite, got {v}")))
    }
}
