//! Kernel-based curvature estimation on embedded submanifolds.
//!
//! Everything here operates on finite point clouds sampled from (or gridded
//! over) a handful of closed manifolds embedded in Euclidean space: round
//! spheres, circles, and the flat torus in `R^4`. From a cloud and a
//! bandwidth `t` the [`kernel`] module builds the Gaussian mass `theta_hat`,
//! the rescaled generator `l_t_hat`, the squared-gradient form `gamma_hat`,
//! and its iterate `gamma2_hat`. The [`ricci`] module combines those into an
//! empirical coarse Ricci curvature between pairs of points, together with
//! bandwidth schedules and a small-separation limit routine. The
//! [`geometry`] module supplies the closed-form values these estimators are
//! expected to approach, and [`bounds`] computes non-asymptotic deviation
//! probabilities for the kernel sums.
//!
//! All numerics are `f64`. Estimator accumulations use compensated summation
//! ([`sum::CompensatedSum`]) in a fixed order, so results are reproducible
//! bit for bit across runs and thread counts.

pub mod bounds;
pub mod cloud;
pub mod error;
pub mod geometry;
pub mod kernel;
pub mod ricci;
pub mod sum;

pub use cloud::{DistanceMatrix, ManifoldSpec, PointCloud};
pub use error::{Error, Result};
pub use geometry::{FieldEval, ScalarField, TangentVector};
pub use kernel::{Alpha, Bandwidth, KernelRow};
pub use ricci::{CoarseRicciEstimate, LimitSchedule, RicciLimitEstimate, ScheduleConfig};
