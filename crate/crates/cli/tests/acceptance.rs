//! Acceptance gate for the whole workspace. One test per shipping criterion,
//! numbered c01 through c10; every tolerance and runtime budget is pinned
//! here, in code. Each test prints a single `criterion NN PASS` line on
//! success (visible under `--nocapture`).

use std::f64::consts::{FRAC_PI_2, PI};
use std::process::Command;
use std::time::{Duration, Instant};

use ricci_core::bounds::{envelope_constant, greedy_epsilon_net, q_t, BoundParams, FunctionClass};
use ricci_core::cloud::{quadrature_grid, sample_uniform, sample_weighted_circle};
use ricci_core::geometry::FnField;
use ricci_core::kernel::{
    gamma2_hat, gamma2_hat_direct, gamma_hat, gaussian_normalizer, l_t_alpha_hat, l_t_hat,
    theta_hat,
};
use ricci_core::ricci::{
    ricci_limit_estimate, schedule_t, BandwidthRule, LimitSchedule, ScheduleConfig, ScheduleKind,
};
use ricci_core::{Alpha, Bandwidth, FieldEval, ManifoldSpec, PointCloud, ScalarField};

fn budget(start: Instant, secs: u64, label: &str) {
    let elapsed = start.elapsed();
    assert!(
        elapsed <= Duration::from_secs(secs),
        "{label} exceeded its {secs}s budget: {elapsed:.1?}"
    );
}

fn median(mut v: Vec<f64>) -> f64 {
    assert!(!v.is_empty());
    v.sort_by(|a, b| a.partial_cmp(b).expect("comparable"));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn splitmix(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn rand_coord(state: &mut u64) -> f64 {
    2.0 * ((splitmix(state) >> 11) as f64 / (1u64 << 53) as f64) - 1.0
}

fn rand_vec(state: &mut u64, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| rand_coord(state)).collect()
}

struct Fixture {
    cloud: PointCloud,
    t: Bandwidth,
    x: Vec<f64>,
    fields: [ScalarField; 3],
}

/// Twenty deterministic clouds in one to five ambient dimensions, up to 200
/// points each, paired with three scalar fields and a query at the first
/// cloud point. Shared by c01 and c02 so both criteria see identical data.
fn fixtures() -> Vec<Fixture> {
    let mut state = 0x5eed_0001_u64;
    let bandwidths = [0.4, 0.8, 1.5];
    (0..20)
        .map(|k| {
            let dim = 1 + k % 5;
            let n = 20 + (k * 37) % 181;
            let flat: Vec<f64> = (0..n * dim).map(|_| rand_coord(&mut state)).collect();
            let cloud = PointCloud::from_flat(flat, dim).expect("fixture cloud");
            let x = cloud.point(0).to_vec();
            let p = rand_vec(&mut state, dim);
            let mut q = rand_vec(&mut state, dim);
            q[0] = p[0] + 1.1;
            let fields = [
                ScalarField::coordinate(k % dim),
                ScalarField::squared_distance_to(p.clone()),
                ScalarField::pair_comparison(p, q).expect("distinct pair"),
            ];
            Fixture { cloud, t: Bandwidth::new(bandwidths[k % 3]).expect("t"), x, fields }
        })
        .collect()
}

/// Query points on a unit sphere: every height in `heights` crossed with
/// `longitudes` equally spaced azimuths.
fn latitude_rings(heights: &[f64], longitudes: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(heights.len() * longitudes);
    for &u in heights {
        let rho = (1.0 - u * u).sqrt();
        for j in 0..longitudes {
            let phi = 2.0 * PI * j as f64 / longitudes as f64 + 0.3;
            out.push(vec![rho * phi.cos(), rho * phi.sin(), u]);
        }
    }
    out
}

const SPHERE: ManifoldSpec = ManifoldSpec::Sphere { d: 2, r: 1.0 };

#[test]
fn c01_composed_gamma2_matches_the_direct_sum() {
    let start = Instant::now();
    let mut checked = 0;
    for (k, fx) in fixtures().iter().enumerate() {
        for field in &fx.fields {
            let composed = gamma2_hat(&fx.cloud, fx.t, field, &fx.x).expect("composed");
            let direct = gamma2_hat_direct(&fx.cloud, fx.t, field, &fx.x).expect("direct");
            let scale = composed.abs().max(direct.abs()).max(1e-9);
            assert!(
                (composed - direct).abs() <= 1e-9 * scale,
                "cloud {k}: composed {composed:.17e} vs direct {direct:.17e}"
            );
            checked += 1;
        }
    }
    assert_eq!(checked, 60);
    budget(start, 10, "criterion 01");
    println!(
        "criterion 01 PASS: composed and direct iterated forms agree to 1e-9 relative on {checked} fixtures ({:.2}s)",
        start.elapsed().as_secs_f64()
    );
}

#[test]
fn c02_gamma_matches_its_product_rule_definition() {
    let start = Instant::now();
    let mut checked = 0;
    for (k, fx) in fixtures().iter().enumerate() {
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            let f = &fx.fields[i];
            let h = &fx.fields[j];
            let simplified = gamma_hat(&fx.cloud, fx.t, f, h, &fx.x).expect("simplified");
            let product = FnField(|z: &[f64]| {
                f.at_point(z).expect("f") * h.at_point(z).expect("h")
            });
            let l_fh = l_t_hat(&fx.cloud, fx.t, &product, &fx.x).expect("L(fh)");
            let l_f = l_t_hat(&fx.cloud, fx.t, f, &fx.x).expect("Lf");
            let l_h = l_t_hat(&fx.cloud, fx.t, h, &fx.x).expect("Lh");
            let f_x = f.at_point(&fx.x).expect("f(x)");
            let h_x = h.at_point(&fx.x).expect("h(x)");
            let defining = 0.5 * (l_fh - f_x * l_h - h_x * l_f);
            let scale = defining.abs().max(simplified.abs()).max(1.0);
            assert!(
                (defining - simplified).abs() <= 1e-10 * scale,
                "cloud {k} pair ({i},{j}): defining {defining:.17e} vs simplified {simplified:.17e}"
            );
            checked += 1;
        }
    }
    assert_eq!(checked, 60);
    budget(start, 5, "criterion 02");
    println!(
        "criterion 02 PASS: product-rule and simplified squared-gradient forms agree to 1e-10 on {checked} pairs ({:.2}s)",
        start.elapsed().as_secs_f64()
    );
}

#[test]
fn c03_gamma_recovers_the_sphere_gradient_at_schedule_bandwidth() {
    let start = Instant::now();
    let t = schedule_t(4000, ScheduleConfig::new(2, 0.5, ScheduleKind::Gamma).expect("cfg"))
        .expect("t");
    let field = ScalarField::coordinate(2);
    let queries = latitude_rings(&[0.5, -0.5, 0.6, -0.6], 5);
    assert_eq!(queries.len(), 20);
    let mut errors = vec![Vec::with_capacity(10); queries.len()];
    for seed in 0..10 {
        let cloud = sample_uniform(&SPHERE, 4000, seed).expect("sample");
        for (qi, q) in queries.iter().enumerate() {
            let g = gamma_hat(&cloud, t, &field, &field, q).expect("gamma");
            errors[qi].push((g - (1.0 - q[2] * q[2])).abs());
        }
    }
    let mut worst = 0.0_f64;
    for (qi, errs) in errors.into_iter().enumerate() {
        let m = median(errs);
        worst = worst.max(m);
        assert!(m <= 0.15, "query {qi}: seed-median error {m:.4} exceeds 0.15");
    }
    budget(start, 120, "criterion 03");
    println!(
        "criterion 03 PASS: squared-gradient error at 20 sphere points, worst seed-median {worst:.4} <= 0.15 ({:.1}s)",
        start.elapsed().as_secs_f64()
    );
}

#[test]
fn c04_gamma2_recovers_sphere_curvature_and_improves_with_n() {
    let start = Instant::now();
    let field = ScalarField::coordinate(2);
    let queries = latitude_rings(&[0.6, -0.6], 5);
    assert_eq!(queries.len(), 10);
    let sweep = [500_usize, 1000, 2000, 4000];
    let mut per_n_medians = Vec::with_capacity(sweep.len());
    let mut final_errors = vec![Vec::with_capacity(10); queries.len()];
    for &n in &sweep {
        let t = schedule_t(n, ScheduleConfig::new(2, 0.5, ScheduleKind::Gamma2).expect("cfg"))
            .expect("t");
        let mut pooled = Vec::with_capacity(10 * queries.len());
        for seed in 0..10 {
            let cloud = sample_uniform(&SPHERE, n, seed).expect("sample");
            for (qi, q) in queries.iter().enumerate() {
                let v = gamma2_hat(&cloud, t, &field, q).expect("gamma2");
                let err = (v - (1.0 + q[2] * q[2])).abs();
                pooled.push(err);
                if n == 4000 {
                    final_errors[qi].push(err);
                }
            }
        }
        per_n_medians.push(median(pooled));
    }
    let mut worst = 0.0_f64;
    for (qi, errs) in final_errors.into_iter().enumerate() {
        let m = median(errs);
        worst = worst.max(m);
        assert!(m <= 0.5, "query {qi}: seed-median error {m:.4} exceeds 0.5 at n=4000");
    }
    let inversions = per_n_medians
        .windows(2)
        .filter(|pair| pair[1] > pair[0])
        .count();
    assert!(
        inversions <= 1,
        "per-n medians {per_n_medians:?} rise more than once across {sweep:?}"
    );
    budget(start, 900, "criterion 04");
    println!(
        "criterion 04 PASS: iterated-form error at 10 sphere points, worst seed-median {worst:.4} <= 0.5; per-n medians {per_n_medians:?} with {inversions} inversion(s) ({:.1}s)",
        start.elapsed().as_secs_f64()
    );
}

#[test]
fn c05_small_separation_limit_recovers_constant_curvatures() {
    let start = Instant::now();
    let schedule = LimitSchedule::new(vec![0.5, 0.35, 0.25], BandwidthRule::Fixed(0.005))
        .expect("schedule");

    let sphere = quadrature_grid(&SPHERE, 64).expect("sphere grid");
    let round = ricci_limit_estimate(&sphere, &[1.0, 0.0, 0.0], &[0.0, 0.0, 1.0], &schedule)
        .expect("sphere limit");
    assert!(
        (round.limit - 1.0).abs() <= 0.35,
        "sphere limit {:.4} is not within 0.35 of 1.0",
        round.limit
    );

    let torus = quadrature_grid(&ManifoldSpec::CliffordTorus { r1: 1.0, r2: 1.0 }, 80)
        .expect("torus grid");
    let flat = ricci_limit_estimate(&torus, &[1.0, 0.0, 1.0, 0.0], &[0.0, 1.0, 0.0, 0.0], &schedule)
        .expect("torus limit");
    assert!(
        flat.limit.abs() <= 0.35,
        "flat torus limit {:.4} is not within 0.35 of 0.0",
        flat.limit
    );

    budget(start, 300, "criterion 05");
    println!(
        "criterion 05 PASS: separation-sweep limits {:.4} (sphere, target 1) and {:.4} (flat torus, target 0) ({:.1}s)",
        round.limit,
        flat.limit,
        start.elapsed().as_secs_f64()
    );
}

#[test]
fn c06_kernel_mass_matches_the_flat_normalizer_as_t_shrinks() {
    let start = Instant::now();
    let grid = quadrature_grid(&SPHERE, 100).expect("grid");
    let area = 4.0 * PI;
    let points = latitude_rings(&[0.0, 0.3, -0.3, 0.55, -0.55], 1);
    assert_eq!(points.len(), 5);
    let mut worst = 0.0_f64;
    for (pi, p) in points.iter().enumerate() {
        let mut prev_gap: Option<f64> = None;
        for t in [0.02, 0.01, 0.005] {
            let bw = Bandwidth::new(t).expect("t");
            let mass = theta_hat(&grid, bw, p).expect("theta");
            let ratio = gaussian_normalizer(2, bw) / (mass * area);
            assert!(
                (0.9..=1.1).contains(&ratio),
                "point {pi}, t={t}: ratio {ratio:.6} outside [0.9, 1.1]"
            );
            let gap = (ratio - 1.0).abs();
            if let Some(prev) = prev_gap {
                assert!(
                    gap <= prev + 1e-12,
                    "point {pi}, t={t}: |ratio-1| {gap:.3e} worse than {prev:.3e} at the larger t"
                );
            }
            prev_gap = Some(gap);
            worst = worst.max(gap);
        }
    }
    budget(start, 120, "criterion 06");
    println!(
        "criterion 06 PASS: flat-normalizer ratio within [0.9, 1.1] and tightening as t drops, worst |ratio-1| {worst:.3e} ({:.1}s)",
        start.elapsed().as_secs_f64()
    );
}

#[test]
fn c07_bandwidth_schedule_matches_the_closed_form() {
    let start = Instant::now();

    let t = schedule_t(1000, ScheduleConfig::new(2, 0.1, ScheduleKind::Gamma2).expect("cfg"))
        .expect("t")
        .get();
    let reference = (-(1000.0_f64).ln() / 9.1).exp();
    assert!(
        (t - reference).abs() <= 1e-12,
        "schedule value {t:.17e} differs from reference {reference:.17e}"
    );

    let kinds = [ScheduleKind::Gamma, ScheduleKind::Gamma2, ScheduleKind::Weighted];
    for d in 1..=3 {
        for kind in kinds {
            let cfg = ScheduleConfig::new(d, 0.5, kind).expect("cfg");
            let mut prev = f64::INFINITY;
            for n in [3_usize, 10, 100, 1000, 10_000] {
                let tn = schedule_t(n, cfg).expect("t").get();
                assert!(tn < prev, "d={d} {kind:?}: t({n}) = {tn} does not decrease");
                prev = tn;
            }
        }
        for n in [3_usize, 10, 100, 1000, 10_000] {
            let at = |kind| {
                schedule_t(n, ScheduleConfig::new(d, 0.5, kind).expect("cfg"))
                    .expect("t")
                    .get()
            };
            let (a, b, c) = (
                at(ScheduleKind::Gamma),
                at(ScheduleKind::Gamma2),
                at(ScheduleKind::Weighted),
            );
            assert!(a <= b && b <= c, "d={d} n={n}: kind ordering violated: {a} {b} {c}");
        }
    }

    budget(start, 1, "criterion 07");
    println!(
        "criterion 07 PASS: schedule hits the closed form to 1e-12 and is monotone in n and kind ({:.3}s)",
        start.elapsed().as_secs_f64()
    );
}

#[test]
fn c08_mass_normalization_beats_the_plain_generator_on_a_weighted_circle() {
    let start = Instant::now();
    let t = Bandwidth::new(0.01).expect("t");
    let alpha = Alpha::new(1.0).expect("alpha");
    let field = ScalarField::coordinate(0);
    let x = [1.0, 0.0];
    let mut plain_errors = Vec::with_capacity(10);
    let mut corrected_errors = Vec::with_capacity(10);
    for seed in 0..10 {
        let cloud = sample_weighted_circle(1.0, 0.5, 10_000, seed).expect("sample");
        let plain = l_t_hat(&cloud, t, &field, &x).expect("plain generator");
        let corrected = l_t_alpha_hat(&cloud, t, alpha, &field, &x).expect("corrected generator");
        plain_errors.push((plain - (-1.0)).abs());
        corrected_errors.push((corrected - (-1.0)).abs());
    }
    let plain_median = median(plain_errors);
    let corrected_median = median(corrected_errors);
    assert!(
        corrected_median < plain_median,
        "corrected median {corrected_median:.5} is not below plain median {plain_median:.5}"
    );
    budget(start, 120, "criterion 08");
    println!(
        "criterion 08 PASS: corrected generator median error {corrected_median:.5} < plain {plain_median:.5} ({:.1}s)",
        start.elapsed().as_secs_f64()
    );
}

#[test]
fn c09_deviation_bound_and_net_calculators_hit_their_pins() {
    let start = Instant::now();

    let circle = BoundParams::new(2.0 * PI, 1.0, 1).expect("params");
    let mut prev = f64::INFINITY;
    let mut values = Vec::new();
    for n in [500_000_u64, 1_000_000, 2_000_000] {
        let q = q_t(&FunctionClass::Kernel, &circle, 0.5, 1.0, n, 0.1).expect("q");
        assert!(q < prev, "q({n}) = {q} does not decrease");
        values.push(q);
        prev = q;
    }

    let sphere_params = BoundParams::new(4.0 * PI, 1.0, 2).expect("params");
    let lambda0 = sphere_params.lambda0();
    assert!(
        (lambda0 - FRAC_PI_2).abs() <= 1e-12,
        "surface normalizer {lambda0:.17} is not pi/2"
    );

    let envelope = envelope_constant();
    assert!(
        (envelope - 1.15943).abs() <= 1e-4,
        "envelope constant {envelope:.6} is not 1.15943 +- 1e-4"
    );

    let cloud = sample_uniform(&SPHERE, 20_000, 0).expect("sample");
    let coarse = greedy_epsilon_net(&cloud, 0.5).expect("coarse net").len();
    let fine = greedy_epsilon_net(&cloud, 0.25).expect("fine net").len();
    let ratio = fine as f64 / coarse as f64;
    assert!(
        (2.5..=6.5).contains(&ratio),
        "net growth {fine}/{coarse} = {ratio:.2} outside [2.5, 6.5]"
    );

    budget(start, 60, "criterion 09");
    println!(
        "criterion 09 PASS: tail bound decreasing ({values:?}), lambda0 = pi/2, envelope {envelope:.5}, net growth {ratio:.2} ({:.1}s)",
        start.elapsed().as_secs_f64()
    );
}

#[test]
fn c10_convergence_sweep_is_byte_identical_across_thread_counts() {
    let start = Instant::now();
    let run = |threads: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_ricci"))
            .args([
                "converge",
                "--spec",
                "sphere:d=2,r=1",
                "--n-sweep",
                "200,400",
                "--seeds",
                "0..3",
                "--field",
                "coord:2",
                "--op",
                "gamma2",
                "--schedule",
                "gamma2",
                "--sigma",
                "0.5",
                "--query",
                "1,0,0",
                "--query",
                "0,0.6,0.8",
                "--no-timestamp",
            ])
            .env("RICCI_THREADS", threads)
            .output()
            .expect("binary runs");
        assert!(
            out.status.success(),
            "converge failed with RICCI_THREADS={threads}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        out.stdout
    };
    let serial = run("1");
    let parallel = run("8");
    assert!(!serial.is_empty(), "sweep produced no output");
    assert_eq!(
        serial, parallel,
        "CSV differs between RICCI_THREADS=1 and RICCI_THREADS=8"
    );
    budget(start, 300, "criterion 10");
    println!(
        "criterion 10 PASS: {} bytes of sweep output identical across thread counts ({:.1}s)",
        serial.len(),
        start.elapsed().as_secs_f64()
    );
}
