//! Acceptance suite. Runs every criterion in sequence, prints one
//! `PASS`/`FAIL` line each and exits non-zero if any failed.
//!
//! Criteria 6–8 share one batch cache: the BTBM and moment checks reuse the
//! outer exit-time draws made for the IBM survival check.

use std::process::Command as Process;
use std::time::{Duration, Instant};

use ibm_exit::bm_exit::BatchCache;
use ibm_exit::domains::{Domain, StartPoint, Symmetrization};
use ibm_exit::iterated::{
    moment_estimates, representation_crosscheck, survival_curve, IteratedMethod, ProcessKind, Sampling,
};
use ibm_exit::rng::StreamId;
use ibm_exit::series::{
    eta_mixed_partial, eta_moment, eta_moment_series, eta_partial, eta_survival, eta_survival_in, survival,
    IntervalExitQuery, SeriesForm, SeriesParams, Side,
};
use ibm_exit::verify::{
    check_dominance, check_isoperimetric, check_moments, CheckSettings, DominanceForm, DominanceSpec, Law, Status,
    VerificationReport,
};
use rand::Rng;

const SEED: u64 = 20_260_601;

type Outcome = Result<String, String>;

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Duration,
    run: fn(&Context) -> Outcome,
}

struct Context {
    cache: BatchCache,
    params: SeriesParams,
}

fn q(u: f64, v: f64, t: f64) -> IntervalExitQuery {
    IntervalExitQuery::new(u, v, t).unwrap()
}

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

// ---------------------------------------------------------------- 1

/// `(sum, max prefix, min prefix)` of the eight ±1 steps encoded by a byte.
fn step_table() -> [(i32, i32, i32); 256] {
    let mut table = [(0, 0, 0); 256];
    for (b, entry) in table.iter_mut().enumerate() {
        let (mut s, mut hi, mut lo) = (0, i32::MIN, i32::MAX);
        for bit in 0..8 {
            s += if b >> bit & 1 == 1 { 1 } else { -1 };
            hi = hi.max(s);
            lo = lo.min(s);
        }
        *entry = (s, hi, lo);
    }
    table
}

/// Whether a simple random walk stays strictly inside `(-barrier, barrier)`
/// for `steps` steps (a multiple of 8).
fn walk_survives(rng: &mut impl Rng, table: &[(i32, i32, i32); 256], steps: usize, barrier: i32) -> bool {
    let mut pos = 0;
    let mut left = steps / 8;
    while left > 0 {
        let word: u64 = rng.random();
        for byte in word.to_le_bytes().into_iter().take(left.min(8)) {
            let (s, hi, lo) = table[byte as usize];
            if pos + hi >= barrier || pos + lo <= -barrier {
                return false;
            }
            pos += s;
        }
        left = left.saturating_sub(8);
    }
    true
}

fn series_correctness(cx: &Context) -> Outcome {
    // Random walk with spatial step 1e-2 and time step 1e-4 on (-1, 1) up to t = 1.
    let (paths, steps, barrier) = (1_000_000usize, 10_000usize, 100);
    let table = step_table();
    let stream = StreamId::new(SEED, 1);
    let survived: usize =
        ibm_exit::rng::par_samples(stream, paths, |rng| walk_survives(rng, &table, steps, barrier) as usize)
            .into_iter()
            .sum();
    let p_hat = survived as f64 / paths as f64;
    let se = (p_hat * (1.0 - p_hat) / paths as f64).sqrt();
    let exact = eta_survival(&q(1.0, 1.0, 1.0), &cx.params).map_err(|e| e.to_string())?;
    let walk_ok = (exact - p_hat).abs() < 3.0 * se;

    let mut rng = StreamId::new(SEED, 2).sample_rng(0);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let u: f64 = rng.random_range(0.05..3.0);
        let v: f64 = rng.random_range(0.05..3.0);
        let ratio = cx.params.regime_ratio * rng.random_range(0.5..2.0);
        let query = q(u, v, ratio * (u + v).powi(2));
        let a = eta_survival_in(&query, SeriesForm::Eigenfunction, &cx.params).map_err(|e| e.to_string())?;
        let b = eta_survival_in(&query, SeriesForm::Images, &cx.params).map_err(|e| e.to_string())?;
        worst = worst.max((a - b).abs());
    }
    ensure(walk_ok && worst < 1e-10, format!("series {exact:.6} vs walk {p_hat:.6} ± {se:.1e}; regime gap {worst:.1e}"))
}

// ---------------------------------------------------------------- 2

/// Richardson-extrapolated central difference of `f` at step `h`, using
/// steps `h`, `h/2`, `h/4`.
fn richardson(f: impl Fn(f64) -> f64, h: f64) -> f64 {
    let d: Vec<f64> = (0..3).map(|k| f(h / f64::powi(2.0, k))).collect();
    let r1 = [(4.0 * d[1] - d[0]) / 3.0, (4.0 * d[2] - d[1]) / 3.0];
    (16.0 * r1[1] - r1[0]) / 15.0
}

fn derivative_consistency(cx: &Context) -> Outcome {
    let fine = SeriesParams { abs_tol: 1e-16, ..cx.params };
    let s = |u: f64, v: f64, t: f64| eta_survival(&q(u, v, t), &fine).unwrap();
    let mut rng = StreamId::new(SEED, 3).sample_rng(0);
    let mut worst = (0.0f64, String::new());
    for _ in 0..1_000 {
        // Away from t ≪ L², where the mixed partial drops below the
        // resolution of any difference quotient of S.
        let l: f64 = rng.random_range(0.5..4.0);
        let u = l * rng.random_range(0.15..0.85);
        let v = l - u;
        let t = rng.random_range(0.1..1.0) * l * l;
        let h = 0.05 * u.min(v).min(t.sqrt());
        let fd_v = richardson(|h| (s(u, v + h, t) - s(u, v - h, t)) / (2.0 * h), h);
        let fd_u = richardson(|h| (s(u + h, v, t) - s(u - h, v, t)) / (2.0 * h), h);
        let fd_uv = richardson(
            |h| (s(u + h, v + h, t) - s(u + h, v - h, t) - s(u - h, v + h, t) + s(u - h, v - h, t)) / (4.0 * h * h),
            h,
        );
        let query = q(u, v, t);
        let pairs = [
            (eta_partial(&query, Side::V, &cx.params).unwrap(), fd_v),
            (eta_partial(&query, Side::U, &cx.params).unwrap(), fd_u),
            (eta_mixed_partial(&query, &cx.params).unwrap(), fd_uv),
        ];
        for (analytic, fd) in pairs {
            let rel = (analytic - fd).abs() / fd.abs();
            if rel > worst.0 {
                worst = (rel, format!("(u, v, t) = ({u:.3}, {v:.3}, {t:.3})"));
            }
        }
    }
    ensure(worst.0 < 1e-4, format!("worst relative error {:.1e} at {}", worst.0, worst.1))
}

// ---------------------------------------------------------------- 3

/// `E τ²` for Brownian motion from 0 in (-1, 1): solves `f₁'' = -2`,
/// `f₂'' = -4 f₁` with zero boundary values by RK4 shooting.
fn second_moment_by_shooting() -> f64 {
    let n = 4_000;
    let h = 2.0 / n as f64;
    let rhs = |y: [f64; 4]| [y[1], -2.0, y[3], -4.0 * y[0]];
    let shoot = |s1: f64, s2: f64| -> ([f64; 4], f64) {
        let mut y = [0.0, s1, 0.0, s2];
        let mut at_zero = 0.0;
        for i in 0..n {
            if i == n / 2 {
                at_zero = y[2];
            }
            let k1 = rhs(y);
            let k2 = rhs(std::array::from_fn(|j| y[j] + 0.5 * h * k1[j]));
            let k3 = rhs(std::array::from_fn(|j| y[j] + 0.5 * h * k2[j]));
            let k4 = rhs(std::array::from_fn(|j| y[j] + h * k3[j]));
            y = std::array::from_fn(|j| y[j] + h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]));
        }
        (y, at_zero)
    };
    // The end values are affine in the two slopes; f₁ decouples.
    let (y00, _) = shoot(0.0, 0.0);
    let (y10, _) = shoot(1.0, 0.0);
    let s1 = -y00[0] / (y10[0] - y00[0]);
    let (ya, _) = shoot(s1, 0.0);
    let (yb, _) = shoot(s1, 1.0);
    let s2 = -ya[2] / (yb[2] - ya[2]);
    shoot(s1, s2).1
}

fn exact_moments(cx: &Context) -> Outcome {
    let mut rng = StreamId::new(SEED, 4).sample_rng(0);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let u: f64 = rng.random_range(0.05..5.0);
        let v: f64 = rng.random_range(0.05..5.0);
        let m = eta_moment(u, v, 1.0, &cx.params).map_err(|e| e.to_string())?;
        worst = worst.max((m - u * v).abs());
    }
    let oracle = second_moment_by_shooting();
    let m2 = eta_moment(1.0, 1.0, 2.0, &cx.params).map_err(|e| e.to_string())?;
    let m2_series = eta_moment_series(1.0, 1.0, 2.0, &cx.params).map_err(|e| e.to_string())?;
    let gap = (m2 - oracle).abs().max((m2_series - oracle).abs());
    ensure(
        worst < 1e-8 && gap < 1e-8,
        format!("max |E η - uv| = {worst:.1e}; E η² = {m2:.12} (series {m2_series:.12}) vs ODE {oracle:.12}"),
    )
}

// ---------------------------------------------------------------- 4

fn representation_identity(cx: &Context) -> Outcome {
    let d = Domain::interval(-1.0, 1.0).unwrap();
    let mut worst = 0.0f64;
    for z in [0.0, 0.5, 0.9] {
        for t in [0.25, 1.0, 4.0] {
            let r =
                representation_crosscheck(&d, &StartPoint::new(vec![z]), t, &cx.params).map_err(|e| e.to_string())?;
            worst = worst.max(r.max_discrepancy);
        }
    }
    ensure(worst < 1e-6, format!("largest pairwise discrepancy {worst:.1e} over 9 cells"))
}

// ---------------------------------------------------------------- 5

fn moment_identity(cx: &Context) -> Outcome {
    let d = Domain::interval(-1.0, 1.0).unwrap();
    let z = StartPoint::origin(1);
    let s = Sampling::new(1_000_000, StreamId::new(SEED, 5));
    let ibm = moment_estimates(&d, &z, ProcessKind::Ibm, &[1.0], &s, &cx.params, None).map_err(|e| e.to_string())?[0];
    let btbm = moment_estimates(&d, &z, ProcessKind::Btbm, &[1.0], &s, &cx.params, None).map_err(|e| e.to_string())?[0];
    let zi = (ibm.value - 1.0) / ibm.std_error;
    let zb = (btbm.value - 5.0 / 3.0) / btbm.std_error;
    ensure(
        zi.abs() < 3.0 && zb.abs() < 3.0,
        format!(
            "IBM {:.5} ± {:.1e} (z = {zi:+.2}); BTBM {:.5} ± {:.1e} (z = {zb:+.2})",
            ibm.value, ibm.std_error, btbm.value, btbm.std_error
        ),
    )
}

// ---------------------------------------------------------------- 6–8

const T_GRID: [f64; 3] = [0.25, 1.0, 4.0];
const P_LIST: [f64; 2] = [1.0, 2.0];

struct Case {
    domain: Domain,
    comparison: Symmetrization,
    starts: Vec<StartPoint>,
}

fn cases() -> Vec<Case> {
    let rect = Domain::rectangle(-1.0, 1.0, -2.0, 2.0).unwrap();
    let rect_starts: Vec<StartPoint> = [[0.0, 0.0], [0.5, 1.0], [0.9, 1.8]].map(|c| StartPoint::new(c.to_vec())).into();
    let triangle = Domain::equilateral_triangle(2.0 * 3f64.sqrt()).unwrap();
    let tri_starts: Vec<StartPoint> = [[0.0, 0.0], [0.0, 1.2], [0.6, -0.7]].map(|c| StartPoint::new(c.to_vec())).into();
    vec![
        Case { domain: rect.clone(), comparison: Symmetrization::EqualVolumeBall, starts: rect_starts.clone() },
        Case { domain: rect, comparison: Symmetrization::SlabS, starts: rect_starts },
        Case { domain: triangle, comparison: Symmetrization::LensC, starts: tri_starts },
    ]
}

fn summarize(reports: &[VerificationReport]) -> Outcome {
    let (mut cells, mut unconfirmed, mut confirmed) = (0, 0, 0);
    let mut worst = f64::INFINITY;
    for r in reports {
        for rec in &r.records {
            cells += 1;
            worst = worst.min(rec.comparison.z_score());
            match rec.status {
                Status::Pass => {}
                Status::Flag { confirmed: false } => unconfirmed += 1,
                Status::Flag { confirmed: true } => confirmed += 1,
            }
        }
    }
    let detail = format!(
        "{cells} cells, {unconfirmed} unconfirmed / {confirmed} confirmed flags, smallest margin/se {worst:+.2}"
    );
    if confirmed > 0 {
        let flagged: Vec<String> = reports.iter().filter(|r| r.has_confirmed_flag()).map(|r| r.check.clone()).collect();
        return Err(format!("{detail}; confirmed in: {}", flagged.join("; ")));
    }
    Ok(detail)
}

fn isoperimetric(cx: &Context, process: ProcessKind) -> Outcome {
    let settings = CheckSettings::new(100_000, SEED);
    let mut reports = Vec::new();
    for c in cases() {
        reports.push(
            check_isoperimetric(
                &c.domain,
                process,
                c.comparison,
                &c.starts,
                &T_GRID,
                &settings,
                &cx.params,
                Some(&cx.cache),
            )
            .map_err(|e| e.to_string())?,
        );
    }
    summarize(&reports)
}

fn ibm_isoperimetric(cx: &Context) -> Outcome {
    isoperimetric(cx, ProcessKind::Ibm)
}

fn btbm_isoperimetric(cx: &Context) -> Outcome {
    isoperimetric(cx, ProcessKind::Btbm)
}

fn moment_corollaries(cx: &Context) -> Outcome {
    let settings = CheckSettings::new(100_000, SEED);
    let mut reports = Vec::new();
    for process in [ProcessKind::Ibm, ProcessKind::Btbm] {
        for c in cases() {
            reports.push(
                check_moments(
                    &c.domain,
                    process,
                    c.comparison,
                    &c.starts,
                    &P_LIST,
                    &settings,
                    &cx.params,
                    Some(&cx.cache),
                )
                .map_err(|e| e.to_string())?,
            );
        }
    }
    summarize(&reports)
}

// ---------------------------------------------------------------- 9

fn dominance_transfer(cx: &Context) -> Outcome {
    let grid = vec![0.1, 0.2, 0.5, 1.0, 1.5, 2.0, 3.0, 5.0, 7.0, 10.0];
    let settings = CheckSettings::new(100_000, SEED);
    let mut reports = Vec::new();
    for form in [DominanceForm::TwoSided, DominanceForm::Symmetric] {
        let spec = DominanceSpec {
            xi: Law::Exponential { rate: 2.0 },
            big_t: Law::Exponential { rate: 1.0 },
            t_grid: grid.clone(),
            form,
        };
        reports.push(check_dominance(&spec, &settings, &cx.params).map_err(|e| e.to_string())?);
    }
    let within_se = reports.iter().flat_map(|r| &r.records).all(|r| r.status == Status::Pass);

    // Point masses 1 ≤ 2: each side is the interval survival itself, and the
    // comparison is the monotonicity in the interval.
    let spec = DominanceSpec {
        xi: Law::PointMass { at: 1.0 },
        big_t: Law::PointMass { at: 2.0 },
        t_grid: grid,
        form: DominanceForm::Symmetric,
    };
    let point = check_dominance(&spec, &settings, &cx.params).map_err(|e| e.to_string())?;
    let mut exact = true;
    for r in &point.records {
        let ibm_exit::iterated::Parameter::Time(t) = r.parameter else { return Err("unexpected parameter".into()) };
        let c = &r.comparison;
        exact &= c.combined_se == 0.0
            && c.lhs.value == survival(1.0, 1.0, t, &cx.params).unwrap()
            && c.rhs.value == survival(2.0, 2.0, t, &cx.params).unwrap()
            && c.margin >= 0.0;
    }
    ensure(
        within_se && exact,
        format!("exponential: {}; point mass exact and monotone: {exact}", summarize(&reports).unwrap_or_else(|e| e)),
    )
}

// ---------------------------------------------------------------- 10

fn scaling_laws(cx: &Context) -> Outcome {
    let mut rng = StreamId::new(SEED, 10).sample_rng(0);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let (u, v, t): (f64, f64, f64) =
            (rng.random_range(0.1..2.0), rng.random_range(0.1..2.0), rng.random_range(0.01..5.0));
        let base = survival(u, v, t, &cx.params).unwrap();
        for c in [0.5, 2.0] {
            worst = worst.max((survival(c * u, c * v, c * c * t, &cx.params).unwrap() - base).abs());
        }
    }
    let series_ok = worst < 10.0 * cx.params.abs_tol;

    // P_{cz}[τ_{cD} > c⁴t] = P_z[τ_D > t] on the interval and the rectangle,
    // with independent draws on each side.
    let mut z_max = 0.0f64;
    let cases = [
        (Domain::interval(-1.0, 1.0).unwrap(), vec![0.3], 50_000, None),
        (Domain::rectangle(-1.0, 1.0, -2.0, 2.0).unwrap(), vec![0.5, 1.0], 10_000, Some(1e-3)),
    ];
    for (k, (d, z, count, dt)) in cases.into_iter().enumerate() {
        let ts = [0.25, 1.0, 4.0];
        let sampling = |stream: u64, scale: f64| {
            let s = Sampling::new(count, StreamId::new(SEED, 100 + stream));
            match dt {
                Some(dt) => s.with_dt(dt * scale * scale),
                None => s,
            }
        };
        let method = IteratedMethod::Conditional(sampling(10 * k as u64, 1.0));
        let base = survival_curve(&d, &StartPoint::new(z.clone()), ProcessKind::Ibm, &ts, &method, &cx.params, None)
            .map_err(|e| e.to_string())?;
        let base_moment = moment_estimates(
            &d,
            &StartPoint::new(z.clone()),
            ProcessKind::Ibm,
            &[1.0],
            &sampling(10 * k as u64, 1.0),
            &cx.params,
            None,
        )
        .map_err(|e| e.to_string())?[0];
        for (j, c) in [0.5f64, 2.0].into_iter().enumerate() {
            let scaled = scale_domain(&d, c);
            let zc = StartPoint::new(z.iter().map(|x| c * x).collect());
            let s = sampling(10 * k as u64 + 1 + j as u64, c);
            let cts: Vec<f64> = ts.iter().map(|t| c.powi(4) * t).collect();
            let est =
                survival_curve(&scaled, &zc, ProcessKind::Ibm, &cts, &IteratedMethod::Conditional(s), &cx.params, None)
                    .map_err(|e| e.to_string())?;
            for (a, b) in base.iter().zip(&est) {
                z_max = z_max.max((a.value - b.value).abs() / a.combined_se(b));
            }
            let m = moment_estimates(&scaled, &zc, ProcessKind::Ibm, &[1.0], &s, &cx.params, None)
                .map_err(|e| e.to_string())?[0];
            let c4 = c.powi(4);
            let se = (m.std_error.powi(2) + (c4 * base_moment.std_error).powi(2)).sqrt();
            z_max = z_max.max((m.value - c4 * base_moment.value).abs() / se);
        }
    }
    ensure(
        series_ok && z_max < 3.0,
        format!("series invariance gap {worst:.1e}; IBM c⁴ scaling largest |diff|/se {z_max:.2}"),
    )
}

fn scale_domain(d: &Domain, c: f64) -> Domain {
    match d.kind() {
        "interval" => Domain::interval(-c, c).unwrap(),
        _ => Domain::rectangle(-c, c, -2.0 * c, 2.0 * c).unwrap(),
    }
}

// ---------------------------------------------------------------- 11

const REPRO_CONFIGS: [&str; 4] = [
    r#"{"command": "survival", "domain": {"shape": "ball", "center": [0, 0], "radius": 1},
        "grids": {"z": [[0, 0], [0.5, 0.2]], "t": [0.1, 0.5, 2]},
        "estimator": {"count": 2000, "dt": 0.001}, "master_seed": 41, "chunk_size": 256}"#,
    r#"{"command": "survival", "domain": {"shape": "interval", "a": -1, "b": 1}, "process": "btbm",
        "grids": {"z": [[0.3]], "t": [0.25, 1]},
        "estimator": {"method": "pathwise", "count": 2000, "dt": 0.001, "dt_y": 0.001}, "master_seed": 42}"#,
    r#"{"command": "moments", "domain": {"shape": "rectangle", "xmin": -1, "xmax": 1, "ymin": -2, "ymax": 2},
        "grids": {"z": [[0.5, 1]], "p": [1, 2]}, "estimator": {"count": 3000, "dt": 0.001}, "master_seed": 43}"#,
    r#"{"command": "verify", "domain": {"shape": "rectangle", "xmin": -1, "xmax": 1, "ymin": -2, "ymax": 2},
        "grids": {"z": [[0, 0], [0.9, 1.8]], "t": [0.25, 1]}, "estimator": {"count": 1000, "dt": 0.001},
        "verify": {"check": "survival", "comparison": "equal-volume-ball"}, "master_seed": 44}"#,
];

fn reproducibility(_: &Context) -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut runs = 0;
    for (i, config) in REPRO_CONFIGS.iter().enumerate() {
        let path = dir.path().join(format!("config{i}.json"));
        std::fs::write(&path, config).map_err(|e| e.to_string())?;
        let mut outputs = Vec::new();
        for workers in [1, 2, 8] {
            let out = dir.path().join(format!("out{i}-{workers}.csv"));
            let status = Process::new(env!("CARGO_BIN_EXE_ibm-exit"))
                .arg("--config")
                .arg(&path)
                .arg("--out")
                .arg(&out)
                .arg("--workers")
                .arg(workers.to_string())
                .output()
                .map_err(|e| e.to_string())?;
            if !status.status.success() {
                return Err(format!(
                    "config {i} with {workers} workers exited with {}: {}",
                    status.status,
                    String::from_utf8_lossy(&status.stderr)
                ));
            }
            outputs.push(std::fs::read(&out).map_err(|e| e.to_string())?);
            runs += 1;
        }
        if outputs.windows(2).any(|w| w[0] != w[1]) {
            return Err(format!("config {i}: CSV differs across worker counts"));
        }
    }
    Ok(format!("{} configs × 3 worker counts ({runs} runs) byte-identical", REPRO_CONFIGS.len()))
}

// ----------------------------------------------------------------

fn main() {
    let criteria = [
        Criterion { id: 1, name: "series correctness", budget: Duration::from_secs(120), run: series_correctness },
        Criterion {
            id: 2,
            name: "derivative consistency",
            budget: Duration::from_secs(60),
            run: derivative_consistency,
        },
        Criterion { id: 3, name: "exact moments", budget: Duration::from_secs(10), run: exact_moments },
        Criterion {
            id: 4,
            name: "representation identity",
            budget: Duration::from_secs(60),
            run: representation_identity,
        },
        Criterion { id: 5, name: "IBM moment identity", budget: Duration::from_secs(120), run: moment_identity },
        Criterion {
            id: 6,
            name: "IBM isoperimetric survival",
            budget: Duration::from_secs(600),
            run: ibm_isoperimetric,
        },
        Criterion {
            id: 7,
            name: "BTBM isoperimetric survival",
            budget: Duration::from_secs(600),
            run: btbm_isoperimetric,
        },
        Criterion { id: 8, name: "moment corollaries", budget: Duration::from_secs(600), run: moment_corollaries },
        Criterion { id: 9, name: "dominance transfer", budget: Duration::from_secs(120), run: dominance_transfer },
        Criterion { id: 10, name: "scaling laws", budget: Duration::from_secs(120), run: scaling_laws },
        Criterion { id: 11, name: "reproducibility", budget: Duration::from_secs(60), run: reproducibility },
    ];
    let only: Option<Vec<u32>> =
        std::env::var("ACCEPTANCE_ONLY").ok().map(|s| s.split(',').filter_map(|x| x.trim().parse().ok()).collect());
    let cx = Context { cache: BatchCache::new(), params: SeriesParams::default() };
    let mut failed = 0;
    for c in criteria.iter().filter(|c| only.as_ref().is_none_or(|o| o.contains(&c.id))) {
        let start = Instant::now();
        let result = (c.run)(&cx);
        let elapsed = start.elapsed();
        let (verdict, detail) = match (&result, elapsed <= c.budget) {
            (Ok(d), true) => ("PASS", d.clone()),
            (Ok(d), false) => ("FAIL", format!("{d}; over the {:?} budget", c.budget)),
            (Err(d), _) => ("FAIL", d.clone()),
        };
        if verdict == "FAIL" {
            failed += 1;
        }
        println!("criterion {:>2} {verdict} {} ({:.1} s): {detail}", c.id, c.name, elapsed.as_secs_f64());
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
