use std::fmt::Write as _;

use ibm_exit::domains::Domain;
use ibm_exit::iterated::{
    moment_estimates, representation_crosscheck_with, rows_to_csv, survival_curve, EstimateRow, IteratedMethod,
    Parameter, Sampling,
};
use ibm_exit::rng::StreamId;
use ibm_exit::verify::{check_dominance, check_isoperimetric, check_moments, sign_scan, CheckSettings};
use ibm_exit::Result;
use sha2::{Digest, Sha256};

use crate::config::{CheckKind, Command, ExperimentConfig, MethodKind};
use crate::{EXIT_CONFIRMED_FLAG, EXIT_OK};

/// Rendered result of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    /// Commented header followed by the CSV table.
    pub csv: String,
    /// Human-readable summary (not part of the CSV).
    pub summary: String,
    /// Process exit status.
    pub status: i32,
}

/// SHA-256 of the compact JSON of the configuration, output path excluded.
pub fn config_hash(config: &ExperimentConfig) -> String {
    let mut c = config.clone();
    c.output = None;
    let json = serde_json::to_string(&c).expect("config serializes");
    format!("{:x}", Sha256::digest(json.as_bytes()))
}

fn header(config: &ExperimentConfig) -> String {
    let seed = config.master_seed.map_or_else(|| "none".to_string(), |s| s.to_string());
    format!(
        "# ibm-exit {}\n# command: {}\n# config-sha256: {}\n# master-seed: {seed}\n",
        env!("CARGO_PKG_VERSION"),
        config.command.label(),
        config_hash(config)
    )
}

fn domain(config: &ExperimentConfig) -> &Domain {
    config.domain.as_ref().expect("validated configs carry a domain")
}

fn base_stream(config: &ExperimentConfig) -> StreamId {
    StreamId::new(config.master_seed.unwrap_or(0), 0)
}

fn sampling(config: &ExperimentConfig, seed: StreamId) -> Sampling {
    Sampling { count: config.estimator.count, seed, dt: config.estimator.dt, chunk: config.chunk_size }
}

/// Executes a validated configuration.
pub fn run(config: &ExperimentConfig) -> Result<Outcome> {
    let params = &config.series;
    let base = base_stream(config);
    let mut summary = String::new();
    let mut status = EXIT_OK;
    let body = match config.command {
        Command::Survival | Command::Moments => {
            let d = domain(config);
            let mut rows = Vec::new();
            for (i, z) in config.grids.z.iter().enumerate() {
                let s = sampling(config, base.substream(i as u64));
                let (estimates, parameters): (Vec<_>, Vec<_>) = if config.command == Command::Survival {
                    let method = match config.estimator.method {
                        MethodKind::Conditional => IteratedMethod::Conditional(s),
                        MethodKind::Quadrature => IteratedMethod::Quadrature(config.estimator.quadrature),
                        MethodKind::Pathwise => IteratedMethod::Pathwise { sampling: s, dt_y: config.estimator.dt_y },
                    };
                    let est = survival_curve(d, z, config.process, &config.grids.t, &method, params, None)?;
                    (est, config.grids.t.iter().map(|&t| Parameter::Time(t)).collect())
                } else {
                    let est = moment_estimates(d, z, config.process, &config.grids.p, &s, params, None)?;
                    (est, config.grids.p.iter().map(|&p| Parameter::Order(p)).collect())
                };
                for (estimate, parameter) in estimates.into_iter().zip(parameters) {
                    rows.push(EstimateRow {
                        domain_id: config.domain_id.clone(),
                        process: config.process,
                        z: z.clone(),
                        parameter,
                        seed: (!estimate.method.is_deterministic()).then_some(s.seed),
                        estimate,
                    });
                }
            }
            let _ = writeln!(summary, "{} rows", rows.len());
            rows_to_csv(&rows)
        }
        Command::Verify => {
            let v = config.verify.as_ref().expect("validated verify configs carry a verify section");
            let settings = CheckSettings {
                count: config.estimator.count,
                k: v.k,
                seed: base,
                dt: config.estimator.dt,
                chunk: config.chunk_size,
                confirm_factor: v.confirm_factor,
            };
            let report = match v.check {
                CheckKind::Dominance => check_dominance(v.dominance.as_ref().expect("validated"), &settings, params)?,
                CheckKind::Survival => check_isoperimetric(
                    domain(config),
                    config.process,
                    v.comparison.expect("validated"),
                    &config.grids.z,
                    &config.grids.t,
                    &settings,
                    params,
                    None,
                )?,
                CheckKind::Moments => check_moments(
                    domain(config),
                    config.process,
                    v.comparison.expect("validated"),
                    &config.grids.z,
                    &config.grids.p,
                    &settings,
                    params,
                    None,
                )?,
            };
            if report.has_confirmed_flag() {
                status = EXIT_CONFIRMED_FLAG;
            }
            summary = report.summary_text();
            report.to_csv()
        }
        Command::SignScan => {
            let g = &config.grids;
            let scan = sign_scan(&g.u, &g.v, &g.t, params)?;
            summary = scan.summary_text();
            scan.to_csv()
        }
        Command::Crosscheck => {
            let d = domain(config);
            let mut out =
                String::from("z,t,double_density,partial_v,partial_u,mixed,max_discrepancy,quadrature_error\n");
            let mut worst = 0.0f64;
            for z in &config.grids.z {
                for &t in &config.grids.t {
                    let r = representation_crosscheck_with(d, z, t, &config.estimator.quadrature, params)?;
                    worst = worst.max(r.max_discrepancy);
                    let _ = writeln!(
                        out,
                        "{z},{t},{},{},{},{},{},{}",
                        r.double_density, r.partial_v, r.partial_u, r.mixed, r.max_discrepancy, r.quadrature_error
                    );
                }
            }
            let _ = writeln!(summary, "largest pairwise discrepancy: {worst:e}");
            out
        }
    };
    Ok(Outcome { csv: header(config) + &body, summary, status })
}
