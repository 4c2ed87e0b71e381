//! Uncertainty products against the Robertson–Schrödinger and geometric
//! bounds for diagonal states and random unitary conjugates of them.

use anyhow::{ensure, Result};
use qgeo::uncertainty::{report, UncertaintyReport};
use qgeo::{random, DensityOperator};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{num, pool, Status};
use crate::config::ScenarioConfig;
use crate::output::{row, Artifacts};
use crate::params::{task_rng, Observable};

pub const SLACK_TOL: f64 = 1e-10;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Params {
    #[serde(default = "default_a")]
    a: Observable,
    #[serde(default = "default_b")]
    b: Observable,
    #[serde(default = "default_lambdas")]
    lambdas: Vec<Vec<f64>>,
    /// Random conjugates per spectrum, in addition to the diagonal state.
    #[serde(default)]
    samples: usize,
}

fn default_a() -> Observable {
    Observable::named("sx")
}

fn default_b() -> Observable {
    Observable::named("sy")
}

fn default_lambdas() -> Vec<Vec<f64>> {
    vec![vec![0.8, 0.2]]
}

#[derive(Serialize)]
struct Record {
    lambda: Vec<f64>,
    sample: usize,
    report: UncertaintyReport,
}

pub fn run(cfg: &ScenarioConfig) -> Result<Status> {
    let params: Params = cfg.params()?;
    let a = params.a.operator(cfg.hbar)?;
    let b = params.b.operator(cfg.hbar)?;
    ensure!(a.dim() == b.dim(), "observables have dimensions {} and {}", a.dim(), b.dim());
    ensure!(!params.lambdas.is_empty(), "lambdas is empty");
    for l in &params.lambdas {
        ensure!(l.len() == a.dim(), "spectrum {l:?} does not match dimension {}", a.dim());
    }

    let groups = pool(cfg)?.install(|| {
        params
            .lambdas
            .par_iter()
            .enumerate()
            .map(|(i, l)| -> Result<Vec<Record>> {
                let rho = DensityOperator::from_diagonal(l)?;
                let mut rng = task_rng(cfg.seed, i);
                (0..=params.samples)
                    .map(|k| {
                        let state = if k == 0 {
                            rho.clone()
                        } else {
                            rho.conjugated(&random::unitary(&mut rng, rho.dim()))?
                        };
                        Ok(Record { lambda: l.clone(), sample: k, report: report(&a, &b, &state, cfg.hbar)? })
                    })
                    .collect()
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let records: Vec<Record> = groups.into_iter().flatten().collect();

    let mut body = String::from("lambda,sample,delta_a,delta_b,product,rs_bound,geometric_bound,slack\n");
    let mut worst = f64::INFINITY;
    for r in &records {
        let lam = r.lambda.iter().map(|x| num(*x)).collect::<Vec<_>>().join(" ");
        let u = &r.report;
        worst = worst.min(u.slack);
        let mut cells = vec![lam, r.sample.to_string()];
        cells.extend([u.delta_a, u.delta_b, u.product, u.rs_bound, u.geometric_bound, u.slack].map(num));
        row(&mut body, &cells);
    }

    let mut out = Artifacts::new(cfg)?;
    out.csv("uncertainty.csv", &[], &body)?;
    out.json("uncertainty.json", &serde_json::json!({ "records": records }))?;
    for r in records.iter().filter(|r| r.sample == 0) {
        println!(
            "uncertainty: lambda={:?} product={:.6} rs_bound={:.6} geometric_bound={:.6}",
            r.lambda, r.report.product, r.report.rs_bound, r.report.geometric_bound
        );
    }
    Ok(Status::from_bool(worst >= -SLACK_TOL))
}
