//! Distances along the rotated qubit family `R(ε) diag(λ₁, λ₂) R(ε)†`.

use anyhow::{ensure, Result};
use qgeo::dynamics::{evolve_density, HamiltonianSystem};
use qgeo::linops::pauli;
use qgeo::measures::{bures, bures_closed_form, curve_length, dynamic_distance, rotated_qubit_pair, SearchConfig};
use qgeo::DensityOperator;
use rand::RngCore;
use rayon::prelude::*;
use serde::Deserialize;

use super::{num, pool, Status};
use crate::config::ScenarioConfig;
use crate::output::{row, Artifacts};
use crate::params::{task_rng, Grid};

pub const LENGTH_TOL: f64 = 1e-4;
pub const LENGTH_CHECK_MAX_EPS: f64 = 0.05;
pub const BURES_TOL: f64 = 1e-8;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Params {
    #[serde(default = "default_lambda")]
    lambda: [f64; 2],
    #[serde(default = "default_epsilon")]
    epsilon: Grid,
    /// Segments, restarts and iteration cap; the seed comes from the run seed.
    #[serde(default)]
    search: SearchConfig,
    /// Samples along the generating trajectory.
    #[serde(default = "default_steps")]
    steps: usize,
}

fn default_lambda() -> [f64; 2] {
    [0.7, 0.3]
}

fn default_epsilon() -> Grid {
    Grid::Points(vec![0.0, 0.005, 0.01, 0.02, 0.05, 0.1])
}

fn default_steps() -> usize {
    256
}

struct Row {
    eps: f64,
    length: f64,
    length_residual: f64,
    dynamic: f64,
    dynamic_residual: f64,
    closed: f64,
    oracle: f64,
}

fn evaluate(l: [f64; 2], eps: f64, steps: usize, hbar: f64, search: &SearchConfig) -> Result<Row> {
    // ρ(t) = exp(−iεtσ₂)ρ₀exp(iεtσ₂) on t ∈ [0, 1] reaches ρ₁ at t = 1.
    let h = pauli::sigma_y().scaled(hbar * eps);
    let sys = HamiltonianSystem::new(h.clone(), hbar, 1.0 / steps as f64, steps)?;
    let rho0 = DensityOperator::from_diagonal(&l)?;
    let len = curve_length(&evolve_density(&sys, &rho0)?, &h, hbar)?;
    let (a, b) = rotated_qubit_pair(l[0], l[1], eps)?;
    let dynamic = dynamic_distance(&a, &b, search)?;
    let dynamic_residual = dynamic
        .metadata
        .get("endpoint_residual")
        .and_then(serde_json::Value::as_f64)
        .unwrap_or(0.0);
    Ok(Row {
        eps,
        length: len.value,
        length_residual: len.residual,
        dynamic: dynamic.value,
        dynamic_residual,
        closed: bures_closed_form(l[0], l[1], eps),
        oracle: bures(&a, &b)?,
    })
}

pub fn run(cfg: &ScenarioConfig) -> Result<Status> {
    let params: Params = cfg.params()?;
    let l = params.lambda;
    ensure!(params.steps >= 2, "steps must be at least 2");
    let eps = params.epsilon.points()?;

    let rows = pool(cfg)?.install(|| {
        eps.par_iter()
            .enumerate()
            .map(|(i, &e)| {
                let search = SearchConfig { seed: task_rng(cfg.seed, i).next_u64(), ..params.search.clone() };
                evaluate(l, e, params.steps, cfg.hbar, &search)
            })
            .collect::<Result<Vec<_>>>()
    })?;

    let mut wide = String::from(
        "epsilon,curve_length,length_residual,dynamic_distance,dynamic_residual,bures_closed_form,bures_oracle\n",
    );
    let mut long = String::from("epsilon,method,value,residual\n");
    let mut pass = true;
    for r in &rows {
        let bures_gap = (r.closed - r.oracle).abs();
        if r.eps.abs() <= LENGTH_CHECK_MAX_EPS {
            pass &= (r.length - r.eps.abs()).abs() <= LENGTH_TOL;
        }
        pass &= bures_gap <= BURES_TOL;
        row(
            &mut wide,
            &[r.eps, r.length, r.length_residual, r.dynamic, r.dynamic_residual, r.closed, r.oracle].map(num),
        );
        for (method, value, residual) in [
            ("curve_length", r.length, r.length_residual),
            ("dynamic_distance", r.dynamic, r.dynamic_residual),
            ("bures_closed_form", r.closed, bures_gap),
            ("bures_oracle", r.oracle, bures_gap),
        ] {
            row(&mut long, &[num(r.eps), method.to_owned(), num(value), num(residual)]);
        }
    }

    let mut notes = vec![
        format!("lambda: {} {}", l[0], l[1]),
        format!(
            "search: segments {}, restarts {}, max_iter {}",
            params.search.segments, params.search.restarts, params.search.max_iter
        ),
    ];
    if l[0] == l[1] {
        notes.push("degenerate spectrum: the rotation leaves the state fixed and the Bures prefactor vanishes".into());
    }
    let mut out = Artifacts::new(cfg)?;
    out.csv("distance.csv", &notes, &wide)?;
    out.csv("distance_methods.csv", &notes, &long)?;
    for r in &rows {
        println!(
            "distance: eps={} length={:.6e} dynamic={:.6e} bures_closed={:.6e} bures_oracle={:.6e}",
            r.eps, r.length, r.dynamic, r.closed, r.oracle
        );
    }
    Ok(Status::from_bool(pass))
}
