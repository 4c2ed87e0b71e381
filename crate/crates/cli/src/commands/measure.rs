//! Repeated projective measurement of one observable on a fixed state.

use anyhow::{ensure, Result};
use qgeo::measures::{measure_density, measure_pure};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::Status;
use crate::config::ScenarioConfig;
use crate::output::Artifacts;
use crate::params::{task_rng, Observable, State, StateSpec};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Params {
    #[serde(default = "default_observable")]
    observable: Observable,
    state: StateSpec,
    #[serde(default = "default_shots")]
    shots: usize,
}

fn default_observable() -> Observable {
    Observable::named("z")
}

fn default_shots() -> usize {
    1
}

#[derive(Serialize)]
struct Record {
    outcome: f64,
    probability: f64,
    post_state: Value,
}

#[derive(Serialize)]
struct Frequency {
    outcome: f64,
    probability: f64,
    count: usize,
    frequency: f64,
}

#[derive(Serialize)]
struct Payload {
    shots: usize,
    frequencies: Vec<Frequency>,
    records: Vec<Record>,
}

pub fn run(cfg: &ScenarioConfig) -> Result<Status> {
    let params: Params = cfg.params()?;
    ensure!(params.shots > 0, "shots must be at least 1");
    let f = params.observable.operator(cfg.hbar)?;
    let state = params.state.state()?;
    ensure!(f.dim() == state.dim(), "observable has dimension {} but the state {}", f.dim(), state.dim());

    // Shots are sequential on a single stream so the outcome sequence is
    // reproducible for a given seed.
    let mut rng = task_rng(cfg.seed, 0);
    let mut records = Vec::with_capacity(params.shots);
    let mut distribution = Vec::new();
    for _ in 0..params.shots {
        let (outcome, probability, post_state, dist) = match &state {
            State::Pure(psi) => {
                let m = measure_pure(&f, psi, &mut rng)?;
                (m.outcome, m.probability, serde_json::to_value(&m.post_state)?, m.distribution)
            }
            State::Mixed(rho) => {
                let m = measure_density(&f, rho, &mut rng)?;
                (m.outcome, m.probability, serde_json::to_value(&m.post_state)?, m.distribution)
            }
        };
        distribution = dist;
        records.push(Record { outcome, probability, post_state });
    }

    let frequencies: Vec<Frequency> = distribution
        .iter()
        .map(|&(outcome, probability)| {
            let count = records.iter().filter(|r| r.outcome == outcome).count();
            Frequency { outcome, probability, count, frequency: count as f64 / params.shots as f64 }
        })
        .collect();
    for q in &frequencies {
        println!(
            "measure: outcome {} probability {:.6} observed {} of {} ({:.4})",
            q.outcome, q.probability, q.count, params.shots, q.frequency
        );
    }
    let mut out = Artifacts::new(cfg)?;
    out.json("measure.json", &Payload { shots: params.shots, frequencies, records })?;
    Ok(Status::Pass)
}
