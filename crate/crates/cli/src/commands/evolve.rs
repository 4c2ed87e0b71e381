//! Exact Schrödinger or von Neumann evolution under a constant Hamiltonian.

use anyhow::{ensure, Result};
use qgeo::dynamics::{evolve_density, evolve_pure, HamiltonianSystem};
use qgeo::states::{bloch_coords, bloch_of_density};
use qgeo::BlochVector;
use serde::Deserialize;

use super::{num, Status};
use crate::config::ScenarioConfig;
use crate::output::{row, Artifacts};
use crate::params::{Observable, State, StateSpec};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Params {
    #[serde(default = "default_hamiltonian")]
    hamiltonian: Observable,
    state: StateSpec,
    #[serde(default = "default_dt")]
    dt: f64,
    #[serde(default = "default_steps")]
    steps: usize,
}

fn default_hamiltonian() -> Observable {
    Observable::named("z")
}

fn default_dt() -> f64 {
    0.01
}

fn default_steps() -> usize {
    100
}

pub fn run(cfg: &ScenarioConfig) -> Result<Status> {
    let params: Params = cfg.params()?;
    let h = params.hamiltonian.operator(cfg.hbar)?;
    let state = params.state.state()?;
    ensure!(h.dim() == state.dim(), "Hamiltonian has dimension {} but the state {}", h.dim(), state.dim());
    let sys = HamiltonianSystem::new(h, cfg.hbar, params.dt, params.steps)?;

    let (csv, bloch): (String, Option<Vec<(f64, BlochVector)>>) = match &state {
        State::Pure(psi) => {
            let traj = evolve_pure(&sys, psi)?;
            let bloch = (psi.dim() == 2)
                .then(|| traj.iter().map(|(t, s)| Ok((t, bloch_coords(s)?))).collect::<Result<Vec<_>>>())
                .transpose()?;
            (traj.to_csv(), bloch)
        }
        State::Mixed(rho) => {
            let traj = evolve_density(&sys, rho)?;
            let bloch = (rho.dim() == 2)
                .then(|| traj.iter().map(|(t, s)| Ok((t, bloch_of_density(s)?))).collect::<Result<Vec<_>>>())
                .transpose()?;
            (traj.to_csv(), bloch)
        }
    };

    let notes = [format!("dt: {}, steps: {}", params.dt, params.steps)];
    let mut out = Artifacts::new(cfg)?;
    out.csv("evolve.csv", &notes, &csv)?;
    if let Some(points) = &bloch {
        let mut body = String::from("t,x1,x2,x3\n");
        for (t, b) in points {
            let [x1, x2, x3] = b.as_array();
            row(&mut body, &[t, &x1, &x2, &x3].map(|x| num(*x)));
        }
        out.csv("evolve_bloch.csv", &notes, &body)?;
    }
    println!("evolve: {} samples, duration {}", params.steps + 1, sys.duration());
    Ok(Status::Pass)
}
