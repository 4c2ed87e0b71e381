//! Mixed-qubit geometric phase surface over `(ϑ, p)`.

use std::f64::consts::PI;

use anyhow::{Context, Result};
use qgeo::holonomy::{circular_distance, qubit_closed_form, qubit_phase};
use rayon::prelude::*;
use serde::Deserialize;

use super::{num, pool, Status};
use crate::config::ScenarioConfig;
use crate::output::{row, Artifacts};
use crate::params::Grid;

pub const TOLERANCE: f64 = 1e-6;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Params {
    #[serde(default = "default_theta")]
    theta: Grid,
    #[serde(default = "default_p")]
    p: Grid,
    #[serde(default = "default_steps")]
    steps: usize,
}

fn default_theta() -> Grid {
    Grid::Range { start: 0.0, stop: 2.0 * PI, count: 21, endpoint: false }
}

fn default_p() -> Grid {
    Grid::Range { start: 0.0, stop: 1.0, count: 11, endpoint: true }
}

fn default_steps() -> usize {
    4096
}

const SCRIPT: &str = "\
set datafile separator ','
set key autotitle columnhead
set xlabel 'theta'
set ylabel 'p'
set zlabel 'gamma'
set ticslevel 0
splot 'phase.csv' using 1:2:3 with points pointtype 7 pointsize 0.6 title 'numeric', \\
      'phase.csv' using 1:2:4 with points pointtype 6 pointsize 1.2 title 'closed form'
pause mouse close
";

pub fn run(cfg: &ScenarioConfig) -> Result<Status> {
    let params: Params = cfg.params()?;
    let thetas = params.theta.points().context("theta grid")?;
    let ps = params.p.points().context("p grid")?;
    let tasks: Vec<(f64, f64)> = thetas.iter().flat_map(|&t| ps.iter().map(move |&p| (t, p))).collect();

    let results = pool(cfg)?.install(|| {
        tasks
            .par_iter()
            .map(|&(theta, p)| {
                qubit_phase(theta, p, params.steps)
                    .with_context(|| format!("theta={theta}, p={p}"))
                    .map(|r| (theta, p, r))
            })
            .collect::<Result<Vec<_>>>()
    })?;

    let mut body = String::from("theta,p,gamma_numeric,gamma_closed_form,abs_error\n");
    let mut worst: f64 = 0.0;
    for (theta, p, report) in &results {
        if !report.closed {
            eprintln!("open-curve phase at theta={theta}, p={p}");
        }
        let closed = qubit_closed_form(*theta, *p);
        let err = circular_distance(report.radians, closed);
        worst = worst.max(err);
        row(&mut body, &[num(*theta), num(*p), num(report.radians), num(closed), num(err)]);
    }
    let misses = results
        .iter()
        .filter(|(t, p, r)| circular_distance(r.radians, qubit_closed_form(*t, *p)) >= TOLERANCE)
        .count();

    let mut out = Artifacts::new(cfg)?;
    out.csv("phase.csv", &[format!("steps: {}", params.steps)], &body)?;
    out.gnuplot("phase.gp", SCRIPT)?;
    println!(
        "phase: {} points, max abs_error {worst:.3e}, {misses} at or above {TOLERANCE:e}",
        results.len()
    );
    Ok(Status::from_bool(worst < TOLERANCE))
}
