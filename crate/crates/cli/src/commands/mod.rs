mod distance;
mod evolve;
mod measure;
mod phase;
mod uncertainty;
mod verify;

use anyhow::Result;

use crate::config::{Command, ScenarioConfig};

/// Whether the run met its acceptance condition.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
}

impl Status {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

pub fn run(cfg: &ScenarioConfig) -> Result<Status> {
    match cfg.command {
        Command::Phase => phase::run(cfg),
        Command::Distance => distance::run(cfg),
        Command::Uncertainty => uncertainty::run(cfg),
        Command::Evolve => evolve::run(cfg),
        Command::Measure => measure::run(cfg),
        Command::Verify => verify::run(cfg),
    }
}

fn pool(cfg: &ScenarioConfig) -> Result<rayon::ThreadPool> {
    Ok(rayon::ThreadPoolBuilder::new().num_threads(cfg.workers).build()?)
}

/// Shortest round-trip form; scientific notation outside `[1e-4, 1e15)`.
fn num(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || (1e-4..1e15).contains(&a) || !a.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

#[cfg(test)]
mod tests {
    use super::num;

    #[test]
    fn number_format() {
        assert_eq!(num(0.0), "0");
        assert_eq!(num(0.25), "0.25");
        assert_eq!(num(-2.5e-15), "-2.5e-15");
        assert_eq!(num(1e20), "1e20");
        assert_eq!(num(0.1 + 0.2).parse::<f64>().unwrap(), 0.1 + 0.2);
    }
}
