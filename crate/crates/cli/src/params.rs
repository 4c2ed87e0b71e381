//! Parameter shapes shared across commands.

use anyhow::{bail, ensure, Result};
use qgeo::linops::pauli;
use qgeo::{DensityOperator, HermitianOperator, Mat, PureState, C64};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

/// RNG owned by task `index` of a run seeded with `seed`.
pub fn task_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(index as u64);
    r
}

/// A list of points, a single point, or an evenly spaced range.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum Grid {
    Single(f64),
    Points(Vec<f64>),
    Range {
        start: f64,
        stop: f64,
        count: usize,
        #[serde(default = "yes")]
        endpoint: bool,
    },
}

fn yes() -> bool {
    true
}

impl Grid {
    pub fn points(&self) -> Result<Vec<f64>> {
        let pts = match self {
            Grid::Single(x) => vec![*x],
            Grid::Points(v) => v.clone(),
            Grid::Range { start, stop, count, endpoint } => {
                ensure!(*count > 0, "grid count must be at least 1");
                let denom = if *endpoint { count.saturating_sub(1).max(1) } else { *count };
                (0..*count).map(|i| start + (stop - start) * i as f64 / denom as f64).collect()
            }
        };
        ensure!(!pts.is_empty(), "grid is empty");
        ensure!(pts.iter().all(|x| x.is_finite()), "grid contains non-finite values");
        Ok(pts)
    }
}

/// A real number or a `[re, im]` pair.
#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

impl From<Entry> for C64 {
    fn from(e: Entry) -> C64 {
        match e {
            Entry::Real(x) => C64::new(x, 0.0),
            Entry::Complex([re, im]) => C64::new(re, im),
        }
    }
}

fn matrix(rows: &[Vec<Entry>]) -> Result<Mat> {
    let n = rows.len();
    ensure!(n > 0 && rows.iter().all(|r| r.len() == n), "matrix must be square and non-empty");
    Ok(Mat::from_fn(n, n, |i, j| rows[i][j].into()))
}

/// Named observable (`x`, `y`, `z` for Pauli matrices, `sx`, `sy`, `sz` for
/// spin components `ħσ/2`) or explicit matrix rows.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum Observable {
    Named(String),
    Rows(Vec<Vec<Entry>>),
}

impl Observable {
    pub fn named(s: &str) -> Self {
        Observable::Named(s.to_owned())
    }

    pub fn operator(&self, hbar: f64) -> Result<HermitianOperator> {
        Ok(match self {
            Observable::Named(name) => match name.as_str() {
                "x" => pauli::sigma_x(),
                "y" => pauli::sigma_y(),
                "z" => pauli::sigma_z(),
                "sx" => pauli::sigma_x().scaled(hbar / 2.0),
                "sy" => pauli::sigma_y().scaled(hbar / 2.0),
                "sz" => pauli::sigma_z().scaled(hbar / 2.0),
                other => bail!("unknown observable {other:?}; use x, y, z, sx, sy, sz or matrix rows"),
            },
            Observable::Rows(rows) => HermitianOperator::from_dmatrix(matrix(rows)?)?,
        })
    }
}

/// `{"vector": [...]}` (normalized on load), `{"matrix": [[...]]}` or
/// `{"bloch": [x, y, z]}`.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum StateSpec {
    Vector { vector: Vec<Entry> },
    Matrix { matrix: Vec<Vec<Entry>> },
    Bloch { bloch: [f64; 3] },
}

pub enum State {
    Pure(PureState),
    Mixed(DensityOperator),
}

impl StateSpec {
    pub fn state(&self) -> Result<State> {
        Ok(match self {
            StateSpec::Vector { vector } => {
                let v: Vec<C64> = vector.iter().map(|&e| e.into()).collect();
                State::Pure(PureState::normalized(qgeo::CVector::from_vec(v))?)
            }
            StateSpec::Matrix { matrix: rows } => State::Mixed(DensityOperator::from_dmatrix(matrix(rows)?)?),
            StateSpec::Bloch { bloch: [x, y, z] } => {
                let b = qgeo::BlochVector::new(*x, *y, *z)?;
                State::Mixed(qgeo::states::density_from_bloch(&b))
            }
        })
    }
}

impl State {
    pub fn dim(&self) -> usize {
        match self {
            State::Pure(p) => p.dim(),
            State::Mixed(r) => r.dim(),
        }
    }
}
