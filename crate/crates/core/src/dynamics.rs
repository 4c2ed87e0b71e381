//! Expectation functions and the Schrödinger / von Neumann flows.
//!
//! With `Ω = 2ħ Im⟨·|·⟩` the Schrödinger field `X_Ĥ(ψ) = −(i/ħ)Ĥψ` satisfies
//! `dH(ξ) = Ω(X_Ĥ, ξ)` for the quadratic function `H(ψ) = ⟨ψ|Ĥψ⟩`. For the
//! operator fields `X_A = −iÂψ` the bracket `Ω(X_A, X_B)` equals
//! `c_Ω ⟨[Â, B̂]⟩/(2i)` with `c_Ω = 2ħ` ([`bracket_normalization`]).
//!
//! Time-independent evolution is exact: the Hamiltonian is diagonalized once
//! and every sample is evaluated from the spectral phases at its own time.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::kahler::symplectic_omega;
use crate::linops::{hermitian_eig, real, CVector, Eigen, HermitianOperator, Mat, C64, I};
use crate::states::{DensityOperator, PureState, QuantumState};

fn check_dim(a: &HermitianOperator, n: usize) -> Result<()> {
    if a.dim() != n {
        return Err(Error::dims(a.dim(), n));
    }
    Ok(())
}

/// `⟨ψ|Âψ⟩` or `Tr(Âρ)`.
pub fn expectation<S: QuantumState + ?Sized>(a: &HermitianOperator, state: &S) -> Result<f64> {
    check_dim(a, state.dim())?;
    let z = state.expect_matrix(a.as_dmatrix());
    debug_assert!(z.im.abs() <= 1e-12 * a.as_dmatrix().norm().max(1.0));
    Ok(z.re)
}

/// `X_Ĥ(ψ) = −(i/ħ)Ĥψ`.
pub fn hamiltonian_field(h: &HermitianOperator, psi: &PureState, hbar: f64) -> Result<CVector> {
    check_dim(h, psi.dim())?;
    Ok(h.as_dmatrix() * psi.vector() * (-I / hbar))
}

/// The constant `c_Ω` in `Ω(X_A, X_B) = c_Ω ⟨[Â, B̂]⟩/(2i)`.
pub const fn bracket_normalization(hbar: f64) -> f64 {
    2.0 * hbar
}

/// `{A, B}_Ω(ψ) = Ω(X_A, X_B)` with `X_A = −iÂψ`.
///
/// The commutator form is evaluated alongside and a disagreement beyond
/// `1e-12` (relative) is reported as a normalization audit failure.
pub fn poisson_bracket(
    a: &HermitianOperator,
    b: &HermitianOperator,
    psi: &PureState,
    hbar: f64,
) -> Result<f64> {
    check_dim(a, psi.dim())?;
    check_dim(b, psi.dim())?;
    let xa = a.as_dmatrix() * psi.vector() * -I;
    let xb = b.as_dmatrix() * psi.vector() * -I;
    let value = symplectic_omega(&xa, &xb, hbar)?;
    let comm = a.as_dmatrix() * b.as_dmatrix() - b.as_dmatrix() * a.as_dmatrix();
    let expected = (psi.expect_matrix(&comm) / (2.0 * I)).re * bracket_normalization(hbar);
    let scale = hbar * a.as_dmatrix().norm().max(1.0) * b.as_dmatrix().norm().max(1.0);
    let defect = (value - expected).abs();
    if defect > 1e-12 * scale {
        return Err(Error::NormalizationAudit {
            identity: "poisson bracket",
            defect,
        });
    }
    Ok(value)
}

/// Finite-difference check of `dH(ξ) = Ω(X_Ĥ, ξ)` at `ψ` for the quadratic
/// energy `H(ψ) = ⟨ψ|Ĥψ⟩`. Returns `(central difference, Ω(X_Ĥ, ξ))`.
pub fn hamiltonian_check(
    h: &HermitianOperator,
    psi: &PureState,
    xi: &CVector,
    hbar: f64,
    step: f64,
) -> Result<(f64, f64)> {
    check_dim(h, xi.len())?;
    let energy = |v: &CVector| v.dotc(&(h.as_dmatrix() * v)).re;
    let fwd = psi.vector() + xi * real(step);
    let bwd = psi.vector() - xi * real(step);
    let fd = (energy(&fwd) - energy(&bwd)) / (2.0 * step);
    let exact = symplectic_omega(&hamiltonian_field(h, psi, hbar)?, xi, hbar)?;
    Ok((fd, exact))
}

/// Time-independent Hamiltonian with a uniform time grid.
#[derive(Clone, Debug)]
pub struct HamiltonianSystem {
    hamiltonian: HermitianOperator,
    hbar: f64,
    time_step: f64,
    steps: usize,
    eig: Eigen,
}

impl HamiltonianSystem {
    pub fn new(hamiltonian: HermitianOperator, hbar: f64, time_step: f64, steps: usize) -> Result<Self> {
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(Error::InvalidParameter(format!("hbar must be positive, got {hbar}")));
        }
        if !(time_step > 0.0 && time_step.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "time_step must be positive, got {time_step}"
            )));
        }
        if steps == 0 {
            return Err(Error::InvalidParameter("steps must be at least 1".into()));
        }
        let eig = hermitian_eig(&hamiltonian);
        Ok(HamiltonianSystem {
            hamiltonian,
            hbar,
            time_step,
            steps,
            eig,
        })
    }

    pub fn hamiltonian(&self) -> &HermitianOperator {
        &self.hamiltonian
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn time_step(&self) -> f64 {
        self.time_step
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn duration(&self) -> f64 {
        self.time_step * self.steps as f64
    }

    /// Sample times `0, Δt, …, steps·Δt`.
    pub fn times(&self) -> Vec<f64> {
        (0..=self.steps).map(|j| j as f64 * self.time_step).collect()
    }

    /// `U(t) = exp(−iĤt/ħ)`.
    pub fn propagator(&self, t: f64) -> crate::linops::UnitaryOperator {
        self.eig.propagator(t / self.hbar)
    }

    fn phases(&self, t: f64) -> Vec<C64> {
        self.eig
            .values
            .iter()
            .map(|&l| C64::from_polar(1.0, -l * t / self.hbar))
            .collect()
    }
}

/// States sampled on a time grid.
#[derive(Clone, Debug)]
pub struct Trajectory<S> {
    pub times: Vec<f64>,
    pub states: Vec<S>,
}

impl<S> Trajectory<S> {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &S)> {
        self.times.iter().copied().zip(&self.states)
    }
}

/// Flattening of a state into CSV columns.
pub trait CsvState {
    fn column_names(&self) -> Vec<String>;
    fn components(&self) -> Vec<C64>;
}

impl CsvState for PureState {
    fn column_names(&self) -> Vec<String> {
        (0..self.dim()).map(|i| format!("psi{i}")).collect()
    }

    fn components(&self) -> Vec<C64> {
        self.vector().iter().copied().collect()
    }
}

impl CsvState for DensityOperator {
    fn column_names(&self) -> Vec<String> {
        let n = self.dim();
        (0..n)
            .flat_map(|i| (0..n).map(move |j| format!("rho{i}{j}")))
            .collect()
    }

    fn components(&self) -> Vec<C64> {
        self.as_dmatrix().transpose().iter().copied().collect()
    }
}

impl<S: CsvState> Trajectory<S> {
    /// CSV with a header row: `t`, then real and imaginary parts of each
    /// component interleaved.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t");
        if let Some(first) = self.states.first() {
            for name in first.column_names() {
                let _ = write!(out, ",{name}_re,{name}_im");
            }
        }
        out.push('\n');
        for (t, s) in self.iter() {
            let _ = write!(out, "{t:.17e}");
            for z in s.components() {
                let _ = write!(out, ",{:.17e},{:.17e}", z.re, z.im);
            }
            out.push('\n');
        }
        out
    }
}

/// Exact Schrödinger evolution on the system's grid.
pub fn evolve_pure(sys: &HamiltonianSystem, psi0: &PureState) -> Result<Trajectory<PureState>> {
    check_dim(&sys.hamiltonian, psi0.dim())?;
    let v = sys.eig.vectors.as_dmatrix();
    let coeffs = v.adjoint() * psi0.vector();
    let times = sys.times();
    let states = times
        .iter()
        .map(|&t| {
            let phased = CVector::from_iterator(
                coeffs.len(),
                coeffs.iter().zip(sys.phases(t)).map(|(c, p)| c * p),
            );
            PureState::wrap(v * phased)
        })
        .collect();
    Ok(Trajectory { times, states })
}

/// Exact von Neumann evolution `ρ(t) = U(t)ρ₀U(t)†`.
pub fn evolve_density(
    sys: &HamiltonianSystem,
    rho0: &DensityOperator,
) -> Result<Trajectory<DensityOperator>> {
    check_dim(&sys.hamiltonian, rho0.dim())?;
    let v = sys.eig.vectors.as_dmatrix();
    let rotated = v.adjoint() * rho0.as_dmatrix() * v;
    let times = sys.times();
    let states = times
        .iter()
        .map(|&t| {
            let p = sys.phases(t);
            let m = Mat::from_fn(rotated.nrows(), rotated.ncols(), |i, j| {
                rotated[(i, j)] * p[i] * p[j].conj()
            });
            DensityOperator::wrap(v * m * v.adjoint())
        })
        .collect();
    Ok(Trajectory { times, states })
}
