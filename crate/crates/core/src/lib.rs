//! Geometric quantum mechanics at finite dimension.
//!
//! Pure states live on the unit sphere of `C^n` and project to the Kähler
//! manifold `CP^{n-1}` carrying the Fubini–Study metric. Mixed states with a
//! fixed spectrum `σ` are reached through purifications `ψ: K → H` with
//! `ψ†ψ = P(σ)`; the set of such maps is a principal `U(σ)` bundle over the
//! unitary orbit `D(σ)`, and the mechanical connection on it yields horizontal
//! lifts, holonomy and the mixed-state geometric phase.
//!
//! The crate is organised bottom-up:
//!
//! - [`linops`]: dense complex matrices, Hermitian eigendecomposition, exponentials.
//! - [`states`]: pure states, density operators, spectra, purifications, Bloch vectors.
//! - [`kahler`]: the Hermitian, Riemannian and symplectic structures on `H` and `P(H)`.
//! - [`dynamics`]: expectation functions, Schrödinger and von Neumann flows.
//! - [`bundle`]: gauge algebra `u(σ)`, mechanical connection, vertical/horizontal split.
//! - [`holonomy`]: horizontal lifts and geometric phases.
//! - [`measures`]: distances, probabilities, measurement, dynamic distance.
//! - [`uncertainty`]: uncertainty functionals, bounds and the dispersion identity.
//!
//! `ħ` is never implicit: every operation that depends on it takes it as an
//! argument. [`DEFAULT_HBAR`] is the conventional value.

pub mod bundle;
pub mod dynamics;
pub mod error;
pub mod holonomy;
pub mod kahler;
pub mod linops;
pub mod measures;
pub mod random;
pub mod states;
pub mod uncertainty;

mod grid;

pub use error::{Error, Result};
pub use linops::{ComplexMatrix, CVector, HermitianOperator, Mat, UnitaryOperator, C64};
pub use states::{BlochVector, DensityOperator, PureState, Purification, QuantumState, Spectrum};

/// Default value of the reduced Planck constant.
pub const DEFAULT_HBAR: f64 = 1.0;
