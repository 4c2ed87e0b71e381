//! Horizontal lifts and geometric phases.
//!
//! A curve `ρ(t)` in `D(σ)` is handled through any lift `ψ(t)` in `S(σ)`
//! sampled on a uniform grid. The horizontal lift is `ψ∥(t) = ψ(t)V(t)` with
//! `V̇ = −𝒜_ψ(ψ̇)V`, `V(0) = I`, integrated by classical RK4; `ψ̇` comes from
//! fourth-order differences and the connection at half steps from cubic
//! interpolation, so the whole scheme is fourth order. The geometric phase is
//! `arg Tr(ψ∥(0)†ψ∥(τ))`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::bundle::connection_raw;
use crate::error::{Error, Result};
use crate::grid;
use crate::linops::{
    expm_skew, frob_inner, hermitian_eig, real, ComplexMatrix, CVector, HermitianOperator, Mat,
    C64, I,
};
use crate::states::{
    density_from_bloch, purify, reduce, BlochVector, DensityOperator, Purification, Spectrum,
    DEFAULT_SPECTRAL_TOL,
};

/// Upper bound on the per-step rotation `‖𝒜‖Δt` and `‖ψ̇‖Δt`.
pub const MAX_STEP_ROTATION: f64 = 0.1;
/// Largest allowed Frobenius jump between consecutive samples.
pub const MAX_JUMP: f64 = 0.5;
/// Endpoint tolerance for a base curve to count as closed.
pub const CLOSED_TOL: f64 = 1e-8;
/// Below this `|Tr|` the phase is undefined.
pub const MIN_TRACE: f64 = 1e-12;

/// A curve in `D(σ)` given by a sampled lift on a uniform time grid.
#[derive(Clone, Debug)]
pub struct StateCurve {
    times: Vec<f64>,
    samples: Vec<Mat>,
    sigma: Spectrum,
}

impl StateCurve {
    pub fn new(times: Vec<f64>, samples: Vec<Purification>) -> Result<Self> {
        let sigma = samples
            .first()
            .ok_or_else(|| Error::InvalidCurve("no samples".into()))?
            .sigma()
            .clone();
        if let Some(bad) = samples.iter().find(|s| s.sigma() != &sigma) {
            return Err(Error::SpectrumMismatch(format!(
                "{:?} vs {:?}",
                sigma.values(),
                bad.sigma().values()
            )));
        }
        let mats = samples.into_iter().map(|p| p.as_dmatrix().clone()).collect();
        Self::from_parts(times, mats, sigma)
    }

    pub(crate) fn from_parts(times: Vec<f64>, samples: Vec<Mat>, sigma: Spectrum) -> Result<Self> {
        if times.len() != samples.len() {
            return Err(Error::dims(times.len(), samples.len()));
        }
        if samples.len() < 2 {
            return Err(Error::InvalidCurve("need at least two samples".into()));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidCurve("times must increase strictly".into()));
        }
        let h = (times[times.len() - 1] - times[0]) / (times.len() - 1) as f64;
        if times
            .iter()
            .enumerate()
            .any(|(j, t)| (t - times[0] - j as f64 * h).abs() > 1e-9 * h.max(1.0))
        {
            return Err(Error::InvalidCurve("time grid must be uniform".into()));
        }
        let shape = samples[0].shape();
        if shape.1 != sigma.k_tot() || samples.iter().any(|s| s.shape() != shape) {
            return Err(Error::InvalidCurve("samples must share the shape n×k_tot".into()));
        }
        for w in samples.windows(2) {
            let jump = (&w[1] - &w[0]).norm();
            if jump > MAX_JUMP {
                return Err(Error::InvalidCurve(format!(
                    "jump {jump:.3} between consecutive samples exceeds {MAX_JUMP}"
                )));
            }
        }
        Ok(StateCurve {
            times,
            samples,
            sigma,
        })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn sigma(&self) -> &Spectrum {
        &self.sigma
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn step(&self) -> f64 {
        (self.times[self.len() - 1] - self.times[0]) / (self.len() - 1) as f64
    }

    pub fn sample_matrices(&self) -> &[Mat] {
        &self.samples
    }

    pub fn sample(&self, j: usize) -> Purification {
        Purification::wrap(self.samples[j].clone(), self.sigma.clone())
    }

    /// Base curve `ρ(tⱼ) = ψ(tⱼ)ψ(tⱼ)†`.
    pub fn densities(&self) -> Vec<DensityOperator> {
        (0..self.len()).map(|j| reduce(&self.sample(j))).collect()
    }

    /// `‖ρ(τ) − ρ(0)‖_F`.
    pub fn closure_defect(&self) -> f64 {
        let a = &self.samples[0];
        let b = &self.samples[self.len() - 1];
        (a * a.adjoint() - b * b.adjoint()).norm()
    }

    pub fn is_closed(&self) -> bool {
        self.closure_defect() <= CLOSED_TOL
    }

    /// Right-multiplies every sample by a gauge unitary `V(tⱼ)`.
    pub fn regauge<F: Fn(f64) -> Mat>(&self, v: F) -> Result<Self> {
        let samples = self
            .times
            .iter()
            .zip(&self.samples)
            .map(|(&t, s)| s * v(t))
            .collect();
        Self::from_parts(self.times.clone(), samples, self.sigma.clone())
    }

    /// `ψ̇(tⱼ)` by fourth-order differences.
    pub fn velocities(&self) -> Result<Vec<Mat>> {
        grid::derivative(&self.samples, self.step())
    }
}

/// Time-dependent Hamiltonian callback `t ↦ Ĥ(t)`.
pub type GeneratorFn = Arc<dyn Fn(f64) -> HermitianOperator + Send + Sync>;

/// How a unitary family `U(t)` is generated.
#[derive(Clone)]
pub enum Generator {
    /// `U(t) = diag(e^{−i r₁ t}, …, e^{−i rₙ t})`.
    DiagPhase { rates: Vec<f64> },
    /// `U(t) = exp(−iĤt/ħ)`.
    Constant { hamiltonian: HermitianOperator, hbar: f64 },
    /// `iħU̇ = Ĥ(t)U`, integrated with a fourth-order Magnus scheme.
    Callback { hamiltonian: GeneratorFn, dim: usize, hbar: f64 },
}

impl fmt::Debug for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::DiagPhase { rates } => f.debug_struct("DiagPhase").field("rates", rates).finish(),
            Generator::Constant { hamiltonian, hbar } => f
                .debug_struct("Constant")
                .field("hamiltonian", hamiltonian)
                .field("hbar", hbar)
                .finish(),
            Generator::Callback { dim, hbar, .. } => f
                .debug_struct("Callback")
                .field("dim", dim)
                .field("hbar", hbar)
                .finish_non_exhaustive(),
        }
    }
}

/// A unitary family `U(t)`, `t ∈ [0, τ]`, on a grid of `steps` intervals.
#[derive(Clone, Debug)]
pub struct UnitaryFamily {
    generator: Generator,
    tau: f64,
    steps: usize,
}

/// JSON form `{"generator", "params", "tau", "steps"}`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct FamilyDescriptor {
    pub generator: String,
    #[serde(default)]
    pub params: serde_json::Value,
    pub tau: f64,
    pub steps: usize,
}

#[derive(Deserialize)]
struct DiagParams {
    rates: Vec<f64>,
}

#[derive(Deserialize)]
struct ConstantParams {
    hamiltonian: Vec<Vec<C64>>,
    #[serde(default = "default_hbar")]
    hbar: f64,
}

fn default_hbar() -> f64 {
    crate::DEFAULT_HBAR
}

impl UnitaryFamily {
    pub fn new(generator: Generator, tau: f64, steps: usize) -> Result<Self> {
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::InvalidParameter(format!("duration must be positive, got {tau}")));
        }
        if steps < 2 {
            return Err(Error::InvalidParameter(format!("steps must be at least 2, got {steps}")));
        }
        match &generator {
            Generator::DiagPhase { rates } if rates.is_empty() => {
                return Err(Error::InvalidParameter("diag_phase needs at least one rate".into()))
            }
            Generator::Constant { hbar, .. } | Generator::Callback { hbar, .. } if !(*hbar > 0.0) => {
                return Err(Error::InvalidParameter(format!("hbar must be positive, got {hbar}")))
            }
            _ => {}
        }
        Ok(UnitaryFamily {
            generator,
            tau,
            steps,
        })
    }

    pub fn from_descriptor(d: &FamilyDescriptor) -> Result<Self> {
        let bad = |e: serde_json::Error| Error::InvalidParameter(format!("{} params: {e}", d.generator));
        let generator = match d.generator.as_str() {
            "diag_phase" => {
                let p: DiagParams = serde_json::from_value(d.params.clone()).map_err(bad)?;
                Generator::DiagPhase { rates: p.rates }
            }
            "constant" => {
                let p: ConstantParams = serde_json::from_value(d.params.clone()).map_err(bad)?;
                let h = HermitianOperator::from_dmatrix(crate::states::rows_to_matrix(&p.hamiltonian)?)?;
                Generator::Constant { hamiltonian: h, hbar: p.hbar }
            }
            other => {
                return Err(Error::InvalidParameter(format!(
                    "unknown generator '{other}' (expected diag_phase or constant)"
                )))
            }
        };
        Self::new(generator, d.tau, d.steps)
    }

    pub fn generator(&self) -> &Generator {
        &self.generator
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn dim(&self) -> usize {
        match &self.generator {
            Generator::DiagPhase { rates } => rates.len(),
            Generator::Constant { hamiltonian, .. } => hamiltonian.dim(),
            Generator::Callback { dim, .. } => *dim,
        }
    }

    pub fn times(&self) -> Vec<f64> {
        let h = self.tau / self.steps as f64;
        (0..=self.steps).map(|j| j as f64 * h).collect()
    }

    /// `U(tⱼ)` on the grid.
    pub fn unitaries(&self) -> Result<Vec<Mat>> {
        let times = self.times();
        match &self.generator {
            Generator::DiagPhase { rates } => Ok(times
                .iter()
                .map(|&t| {
                    Mat::from_diagonal(&CVector::from_iterator(
                        rates.len(),
                        rates.iter().map(|r| C64::from_polar(1.0, -r * t)),
                    ))
                })
                .collect()),
            Generator::Constant { hamiltonian, hbar } => {
                let eig = hermitian_eig(hamiltonian);
                Ok(times
                    .iter()
                    .map(|&t| eig.propagator(t / hbar).as_dmatrix().clone())
                    .collect())
            }
            Generator::Callback { hamiltonian, dim, hbar } => {
                let h = self.tau / self.steps as f64;
                let offset = 3f64.sqrt() / 6.0;
                let mut u = Mat::identity(*dim, *dim);
                let mut out = vec![u.clone()];
                for &t in &times[..self.steps] {
                    let gen = |s: f64| -> Result<Mat> {
                        let m = hamiltonian(s);
                        if m.dim() != *dim {
                            return Err(Error::dims(*dim, m.dim()));
                        }
                        Ok(m.as_dmatrix() * (-I / *hbar))
                    };
                    let a1 = gen(t + (0.5 - offset) * h)?;
                    let a2 = gen(t + (0.5 + offset) * h)?;
                    let comm = &a2 * &a1 - &a1 * &a2;
                    let omega = (&a1 + &a2) * real(0.5 * h) + comm * real(3f64.sqrt() * h * h / 12.0);
                    let step = expm_skew(&ComplexMatrix::wrap(omega))?;
                    u = step.as_dmatrix() * u;
                    out.push(u.clone());
                }
                Ok(out)
            }
        }
    }
}

/// Lift `ψ(t) = U(t)ψ₀` of `ρ(t) = U(t)ρ₀U(t)†`, with `ψ₀ = purify(ρ₀)`.
pub fn lift_curve(family: &UnitaryFamily, rho0: &DensityOperator) -> Result<StateCurve> {
    if family.dim() != rho0.dim() {
        return Err(Error::dims(rho0.dim(), family.dim()));
    }
    let psi0 = purify(rho0, DEFAULT_SPECTRAL_TOL)?;
    let samples = family
        .unitaries()?
        .iter()
        .map(|u| u * psi0.as_dmatrix())
        .collect();
    StateCurve::from_parts(family.times(), samples, psi0.sigma().clone())
}

/// The horizontal lift through the first sample.
pub fn horizontal_lift(curve: &StateCurve) -> Result<StateCurve> {
    let gauge = transport(curve)?;
    let samples = curve
        .samples
        .iter()
        .zip(&gauge)
        .map(|(psi, v)| psi * v)
        .collect();
    StateCurve::from_parts(curve.times.clone(), samples, curve.sigma.clone())
}

/// Solves `V̇ = −𝒜_ψ(ψ̇)V`, `V(0) = I` on the curve's grid.
fn transport(curve: &StateCurve) -> Result<Vec<Mat>> {
    let h = curve.step();
    let vel = curve.velocities()?;
    let conn: Vec<Mat> = curve
        .samples
        .iter()
        .zip(&vel)
        .map(|(psi, x)| connection_raw(psi, &curve.sigma, x))
        .collect();
    let rotation = vel
        .iter()
        .chain(&conn)
        .map(|m| m.norm() * h)
        .fold(0.0, f64::max);
    if rotation >= MAX_STEP_ROTATION {
        return Err(Error::StepSize {
            rotation,
            limit: MAX_STEP_ROTATION,
        });
    }
    let mid = grid::midpoints(&conn);
    let k = curve.sigma.k_tot();
    let mut v = Mat::identity(k, k);
    let mut out = Vec::with_capacity(curve.len());
    out.push(v.clone());
    let half = real(0.5 * h);
    for j in 0..curve.len() - 1 {
        let k1 = -(&conn[j] * &v);
        let k2 = -(&mid[j] * (&v + &k1 * half));
        let k3 = -(&mid[j] * (&v + &k2 * half));
        let k4 = -(&conn[j + 1] * (&v + &k3 * real(h)));
        v += (k1 + (k2 + k3) * real(2.0) + k4) * real(h / 6.0);
        out.push(v.clone());
    }
    Ok(out)
}

/// `max_j ‖𝒜_{ψ∥}(ψ̇∥)‖_F` over interior grid points.
pub fn horizontality_defect(lift: &StateCurve) -> Result<f64> {
    let vel = lift.velocities()?;
    Ok((2..lift.len() - 2)
        .map(|j| connection_raw(&lift.samples[j], &lift.sigma, &vel[j]).norm())
        .fold(0.0, f64::max))
}

/// Result of a phase computation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PhaseReport {
    /// `arg Tr(ψ∥(0)†ψ∥(τ))` in `(−π, π]`.
    pub radians: f64,
    /// The trace itself.
    pub trace: C64,
    /// Whether the base curve closes within [`CLOSED_TOL`]; otherwise the
    /// value is an open-curve phase.
    pub closed: bool,
}

/// Geometric phase of the curve, via its horizontal lift.
pub fn geometric_phase(curve: &StateCurve) -> Result<PhaseReport> {
    let lift = horizontal_lift(curve)?;
    let first = &lift.samples[0];
    let last = &lift.samples[lift.len() - 1];
    let trace = frob_inner(first, last);
    if trace.norm() < MIN_TRACE {
        return Err(Error::UndefinedPhase {
            magnitude: trace.norm(),
        });
    }
    Ok(PhaseReport {
        radians: principal(trace.arg()),
        trace,
        closed: curve.is_closed(),
    })
}

/// Aharonov–Anandan phase of a closed pure-state curve.
pub fn aharonov_anandan_phase(curve: &StateCurve) -> Result<f64> {
    if !curve.sigma.is_pure() {
        return Err(Error::InvalidCurve("Aharonov–Anandan phase needs a pure curve".into()));
    }
    let defect = curve.closure_defect();
    if defect > CLOSED_TOL {
        return Err(Error::OpenCurve { defect });
    }
    Ok(geometric_phase(curve)?.radians)
}

/// Maps an angle to `(−π, π]`.
pub fn principal(x: f64) -> f64 {
    let mut y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y -= 2.0 * PI;
    }
    y
}

/// Distance between two angles on the circle.
pub fn circular_distance(a: f64, b: f64) -> f64 {
    principal(a - b).abs()
}

/// The qubit family with Bloch vector `p(sin ϑ, 0, cos ϑ)`.
pub fn mixed_qubit(theta: f64, p: f64) -> Result<DensityOperator> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("p must lie in [0, 1], got {p}")));
    }
    Ok(density_from_bloch(&BlochVector::new(
        p * theta.sin(),
        0.0,
        p * theta.cos(),
    )?))
}

/// `U(t) = diag(e^{−it}, e^{it})` over `[0, π]`: one full turn of the Bloch
/// vector about the third axis.
pub fn qubit_loop(steps: usize) -> Result<UnitaryFamily> {
    UnitaryFamily::new(Generator::DiagPhase { rates: vec![1.0, -1.0] }, PI, steps)
}

/// `arg(−½(1+p)e^{iπ cos ϑ} − ½(1−p)e^{−iπ cos ϑ})`.
pub fn qubit_closed_form(theta: f64, p: f64) -> f64 {
    let a = C64::from_polar(1.0, PI * theta.cos());
    (-(a * (0.5 * (1.0 + p))) - a.conj() * (0.5 * (1.0 - p))).arg()
}

/// Numerical phase of the qubit family at `(ϑ, p)`.
pub fn qubit_phase(theta: f64, p: f64, steps: usize) -> Result<PhaseReport> {
    let curve = lift_curve(&qubit_loop(steps)?, &mixed_qubit(theta, p)?)?;
    geometric_phase(&curve)
}
