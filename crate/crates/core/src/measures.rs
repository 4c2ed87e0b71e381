//! Distances, probabilities and measurement.
//!
//! Pure-state distances are all functions of the overlap `|⟨ψ₁|ψ₂⟩|`. On a
//! mixed orbit `D(σ)` the dynamic distance is the infimum of `(1/ħ)∫ΔH dt`
//! over Hamiltonians steering `ρ₀` to `ρ₁`; it is estimated from above by a
//! derivative-free search over piecewise-constant Hamiltonians.

use std::collections::BTreeMap;

use argmin::core::{CostFunction, Executor, State};
use argmin::solver::neldermead::NelderMead;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::bundle::horizontal_raw;
use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::grid;
use crate::linops::{
    expm_skew, hermitian_eig, psd_sqrt, real, ComplexMatrix, HermitianOperator, Mat, UnitaryOperator, C64, I,
};
use crate::states::{purify, spectrum_of, DensityOperator, PureState, QuantumState, DEFAULT_SPECTRAL_TOL};

/// Orbits are equal when their spectra agree within this tolerance.
pub const ORBIT_TOL: f64 = 1e-8;
/// Largest admissible mismatch between a trajectory and its generator.
pub const CURVE_RESIDUAL_TOL: f64 = 1e-6;

fn overlap(p1: &PureState, p2: &PureState) -> Result<f64> {
    Ok(p1.overlap(p2)?.norm().min(1.0))
}

/// `arccos |⟨ψ₁|ψ₂⟩|`, in `[0, π/2]`.
pub fn kappa(p1: &PureState, p2: &PureState) -> Result<f64> {
    Ok(overlap(p1, p2)?.acos())
}

/// `√(2ħ)·κ`, the scaling under which `δ₀ = cos²(κ/√(2ħ))`.
pub fn kappa_scaled(p1: &PureState, p2: &PureState, hbar: f64) -> Result<f64> {
    Ok((2.0 * hbar).sqrt() * kappa(p1, p2)?)
}

/// `√(2(1 − |⟨ψ₁|ψ₂⟩|))`.
pub fn fs_distance(p1: &PureState, p2: &PureState) -> Result<f64> {
    Ok((2.0 * (1.0 - overlap(p1, p2)?)).sqrt())
}

/// `2√(1 − |⟨ψ₁|ψ₂⟩|²)`, equal to `Tr|P₁ − P₂|`.
pub fn trace_distance(p1: &PureState, p2: &PureState) -> Result<f64> {
    let o = overlap(p1, p2)?;
    Ok(2.0 * (1.0 - o * o).max(0.0).sqrt())
}

/// `Tr|P₁ − P₂|` from the eigenvalues of the difference of projectors.
pub fn trace_distance_operator(p1: &PureState, p2: &PureState) -> Result<f64> {
    if p1.dim() != p2.dim() {
        return Err(Error::dims(p1.dim(), p2.dim()));
    }
    let d = p1.density_matrix() - p2.density_matrix();
    let eig = hermitian_eig(&HermitianOperator::hermitize(d));
    Ok(eig.values.iter().map(|v| v.abs()).sum())
}

/// `√(2(1 − |⟨ψ₁|ψ₂⟩|²))`.
pub fn hs_distance(p1: &PureState, p2: &PureState) -> Result<f64> {
    let o = overlap(p1, p2)?;
    Ok((2.0 * (1.0 - o * o)).max(0.0).sqrt())
}

/// `δ₀(p) = |⟨ψ₀|ψ⟩|²`.
pub fn probability(p0: &PureState, p: &PureState) -> Result<f64> {
    Ok(p0.overlap(p)?.norm_sqr().min(1.0))
}

/// `Tr(P₀P)` computed from the projectors.
pub fn probability_trace(p0: &PureState, p: &PureState) -> Result<f64> {
    if p0.dim() != p.dim() {
        return Err(Error::dims(p0.dim(), p.dim()));
    }
    Ok(p.expect_matrix(&p0.density_matrix()).re)
}

/// Which distance a [`DistanceReport`] carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceMethod {
    FubiniStudy,
    Trace,
    HilbertSchmidt,
    GeodesicKappa,
    Dynamic,
    BuresQubit,
}

impl DistanceMethod {
    pub fn name(self) -> &'static str {
        match self {
            DistanceMethod::FubiniStudy => "fubini_study",
            DistanceMethod::Trace => "trace",
            DistanceMethod::HilbertSchmidt => "hilbert_schmidt",
            DistanceMethod::GeodesicKappa => "geodesic_kappa",
            DistanceMethod::Dynamic => "dynamic",
            DistanceMethod::BuresQubit => "bures_qubit",
        }
    }
}

/// A distance value with its method and diagnostics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistanceReport {
    pub value: f64,
    pub method: DistanceMethod,
    pub metadata: BTreeMap<String, Value>,
}

/// One of the closed-form pure-state distances as a report.
pub fn pure_distance(p1: &PureState, p2: &PureState, method: DistanceMethod) -> Result<DistanceReport> {
    let value = match method {
        DistanceMethod::FubiniStudy => fs_distance(p1, p2)?,
        DistanceMethod::Trace => trace_distance(p1, p2)?,
        DistanceMethod::HilbertSchmidt => hs_distance(p1, p2)?,
        DistanceMethod::GeodesicKappa => kappa(p1, p2)?,
        DistanceMethod::Dynamic | DistanceMethod::BuresQubit => {
            return Err(Error::InvalidParameter(format!(
                "{} is not a closed-form pure-state distance",
                method.name()
            )))
        }
    };
    Ok(DistanceReport {
        value,
        method,
        metadata: BTreeMap::new(),
    })
}

/// Spectral projectors of `f` with eigenvalues grouped within `tol`.
pub fn spectral_projectors(f: &HermitianOperator, tol: f64) -> Result<Vec<(f64, Mat)>> {
    let eig = hermitian_eig(f);
    let v = eig.vectors.as_dmatrix();
    let mut groups: Vec<(Vec<usize>, f64, f64)> = Vec::new();
    for (j, &e) in eig.values.iter().enumerate() {
        match groups.last_mut() {
            Some((idx, first, last)) if *last - e <= tol => {
                if *first - e > tol {
                    return Err(Error::ClusteringAmbiguity {
                        first: *first,
                        second: e,
                        tol,
                    });
                }
                idx.push(j);
                *last = e;
            }
            _ => groups.push((vec![j], e, e)),
        }
    }
    Ok(groups
        .into_iter()
        .map(|(idx, _, _)| {
            let mean = idx.iter().map(|&j| eig.values[j]).sum::<f64>() / idx.len() as f64;
            let mut p = Mat::zeros(v.nrows(), v.nrows());
            for &j in &idx {
                let col = v.column(j);
                p += &col * col.adjoint();
            }
            (mean, p)
        })
        .collect())
}

/// Outcome of a projective measurement.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Measurement<S> {
    /// Sampled eigenvalue.
    pub outcome: f64,
    /// Its probability `Tr(ρΠₖ)`.
    pub probability: f64,
    pub post_state: S,
    /// Every eigenvalue of the observable with its probability.
    pub distribution: Vec<(f64, f64)>,
}

/// Probabilities below this are never sampled.
pub const MIN_OUTCOME_PROBABILITY: f64 = 1e-14;

fn born<S: QuantumState + ?Sized>(f: &HermitianOperator, state: &S) -> Result<Vec<(f64, Mat, f64)>> {
    if f.dim() != state.dim() {
        return Err(Error::dims(state.dim(), f.dim()));
    }
    let out: Vec<_> = spectral_projectors(f, DEFAULT_SPECTRAL_TOL)?
        .into_iter()
        .map(|(e, p)| {
            let prob = state.expect_matrix(&p).re.clamp(0.0, 1.0);
            (e, p, prob)
        })
        .collect();
    let total: f64 = out.iter().map(|x| x.2).sum();
    if (total - 1.0).abs() > 1e-10 {
        return Err(Error::Numerical(format!("Born probabilities sum to {total}")));
    }
    Ok(out)
}

fn sample<R: Rng + ?Sized>(rng: &mut R, probs: &[f64]) -> usize {
    let admissible = |p: f64| p >= MIN_OUTCOME_PROBABILITY;
    let total: f64 = probs.iter().copied().filter(|&p| admissible(p)).sum();
    let mut u = rng.random_range(0.0..total);
    let mut last = 0;
    for (k, &p) in probs.iter().enumerate() {
        if !admissible(p) {
            continue;
        }
        last = k;
        if u < p {
            return k;
        }
        u -= p;
    }
    last
}

/// Measures `f` on a pure state; the post-measurement state is the
/// normalized projection.
pub fn measure_pure<R: Rng + ?Sized>(
    f: &HermitianOperator,
    psi: &PureState,
    rng: &mut R,
) -> Result<Measurement<PureState>> {
    let outcomes = born(f, psi)?;
    let k = sample(rng, &outcomes.iter().map(|o| o.2).collect::<Vec<_>>());
    let (e, p, prob) = &outcomes[k];
    let post = PureState::normalized(p * psi.vector())?;
    Ok(Measurement {
        outcome: *e,
        probability: *prob,
        post_state: post,
        distribution: outcomes.iter().map(|o| (o.0, o.2)).collect(),
    })
}

/// Measures `f` on a density operator; the post-measurement state is
/// `ΠₖρΠₖ/pₖ`.
pub fn measure_density<R: Rng + ?Sized>(
    f: &HermitianOperator,
    rho: &DensityOperator,
    rng: &mut R,
) -> Result<Measurement<DensityOperator>> {
    let outcomes = born(f, rho)?;
    let k = sample(rng, &outcomes.iter().map(|o| o.2).collect::<Vec<_>>());
    let (e, p, prob) = &outcomes[k];
    let post = DensityOperator::from_dmatrix(p * rho.as_dmatrix() * p * real(1.0 / prob))?;
    Ok(Measurement {
        outcome: *e,
        probability: *prob,
        post_state: post,
        distribution: outcomes.iter().map(|o| (o.0, o.2)).collect(),
    })
}

/// Length of a trajectory together with its consistency residual.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CurveLength {
    pub value: f64,
    /// `max_t ‖ρ̇ − [Ĥ, ρ]/(iħ)‖_F` relative to `max(1, ‖[Ĥ, ρ]/ħ‖_F)`,
    /// with `ρ̇` from fourth-order differences.
    pub residual: f64,
}

/// `∫ √g(X_H, X_H) dt` along a von Neumann trajectory generated by `h`.
///
/// The integrand is `‖hor X_Ĥ‖_F = √(G(hor, hor)/(2ħ))` at a purification
/// of each sample, and the integral uses composite Simpson quadrature.
pub fn curve_length(curve: &Trajectory<DensityOperator>, h: &HermitianOperator, hbar: f64) -> Result<CurveLength> {
    let n = curve.len();
    if n < 5 {
        return Err(Error::InvalidCurve(format!("need at least 5 samples, got {n}")));
    }
    let t = &curve.times;
    let step = (t[n - 1] - t[0]) / (n - 1) as f64;
    if !(step > 0.0) || t.iter().enumerate().any(|(j, &s)| (s - t[0] - j as f64 * step).abs() > 1e-9 * step.max(1.0)) {
        return Err(Error::InvalidCurve("time grid must be uniform and increasing".into()));
    }
    if h.dim() != curve.states[0].dim() {
        return Err(Error::dims(curve.states[0].dim(), h.dim()));
    }
    let hm = h.as_dmatrix();
    let rhos: Vec<Mat> = curve.states.iter().map(|r| r.as_dmatrix().clone()).collect();
    let rates = grid::derivative(&rhos, step)?;
    let mut worst = 0.0f64;
    let mut scale = 1.0f64;
    for (rho, rate) in rhos.iter().zip(&rates) {
        let generated = (hm * rho - rho * hm) * (-I / hbar);
        scale = scale.max(generated.norm());
        worst = worst.max((rate - generated).norm());
    }
    let residual = worst / scale;
    if residual > CURVE_RESIDUAL_TOL {
        return Err(Error::InconsistentCurve { residual });
    }
    let speeds = curve
        .states
        .iter()
        .map(|rho| {
            let psi = purify(rho, DEFAULT_SPECTRAL_TOL)?;
            let x = hm * psi.as_dmatrix() * (-I / hbar);
            Ok(horizontal_raw(&psi, &x).norm())
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(CurveLength {
        value: grid::simpson(&speeds, step),
        residual,
    })
}

/// Settings of the dynamic-distance search.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchConfig {
    /// Number of constant-Hamiltonian segments.
    pub segments: usize,
    /// Number of local searches; the first starts at the zero Hamiltonian.
    pub restarts: usize,
    /// Iteration cap per local search.
    pub max_iter: u64,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            segments: 8,
            restarts: 16,
            max_iter: 4000,
            seed: 0,
        }
    }
}

/// `√(Tr(K²ρ) − Tr(Kρ)²)`.
fn spread(k: &Mat, rho: &Mat) -> f64 {
    let kr = k * rho;
    let mean = kr.trace().re;
    let sq = (k * &kr).trace().re;
    (sq - mean * mean).max(0.0).sqrt()
}

/// Real coordinates on traceless Hermitian matrices.
fn traceless_hermitian(n: usize, x: &[f64]) -> Mat {
    let mut m = Mat::zeros(n, n);
    let mut it = x.iter();
    for i in 0..n {
        for j in i + 1..n {
            let z = C64::new(*it.next().unwrap(), *it.next().unwrap());
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    for i in 0..n - 1 {
        let d = *it.next().unwrap();
        m[(i, i)] += real(d);
        m[(i + 1, i + 1)] -= real(d);
    }
    m
}

/// Real coordinates on block-diagonal skew-Hermitian matrices.
fn block_skew(blocks: &[std::ops::Range<usize>], n: usize, x: &[f64]) -> Mat {
    let mut m = Mat::zeros(n, n);
    let mut it = x.iter();
    for b in blocks {
        for i in b.clone() {
            m[(i, i)] = C64::new(0.0, *it.next().unwrap());
            for j in i + 1..b.end {
                let z = C64::new(*it.next().unwrap(), *it.next().unwrap());
                m[(i, j)] = z;
                m[(j, i)] = -z.conj();
            }
        }
    }
    m
}

struct Steering {
    n: usize,
    segments: usize,
    rho0: Mat,
    /// `A₀`, `B` ordered by decreasing eigenvalue, including the kernel.
    a0: Mat,
    b: Mat,
    blocks: Vec<std::ops::Range<usize>>,
}

impl Steering {
    fn free_len(&self) -> usize {
        (self.segments - 1) * (self.n * self.n - 1)
    }

    fn len(&self) -> usize {
        self.free_len() + self.blocks.iter().map(|b| b.len() * b.len()).sum::<usize>()
    }

    /// Segment generators `Kₖ = Hₖ Δt/ħ` for the parameter vector; the last
    /// one closes the path onto `ρ₁`.
    fn generators(&self, x: &[f64]) -> Result<(Vec<Mat>, Vec<Mat>)> {
        let per = self.n * self.n - 1;
        let mut ks = Vec::with_capacity(self.segments);
        let mut states = Vec::with_capacity(self.segments);
        let mut v = Mat::identity(self.n, self.n);
        let mut rho = self.rho0.clone();
        for chunk in x[..self.free_len()].chunks(per) {
            let k = traceless_hermitian(self.n, chunk);
            let step = expm_skew(&ComplexMatrix::wrap(&k * -I))?;
            states.push(rho.clone());
            rho = step.conjugate(&rho);
            v = step.as_dmatrix() * v;
            ks.push(k);
        }
        let eta = block_skew(&self.blocks, self.n, &x[self.free_len()..]);
        let d = expm_skew(&ComplexMatrix::wrap(eta))?;
        let w = &self.b * d.as_dmatrix() * self.a0.adjoint() * v.adjoint();
        let close = UnitaryOperator::wrap(w).log_hermitian();
        states.push(rho);
        ks.push(close.as_dmatrix().clone());
        Ok((ks, states))
    }

    fn cost(&self, x: &[f64]) -> Result<f64> {
        let (ks, states) = self.generators(x)?;
        Ok(ks.iter().zip(&states).map(|(k, r)| spread(k, r)).sum())
    }

    /// `‖U ρ₀ U† − ρ₁‖_F` for the composed path.
    fn endpoint_residual(&self, x: &[f64], rho1: &Mat) -> Result<f64> {
        let (ks, _) = self.generators(x)?;
        let mut rho = self.rho0.clone();
        for k in &ks {
            rho = expm_skew(&ComplexMatrix::wrap(k * -I))?.conjugate(&rho);
        }
        Ok((rho - rho1).norm())
    }
}

impl CostFunction for &Steering {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, x: &Self::Param) -> std::result::Result<f64, argmin::core::Error> {
        Steering::cost(self, x).map_err(|e| argmin::core::Error::msg(e.to_string()))
    }
}

/// Eigenbasis ordered by decreasing eigenvalue.
fn eigenbasis(rho: &DensityOperator) -> Mat {
    rho.eigen().vectors.as_dmatrix().clone()
}

fn local_search(problem: &Steering, start: Vec<f64>, steps: &[f64], max_iter: u64) -> Result<(Vec<f64>, f64, u64)> {
    let mut simplex = vec![start.clone()];
    for (i, s) in steps.iter().enumerate() {
        let mut v = start.clone();
        v[i] += s;
        simplex.push(v);
    }
    let solver = NelderMead::new(simplex)
        .with_sd_tolerance(1e-13)
        .map_err(|e| Error::Numerical(e.to_string()))?;
    let run = Executor::new(problem, solver)
        .configure(|s| s.max_iters(max_iter))
        .run()
        .map_err(|e| Error::Numerical(e.to_string()))?;
    let state = run.state();
    let best = state
        .get_best_param()
        .cloned()
        .ok_or_else(|| Error::Numerical("search returned no parameters".into()))?;
    Ok((best, state.get_best_cost(), state.get_iter()))
}

/// Upper-bound estimate of the dynamic distance between `ρ₀` and `ρ₁`.
///
/// Candidates are paths of `segments` constant Hamiltonians of equal
/// duration. All but the last are free; the last is the principal-log
/// generator of a unitary `B D A†` mapping the intermediate state onto `ρ₁`,
/// with the stabilizer element `D` searched as well. Every candidate
/// therefore steers `ρ₀` to `ρ₁` exactly, and the reported value is its cost
/// `(1/ħ)Σ ΔHₖ Δt`, which does not depend on `ħ`.
pub fn dynamic_distance(rho0: &DensityOperator, rho1: &DensityOperator, search: &SearchConfig) -> Result<DistanceReport> {
    if rho0.dim() != rho1.dim() {
        return Err(Error::dims(rho0.dim(), rho1.dim()));
    }
    if search.segments == 0 || search.restarts == 0 {
        return Err(Error::InvalidParameter("segments and restarts must be positive".into()));
    }
    let s0 = spectrum_of(rho0, DEFAULT_SPECTRAL_TOL)?;
    let s1 = spectrum_of(rho1, DEFAULT_SPECTRAL_TOL)?;
    if s0.multiplicities() != s1.multiplicities() || !s0.approx_eq(&s1, ORBIT_TOL) {
        return Err(Error::DifferentOrbits(format!(
            "spectra {:?} and {:?} differ; the distance is undefined in D(σ)",
            s0.values(),
            s1.values()
        )));
    }
    let n = rho0.dim();
    let mut blocks = s0.blocks();
    if s0.k_tot() < n {
        blocks.push(s0.k_tot()..n);
    }
    let problem = Steering {
        n,
        segments: search.segments,
        rho0: rho0.as_dmatrix().clone(),
        a0: eigenbasis(rho0),
        b: eigenbasis(rho1),
        blocks,
    };
    let dim = problem.len();
    let free = problem.free_len();
    let zero = vec![0.0; dim];
    let c0 = problem.cost(&zero)?;

    let mut best = (zero.clone(), c0);
    let mut iterations = 0u64;
    let mut costs = Vec::with_capacity(search.restarts);
    if c0 > 1e-14 {
        let seg_step = (0.25 * c0 / search.segments as f64).max(1e-4);
        let steps: Vec<f64> = (0..dim).map(|i| if i < free { seg_step } else { 0.3 }).collect();
        for r in 0..search.restarts {
            let start = if r == 0 {
                zero.clone()
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(search.seed);
                rng.set_stream(r as u64);
                (0..dim)
                    .map(|i| {
                        if i < free {
                            seg_step * rng.sample::<f64, _>(StandardNormal)
                        } else {
                            rng.random_range(-std::f64::consts::PI..std::f64::consts::PI)
                        }
                    })
                    .collect()
            };
            let (x, _, it1) = local_search(&problem, start, &steps, search.max_iter)?;
            // Restarting from the optimum refreshes a collapsed simplex.
            let small: Vec<f64> = steps.iter().map(|s| 0.1 * s).collect();
            let (x, c, it2) = local_search(&problem, x, &small, search.max_iter)?;
            iterations += it1 + it2;
            costs.push(c);
            if c < best.1 {
                best = (x, c);
            }
        }
    }
    let residual = problem.endpoint_residual(&best.0, rho1.as_dmatrix())?;
    let mut metadata = BTreeMap::new();
    metadata.insert("upper_bound".into(), json!(true));
    metadata.insert("segments".into(), json!(search.segments));
    metadata.insert("restarts".into(), json!(search.restarts));
    metadata.insert("seed".into(), json!(search.seed));
    metadata.insert("iterations".into(), json!(iterations));
    metadata.insert("initial_cost".into(), json!(c0));
    metadata.insert("endpoint_residual".into(), json!(residual));
    metadata.insert("restart_costs".into(), json!(costs));
    Ok(DistanceReport {
        value: best.1,
        method: DistanceMethod::Dynamic,
        metadata,
    })
}

/// Uhlmann fidelity `(Tr√(√ρ₀ ρ₁ √ρ₀))²`.
pub fn fidelity(rho0: &DensityOperator, rho1: &DensityOperator) -> Result<f64> {
    if rho0.dim() != rho1.dim() {
        return Err(Error::dims(rho0.dim(), rho1.dim()));
    }
    let s = psd_sqrt(rho0.operator());
    let inner = HermitianOperator::hermitize(&s * rho1.as_dmatrix() * &s);
    let root: f64 = hermitian_eig(&inner).values.iter().map(|v| v.max(0.0).sqrt()).sum();
    Ok((root * root).min(1.0))
}

/// `√(2(1 − √F))`.
pub fn bures(rho0: &DensityOperator, rho1: &DensityOperator) -> Result<f64> {
    Ok((2.0 * (1.0 - fidelity(rho0, rho1)?.sqrt())).max(0.0).sqrt())
}

/// Bures distance between qubit states via `F = Tr(ρ₀ρ₁) + 2√(det ρ₀ det ρ₁)`;
/// other dimensions use [`bures`].
pub fn bures_qubit(rho0: &DensityOperator, rho1: &DensityOperator) -> Result<DistanceReport> {
    if rho0.dim() != rho1.dim() {
        return Err(Error::dims(rho0.dim(), rho1.dim()));
    }
    let mut metadata = BTreeMap::new();
    let value = if rho0.dim() == 2 {
        let det = |m: &Mat| (m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]).re.max(0.0);
        let (a, b) = (rho0.as_dmatrix(), rho1.as_dmatrix());
        let f = ((a * b).trace().re + 2.0 * (det(a) * det(b)).sqrt()).min(1.0);
        metadata.insert("fidelity".into(), json!(f));
        (2.0 * (1.0 - f.sqrt())).max(0.0).sqrt()
    } else {
        metadata.insert("general_path".into(), json!(true));
        bures(rho0, rho1)?
    };
    Ok(DistanceReport {
        value,
        method: DistanceMethod::BuresQubit,
        metadata,
    })
}

/// `((λ₁−λ₂)/√2)|sin ε|√(2 + (λ₁−λ₂)² sin²ε/(2λ₁λ₂))` for the rotated qubit
/// family `ρ(ε) = R(ε) diag(λ₁, λ₂) R(ε)†`. At `λ₁ = λ₂` the prefactor
/// vanishes and the value is 0.
pub fn bures_closed_form(l1: f64, l2: f64, eps: f64) -> f64 {
    let d = l1 - l2;
    if d == 0.0 {
        return 0.0;
    }
    let s = eps.sin();
    d / 2f64.sqrt() * s.abs() * (2.0 + d * d * s * s / (2.0 * l1 * l2)).sqrt()
}

/// The qubit pair `(diag(λ₁, λ₂), R diag(λ₁, λ₂) R†)` with `R = exp(−iεσ₂)`.
pub fn rotated_qubit_pair(l1: f64, l2: f64, eps: f64) -> Result<(DensityOperator, DensityOperator)> {
    let rho0 = DensityOperator::from_diagonal(&[l1, l2])?;
    let (c, s) = (eps.cos(), eps.sin());
    let r = Mat::from_row_slice(2, 2, &[real(c), real(-s), real(s), real(c)]);
    let rho1 = DensityOperator::from_dmatrix(&r * rho0.as_dmatrix() * r.adjoint())?;
    Ok((rho0, rho1))
}

/// `δ₀(ρ) = Tr(ρ₀ρ)`.
pub fn mixed_probability(rho0: &DensityOperator, rho: &DensityOperator) -> Result<f64> {
    if rho0.dim() != rho.dim() {
        return Err(Error::dims(rho0.dim(), rho.dim()));
    }
    Ok(rho.expect_matrix(rho0.as_dmatrix()).re)
}

/// `Tr(ρ₀ρ)` next to `cos²(κ/√(2ħ))` with `κ` the dynamic distance.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbabilityDiagnostic {
    pub trace_value: f64,
    /// `None` when the states lie on different orbits.
    pub cos2_value: Option<f64>,
    pub kappa: Option<f64>,
}

/// Empirical comparison of `Tr(ρ₀ρ)` with the cosine-squared law. Nothing
/// is asserted about their agreement.
pub fn mixed_probability_diagnostic(
    rho0: &DensityOperator,
    rho: &DensityOperator,
    search: &SearchConfig,
    hbar: f64,
) -> Result<ProbabilityDiagnostic> {
    let trace_value = mixed_probability(rho0, rho)?;
    let kappa = match dynamic_distance(rho0, rho, search) {
        Ok(r) => Some(r.value),
        Err(Error::DifferentOrbits(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(ProbabilityDiagnostic {
        trace_value,
        cos2_value: kappa.map(|k| (k / (2.0 * hbar).sqrt()).cos().powi(2)),
        kappa,
    })
}
