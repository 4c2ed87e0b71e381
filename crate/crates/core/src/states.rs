//! Pure states, density operators, spectra, purifications and Bloch vectors.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linops::{
    hermitian_eig, pauli, real, CVector, ComplexMatrix, Eigen, HermitianOperator, Mat,
    UnitaryOperator, C64,
};

/// Norm tolerance for pure states.
pub const NORM_TOL: f64 = 1e-12;
/// Tolerance on `Tr ρ = 1` and on negative eigenvalues of `ρ`.
pub const DENSITY_TOL: f64 = 1e-12;
/// Tolerance on `Σ mᵢλᵢ = 1`.
pub const SPECTRUM_SUM_TOL: f64 = 1e-10;
/// Tolerance on `ψ†ψ = P(σ)`.
pub const PURIFICATION_TOL: f64 = 1e-10;
/// Default absolute tolerance for clustering eigenvalues.
pub const DEFAULT_SPECTRAL_TOL: f64 = 1e-10;

/// Anything with a density matrix: expectation values and variances are
/// written once against this trait.
pub trait QuantumState {
    fn dim(&self) -> usize;

    /// `Tr(Aρ)`, or `⟨ψ|Aψ⟩` for a pure state.
    fn expect_matrix(&self, a: &Mat) -> C64;

    fn density_matrix(&self) -> Mat;
}

/// Unit vector in `C^n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PureRepr", into = "PureRepr")]
pub struct PureState {
    vector: CVector,
}

#[derive(Serialize, Deserialize)]
struct PureRepr {
    vector: Vec<C64>,
}

impl TryFrom<PureRepr> for PureState {
    type Error = Error;
    fn try_from(r: PureRepr) -> Result<Self> {
        PureState::new(CVector::from_vec(r.vector))
    }
}

impl From<PureState> for PureRepr {
    fn from(p: PureState) -> Self {
        PureRepr {
            vector: p.vector.iter().copied().collect(),
        }
    }
}

impl PureState {
    pub fn new(vector: CVector) -> Result<Self> {
        if vector.is_empty() {
            return Err(Error::Empty);
        }
        if !vector.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let norm = vector.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(PureState { vector })
    }

    /// Scales a nonzero vector to unit norm.
    pub fn normalized(vector: CVector) -> Result<Self> {
        let norm = vector.norm();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::NotNormalized { norm });
        }
        Self::new(vector / real(norm))
    }

    pub fn from_slice(v: &[C64]) -> Result<Self> {
        Self::new(CVector::from_column_slice(v))
    }

    /// Computational basis vector `e_k` of `C^n`.
    pub fn basis(n: usize, k: usize) -> Self {
        let mut v = CVector::zeros(n);
        v[k] = real(1.0);
        PureState { vector: v }
    }

    pub(crate) fn wrap(vector: CVector) -> Self {
        PureState { vector }
    }

    pub fn vector(&self) -> &CVector {
        &self.vector
    }

    pub fn dim(&self) -> usize {
        self.vector.len()
    }

    /// `e^{iφ}ψ`.
    pub fn with_phase(&self, phi: f64) -> Self {
        PureState {
            vector: &self.vector * C64::from_polar(1.0, phi),
        }
    }

    pub fn overlap(&self, other: &PureState) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(Error::dims(self.dim(), other.dim()));
        }
        Ok(self.vector.dotc(&other.vector))
    }

    /// The purification of `|ψ⟩⟨ψ|` with `σ = (1;1)`.
    pub fn as_purification(&self) -> Purification {
        let m = Mat::from_column_slice(self.dim(), 1, self.vector.as_slice());
        Purification {
            map: ComplexMatrix::wrap(m),
            sigma: Spectrum::pure(),
        }
    }
}

impl QuantumState for PureState {
    fn dim(&self) -> usize {
        self.vector.len()
    }

    fn expect_matrix(&self, a: &Mat) -> C64 {
        self.vector.dotc(&(a * &self.vector))
    }

    fn density_matrix(&self) -> Mat {
        &self.vector * self.vector.adjoint()
    }
}

/// Hermitian, positive, unit-trace operator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DensityRepr", into = "DensityRepr")]
pub struct DensityOperator {
    op: HermitianOperator,
}

#[derive(Serialize, Deserialize)]
struct DensityRepr {
    matrix: Vec<Vec<C64>>,
}

impl TryFrom<DensityRepr> for DensityOperator {
    type Error = Error;
    fn try_from(r: DensityRepr) -> Result<Self> {
        DensityOperator::from_dmatrix(rows_to_matrix(&r.matrix)?)
    }
}

impl From<DensityOperator> for DensityRepr {
    fn from(d: DensityOperator) -> Self {
        DensityRepr {
            matrix: matrix_to_rows(d.as_dmatrix()),
        }
    }
}

pub(crate) fn rows_to_matrix(rows: &[Vec<C64>]) -> Result<Mat> {
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    if n == 0 || m == 0 {
        return Err(Error::Empty);
    }
    if let Some(bad) = rows.iter().find(|r| r.len() != m) {
        return Err(Error::dims(m, bad.len()));
    }
    let flat: Vec<C64> = rows.iter().flatten().copied().collect();
    Ok(Mat::from_row_slice(n, m, &flat))
}

pub(crate) fn matrix_to_rows(m: &Mat) -> Vec<Vec<C64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

impl DensityOperator {
    pub fn new(op: HermitianOperator) -> Result<Self> {
        let tr = op.trace();
        if (tr - 1.0).abs() > DENSITY_TOL {
            return Err(Error::InvalidDensity(format!("trace {tr} ≠ 1")));
        }
        let min = *hermitian_eig(&op).values.last().unwrap();
        if min < -DENSITY_TOL {
            return Err(Error::InvalidDensity(format!(
                "negative eigenvalue {min:e}"
            )));
        }
        Ok(DensityOperator { op })
    }

    pub fn from_dmatrix(m: Mat) -> Result<Self> {
        Self::new(HermitianOperator::from_dmatrix(m)?)
    }

    /// Skips validation; for matrices that are densities by construction.
    pub(crate) fn wrap(m: Mat) -> Self {
        DensityOperator {
            op: HermitianOperator::hermitize(m),
        }
    }

    pub fn from_diagonal(d: &[f64]) -> Result<Self> {
        Self::new(HermitianOperator::from_real_diagonal(d)?)
    }

    pub fn maximally_mixed(n: usize) -> Self {
        DensityOperator::wrap(Mat::identity(n, n) * real(1.0 / n as f64))
    }

    pub fn operator(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn as_dmatrix(&self) -> &Mat {
        self.op.as_dmatrix()
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn eigen(&self) -> Eigen {
        hermitian_eig(&self.op)
    }

    /// `UρU†`.
    pub fn conjugated(&self, u: &UnitaryOperator) -> Result<Self> {
        if u.dim() != self.dim() {
            return Err(Error::dims(self.dim(), u.dim()));
        }
        Ok(DensityOperator::wrap(u.conjugate(self.as_dmatrix())))
    }

    pub fn purity(&self) -> f64 {
        crate::linops::frob_inner(self.as_dmatrix(), self.as_dmatrix()).re
    }
}

impl QuantumState for DensityOperator {
    fn dim(&self) -> usize {
        self.op.dim()
    }

    fn expect_matrix(&self, a: &Mat) -> C64 {
        // Tr(Aρ) = Σ_ij A_ij ρ_ji
        let r = self.as_dmatrix();
        let n = r.nrows();
        let mut s = C64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                s += a[(i, j)] * r[(j, i)];
            }
        }
        s
    }

    fn density_matrix(&self) -> Mat {
        self.as_dmatrix().clone()
    }
}

/// Distinct descending eigenvalues with multiplicities, support only.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpectrumRepr", into = "SpectrumRepr")]
pub struct Spectrum {
    values: Vec<f64>,
    multiplicities: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct SpectrumRepr {
    values: Vec<f64>,
    multiplicities: Vec<usize>,
}

impl TryFrom<SpectrumRepr> for Spectrum {
    type Error = Error;
    fn try_from(r: SpectrumRepr) -> Result<Self> {
        Spectrum::new(r.values, r.multiplicities)
    }
}

impl From<Spectrum> for SpectrumRepr {
    fn from(s: Spectrum) -> Self {
        SpectrumRepr {
            values: s.values,
            multiplicities: s.multiplicities,
        }
    }
}

impl Spectrum {
    pub fn new(values: Vec<f64>, multiplicities: Vec<usize>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidSpectrum("no eigenvalues".into()));
        }
        if values.len() != multiplicities.len() {
            return Err(Error::dims(values.len(), multiplicities.len()));
        }
        if multiplicities.contains(&0) {
            return Err(Error::InvalidSpectrum("zero multiplicity".into()));
        }
        if !values.iter().all(|x| x.is_finite() && *x > 0.0) {
            return Err(Error::InvalidSpectrum(
                "eigenvalues must be positive".into(),
            ));
        }
        if values.windows(2).any(|w| w[0] <= w[1]) {
            return Err(Error::InvalidSpectrum(
                "eigenvalues must be strictly decreasing".into(),
            ));
        }
        let s: f64 = values
            .iter()
            .zip(&multiplicities)
            .map(|(l, &m)| l * m as f64)
            .sum();
        if (s - 1.0).abs() > SPECTRUM_SUM_TOL {
            return Err(Error::InvalidSpectrum(format!("Σ mᵢλᵢ = {s} ≠ 1")));
        }
        Ok(Spectrum {
            values,
            multiplicities,
        })
    }

    pub fn pure() -> Self {
        Spectrum {
            values: vec![1.0],
            multiplicities: vec![1],
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn multiplicities(&self) -> &[usize] {
        &self.multiplicities
    }

    /// Number of distinct eigenvalues.
    pub fn k(&self) -> usize {
        self.values.len()
    }

    /// `Σ mᵢ`, the dimension of `K`.
    pub fn k_tot(&self) -> usize {
        self.multiplicities.iter().sum()
    }

    pub fn is_pure(&self) -> bool {
        self.k_tot() == 1
    }

    /// Index ranges of the blocks `Πⱼ`.
    pub fn blocks(&self) -> Vec<std::ops::Range<usize>> {
        let mut start = 0;
        self.multiplicities
            .iter()
            .map(|&m| {
                let r = start..start + m;
                start += m;
                r
            })
            .collect()
    }

    /// Diagonal of `P(σ)`.
    pub fn diagonal(&self) -> Vec<f64> {
        self.values
            .iter()
            .zip(&self.multiplicities)
            .flat_map(|(&l, &m)| std::iter::repeat_n(l, m))
            .collect()
    }

    /// Same multiplicities and eigenvalues within `tol`.
    pub fn approx_eq(&self, other: &Spectrum, tol: f64) -> bool {
        self.multiplicities == other.multiplicities
            && self
                .values
                .iter()
                .zip(&other.values)
                .all(|(a, b)| (a - b).abs() <= tol)
    }
}

/// Clusters the eigenvalues of `ρ` into a spectrum.
///
/// Adjacent eigenvalues closer than `tol` are merged. A chain of merges whose
/// total span exceeds `tol` has no consistent reading and is rejected.
pub fn spectrum_of(rho: &DensityOperator, tol: f64) -> Result<Spectrum> {
    Ok(cluster(&rho.eigen().values, tol)?.0)
}

/// Clusters descending eigenvalues; also returns how many were kept.
pub(crate) fn cluster(eigs: &[f64], tol: f64) -> Result<(Spectrum, usize)> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidParameter(format!("spectral tolerance {tol}")));
    }
    let support: Vec<f64> = eigs.iter().copied().filter(|&x| x >= tol).collect();
    if support.is_empty() {
        return Err(Error::InvalidSpectrum("empty support".into()));
    }
    let mut groups: Vec<Vec<f64>> = vec![vec![support[0]]];
    for w in support.windows(2) {
        let group = groups.last_mut().unwrap();
        if w[0] - w[1] <= tol {
            if group[0] - w[1] > tol {
                return Err(Error::ClusteringAmbiguity {
                    first: group[0],
                    second: w[1],
                    tol,
                });
            }
            group.push(w[1]);
        } else {
            groups.push(vec![w[1]]);
        }
    }
    let mut values: Vec<f64> = groups
        .iter()
        .map(|g| g.iter().sum::<f64>() / g.len() as f64)
        .collect();
    let multiplicities: Vec<usize> = groups.iter().map(Vec::len).collect();
    let s: f64 = values
        .iter()
        .zip(&multiplicities)
        .map(|(l, &m)| l * m as f64)
        .sum();
    if (s - 1.0).abs() > SPECTRUM_SUM_TOL {
        return Err(Error::InvalidSpectrum(format!(
            "support weight {s} differs from 1 beyond {SPECTRUM_SUM_TOL:e}"
        )));
    }
    for v in &mut values {
        *v /= s;
    }
    let kept = support.len();
    Ok((
        Spectrum {
            values,
            multiplicities,
        },
        kept,
    ))
}

/// The reference operator `P(σ)`.
pub fn p_sigma(sigma: &Spectrum) -> HermitianOperator {
    HermitianOperator::from_real_diagonal(&sigma.diagonal()).expect("spectrum values are finite")
}

/// A point of `S(σ)`: `ψ: K → H` with `ψ†ψ = P(σ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Purification {
    map: ComplexMatrix,
    sigma: Spectrum,
}

impl Purification {
    pub fn new(map: ComplexMatrix, sigma: Spectrum) -> Result<Self> {
        if map.cols() != sigma.k_tot() {
            return Err(Error::dims(
                format!("{} columns", sigma.k_tot()),
                format!("{} columns", map.cols()),
            ));
        }
        if map.rows() < map.cols() {
            return Err(Error::dims(
                format!("at least {} rows", map.cols()),
                map.rows(),
            ));
        }
        let p = Mat::from_diagonal(&CVector::from_iterator(
            sigma.k_tot(),
            sigma.diagonal().into_iter().map(real),
        ));
        let defect = (map.adjoint() * &*map - p).norm();
        if defect > PURIFICATION_TOL {
            return Err(Error::NotPurification { defect });
        }
        Ok(Purification { map, sigma })
    }

    pub(crate) fn wrap(map: Mat, sigma: Spectrum) -> Self {
        Purification {
            map: ComplexMatrix::wrap(map),
            sigma,
        }
    }

    pub fn map(&self) -> &ComplexMatrix {
        &self.map
    }

    pub fn as_dmatrix(&self) -> &Mat {
        &self.map
    }

    pub fn sigma(&self) -> &Spectrum {
        &self.sigma
    }

    /// Dimension of `H`.
    pub fn dim(&self) -> usize {
        self.map.rows()
    }

    pub fn k_tot(&self) -> usize {
        self.map.cols()
    }

    /// Right action `ψ ↦ ψV` of the gauge group `U(σ)`.
    pub fn gauge(&self, v: &UnitaryOperator) -> Result<Self> {
        if v.dim() != self.k_tot() {
            return Err(Error::dims(self.k_tot(), v.dim()));
        }
        let p = p_sigma(&self.sigma);
        let defect = (v.as_dmatrix() * p.as_dmatrix() - p.as_dmatrix() * v.as_dmatrix()).norm();
        if defect > PURIFICATION_TOL {
            return Err(Error::NotGaugeElement(format!(
                "‖VP − PV‖ = {defect:e}"
            )));
        }
        Ok(Purification::wrap(&*self.map * v.as_dmatrix(), self.sigma.clone()))
    }

    /// Left action `ψ ↦ Uψ` of `U(H)`, moving along the orbit.
    pub fn transform(&self, u: &UnitaryOperator) -> Result<Self> {
        if u.dim() != self.dim() {
            return Err(Error::dims(self.dim(), u.dim()));
        }
        Ok(Purification::wrap(u.as_dmatrix() * &*self.map, self.sigma.clone()))
    }
}

/// Canonical purification from the eigendecomposition of `ρ`, columns ordered
/// by descending eigenvalue.
pub fn purify(rho: &DensityOperator, tol: f64) -> Result<Purification> {
    let eig = rho.eigen();
    let (sigma, kept) = cluster(&eig.values, tol)?;
    let v = eig.vectors.as_dmatrix();
    let diag = sigma.diagonal();
    let mut map = Mat::zeros(rho.dim(), kept);
    for (j, lam) in diag.iter().enumerate() {
        map.set_column(j, &(v.column(j) * real(lam.sqrt())));
    }
    Ok(Purification::wrap(map, sigma))
}

/// `ψψ†`.
pub fn reduce(psi: &Purification) -> DensityOperator {
    DensityOperator::wrap(&*psi.map * psi.map.adjoint())
}

/// `|ψ⟩⟨ψ|`.
pub fn projector(p: &PureState) -> DensityOperator {
    DensityOperator::wrap(p.density_matrix())
}

/// Point of the closed unit ball in `R³`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
}

impl BlochVector {
    pub fn new(x1: f64, x2: f64, x3: f64) -> Result<Self> {
        let b = BlochVector { x1, x2, x3 };
        let norm_sq = b.norm_sq();
        if !(norm_sq <= 1.0 + 1e-12) {
            return Err(Error::InvalidBloch { norm_sq });
        }
        Ok(b)
    }

    pub fn norm_sq(&self) -> f64 {
        self.x1 * self.x1 + self.x2 * self.x2 + self.x3 * self.x3
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.x1, self.x2, self.x3]
    }
}

fn bloch_from(state: &impl QuantumState) -> Result<BlochVector> {
    if state.dim() != 2 {
        return Err(Error::dims(2, state.dim()));
    }
    let [x1, x2, x3] = pauli::all().map(|s| state.expect_matrix(s.as_dmatrix()).re);
    BlochVector::new(x1, x2, x3)
}

/// `xᵢ = ⟨ψ|σᵢ|ψ⟩`.
pub fn bloch_coords(p: &PureState) -> Result<BlochVector> {
    bloch_from(p)
}

/// `xᵢ = Tr(ρσᵢ)` for a qubit density operator.
pub fn bloch_of_density(rho: &DensityOperator) -> Result<BlochVector> {
    bloch_from(rho)
}

/// `ρ = (I + Σ xᵢσᵢ)/2`.
pub fn density_from_bloch(b: &BlochVector) -> DensityOperator {
    let [sx, sy, sz] = pauli::all();
    let m = Mat::identity(2, 2)
        + sx.as_dmatrix() * real(b.x1)
        + sy.as_dmatrix() * real(b.x2)
        + sz.as_dmatrix() * real(b.x3);
    DensityOperator::wrap(m * real(0.5))
}
