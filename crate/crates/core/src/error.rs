use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("empty matrix: rows and cols must be at least 1")]
    Empty,

    #[error("operator is not Hermitian (‖M − M†‖ = {defect:e})")]
    NotHermitian { defect: f64 },

    #[error("operator is not skew-Hermitian (‖S + S†‖ = {defect:e})")]
    NotSkewHermitian { defect: f64 },

    #[error("operator is not unitary (‖U†U − I‖ = {defect:e})")]
    NotUnitary { defect: f64 },

    #[error("state vector is not normalized (‖ψ‖ = {norm})")]
    NotNormalized { norm: f64 },

    #[error("invalid density operator: {0}")]
    InvalidDensity(String),

    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),

    #[error("ambiguous eigenvalue clustering between {first} and {second} at tolerance {tol:e}")]
    ClusteringAmbiguity { first: f64, second: f64, tol: f64 },

    #[error("Bloch vector outside the unit ball (‖x‖² = {norm_sq})")]
    InvalidBloch { norm_sq: f64 },

    #[error("purification violates ψ†ψ = P(σ) (defect {defect:e})")]
    NotPurification { defect: f64 },

    #[error("vector is not tangent to S(σ) (‖X†ψ + ψ†X‖ = {defect:e})")]
    NotTangent { defect: f64 },

    #[error("not an element of u(σ): {0}")]
    NotGaugeElement(String),

    #[error("spectra differ: {0}")]
    SpectrumMismatch(String),

    #[error("step size too large: per-step rotation {rotation:.3e} exceeds {limit}")]
    StepSize { rotation: f64, limit: f64 },

    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    #[error("geometric phase undefined: |Tr| = {magnitude:e}")]
    UndefinedPhase { magnitude: f64 },

    #[error("base curve is not closed (endpoint defect {defect:e})")]
    OpenCurve { defect: f64 },

    #[error("different orbits: distance undefined in D(σ) ({0})")]
    DifferentOrbits(String),

    #[error("curve is not generated by the given Hamiltonian (residual {residual:e})")]
    InconsistentCurve { residual: f64 },

    #[error("normalization audit failed for {identity}: defect {defect:e}")]
    NormalizationAudit { identity: &'static str, defect: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    pub(crate) fn dims(expected: impl ToString, found: impl ToString) -> Self {
        Error::DimensionMismatch {
            expected: expected.to_string(),
            found: found.to_string(),
        }
    }
}
