//! Dense complex linear algebra on small matrices.
//!
//! [`ComplexMatrix`] wraps a `nalgebra` matrix and guarantees a non-empty shape
//! with finite entries. [`HermitianOperator`] and [`UnitaryOperator`] add the
//! corresponding structural checks. Exponentials are only ever taken of
//! skew-Hermitian matrices and go through the Hermitian eigendecomposition, so
//! the result is unitary to eigensolver precision.

use std::fmt;
use std::ops::Deref;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CVector = DVector<C64>;
pub type Mat = DMatrix<C64>;

pub const I: C64 = C64::new(0.0, 1.0);

#[cfg(test)]
pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub(crate) fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Relative tolerance used for Hermiticity and skewness checks.
pub const STRUCTURE_TOL: f64 = 1e-12;
/// Tolerance on `‖U†U − I‖_F`.
pub const UNITARY_TOL: f64 = 1e-10;

/// Dense complex matrix with at least one row and column and finite entries.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix(Mat);

impl ComplexMatrix {
    /// Builds a matrix from row-major entries.
    pub fn new(rows: usize, cols: usize, entries: &[C64]) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Empty);
        }
        if entries.len() != rows * cols {
            return Err(Error::dims(rows * cols, entries.len()));
        }
        Self::from_dmatrix(Mat::from_row_slice(rows, cols, entries))
    }

    pub fn from_dmatrix(m: Mat) -> Result<Self> {
        if m.nrows() == 0 || m.ncols() == 0 {
            return Err(Error::Empty);
        }
        if !m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(ComplexMatrix(m))
    }

    /// Wraps a matrix produced by arithmetic on already validated values.
    pub(crate) fn wrap(m: Mat) -> Self {
        debug_assert!(m.nrows() > 0 && m.ncols() > 0);
        ComplexMatrix(m)
    }

    pub fn from_real_diagonal(d: &[f64]) -> Result<Self> {
        let v = CVector::from_iterator(d.len(), d.iter().map(|&x| real(x)));
        Self::from_dmatrix(Mat::from_diagonal(&v))
    }

    pub fn column(v: &CVector) -> Result<Self> {
        Self::from_dmatrix(Mat::from_column_slice(v.len(), 1, v.as_slice()))
    }

    pub fn identity(n: usize) -> Self {
        ComplexMatrix(Mat::identity(n, n))
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix(Mat::zeros(rows, cols))
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.0.is_square()
    }

    pub fn as_dmatrix(&self) -> &Mat {
        &self.0
    }

    pub fn into_dmatrix(self) -> Mat {
        self.0
    }

    /// Row-major copy of the entries.
    pub fn entries(&self) -> Vec<C64> {
        self.0.transpose().as_slice().to_vec()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    pub fn scale(&self, s: C64) -> Self {
        ComplexMatrix(&self.0 * s)
    }

    pub fn mul(&self, other: &ComplexMatrix) -> Result<Self> {
        if self.cols() != other.rows() {
            return Err(Error::dims(
                format!("{} rows", self.cols()),
                format!("{} rows", other.rows()),
            ));
        }
        Ok(ComplexMatrix(&self.0 * &other.0))
    }

    pub fn add(&self, other: &ComplexMatrix) -> Result<Self> {
        same_shape(self, other)?;
        Ok(ComplexMatrix(&self.0 + &other.0))
    }

    pub fn sub(&self, other: &ComplexMatrix) -> Result<Self> {
        same_shape(self, other)?;
        Ok(ComplexMatrix(&self.0 - &other.0))
    }
}

impl Deref for ComplexMatrix {
    type Target = Mat;
    fn deref(&self) -> &Mat {
        &self.0
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComplexMatrix{}", self.0)
    }
}

impl TryFrom<Mat> for ComplexMatrix {
    type Error = Error;
    fn try_from(m: Mat) -> Result<Self> {
        Self::from_dmatrix(m)
    }
}

fn shape(m: &Mat) -> String {
    format!("{}x{}", m.nrows(), m.ncols())
}

fn same_shape(a: &Mat, b: &Mat) -> Result<()> {
    if a.shape() != b.shape() {
        return Err(Error::dims(shape(a), shape(b)));
    }
    Ok(())
}

fn same_square(a: &Mat, b: &Mat) -> Result<()> {
    if !a.is_square() {
        return Err(Error::dims("square matrix", shape(a)));
    }
    same_shape(a, b)
}

pub(crate) fn hermiticity_defect(m: &Mat) -> f64 {
    (m - m.adjoint()).norm()
}

pub(crate) fn skewness_defect(m: &Mat) -> f64 {
    (m + m.adjoint()).norm()
}

pub(crate) fn unitarity_defect(m: &Mat) -> f64 {
    (m.adjoint() * m - Mat::identity(m.ncols(), m.ncols())).norm()
}

fn structure_bound(m: &Mat) -> f64 {
    STRUCTURE_TOL * m.norm().max(1.0)
}

/// Hermitian operator; the stored matrix is exactly Hermitian.
#[derive(Clone, PartialEq)]
pub struct HermitianOperator(ComplexMatrix);

impl HermitianOperator {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::dims("square matrix", shape(&m)));
        }
        let defect = hermiticity_defect(&m);
        if defect > structure_bound(&m) {
            return Err(Error::NotHermitian { defect });
        }
        Ok(Self::hermitize(m.into_dmatrix()))
    }

    pub fn from_dmatrix(m: Mat) -> Result<Self> {
        Self::new(ComplexMatrix::from_dmatrix(m)?)
    }

    /// Symmetrizes `m` without checking how far it was from Hermitian.
    pub(crate) fn hermitize(m: Mat) -> Self {
        let h = (&m + m.adjoint()) * real(0.5);
        HermitianOperator(ComplexMatrix::wrap(h))
    }

    pub fn from_real_diagonal(d: &[f64]) -> Result<Self> {
        Ok(HermitianOperator(ComplexMatrix::from_real_diagonal(d)?))
    }

    pub fn zeros(n: usize) -> Self {
        HermitianOperator(ComplexMatrix::zeros(n, n))
    }

    pub fn identity(n: usize) -> Self {
        HermitianOperator(ComplexMatrix::identity(n))
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn as_dmatrix(&self) -> &Mat {
        &self.0
    }

    pub fn scaled(&self, s: f64) -> Self {
        HermitianOperator(self.0.scale(real(s)))
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    pub fn eig(&self) -> Eigen {
        hermitian_eig(self)
    }
}

impl fmt::Debug for HermitianOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HermitianOperator{}", self.0 .0)
    }
}

/// Unitary operator, `‖U†U − I‖_F ≤ 1e-10`.
#[derive(Clone, PartialEq)]
pub struct UnitaryOperator(ComplexMatrix);

impl UnitaryOperator {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::dims("square matrix", shape(&m)));
        }
        let defect = unitarity_defect(&m);
        if defect > UNITARY_TOL {
            return Err(Error::NotUnitary { defect });
        }
        Ok(UnitaryOperator(m))
    }

    pub fn from_dmatrix(m: Mat) -> Result<Self> {
        Self::new(ComplexMatrix::from_dmatrix(m)?)
    }

    pub(crate) fn wrap(m: Mat) -> Self {
        UnitaryOperator(ComplexMatrix::wrap(m))
    }

    pub fn identity(n: usize) -> Self {
        UnitaryOperator(ComplexMatrix::identity(n))
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn as_dmatrix(&self) -> &Mat {
        &self.0
    }

    pub fn dagger(&self) -> Self {
        UnitaryOperator(dagger(&self.0))
    }

    pub fn compose(&self, other: &UnitaryOperator) -> Result<Self> {
        Ok(UnitaryOperator(self.0.mul(&other.0)?))
    }

    /// Conjugates `m` as `U m U†`.
    pub fn conjugate(&self, m: &Mat) -> Mat {
        &self.0 .0 * m * self.0.adjoint()
    }

    /// Hermitian `K` with eigenvalues in `[−π, π)` such that `U = exp(−iK)`.
    pub fn log_hermitian(&self) -> HermitianOperator {
        let (q, t) = nalgebra::Schur::new(self.0 .0.clone()).unpack();
        let n = self.dim();
        let phases = CVector::from_iterator(n, (0..n).map(|j| real(-t[(j, j)].arg())));
        HermitianOperator::hermitize(&q * Mat::from_diagonal(&phases) * q.adjoint())
    }
}

impl fmt::Debug for UnitaryOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "UnitaryOperator{}", self.0 .0)
    }
}

/// Conjugate transpose.
pub fn dagger(m: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix(m.adjoint())
}

/// `ab − ba`.
pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    same_square(a, b)?;
    Ok(ComplexMatrix(&a.0 * &b.0 - &b.0 * &a.0))
}

/// `ab + ba`.
pub fn anticommutator(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    same_square(a, b)?;
    Ok(ComplexMatrix(&a.0 * &b.0 + &b.0 * &a.0))
}

/// `Tr(a†b + b†a)`.
pub fn frobenius_real(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    same_shape(a, b)?;
    Ok(frob_real(a, b))
}

pub(crate) fn frob_real(a: &Mat, b: &Mat) -> f64 {
    let z: C64 = a
        .iter()
        .zip(b.iter())
        .map(|(x, y)| x.conj() * y + y.conj() * x)
        .sum();
    debug_assert!(z.im.abs() <= 1e-12 * (1.0 + z.re.abs()));
    z.re
}

/// `Tr(a†b)` without forming the product.
pub(crate) fn frob_inner(a: &Mat, b: &Mat) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// Eigendecomposition `H = V diag(λ) V†` with `λ` descending.
#[derive(Clone, Debug)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: UnitaryOperator,
}

impl Eigen {
    /// `V diag(f(λ)) V†`.
    pub fn map<F: Fn(f64) -> C64>(&self, f: F) -> Mat {
        let v = self.vectors.as_dmatrix();
        let d = CVector::from_iterator(self.values.len(), self.values.iter().map(|&x| f(x)));
        let mut vd = v.clone();
        for (j, mut col) in vd.column_iter_mut().enumerate() {
            col *= d[j];
        }
        vd * v.adjoint()
    }

    /// `exp(−i s H)`.
    pub fn propagator(&self, s: f64) -> UnitaryOperator {
        UnitaryOperator::wrap(self.map(|x| C64::from_polar(1.0, -s * x)))
    }

    pub fn reconstruct(&self) -> Mat {
        self.map(real)
    }
}

/// Hermitian eigendecomposition, eigenvalues descending with ties kept in
/// solver order, each eigenvector scaled so its largest entry is real positive.
pub fn hermitian_eig(h: &HermitianOperator) -> Eigen {
    let se = h.as_dmatrix().clone().symmetric_eigen();
    let n = h.dim();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[b].total_cmp(&se.eigenvalues[a]));
    let values = order.iter().map(|&j| se.eigenvalues[j]).collect();
    let mut vectors = Mat::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let col = se.eigenvectors.column(src);
        let mut pivot = 0;
        for i in 1..n {
            if col[i].norm() > col[pivot].norm() * (1.0 + 1e-10) {
                pivot = i;
            }
        }
        let phase = col[pivot].conj() / col[pivot].norm();
        vectors.set_column(dst, &(col * phase));
    }
    Eigen {
        values,
        vectors: UnitaryOperator::wrap(vectors),
    }
}

/// Exponential of a skew-Hermitian matrix.
pub fn expm_skew(s: &ComplexMatrix) -> Result<UnitaryOperator> {
    if !s.is_square() {
        return Err(Error::dims("square matrix", shape(s)));
    }
    let defect = skewness_defect(s);
    if defect > structure_bound(s) {
        return Err(Error::NotSkewHermitian { defect });
    }
    // s = −iH with H = is Hermitian, so exp(s) = exp(−iH).
    let h = HermitianOperator::hermitize(&s.0 * I);
    Ok(hermitian_eig(&h).propagator(1.0))
}

/// Square root of a positive semidefinite Hermitian matrix; tiny negative
/// eigenvalues from rounding are clamped.
pub(crate) fn psd_sqrt(h: &HermitianOperator) -> Mat {
    hermitian_eig(h).map(|x| real(x.max(0.0).sqrt()))
}

/// Pauli matrices and spin helpers.
pub mod pauli {
    use super::*;

    pub fn sigma_x() -> HermitianOperator {
        HermitianOperator(ComplexMatrix(Mat::from_row_slice(
            2,
            2,
            &[real(0.0), real(1.0), real(1.0), real(0.0)],
        )))
    }

    pub fn sigma_y() -> HermitianOperator {
        HermitianOperator(ComplexMatrix(Mat::from_row_slice(
            2,
            2,
            &[real(0.0), -I, I, real(0.0)],
        )))
    }

    pub fn sigma_z() -> HermitianOperator {
        HermitianOperator(ComplexMatrix(Mat::from_row_slice(
            2,
            2,
            &[real(1.0), real(0.0), real(0.0), real(-1.0)],
        )))
    }

    pub fn all() -> [HermitianOperator; 3] {
        [sigma_x(), sigma_y(), sigma_z()]
    }
}

#[cfg(test)]
mod tests {
    use super::pauli::*;
    use super::*;
    use crate::random;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn close(a: &Mat, b: &Mat, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn rejects_bad_shapes_and_values() {
        assert_eq!(ComplexMatrix::new(0, 1, &[]), Err(Error::Empty));
        assert!(matches!(
            ComplexMatrix::new(2, 2, &[real(1.0); 3]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert_eq!(
            ComplexMatrix::new(1, 1, &[c(f64::NAN, 0.0)]),
            Err(Error::NonFinite)
        );
    }

    #[test]
    fn row_major_round_trip() {
        let e = [c(1.0, 0.0), c(2.0, 0.0), c(3.0, 1.0), c(4.0, 0.0), c(5.0, 0.0), c(6.0, 0.0)];
        let m = ComplexMatrix::new(2, 3, &e).unwrap();
        assert_eq!(m[(0, 2)], c(3.0, 1.0));
        assert_eq!(m.entries(), e.to_vec());
    }

    #[test]
    fn dagger_examples() {
        let id = ComplexMatrix::identity(2);
        assert_eq!(dagger(&id), id);
        let y = sigma_y().matrix().clone();
        assert_eq!(dagger(&y), y);
        let z = ComplexMatrix::new(1, 1, &[c(1.0, 1.0)]).unwrap();
        assert_eq!(dagger(&z)[(0, 0)], c(1.0, -1.0));
    }

    #[test]
    fn dagger_is_bitwise_involution() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 1..6 {
            let m = ComplexMatrix::wrap(random::ginibre(&mut rng, n, n + 1));
            assert_eq!(dagger(&dagger(&m)), m);
        }
    }

    #[test]
    fn commutator_examples() {
        let (x, y, z) = (sigma_x(), sigma_y(), sigma_z());
        let xy = commutator(x.matrix(), y.matrix()).unwrap();
        assert!(close(&xy, &(z.as_dmatrix() * c(0.0, 2.0)), 0.0));
        assert_eq!(commutator(x.matrix(), x.matrix()).unwrap().norm(), 0.0);
        let id = ComplexMatrix::identity(2);
        assert_eq!(commutator(z.matrix(), &id).unwrap().norm(), 0.0);
        let bad = ComplexMatrix::identity(3);
        assert!(commutator(&id, &bad).is_err());
    }

    #[test]
    fn anticommutator_examples() {
        let (x, y) = (sigma_x(), sigma_y());
        assert_eq!(anticommutator(x.matrix(), y.matrix()).unwrap().norm(), 0.0);
        let xx = anticommutator(x.matrix(), x.matrix()).unwrap();
        assert!(close(&xx, &(Mat::identity(2, 2) * real(2.0)), 0.0));
        let zero = ComplexMatrix::zeros(2, 2);
        assert_eq!(anticommutator(y.matrix(), &zero).unwrap().norm(), 0.0);
    }

    #[test]
    fn eig_examples() {
        let e = hermitian_eig(&sigma_z());
        assert_eq!(e.values, vec![1.0, -1.0]);
        assert!(close(e.vectors.as_dmatrix(), &Mat::identity(2, 2), 1e-14));

        let e = hermitian_eig(&sigma_x());
        assert!((e.values[0] - 1.0).abs() < 1e-14 && (e.values[1] + 1.0).abs() < 1e-14);
        let s = 1.0 / 2f64.sqrt();
        let v = e.vectors.as_dmatrix();
        // Up to phase, the columns are (1, ±1)/√2.
        assert!((v[(0, 0)].norm() - s).abs() < 1e-14);
        assert!((v[(0, 0)] - v[(1, 0)]).norm() < 1e-14);
        assert!((v[(0, 1)] + v[(1, 1)]).norm() < 1e-14);

        let d = HermitianOperator::from_real_diagonal(&[0.3, 0.7]).unwrap();
        let e = hermitian_eig(&d);
        assert_eq!(e.values, vec![0.7, 0.3]);
    }

    #[test]
    fn eig_reconstructs_and_is_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n in 1..=8 {
            let h = random::hermitian(&mut rng, n);
            let e = hermitian_eig(&h);
            let scale = h.as_dmatrix().norm().max(1.0);
            assert!(close(&e.reconstruct(), h.as_dmatrix(), 1e-10 * scale));
            assert!(unitarity_defect(e.vectors.as_dmatrix()) < 1e-12);
            assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
            assert!((e.values.iter().sum::<f64>() - h.trace()).abs() < 1e-10);
            let again = hermitian_eig(&h);
            assert_eq!(again.values, e.values);
            assert_eq!(again.vectors, e.vectors);
        }
    }

    #[test]
    fn hermitian_check() {
        let m = ComplexMatrix::new(2, 2, &[real(0.0), real(1.0), real(0.0), real(0.0)]).unwrap();
        assert!(matches!(HermitianOperator::new(m), Err(Error::NotHermitian { .. })));
        let tiny = ComplexMatrix::new(1, 1, &[c(0.0, 1e-15)]).unwrap();
        assert!(HermitianOperator::new(tiny).is_ok());
    }

    #[test]
    fn expm_examples() {
        let zero = ComplexMatrix::zeros(3, 3);
        assert!(close(expm_skew(&zero).unwrap().as_dmatrix(), &Mat::identity(3, 3), 1e-15));

        let half_pi = sigma_x().as_dmatrix() * c(0.0, -std::f64::consts::FRAC_PI_2);
        let u = expm_skew(&ComplexMatrix::wrap(half_pi)).unwrap();
        let expect = sigma_x().as_dmatrix() * c(0.0, -1.0);
        assert!(close(u.as_dmatrix(), &expect, 1e-14));

        let full = sigma_z().as_dmatrix() * c(0.0, -2.0 * std::f64::consts::PI);
        let u = expm_skew(&ComplexMatrix::wrap(full)).unwrap();
        assert!(close(u.as_dmatrix(), &Mat::identity(2, 2), 1e-14));

        assert!(matches!(
            expm_skew(sigma_x().matrix()),
            Err(Error::NotSkewHermitian { .. })
        ));
    }

    #[test]
    fn expm_is_unitary_on_random_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for i in 0..1000 {
            let n = 2 + i % 7;
            let s = random::hermitian(&mut rng, n).as_dmatrix() * c(0.0, 3.0);
            let u = expm_skew(&ComplexMatrix::wrap(s)).unwrap();
            assert!(UnitaryOperator::new(u.matrix().clone()).is_ok());
        }
    }

    #[test]
    fn frobenius_examples() {
        let id = ComplexMatrix::identity(2);
        assert_eq!(frobenius_real(&id, &id).unwrap(), 4.0);
        assert_eq!(frobenius_real(sigma_x().matrix(), sigma_y().matrix()).unwrap(), 0.0);
        assert_eq!(frobenius_real(&id, &ComplexMatrix::zeros(2, 2)).unwrap(), 0.0);
        assert!(frobenius_real(&id, &ComplexMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn trace_is_cyclic() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for n in 1..=8 {
            let a = random::ginibre(&mut rng, n, n);
            let b = random::ginibre(&mut rng, n, n);
            let tol = 1e-12 * (a.norm() * b.norm()).max(1.0);
            assert!(((&a * &b).trace() - (&b * &a).trace()).norm() <= tol);
        }
    }

    #[test]
    fn unitary_log_inverts_exponential() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 1..=6 {
            let u = random::unitary(&mut rng, n);
            let k = u.log_hermitian();
            let back = hermitian_eig(&k).propagator(1.0);
            assert!(close(back.as_dmatrix(), u.as_dmatrix(), 1e-10));
            assert!(hermitian_eig(&k).values.iter().all(|x| x.abs() <= std::f64::consts::PI + 1e-12));
        }
    }

    #[test]
    fn psd_sqrt_squares_back() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let rho = random::density(&mut rng, 4, 3);
        let r = psd_sqrt(rho.operator());
        assert!(close(&(&r * &r), rho.as_dmatrix(), 1e-12));
    }
}
