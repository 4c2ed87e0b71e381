//! The principal `U(σ)` bundle `S(σ) → D(σ)` and its mechanical connection.
//!
//! Tangent vectors at `ψ ∈ S(σ)` are `n × k_tot` matrices with
//! `X†ψ + ψ†X = 0`. The connection is
//! `𝒜_ψ(X) = Σⱼ Πⱼ ψ†X Πⱼ P(σ)⁻¹`, which is the block diagonal part of `ψ†X`
//! with block `j` divided by `λⱼ`. Its kernel is the `G`-orthogonal
//! complement of the vertical space `{ψξ : ξ ∈ u(σ)}`.

use crate::error::{Error, Result};
use crate::linops::{frob_inner, frob_real, real, ComplexMatrix, HermitianOperator, Mat, C64, I};
use crate::states::{Purification, Spectrum};

/// Tangency tolerance `‖X†ψ + ψ†X‖_F`.
pub const TANGENCY_TOL: f64 = 1e-9;
/// Tolerance for membership in `u(σ)`.
pub const GAUGE_TOL: f64 = 1e-10;

fn same_shape(x: &Mat, y: &Mat) -> Result<()> {
    if x.shape() != y.shape() {
        return Err(Error::dims(
            format!("{}x{}", x.nrows(), x.ncols()),
            format!("{}x{}", y.nrows(), y.ncols()),
        ));
    }
    Ok(())
}

/// `G(X, Y) = ħ Tr(X†Y + Y†X)`.
pub fn big_g(x: &Mat, y: &Mat, hbar: f64) -> Result<f64> {
    same_shape(x, y)?;
    Ok(hbar * frob_real(x, y))
}

/// `Ω(X, Y) = −iħ Tr(X†Y − Y†X) = 2ħ Im Tr(X†Y)`.
pub fn big_omega(x: &Mat, y: &Mat, hbar: f64) -> Result<f64> {
    same_shape(x, y)?;
    Ok(2.0 * hbar * frob_inner(x, y).im)
}

/// Element of the gauge algebra `u(σ)`: anti-Hermitian and block diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct GaugeElement {
    matrix: ComplexMatrix,
    sigma: Spectrum,
}

impl GaugeElement {
    pub fn new(matrix: ComplexMatrix, sigma: Spectrum) -> Result<Self> {
        let k = sigma.k_tot();
        if matrix.shape() != (k, k) {
            return Err(Error::dims(format!("{k}x{k}"), format!("{}x{}", matrix.rows(), matrix.cols())));
        }
        let skew = (&*matrix + matrix.adjoint()).norm();
        if skew > GAUGE_TOL {
            return Err(Error::NotGaugeElement(format!("‖ξ + ξ†‖ = {skew:e}")));
        }
        let comm = commutator_with_p(&matrix, &sigma);
        if comm > GAUGE_TOL {
            return Err(Error::NotGaugeElement(format!("‖ξP − Pξ‖ = {comm:e}")));
        }
        Ok(GaugeElement { matrix, sigma })
    }

    pub(crate) fn wrap(m: Mat, sigma: Spectrum) -> Self {
        GaugeElement {
            matrix: ComplexMatrix::wrap(m),
            sigma,
        }
    }

    /// `ξ = −i𝟙`, the generator of the overall phase.
    pub fn phase_generator(sigma: &Spectrum) -> Self {
        let k = sigma.k_tot();
        GaugeElement::wrap(Mat::identity(k, k) * -I, sigma.clone())
    }

    pub fn zero(sigma: &Spectrum) -> Self {
        let k = sigma.k_tot();
        GaugeElement::wrap(Mat::zeros(k, k), sigma.clone())
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn as_dmatrix(&self) -> &Mat {
        &self.matrix
    }

    pub fn sigma(&self) -> &Spectrum {
        &self.sigma
    }

    /// `Ad_{V†} ξ = V†ξV`.
    pub fn conjugate_by(&self, v: &Mat) -> Self {
        GaugeElement::wrap(v.adjoint() * &*self.matrix * v, self.sigma.clone())
    }

    /// Defects `(‖ξ + ξ†‖, ‖ξP − Pξ‖)`.
    pub fn defects(&self) -> (f64, f64) {
        (
            (&*self.matrix + self.matrix.adjoint()).norm(),
            commutator_with_p(&self.matrix, &self.sigma),
        )
    }
}

fn commutator_with_p(m: &Mat, sigma: &Spectrum) -> f64 {
    let d = sigma.diagonal();
    let mut s = 0.0;
    for i in 0..d.len() {
        for j in 0..d.len() {
            s += (m[(i, j)] * (d[j] - d[i])).norm_sqr();
        }
    }
    s.sqrt()
}

/// Basis of `u(σ)`: per block, `iE_aa`, `E_ab − E_ba` and `i(E_ab + E_ba)`.
pub fn u_sigma_basis(sigma: &Spectrum) -> Vec<GaugeElement> {
    let k = sigma.k_tot();
    let mut out = Vec::new();
    let unit = |entries: &[(usize, usize, C64)]| {
        let mut m = Mat::zeros(k, k);
        for &(i, j, z) in entries {
            m[(i, j)] = z;
        }
        GaugeElement::wrap(m, sigma.clone())
    };
    for b in sigma.blocks() {
        for a in b.clone() {
            out.push(unit(&[(a, a, I)]));
            for c in a + 1..b.end {
                out.push(unit(&[(a, c, real(1.0)), (c, a, real(-1.0))]));
                out.push(unit(&[(a, c, I), (c, a, I)]));
            }
        }
    }
    out
}

/// `ξ·η = ħ Tr((ξ†η + η†ξ)P(σ))`.
pub fn lie_metric(xi: &GaugeElement, eta: &GaugeElement, hbar: f64) -> Result<f64> {
    if !xi.sigma.approx_eq(&eta.sigma, crate::states::SPECTRUM_SUM_TOL) {
        return Err(Error::SpectrumMismatch(format!(
            "{:?} vs {:?}",
            xi.sigma.values(),
            eta.sigma.values()
        )));
    }
    Ok(lie_metric_raw(&xi.matrix, &eta.matrix, &xi.sigma, hbar))
}

pub(crate) fn lie_metric_raw(xi: &Mat, eta: &Mat, sigma: &Spectrum, hbar: f64) -> f64 {
    // 2ħ Re Σ_ab conj(ξ_ab) η_ab P_b
    let d = sigma.diagonal();
    let mut s = 0.0;
    for a in 0..d.len() {
        for b in 0..d.len() {
            s += (xi[(a, b)].conj() * eta[(a, b)]).re * d[b];
        }
    }
    2.0 * hbar * s
}

/// A tangent vector to `S(σ)` at a purification.
#[derive(Clone, Debug)]
pub struct BundleTangent {
    base: Purification,
    vector: ComplexMatrix,
}

impl BundleTangent {
    pub fn new(base: Purification, vector: ComplexMatrix) -> Result<Self> {
        if vector.shape() != base.as_dmatrix().shape() {
            return Err(Error::dims(
                format!("{}x{}", base.dim(), base.k_tot()),
                format!("{}x{}", vector.rows(), vector.cols()),
            ));
        }
        let defect = tangency_defect(base.as_dmatrix(), &vector);
        if defect > TANGENCY_TOL {
            return Err(Error::NotTangent { defect });
        }
        Ok(BundleTangent { base, vector })
    }

    pub fn base(&self) -> &Purification {
        &self.base
    }

    pub fn vector(&self) -> &ComplexMatrix {
        &self.vector
    }
}

pub(crate) fn tangency_defect(psi: &Mat, x: &Mat) -> f64 {
    let m = x.adjoint() * psi;
    (&m + m.adjoint()).norm()
}

/// Removes the normal component of `y` at `ψ`: returns `y − ψC` with `C`
/// Hermitian solving `CP + PC = y†ψ + ψ†y`.
pub fn project_tangent(psi: &Purification, y: &Mat) -> Mat {
    let p = psi.as_dmatrix();
    let m = y.adjoint() * p + p.adjoint() * y;
    let d = psi.sigma().diagonal();
    let c = Mat::from_fn(d.len(), d.len(), |i, j| m[(i, j)] / (d[i] + d[j]));
    y - p * c
}

/// `𝒜_ψ(X)` on raw matrices; no tangency check.
pub(crate) fn connection_raw(psi: &Mat, sigma: &Spectrum, x: &Mat) -> Mat {
    let m = psi.adjoint() * x;
    let k = m.nrows();
    let mut out = Mat::zeros(k, k);
    for (b, &lam) in sigma.blocks().into_iter().zip(sigma.values()) {
        let inv = 1.0 / lam;
        for i in b.clone() {
            for j in b.clone() {
                out[(i, j)] = m[(i, j)] * inv;
            }
        }
    }
    out
}

/// The mechanical connection.
pub fn connection(t: &BundleTangent) -> GaugeElement {
    let sigma = t.base.sigma();
    GaugeElement::wrap(
        connection_raw(t.base.as_dmatrix(), sigma, &t.vector),
        sigma.clone(),
    )
}

/// `(vertical, horizontal)` with `vertical = ψ𝒜_ψ(X)`.
pub fn split(t: &BundleTangent) -> (Mat, Mat) {
    let vertical = t.base.as_dmatrix() * connection(t).as_dmatrix();
    let horizontal = &*t.vector - &vertical;
    (vertical, horizontal)
}

/// Horizontal part of `X` at `ψ`, raw.
pub(crate) fn horizontal_raw(psi: &Purification, x: &Mat) -> Mat {
    x - psi.as_dmatrix() * connection_raw(psi.as_dmatrix(), psi.sigma(), x)
}

/// Lift `X_Ĥ(ψ) = −(i/ħ)Ĥψ` of the Hamiltonian field.
pub fn hamiltonian_lift(h: &HermitianOperator, psi: &Purification, hbar: f64) -> Result<Mat> {
    if h.dim() != psi.dim() {
        return Err(Error::dims(psi.dim(), h.dim()));
    }
    Ok(h.as_dmatrix() * psi.as_dmatrix() * (-I / hbar))
}

/// `ξ_H = 𝒜_ψ(X_Ĥ(ψ))`.
pub fn xi_field(h: &HermitianOperator, psi: &Purification, hbar: f64) -> Result<GaugeElement> {
    let x = hamiltonian_lift(h, psi, hbar)?;
    Ok(GaugeElement::wrap(
        connection_raw(psi.as_dmatrix(), psi.sigma(), &x),
        psi.sigma().clone(),
    ))
}

/// Component of `ξ` orthogonal to the unit phase generator
/// `χ̂ = −i𝟙 / ‖−i𝟙‖`.
pub fn xi_perp(xi: &GaugeElement) -> GaugeElement {
    let chi = GaugeElement::phase_generator(&xi.sigma);
    // The ratio is independent of ħ.
    let num = lie_metric_raw(&xi.matrix, &chi.matrix, &xi.sigma, 1.0);
    let den = lie_metric_raw(&chi.matrix, &chi.matrix, &xi.sigma, 1.0);
    GaugeElement::wrap(&*xi.matrix - &*chi.matrix * real(num / den), xi.sigma.clone())
}

/// `χ̂` itself, normalized for the given `ħ`.
pub fn unit_phase_generator(sigma: &Spectrum, hbar: f64) -> GaugeElement {
    let chi = GaugeElement::phase_generator(sigma);
    let norm = lie_metric_raw(&chi.matrix, &chi.matrix, sigma, hbar).sqrt();
    GaugeElement::wrap(&*chi.matrix * real(1.0 / norm), sigma.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linops::{c, UnitaryOperator};
    use crate::random;
    use crate::states::{purify, DensityOperator};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn big_g_omega_examples() {
        let mut r = rng(1);
        let x = random::ginibre(&mut r, 3, 2);
        let n2 = x.norm_squared();
        assert!((big_g(&x, &x, 0.7).unwrap() - 1.4 * n2).abs() < 1e-12);
        assert_eq!(big_omega(&x, &x, 0.7).unwrap(), 0.0);
        let ix = &x * I;
        assert!(big_g(&x, &ix, 0.7).unwrap().abs() < 1e-14);
        assert!((big_omega(&x, &ix, 0.7).unwrap() - 1.4 * n2).abs() < 1e-12);
        assert!(big_g(&x, &Mat::zeros(2, 2), 1.0).is_err());
        let y = random::ginibre(&mut r, 3, 2);
        assert_eq!(big_g(&x, &y, 1.0).unwrap(), big_g(&y, &x, 1.0).unwrap());
        assert!((big_omega(&x, &y, 1.0).unwrap() + big_omega(&y, &x, 1.0).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn lie_metric_examples() {
        let pure = Spectrum::pure();
        let xi = GaugeElement::phase_generator(&pure);
        assert!((lie_metric(&xi, &xi, 1.0).unwrap() - 2.0).abs() < 1e-15);
        assert_eq!(lie_metric(&xi, &GaugeElement::zero(&pure), 1.0).unwrap(), 0.0);

        let mut r = rng(2);
        for _ in 0..50 {
            let sigma = random::spectrum(&mut r, 6, 3);
            let xi = GaugeElement::new(ComplexMatrix::wrap(random::gauge_algebra(&mut r, &sigma)), sigma.clone()).unwrap();
            assert!(lie_metric(&xi, &xi, 1.0).unwrap() > 0.0);
            let chi = unit_phase_generator(&sigma, 0.6);
            assert!((lie_metric(&chi, &chi, 0.6).unwrap() - 1.0).abs() < 1e-12);
        }
        let other = Spectrum::new(vec![0.5], vec![2]).unwrap();
        assert!(lie_metric(&xi, &GaugeElement::zero(&other), 1.0).is_err());
    }

    #[test]
    fn gauge_element_validation() {
        let sigma = Spectrum::new(vec![0.7, 0.3], vec![1, 1]).unwrap();
        let off = Mat::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0)]);
        assert!(GaugeElement::new(ComplexMatrix::wrap(off.clone()), sigma).is_err());
        let deg = Spectrum::new(vec![0.5], vec![2]).unwrap();
        assert!(GaugeElement::new(ComplexMatrix::wrap(off), deg.clone()).is_ok());
        let herm = Mat::identity(2, 2);
        assert!(GaugeElement::new(ComplexMatrix::wrap(herm), deg).is_err());
    }

    #[test]
    fn basis_spans_u_sigma() {
        let sigma = Spectrum::new(vec![0.3, 0.1], vec![2, 4]).unwrap();
        let basis = u_sigma_basis(&sigma);
        assert_eq!(basis.len(), 4 + 16);
        for b in &basis {
            let (skew, comm) = b.defects();
            assert_eq!((skew, comm), (0.0, 0.0));
        }
        // Orthogonal under the Frobenius pairing.
        for (i, a) in basis.iter().enumerate() {
            for b in &basis[i + 1..] {
                assert_eq!(frob_real(a.as_dmatrix(), b.as_dmatrix()), 0.0);
            }
        }
    }

    #[test]
    fn tangency_is_enforced() {
        let mut r = rng(3);
        let sigma = random::spectrum(&mut r, 4, 2);
        let psi = random::purification(&mut r, &sigma, 5);
        let y = random::ginibre(&mut r, 5, sigma.k_tot());
        let err = BundleTangent::new(psi.clone(), ComplexMatrix::wrap(y.clone())).unwrap_err();
        assert!(matches!(err, Error::NotTangent { .. }));
        let x = project_tangent(&psi, &y);
        assert!(tangency_defect(psi.as_dmatrix(), &x) < 1e-13);
        assert!(BundleTangent::new(psi, ComplexMatrix::wrap(x)).is_ok());
    }

    #[test]
    fn connection_pure_case() {
        let mut r = rng(4);
        let psi = random::pure_state(&mut r, 3).as_purification();
        let x = random::tangent(&mut r, &psi);
        let a = connection(&BundleTangent::new(psi.clone(), ComplexMatrix::wrap(x.clone())).unwrap());
        let overlap = psi.as_dmatrix().column(0).dotc(&x.column(0));
        assert!((a.as_dmatrix()[(0, 0)] - overlap).norm() < 1e-15);
        assert!(a.as_dmatrix()[(0, 0)].re.abs() < 1e-12);
    }

    #[test]
    fn connection_reproduces_generators_and_kills_horizontals() {
        let mut r = rng(5);
        for _ in 0..200 {
            let sigma = random::spectrum(&mut r, 6, 3);
            let n = sigma.k_tot() + r.random_range(0..3);
            let psi = random::purification(&mut r, &sigma, n);
            let xi = random::gauge_algebra(&mut r, &sigma);
            let x = psi.as_dmatrix() * &xi;
            let t = BundleTangent::new(psi.clone(), ComplexMatrix::wrap(x.clone())).unwrap();
            assert!((connection(&t).as_dmatrix() - &xi).norm() < 1e-9);
            let (v, h) = split(&t);
            assert!((v - &x).norm() < 1e-9 && h.norm() < 1e-9);

            let y = random::tangent(&mut r, &psi);
            let t = BundleTangent::new(psi.clone(), ComplexMatrix::wrap(y.clone())).unwrap();
            let (v, h) = split(&t);
            assert!((&v + &h - &y).norm() <= 1e-14 * y.norm());
            assert!(big_g(&v, &h, 1.0).unwrap().abs() < 1e-9);
            let th = BundleTangent::new(psi.clone(), ComplexMatrix::wrap(h.clone())).unwrap();
            assert!(connection(&th).as_dmatrix().norm() < 1e-9);
            let (v2, h2) = split(&th);
            assert!(v2.norm() < 1e-9 && (h2 - h).norm() < 1e-9);
        }
    }

    use rand::Rng;

    #[test]
    fn momentum_map_pairing() {
        let mut r = rng(6);
        for _ in 0..100 {
            let sigma = random::spectrum(&mut r, 6, 3);
            let psi = random::purification(&mut r, &sigma, sigma.k_tot() + 1);
            let x = random::tangent(&mut r, &psi);
            let hbar = r.random_range(0.3..2.0);
            let a = GaugeElement::wrap(connection_raw(psi.as_dmatrix(), &sigma, &x), sigma.clone());
            for eta in u_sigma_basis(&sigma) {
                let lhs = lie_metric(&a, &eta, hbar).unwrap();
                let rhs = big_g(&x, &(psi.as_dmatrix() * eta.as_dmatrix()), hbar).unwrap();
                assert!((lhs - rhs).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn gauge_equivariance() {
        let mut r = rng(7);
        for _ in 0..100 {
            let sigma = random::spectrum(&mut r, 6, 3);
            let psi = random::purification(&mut r, &sigma, 6);
            let x = random::tangent(&mut r, &psi);
            let v: UnitaryOperator = random::gauge_unitary(&mut r, &sigma);
            let vm = v.as_dmatrix();
            let moved = psi.gauge(&v).unwrap();
            let a = connection_raw(psi.as_dmatrix(), &sigma, &x);
            let b = connection_raw(moved.as_dmatrix(), &sigma, &(&x * vm));
            assert!((b - vm.adjoint() * a * vm).norm() < 1e-9);

            let h = random::hermitian(&mut r, 6);
            let xi = xi_field(&h, &psi, 1.0).unwrap();
            let xi_moved = xi_field(&h, &moved, 1.0).unwrap();
            assert!((xi_moved.as_dmatrix() - xi.conjugate_by(vm).as_dmatrix()).norm() < 1e-9);
        }
    }

    #[test]
    fn xi_field_examples() {
        let mut r = rng(8);
        // Stationary: H diagonal in the eigenbasis of ρ.
        let rho = DensityOperator::from_diagonal(&[0.5, 0.3, 0.2]).unwrap();
        let psi = purify(&rho, 1e-10).unwrap();
        let h = HermitianOperator::from_real_diagonal(&[1.0, -2.0, 0.5]).unwrap();
        let x = hamiltonian_lift(&h, &psi, 1.0).unwrap();
        let t = BundleTangent::new(psi.clone(), ComplexMatrix::wrap(x)).unwrap();
        assert!(split(&t).1.norm() < 1e-14);

        let c0 = 1.7;
        let hbar = 0.5;
        let xi = xi_field(&HermitianOperator::identity(3).scaled(c0), &psi, hbar).unwrap();
        assert!((xi.as_dmatrix() - Mat::identity(3, 3) * c(0.0, -c0 / hbar)).norm() < 1e-14);

        let p = random::pure_state(&mut r, 4);
        let h = random::hermitian(&mut r, 4);
        let xi = xi_field(&h, &p.as_purification(), 0.8).unwrap();
        let e = crate::dynamics::expectation(&h, &p).unwrap();
        assert!((xi.as_dmatrix()[(0, 0)] - c(0.0, -e / 0.8)).norm() < 1e-14);
    }

    #[test]
    fn xi_perp_examples() {
        let mut r = rng(9);
        let sigma = random::spectrum(&mut r, 5, 2);
        let chi = GaugeElement::phase_generator(&sigma);
        assert!(xi_perp(&chi).as_dmatrix().norm() < 1e-14);

        let xi = GaugeElement::wrap(random::gauge_algebra(&mut r, &sigma), sigma.clone());
        let perp = xi_perp(&xi);
        let unit = unit_phase_generator(&sigma, 1.3);
        assert!(lie_metric(&perp, &unit, 1.3).unwrap().abs() < 1e-10);
        assert!((xi_perp(&perp).as_dmatrix() - perp.as_dmatrix()).norm() < 1e-14);

        let pure = Spectrum::pure();
        let any = GaugeElement::wrap(Mat::from_element(1, 1, c(0.0, 3.2)), pure);
        assert!(xi_perp(&any).as_dmatrix().norm() < 1e-15);
    }
}
