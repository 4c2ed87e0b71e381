//! Uncertainty functionals, the geometric uncertainty relations and the
//! energy dispersion identity.
//!
//! For an observable `Â` the Hamiltonian field on purifications is
//! `X_Â = −(i/ħ)Âψ`. With `G = 2ħ Re Tr(X†Y)` and `Ω = 2ħ Im Tr(X†Y)` one has
//! `(A, B)(ρ) = (ħ/2)G(X_Â, X_B̂)` and `[A, B](ρ) = (ħ/2)Ω(X_Â, X_B̂)`, where
//! `(A, B) = Tr(½{Â, B̂}ρ)` and `[A, B] = Tr([Â, B̂]ρ/2i)`. The geometric
//! brackets use the horizontal parts of the fields, which strips the
//! contribution of the gauge directions. Every bound checks its defining
//! identities on the spot and fails with [`Error::NormalizationAudit`] when
//! they do not hold.

use serde::{Deserialize, Serialize};

use crate::bundle::{big_g, big_omega, horizontal_raw, lie_metric, xi_field, xi_perp};
use crate::error::{Error, Result};
use crate::kahler::{fs_metric, fs_symplectic, metric_g, symplectic_omega};
use crate::linops::{HermitianOperator, Mat, I};
use crate::states::{purify, DensityOperator, PureState, Purification, QuantumState, DEFAULT_SPECTRAL_TOL};

/// Relative tolerance of the normalization audits.
pub const AUDIT_TOL: f64 = 1e-10;
/// Most negative variance accepted before clamping.
pub const VARIANCE_FLOOR: f64 = -1e-12;

fn check<S: QuantumState + ?Sized>(a: &HermitianOperator, state: &S) -> Result<()> {
    if a.dim() != state.dim() {
        return Err(Error::dims(state.dim(), a.dim()));
    }
    Ok(())
}

/// `√(⟨Â²⟩ − ⟨Â⟩²)`.
pub fn delta<S: QuantumState + ?Sized>(a: &HermitianOperator, state: &S) -> Result<f64> {
    check(a, state)?;
    let am = a.as_dmatrix();
    let mean = state.expect_matrix(am).re;
    let sq = state.expect_matrix(&(am * am)).re;
    let var = sq - mean * mean;
    let floor = VARIANCE_FLOOR * am.norm_squared().max(1.0);
    if var < floor {
        return Err(Error::Numerical(format!("negative variance {var:e}")));
    }
    Ok(var.max(0.0).sqrt())
}

/// `(A, B) = ⟨½(ÂB̂ + B̂Â)⟩` and `[A, B] = ⟨(ÂB̂ − B̂Â)/2i⟩`, both from `⟨ÂB̂⟩`.
fn symmetric_and_commutator<S: QuantumState + ?Sized>(
    a: &HermitianOperator,
    b: &HermitianOperator,
    state: &S,
) -> Result<(f64, f64)> {
    check(a, state)?;
    check(b, state)?;
    let ab = state.expect_matrix(&(a.as_dmatrix() * b.as_dmatrix()));
    Ok((ab.re, ab.im))
}

/// Robertson–Schrödinger bound `√(((A,B) − ⟨A⟩⟨B⟩)² + [A,B]²)`.
pub fn rs_bound<S: QuantumState + ?Sized>(a: &HermitianOperator, b: &HermitianOperator, state: &S) -> Result<f64> {
    let (sym, comm) = symmetric_and_commutator(a, b, state)?;
    let cov = sym - state.expect_matrix(a.as_dmatrix()).re * state.expect_matrix(b.as_dmatrix()).re;
    Ok(cov.hypot(comm))
}

fn audit(identity: &'static str, lhs: f64, rhs: f64, scale: f64) -> Result<()> {
    let defect = (lhs - rhs).abs();
    if defect > AUDIT_TOL * scale.max(1.0) {
        return Err(Error::NormalizationAudit { identity, defect });
    }
    Ok(())
}

fn op_scale(a: &HermitianOperator, b: &HermitianOperator) -> f64 {
    a.as_dmatrix().norm().max(1.0) * b.as_dmatrix().norm().max(1.0)
}

/// Bound on `P(H)`: `(ħ/2)√(g(X_a, X_b)² + ω(X_a, X_b)²)` with the
/// Fubini–Study forms evaluated on `X_Â = −(i/ħ)Âψ`.
///
/// Audited against the Hilbert-space forms:
/// `(ħ/2)g = (ħ/2)G − ⟨A⟩⟨B⟩` and `(ħ/2)ω = (ħ/2)Ω`.
pub fn geometric_bound_pure(a: &HermitianOperator, b: &HermitianOperator, psi: &PureState, hbar: f64) -> Result<f64> {
    check(a, psi)?;
    check(b, psi)?;
    let xa = a.as_dmatrix() * psi.vector() * (-I / hbar);
    let xb = b.as_dmatrix() * psi.vector() * (-I / hbar);
    let g = fs_metric(psi, &xa, &xb, hbar)?;
    let w = fs_symplectic(psi, &xa, &xb, hbar)?;
    let half = hbar / 2.0;
    let means = psi.expect_matrix(a.as_dmatrix()).re * psi.expect_matrix(b.as_dmatrix()).re;
    let scale = op_scale(a, b);
    audit("pure metric bracket", half * g, half * metric_g(&xa, &xb, hbar)? - means, scale)?;
    audit("pure symplectic bracket", half * w, half * symplectic_omega(&xa, &xb, hbar)?, scale)?;
    Ok(half * g.hypot(w))
}

/// Geometric brackets of two observables at a purification.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Brackets {
    /// `{A, B}_g = G(hor X_Â, hor X_B̂)`.
    pub g_ab: f64,
    /// `{A, B}_ω = Ω(hor X_Â, hor X_B̂)`.
    pub omega_ab: f64,
    pub g_aa: f64,
    pub g_bb: f64,
}

/// Factor relating the symmetric and commutator expectations to `G` and `Ω`
/// of the fields.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Convention {
    /// `ħ/2`.
    #[default]
    Standard,
    /// The reciprocal reading `2/ħ`. It contradicts the identities for
    /// `ħ ≠ 2` and exists to exercise the audits.
    Flipped,
}

impl Convention {
    pub fn factor(self, hbar: f64) -> f64 {
        match self {
            Convention::Standard => hbar / 2.0,
            Convention::Flipped => 2.0 / hbar,
        }
    }
}

/// Brackets at `ψ`, audited against `(A, B) = c·G(X_Â, X_B̂)` and
/// `[A, B] = c·Ω(X_Â, X_B̂)` with `c` given by the convention.
pub fn brackets_at(
    a: &HermitianOperator,
    b: &HermitianOperator,
    psi: &Purification,
    hbar: f64,
    convention: Convention,
) -> Result<Brackets> {
    if a.dim() != psi.dim() || b.dim() != psi.dim() {
        return Err(Error::dims(psi.dim(), a.dim().max(b.dim())));
    }
    let p = psi.as_dmatrix();
    let field = |o: &HermitianOperator| -> Mat { o.as_dmatrix() * p * (-I / hbar) };
    let (xa, xb) = (field(a), field(b));
    let rho = reduce_matrix(p);
    let ab = (a.as_dmatrix() * b.as_dmatrix() * &rho).trace();
    let c = convention.factor(hbar);
    let scale = op_scale(a, b);
    audit("symmetric product", ab.re, c * big_g(&xa, &xb, hbar)?, scale)?;
    audit("commutator", ab.im, c * big_omega(&xa, &xb, hbar)?, scale)?;
    let (ha, hb) = (horizontal_raw(psi, &xa), horizontal_raw(psi, &xb));
    Ok(Brackets {
        g_ab: big_g(&ha, &hb, hbar)?,
        omega_ab: big_omega(&ha, &hb, hbar)?,
        g_aa: big_g(&ha, &ha, hbar)?,
        g_bb: big_g(&hb, &hb, hbar)?,
    })
}

fn reduce_matrix(p: &Mat) -> Mat {
    p * p.adjoint()
}

/// Mixed-state bound `(ħ/2)√({A,B}_g² + {A,B}_ω²)` evaluated at the
/// canonical purification of `ρ`.
pub fn geometric_bound_mixed(a: &HermitianOperator, b: &HermitianOperator, rho: &DensityOperator, hbar: f64) -> Result<f64> {
    geometric_bound_mixed_with(a, b, rho, hbar, Convention::Standard)
}

/// [`geometric_bound_mixed`] under an explicit convention.
pub fn geometric_bound_mixed_with(
    a: &HermitianOperator,
    b: &HermitianOperator,
    rho: &DensityOperator,
    hbar: f64,
    convention: Convention,
) -> Result<f64> {
    let psi = purify(rho, DEFAULT_SPECTRAL_TOL)?;
    geometric_bound_at(a, b, &psi, hbar, convention)
}

/// Mixed-state bound at a given purification.
pub fn geometric_bound_at(
    a: &HermitianOperator,
    b: &HermitianOperator,
    psi: &Purification,
    hbar: f64,
    convention: Convention,
) -> Result<f64> {
    let br = brackets_at(a, b, psi, hbar, convention)?;
    Ok(hbar / 2.0 * br.g_ab.hypot(br.omega_ab))
}

/// Uncertainty product together with both bounds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UncertaintyReport {
    pub delta_a: f64,
    pub delta_b: f64,
    pub product: f64,
    pub rs_bound: f64,
    pub geometric_bound: f64,
    /// `product − max(rs_bound, geometric_bound)`.
    pub slack: f64,
}

/// Spreads, product and both bounds at `ρ`.
pub fn report(a: &HermitianOperator, b: &HermitianOperator, rho: &DensityOperator, hbar: f64) -> Result<UncertaintyReport> {
    let delta_a = delta(a, rho)?;
    let delta_b = delta(b, rho)?;
    let product = delta_a * delta_b;
    let rs = rs_bound(a, b, rho)?;
    let geometric = geometric_bound_mixed(a, b, rho, hbar)?;
    Ok(UncertaintyReport {
        delta_a,
        delta_b,
        product,
        rs_bound: rs,
        geometric_bound: geometric,
        slack: product - rs.max(geometric),
    })
}

/// The two sides of `ħ²g(X_H, X_H) = ΔH² − ξ⊥·ξ⊥`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DispersionReport {
    /// `ħ²g(X_H, X_H) = (ħ/2)G(hor X_Ĥ, hor X_Ĥ)`.
    pub lhs: f64,
    /// `ΔH² − (ħ/2)(ξ⊥, ξ⊥)`.
    pub rhs: f64,
    pub defect: f64,
    /// `ΔH²` alone.
    pub variance: f64,
    /// `(ħ/2)(ξ⊥, ξ⊥)`, the part of the dispersion carried by the gauge
    /// directions.
    pub vertical: f64,
}

/// Energy dispersion identity at `ρ`, evaluated at its canonical
/// purification.
pub fn dispersion_identity(h: &HermitianOperator, rho: &DensityOperator, hbar: f64) -> Result<DispersionReport> {
    let psi = purify(rho, DEFAULT_SPECTRAL_TOL)?;
    dispersion_identity_at(h, &psi, hbar)
}

/// [`dispersion_identity`] at a given purification.
pub fn dispersion_identity_at(h: &HermitianOperator, psi: &Purification, hbar: f64) -> Result<DispersionReport> {
    if h.dim() != psi.dim() {
        return Err(Error::dims(psi.dim(), h.dim()));
    }
    let x = h.as_dmatrix() * psi.as_dmatrix() * (-I / hbar);
    let hor = horizontal_raw(psi, &x);
    let lhs = hbar / 2.0 * big_g(&hor, &hor, hbar)?;
    let xi = xi_perp(&xi_field(h, psi, hbar)?);
    let vertical = hbar / 2.0 * lie_metric(&xi, &xi, hbar)?;
    let rho = DensityOperator::wrap(reduce_matrix(psi.as_dmatrix()));
    let variance = delta(h, &rho)?.powi(2);
    let rhs = variance - vertical;
    Ok(DispersionReport {
        lhs,
        rhs,
        defect: (lhs - rhs).abs(),
        variance,
        vertical,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linops::{c, pauli, UnitaryOperator};
    use crate::random;
    use crate::states::{projector, Spectrum};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn spin(k: usize, hbar: f64) -> HermitianOperator {
        pauli::all()[k].scaled(hbar / 2.0)
    }

    #[test]
    fn delta_examples() {
        let up = PureState::basis(2, 0);
        assert_eq!(delta(&pauli::sigma_z(), &up).unwrap(), 0.0);
        let plus = PureState::from_slice(&[c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)]).unwrap();
        assert!((delta(&pauli::sigma_z(), &plus).unwrap() - 1.0).abs() < 1e-15);
        let half = DensityOperator::maximally_mixed(2);
        assert!((delta(&pauli::sigma_z(), &half).unwrap() - 1.0).abs() < 1e-15);
        assert!(delta(&pauli::sigma_z(), &PureState::basis(3, 0)).is_err());
    }

    #[test]
    fn rs_examples() {
        let up = PureState::basis(2, 0);
        assert_eq!(rs_bound(&pauli::sigma_z(), &pauli::sigma_z(), &up).unwrap(), 0.0);
        assert!((rs_bound(&pauli::sigma_x(), &pauli::sigma_y(), &up).unwrap() - 1.0).abs() < 1e-15);
        let mut r = rng(1);
        let a = random::hermitian(&mut r, 4);
        let psi = random::pure_state(&mut r, 4);
        let d = delta(&a, &psi).unwrap();
        assert!((rs_bound(&a, &a, &psi).unwrap() - d * d).abs() < 1e-12);
    }

    #[test]
    fn pure_bound_examples() {
        let up = PureState::basis(2, 0);
        for &hbar in &[1.0, 0.4] {
            let b = geometric_bound_pure(&pauli::sigma_x(), &pauli::sigma_y(), &up, hbar).unwrap();
            assert!((b - 1.0).abs() < 1e-14);
            assert!(geometric_bound_pure(&pauli::sigma_z(), &pauli::sigma_z(), &up, hbar).unwrap() < 1e-15);
        }
        let mut r = rng(2);
        for n in 2..6 {
            let a = random::hermitian(&mut r, n);
            let b = random::hermitian(&mut r, n);
            let psi = random::pure_state(&mut r, n);
            let d = delta(&a, &psi).unwrap();
            assert!((geometric_bound_pure(&a, &a, &psi, 0.7).unwrap() - d * d).abs() < 1e-12);
            let g = geometric_bound_pure(&a, &b, &psi, 0.7).unwrap();
            assert!((g - rs_bound(&a, &b, &psi).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn mixed_bound_on_rank_one_matches_pure_bound() {
        let mut r = rng(3);
        for n in 2..7 {
            let a = random::hermitian(&mut r, n);
            let b = random::hermitian(&mut r, n);
            let psi = random::pure_state(&mut r, n);
            let mixed = geometric_bound_mixed(&a, &b, &projector(&psi), 1.3).unwrap();
            let pure = geometric_bound_pure(&a, &b, &psi, 1.3).unwrap();
            assert!((mixed - pure).abs() < 1e-9);
            let d = delta(&a, &psi).unwrap();
            assert!((geometric_bound_mixed(&a, &a, &projector(&psi), 1.3).unwrap() - d * d).abs() < 1e-10);
        }
    }

    #[test]
    fn spin_bound_on_eigen_densities() {
        for &hbar in &[1.0, 0.5] {
            for &(l1, l2) in &[(0.6, 0.4), (0.8, 0.2), (1.0, 0.0)] {
                let rho = DensityOperator::from_diagonal(&[l1, l2]).unwrap();
                let b = geometric_bound_mixed(&spin(0, hbar), &spin(1, hbar), &rho, hbar).unwrap();
                // Robertson: (ħ/2)|⟨S_z⟩| = (ħ²/4)(λ₁ − λ₂).
                assert!((b - hbar * hbar / 4.0 * (l1 - l2)).abs() < 1e-12, "{b}");
                let rep = report(&spin(0, hbar), &spin(1, hbar), &rho, hbar).unwrap();
                assert!(rep.slack >= -1e-12);
            }
        }
    }

    #[test]
    fn commuting_pair_on_joint_eigen_density() {
        let a = HermitianOperator::from_real_diagonal(&[1.0, 2.0, 3.0]).unwrap();
        let b = HermitianOperator::from_real_diagonal(&[0.0, -1.0, 5.0]).unwrap();
        let rho = DensityOperator::from_diagonal(&[0.5, 0.3, 0.2]).unwrap();
        assert!(geometric_bound_mixed(&a, &b, &rho, 1.0).unwrap() < 1e-14);
    }

    #[test]
    fn inequalities_hold_on_random_instances() {
        let mut r = rng(4);
        for _ in 0..300 {
            let n = 2 + (rand::Rng::random_range(&mut r, 0..5));
            let rank = rand::Rng::random_range(&mut r, 1..=n);
            let a = random::hermitian(&mut r, n);
            let b = random::hermitian(&mut r, n);
            let rho = random::density(&mut r, n, rank);
            let rep = report(&a, &b, &rho, 0.9).unwrap();
            assert!(rep.product >= rep.geometric_bound - 1e-10);
            assert!(rep.product >= rep.rs_bound - 1e-10);
            let psi = purify(&rho, DEFAULT_SPECTRAL_TOL).unwrap();
            let br = brackets_at(&a, &b, &psi, 0.9, Convention::Standard).unwrap();
            assert!(br.g_aa * br.g_bb >= br.g_ab.powi(2) + br.omega_ab.powi(2) - 1e-10);
        }
    }

    #[test]
    fn mixed_bound_is_gauge_invariant() {
        let mut r = rng(5);
        for _ in 0..50 {
            let sigma = random::spectrum(&mut r, 4, 3);
            let n = sigma.k_tot() + 1;
            let psi = random::purification(&mut r, &sigma, n);
            let a = random::hermitian(&mut r, n);
            let b = random::hermitian(&mut r, n);
            let v: UnitaryOperator = random::gauge_unitary(&mut r, &sigma);
            let x = geometric_bound_at(&a, &b, &psi, 1.0, Convention::Standard).unwrap();
            let y = geometric_bound_at(&a, &b, &psi.gauge(&v).unwrap(), 1.0, Convention::Standard).unwrap();
            assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn flipped_convention_fails_the_audit() {
        let rho = DensityOperator::from_diagonal(&[0.8, 0.2]).unwrap();
        let err = geometric_bound_mixed_with(&spin(0, 1.0), &spin(1, 1.0), &rho, 1.0, Convention::Flipped);
        assert!(matches!(err, Err(Error::NormalizationAudit { .. })));
    }

    #[test]
    fn dispersion_identity_holds() {
        let mut r = rng(6);
        for _ in 0..200 {
            let sigma = random::spectrum(&mut r, 4, 2);
            let n = sigma.k_tot() + rand::Rng::random_range(&mut r, 0..2);
            let n = n.max(2);
            let rho = random::density_with_spectrum(&mut r, &sigma, n);
            let h = random::hermitian(&mut r, n);
            let d = dispersion_identity(&h, &rho, 0.6).unwrap();
            assert!(d.defect < 1e-9, "{d:?}");
        }
    }

    #[test]
    fn dispersion_special_cases() {
        let mut r = rng(7);
        // Pure states: no vertical part.
        let psi = random::pure_state(&mut r, 4);
        let h = random::hermitian(&mut r, 4);
        let d = dispersion_identity(&h, &projector(&psi), 1.0).unwrap();
        assert!(d.vertical.abs() < 1e-12);
        assert!((d.lhs - d.variance).abs() < 1e-10);
        // Stationary state: all dispersion is vertical.
        let rho = DensityOperator::from_diagonal(&[0.5, 0.3, 0.2]).unwrap();
        let h = HermitianOperator::from_real_diagonal(&[1.0, -0.5, 2.0]).unwrap();
        let d = dispersion_identity(&h, &rho, 1.0).unwrap();
        assert!(d.lhs.abs() < 1e-14);
        assert!((d.variance - d.vertical).abs() < 1e-12);
        // Parallel Hamiltonian: off-diagonal in the eigenbasis of ρ.
        let sigma = Spectrum::new(vec![0.7, 0.3], vec![1, 1]).unwrap();
        let rho = random::density_with_spectrum(&mut r, &sigma, 2);
        let v = rho.eigen().vectors;
        let h = HermitianOperator::hermitize(v.conjugate(pauli::sigma_x().as_dmatrix()));
        let d = dispersion_identity(&h, &rho, 1.0).unwrap();
        assert!(d.vertical.abs() < 1e-12);
        assert!((d.lhs - d.variance).abs() < 1e-12);
    }
}
