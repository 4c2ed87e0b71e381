//! Kähler data on `H` and on the projective space `P(H)`.
//!
//! On `H`: `G(a, b) = 2ħ Re⟨a|b⟩` and `Ω(a, b) = 2ħ Im⟨a|b⟩`, with the complex
//! structure given by multiplication by `i`, so `G(a, b) = Ω(a, ib)`.
//!
//! On `P(H)` tangent vectors at the ray of `ψ` are represented by vectors in
//! `(Cψ)^⊥`; the Fubini–Study forms are `G` and `Ω` evaluated on the projected
//! representatives. All `fs_*` functions project internally.

use crate::error::{Error, Result};
use crate::linops::{CVector, C64};
use crate::states::PureState;

fn check(a: &CVector, b: &CVector) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::dims(a.len(), b.len()));
    }
    Ok(())
}

/// `G(a, b) = 2ħ Re⟨a|b⟩`.
pub fn metric_g(a: &CVector, b: &CVector, hbar: f64) -> Result<f64> {
    check(a, b)?;
    Ok(2.0 * hbar * a.dotc(b).re)
}

/// `Ω(a, b) = 2ħ Im⟨a|b⟩`.
pub fn symplectic_omega(a: &CVector, b: &CVector, hbar: f64) -> Result<f64> {
    check(a, b)?;
    Ok(2.0 * hbar * a.dotc(b).im)
}

/// A tangent representative at the ray of `base`.
#[derive(Clone, Debug, PartialEq)]
pub struct TangentAtRay {
    pub base: PureState,
    pub vector: CVector,
}

impl TangentAtRay {
    pub fn new(base: PureState, vector: CVector) -> Result<Self> {
        check(base.vector(), &vector)?;
        Ok(TangentAtRay { base, vector })
    }
}

/// `X − ⟨ψ|X⟩ψ`.
pub fn project_perp(t: &TangentAtRay) -> TangentAtRay {
    TangentAtRay {
        base: t.base.clone(),
        vector: perp(t.base.vector(), &t.vector),
    }
}

pub(crate) fn perp(psi: &CVector, x: &CVector) -> CVector {
    x - psi * psi.dotc(x)
}

/// `2ħ(⟨φ₁|φ₂⟩ − ⟨φ₁|ψ⟩⟨ψ|φ₂⟩)`, the Fubini–Study Hermitian form at `[ψ]`.
pub fn fs_hermitian(psi: &PureState, phi1: &CVector, phi2: &CVector, hbar: f64) -> Result<C64> {
    check(psi.vector(), phi1)?;
    check(psi.vector(), phi2)?;
    let p1 = perp(psi.vector(), phi1);
    let p2 = perp(psi.vector(), phi2);
    Ok(p1.dotc(&p2) * (2.0 * hbar))
}

/// Fubini–Study metric, the real part of [`fs_hermitian`].
pub fn fs_metric(psi: &PureState, phi1: &CVector, phi2: &CVector, hbar: f64) -> Result<f64> {
    Ok(fs_hermitian(psi, phi1, phi2, hbar)?.re)
}

/// Fubini–Study symplectic form, the imaginary part of [`fs_hermitian`].
pub fn fs_symplectic(psi: &PureState, phi1: &CVector, phi2: &CVector, hbar: f64) -> Result<f64> {
    Ok(fs_hermitian(psi, phi1, phi2, hbar)?.im)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linops::{c, I};
    use crate::random;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn e(n: usize, k: usize) -> CVector {
        PureState::basis(n, k).vector().clone()
    }

    fn rand_vec(rng: &mut ChaCha8Rng, n: usize) -> CVector {
        random::ginibre(rng, n, 1).column(0).into_owned()
    }

    #[test]
    fn g_and_omega_examples() {
        let e1 = e(2, 0);
        let ie1 = &e1 * I;
        assert_eq!(metric_g(&e1, &e1, 1.0).unwrap(), 2.0);
        assert_eq!(metric_g(&e1, &ie1, 1.0).unwrap(), 0.0);
        assert_eq!(symplectic_omega(&e1, &ie1, 1.0).unwrap(), 2.0);
        assert!(metric_g(&e1, &e(3, 0), 1.0).is_err());

        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (a, b) = (rand_vec(&mut rng, 4), rand_vec(&mut rng, 4));
        assert_eq!(metric_g(&a, &b, 0.7).unwrap(), metric_g(&b, &a, 0.7).unwrap());
        assert_eq!(symplectic_omega(&a, &a, 0.7).unwrap(), 0.0);
        assert_eq!(symplectic_omega(&a, &b, 0.7).unwrap(), -symplectic_omega(&b, &a, 0.7).unwrap());
    }

    #[test]
    fn compatibility_triple() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n in 1..7 {
            let (a, b) = (rand_vec(&mut rng, n), rand_vec(&mut rng, n));
            let hbar = 0.3 + n as f64 * 0.2;
            let g = metric_g(&a, &b, hbar).unwrap();
            let o1 = symplectic_omega(&a, &(&b * I), hbar).unwrap();
            let o2 = -symplectic_omega(&(&a * I), &b, hbar).unwrap();
            assert!((g - o1).abs() < 1e-12 && (g - o2).abs() < 1e-12);
        }
    }

    #[test]
    fn project_perp_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let psi = random::pure_state(&mut rng, 3);
        let t = TangentAtRay::new(psi.clone(), psi.vector().clone()).unwrap();
        assert!(project_perp(&t).vector.norm() < 1e-15);

        let psi = PureState::basis(2, 0);
        let x = CVector::from_vec(vec![c(0.0, 0.0), c(0.3, 0.4)]);
        let t = TangentAtRay::new(psi.clone(), x.clone()).unwrap();
        assert_eq!(project_perp(&t).vector, x);

        let t = TangentAtRay::new(psi, CVector::from_vec(vec![c(1.0, 0.0), c(1.0, 0.0)])).unwrap();
        assert_eq!(project_perp(&t).vector, CVector::from_vec(vec![c(0.0, 0.0), c(1.0, 0.0)]));
    }

    #[test]
    fn project_perp_is_idempotent_and_self_adjoint() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for n in 2..8 {
            let psi = random::pure_state(&mut rng, n);
            let (x, y) = (rand_vec(&mut rng, n), rand_vec(&mut rng, n));
            let px = perp(psi.vector(), &x);
            let py = perp(psi.vector(), &y);
            assert!(psi.vector().dotc(&px).norm() < 1e-12);
            assert!((perp(psi.vector(), &px) - &px).norm() < 1e-12);
            let lhs = metric_g(&px, &y, 1.0).unwrap();
            let rhs = metric_g(&x, &py, 1.0).unwrap();
            assert!((lhs - rhs).abs() < 1e-12);
        }
    }

    #[test]
    fn fs_examples() {
        let psi = PureState::basis(3, 0);
        let phi = e(3, 2);
        assert!((fs_hermitian(&psi, &phi, &phi, 1.0).unwrap() - c(2.0, 0.0)).norm() < 1e-15);
        assert_eq!(fs_metric(&psi, &phi, &phi, 1.0).unwrap(), 2.0);
        assert_eq!(fs_symplectic(&psi, &phi, &phi, 1.0).unwrap(), 0.0);

        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let psi = random::pure_state(&mut rng, 3);
        let phi2 = rand_vec(&mut rng, 3);
        assert!(fs_hermitian(&psi, psi.vector(), &phi2, 1.0).unwrap().norm() < 1e-15);

        let phi1 = rand_vec(&mut rng, 3);
        let a = fs_hermitian(&psi, &phi1, &phi2, 1.0).unwrap();
        let b = fs_hermitian(&psi.with_phase(0.9), &phi1, &phi2, 1.0).unwrap();
        assert!((a - b).norm() < 1e-14);

        let g = fs_metric(&psi, &phi1, &phi2, 1.0).unwrap();
        let w = fs_symplectic(&psi, &phi1, &(&phi2 * I), 1.0).unwrap();
        assert!((g - w).abs() < 1e-12);
    }

    #[test]
    fn fs_unitary_invariance_and_submersion() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for n in 2..8 {
            let psi = random::pure_state(&mut rng, n);
            let (p1, p2) = (rand_vec(&mut rng, n), rand_vec(&mut rng, n));
            let u = random::unitary(&mut rng, n);
            let um = u.as_dmatrix();
            let upsi = PureState::wrap(um * psi.vector());
            let before = fs_metric(&psi, &p1, &p2, 1.0).unwrap();
            let after = fs_metric(&upsi, &(um * &p1), &(um * &p2), 1.0).unwrap();
            assert!((before - after).abs() < 1e-10);

            let (q1, q2) = (perp(psi.vector(), &p1), perp(psi.vector(), &p2));
            let w = fs_symplectic(&psi, &q1, &q2, 1.0).unwrap();
            assert!((w - symplectic_omega(&q1, &q2, 1.0).unwrap()).abs() < 1e-12);
            let g = fs_metric(&psi, &q1, &q2, 1.0).unwrap();
            assert!((g - metric_g(&q1, &q2, 1.0).unwrap()).abs() < 1e-12);
        }
    }
}
