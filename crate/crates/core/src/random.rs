//! Random instances for tests, property suites and search restarts.
//!
//! Unitaries are Haar distributed (QR of a Ginibre matrix with the phases of
//! `R` absorbed); everything else is built from them.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::bundle::project_tangent;
use crate::linops::{real, CVector, HermitianOperator, Mat, UnitaryOperator, C64};
use crate::states::{DensityOperator, PureState, Purification, Spectrum};

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> Mat {
    Mat::from_fn(rows, cols, |_, _| gaussian(rng))
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> HermitianOperator {
    HermitianOperator::hermitize(ginibre(rng, n, n))
}

pub fn unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> UnitaryOperator {
    let (mut q, r) = ginibre(rng, n, n).qr().unpack();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { real(1.0) };
        let col = q.column(j) * phase;
        q.set_column(j, &col);
    }
    UnitaryOperator::wrap(q)
}

pub fn pure_state<R: Rng + ?Sized>(rng: &mut R, n: usize) -> PureState {
    let v = CVector::from_fn(n, |_, _| gaussian(rng));
    let norm = v.norm();
    PureState::wrap(v / real(norm))
}

/// Density operator of the given rank with generic (distinct) eigenvalues.
pub fn density<R: Rng + ?Sized>(rng: &mut R, n: usize, rank: usize) -> DensityOperator {
    let rank = rank.clamp(1, n);
    let w: Vec<f64> = (0..rank).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = w.iter().sum();
    let mut d = vec![0.0; n];
    for (x, wi) in d.iter_mut().zip(&w) {
        *x = wi / total;
    }
    with_eigenvalues(rng, &d)
}

/// `U diag(d) U†` for a Haar random `U`.
pub fn with_eigenvalues<R: Rng + ?Sized>(rng: &mut R, d: &[f64]) -> DensityOperator {
    let u = unitary(rng, d.len());
    let diag = Mat::from_diagonal(&CVector::from_iterator(d.len(), d.iter().map(|&x| real(x))));
    DensityOperator::wrap(u.conjugate(&diag))
}

/// Density operator on `C^n` with spectrum `σ`.
pub fn density_with_spectrum<R: Rng + ?Sized>(
    rng: &mut R,
    sigma: &Spectrum,
    n: usize,
) -> DensityOperator {
    let mut d = sigma.diagonal();
    d.resize(n.max(d.len()), 0.0);
    with_eigenvalues(rng, &d)
}

/// Random multiplicities with `Σ mᵢ ≤ max_k_tot`, each at most `max_mult`.
pub fn multiplicities<R: Rng + ?Sized>(rng: &mut R, max_k_tot: usize, max_mult: usize) -> Vec<usize> {
    let k_tot = rng.random_range(1..=max_k_tot);
    let mut left = k_tot;
    let mut out = Vec::new();
    while left > 0 {
        let m = rng.random_range(1..=left.min(max_mult));
        out.push(m);
        left -= m;
    }
    out
}

/// Spectrum with random multiplicities and well separated eigenvalues.
pub fn spectrum<R: Rng + ?Sized>(rng: &mut R, max_k_tot: usize, max_mult: usize) -> Spectrum {
    let mults = multiplicities(rng, max_k_tot, max_mult);
    spectrum_with_multiplicities(rng, &mults)
}

pub fn spectrum_with_multiplicities<R: Rng + ?Sized>(rng: &mut R, mults: &[usize]) -> Spectrum {
    loop {
        let mut w: Vec<f64> = mults.iter().map(|_| rng.random_range(0.1..1.0)).collect();
        w.sort_by(|a, b| b.total_cmp(a));
        if w.windows(2).any(|p| p[0] - p[1] < 0.02) {
            continue;
        }
        let total: f64 = w.iter().zip(mults).map(|(x, &m)| x * m as f64).sum();
        let values = w.iter().map(|x| x / total).collect();
        return Spectrum::new(values, mults.to_vec()).expect("normalized by construction");
    }
}

/// Random point of `S(σ)` in `L(K, C^n)`, `n ≥ k_tot`.
pub fn purification<R: Rng + ?Sized>(rng: &mut R, sigma: &Spectrum, n: usize) -> Purification {
    let k = sigma.k_tot();
    assert!(n >= k, "H must be at least as large as K");
    let u = unitary(rng, n);
    let mut map = Mat::zeros(n, k);
    for (j, lam) in sigma.diagonal().iter().enumerate() {
        map.set_column(j, &(u.as_dmatrix().column(j) * real(lam.sqrt())));
    }
    Purification::wrap(map, sigma.clone())
}

/// Block diagonal Haar unitary in `U(σ)`.
pub fn gauge_unitary<R: Rng + ?Sized>(rng: &mut R, sigma: &Spectrum) -> UnitaryOperator {
    let k = sigma.k_tot();
    let mut v = Mat::zeros(k, k);
    for b in sigma.blocks() {
        let m = b.len();
        let u = unitary(rng, m);
        v.view_mut((b.start, b.start), (m, m)).copy_from(u.as_dmatrix());
    }
    UnitaryOperator::wrap(v)
}

/// Random anti-Hermitian block diagonal matrix in `u(σ)`.
pub fn gauge_algebra<R: Rng + ?Sized>(rng: &mut R, sigma: &Spectrum) -> Mat {
    let k = sigma.k_tot();
    let mut xi = Mat::zeros(k, k);
    for b in sigma.blocks() {
        let m = b.len();
        let h = hermitian(rng, m);
        let block = h.as_dmatrix() * C64::new(0.0, 1.0);
        xi.view_mut((b.start, b.start), (m, m)).copy_from(&block);
    }
    xi
}

/// Random tangent vector to `S(σ)` at `ψ`.
pub fn tangent<R: Rng + ?Sized>(rng: &mut R, psi: &Purification) -> Mat {
    let y = ginibre(rng, psi.dim(), psi.k_tot());
    project_tangent(psi, &y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linops::unitarity_defect;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn unitaries_are_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 1..10 {
            assert!(unitarity_defect(unitary(&mut rng, n).as_dmatrix()) < 1e-13);
        }
    }

    #[test]
    fn seeded_streams_repeat() {
        let a = hermitian(&mut ChaCha8Rng::seed_from_u64(5), 4);
        let b = hermitian(&mut ChaCha8Rng::seed_from_u64(5), 4);
        assert_eq!(a, b);
    }

    #[test]
    fn densities_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n in 2..7 {
            for rank in 1..=n {
                let rho = density(&mut rng, n, rank);
                assert!(DensityOperator::new(rho.operator().clone()).is_ok());
                let nonzero = rho.eigen().values.iter().filter(|&&x| x > 1e-10).count();
                assert_eq!(nonzero, rank);
            }
        }
    }

    #[test]
    fn multiplicities_respect_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let m = multiplicities(&mut rng, 6, 3);
            assert!(m.iter().sum::<usize>() <= 6);
            assert!(m.iter().all(|&x| (1..=3).contains(&x)));
        }
    }

    #[test]
    fn purifications_are_on_the_level_set() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..50 {
            let sigma = spectrum(&mut rng, 6, 3);
            let psi = purification(&mut rng, &sigma, 7);
            assert!(Purification::new(psi.map().clone(), sigma).is_ok());
        }
    }
}
