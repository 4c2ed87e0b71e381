//! Invariant suites run as one command, reported as JSON.

use std::f64::consts::PI;

use anyhow::{ensure, Result};
use qgeo::bundle::{connection, BundleTangent};
use qgeo::dynamics::{evolve_density, evolve_pure, expectation, hamiltonian_check, poisson_bracket, HamiltonianSystem};
use qgeo::holonomy::{circular_distance, geometric_phase, lift_curve, Generator, UnitaryFamily};
use qgeo::kahler::{metric_g, symplectic_omega};
use qgeo::linops::expm_skew;
use qgeo::measures::{fs_distance, hs_distance, kappa, probability, probability_trace, trace_distance};
use qgeo::states::spectrum_of;
use qgeo::uncertainty::{delta, dispersion_identity, geometric_bound_mixed_with, rs_bound, Convention};
use qgeo::{random, ComplexMatrix, HermitianOperator, PureState, C64};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{pool, Status};
use crate::config::ScenarioConfig;
use crate::output::Artifacts;
use crate::params::task_rng;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Params {
    /// Random instances per suite; the costlier suites use a fraction.
    #[serde(default = "default_samples")]
    samples: usize,
    /// Test hook: audit the brackets under the reciprocal normalization.
    #[serde(default)]
    flip_convention: bool,
}

fn default_samples() -> usize {
    1000
}

#[derive(Debug, Serialize)]
struct Suite {
    name: &'static str,
    pass: bool,
    worst_defect: f64,
    tolerance: f64,
    samples: usize,
    detail: String,
}

struct Ctx {
    samples: usize,
    hbar: f64,
    convention: Convention,
}

type SuiteFn = fn(&mut ChaCha8Rng, &Ctx) -> Result<Suite>;

const SUITES: [(&str, SuiteFn); 9] = [
    ("kahler_compatibility", kahler),
    ("normalization_audit", normalization),
    ("dispersion_identity", dispersion),
    ("uncertainty_inequalities", uncertainty),
    ("connection_axioms", connection_axioms),
    ("gauge_invariance", gauge_invariance),
    ("conservation", conservation),
    ("distance_axioms", distance_axioms),
    ("probability_consistency", probability_consistency),
];

fn suite(name: &'static str, worst: f64, tolerance: f64, samples: usize, detail: String) -> Suite {
    Suite { name, pass: worst <= tolerance, worst_defect: worst, tolerance, samples, detail }
}

fn dim(r: &mut ChaCha8Rng, max: usize) -> usize {
    r.random_range(2..=max)
}

fn kahler(r: &mut ChaCha8Rng, c: &Ctx) -> Result<Suite> {
    let (mut compat, mut symmetry, mut hamilton) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..c.samples {
        let n = dim(r, 6);
        let g = random::ginibre(r, n, 2);
        let (a, b) = (g.column(0).into_owned(), g.column(1).into_owned());
        let ia = &a * C64::new(0.0, 1.0);
        let w = symplectic_omega(&a, &b, c.hbar)?;
        compat = compat.max((w - metric_g(&ia, &b, c.hbar)?).abs());
        symmetry = symmetry
            .max((metric_g(&a, &b, c.hbar)? - metric_g(&b, &a, c.hbar)?).abs())
            .max((w + symplectic_omega(&b, &a, c.hbar)?).abs());
        let h = random::hermitian(r, n);
        let psi = random::pure_state(r, n);
        let (fd, exact) = hamiltonian_check(&h, &psi, &a, c.hbar, 1e-5)?;
        hamilton = hamilton.max((fd - exact).abs() / exact.abs().max(1.0));
    }
    let worst = compat.max(symmetry).max(hamilton);
    Ok(suite(
        "kahler_compatibility",
        worst,
        1e-7,
        c.samples,
        format!("Ω = G(J·,·) {compat:.1e}, symmetry {symmetry:.1e}, dH = Ω(X_H,·) {hamilton:.1e}"),
    ))
}

fn normalization(r: &mut ChaCha8Rng, c: &Ctx) -> Result<Suite> {
    let mut failures = 0;
    let mut first = String::new();
    for _ in 0..c.samples {
        let n = dim(r, 5);
        let (a, b) = (random::hermitian(r, n), random::hermitian(r, n));
        let psi = random::pure_state(r, n);
        let rank = r.random_range(1..=n);
        let rho = random::density(r, n, rank);
        let outcomes = [
            poisson_bracket(&a, &b, &psi, c.hbar).map(|_| ()),
            geometric_bound_mixed_with(&a, &b, &rho, c.hbar, c.convention).map(|_| ()),
        ];
        for e in outcomes.into_iter().filter_map(Result::err) {
            if failures == 0 {
                first = e.to_string();
            }
            failures += 1;
        }
    }
    let detail = if failures == 0 {
        format!("{:?} convention consistent", c.convention)
    } else {
        format!("{failures} audit failures under {:?} convention; first: {first}", c.convention)
    };
    Ok(suite("normalization_audit", failures as f64, 0.0, c.samples, detail))
}

fn dispersion(r: &mut ChaCha8Rng, c: &Ctx) -> Result<Suite> {
    let mut worst: f64 = 0.0;
    for _ in 0..c.samples {
        let n = dim(r, 6);
        let h = random::hermitian(r, n);
        let rank = r.random_range(1..=n.min(4));
        let rho = random::density(r, n, rank);
        worst = worst.max(dispersion_identity(&h, &rho, c.hbar)?.defect);
    }
    Ok(suite("dispersion_identity", worst, 1e-9, c.samples, format!("worst residual {worst:.2e}")))
}

fn uncertainty(r: &mut ChaCha8Rng, c: &Ctx) -> Result<Suite> {
    let mut worst: f64 = 0.0;
    for _ in 0..c.samples {
        let n = dim(r, 5);
        let (a, b) = (random::hermitian(r, n), random::hermitian(r, n));
        let rank = r.random_range(1..=n);
        let rho = random::density(r, n, rank);
        let product = delta(&a, &rho)? * delta(&b, &rho)?;
        let bound = rs_bound(&a, &b, &rho)?.max(geometric_bound_mixed_with(&a, &b, &rho, c.hbar, Convention::Standard)?);
        worst = worst.max(bound - product);
    }
    Ok(suite("uncertainty_inequalities", worst, 1e-10, c.samples, format!("largest bound excess {worst:.2e}")))
}

fn connection_axioms(r: &mut ChaCha8Rng, c: &Ctx) -> Result<Suite> {
    let (mut repro, mut equiv, mut skew, mut comm) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..c.samples {
        let sigma = random::spectrum(r, 6, 3);
        let n = sigma.k_tot() + r.random_range(0..=2);
        let psi = random::purification(r, &sigma, n);
        let xi = random::gauge_algebra(r, &sigma);
        let vert = BundleTangent::new(psi.clone(), ComplexMatrix::try_from(psi.as_dmatrix() * &xi)?)?;
        repro = repro.max((connection(&vert).as_dmatrix() - &xi).norm());
        let x = random::tangent(r, &psi);
        let a = connection(&BundleTangent::new(psi.clone(), ComplexMatrix::try_from(x.clone())?)?);
        let (s, k) = a.defects();
        skew = skew.max(s);
        comm = comm.max(k);
        let v = random::gauge_unitary(r, &sigma);
        let vm = v.as_dmatrix();
        let moved = BundleTangent::new(psi.gauge(&v)?, ComplexMatrix::try_from(&x * vm)?)?;
        equiv = equiv.max((connection(&moved).as_dmatrix() - a.conjugate_by(vm).as_dmatrix()).norm());
    }
    let worst = repro.max(equiv).max(skew).max(comm);
    Ok(suite(
        "connection_axioms",
        worst,
        1e-9,
        c.samples,
        format!("reproducing {repro:.1e}, equivariance {equiv:.1e}, skew {skew:.1e}, commutation {comm:.1e}"),
    ))
}

fn gauge_invariance(r: &mut ChaCha8Rng, c: &Ctx) -> Result<Suite> {
    let target = (c.samples / 20).max(3);
    let mut worst: f64 = 0.0;
    let mut curves = 0;
    while curves < target {
        let sigma = random::spectrum(r, 3, 2);
        let n = sigma.k_tot() + r.random_range(0..=1);
        let rho = random::density_with_spectrum(r, &sigma, n);
        // Integer spectra make the loop close at 2π.
        let d: Vec<f64> = (0..n).map(|_| r.random_range(-2..=2) as f64).collect();
        let u = random::unitary(r, n);
        let h = HermitianOperator::from_dmatrix(u.conjugate(HermitianOperator::from_real_diagonal(&d)?.as_dmatrix()))?;
        let fam = UnitaryFamily::new(Generator::Constant { hamiltonian: h, hbar: 1.0 }, 2.0 * PI, 3000)?;
        let curve = lift_curve(&fam, &rho)?;
        let Ok(base) = geometric_phase(&curve) else { continue };
        if base.trace.norm() < 1e-3 {
            continue;
        }
        let xi = random::gauge_algebra(r, &sigma);
        let v0 = random::gauge_unitary(r, &sigma);
        let freq = r.random_range(0.5..2.0);
        let regauged = curve.regauge(|t| {
            let s = ComplexMatrix::try_from(&xi * C64::new(0.4 * (freq * t).sin(), 0.0)).expect("finite");
            v0.as_dmatrix() * expm_skew(&s).expect("skew-Hermitian").as_dmatrix()
        })?;
        worst = worst.max(circular_distance(base.radians, geometric_phase(&regauged)?.radians));
        curves += 1;
    }
    Ok(suite("gauge_invariance", worst, 1e-7, curves, format!("worst phase change {worst:.2e}")))
}

fn conservation(r: &mut ChaCha8Rng, c: &Ctx) -> Result<Suite> {
    let systems = (c.samples / 50).max(2);
    let (mut energy, mut commuting, mut drift) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..systems {
        let n = dim(r, 5);
        let h = random::hermitian(r, n);
        let f = HermitianOperator::from_dmatrix(h.eig().map(|e| C64::new(e.sin() + e * e, 0.0)))?;
        let sys = HamiltonianSystem::new(h.clone(), c.hbar, 0.01, 1000)?;
        let psi = random::pure_state(r, n);
        let (e0, f0) = (expectation(&h, &psi)?, expectation(&f, &psi)?);
        for (_, s) in evolve_pure(&sys, &psi)?.iter() {
            energy = energy.max((expectation(&h, s)? - e0).abs());
            commuting = commuting.max((expectation(&f, s)? - f0).abs());
        }
        let rho = random::density(r, n, n);
        let s0 = spectrum_of(&rho, 1e-10)?;
        for (_, s) in evolve_density(&sys, &rho)?.iter().step_by(50) {
            let sp = spectrum_of(s, 1e-10)?;
            let d = s0.values().iter().zip(sp.values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            drift = drift.max(d);
        }
    }
    let worst = energy.max(commuting).max(drift);
    Ok(suite(
        "conservation",
        worst,
        1e-10,
        systems,
        format!("energy {energy:.1e}, commuting observable {commuting:.1e}, spectrum drift {drift:.1e}"),
    ))
}

type Distance = fn(&PureState, &PureState) -> qgeo::Result<f64>;

fn distance_axioms(r: &mut ChaCha8Rng, c: &Ctx) -> Result<Suite> {
    let metrics: [Distance; 4] = [fs_distance, trace_distance, hs_distance, kappa];
    let (mut tri, mut inv, mut sym, mut phase) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..c.samples {
        let n = dim(r, 6);
        let (x, y, z) = (random::pure_state(r, n), random::pure_state(r, n), random::pure_state(r, n));
        let u = random::unitary(r, n);
        let mv = |p: &PureState| PureState::normalized(u.as_dmatrix() * p.vector());
        let theta = r.random_range(0.0..2.0 * PI);
        for d in metrics {
            let dxy = d(&x, &y)?;
            sym = sym.max((dxy - d(&y, &x)?).abs());
            phase = phase.max(d(&x, &x.with_phase(theta))?);
            tri = tri.max(dxy - d(&x, &z)? - d(&z, &y)?);
            inv = inv.max((d(&mv(&x)?, &mv(&y)?)? - dxy).abs());
        }
    }
    // Phase-equivalent states sit at distance ~√ε for κ; the looser bound
    // applies to that entry only.
    let worst = tri.max(inv).max(sym);
    let pass = worst <= 1e-12 && phase <= 1e-7;
    Ok(Suite {
        name: "distance_axioms",
        pass,
        worst_defect: worst.max(phase),
        tolerance: 1e-12,
        samples: c.samples,
        detail: format!("triangle {tri:.1e}, unitary {inv:.1e}, symmetry {sym:.1e}, global phase {phase:.1e}"),
    })
}

fn probability_consistency(r: &mut ChaCha8Rng, c: &Ctx) -> Result<Suite> {
    let mut worst: f64 = 0.0;
    for _ in 0..c.samples {
        let n = dim(r, 8);
        let (a, b) = (random::pure_state(r, n), random::pure_state(r, n));
        let p = probability(&a, &b)?;
        worst = worst
            .max((p - kappa(&a, &b)?.cos().powi(2)).abs())
            .max((p - probability_trace(&a, &b)?).abs());
    }
    Ok(suite("probability_consistency", worst, 1e-12, c.samples, format!("worst disagreement {worst:.2e}")))
}

#[derive(Serialize)]
struct Report {
    all_pass: bool,
    convention: String,
    suites: Vec<Suite>,
}

pub fn run(cfg: &ScenarioConfig) -> Result<Status> {
    let params: Params = cfg.params()?;
    ensure!(params.samples > 0, "samples must be at least 1");
    let ctx = Ctx {
        samples: params.samples,
        hbar: cfg.hbar,
        convention: if params.flip_convention { Convention::Flipped } else { Convention::Standard },
    };
    let suites = pool(cfg)?.install(|| {
        SUITES
            .par_iter()
            .enumerate()
            .map(|(i, (name, f))| {
                let mut rng = task_rng(cfg.seed, i);
                // A suite that cannot run is reported as failing, not fatal.
                f(&mut rng, &ctx).unwrap_or_else(|e| Suite {
                    name,
                    pass: false,
                    worst_defect: f64::INFINITY,
                    tolerance: 0.0,
                    samples: 0,
                    detail: format!("error: {e:#}"),
                })
            })
            .collect::<Vec<_>>()
    });
    let all_pass = suites.iter().all(|s| s.pass);
    for s in &suites {
        println!("{} {}: {}", if s.pass { "PASS" } else { "FAIL" }, s.name, s.detail);
    }
    let report = Report { all_pass, convention: format!("{:?}", ctx.convention), suites };
    Artifacts::new(cfg)?.json("verify.json", &report)?;
    Ok(Status::from_bool(all_pass))
}
