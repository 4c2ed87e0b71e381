use std::f64::consts::PI;

use approx::assert_relative_eq;
use qgeo::dynamics::{evolve_density, HamiltonianSystem};
use qgeo::holonomy::{
    circular_distance, geometric_phase, horizontal_lift, horizontality_defect, lift_curve, qubit_closed_form, qubit_phase,
    FamilyDescriptor, UnitaryFamily,
};
use qgeo::linops::pauli;
use qgeo::measures::{curve_length, dynamic_distance, DistanceReport, SearchConfig};
use qgeo::states::{purify, spectrum_of};
use qgeo::uncertainty::{dispersion_identity, report, UncertaintyReport};
use qgeo::{random, DensityOperator, Error, PureState, Spectrum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn phase_from_a_json_descriptor() {
    let js = r#"{"generator": "diag_phase", "params": {"rates": [1.0, -1.0]}, "tau": 3.141592653589793, "steps": 2048}"#;
    let d: FamilyDescriptor = serde_json::from_str(js).unwrap();
    let fam = UnitaryFamily::from_descriptor(&d).unwrap();
    let rho = qgeo::holonomy::mixed_qubit(0.9, 0.7).unwrap();
    let curve = lift_curve(&fam, &rho).unwrap();
    let r = geometric_phase(&curve).unwrap();
    assert!(r.closed);
    assert!(circular_distance(r.radians, qubit_closed_form(0.9, 0.7)) < 1e-6);
    let lift = horizontal_lift(&curve).unwrap();
    assert!(horizontality_defect(&lift).unwrap() < 1e-6);
}

#[test]
fn pure_limit_of_the_mixed_phase_is_minus_half_the_solid_angle() {
    for &theta in &[0.4, 1.2, 2.2] {
        let r = qubit_phase(theta, 1.0, 4096).unwrap();
        // Solid angle of the latitude cap: 2π(1 − cos ϑ).
        let expect = -0.5 * 2.0 * PI * (1.0 - f64::cos(theta));
        assert!(circular_distance(r.radians, expect) < 1e-6);
    }
}

#[test]
fn too_coarse_grids_are_rejected() {
    let err = qubit_phase(PI / 2.0, 0.5, 8).unwrap_err();
    assert!(matches!(err, Error::InvalidCurve(_) | Error::StepSize { .. }), "{err}");
}

#[test]
fn energy_spread_bounds_the_speed_along_trajectories() {
    let mut r = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..5 {
        let sigma = random::spectrum(&mut r, 3, 1);
        let n = sigma.k_tot() + 1;
        let rho = random::density_with_spectrum(&mut r, &sigma, n);
        let h = random::hermitian(&mut r, n);
        let hbar = 0.9;
        let sys = HamiltonianSystem::new(h.clone(), hbar, 0.002, 500).unwrap();
        let traj = evolve_density(&sys, &rho).unwrap();
        let len = curve_length(&traj, &h, hbar).unwrap().value;
        let d = dispersion_identity(&h, &rho, hbar).unwrap();
        // Length ≤ (1/ħ)∫ΔH dt, with ΔH constant along the flow.
        assert!(len <= d.variance.sqrt() / hbar * sys.duration() + 1e-9);
        assert_relative_eq!(len, d.lhs.sqrt() / hbar * sys.duration(), max_relative = 1e-8);
        let s = spectrum_of(traj.states.last().unwrap(), 1e-10).unwrap();
        assert!(s.approx_eq(&sigma, 1e-10));
    }
}

#[test]
fn dynamic_distance_dominates_the_length_of_any_connecting_trajectory() {
    let (l1, l2, eps) = (0.8, 0.2, 0.03);
    let rho0 = DensityOperator::from_diagonal(&[l1, l2]).unwrap();
    let h = pauli::sigma_x().scaled(eps);
    let sys = HamiltonianSystem::new(h.clone(), 1.0, 1.0 / 128.0, 128).unwrap();
    let traj = evolve_density(&sys, &rho0).unwrap();
    let len = curve_length(&traj, &h, 1.0).unwrap().value;
    let cfg = SearchConfig { restarts: 4, ..SearchConfig::default() };
    let d = dynamic_distance(&rho0, traj.states.last().unwrap(), &cfg).unwrap();
    assert!(d.value <= len * (1.0 + 1e-6));
    assert!(d.value >= 0.9 * len);
    let js = serde_json::to_string(&d).unwrap();
    let back: DistanceReport = serde_json::from_str(&js).unwrap();
    assert_eq!(back.method, d.method);
}

#[test]
fn reports_serialize_with_their_field_names() {
    let rho = DensityOperator::from_diagonal(&[0.8, 0.2]).unwrap();
    let rep = report(&pauli::sigma_x(), &pauli::sigma_y(), &rho, 1.0).unwrap();
    let js = serde_json::to_value(rep).unwrap();
    for key in ["delta_a", "delta_b", "product", "rs_bound", "geometric_bound", "slack"] {
        assert!(js.get(key).is_some(), "{key}");
    }
    let back: UncertaintyReport = serde_json::from_value(js).unwrap();
    assert_eq!(back, rep);

    let s: Spectrum = serde_json::from_str(r#"{"values": [0.6, 0.2], "multiplicities": [1, 2]}"#).unwrap();
    assert_eq!(s.k_tot(), 3);
    let psi: PureState = serde_json::from_str(r#"{"vector": [[0.6, 0.0], [0.0, 0.8]]}"#).unwrap();
    assert_eq!(psi.dim(), 2);
    let rho2: DensityOperator = serde_json::from_value(serde_json::to_value(&rho).unwrap()).unwrap();
    assert_eq!(rho2.as_dmatrix(), rho.as_dmatrix());
    assert!(purify(&rho2, 1e-10).is_ok());
}
