//! Two-atom rates and shifts: free-space normalisation through both the
//! closed forms and the cylindrical mode expansion, the superradiant limit,
//! and positivity of the collective rates next to the layered shell.

use num_complex::Complex64;
use obh_core::atom_dynamics::{
    decay_rates, dipole_shift, vacuum_collective_rate, vacuum_dipole_shift, vacuum_rates_mode_sum, AtomPair,
    CollectiveResponse,
};
use obh_core::medium::{discretize_shell, LayerSampling, LayerStack, LorentzModel, ObhGeometry};
use obh_core::sommerfeld::QuadraturePolicy;
use obh_core::Error;
use std::f64::consts::PI;

fn reference_stack() -> LayerStack {
    let model = LorentzModel::new(0.1, 1.0, 0.01).unwrap();
    let geometry = ObhGeometry::new(8.0 * PI, 4.0 * PI, Complex64::new(4.0, 0.33)).unwrap();
    discretize_shell(&geometry, &model, 10, LayerSampling::InnerInterface).unwrap()
}

fn separations() -> Vec<f64> {
    (0..20).map(|i| 0.05 * (1.0 + i as f64).powf(2.2) * PI).collect()
}

#[test]
fn mode_expansion_reproduces_free_space_rates() {
    let policy = QuadraturePolicy::default();
    for x in separations() {
        let atoms = AtomPair::new(1.0, x / 2.0).unwrap();
        let rates = vacuum_rates_mode_sum(&atoms, &policy).unwrap();
        let ab = vacuum_collective_rate(x);
        assert!(rates.converged);
        assert!((rates.gamma - 1.0).abs() < 1e-9, "x={x}: gamma {}", rates.gamma);
        for (ours, exact) in [(rates.gamma_plus, 1.0 + ab), (rates.gamma_minus, 1.0 - ab)] {
            assert!((ours - exact).abs() < 1e-7 * exact.abs().max(1e-3), "x={x}: {ours} vs {exact}");
        }
    }
}

#[test]
fn vacuum_stack_gives_free_space_values() {
    let stack = LayerStack::vacuum(vec![8.0 * PI, 4.0 * PI]).unwrap();
    let policy = QuadraturePolicy {
        n_max: 20,
        ..Default::default()
    };
    let atoms = AtomPair::new(0.1, 8.1 * PI).unwrap();
    let response = CollectiveResponse::compute(&atoms, &stack, &policy).unwrap();
    let x = atoms.size_parameter();
    assert_eq!(response.rates.gamma, 1.0);
    assert_eq!(response.rates.gamma_ab, vacuum_collective_rate(x));
    assert!((response.rates.gamma_ab + 0.2422).abs() < 5e-4);
    assert!((response.shifts.delta_ab - vacuum_dipole_shift(x)).abs() < 1e-12);
    assert_eq!(response.shifts.lamb, 0.0);
}

#[test]
fn superradiant_and_far_limits() {
    assert!((vacuum_collective_rate(1e-3) - 1.0).abs() < 1e-5);
    let atoms = AtomPair::new(1.0, 0.5e-3).unwrap();
    let rates = vacuum_rates_mode_sum(&atoms, &QuadraturePolicy::default()).unwrap();
    assert!((rates.gamma_ab - 1.0).abs() < 1e-5);
    assert!(rates.gamma_minus.abs() < 1e-5);
    for &x in &[1e4, 1e6] {
        assert!(vacuum_dipole_shift(x).abs() < 1.0 / x);
        assert!(vacuum_collective_rate(x).abs() < 2.0 / x);
    }
}

#[test]
fn collective_rates_stay_nonnegative_near_the_shell() {
    let stack = reference_stack();
    let policy = QuadraturePolicy {
        n_max: 40,
        rel_tol: 1e-7,
        ..Default::default()
    };
    for &(omega, r) in &[(0.1, 8.1 * PI), (1.0, 8.1 * PI), (0.5, 8.6 * PI), (2.0, 9.0 * PI)] {
        let atoms = AtomPair::new(omega, r).unwrap();
        let rates = decay_rates(&atoms, &stack, &policy).unwrap();
        assert!(rates.gamma_plus >= 0.0 && rates.gamma_minus >= 0.0, "omega={omega}: {rates:?}");
        assert!(rates.gamma > 1.0, "the lossy shell adds decay channels: {rates:?}");
        let shifts = dipole_shift(&atoms, &stack, &policy).unwrap();
        assert!(shifts.delta_ab.is_finite() && shifts.lamb.is_finite());
        assert!((shifts.delta_plus - shifts.delta_minus - 2.0 * shifts.delta_ab).abs() < 1e-12);
    }
}

#[test]
fn atoms_inside_the_shell_are_rejected() {
    let stack = reference_stack();
    let atoms = AtomPair::new(1.0, 7.9 * PI).unwrap();
    let err = decay_rates(&atoms, &stack, &QuadraturePolicy::default()).unwrap_err();
    assert!(matches!(err, Error::InvalidGeometry(_)));
    assert!(AtomPair::new(-1.0, 30.0).is_err());
}
