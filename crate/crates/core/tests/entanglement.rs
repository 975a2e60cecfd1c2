//! Negativity of the single-excitation two-atom family: agreement of the
//! closed form with the partial-transpose eigenvalues, state validity along
//! traces, limits and the short-time oscillation period.

use num_complex::Complex64;
use obh_core::atom_dynamics::{amplitudes, RateSet, ShiftSet};
use obh_core::entanglement::{
    density_matrix, negativity_closed, negativity_eigen, uniform_times, NegativityTrace, TwoAtomState,
};
use obh_core::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn random_pair(rng: &mut ChaCha8Rng) -> (RateSet, ShiftSet) {
    let gamma = rng.gen_range(0.05..3.0);
    let gamma_ab = gamma * rng.gen_range(-1.0..1.0);
    let rates = RateSet::new(gamma, gamma_ab);
    let shifts = ShiftSet::new(rng.gen_range(-0.5..0.5), rng.gen_range(-2.0..2.0));
    (rates, shifts)
}

#[test]
fn closed_form_matches_eigenvalues() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let times = uniform_times(20.0, 401).unwrap();
    for _ in 0..200 {
        let (rates, shifts) = random_pair(&mut rng);
        let trace = NegativityTrace::compute(&rates, &shifts, &times).unwrap();
        assert!(trace.max_route_difference() < 1e-12, "{rates:?} {shifts:?}");
        assert_eq!(trace.samples[0].neg_eigen, 0.0);
        assert_eq!(trace.samples[0].neg_closed, 0.0);
        assert!(trace.samples.iter().all(|s| s.neg_eigen >= 0.0));
    }
}

#[test]
fn populations_are_conserved_and_states_positive() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..50 {
        let (rates, shifts) = random_pair(&mut rng);
        for &t in &[0.0, 0.01, 0.7, 3.0, 40.0] {
            let (cp, cm) = amplitudes(&rates, &shifts, t);
            let s = density_matrix(cp, cm).unwrap().at(t);
            assert!((cp.norm_sqr() + cm.norm_sqr() + s.rho_ll - 1.0).abs() < 1e-12);
            s.validate().unwrap();
            assert!(s.eigenvalues()[0] >= -1e-10);
            let m = s.product_basis();
            assert_eq!(m, m.adjoint());
        }
    }
}

#[test]
fn independent_atoms_stay_separable() {
    let rates = RateSet::new(1.3, 0.0);
    let shifts = ShiftSet::new(0.2, 0.0);
    for t in uniform_times(30.0, 301).unwrap() {
        assert!(negativity_closed(&rates, &shifts, t).unwrap() < 1e-15);
        let (cp, cm) = amplitudes(&rates, &shifts, t);
        assert!(negativity_eigen(&density_matrix(cp, cm).unwrap()) < 1e-15);
    }
}

#[test]
fn pure_symmetric_state_is_maximally_entangled() {
    let s = density_matrix(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)).unwrap();
    assert!((negativity_eigen(&s) - 0.5).abs() < 1e-15);
    let ground = TwoAtomState {
        t: 0.0,
        rho_pp: 0.0,
        rho_mm: 0.0,
        rho_pm: Complex64::new(0.0, 0.0),
        rho_ll: 1.0,
    };
    assert_eq!(negativity_eigen(&ground), 0.0);
}

#[test]
fn negativity_decays_at_long_times() {
    let rates = RateSet::new(1.32, 0.71);
    let shifts = ShiftSet::new(0.0, -0.21);
    let trace = NegativityTrace::compute(&rates, &shifts, &uniform_times(50.0, 501).unwrap()).unwrap();
    assert!(trace.samples.last().unwrap().neg_eigen < 1e-6);
}

#[test]
fn oscillation_period_follows_the_shift() {
    // |delta_AB| >> Gamma: maxima of cos^2(2 delta t) modulation.
    let delta = 8.0;
    let rates = RateSet::new(0.05, 0.04);
    let shifts = ShiftSet::new(0.0, delta);
    let times = uniform_times(3.0, 30_001).unwrap();
    let trace = NegativityTrace::compute(&rates, &shifts, &times).unwrap();
    let maxima = trace.local_maxima();
    assert!(maxima.len() >= 10);
    let spacing = (maxima[maxima.len() - 1] - maxima[0]) / (maxima.len() - 1) as f64;
    let expected = PI / (2.0 * delta);
    assert!((spacing - expected).abs() < 0.02 * expected, "{spacing} vs {expected}");
}

#[test]
fn inconsistent_inputs_are_rejected() {
    let rates = RateSet::new(1.0, 0.5);
    let shifts = ShiftSet::new(0.0, 0.1);
    assert!(matches!(negativity_closed(&rates, &shifts, -1.0), Err(Error::FamilyMismatch(_))));
    let broken = RateSet {
        gamma_plus: 3.0,
        ..rates
    };
    assert!(matches!(negativity_closed(&broken, &shifts, 1.0), Err(Error::FamilyMismatch(_))));
    let negative = RateSet::new(1.0, 1.5);
    assert!(matches!(negativity_closed(&negative, &shifts, 1.0), Err(Error::FamilyMismatch(_))));
}
