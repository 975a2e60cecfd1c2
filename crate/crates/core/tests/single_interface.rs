//! Homogeneous dielectric cylinder in vacuum: the exterior coefficient from
//! the transfer machinery against the direct boundary-value solve.

mod common;

use common::{c, cylinder, oracle};
use num_complex::Complex64;
use obh_core::error::Error;
use obh_core::layered_green::{scattering_coefficient, ModeParams, Polarization, ScatteringKernel};

fn sweep() -> Vec<(usize, Complex64, f64)> {
    let mut out = Vec::new();
    for &n in &[0usize, 1, 2, 5, 11] {
        for &omega in &[0.5, 1.0, 2.3] {
            for &hf in &[0.0, 0.35, 0.8, 1.25, 2.5] {
                out.push((n, c(hf * omega, 0.0), omega));
            }
            out.push((n, c(0.6 * omega, -0.2 * omega), omega));
        }
    }
    out
}

#[test]
fn literal_cascade_matches_boundary_solve() {
    let (mut checked, mut refused) = (0, 0);
    for &(eps2, a) in &[(c(2.25, 0.0), 1.7), (c(4.0, 0.33), 3.0)] {
        let stack = cylinder(eps2, a);
        for (n, h, omega) in sweep() {
            let mode = ModeParams::new(&stack, n, h, c(omega, 0.0)).unwrap();
            for pol in [Polarization::V, Polarization::H] {
                let ours = match scattering_coefficient(pol, &stack, &mode) {
                    Ok(v) => v,
                    // Unscaled columns of very different magnitude: the literal
                    // route refuses rather than returning a degraded value.
                    Err(Error::IllConditioned { .. }) if n >= 5 => {
                        refused += 1;
                        continue;
                    }
                    Err(e) => panic!("{pol:?} n={n} h={h} omega={omega}: {e}"),
                };
                checked += 1;
                let reference = oracle(pol, eps2, a, n, h, omega);
                let rel = (ours - reference).norm() / reference.norm().max(1e-300);
                assert!(
                    rel < 1e-8 || (ours - reference).norm() < 1e-14,
                    "{pol:?} n={n} h={h} omega={omega}: {ours} vs {reference}"
                );
            }
        }
    }
    assert!(checked > 4 * refused, "checked {checked}, refused {refused}");
}

#[test]
fn scaled_kernel_matches_boundary_solve() {
    for &(eps2, a) in &[(c(2.25, 0.0), 1.7), (c(4.0, 0.33), 3.0)] {
        let stack = cylinder(eps2, a);
        for &omega in &[0.5, 1.0, 2.3] {
            for pol in [Polarization::V, Polarization::H] {
                let kernel = ScatteringKernel::new(&stack, c(omega, 0.0), pol, 11).unwrap();
                for &hf in &[0.0, 0.35, 1.25, 2.5] {
                    let h = c(hf * omega, 0.0);
                    let coeffs = kernel.coefficients(h).unwrap();
                    for &n in &[0usize, 1, 2, 5, 11] {
                        let ours = coeffs[n].value();
                        let reference = oracle(pol, eps2, a, n, h, omega);
                        let rel = (ours - reference).norm() / reference.norm();
                        assert!(rel < 1e-8, "{pol:?} n={n} h={h} omega={omega}: {ours} vs {reference}");
                    }
                }
            }
        }
    }
}
