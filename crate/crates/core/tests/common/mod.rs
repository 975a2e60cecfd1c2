//! Homogeneous dielectric cylinder in vacuum solved directly from the
//! boundary conditions on the axial field components `E_z`, `H_z`; the
//! reference for the exterior scattering coefficient.
//!
//! With fields `~ e^{i(n phi + h z - omega t)}` the tangential components
//! follow from the axial ones,
//!
//! ```text
//!   E_phi = (i/eta^2) [ (i h n / rho) E_z - omega mu  d_rho H_z ]
//!   H_phi = (i/eta^2) [ (i h n / rho) H_z + omega eps d_rho E_z ]
//! ```
//!
//! and the four continuity conditions at `rho = a` fix the outgoing and
//! interior amplitudes for a unit regular incident wave of either family.

#![allow(dead_code)]

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;
use obh_core::layered_green::Polarization;
use obh_core::medium::{LayerMaterial, LayerStack};
use obh_core::specfun::{deriv_pair, Kind};

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn eta_of(k: Complex64, h: Complex64) -> Complex64 {
    let e = (k * k - h * h).sqrt();
    if e.im < 0.0 {
        -e
    } else {
        e
    }
}

/// Outgoing-to-incident ratio of `E_z` (TM) or `H_z` (TE) outside a cylinder
/// of permittivity `eps2` and radius `a`.
pub fn oracle(pol: Polarization, eps2: Complex64, a: f64, n: usize, h: Complex64, omega: f64) -> Complex64 {
    let i = c(0.0, 1.0);
    let k1 = c(omega, 0.0);
    let k2 = eps2.sqrt() * omega;
    let (e1, e2) = (eta_of(k1, h), eta_of(k2, h));
    let (j1, dj1) = deriv_pair(Kind::J, n, e1 * a).unwrap();
    let (h1, dh1) = deriv_pair(Kind::H1, n, e1 * a).unwrap();
    let (j2, dj2) = deriv_pair(Kind::J, n, e2 * a).unwrap();
    let ihn = i * h * n as f64 / a;
    let w = c(omega, 0.0);
    let eps1 = c(1.0, 0.0);

    // Tangential components produced by a unit amplitude of E_z or H_z carried
    // by Z (value z, derivative dz w.r.t. the argument) in a medium (eta, eps).
    let tangential = |eta: Complex64, eps: Complex64, z: Complex64, dz: Complex64, electric: bool| {
        let pre = i / (eta * eta);
        if electric {
            // (E_z, H_z, E_phi, H_phi)
            [z, c(0.0, 0.0), pre * ihn * z, pre * w * eps * eta * dz]
        } else {
            [c(0.0, 0.0), z, pre * (-w) * eta * dz, pre * ihn * z]
        }
    };

    // Unknowns: exterior outgoing E_z, H_z amplitudes; interior E_z, H_z.
    let cols = [
        tangential(e1, eps1, h1, dh1, true),
        tangential(e1, eps1, h1, dh1, false),
        tangential(e2, eps2, j2, dj2, true).map(|v| -v),
        tangential(e2, eps2, j2, dj2, false).map(|v| -v),
    ];
    let incident = match pol {
        Polarization::V => tangential(e1, eps1, j1, dj1, true),
        Polarization::H => tangential(e1, eps1, j1, dj1, false),
    };
    let m = Matrix4::from_fn(|r, col| cols[col][r]);
    let rhs = Vector4::from_fn(|r, _| -incident[r]);
    let x = m.lu().solve(&rhs).expect("nonsingular boundary system");
    match pol {
        Polarization::V => x[0],
        Polarization::H => x[1],
    }
}

pub fn cylinder(eps2: Complex64, a: f64) -> LayerStack {
    LayerStack::new(vec![a], vec![LayerMaterial::Vacuum, LayerMaterial::Constant(eps2)]).unwrap()
}

