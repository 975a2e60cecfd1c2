//! Structural properties of the transfer machinery and the scattering Green
//! element: transparent interfaces, cascade associativity, agreement between
//! the literal and the scaled coefficient routes, vacuum limits, reflection
//! symmetry in frequency, reciprocity and contour independence.

use num_complex::Complex64;
use obh_core::layered_green::{
    interface_transfer, scattering_coefficient, scattering_green_zz, transmission_matrix, FieldPoint, LayerMode,
    ModeIntegrals, ModeParams, Polarization, ScatteringKernel, TransferCascade,
};
use obh_core::medium::{discretize_shell, LayerMaterial, LayerSampling, LayerStack, LorentzModel, ObhGeometry};
use obh_core::sommerfeld::{integrate_path, PathSegment, QuadraturePolicy};
use std::f64::consts::PI;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn reference_stack(eps_core: Complex64) -> LayerStack {
    let model = LorentzModel::new(0.1, 1.0, 0.01).unwrap();
    let geometry = ObhGeometry::new(8.0 * PI, 4.0 * PI, eps_core).unwrap();
    discretize_shell(&geometry, &model, 10, LayerSampling::InnerInterface).unwrap()
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

#[test]
fn transparent_interface_is_identity() {
    let eps = c(2.0, 0.1);
    let stack = LayerStack::new(
        vec![3.0, 2.0],
        vec![LayerMaterial::Vacuum, LayerMaterial::Constant(eps), LayerMaterial::Constant(eps)],
    )
    .unwrap();
    for &(n, h) in &[(0usize, c(0.3, 0.0)), (3, c(0.8, -0.1)), (6, c(2.5, 0.0))] {
        let mode = ModeParams::new(&stack, n, h, c(1.0, 0.0)).unwrap();
        for pol in [Polarization::V, Polarization::H] {
            let outer = transmission_matrix(pol, 2, 2.0, &mode).unwrap();
            let inner = transmission_matrix(pol, 3, 2.0, &mode).unwrap();
            assert_eq!(outer, inner);
            let t = interface_transfer(pol, 2, &stack, &mode).unwrap();
            for i in 0..4 {
                for j in 0..4 {
                    let e = if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) };
                    assert!((t[(i, j)] - e).norm() < 1e-12, "{pol:?} n={n}: T[{i}{j}] = {}", t[(i, j)]);
                }
            }
        }
    }
}

#[test]
fn matrix_entries_follow_layout() {
    let stack = reference_stack(c(4.0, 0.33));
    let mode = ModeParams::new(&stack, 4, c(0.3, 0.0), c(1.0, 0.0)).unwrap();
    let a = stack.radii()[2];
    let lm: &LayerMode = mode.layer(3);
    let f = transmission_matrix(Polarization::H, 3, a, &mode).unwrap();
    let h = obh_core::specfun::hankel1(4, lm.eta * a).unwrap();
    assert!(rel(f[(1, 1)], lm.ell * h) < 1e-14);
    let mode0 = ModeParams::new(&stack, 0, c(0.3, 0.0), c(1.0, 0.0)).unwrap();
    let v = transmission_matrix(Polarization::V, 3, a, &mode0).unwrap();
    for &(i, j) in &[(0, 0), (0, 2), (2, 1), (2, 3)] {
        assert_eq!(v[(i, j)], c(0.0, 0.0));
    }
    let hh = transmission_matrix(Polarization::H, 3, a, &mode0).unwrap();
    for &(i, j) in &[(0, 1), (0, 3), (2, 0), (2, 2)] {
        assert_eq!(hh[(i, j)], c(0.0, 0.0));
    }
}

#[test]
fn cascade_is_associative() {
    let stack = reference_stack(c(4.0, 0.33));
    let mode = ModeParams::new(&stack, 2, c(0.05, 0.0), c(0.1, 0.0)).unwrap();
    let cascade = TransferCascade::new(Polarization::V, &stack, &mode).unwrap();
    let last = stack.regions() - 1;
    let total = cascade.total();
    for k in 2..=last {
        let split = cascade.product_range(k, last) * cascade.product_range(1, k - 1);
        for i in 0..4 {
            for j in 0..4 {
                let scale = total.max_abs();
                assert!((split[(i, j)] - total[(i, j)]).norm() < 1e-10 * scale);
            }
        }
    }
}

#[test]
fn scaled_route_matches_literal_route_on_reference_stack() {
    let stack = reference_stack(c(4.0, 0.33));
    let mut compared = 0;
    for &omega in &[0.1, 0.5, 1.0] {
        let kernel = ScatteringKernel::new(&stack, c(omega, 0.0), Polarization::V, 3).unwrap();
        for &hf in &[0.0, 0.4, 0.9, 1.1] {
            let h = c(hf * omega, -0.05 * omega);
            let scaled = kernel.coefficients(h).unwrap();
            for n in 0..=3 {
                let mode = ModeParams::new(&stack, n, h, c(omega, 0.0)).unwrap();
                if let Ok(literal) = scattering_coefficient(Polarization::V, &stack, &mode) {
                    assert!(rel(scaled[n].value(), literal) < 1e-8, "omega={omega} h={h} n={n}");
                    compared += 1;
                }
            }
        }
    }
    assert!(compared >= 24, "only {compared} literal evaluations were representable");
}

#[test]
fn kernel_is_regular_along_the_contour() {
    // Every interface solve along the deformed path stays within the
    // condition limit and every coefficient is finite, including evanescent h.
    let stack = reference_stack(c(4.0, 0.33));
    for &omega in &[0.1, 1.0] {
        let kernel = ScatteringKernel::new(&stack, c(omega, 0.0), Polarization::V, 60).unwrap();
        let h_c = 1.2 * kernel.max_wavenumber();
        for k in 0..=40 {
            let t = PI * k as f64 / 40.0;
            let h = c(0.5 * h_c * (1.0 - t.cos()), -0.25 * omega * t.sin());
            for v in kernel.coefficients(h).unwrap() {
                assert!(v.mantissa.norm().is_finite() && v.log_scale.is_finite());
            }
        }
        for &hf in &[1.5, 4.0, 30.0] {
            let h = c(hf * kernel.max_wavenumber(), 0.0);
            for v in kernel.radial_products(h, 8.1 * PI, 8.1 * PI).unwrap() {
                assert!(v.re.is_finite() && v.im.is_finite());
            }
            let mode = ModeParams::new(&stack, 1, h, c(omega, 0.0)).unwrap();
            if let Ok(t) = interface_transfer(Polarization::V, 1, &stack, &mode) {
                assert!(t.is_finite());
            }
        }
    }
}

#[test]
fn vacuum_stack_scatters_nothing() {
    let stack = LayerStack::vacuum(vec![8.0 * PI, 6.0 * PI, 4.0 * PI]).unwrap();
    let mode = ModeParams::new(&stack, 2, c(0.4, 0.0), c(1.0, 0.0)).unwrap();
    for pol in [Polarization::H, Polarization::V] {
        // The literal route solves with the interface matrices, so only rounding survives.
        assert!(scattering_coefficient(pol, &stack, &mode).unwrap().norm() < 1e-15);
        let kernel = ScatteringKernel::new(&stack, c(1.0, 0.0), pol, 10).unwrap();
        assert!(kernel.coefficients(c(0.4, -0.1)).unwrap().iter().all(|v| v.value() == c(0.0, 0.0)));
    }
    let policy = QuadraturePolicy {
        n_max: 20,
        ..Default::default()
    };
    let p = FieldPoint::new(8.1 * PI, 0.0, 0.0);
    let q = FieldPoint::new(8.1 * PI, PI, 0.0);
    let g = scattering_green_zz(p, q, c(1.0, 0.0), &stack, &policy).unwrap();
    assert_eq!(g.value, c(0.0, 0.0));
}

/// A stack whose every permittivity obeys `eps(-omega*) = eps(omega)*`.
fn schwarz_stack() -> LayerStack {
    reference_stack(c(4.0, 0.0))
}

#[test]
fn coefficient_reflection_in_frequency() {
    // With the Im(eta) >= 0 branch the exterior coefficient obeys
    // C(-omega*) = -C(omega)*: the regular-wave normalisation J_n and the
    // outgoing H1_n pick up opposite conjugation signs.
    let stack = schwarz_stack();
    for &w in &[c(0.3, 0.05), c(1.1, 0.2), c(0.02, 0.4)] {
        let a = ScatteringKernel::new(&stack, w, Polarization::V, 8).unwrap();
        let b = ScatteringKernel::new(&stack, -w.conj(), Polarization::V, 8).unwrap();
        for &h in &[c(0.0, 0.0), c(0.2, 0.0), c(1.5, 0.0)] {
            let (ca, cb) = (a.coefficients(h).unwrap(), b.coefficients(h).unwrap());
            for n in 0..=8 {
                let (x, y) = (ca[n].value(), cb[n].value());
                assert!((y + x.conj()).norm() < 1e-9 * x.norm().max(1e-300), "w={w} h={h} n={n}: {x} vs {y}");
            }
        }
    }
}

#[test]
fn green_is_real_on_imaginary_frequency_axis() {
    let stack = schwarz_stack();
    let policy = QuadraturePolicy {
        n_max: 12,
        rel_tol: 1e-9,
        ..Default::default()
    };
    let p = FieldPoint::new(8.3 * PI, 0.0, 0.0);
    for &xi in &[0.05, 0.2] {
        let g = scattering_green_zz(p, FieldPoint::new(8.5 * PI, 2.0, 0.0), c(0.0, xi), &stack, &policy).unwrap();
        assert!(g.value.im.abs() <= 1e-7 * g.value.norm() + g.error, "xi={xi}: {}", g.value);
        assert!(g.value.re != 0.0);
    }
}

#[test]
fn green_is_reciprocal() {
    let stack = reference_stack(c(4.0, 0.33));
    let policy = QuadraturePolicy {
        n_max: 30,
        ..Default::default()
    };
    let p = FieldPoint::new(8.2 * PI, 0.3, 0.0);
    let q = FieldPoint::new(8.6 * PI, 2.1, 0.7);
    let a = scattering_green_zz(p, q, c(0.6, 0.0), &stack, &policy).unwrap();
    let b = scattering_green_zz(q, p, c(0.6, 0.0), &stack, &policy).unwrap();
    assert!(rel(a.value, b.value) < 1e-8, "{} vs {}", a.value, b.value);
}

#[test]
fn contour_depth_does_not_matter() {
    let stack = reference_stack(c(4.0, 0.33));
    let base = QuadraturePolicy {
        n_max: 20,
        rel_tol: 1e-9,
        ..Default::default()
    };
    let r = 8.1 * PI;
    for &omega in &[0.1, 1.0] {
        let a = ModeIntegrals::compute(r, r, 0.0, c(omega, 0.0), &stack, &base).unwrap();
        let wide = QuadraturePolicy {
            branch_window: 2.0 * base.branch_window,
            ..base
        };
        let b = ModeIntegrals::compute(r, r, 0.0, c(omega, 0.0), &stack, &wide).unwrap();
        let diff: f64 = a.orders.iter().zip(&b.orders).map(|(x, y)| (x - y).norm()).sum();
        let bound = a.error + b.error + 1e-9 * a.orders.iter().map(|x| x.norm()).sum::<f64>();
        assert!(diff <= bound, "omega={omega}: diff {diff:e} bound {bound:e}");
    }
}

#[test]
fn deformed_contour_matches_real_axis_integral() {
    // Strong shell loss at resonance keeps every pole away from the real
    // axis, so the integral can also be taken on the axis itself, with a
    // breakpoint at the integrable branch point h = k_1.
    let stack = reference_stack(c(4.0, 0.33));
    let omega = 1.0;
    let r = 8.15 * PI;
    let policy = QuadraturePolicy {
        n_max: 10,
        rel_tol: 1e-10,
        ..Default::default()
    };
    let deformed = ModeIntegrals::compute(r, r, 0.0, c(omega, 0.0), &stack, &policy).unwrap();
    let kernel = ScatteringKernel::new(&stack, c(omega, 0.0), Polarization::V, 10).unwrap();
    let h_c = 1.2 * kernel.max_wavenumber();
    let mut segments = vec![
        PathSegment::Line { from: c(0.0, 0.0), to: c(omega, 0.0) },
        PathSegment::Line { from: c(omega, 0.0), to: c(h_c, 0.0) },
    ];
    let mut start = h_c;
    while start < 60.0 {
        segments.push(PathSegment::Line { from: c(start, 0.0), to: c(start + 2.0, 0.0) });
        start += 2.0;
    }
    let axis = integrate_path(
        |h| kernel.radial_products(h, r, r).map(|v| v.into_iter().map(|x| x * 2.0).collect()),
        &segments,
        2,
        1e-10,
        0.0,
        20_000,
    )
    .unwrap();
    let factor = c(0.0, 1.0 / (8.0 * PI));
    for n in 0..=10 {
        let a = deformed.orders[n];
        let b = axis.values[n] * factor;
        assert!(rel(a, b) < 1e-6, "n={n}: {a} vs {b}");
    }
}
