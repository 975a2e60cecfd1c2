//! Assembly of the zz Green element from the per-order `h` integrals.

use num_complex::Complex64;
use std::f64::consts::PI;

use super::kernel::ScatteringKernel;
use super::transfer::Polarization;
use crate::error::{Error, Result};
use crate::medium::LayerStack;
use crate::sommerfeld::{integrate_contour, sum_modes, Contour, QuadraturePolicy};

/// Cylindrical coordinates `(r, phi, z)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FieldPoint {
    pub r: f64,
    pub phi: f64,
    pub z: f64,
}

impl FieldPoint {
    pub fn new(r: f64, phi: f64, z: f64) -> Self {
        FieldPoint { r, phi, z }
    }
}

/// A Green element with its quadrature diagnostics.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GreenEstimate {
    pub value: Complex64,
    /// Bound on the `h`-quadrature error of the value.
    pub error: f64,
    /// Highest azimuthal order included.
    pub last_order: usize,
    /// Whether the mode sum met its stop rule before the order cap.
    pub converged: bool,
    /// Geometric estimates of the omitted orders when the cap was reached,
    /// for the real and the imaginary part separately (`re`, `im`); zero when
    /// the stop rule fired, infinite when the terms do not decay.
    pub truncation: Complex64,
    pub evaluations: usize,
}

/// Per-order contributions `g_n = (i / 8 pi) Int_R dh (eta_1^2/k_1^2) C_n H_n H_n' e^{ih dz}`,
/// from which the element at any azimuthal separation follows as
/// `Sum_n (2 - delta_n0) g_n cos(n dphi)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeIntegrals {
    pub orders: Vec<Complex64>,
    /// Aggregate error bound `sum_n |error(g_n)|`.
    pub error: f64,
    pub evaluations: usize,
}

impl ModeIntegrals {
    /// All orders `0 ..= policy.n_max` of the scattering part for two
    /// exterior radii and an axial offset `dz`.
    pub fn compute(
        r: f64,
        r_prime: f64,
        dz: f64,
        omega: Complex64,
        stack: &LayerStack,
        policy: &QuadraturePolicy,
    ) -> Result<Self> {
        policy.validate()?;
        let a1 = stack.outer_radius();
        if !(r > a1 && r_prime > a1) {
            return Err(Error::InvalidGeometry(format!(
                "both points must lie outside the shell (r = {r}, r' = {r_prime}, a_1 = {a1})"
            )));
        }
        let kernel = ScatteringKernel::new(stack, omega, Polarization::V, policy.n_max)?;
        let gap = r.min(r_prime) - a1;
        let contour = Contour::new(kernel.k1(), kernel.max_wavenumber(), 0.5 / gap, policy);
        let q = integrate_contour(
            |h| {
                let mut v = kernel.radial_products(h, r, r_prime)?;
                // Int_R f = Int_P [f(h) + f(-h)]; only e^{ih dz} is odd in h.
                let w = (h * dz).cos() * 2.0;
                for x in v.iter_mut() {
                    *x *= w;
                }
                Ok(v)
            },
            &contour,
            policy,
        )?;
        let factor = Complex64::new(0.0, 1.0 / (8.0 * PI));
        Ok(ModeIntegrals {
            orders: q.values.iter().map(|v| v * factor).collect(),
            error: q.error / (8.0 * PI),
            evaluations: q.evaluations,
        })
    }

    /// Mode sum at azimuthal separation `dphi`.
    pub fn green(&self, dphi: f64, policy: &QuadraturePolicy) -> GreenEstimate {
        let s = sum_modes(
            |n| self.orders.get(n).copied().unwrap_or_default() * (n as f64 * dphi).cos(),
            &QuadraturePolicy {
                n_max: self.orders.len() - 1,
                ..*policy
            },
        );
        let truncation = if s.converged {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(
                self.tail_estimate(s.last_order, dphi, |z| z.re),
                self.tail_estimate(s.last_order, dphi, |z| z.im),
            )
        };
        GreenEstimate {
            value: s.value,
            error: 2.0 * self.error,
            last_order: s.last_order,
            converged: s.converged,
            truncation,
            evaluations: self.evaluations,
        }
    }

    /// Geometric extrapolation of the partial sums in blocks of ten orders:
    /// with `d_1 = S_N - S_{N-10}` and `d_2 = S_{N-10} - S_{N-20}`, the
    /// omitted part is estimated as `|d_1| q / (1 - q)`, `q = |d_1 / d_2|`.
    /// Even block lengths make the estimate insensitive to alternating signs.
    fn tail_estimate(&self, last: usize, dphi: f64, part: impl Fn(Complex64) -> f64) -> f64 {
        const BLOCK: usize = 10;
        if last < 2 * BLOCK {
            return f64::INFINITY;
        }
        let mut partial = Vec::with_capacity(last + 1);
        let mut acc = 0.0;
        for (n, g) in self.orders[..=last].iter().enumerate() {
            let w = if n == 0 { 1.0 } else { 2.0 };
            acc += w * part(*g) * (n as f64 * dphi).cos();
            partial.push(acc);
        }
        let d1 = (partial[last] - partial[last - BLOCK]).abs();
        let d2 = (partial[last - BLOCK] - partial[last - 2 * BLOCK]).abs();
        if d1 == 0.0 {
            return 0.0;
        }
        let q = d1 / d2;
        if q < 1.0 {
            d1 * q / (1.0 - q)
        } else {
            f64::INFINITY
        }
    }

}

/// Scattering part of `G_zz(field, source; omega)` for two points outside the shell.
pub fn scattering_green_zz(
    field: FieldPoint,
    source: FieldPoint,
    omega: Complex64,
    stack: &LayerStack,
    policy: &QuadraturePolicy,
) -> Result<GreenEstimate> {
    let modes = ModeIntegrals::compute(field.r, source.r, field.z - source.z, omega, stack, policy)?;
    Ok(modes.green(field.phi - source.phi, policy))
}

/// Free-space zz element for z-dipoles separated by `R` perpendicular to z:
/// `e^{ikR} / (4 pi R) (1 + i/(kR) - 1/(kR)^2)` with `k = omega`.
pub fn freespace_green_zz(separation: f64, omega: f64) -> Result<Complex64> {
    if !(separation > 0.0 && separation.is_finite()) {
        return Err(Error::SingularArgument(Complex64::new(separation, 0.0)));
    }
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::param("omega", "must be positive"));
    }
    let x = omega * separation;
    let phase = Complex64::from_polar(1.0, x);
    Ok(phase / (4.0 * PI * separation) * Complex64::new(1.0 - 1.0 / (x * x), 1.0 / x))
}
