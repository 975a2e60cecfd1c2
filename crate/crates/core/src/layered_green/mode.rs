//! Per-layer wave parameters of one spectral term `(n, h)`.
//!
//! ```text
//!   k_f   = sqrt(eps_f) omega         eta_f^2 = k_f^2 - h^2,  Im eta_f >= 0
//!   tau_f = sqrt(eps_f / mu_f)        zeta_f  = i h n / k_f
//!   ell_f = eta_f^2 / k_f             mu_f    = 1
//! ```

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::medium::LayerStack;

/// Wave parameters inside one homogeneous region.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LayerMode {
    pub eps: Complex64,
    pub k: Complex64,
    pub eta: Complex64,
    pub tau: Complex64,
    pub zeta: Complex64,
    pub ell: Complex64,
}

impl LayerMode {
    pub fn new(eps: Complex64, omega: Complex64, n: usize, h: Complex64) -> Result<Self> {
        let k = eps.sqrt() * omega;
        if k == Complex64::new(0.0, 0.0) {
            return Err(Error::param("omega", "wavenumber vanishes"));
        }
        let eta = radial_wavenumber(k, h);
        Ok(LayerMode {
            eps,
            k,
            eta,
            tau: eps.sqrt(),
            zeta: Complex64::new(0.0, n as f64) * h / k,
            ell: eta * eta / k,
        })
    }
}

/// `sqrt(k^2 - h^2)` on the branch with non-negative imaginary part. A
/// negative-zero imaginary part is treated as zero so that purely evanescent
/// real-axis points land on `+i sqrt(h^2 - k^2)`.
pub fn radial_wavenumber(k: Complex64, h: Complex64) -> Complex64 {
    let mut arg = k * k - h * h;
    if arg.im == 0.0 {
        arg.im = 0.0;
    }
    let eta = arg.sqrt();
    if eta.im < 0.0 {
        -eta
    } else {
        eta
    }
}

/// All per-layer parameters for one `(n, h, omega)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeParams {
    pub n: usize,
    pub h: Complex64,
    pub omega: Complex64,
    pub layers: Vec<LayerMode>,
}

impl ModeParams {
    pub fn new(stack: &LayerStack, n: usize, h: Complex64, omega: Complex64) -> Result<Self> {
        let layers = stack
            .permittivities(omega)
            .into_iter()
            .map(|eps| LayerMode::new(eps, omega, n, h))
            .collect::<Result<Vec<_>>>()?;
        Ok(ModeParams {
            n,
            h,
            omega,
            layers,
        })
    }

    /// Region `f` (1-based, 1 = exterior).
    pub fn layer(&self, f: usize) -> &LayerMode {
        &self.layers[f - 1]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dispersion_relation_and_branch() {
        let omega = Complex64::new(0.7, 0.0);
        for eps in [Complex64::new(1.0, 0.0), Complex64::new(4.0, 0.33), Complex64::new(1.2, 1e-5)] {
            for h in [
                Complex64::new(0.0, 0.0),
                Complex64::new(0.5, 0.0),
                Complex64::new(3.0, 0.0),
                Complex64::new(0.9, -0.2),
                Complex64::new(-2.0, 0.0),
            ] {
                let m = LayerMode::new(eps, omega, 3, h).unwrap();
                assert!(m.eta.im >= 0.0);
                let residual = h * h - (m.k * m.k - m.eta * m.eta);
                assert!(residual.norm() < 1e-14 * (1.0 + h.norm_sqr()));
            }
        }
    }

    #[test]
    fn evanescent_point_on_positive_imaginary_axis() {
        let eta = radial_wavenumber(Complex64::new(1.0, 0.0), Complex64::new(2.0, -0.0));
        assert!(eta.re.abs() < 1e-15 && (eta.im - 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn zeta_vanishes_for_order_zero() {
        let m = LayerMode::new(Complex64::new(2.0, 0.1), Complex64::new(1.0, 0.0), 0, Complex64::new(0.4, 0.0)).unwrap();
        assert_eq!(m.zeta, Complex64::new(0.0, 0.0));
    }
}
