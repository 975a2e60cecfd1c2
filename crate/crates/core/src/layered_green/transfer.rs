//! Interface transmission matrices and their cascade.
//!
//! In region `j` the field of one `(n, h)` term is a combination of outgoing
//! (`H1_n`) and regular (`J_n`) cylindrical vector waves. The four
//! coefficients are ordered `[N^(1), M^(1), N, M]` for TM (`V`) and
//! `[M^(1), N^(1), M, N]` for TE (`H`); the rows are the tangential field
//! components `(E_phi, E_z, H_phi, H_z)` at the interface radius, up to
//! common row factors. With `dZ = eta_j Z_n'(eta_j a)`:
//!
//! ```text
//!        | zeta H/a    dH         zeta J/a    dJ        |
//!  F^V = | ell H       0          ell J       0         |
//!        | tau dH      -zeta tau H/a  tau dJ  -zeta tau J/a |
//!        | 0           tau ell H  0           tau ell J |
//!
//!        | dH          -zeta H/a  dJ          -zeta J/a |
//!  F^H = | 0           ell H      0           ell J     |
//!        | zeta tau H/a  tau dH   zeta tau J/a  tau dJ  |
//!        | tau ell H   0          tau ell J   0         |
//! ```
//!
//! Continuity at interface `f` (radius `a_f`) reads
//! `F_{(f+1)f} c_{f+1} = F_{ff} c_f`, so `T_f = F_{(f+1)f}^{-1} F_{ff}` maps
//! region-`f` coefficients inward, and `T^(K) = T_{N-1} ... T_K`. With the
//! exterior coefficients `(C, x, 1, 0)` (unit regular source wave) and no
//! outgoing wave in the core,
//!
//! ```text
//!   C = (T12 T23 - T22 T13) / (T11 T22 - T12 T21),   T = T^(1).
//! ```

use num_complex::Complex64;

use super::matrix::Mat4;
use super::mode::{LayerMode, ModeParams};
use crate::error::{Error, Result};
use crate::medium::LayerStack;
use crate::specfun::{deriv_pair, Kind};

/// Polarisation family of the coefficient.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Polarization {
    /// TE family, `C_1H`.
    H,
    /// TM family, `C_1V`; the one that couples to z-oriented dipoles.
    V,
}

/// Builds `F` from cylinder-function values already evaluated at `eta a`.
/// `dh` and `dj` are radial derivatives, i.e. `eta` times the derivative with
/// respect to the argument.
#[allow(clippy::too_many_arguments)]
pub(crate) fn assemble(
    pol: Polarization,
    lm: &LayerMode,
    zeta: Complex64,
    a: f64,
    h: Complex64,
    dh: Complex64,
    j: Complex64,
    dj: Complex64,
) -> Mat4 {
    let z0 = Complex64::new(0.0, 0.0);
    let (tau, ell) = (lm.tau, lm.ell);
    let za = zeta / a;
    match pol {
        Polarization::V => Mat4::from_rows([
            [za * h, dh, za * j, dj],
            [ell * h, z0, ell * j, z0],
            [tau * dh, -za * tau * h, tau * dj, -za * tau * j],
            [z0, tau * ell * h, z0, tau * ell * j],
        ]),
        Polarization::H => Mat4::from_rows([
            [dh, -za * h, dj, -za * j],
            [z0, ell * h, z0, ell * j],
            [za * tau * h, tau * dh, za * tau * j, tau * dj],
            [tau * ell * h, z0, tau * ell * j, z0],
        ]),
    }
}

/// `F` for region `layer` of `mode` evaluated at radius `a`, without scaling.
pub fn transmission_matrix(pol: Polarization, layer: usize, a: f64, mode: &ModeParams) -> Result<Mat4> {
    if !(a.is_finite() && a > 0.0) {
        return Err(Error::param("a", format!("interface radius must be positive, got {a}")));
    }
    let lm = mode.layer(layer);
    let z = lm.eta * a;
    let (h, hp) = deriv_pair(Kind::H1, mode.n, z)?;
    let (j, jp) = deriv_pair(Kind::J, mode.n, z)?;
    Ok(assemble(pol, lm, lm.zeta, a, h, lm.eta * hp, j, lm.eta * jp))
}

/// `T_f = F_{(f+1)f}^{-1} F_{ff}` for `1 <= f <= N-1`.
pub fn interface_transfer(pol: Polarization, f: usize, stack: &LayerStack, mode: &ModeParams) -> Result<Mat4> {
    let n_regions = stack.regions();
    if f == 0 || f >= n_regions {
        return Err(Error::param("f", format!("interface index must lie in 1..={}", n_regions - 1)));
    }
    let a = stack.radii()[f - 1];
    let inner = transmission_matrix(pol, f + 1, a, mode)?;
    let outer = transmission_matrix(pol, f, a, mode)?;
    inner.solve_mat(&outer)
}

/// The interface matrices of one stack for one spectral term.
#[derive(Clone, Debug)]
pub struct TransferCascade {
    pol: Polarization,
    interfaces: Vec<Mat4>,
}

impl TransferCascade {
    pub fn new(pol: Polarization, stack: &LayerStack, mode: &ModeParams) -> Result<Self> {
        let interfaces = (1..stack.regions())
            .map(|f| interface_transfer(pol, f, stack, mode))
            .collect::<Result<Vec<_>>>()?;
        Ok(TransferCascade { pol, interfaces })
    }

    pub fn polarization(&self) -> Polarization {
        self.pol
    }

    /// `T_f`, 1-based.
    pub fn interface(&self, f: usize) -> &Mat4 {
        &self.interfaces[f - 1]
    }

    pub fn interfaces(&self) -> &[Mat4] {
        &self.interfaces
    }

    /// `T^(K) = T_{N-1} ... T_K`.
    pub fn product(&self, k: usize) -> Mat4 {
        self.product_range(k, self.interfaces.len())
    }

    /// `T_hi ... T_lo` for `1 <= lo <= hi <= N-1`; identity for an empty range.
    pub fn product_range(&self, lo: usize, hi: usize) -> Mat4 {
        let mut acc = Mat4::identity();
        for f in lo..=hi {
            acc = self.interfaces[f - 1] * acc;
        }
        acc
    }

    pub fn total(&self) -> Mat4 {
        self.product(1)
    }
}

/// Exterior reflection-type coefficient from the cascade entries.
pub fn coefficient_from_cascade(t: &Mat4) -> Result<Complex64> {
    let denom = t[(0, 0)] * t[(1, 1)] - t[(0, 1)] * t[(1, 0)];
    let scale = (t[(0, 0)] * t[(1, 1)]).norm() + (t[(0, 1)] * t[(1, 0)]).norm();
    if !(denom.norm() > 1e-14 * scale) || denom.norm() == 0.0 {
        return Err(Error::VanishingDenominator {
            magnitude: denom.norm(),
        });
    }
    let num = t[(0, 1)] * t[(1, 2)] - t[(1, 1)] * t[(0, 2)];
    Ok(num / denom)
}

/// `C_1H` or `C_1V` for one spectral term, from the literal cascade. Raises
/// `IllConditioned` or `Overflow` when the unscaled matrices leave `f64`
/// range; the scaled evaluation in [`super::ScatteringKernel`] covers those.
pub fn scattering_coefficient(pol: Polarization, stack: &LayerStack, mode: &ModeParams) -> Result<Complex64> {
    let cascade = TransferCascade::new(pol, stack, mode)?;
    coefficient_from_cascade(&cascade.total())
}
