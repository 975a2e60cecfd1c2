//! Markovian two-atom quantities: single-atom and collective decay rates,
//! dipole-dipole shifts and the Dicke-state amplitudes.
//!
//! Both atoms carry z-oriented dipoles and sit symmetrically at
//! `(r, 0, 0)` and `(r, pi, 0)`. Rates and shifts are normalised by the
//! free-space rate `Gamma_0`, so that with `k = omega_A`
//!
//! ```text
//!   Gamma_jj' / Gamma_0 = (6 pi / k) Im G_zz(r_j, r_j'),
//!   delta_jj' / Gamma_0 = (3 pi / k) Re G_zz(r_j, r_j').
//! ```
//!
//! The shift follows from the principal-value frequency integral of
//! `omega^2 Im G` by the Kramers-Kronig relation; [`dipole_shift_pv`]
//! evaluates that integral directly as a cross-check.

use num_complex::Complex64;
use std::cell::RefCell;
use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::layered_green::{freespace_green_zz, ModeIntegrals};
use crate::medium::LayerStack;
use crate::sommerfeld::{integrate_path, pv_integral, sum_modes, PathSegment, QuadraturePolicy};
use crate::specfun::{CylFunTable, Kind, MAX_ORDER};

/// Two identical atoms at `(r, 0, 0)` and `(r, pi, 0)` with z dipoles.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AtomPair {
    /// Transition frequency in units of `omega_0`.
    pub omega_a: f64,
    /// Radial distance of each atom from the axis, in units of `c / omega_0`.
    pub r: f64,
}

impl AtomPair {
    pub fn new(omega_a: f64, r: f64) -> Result<Self> {
        let pair = AtomPair { omega_a, r };
        pair.validate()?;
        Ok(pair)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega_a > 0.0 && self.omega_a.is_finite()) {
            return Err(Error::param("omega_a", "must be positive and finite"));
        }
        if !(self.r > 0.0 && self.r.is_finite()) {
            return Err(Error::param("r", "must be positive and finite"));
        }
        Ok(())
    }

    /// Interatomic distance `2 r`.
    pub fn separation(&self) -> f64 {
        2.0 * self.r
    }

    /// Dimensionless separation `x = k 2r`.
    pub fn size_parameter(&self) -> f64 {
        self.omega_a * self.separation()
    }

    fn check_outside(&self, stack: &LayerStack) -> Result<()> {
        self.validate()?;
        let a1 = stack.outer_radius();
        if self.r <= a1 {
            return Err(Error::InvalidGeometry(format!(
                "atoms at r = {} must lie outside the shell of radius {a1}",
                self.r
            )));
        }
        Ok(())
    }
}

/// Decay rates in units of `Gamma_0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateSet {
    pub gamma: f64,
    pub gamma_ab: f64,
    pub gamma_plus: f64,
    pub gamma_minus: f64,
    /// Quadrature error bound shared by every entry.
    pub error: f64,
    /// Whether the azimuthal sums met their stop rule.
    pub converged: bool,
}

impl RateSet {
    /// Exact rates `Gamma` and `Gamma_AB` with no quadrature error attached.
    pub fn new(gamma: f64, gamma_ab: f64) -> Self {
        RateSet::from_parts(gamma, gamma_ab, 0.0, true)
    }

    fn from_parts(gamma: f64, gamma_ab: f64, error: f64, converged: bool) -> Self {
        RateSet {
            gamma,
            gamma_ab,
            gamma_plus: gamma + gamma_ab,
            gamma_minus: gamma - gamma_ab,
            error,
            converged,
        }
    }

    /// Free-space rates at dimensionless separation `x = k 2r`.
    pub fn vacuum(x: f64) -> Self {
        RateSet::from_parts(1.0, vacuum_collective_rate(x), 0.0, true)
    }

    fn check_positive(&self) -> Result<()> {
        let tol = self.error + 1e-12;
        if self.gamma_plus < -tol || self.gamma_minus < -tol {
            return Err(Error::InvariantViolation(format!(
                "negative collective rate: gamma+ = {:e}, gamma- = {:e}",
                self.gamma_plus, self.gamma_minus
            )));
        }
        Ok(())
    }
}

/// Level shifts in units of `Gamma_0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShiftSet {
    pub delta_ab: f64,
    pub delta_plus: f64,
    pub delta_minus: f64,
    /// Environment-induced part of the single-atom shift; the divergent
    /// free-space self term is absorbed into the transition frequency.
    pub lamb: f64,
    pub error: f64,
}

impl ShiftSet {
    /// Exact shifts from the single-atom part and `delta_AB`.
    pub fn new(lamb: f64, delta_ab: f64) -> Self {
        ShiftSet::from_parts(lamb, delta_ab, 0.0)
    }

    fn from_parts(lamb: f64, delta_ab: f64, error: f64) -> Self {
        ShiftSet {
            delta_ab,
            delta_plus: lamb + delta_ab,
            delta_minus: lamb - delta_ab,
            lamb,
            error,
        }
    }

    /// Free-space shifts at dimensionless separation `x = k 2r`.
    pub fn vacuum(x: f64) -> Self {
        ShiftSet::from_parts(0.0, vacuum_dipole_shift(x), 0.0)
    }
}

/// `Gamma_AB / Gamma_0 = (3/2) [sin x / x + cos x / x^2 - sin x / x^3]`.
pub fn vacuum_collective_rate(x: f64) -> f64 {
    if x.abs() < 0.05 {
        // The bracket cancels to 2/3 - 2x^2/15 + x^4/140 - ...
        let x2 = x * x;
        return 1.0 - x2 / 5.0 + 3.0 * x2 * x2 / 280.0 - x2 * x2 * x2 / 3780.0;
    }
    let (s, c) = x.sin_cos();
    1.5 * (s / x + c / (x * x) - s / (x * x * x))
}

/// `delta_AB / Gamma_0 = -(3/4) [-cos x / x + sin x / x^2 + cos x / x^3]`.
pub fn vacuum_dipole_shift(x: f64) -> f64 {
    let (s, c) = x.sin_cos();
    -0.75 * (-c / x + s / (x * x) + c / (x * x * x))
}

/// Rates and shifts from one evaluation of the scattering Green element.
#[derive(Clone, Debug, PartialEq)]
pub struct CollectiveResponse {
    pub rates: RateSet,
    pub shifts: ShiftSet,
    /// Highest azimuthal order retained by the sums.
    pub last_order: usize,
    /// Estimated size of the omitted azimuthal orders in the rates, in
    /// `delta_AB` and in the single-atom shift (zero when the sums converged).
    pub rate_truncation: f64,
    pub shift_truncation: f64,
    pub lamb_truncation: f64,
}

impl CollectiveResponse {
    pub fn compute(atoms: &AtomPair, stack: &LayerStack, policy: &QuadraturePolicy) -> Result<Self> {
        atoms.check_outside(stack)?;
        let k = atoms.omega_a;
        let modes = ModeIntegrals::compute(atoms.r, atoms.r, 0.0, Complex64::new(k, 0.0), stack, policy)?;
        let own = modes.green(0.0, policy);
        let cross = modes.green(PI, policy);

        let g0 = freespace_green_zz(atoms.separation(), k)?;
        let g_ab = g0 + cross.value;
        let x = atoms.size_parameter();
        // Im of the free-space cross element is evaluated in closed form to
        // keep the small-separation limit exact.
        let gamma_ab = vacuum_collective_rate(x) + 6.0 * PI / k * cross.value.im;
        let gamma = 1.0 + 6.0 * PI / k * own.value.im;
        let rate_err = 6.0 * PI / k * own.error.max(cross.error);
        let rates = RateSet::from_parts(gamma, gamma_ab, rate_err, own.converged && cross.converged);
        rates.check_positive()?;

        let shifts = ShiftSet::from_parts(
            3.0 * PI / k * own.value.re,
            3.0 * PI / k * g_ab.re,
            3.0 * PI / k * own.error.max(cross.error),
        );
        Ok(CollectiveResponse {
            rates,
            shifts,
            last_order: own.last_order.max(cross.last_order),
            rate_truncation: 6.0 * PI / k * own.truncation.im.max(cross.truncation.im),
            shift_truncation: 3.0 * PI / k * cross.truncation.re,
            lamb_truncation: 3.0 * PI / k * own.truncation.re,
        })
    }
}

/// `Gamma`, `Gamma_AB` and `Gamma_pm` in units of `Gamma_0`.
pub fn decay_rates(atoms: &AtomPair, stack: &LayerStack, policy: &QuadraturePolicy) -> Result<RateSet> {
    Ok(CollectiveResponse::compute(atoms, stack, policy)?.rates)
}

/// Dipole-dipole and environment-induced single-atom shifts in units of `Gamma_0`.
pub fn dipole_shift(atoms: &AtomPair, stack: &LayerStack, policy: &QuadraturePolicy) -> Result<ShiftSet> {
    Ok(CollectiveResponse::compute(atoms, stack, policy)?.shifts)
}

/// Collective rates in free space from the cylindrical mode expansion,
///
/// ```text
///   Gamma_jj' / Gamma_0 = (3/4) Int_0^pi dtheta sin^3(theta)
///                         Sum_n (2 - delta_n0) J_n(kr sin theta)^2 cos(n dphi),
/// ```
///
/// i.e. the regular part of the scattering pipeline with `h = k cos(theta)`.
/// Independent of the closed forms; used to validate the normalisation.
pub fn vacuum_rates_mode_sum(atoms: &AtomPair, policy: &QuadraturePolicy) -> Result<RateSet> {
    atoms.validate()?;
    policy.validate()?;
    let kr = atoms.omega_a * atoms.r;
    let needed = (kr + 12.0 * kr.cbrt() + 25.0).ceil() as usize;
    let n_max = policy.n_max.max(needed);
    if n_max > MAX_ORDER {
        return Err(Error::DomainExceeded {
            order: n_max,
            argument: Complex64::new(kr, 0.0),
        });
    }
    let segments = [PathSegment::Line {
        from: Complex64::new(0.0, 0.0),
        to: Complex64::new(FRAC_PI_2, 0.0),
    }];
    let q = integrate_path(
        |theta| {
            let s = theta.re.sin();
            let weight = 1.5 * s * s * s;
            let table = CylFunTable::new(Kind::J, n_max, Complex64::new(kr * s, 0.0))?;
            Ok((0..=n_max)
                .map(|n| {
                    let v = table.value(n) * table.log_scale(n).exp();
                    weight * v * v
                })
                .collect())
        },
        &segments,
        8,
        policy.rel_tol.min(1e-10),
        0.0,
        policy.max_intervals,
    )?;
    let sum_policy = QuadraturePolicy { n_max, ..*policy };
    let own = sum_modes(|n| q.values[n], &sum_policy);
    let cross = sum_modes(|n| if n % 2 == 0 { q.values[n] } else { -q.values[n] }, &sum_policy);
    // Gamma_pm directly from the even and odd orders: Gamma_- vanishes like
    // x^2 at small separation, so Gamma - Gamma_AB would cancel.
    let plus = sum_modes(|n| if n % 2 == 0 { 2.0 * q.values[n] } else { 0.0.into() }, &sum_policy);
    let minus = sum_modes(|n| if n % 2 == 1 { 2.0 * q.values[n] } else { 0.0.into() }, &sum_policy);
    Ok(RateSet {
        gamma: own.value.re,
        gamma_ab: cross.value.re,
        gamma_plus: plus.value.re,
        gamma_minus: minus.value.re,
        error: q.error * 2.0,
        converged: own.converged && cross.converged,
    })
}

/// Principal-value evaluation of the scattering part of `delta_AB` next to
/// its Kramers-Kronig value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShiftCrossCheck {
    /// `(3 pi / k) Re G_s` at the transition frequency.
    pub kramers_kronig: f64,
    /// `(3 / k^3) P Int_window w^2 Im G_s(w) [1/(w - k) + 1/(w + k)] dw`.
    pub principal_value: f64,
    /// `|pv - kk| / |kk|`.
    pub discrepancy: f64,
    pub error: f64,
}

/// Scattering part of the dipole-dipole shift from the frequency integral,
/// truncated to `window`. Negative frequencies are folded in using
/// `Im G(-w) = -Im G(w)`. Logs a warning when the two routes differ by more
/// than 5 %.
pub fn dipole_shift_pv(
    atoms: &AtomPair,
    stack: &LayerStack,
    policy: &QuadraturePolicy,
    window: (f64, f64),
    rel_tol: f64,
) -> Result<ShiftCrossCheck> {
    atoms.check_outside(stack)?;
    let k = atoms.omega_a;
    let im_cross = |w: f64| -> Result<f64> {
        let modes = ModeIntegrals::compute(atoms.r, atoms.r, 0.0, Complex64::new(w, 0.0), stack, policy)?;
        Ok(modes.green(PI, policy).value.im)
    };
    let failure = RefCell::new(None);
    let q = pv_integral(
        |w| match im_cross(w) {
            Ok(g) => w * w * g * (1.0 + (w - k) / (w + k)),
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                0.0
            }
        },
        k,
        window,
        rel_tol,
    )?;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let modes = ModeIntegrals::compute(atoms.r, atoms.r, 0.0, Complex64::new(k, 0.0), stack, policy)?;
    let kk = 3.0 * PI / k * modes.green(PI, policy).value.re;
    let pv = 3.0 / (k * k * k) * q.value.re;
    let discrepancy = (pv - kk).abs() / kk.abs();
    if discrepancy > 0.05 {
        log::warn!("principal-value and Kramers-Kronig shifts differ by {:.1}%", 100.0 * discrepancy);
    }
    Ok(ShiftCrossCheck {
        kramers_kronig: kk,
        principal_value: pv,
        discrepancy,
        error: 3.0 / (k * k * k) * q.error,
    })
}

/// Dicke amplitudes `C_pm(t) = e^{(-Gamma_pm / 2 + i delta_pm) t} / sqrt 2`
/// for the initial state `|u_A, l_B>`, with `t` in units of `1 / Gamma_0`.
pub fn amplitudes(rates: &RateSet, shifts: &ShiftSet, t: f64) -> (Complex64, Complex64) {
    let amp = |gamma: f64, delta: f64| Complex64::new(-0.5 * gamma * t, delta * t).exp() * std::f64::consts::FRAC_1_SQRT_2;
    (
        amp(rates.gamma_plus, shifts.delta_plus),
        amp(rates.gamma_minus, shifts.delta_minus),
    )
}
