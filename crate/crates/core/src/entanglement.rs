//! Reduced two-atom density matrix in the single-excitation sector and its
//! negativity, both from the eigenvalues of the partial transpose and in
//! closed form.
//!
//! Negativity is `N = (1/2) Sum_i (|mu_i| - mu_i)` over the eigenvalues of
//! the partial transpose, so a Bell state has `N = 1/2`.

use nalgebra::Matrix4;
use num_complex::Complex64;

use crate::atom_dynamics::{amplitudes, RateSet, ShiftSet};
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Tolerance on the trace and the Hermitian part of a state.
pub const TRACE_TOL: f64 = 1e-12;
/// Most negative eigenvalue accepted as rounding of a positive state.
pub const POSITIVITY_TOL: f64 = 1e-10;

/// Two-atom state with the doubly excited level empty, in the Dicke basis
/// `|+>, |->` plus the ground state `|L>`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoAtomState {
    /// Time in units of `1 / Gamma_0`.
    pub t: f64,
    pub rho_pp: f64,
    pub rho_mm: f64,
    /// Coherence `<+| rho |->`.
    pub rho_pm: Complex64,
    pub rho_ll: f64,
}

/// `rho_pm = C_+ C_-^*`, populations `|C_pm|^2` and the remainder in `|L>`.
pub fn density_matrix(c_plus: Complex64, c_minus: Complex64) -> Result<TwoAtomState> {
    let (pp, mm) = (c_plus.norm_sqr(), c_minus.norm_sqr());
    let norm = pp + mm;
    if !(norm <= 1.0 + TRACE_TOL) {
        return Err(Error::NormViolation { norm });
    }
    Ok(TwoAtomState {
        t: 0.0,
        rho_pp: pp,
        rho_mm: mm,
        rho_pm: c_plus * c_minus.conj(),
        // A population: rounding of |C_pm|^2 must not push it below zero.
        rho_ll: (1.0 - norm).max(0.0),
    })
}

impl TwoAtomState {
    pub fn at(self, t: f64) -> Self {
        TwoAtomState { t, ..self }
    }

    pub fn trace(&self) -> f64 {
        self.rho_pp + self.rho_mm + self.rho_ll
    }

    /// Matrix in the product basis `{|uu>, |ul>, |lu>, |ll>}` (atom A first).
    pub fn product_basis(&self) -> Matrix4<Complex64> {
        let sum = self.rho_pp + self.rho_mm;
        let ul_ul = 0.5 * (sum + 2.0 * self.rho_pm.re);
        let lu_lu = 0.5 * (sum - 2.0 * self.rho_pm.re);
        let ul_lu = 0.5 * Complex64::new(self.rho_pp - self.rho_mm, -2.0 * self.rho_pm.im);
        let mut m = Matrix4::from_element(ZERO);
        m[(1, 1)] = ul_ul.into();
        m[(2, 2)] = lu_lu.into();
        m[(1, 2)] = ul_lu;
        m[(2, 1)] = ul_lu.conj();
        m[(3, 3)] = self.rho_ll.into();
        m
    }

    /// Eigenvalues of the product-basis matrix, ascending.
    pub fn eigenvalues(&self) -> [f64; 4] {
        hermitian_eigenvalues(self.product_basis())
    }

    /// Unit trace and positivity within tolerance.
    pub fn validate(&self) -> Result<()> {
        let values = [self.rho_pp, self.rho_mm, self.rho_ll, self.rho_pm.re, self.rho_pm.im];
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvariantViolation(format!("non-finite state at t = {}", self.t)));
        }
        if (self.trace() - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvariantViolation(format!(
                "trace {} differs from one at t = {}",
                self.trace(),
                self.t
            )));
        }
        let lowest = self.eigenvalues()[0];
        if lowest < -POSITIVITY_TOL {
            return Err(Error::InvariantViolation(format!(
                "eigenvalue {lowest:e} below zero at t = {}",
                self.t
            )));
        }
        Ok(())
    }
}

/// Partial transpose over atom A: `<a b| rho |a' b'>  ->  <a' b| rho |a b'>`.
pub fn partial_transpose(m: &Matrix4<Complex64>) -> Matrix4<Complex64> {
    Matrix4::from_fn(|row, col| {
        let (a, b) = (row / 2, row % 2);
        let (a2, b2) = (col / 2, col % 2);
        m[(a2 * 2 + b, a * 2 + b2)]
    })
}

fn hermitian_eigenvalues(m: Matrix4<Complex64>) -> [f64; 4] {
    let eig = m.symmetric_eigenvalues();
    let mut out = [eig[0], eig[1], eig[2], eig[3]];
    out.sort_by(f64::total_cmp);
    out
}

/// `(1/2) Sum_i (|mu_i| - mu_i)` over the eigenvalues of the partial transpose.
pub fn negativity_eigen(state: &TwoAtomState) -> f64 {
    hermitian_eigenvalues(partial_transpose(&state.product_basis()))
        .iter()
        .map(|mu| 0.5 * (mu.abs() - mu))
        .sum()
}

/// Closed form for the family `C_pm(t) = e^{(-Gamma_pm/2 + i delta_pm) t} / sqrt 2`:
///
/// ```text
///   N = (1/2) { sqrt( rho_LL^2 + (rho_pp + rho_mm)^2 - e^{-2 Gamma t} cos^2(2 delta_AB t) ) - rho_LL }.
/// ```
pub fn negativity_closed(rates: &RateSet, shifts: &ShiftSet, t: f64) -> Result<f64> {
    check_family(rates, shifts, t)?;
    let (ep, em) = ((-rates.gamma_plus * t).exp(), (-rates.gamma_minus * t).exp());
    let ground = 1.0 - 0.5 * (ep + em);
    let sin = (2.0 * shifts.delta_ab * t).sin();
    // (rho_pp + rho_mm)^2 - e^{-2 Gamma t} cos^2 equals (rho_pp - rho_mm)^2 +
    // e^{-2 Gamma t} sin^2 for this family since rho_pp rho_mm = |rho_pm|^2;
    // the second form and the rationalised root avoid cancellation once the
    // populations have decayed.
    let imbalance = 0.5 * (ep - em);
    let s = imbalance * imbalance + ep * em * sin * sin;
    if s == 0.0 {
        return Ok(0.0);
    }
    Ok(0.5 * s / ((ground * ground + s).sqrt() + ground))
}

fn check_family(rates: &RateSet, shifts: &ShiftSet, t: f64) -> Result<()> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::FamilyMismatch(format!("time {t} must be finite and non-negative")));
    }
    if !(rates.gamma_plus >= 0.0 && rates.gamma_minus >= 0.0) {
        return Err(Error::FamilyMismatch(format!(
            "collective rates {} and {} must be non-negative",
            rates.gamma_plus, rates.gamma_minus
        )));
    }
    let tol = 1e-12 * (1.0 + rates.gamma.abs());
    if (rates.gamma_plus + rates.gamma_minus - 2.0 * rates.gamma).abs() > tol
        || (rates.gamma_plus - rates.gamma_minus - 2.0 * rates.gamma_ab).abs() > tol
    {
        return Err(Error::FamilyMismatch("rates are not of the form Gamma +- Gamma_AB".into()));
    }
    let tol = 1e-12 * (1.0 + shifts.delta_ab.abs() + shifts.lamb.abs());
    if (shifts.delta_plus - shifts.delta_minus - 2.0 * shifts.delta_ab).abs() > tol || !shifts.delta_ab.is_finite() {
        return Err(Error::FamilyMismatch("shifts are not of the form delta +- delta_AB".into()));
    }
    Ok(())
}

/// One time sample of a negativity trace.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NegativitySample {
    pub t: f64,
    pub rho_pp: f64,
    pub rho_mm: f64,
    pub rho_ll: f64,
    pub neg_eigen: f64,
    pub neg_closed: f64,
}

/// Negativity along a time grid, by both routes.
#[derive(Clone, Debug, PartialEq)]
pub struct NegativityTrace {
    pub samples: Vec<NegativitySample>,
}

impl NegativityTrace {
    /// Evolves the state `|u_A, l_B>` and checks trace and positivity at
    /// every sample.
    pub fn compute(rates: &RateSet, shifts: &ShiftSet, times: &[f64]) -> Result<Self> {
        let samples = times
            .iter()
            .map(|&t| {
                let (cp, cm) = amplitudes(rates, shifts, t);
                let state = density_matrix(cp, cm)?.at(t);
                state.validate()?;
                Ok(NegativitySample {
                    t,
                    rho_pp: state.rho_pp,
                    rho_mm: state.rho_mm,
                    rho_ll: state.rho_ll,
                    neg_eigen: negativity_eigen(&state),
                    neg_closed: negativity_closed(rates, shifts, t)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(NegativityTrace { samples })
    }

    /// Largest eigenvalue-route negativity and its time.
    pub fn peak(&self) -> Option<(f64, f64)> {
        self.samples
            .iter()
            .map(|s| (s.t, s.neg_eigen))
            .max_by(|a, b| a.1.total_cmp(&b.1))
    }

    /// Largest `|neg_eigen - neg_closed|` over the trace.
    pub fn max_route_difference(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| (s.neg_eigen - s.neg_closed).abs())
            .fold(0.0, f64::max)
    }

    /// Times of strict interior local maxima of the negativity, located on
    /// the closed-form column, which is free of eigen-solver rounding.
    pub fn local_maxima(&self) -> Vec<f64> {
        self.samples
            .windows(3)
            .filter(|w| w[1].neg_closed > w[0].neg_closed && w[1].neg_closed > w[2].neg_closed)
            .map(|w| w[1].t)
            .collect()
    }
}

/// `samples` equally spaced times from 0 to `t_max` inclusive.
pub fn uniform_times(t_max: f64, samples: usize) -> Result<Vec<f64>> {
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(Error::param("t_max", "must be positive and finite"));
    }
    if samples < 2 {
        return Err(Error::param("samples", "at least two samples are needed"));
    }
    let step = t_max / (samples - 1) as f64;
    Ok((0..samples).map(|i| if i + 1 == samples { t_max } else { i as f64 * step }).collect())
}
