//! Scaled evaluation of the exterior coefficient for all orders at once.
//!
//! The literal cascade multiplies matrices whose columns hold `H1_n` and `J_n`
//! at the interface; for high orders or evanescent `h` these differ by
//! hundreds of orders of magnitude and the product leaves `f64` range. Here
//! each column is divided by the log-scale of its cylinder function, and
//! instead of forming `T^(1)` the two-dimensional space of solutions that are
//! regular in the core is carried outward interface by interface,
//! re-orthonormalised at every step. In the exterior the coefficient follows
//! from the same two conditions the cascade formula expresses, and the column
//! scales are restored in logarithmic form, so `C`, which can itself be
//! astronomically large, is only ever combined with the decaying Hankel
//! factors of the observation points.

use num_complex::Complex64;

use super::matrix::Mat4;
use super::mode::LayerMode;
use super::transfer::{assemble, Polarization};
use crate::error::{Error, Result};
use crate::medium::LayerStack;
use crate::specfun::{CylFunTable, Kind};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `mantissa * exp(log_scale)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScaledValue {
    pub mantissa: Complex64,
    pub log_scale: f64,
}

impl ScaledValue {
    pub fn value(&self) -> Complex64 {
        if self.mantissa == ZERO {
            return ZERO;
        }
        self.mantissa * self.log_scale.exp()
    }
}

/// One cylinder-function column entry with unit-modulus value.
#[derive(Clone, Copy, Debug)]
struct Col {
    val: Complex64,
    /// Radial derivative divided by the same scale.
    der: Complex64,
    log: f64,
}

fn column(table: &CylFunTable, n: usize, eta: Complex64) -> Col {
    let v = table.value(n);
    let a = v.norm();
    if a == 0.0 || !a.is_finite() {
        return Col {
            val: v,
            der: table.derivative(n) * eta,
            log: table.log_scale(n),
        };
    }
    Col {
        val: v / a,
        der: table.derivative(n) * eta / a,
        log: table.log_scale(n) + a.ln(),
    }
}

struct Evaluation {
    modes: Vec<LayerMode>,
    /// `(J, H)` tables of region `f` at its outer radius `a_{f-1}`; absent for
    /// the exterior, and without `H` for the core, which only needs its
    /// regular solution.
    outer: Vec<Option<(CylFunTable, Option<CylFunTable>)>>,
    /// `(J, H)` tables of region `f < N` at its inner radius `a_f`.
    inner: Vec<(CylFunTable, CylFunTable)>,
}

/// Per-frequency evaluator of `C_n(h)` for `n = 0 ..= n_max`.
#[derive(Clone, Debug)]
pub struct ScatteringKernel {
    pol: Polarization,
    radii: Vec<f64>,
    eps: Vec<Complex64>,
    omega: Complex64,
    n_max: usize,
}

impl ScatteringKernel {
    pub fn new(stack: &LayerStack, omega: Complex64, pol: Polarization, n_max: usize) -> Result<Self> {
        if !(omega.re.is_finite() && omega.im.is_finite()) || omega.norm() == 0.0 {
            return Err(Error::param("omega", "must be finite and non-zero"));
        }
        Ok(ScatteringKernel {
            pol,
            radii: stack.radii().to_vec(),
            eps: stack.permittivities(omega),
            omega,
            n_max,
        })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn omega(&self) -> Complex64 {
        self.omega
    }

    /// Exterior wavenumber `k_1`.
    pub fn k1(&self) -> Complex64 {
        self.eps[0].sqrt() * self.omega
    }

    /// Largest real part of any region's wavenumber.
    pub fn max_wavenumber(&self) -> f64 {
        self.eps
            .iter()
            .map(|e| (e.sqrt() * self.omega).re.abs())
            .fold(0.0, f64::max)
    }

    pub fn outer_radius(&self) -> f64 {
        self.radii[0]
    }

    fn evaluate(&self, h: Complex64) -> Result<Evaluation> {
        let regions = self.eps.len();
        let modes = self
            .eps
            .iter()
            .map(|&e| LayerMode::new(e, self.omega, 0, h))
            .collect::<Result<Vec<_>>>()?;
        let mut outer = Vec::with_capacity(regions);
        let mut inner = Vec::with_capacity(regions);
        for f in 1..=regions {
            let eta = modes[f - 1].eta;
            if f >= 2 {
                let z = eta * self.radii[f - 2];
                let h_table = if f < regions {
                    Some(CylFunTable::new(Kind::H1, self.n_max, z)?)
                } else {
                    None
                };
                outer.push(Some((CylFunTable::new(Kind::J, self.n_max, z)?, h_table)));
            } else {
                outer.push(None);
            }
            if f < regions {
                let z = eta * self.radii[f - 1];
                inner.push((
                    CylFunTable::new(Kind::J, self.n_max, z)?,
                    CylFunTable::new(Kind::H1, self.n_max, z)?,
                ));
            }
        }
        Ok(Evaluation { modes, outer, inner })
    }

    fn matrix(&self, lm: &LayerMode, h: Complex64, n: usize, a: f64, j: Col, hc: Option<Col>) -> Mat4 {
        let zeta = Complex64::new(0.0, n as f64) * h / lm.k;
        let hc = hc.unwrap_or(Col {
            val: ZERO,
            der: ZERO,
            log: 0.0,
        });
        assemble(self.pol, lm, zeta, a, hc.val, hc.der, j.val, j.der)
    }

    /// Exterior coefficients `C_n(h)` for all orders, log-scaled.
    pub fn coefficients(&self, h: Complex64) -> Result<Vec<ScaledValue>> {
        let ev = self.evaluate(h)?;
        (0..=self.n_max).map(|n| self.coefficient_order(&ev, h, n)).collect()
    }

    fn coefficient_order(&self, ev: &Evaluation, h: Complex64, n: usize) -> Result<ScaledValue> {
        let regions = self.eps.len();
        let last = regions - 1; // index of the innermost interface, 1-based

        // Regular core solutions expressed as tangential fields at a_{N-1}.
        let core = &ev.modes[regions - 1];
        let (jt, _) = ev.outer[regions - 1].as_ref().expect("core outer tables");
        let core_j = column(jt, n, core.eta);
        let core_f = self.matrix(core, h, n, self.radii[last - 1], core_j, None);
        let mut fields = [[ZERO; 2]; 4];
        for (i, row) in fields.iter_mut().enumerate() {
            row[0] = core_f[(i, 2)];
            row[1] = core_f[(i, 3)];
        }

        let mut basis = [[ZERO; 2]; 4];
        for f in (1..=last).rev() {
            let a = self.radii[f - 1];
            let lm = &ev.modes[f - 1];
            let (jt, ht) = &ev.inner[f - 1];
            let jc = column(jt, n, lm.eta);
            let hcol = column(ht, n, lm.eta);
            if self.eps[f - 1] == self.eps[f] {
                // Transparent interface: both sides share material and scales,
                // so the coordinates carry over unchanged.
                if f == last {
                    basis = [[ZERO; 2]; 4];
                    basis[2][0] = Complex64::new(1.0, 0.0);
                    basis[3][1] = Complex64::new(1.0, 0.0);
                }
            } else {
                self.cross_interface(lm, h, n, a, jc, hcol, f < last, ev, f, &mut fields, &mut basis)?;
            }

            if f >= 2 {
                // Move region f's coordinates from the scale at a_f to the scale at a_{f-1}.
                let (ojt, oht) = ev.outer[f - 1].as_ref().expect("outer tables");
                let oht = oht.as_ref().expect("shell H table");
                let d_h = column(oht, n, lm.eta).log - hcol.log;
                let d_j = column(ojt, n, lm.eta).log - jc.log;
                let top = d_h.max(d_j);
                let (sh, sj) = ((d_h - top).exp(), (d_j - top).exp());
                for row in basis.iter_mut().take(2) {
                    row[0] *= sh;
                    row[1] *= sh;
                }
                for row in basis.iter_mut().skip(2) {
                    row[0] *= sj;
                    row[1] *= sj;
                }
                orthonormalize(&mut basis)?;
            }
        }

        // Exterior coordinates: regular amplitudes (1, 0) fix the combination.
        let det = basis[2][0] * basis[3][1] - basis[2][1] * basis[3][0];
        let scale = (basis[2][0] * basis[3][1]).norm() + (basis[2][1] * basis[3][0]).norm();
        if !(det.norm() > 1e-14 * scale) {
            return Err(Error::VanishingDenominator { magnitude: det.norm() });
        }
        let alpha = basis[3][1] / det;
        let beta = -basis[3][0] / det;
        let x = basis[0][0] * alpha + basis[0][1] * beta;

        let lm = &ev.modes[0];
        let (jt, ht) = &ev.inner[0];
        let jc = column(jt, n, lm.eta);
        let hc = column(ht, n, lm.eta);
        Ok(ScaledValue {
            mantissa: x,
            log_scale: jc.log - hc.log,
        })
    }

    #[allow(clippy::too_many_arguments)]
    fn cross_interface(
        &self,
        lm: &LayerMode,
        h: Complex64,
        n: usize,
        a: f64,
        jc: Col,
        hcol: Col,
        from_shell: bool,
        ev: &Evaluation,
        f: usize,
        fields: &mut [[Complex64; 2]; 4],
        basis: &mut [[Complex64; 2]; 4],
    ) -> Result<()> {
        if from_shell {
            // Fields of region f+1 at a_f from its current coordinates.
            let inner_lm = &ev.modes[f];
            let (ojt, oht) = ev.outer[f].as_ref().expect("outer tables");
            let m = self.matrix(
                inner_lm,
                h,
                n,
                a,
                column(ojt, n, inner_lm.eta),
                oht.as_ref().map(|t| column(t, n, inner_lm.eta)),
            );
            *fields = mul_4x2(&m, basis);
        }
        let outer_f = self.matrix(lm, h, n, a, jc, Some(hcol));
        let lu = outer_f.lu()?;
        lu.check_condition()?;
        for col in 0..2 {
            let x = lu.solve(&[fields[0][col], fields[1][col], fields[2][col], fields[3][col]]);
            for i in 0..4 {
                basis[i][col] = x[i];
            }
        }
        orthonormalize(basis)
    }

    /// `(eta_1^2 / k_1^2) C_n(h) H1_n(eta_1 r) H1_n(eta_1 r')` for all orders.
    pub fn radial_products(&self, h: Complex64, r: f64, r_prime: f64) -> Result<Vec<Complex64>> {
        let a1 = self.radii[0];
        if !(r > a1 && r_prime > a1) {
            return Err(Error::InvalidGeometry(format!(
                "observation radii {r} and {r_prime} must exceed the outer radius {a1}"
            )));
        }
        let ev = self.evaluate(h)?;
        let lm = ev.modes[0];
        let ht_r = CylFunTable::new(Kind::H1, self.n_max, lm.eta * r)?;
        let ht_rp = if r_prime == r {
            None
        } else {
            Some(CylFunTable::new(Kind::H1, self.n_max, lm.eta * r_prime)?)
        };
        let prefactor = lm.eta * lm.eta / (lm.k * lm.k);
        let mut out = Vec::with_capacity(self.n_max + 1);
        for n in 0..=self.n_max {
            let c = self.coefficient_order(&ev, h, n)?;
            let (m1, s1) = (ht_r.value(n), ht_r.log_scale(n));
            let (m2, s2) = match &ht_rp {
                Some(t) => (t.value(n), t.log_scale(n)),
                None => (m1, s1),
            };
            let mant = c.mantissa * m1 * m2;
            let v = if mant == ZERO {
                ZERO
            } else {
                mant * (c.log_scale + s1 + s2).exp()
            };
            out.push(prefactor * v);
        }
        Ok(out)
    }
}

fn mul_4x2(m: &Mat4, b: &[[Complex64; 2]; 4]) -> [[Complex64; 2]; 4] {
    let mut out = [[ZERO; 2]; 4];
    for i in 0..4 {
        for c in 0..2 {
            out[i][c] = (0..4).map(|k| m[(i, k)] * b[k][c]).sum();
        }
    }
    out
}

/// Modified Gram–Schmidt on the two columns.
fn orthonormalize(b: &mut [[Complex64; 2]; 4]) -> Result<()> {
    let norm = |b: &[[Complex64; 2]; 4], c: usize| (0..4).map(|i| b[i][c].norm_sqr()).sum::<f64>().sqrt();
    let n0 = norm(b, 0);
    if !(n0 > 0.0 && n0.is_finite()) {
        return Err(Error::InvariantViolation(format!("degenerate solution basis (norm {n0})")));
    }
    for row in b.iter_mut() {
        row[0] /= n0;
    }
    let proj: Complex64 = (0..4).map(|i| b[i][0].conj() * b[i][1]).sum();
    for row in b.iter_mut() {
        let t = row[0] * proj;
        row[1] -= t;
    }
    let n1 = norm(b, 1);
    if !(n1 > 0.0 && n1.is_finite()) {
        return Err(Error::InvariantViolation(format!("degenerate solution basis (norm {n1})")));
    }
    for row in b.iter_mut() {
        row[1] /= n1;
    }
    Ok(())
}
