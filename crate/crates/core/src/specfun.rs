//! Integer-order cylindrical Bessel and Hankel functions of complex argument.
//!
//! Values are carried as `mantissa * exp(log_scale)` so that the very large
//! and very small magnitudes met in the mode sums (high order at small
//! argument, evanescent arguments along the imaginary axis) stay representable.
//!
//! Evaluation strategy, for `z` folded into the first quadrant:
//!
//! * `J_n`: ascending series for `|z| <= SERIES_RADIUS`, otherwise backward
//!   (Miller) recurrence of the ratios `J_k / J_{k-1}` normalised by the
//!   generating-function identity `exp(-iz) = J_0 + 2 sum_k (-i)^k J_k`.
//! * `H1_0`, `H1_1`: ascending series for `J` and `Y` when small,
//!   Steed's continued fraction for `H'/H` plus the Wronskian in the middle
//!   range, and the Hankel asymptotic expansion for `|z| >= ASYMPTOTIC_RADIUS`.
//!   Higher orders follow from forward recurrence, which is stable for the
//!   outgoing solution in the closed upper half plane.
//!
//! Second-quadrant arguments are mapped back with `J_n(-conj w)` and
//! `H1_n(-conj w)` reflection formulas.

use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use crate::error::{Error, Result};

/// Highest order inside the validated envelope.
pub const MAX_ORDER: usize = 400;
/// Largest `|z|` inside the validated envelope.
pub const MAX_ARGUMENT: f64 = 2000.0;

const SERIES_RADIUS: f64 = 2.0;
const ASYMPTOTIC_RADIUS: f64 = 20.0;
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const RESCALE_ABOVE: f64 = 1e100;
const RESCALE_BELOW: f64 = 1e-100;
const CF_MAX_ITER: usize = 20_000;

const I: Complex64 = Complex64::new(0.0, 1.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Which cylinder function: regular Bessel `J_n` or outgoing Hankel `H1_n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Kind {
    J,
    H1,
}

/// One evaluation `Z_n(z)` with its derivative with respect to `z`, both
/// stored as `mantissa * exp(log_scale)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CylFunValue {
    pub order: usize,
    pub argument: Complex64,
    pub value: Complex64,
    pub derivative: Complex64,
    pub log_scale: f64,
}

impl CylFunValue {
    /// `Z_n(z)` without scaling; may be infinite or zero outside `f64` range.
    pub fn unscaled_value(&self) -> Complex64 {
        self.value * self.log_scale.exp()
    }

    pub fn unscaled_derivative(&self) -> Complex64 {
        self.derivative * self.log_scale.exp()
    }
}

/// `Z_0 ..= Z_nmax` at one argument.
#[derive(Clone, Debug)]
pub struct CylFunTable {
    kind: Kind,
    argument: Complex64,
    values: Vec<Complex64>,
    derivatives: Vec<Complex64>,
    log_scales: Vec<f64>,
}

impl CylFunTable {
    pub fn new(kind: Kind, max_order: usize, z: Complex64) -> Result<Self> {
        check_envelope(max_order, z)?;
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::param("z", format!("non-finite argument {z}")));
        }
        match kind {
            Kind::J => j_table(max_order, z),
            Kind::H1 => {
                if z.im < 0.0 {
                    return Err(Error::LowerHalfPlane(z));
                }
                if z == ZERO {
                    return Err(Error::SingularArgument(z));
                }
                h1_table(max_order, z)
            }
        }
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn argument(&self) -> Complex64 {
        self.argument
    }

    pub fn max_order(&self) -> usize {
        self.values.len() - 1
    }

    #[inline]
    pub fn value(&self, n: usize) -> Complex64 {
        self.values[n]
    }

    #[inline]
    pub fn derivative(&self, n: usize) -> Complex64 {
        self.derivatives[n]
    }

    #[inline]
    pub fn log_scale(&self, n: usize) -> f64 {
        self.log_scales[n]
    }

    pub fn get(&self, n: usize) -> CylFunValue {
        CylFunValue {
            order: n,
            argument: self.argument,
            value: self.values[n],
            derivative: self.derivatives[n],
            log_scale: self.log_scales[n],
        }
    }
}

fn check_envelope(n: usize, z: Complex64) -> Result<()> {
    if n > MAX_ORDER || z.norm() > MAX_ARGUMENT {
        return Err(Error::DomainExceeded {
            order: n,
            argument: z,
        });
    }
    Ok(())
}

/// Scaled evaluation of a single order.
pub fn cyl_fun(kind: Kind, n: usize, z: Complex64) -> Result<CylFunValue> {
    Ok(CylFunTable::new(kind, n, z)?.get(n))
}

fn unscaled(kind: Kind, n: usize, z: Complex64) -> Result<(Complex64, Complex64)> {
    let v = cyl_fun(kind, n, z)?;
    let value = v.unscaled_value();
    let derivative = v.unscaled_derivative();
    let finite = |c: Complex64| c.re.is_finite() && c.im.is_finite();
    if !finite(value) || !finite(derivative) {
        return Err(Error::Overflow {
            order: n,
            argument: z,
        });
    }
    Ok((value, derivative))
}

/// `J_n(z)`.
pub fn bessel_j(n: usize, z: Complex64) -> Result<Complex64> {
    unscaled(Kind::J, n, z).map(|(v, _)| v)
}

/// `H1_n(z) = J_n(z) + i Y_n(z)` for `Im z >= 0`.
pub fn hankel1(n: usize, z: Complex64) -> Result<Complex64> {
    unscaled(Kind::H1, n, z).map(|(v, _)| v)
}

/// `(Z_n(z), dZ_n/dz)`. The radial derivative of `Z_n(eta r)` is
/// `eta * dZ_n/dz`.
pub fn deriv_pair(kind: Kind, n: usize, z: Complex64) -> Result<(Complex64, Complex64)> {
    unscaled(kind, n, z)
}

// ---------------------------------------------------------------------------
// J_n
// ---------------------------------------------------------------------------

fn j_table(nmax: usize, z: Complex64) -> Result<CylFunTable> {
    let mut table = if z == ZERO {
        let mut values = vec![ZERO; nmax + 1];
        let mut derivatives = vec![ZERO; nmax + 1];
        values[0] = ONE;
        if nmax >= 1 {
            derivatives[1] = Complex64::new(0.5, 0.0);
        }
        CylFunTable {
            kind: Kind::J,
            argument: z,
            values,
            derivatives,
            log_scales: vec![0.0; nmax + 1],
        }
    } else {
        // Fold into the first quadrant: J_n(conj z) = conj J_n(z) and
        // J_n(-z) = (-1)^n J_n(z).
        let conj_flip = z.im < 0.0;
        let z1 = if conj_flip { z.conj() } else { z };
        let neg = z1.re < 0.0;
        let w = if neg { -z1.conj() } else { z1 };
        let mut t = if w.norm() <= SERIES_RADIUS {
            j_series_table(nmax, w)
        } else {
            j_miller_table(nmax, w)?
        };
        if neg {
            // J_n(z1) = (-1)^n conj J_n(w), J_n'(z1) = (-1)^(n+1) conj J_n'(w).
            for n in 0..=nmax {
                let s = if n % 2 == 0 { 1.0 } else { -1.0 };
                t.values[n] = t.values[n].conj() * s;
                t.derivatives[n] = -t.derivatives[n].conj() * s;
            }
        }
        if conj_flip {
            for n in 0..=nmax {
                t.values[n] = t.values[n].conj();
                t.derivatives[n] = t.derivatives[n].conj();
            }
        }
        t.argument = z;
        t
    };
    table.argument = z;
    Ok(table)
}

/// Ascending series, one order at a time, with the `(z/2)^n / n!` prefactor
/// kept in logarithmic form.
fn j_series_table(nmax: usize, w: Complex64) -> CylFunTable {
    let top = nmax + 1;
    let mut mant = Vec::with_capacity(top + 1);
    let mut scale = Vec::with_capacity(top + 1);
    let log_half = (w * 0.5).ln();
    let mut ln_fact = 0.0;
    for n in 0..=top {
        if n > 0 {
            ln_fact += (n as f64).ln();
        }
        let lp = log_half * n as f64 - ln_fact;
        let s = j_series_sum(n, w);
        mant.push(Complex64::from_polar(1.0, lp.im) * s);
        scale.push(lp.re);
    }
    let mut values = Vec::with_capacity(nmax + 1);
    let mut derivatives = Vec::with_capacity(nmax + 1);
    let mut log_scales = Vec::with_capacity(nmax + 1);
    for n in 0..=nmax {
        let next = mant[n + 1] * (scale[n + 1] - scale[n]).exp();
        let d = if n == 0 {
            -next
        } else {
            let prev = mant[n - 1] * (scale[n - 1] - scale[n]).exp();
            (prev - next) * 0.5
        };
        values.push(mant[n]);
        derivatives.push(d);
        log_scales.push(scale[n]);
    }
    CylFunTable {
        kind: Kind::J,
        argument: w,
        values,
        derivatives,
        log_scales,
    }
}

/// `sum_k (-z^2/4)^k n! / (k! (n+k)!)`.
fn j_series_sum(n: usize, w: Complex64) -> Complex64 {
    let q = -(w * w) * 0.25;
    let mut term = ONE;
    let mut sum = ONE;
    for k in 1..200 {
        term = term * q / (k as f64 * (n + k) as f64);
        sum += term;
        if term.norm() <= 1e-17 * sum.norm() {
            break;
        }
    }
    sum
}

fn miller_start(nmax: usize, r: f64) -> usize {
    let base = (nmax + 1).max(r.ceil() as usize);
    base + 25 + (12.0 * r.cbrt()).ceil() as usize
}

/// Backward ratio recurrence for `J_k / J_{k-1}`, first-quadrant `w`.
fn j_miller_table(nmax: usize, w: Complex64) -> Result<CylFunTable> {
    let top = miller_start(nmax, w.norm());
    // ratios[k] = J_k / J_{k-1}, k = 1..=top
    let mut ratios = vec![ZERO; top + 2];
    let mut next = ZERO;
    for k in (1..=top).rev() {
        let denom = Complex64::new(2.0 * k as f64, 0.0) / w - next;
        next = if denom == ZERO { Complex64::new(1e300, 0.0) } else { denom.inv() };
        ratios[k] = next;
    }

    // exp(-iw) = J_0 * (1 + 2 sum_k (-i)^k P_k),  P_k = J_k / J_0
    let mut sum = ONE;
    let mut prod = ONE;
    let mut phase = ONE;
    for (k, &rk) in ratios.iter().enumerate().take(top + 1).skip(1) {
        prod *= rk;
        phase *= -I;
        let term = phase * prod * 2.0;
        sum += term;
        if k > nmax + 1 && (k as f64) > w.norm() && prod.norm() < 1e-18 * sum.norm() {
            break;
        }
    }
    // J_0 = exp(-iw) / sum, magnitude exp(Im w) carried in the scale.
    let mut m = Complex64::from_polar(1.0, -w.re) / sum;
    let mut s = w.im;
    renormalize(&mut m, &mut s);

    let mut values = Vec::with_capacity(nmax + 1);
    let mut derivatives = Vec::with_capacity(nmax + 1);
    let mut log_scales = Vec::with_capacity(nmax + 1);
    for n in 0..=nmax {
        if n > 0 {
            m *= ratios[n];
            renormalize(&mut m, &mut s);
        }
        // J_n' = J_n (n/z - J_{n+1}/J_n)
        let d = m * (Complex64::new(n as f64, 0.0) / w - ratios[n + 1]);
        values.push(m);
        derivatives.push(d);
        log_scales.push(s);
    }
    Ok(CylFunTable {
        kind: Kind::J,
        argument: w,
        values,
        derivatives,
        log_scales,
    })
}

#[inline]
fn renormalize(m: &mut Complex64, s: &mut f64) {
    let a = m.norm();
    if a > RESCALE_ABOVE || (a < RESCALE_BELOW && a > 0.0) {
        *s += a.ln();
        *m /= a;
    }
}

// ---------------------------------------------------------------------------
// H1_n
// ---------------------------------------------------------------------------

fn h1_table(nmax: usize, z: Complex64) -> Result<CylFunTable> {
    let neg = z.re < 0.0;
    // H1_n(z) = -(-1)^n conj H1_n(w) with w = -conj z in the first quadrant.
    let w = if neg { -z.conj() } else { z };
    let ((h0, h1), s0) = h1_low_orders(w)?;

    let mut values = Vec::with_capacity(nmax + 1);
    let mut derivatives = Vec::with_capacity(nmax + 1);
    let mut log_scales = Vec::with_capacity(nmax + 1);

    let mut s = s0;
    let mut prev = h0; // H_{n-1} (order n = 0: unused)
    let mut cur = h0;
    let mut nxt = h1;
    for n in 0..=nmax {
        let d = if n == 0 {
            -nxt
        } else {
            prev - cur * (n as f64) / w
        };
        values.push(cur);
        derivatives.push(d);
        log_scales.push(s);
        if n == nmax {
            break;
        }
        // advance: (prev, cur, nxt) <- (cur, nxt, H_{n+2})
        let after = nxt * (2.0 * (n + 1) as f64) / w - cur;
        prev = cur;
        cur = nxt;
        nxt = after;
        let a = nxt.norm().max(cur.norm());
        if a > RESCALE_ABOVE {
            prev /= a;
            cur /= a;
            nxt /= a;
            s += a.ln();
        }
    }

    if neg {
        for n in 0..=nmax {
            let sign = if n % 2 == 0 { -1.0 } else { 1.0 };
            values[n] = values[n].conj() * sign;
            derivatives[n] = -derivatives[n].conj() * sign;
        }
    }
    Ok(CylFunTable {
        kind: Kind::H1,
        argument: z,
        values,
        derivatives,
        log_scales,
    })
}

/// `(H1_0(w), H1_1(w))` sharing one log scale, for first-quadrant `w != 0`.
fn h1_low_orders(w: Complex64) -> Result<((Complex64, Complex64), f64)> {
    let r = w.norm();
    if r <= SERIES_RADIUS {
        let j0 = j_series_sum(0, w);
        let j1 = w * 0.5 * j_series_sum(1, w);
        let (y0, y1) = y01_series(w);
        return Ok(((j0 + I * y0, j1 + I * y1), 0.0));
    }
    if r >= ASYMPTOTIC_RADIUS {
        // exp(iw) = exp(i Re w) * exp(-Im w)
        let h0 = hankel_asymptotic(0.0, w);
        let h1 = hankel_asymptotic(1.0, w);
        return Ok(((h0, h1), -w.im));
    }
    // Middle range: g = H0'/H0 from the continued fraction, then the
    // Wronskian J0 H0' - J0' H0 = 2i/(pi w) with H0' = -H1 and J0' = -J1.
    let jt = j_miller_table(1, w)?;
    let (m0, s0) = (jt.values[0], jt.log_scales[0]);
    let m1 = jt.values[1] * (jt.log_scales[1] - s0).exp();
    let g = hankel_log_derivative(0.0, w)?;
    let q = m0 * g + m1;
    let h0 = Complex64::new(0.0, 2.0) / (PI * w * q);
    let h1 = -g * h0;
    Ok(((h0, h1), -s0))
}

/// Hankel expansion of `H1_nu(w) * exp(-i w) * exp(i Re w)`, i.e. the value
/// with the real decay factor `exp(-Im w)` removed.
fn hankel_asymptotic(nu: f64, w: Complex64) -> Complex64 {
    let mu = 4.0 * nu * nu;
    let mut term = ONE;
    let mut sum = ONE;
    let mut last = f64::INFINITY;
    for k in 1..200 {
        let odd = (2 * k - 1) as f64;
        term = term * I * (mu - odd * odd) / (8.0 * k as f64 * w);
        let t = term.norm();
        if t > last {
            break;
        }
        sum += term;
        last = t;
        if t <= 1e-17 * sum.norm() {
            break;
        }
    }
    let pre = (Complex64::new(2.0 / PI, 0.0) / w).sqrt();
    let phase = Complex64::from_polar(1.0, w.re - nu * FRAC_PI_2 - FRAC_PI_4);
    pre * phase * sum
}

/// Steed's second continued fraction for `H1_nu'(w) / H1_nu(w)`.
fn hankel_log_derivative(nu: f64, w: Complex64) -> Result<Complex64> {
    // Modified Lentz on g = b_1 + a_2 / (b_2 + a_3 / (b_3 + ...)); the
    // fraction itself is a_1 / g.
    let tiny = 1e-300;
    let coeff_a = |k: usize| (k as f64 - 0.5).powi(2) - nu * nu;
    let coeff_b = |k: usize| (w + I * k as f64) * 2.0;
    let mut g = coeff_b(1);
    let mut c = g;
    let mut d = ZERO;
    for k in 2..CF_MAX_ITER {
        let a = coeff_a(k);
        let b = coeff_b(k);
        d = b + d * a;
        if d == ZERO {
            d = Complex64::new(tiny, 0.0);
        }
        c = b + a / c;
        if c == ZERO {
            c = Complex64::new(tiny, 0.0);
        }
        d = d.inv();
        let delta = c * d;
        g *= delta;
        if (delta - ONE).norm() < 1e-16 {
            let f = coeff_a(1) / g;
            return Ok(-ONE / (w * 2.0) + I + I / w * f);
        }
    }
    Err(Error::NonConvergence {
        estimate: g,
        error_bound: f64::NAN,
    })
}

/// `Y_0(w)` and `Y_1(w)` from their ascending series (small `|w|`).
fn y01_series(w: Complex64) -> (Complex64, Complex64) {
    let q = -(w * w) * 0.25;
    let half = w * 0.5;
    let ln_half = half.ln();
    let j0 = j_series_sum(0, w);
    let j1 = half * j_series_sum(1, w);

    // Y_0 = (2/pi) ln(w/2) J_0 - (2/pi) sum psi(k+1) q^k / (k!)^2
    // Y_1 = -2/(pi w) + (2/pi) ln(w/2) J_1
    //       - (w/(2 pi)) sum (psi(k+1) + psi(k+2)) q^k / (k! (k+1)!)
    let mut psi_k1 = -EULER_GAMMA; // psi(k+1)
    let mut t0 = ONE; // q^k / (k!)^2
    let mut t1 = ONE; // q^k / (k! (k+1)!)
    let mut s0 = t0 * psi_k1;
    let mut s1 = t1 * (psi_k1 + psi_k1 + 1.0);
    for k in 1..200 {
        let kf = k as f64;
        psi_k1 += 1.0 / kf;
        t0 = t0 * q / (kf * kf);
        t1 = t1 * q / (kf * (kf + 1.0));
        let psi_k2 = psi_k1 + 1.0 / (kf + 1.0);
        let d0 = t0 * psi_k1;
        let d1 = t1 * (psi_k1 + psi_k2);
        s0 += d0;
        s1 += d1;
        if d0.norm() <= 1e-17 * s0.norm().max(1e-300) && d1.norm() <= 1e-17 * s1.norm().max(1e-300) {
            break;
        }
    }
    let two_pi = 2.0 / PI;
    let y0 = ln_half * j0 * two_pi - s0 * two_pi;
    let y1 = -Complex64::new(two_pi, 0.0) / w + ln_half * j1 * two_pi - half * s1 / PI;
    (y0, y1)
}
