//! Quadrature engines for the axial-wavenumber integral, the azimuthal mode
//! sum and principal-value frequency integrals.
//!
//! The `h` integral is carried along a path `P` from `0` to `+inf`; the full
//! line follows from `Int_R f = Int_P [f(h) + f(-h)] dh`, and for the even
//! integrands of the Green function this is twice the half-line value. At a
//! real frequency the exterior branch point `h = k_1` and the guided-mode
//! poles (pushed slightly above the axis by material loss) are avoided by
//! running `P` along a semi-ellipse in the fourth quadrant,
//!
//! ```text
//!   h(t) = (h_c / 2)(1 - cos t) - i b sin t,   0 <= t <= pi,
//! ```
//!
//! which passes below `+k_1` as the causal limit `omega -> omega + i0`
//! requires, and then following the real axis from `h_c` outward in panels
//! until the evanescent tail is negligible. At frequencies with positive
//! imaginary part the branch point is already off the axis and `P` is the
//! real axis itself.
//!
//! Every integral is vector-valued (all azimuthal orders at once) and uses a
//! globally adaptive 21-point Gauss–Kronrod rule; the error measure is the
//! sum of the component error estimates compared against the sum of
//! component magnitudes.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Numerical policy shared by the quadrature and the mode sum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadraturePolicy {
    /// Relative tolerance of every adaptive integral.
    pub rel_tol: f64,
    /// Depth of the contour below the real axis, as a fraction of `|k_1|`.
    pub branch_window: f64,
    /// A tail panel whose contribution falls below this fraction of the
    /// accumulated magnitude ends the `h` integration.
    pub tail_cutoff: f64,
    /// Hard cap on the azimuthal order.
    pub n_max: usize,
    /// Number of successive negligible orders that ends the mode sum.
    pub n_stop: usize,
    /// Relative size below which an order counts as negligible.
    pub n_stop_tol: f64,
    /// Subdivision budget per adaptive integral.
    pub max_intervals: usize,
    /// Maximum number of tail panels.
    pub max_tail_panels: usize,
}

impl Default for QuadraturePolicy {
    fn default() -> Self {
        QuadraturePolicy {
            rel_tol: 1e-8,
            branch_window: 0.25,
            tail_cutoff: 1e-10,
            n_max: 60,
            n_stop: 5,
            n_stop_tol: 1e-10,
            max_intervals: 4000,
            max_tail_panels: 400,
        }
    }
}

impl QuadraturePolicy {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return Err(Error::param("rel_tol", "must lie in (0, 1)"));
        }
        if !(self.branch_window > 0.0 && self.branch_window.is_finite()) {
            return Err(Error::param("branch_window", "must be positive"));
        }
        if !(self.tail_cutoff > 0.0) {
            return Err(Error::param("tail_cutoff", "must be positive"));
        }
        if self.n_max < 1 {
            return Err(Error::param("n_max", "must be at least 1"));
        }
        if self.n_stop < 1 {
            return Err(Error::param("n_stop", "must be at least 1"));
        }
        if self.max_intervals < 1 || self.max_tail_panels < 1 {
            return Err(Error::param("max_intervals", "budgets must be positive"));
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Gauss–Kronrod 10/21
// ---------------------------------------------------------------------------

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_931_966_982,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// Gauss weights for the odd-indexed Kronrod nodes.
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// A parametrised piece of the integration path, `t -> (h(t), h'(t))`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PathSegment {
    /// Straight line from `from` to `to`, `t in [0, 1]`.
    Line { from: Complex64, to: Complex64 },
    /// Fourth-quadrant semi-ellipse from `0` to `h_c`, `t in [0, pi]`.
    Ellipse { h_c: f64, depth: f64 },
}

impl PathSegment {
    fn range(&self) -> (f64, f64) {
        match self {
            PathSegment::Line { .. } => (0.0, 1.0),
            PathSegment::Ellipse { .. } => (0.0, PI),
        }
    }

    fn point(&self, t: f64) -> (Complex64, Complex64) {
        match *self {
            PathSegment::Line { from, to } => (from + (to - from) * t, to - from),
            PathSegment::Ellipse { h_c, depth } => {
                let (s, c) = t.sin_cos();
                (
                    Complex64::new(0.5 * h_c * (1.0 - c), -depth * s),
                    Complex64::new(0.5 * h_c * s, -depth * c),
                )
            }
        }
    }
}

/// Result of a vector-valued integral.
#[derive(Clone, Debug, PartialEq)]
pub struct VecQuadrature {
    pub values: Vec<Complex64>,
    /// Aggregate error bound: estimated `sum_n |error_n|`.
    pub error: f64,
    pub evaluations: usize,
}

impl VecQuadrature {
    pub fn magnitude(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).sum()
    }
}

/// Result of a scalar integral.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quadrature {
    pub value: Complex64,
    pub error: f64,
    pub evaluations: usize,
}

struct Piece {
    segment: usize,
    t0: f64,
    t1: f64,
    values: Vec<Complex64>,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk21<F>(f: &mut F, seg: &PathSegment, t0: f64, t1: f64) -> Result<(Vec<Complex64>, f64)>
where
    F: FnMut(Complex64) -> Result<Vec<Complex64>>,
{
    let half = 0.5 * (t1 - t0);
    let centre = 0.5 * (t1 + t0);
    let eval = |f: &mut F, t: f64| -> Result<Vec<Complex64>> {
        let (h, dh) = seg.point(t);
        let mut v = f(h)?;
        for x in v.iter_mut() {
            *x *= dh;
        }
        Ok(v)
    };
    let fc = eval(f, centre)?;
    let m = fc.len();
    let mut kron: Vec<Complex64> = fc.iter().map(|v| v * WGK[10]).collect();
    let mut gauss = vec![ZERO; m];
    let mut samples: Vec<(Vec<Complex64>, Vec<Complex64>)> = Vec::with_capacity(10);
    for j in 0..10 {
        let dx = half * XGK[j];
        let a = eval(f, centre - dx)?;
        let b = eval(f, centre + dx)?;
        if a.len() != m || b.len() != m {
            return Err(Error::InvariantViolation("integrand changed length".into()));
        }
        for i in 0..m {
            let s = a[i] + b[i];
            kron[i] += s * WGK[j];
            if j % 2 == 1 {
                gauss[i] += s * WG[j / 2];
            }
        }
        samples.push((a, b));
    }
    // QUADPACK-style error scaling on the aggregated component errors.
    let mut diff = 0.0;
    let mut resasc = 0.0;
    for i in 0..m {
        diff += (kron[i] - gauss[i]).norm();
        let mean = kron[i] * 0.5;
        let mut asc = WGK[10] * (fc[i] - mean).norm();
        for (j, (a, b)) in samples.iter().enumerate() {
            asc += WGK[j] * ((a[i] - mean).norm() + (b[i] - mean).norm());
        }
        resasc += asc;
    }
    let scale = half.abs();
    diff *= scale;
    resasc *= scale;
    let mut err = diff;
    if resasc > 0.0 && diff > 0.0 {
        err = resasc * (200.0 * diff / resasc).powf(1.5).min(1.0);
    }
    let mag: f64 = kron.iter().map(|v| v.norm()).sum::<f64>() * scale;
    err = err.max(50.0 * f64::EPSILON * mag);
    for v in kron.iter_mut() {
        *v *= half;
    }
    if kron.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(Error::NonConvergence {
            estimate: Complex64::new(f64::NAN, f64::NAN),
            error_bound: f64::INFINITY,
        });
    }
    Ok((kron, err))
}

/// Globally adaptive vector integral over a sequence of path segments.
/// Stops when `sum |error_n| <= rel_tol * sum |I_n|` or the aggregate error
/// falls below `abs_tol`.
pub fn integrate_path<F>(
    mut f: F,
    segments: &[PathSegment],
    initial_pieces: usize,
    rel_tol: f64,
    abs_tol: f64,
    max_intervals: usize,
) -> Result<VecQuadrature>
where
    F: FnMut(Complex64) -> Result<Vec<Complex64>>,
{
    let mut heap = BinaryHeap::new();
    let mut evaluations = 0;
    let mut total: Vec<Complex64> = Vec::new();
    let mut total_err = 0.0;
    let pieces = initial_pieces.max(1);
    for (s, seg) in segments.iter().enumerate() {
        let (a, b) = seg.range();
        for p in 0..pieces {
            let t0 = a + (b - a) * p as f64 / pieces as f64;
            let t1 = a + (b - a) * (p + 1) as f64 / pieces as f64;
            let (values, error) = gk21(&mut f, seg, t0, t1)?;
            evaluations += 21;
            if total.is_empty() {
                total = vec![ZERO; values.len()];
            }
            for (acc, v) in total.iter_mut().zip(&values) {
                *acc += v;
            }
            total_err += error;
            heap.push(Piece {
                segment: s,
                t0,
                t1,
                values,
                error,
            });
        }
    }
    let magnitude = |t: &[Complex64]| t.iter().map(|v| v.norm()).sum::<f64>();
    let mut count = heap.len();
    loop {
        let mag = magnitude(&total);
        if total_err <= rel_tol * mag || total_err <= abs_tol {
            break;
        }
        if count >= max_intervals {
            let estimate = total.iter().copied().sum();
            return Err(Error::NonConvergence {
                estimate,
                error_bound: total_err,
            });
        }
        let worst = heap.pop().expect("non-empty heap");
        let seg = &segments[worst.segment];
        let mid = 0.5 * (worst.t0 + worst.t1);
        let (lv, le) = gk21(&mut f, seg, worst.t0, mid)?;
        let (rv, re) = gk21(&mut f, seg, mid, worst.t1)?;
        evaluations += 42;
        for i in 0..total.len() {
            total[i] += lv[i] + rv[i] - worst.values[i];
        }
        total_err += le + re - worst.error;
        heap.push(Piece {
            segment: worst.segment,
            t0: worst.t0,
            t1: mid,
            values: lv,
            error: le,
        });
        heap.push(Piece {
            segment: worst.segment,
            t0: mid,
            t1: worst.t1,
            values: rv,
            error: re,
        });
        count += 1;
        // Recompute the running sums periodically to shed cancellation drift.
        if count % 256 == 0 {
            total = vec![ZERO; total.len()];
            total_err = 0.0;
            for p in heap.iter() {
                for (acc, v) in total.iter_mut().zip(&p.values) {
                    *acc += v;
                }
                total_err += p.error;
            }
        }
    }
    // Final deterministic reduction in a fixed order.
    let mut pieces: Vec<Piece> = heap.into_vec();
    pieces.sort_by(|a, b| a.segment.cmp(&b.segment).then(a.t0.total_cmp(&b.t0)));
    let mut values = vec![ZERO; total.len()];
    let mut error = 0.0;
    for p in &pieces {
        for (acc, v) in values.iter_mut().zip(&p.values) {
            *acc += v;
        }
        error += p.error;
    }
    Ok(VecQuadrature {
        values,
        error,
        evaluations,
    })
}

/// Integration path for the `h` integral.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Contour {
    /// End of the deformed (or initial real) stretch; beyond it the path is real.
    pub h_c: f64,
    /// Depth of the semi-ellipse; zero when the path stays on the real axis.
    pub depth: f64,
    /// Length of each tail panel.
    pub tail_panel: f64,
}

impl Contour {
    /// Path for a background wavenumber `k1`, the largest real wavenumber of
    /// the structure `k_max`, and a tail decay length `decay`.
    pub fn new(k1: Complex64, k_max: f64, decay: f64, policy: &QuadraturePolicy) -> Self {
        let h_c = 1.2 * k_max.max(k1.re.abs()).max(k1.norm());
        let depth = if k1.im > 0.0 {
            0.0
        } else {
            policy.branch_window * k1.norm()
        };
        let tail_panel = h_c.max(decay);
        Contour {
            h_c,
            depth,
            tail_panel,
        }
    }

    fn head(&self) -> PathSegment {
        if self.depth > 0.0 {
            PathSegment::Ellipse {
                h_c: self.h_c,
                depth: self.depth,
            }
        } else {
            PathSegment::Line {
                from: ZERO,
                to: Complex64::new(self.h_c, 0.0),
            }
        }
    }
}

/// Vector integral `Int_P f(h) dh` along the contour, head then tail panels.
pub fn integrate_contour<F>(mut f: F, contour: &Contour, policy: &QuadraturePolicy) -> Result<VecQuadrature>
where
    F: FnMut(Complex64) -> Result<Vec<Complex64>>,
{
    policy.validate()?;
    let head = integrate_path(&mut f, &[contour.head()], 4, policy.rel_tol, 0.0, policy.max_intervals)?;
    let mut values = head.values;
    let mut error = head.error;
    let mut evaluations = head.evaluations;
    let mut start = contour.h_c;
    let mut quiet = 0;
    for _ in 0..policy.max_tail_panels {
        let seg = PathSegment::Line {
            from: Complex64::new(start, 0.0),
            to: Complex64::new(start + contour.tail_panel, 0.0),
        };
        let mag: f64 = values.iter().map(|v| v.norm()).sum();
        // Panels only need accuracy relative to the accumulated integral.
        let abs_tol = 0.5 * policy.rel_tol * mag;
        let panel = integrate_path(&mut f, &[seg], 1, policy.rel_tol, abs_tol, policy.max_intervals)?;
        let pmag = panel.magnitude();
        for (acc, v) in values.iter_mut().zip(&panel.values) {
            *acc += v;
        }
        error += panel.error;
        evaluations += panel.evaluations;
        start += contour.tail_panel;
        if pmag <= policy.tail_cutoff * mag.max(f64::MIN_POSITIVE) {
            quiet += 1;
            if quiet >= 2 {
                return Ok(VecQuadrature {
                    values,
                    error,
                    evaluations,
                });
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::NonConvergence {
        estimate: values.iter().copied().sum(),
        error_bound: error.max(values.iter().map(|v| v.norm()).sum::<f64>()),
    })
}

/// Half-line integral `Int_P term(h) dh` of a scalar integrand along a
/// contour built for background wavenumber `k1` (real frequency assumed).
pub fn integrate_h<F>(mut term: F, k1: f64, policy: &QuadraturePolicy) -> Result<Quadrature>
where
    F: FnMut(Complex64) -> Complex64,
{
    if !(k1 > 0.0 && k1.is_finite()) {
        return Err(Error::param("k1", "must be positive"));
    }
    let contour = Contour::new(Complex64::new(k1, 0.0), k1, 1.0 / k1, policy);
    let q = integrate_contour(|h| Ok(vec![term(h)]), &contour, policy)?;
    Ok(Quadrature {
        value: q.values[0],
        error: q.error,
        evaluations: q.evaluations,
    })
}

/// Full-line integral `Int_R term(h) dh = Int_P [term(h) + term(-h)] dh`.
pub fn integrate_h_symmetric<F>(mut term: F, k1: f64, policy: &QuadraturePolicy) -> Result<Quadrature>
where
    F: FnMut(Complex64) -> Complex64,
{
    integrate_h(|h| term(h) + term(-h), k1, policy)
}

// ---------------------------------------------------------------------------
// Mode sum
// ---------------------------------------------------------------------------

/// Outcome of the weighted azimuthal sum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModeSum {
    pub value: Complex64,
    /// Highest order added.
    pub last_order: usize,
    /// Whether the stop rule fired before the cap.
    pub converged: bool,
}

/// `Sum_n (2 - delta_n0) term(n)`, ascending, stopping after `policy.n_stop`
/// successive orders below `policy.n_stop_tol` relative to the running sum.
pub fn sum_modes<F>(mut term: F, policy: &QuadraturePolicy) -> ModeSum
where
    F: FnMut(usize) -> Complex64,
{
    let mut acc = ZERO;
    let mut quiet = 0;
    for n in 0..=policy.n_max {
        let w = if n == 0 { 1.0 } else { 2.0 };
        let t = term(n) * w;
        acc += t;
        if t.norm() <= policy.n_stop_tol * acc.norm() {
            quiet += 1;
            if quiet >= policy.n_stop {
                return ModeSum {
                    value: acc,
                    last_order: n,
                    converged: true,
                };
            }
        } else {
            quiet = 0;
        }
    }
    log::warn!(
        "mode sum reached the order cap n_max = {} before {} successive negligible terms",
        policy.n_max,
        policy.n_stop
    );
    ModeSum {
        value: acc,
        last_order: policy.n_max,
        converged: false,
    }
}

// ---------------------------------------------------------------------------
// Principal value
// ---------------------------------------------------------------------------

/// `P Int_a^b f(u) / (u - pole) du` by singularity subtraction:
/// `Int_a^b [f(u) - f(pole)] / (u - pole) du + f(pole) ln|(b - pole)/(pole - a)|`.
/// The subtracted integrand is integrated adaptively on either side of the
/// pole, so the removable point is only approached, never sampled.
pub fn pv_integral<F>(mut f: F, pole: f64, window: (f64, f64), rel_tol: f64) -> Result<Quadrature>
where
    F: FnMut(f64) -> f64,
{
    let (a, b) = window;
    if !(a < pole && pole < b) {
        return Err(Error::PoleOutsideWindow {
            pole,
            lower: a,
            upper: b,
        });
    }
    let f0 = f(pole);
    let mut g = |h: Complex64| -> Result<Vec<Complex64>> {
        let u = h.re;
        Ok(vec![Complex64::new((f(u) - f0) / (u - pole), 0.0)])
    };
    let segments = [
        PathSegment::Line {
            from: Complex64::new(a, 0.0),
            to: Complex64::new(pole, 0.0),
        },
        PathSegment::Line {
            from: Complex64::new(pole, 0.0),
            to: Complex64::new(b, 0.0),
        },
    ];
    let q = integrate_path(&mut g, &segments, 4, rel_tol, 1e-300, 20_000)?;
    let log_term = f0 * ((b - pole) / (pole - a)).abs().ln();
    Ok(Quadrature {
        value: q.values[0] + log_term,
        error: q.error,
        evaluations: q.evaluations + 1,
    })
}
