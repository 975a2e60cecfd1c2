//! Material model of the optical black hole: a Lorentz-dispersive shell with a
//! `1/r^2` graded index around an absorbing core, and its discretisation into
//! concentric homogeneous layers.
//!
//! ```text
//!            { 1                          r > a_s
//!   eps(r) = { (a_s / r)^2 eps_L(omega)   a_c < r <= a_s
//!            { eps_c + i gamma_c          r <= a_c
//!
//!   eps_L(omega) = 1 + omega_p^2 / (omega_0^2 - omega^2 - i gamma omega)
//! ```
//!
//! The stepwise stack numbers regions from the outside in: region 1 is the
//! exterior vacuum, regions `2 ..= N-1` are shell layers and region `N` is the
//! core. Interface `m` has radius `a_m = a_s - (m-1) Delta` and separates
//! region `m` from region `m+1`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Single-resonance Lorentz dispersion.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LorentzModel {
    pub omega_p: f64,
    pub omega_0: f64,
    pub gamma: f64,
}

impl LorentzModel {
    pub fn new(omega_p: f64, omega_0: f64, gamma: f64) -> Result<Self> {
        let model = LorentzModel {
            omega_p,
            omega_0,
            gamma,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega_p.is_finite() && self.omega_p >= 0.0) {
            return Err(Error::param("omega_p", "must be finite and non-negative"));
        }
        if !(self.omega_0.is_finite() && self.omega_0 > 0.0) {
            return Err(Error::param("omega_0", "must be finite and positive"));
        }
        if !(self.gamma.is_finite() && self.gamma >= 0.0) {
            return Err(Error::param("gamma", "must be finite and non-negative"));
        }
        Ok(())
    }

    /// `eps_L` continued analytically to complex frequency.
    pub fn permittivity(&self, omega: Complex64) -> Complex64 {
        let denom = Complex64::new(self.omega_0 * self.omega_0, 0.0)
            - omega * omega
            - Complex64::new(0.0, self.gamma) * omega;
        1.0 + self.omega_p * self.omega_p / denom
    }
}

/// `eps_L(omega)` for a positive real frequency.
pub fn lorentz_permittivity(omega: f64, model: &LorentzModel) -> Result<Complex64> {
    if !(omega.is_finite() && omega > 0.0) {
        return Err(Error::param("omega", format!("must be positive, got {omega}")));
    }
    Ok(model.permittivity(Complex64::new(omega, 0.0)))
}

/// Radii and core material of the optical black hole.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObhGeometry {
    pub a_s: f64,
    pub a_c: f64,
    pub eps_core: Complex64,
}

impl ObhGeometry {
    pub fn new(a_s: f64, a_c: f64, eps_core: Complex64) -> Result<Self> {
        let g = ObhGeometry { a_s, a_c, eps_core };
        g.validate()?;
        Ok(g)
    }

    /// Core radius chosen so that the static shell index matches the core,
    /// `a_c = a_s / sqrt(Re eps_c)`.
    pub fn canonical(a_s: f64, eps_core: Complex64) -> Result<Self> {
        if !(eps_core.re > 1.0) {
            return Err(Error::InvalidGeometry(format!(
                "canonical core radius needs Re eps_core > 1, got {}",
                eps_core.re
            )));
        }
        Self::new(a_s, a_s / eps_core.re.sqrt(), eps_core)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a_c.is_finite() && self.a_s.is_finite() && 0.0 < self.a_c && self.a_c < self.a_s) {
            return Err(Error::InvalidGeometry(format!(
                "need 0 < a_c < a_s, got a_c = {}, a_s = {}",
                self.a_c, self.a_s
            )));
        }
        if !(self.eps_core.re.is_finite() && self.eps_core.im.is_finite()) {
            return Err(Error::InvalidGeometry("core permittivity is not finite".into()));
        }
        Ok(())
    }

    /// Relative mismatch between `a_c` and the canonical `a_s / sqrt(Re eps_c)`.
    pub fn canonical_mismatch(&self) -> f64 {
        let canonical = self.a_s / self.eps_core.re.max(f64::MIN_POSITIVE).sqrt();
        (self.a_c - canonical).abs() / canonical
    }
}

/// Continuous permittivity profile at radius `r`. Radii exactly on `a_s` or
/// `a_c` belong to the inner region.
pub fn profile_permittivity(
    r: f64,
    omega: f64,
    geometry: &ObhGeometry,
    model: &LorentzModel,
) -> Result<Complex64> {
    if !(r.is_finite() && r >= 0.0) {
        return Err(Error::param("r", format!("must be non-negative, got {r}")));
    }
    if r > geometry.a_s {
        return Ok(Complex64::new(1.0, 0.0));
    }
    if r > geometry.a_c {
        let eps_l = lorentz_permittivity(omega, model)?;
        return Ok(eps_l * (geometry.a_s / r).powi(2));
    }
    Ok(geometry.eps_core)
}

/// Where inside each shell layer the graded profile is sampled.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LayerSampling {
    /// `eps_m = (a_1 / a_m)^2 eps_L` with `a_m` the inner interface of layer `m`.
    #[default]
    InnerInterface,
    /// Profile evaluated at the mid-radius of the layer.
    Midpoint,
}

/// Material of one homogeneous region.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LayerMaterial {
    Vacuum,
    /// Graded-shell sample: `factor * eps_L(omega)`.
    Shell { factor: f64, model: LorentzModel },
    /// Frequency-independent permittivity.
    Constant(Complex64),
}

impl LayerMaterial {
    pub fn permittivity(&self, omega: Complex64) -> Complex64 {
        match self {
            LayerMaterial::Vacuum => Complex64::new(1.0, 0.0),
            LayerMaterial::Shell { factor, model } => model.permittivity(omega) * *factor,
            LayerMaterial::Constant(eps) => *eps,
        }
    }
}

/// Concentric homogeneous regions, outermost first.
#[derive(Clone, Debug, PartialEq)]
pub struct LayerStack {
    radii: Vec<f64>,
    materials: Vec<LayerMaterial>,
}

impl LayerStack {
    /// General stack: `radii` strictly descending, one more material than
    /// radii, region 1 vacuum.
    pub fn new(radii: Vec<f64>, materials: Vec<LayerMaterial>) -> Result<Self> {
        if radii.is_empty() {
            return Err(Error::InvalidGeometry("a stack needs at least one interface".into()));
        }
        if materials.len() != radii.len() + 1 {
            return Err(Error::InvalidGeometry(format!(
                "{} interfaces need {} materials, got {}",
                radii.len(),
                radii.len() + 1,
                materials.len()
            )));
        }
        if materials[0] != LayerMaterial::Vacuum {
            return Err(Error::InvalidGeometry("the exterior region must be vacuum".into()));
        }
        if radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(Error::InvalidGeometry("interface radii must be positive".into()));
        }
        if radii.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::InvalidGeometry("interface radii must strictly decrease".into()));
        }
        Ok(LayerStack { radii, materials })
    }

    /// Every region vacuum; the scattering part of the Green function vanishes.
    pub fn vacuum(radii: Vec<f64>) -> Result<Self> {
        let materials = vec![LayerMaterial::Vacuum; radii.len() + 1];
        Self::new(radii, materials)
    }

    /// Interface radii `a_1 > ... > a_{N-1}`.
    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn materials(&self) -> &[LayerMaterial] {
        &self.materials
    }

    /// Number of regions `N`.
    pub fn regions(&self) -> usize {
        self.materials.len()
    }

    /// Outer radius `a_1`.
    pub fn outer_radius(&self) -> f64 {
        self.radii[0]
    }

    /// `eps_1 ..= eps_N` at the given (possibly complex) frequency.
    pub fn permittivities(&self, omega: Complex64) -> Vec<Complex64> {
        self.materials.iter().map(|m| m.permittivity(omega)).collect()
    }

    /// Permittivity of region `m` (1-based).
    pub fn permittivity(&self, m: usize, omega: Complex64) -> Complex64 {
        self.materials[m - 1].permittivity(omega)
    }
}

/// Equal-thickness stepwise approximation of the graded shell.
pub fn discretize_shell(
    geometry: &ObhGeometry,
    model: &LorentzModel,
    shell_layers: usize,
    sampling: LayerSampling,
) -> Result<LayerStack> {
    geometry.validate()?;
    model.validate()?;
    if shell_layers == 0 {
        return Err(Error::param("shell_layers", "must be at least 1"));
    }
    let delta = (geometry.a_s - geometry.a_c) / shell_layers as f64;
    let mut radii: Vec<f64> = (0..shell_layers)
        .map(|i| geometry.a_s - i as f64 * delta)
        .collect();
    radii.push(geometry.a_c);

    let mut materials = Vec::with_capacity(shell_layers + 2);
    materials.push(LayerMaterial::Vacuum);
    for m in 2..=shell_layers + 1 {
        // Region m lies between interfaces m-1 (outer) and m (inner).
        let inner = radii[m - 1];
        let sample = match sampling {
            LayerSampling::InnerInterface => inner,
            LayerSampling::Midpoint => inner + 0.5 * delta,
        };
        materials.push(LayerMaterial::Shell {
            factor: (geometry.a_s / sample).powi(2),
            model: *model,
        });
    }
    materials.push(LayerMaterial::Constant(geometry.eps_core));
    LayerStack::new(radii, materials)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn reference_model() -> LorentzModel {
        LorentzModel::new(0.1, 1.0, 0.01).unwrap()
    }

    fn reference_geometry() -> ObhGeometry {
        ObhGeometry::new(8.0 * PI, 4.0 * PI, Complex64::new(4.0, 0.33)).unwrap()
    }

    #[test]
    fn static_and_resonant_limits() {
        let m = reference_model();
        let e = lorentz_permittivity(1e-9, &m).unwrap();
        assert_relative_eq!(e.re, 1.01, max_relative = 1e-12);
        assert!(e.im.abs() < 1e-10);
        let e = lorentz_permittivity(1.0, &m).unwrap();
        assert_relative_eq!(e.re, 1.0, epsilon = 1e-14);
        assert_relative_eq!(e.im, 1.0, epsilon = 1e-14);
        assert!(lorentz_permittivity(0.0, &m).is_err());
    }

    #[test]
    fn passivity_over_frequency_sweep() {
        let m = reference_model();
        for k in 1..2000 {
            let w = k as f64 * 2.5e-3;
            assert!(lorentz_permittivity(w, &m).unwrap().im > 0.0);
        }
    }

    #[test]
    fn profile_regions_and_boundaries() {
        let (g, m) = (reference_geometry(), reference_model());
        assert_eq!(profile_permittivity(2.0 * g.a_s, 0.1, &g, &m).unwrap(), Complex64::new(1.0, 0.0));
        let eps_l = lorentz_permittivity(0.1, &m).unwrap();
        // r = a_s belongs to the shell, r = a_c to the core.
        assert_eq!(profile_permittivity(g.a_s, 0.1, &g, &m).unwrap(), eps_l);
        assert_eq!(profile_permittivity(g.a_c, 0.1, &g, &m).unwrap(), g.eps_core);
        let just_outside = profile_permittivity(g.a_c * (1.0 + 1e-12), 0.1, &g, &m).unwrap();
        assert_relative_eq!(just_outside.re, 4.0 * eps_l.re, max_relative = 1e-9);
        assert!(g.canonical_mismatch() < 1e-15);
    }

    #[test]
    fn reference_stack_layout() {
        let s = discretize_shell(&reference_geometry(), &reference_model(), 10, LayerSampling::InnerInterface).unwrap();
        assert_eq!(s.regions(), 12);
        assert_eq!(s.radii().len(), 11);
        assert_relative_eq!(s.radii()[0] - s.radii()[1], 0.4 * PI, max_relative = 1e-12);
        assert_relative_eq!(*s.radii().last().unwrap(), 4.0 * PI, max_relative = 1e-15);
        let w = Complex64::new(0.1, 0.0);
        let eps = s.permittivities(w);
        assert_eq!(eps[0], Complex64::new(1.0, 0.0));
        assert_eq!(eps[11], Complex64::new(4.0, 0.33));
        let eps_l = reference_model().permittivity(w);
        for m in 2..=11 {
            let a_m = s.radii()[m - 1];
            let expected = eps_l * (s.radii()[0] / a_m).powi(2);
            assert_relative_eq!((eps[m - 1] - expected).norm(), 0.0, epsilon = 1e-14);
        }
        // Monotone index increase inwards below resonance.
        for m in 1..11 {
            assert!(eps[m].re > eps[m - 1].re);
        }
    }

    #[test]
    fn single_layer_and_invalid_geometry() {
        let s = discretize_shell(&reference_geometry(), &reference_model(), 1, LayerSampling::InnerInterface).unwrap();
        assert_eq!(s.radii(), &[8.0 * PI, 4.0 * PI]);
        assert!(ObhGeometry::new(1.0, 2.0, Complex64::new(4.0, 0.0)).is_err());
        assert!(discretize_shell(&reference_geometry(), &reference_model(), 0, LayerSampling::Midpoint).is_err());
    }

    #[test]
    fn refinement_halves_midpoint_deviation() {
        let (g, m) = (reference_geometry(), reference_model());
        let deviation = |layers: usize| {
            let s = discretize_shell(&g, &m, layers, LayerSampling::InnerInterface).unwrap();
            let w = Complex64::new(0.1, 0.0);
            let mut worst = 0.0_f64;
            for k in 2..=layers + 1 {
                let mid = 0.5 * (s.radii()[k - 2] + s.radii()[k - 1]);
                let exact = profile_permittivity(mid, 0.1, &g, &m).unwrap();
                worst = worst.max((s.permittivity(k, w) - exact).norm() / exact.norm());
            }
            worst
        };
        for layers in [10, 20, 40] {
            let ratio = deviation(2 * layers) / deviation(layers);
            assert!((ratio - 0.5).abs() < 0.05, "{layers}: {ratio}");
        }
    }
}
