//! Run configuration: a TOML document with one table per concern.
//!
//! Every key is optional; missing keys take the defaults below, which
//! describe the layered optical black hole of radius `8 pi` with a `4 pi`
//! absorbing core, a 10-layer shell with Lorentz dispersion
//! (`omega_p = 0.1`, `gamma = 0.01`) and two atoms at `r = 8.1 pi`.
//!
//! ```toml
//! scenario = "obh"            # or "vacuum"
//!
//! [geometry]
//! a_s = 25.132741228718345    # shell radius (c / omega_0)
//! a_c = 12.566370614359172    # core radius
//! eps_core = [4.0, 0.33]      # core permittivity (re, im)
//! shell_layers = 10
//! sampling = "inner_interface" # or "midpoint"
//!
//! [lorentz]
//! omega_p = 0.1
//! omega_0 = 1.0
//! gamma = 0.01
//!
//! [atom]
//! omega_a = 1.0               # transition frequency (omega_0)
//! r = 25.44690049407732       # radial position of each atom
//!
//! [numerics]
//! rel_tol = 1e-8
//! n_max = 400
//! branch_window = 0.25
//! dispersion_window = [0.01, 5.0]
//! pv_cross_check = false
//!
//! [time]
//! t_max = 50.0                # in 1 / Gamma_0
//! samples = 1001
//!
//! [output]
//! # path = "trace.csv"        # stdout when absent
//!
//! [probe]                     # point pair for the `greens` command
//! # field = [r, phi, z]       # defaults: the two atom positions
//! # source = [r, phi, z]
//! # omega = 1.0               # default: omega_a
//! ```

use num_complex::Complex64;
use obh_core::atom_dynamics::AtomPair;
use obh_core::layered_green::FieldPoint;
use obh_core::medium::{discretize_shell, LayerSampling, LayerStack, LorentzModel, ObhGeometry};
use obh_core::sommerfeld::QuadraturePolicy;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::path::PathBuf;

/// Invalid or unreadable configuration; the message names the field.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn invalid(field: &str, reason: impl std::fmt::Display) -> ConfigError {
    ConfigError(format!("{field}: {reason}"))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    /// Atoms outside the layered optical black hole.
    #[default]
    Obh,
    /// The same atoms in free space.
    Vacuum,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeometryConfig {
    pub a_s: f64,
    pub a_c: f64,
    pub eps_core: [f64; 2],
    pub shell_layers: usize,
    pub sampling: LayerSampling,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        GeometryConfig {
            a_s: 8.0 * PI,
            a_c: 4.0 * PI,
            eps_core: [4.0, 0.33],
            shell_layers: 10,
            sampling: LayerSampling::InnerInterface,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LorentzConfig {
    pub omega_p: f64,
    pub omega_0: f64,
    pub gamma: f64,
}

impl Default for LorentzConfig {
    fn default() -> Self {
        LorentzConfig {
            omega_p: 0.1,
            omega_0: 1.0,
            gamma: 0.01,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AtomConfig {
    pub omega_a: f64,
    pub r: f64,
}

impl Default for AtomConfig {
    fn default() -> Self {
        AtomConfig {
            omega_a: 1.0,
            r: 8.1 * PI,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NumericsConfig {
    pub rel_tol: f64,
    pub n_max: usize,
    pub branch_window: f64,
    pub tail_cutoff: f64,
    pub n_stop: usize,
    pub n_stop_tol: f64,
    pub max_intervals: usize,
    pub max_tail_panels: usize,
    /// Frequency window of the principal-value shift cross-check.
    pub dispersion_window: [f64; 2],
    pub pv_cross_check: bool,
}

impl Default for NumericsConfig {
    fn default() -> Self {
        let policy = QuadraturePolicy::default();
        NumericsConfig {
            rel_tol: policy.rel_tol,
            // Atoms a tenth of a wavelength off the shell need many orders:
            // the near-field terms fall off only like (a_s / r)^(2n).
            n_max: obh_core::specfun::MAX_ORDER,
            branch_window: policy.branch_window,
            tail_cutoff: policy.tail_cutoff,
            n_stop: policy.n_stop,
            n_stop_tol: policy.n_stop_tol,
            max_intervals: policy.max_intervals,
            max_tail_panels: policy.max_tail_panels,
            dispersion_window: [0.01, 5.0],
            pv_cross_check: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TimeConfig {
    pub t_max: f64,
    pub samples: usize,
}

impl Default for TimeConfig {
    fn default() -> Self {
        TimeConfig {
            t_max: 50.0,
            samples: 1001,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProbeConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field: Option<[f64; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source: Option<[f64; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub geometry: GeometryConfig,
    pub lorentz: LorentzConfig,
    pub atom: AtomConfig,
    pub numerics: NumericsConfig,
    pub time: TimeConfig,
    pub output: OutputConfig,
    pub probe: ProbeConfig,
}

impl RunConfig {
    /// Parses and validates a TOML document.
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| ConfigError(format!("parse error: {}", e.message())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self, ConfigError> {
        let text =
            std::fs::read_to_string(path).map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
        RunConfig::from_toml(&text)
    }

    /// Canonical serialisation: every key present, shortest round-trip floats.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration is always serialisable")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let positive = |field: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(invalid(field, format!("must be positive and finite, got {v}")))
            }
        };
        let g = &self.geometry;
        positive("geometry.a_s", g.a_s)?;
        positive("geometry.a_c", g.a_c)?;
        if g.a_c >= g.a_s {
            return Err(invalid("geometry.a_c", "must be smaller than geometry.a_s"));
        }
        if !(g.eps_core[0].is_finite() && g.eps_core[1].is_finite()) || g.eps_core[1] < 0.0 {
            return Err(invalid("geometry.eps_core", "must be finite with a non-negative imaginary part"));
        }
        if g.shell_layers == 0 {
            return Err(invalid("geometry.shell_layers", "at least one layer is needed"));
        }
        positive("lorentz.omega_p", self.lorentz.omega_p)?;
        positive("lorentz.omega_0", self.lorentz.omega_0)?;
        positive("lorentz.gamma", self.lorentz.gamma)?;
        positive("atom.omega_a", self.atom.omega_a)?;
        positive("atom.r", self.atom.r)?;
        if self.atom.r <= g.a_s {
            return Err(invalid("atom.r", "atoms must lie outside the shell (atom.r > geometry.a_s)"));
        }
        let n = &self.numerics;
        positive("numerics.rel_tol", n.rel_tol)?;
        positive("numerics.branch_window", n.branch_window)?;
        positive("numerics.tail_cutoff", n.tail_cutoff)?;
        positive("numerics.n_stop_tol", n.n_stop_tol)?;
        if n.n_max == 0 || n.n_max > obh_core::specfun::MAX_ORDER {
            return Err(invalid(
                "numerics.n_max",
                format!("must lie in 1..={}", obh_core::specfun::MAX_ORDER),
            ));
        }
        let [lo, hi] = n.dispersion_window;
        if !(lo > 0.0 && lo < self.atom.omega_a && self.atom.omega_a < hi && hi.is_finite()) {
            return Err(invalid(
                "numerics.dispersion_window",
                "must be an increasing positive pair enclosing atom.omega_a",
            ));
        }
        self.policy().validate().map_err(|e| invalid("numerics", e))?;
        positive("time.t_max", self.time.t_max)?;
        if self.time.samples < 2 {
            return Err(invalid("time.samples", "at least two samples are needed"));
        }
        if let Some(w) = self.probe.omega {
            positive("probe.omega", w)?;
        }
        for (field, p) in [("probe.field", self.probe.field), ("probe.source", self.probe.source)] {
            if let Some([r, phi, z]) = p {
                if !(r > g.a_s && r.is_finite() && phi.is_finite() && z.is_finite()) {
                    return Err(invalid(field, "needs a finite point with r > geometry.a_s"));
                }
            }
        }
        self.geometry().map_err(|e| invalid("geometry", e))?;
        self.lorentz_model().map_err(|e| invalid("lorentz", e))?;
        Ok(())
    }

    pub fn policy(&self) -> QuadraturePolicy {
        let n = &self.numerics;
        QuadraturePolicy {
            rel_tol: n.rel_tol,
            branch_window: n.branch_window,
            tail_cutoff: n.tail_cutoff,
            n_max: n.n_max,
            n_stop: n.n_stop,
            n_stop_tol: n.n_stop_tol,
            max_intervals: n.max_intervals,
            max_tail_panels: n.max_tail_panels,
        }
    }

    pub fn geometry(&self) -> obh_core::Result<ObhGeometry> {
        let g = &self.geometry;
        ObhGeometry::new(g.a_s, g.a_c, Complex64::new(g.eps_core[0], g.eps_core[1]))
    }

    pub fn lorentz_model(&self) -> obh_core::Result<LorentzModel> {
        let l = &self.lorentz;
        LorentzModel::new(l.omega_p, l.omega_0, l.gamma)
    }

    /// The discretised shell with `layers` layers.
    pub fn stack_with_layers(&self, layers: usize) -> obh_core::Result<LayerStack> {
        discretize_shell(&self.geometry()?, &self.lorentz_model()?, layers, self.geometry.sampling)
    }

    pub fn stack(&self) -> obh_core::Result<LayerStack> {
        self.stack_with_layers(self.geometry.shell_layers)
    }

    pub fn atoms(&self) -> obh_core::Result<AtomPair> {
        AtomPair::new(self.atom.omega_a, self.atom.r)
    }

    /// Field and source points of the `greens` command.
    pub fn probe_points(&self) -> (FieldPoint, FieldPoint) {
        let at = |p: Option<[f64; 3]>, phi: f64| match p {
            Some([r, phi, z]) => FieldPoint::new(r, phi, z),
            None => FieldPoint::new(self.atom.r, phi, 0.0),
        };
        (at(self.probe.field, 0.0), at(self.probe.source, PI))
    }

    pub fn probe_omega(&self) -> f64 {
        self.probe.omega.unwrap_or(self.atom.omega_a)
    }
}
