//! The four report generators. Each returns the complete output text so the
//! caller decides where it goes; all numbers use 17 significant digits and
//! the output depends only on the configuration.

use num_complex::Complex64;
use obh_core::atom_dynamics::{
    dipole_shift_pv, vacuum_rates_mode_sum, CollectiveResponse, RateSet, ShiftSet,
};
use obh_core::entanglement::{uniform_times, NegativityTrace};
use obh_core::layered_green::{freespace_green_zz, scattering_green_zz};
use obh_core::sommerfeld::QuadraturePolicy;
use std::fmt::Write;

use crate::config::{ConfigError, RunConfig, Scenario};

/// Failure of a command, split by the exit status it maps to.
#[derive(Debug)]
pub enum CommandError {
    Config(String),
    Numerical(obh_core::Error),
}

impl CommandError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CommandError::Config(_) => 2,
            CommandError::Numerical(_) => 3,
        }
    }
}

impl std::fmt::Display for CommandError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CommandError::Config(m) => write!(f, "configuration error: {m}"),
            CommandError::Numerical(e) => write!(f, "numerical failure: {e}"),
        }
    }
}

impl std::error::Error for CommandError {}

impl From<obh_core::Error> for CommandError {
    fn from(e: obh_core::Error) -> Self {
        if e.is_numerical() {
            CommandError::Numerical(e)
        } else {
            CommandError::Config(e.to_string())
        }
    }
}

impl From<ConfigError> for CommandError {
    fn from(e: ConfigError) -> Self {
        CommandError::Config(e.0)
    }
}

pub type CommandResult = Result<String, CommandError>;

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

/// Rates, shifts and their diagnostics for one parameter point.
#[derive(Clone, Debug)]
pub struct Evaluation {
    pub rates: RateSet,
    pub shifts: ShiftSet,
    pub last_order: usize,
    pub rate_truncation: f64,
    pub shift_truncation: f64,
    pub lamb_truncation: f64,
}

impl Evaluation {
    fn converged(&self) -> bool {
        self.rates.converged
    }
}

/// Evaluates the configured scenario with an explicit policy and layer count.
pub fn evaluate(cfg: &RunConfig, policy: &QuadraturePolicy, layers: usize) -> Result<Evaluation, CommandError> {
    let atoms = cfg.atoms()?;
    match cfg.scenario {
        Scenario::Vacuum => {
            let x = atoms.size_parameter();
            Ok(Evaluation {
                rates: RateSet::vacuum(x),
                shifts: ShiftSet::vacuum(x),
                last_order: 0,
                rate_truncation: 0.0,
                shift_truncation: 0.0,
                lamb_truncation: 0.0,
            })
        }
        Scenario::Obh => {
            let stack = cfg.stack_with_layers(layers)?;
            let r = CollectiveResponse::compute(&atoms, &stack, policy)?;
            Ok(Evaluation {
                rates: r.rates,
                shifts: r.shifts,
                last_order: r.last_order,
                rate_truncation: r.rate_truncation,
                shift_truncation: r.shift_truncation,
                lamb_truncation: r.lamb_truncation,
            })
        }
    }
}

fn evaluate_default(cfg: &RunConfig) -> Result<Evaluation, CommandError> {
    evaluate(cfg, &cfg.policy(), cfg.geometry.shell_layers)
}

fn scenario_name(s: Scenario) -> &'static str {
    match s {
        Scenario::Obh => "obh",
        Scenario::Vacuum => "vacuum",
    }
}

fn header(out: &mut String, cfg: &RunConfig) {
    let atoms = cfg.atoms().expect("validated configuration");
    writeln!(out, "# scenario = {}", scenario_name(cfg.scenario)).unwrap();
    writeln!(out, "# omega_a = {}", num(atoms.omega_a)).unwrap();
    writeln!(out, "# r = {}", num(atoms.r)).unwrap();
    writeln!(out, "# k_2r = {}", num(atoms.size_parameter())).unwrap();
}

/// Table of `Gamma`, `Gamma_AB`, `Gamma_pm`, `delta_AB`, `delta_pm` in units of `Gamma_0`.
pub fn rates(cfg: &RunConfig) -> CommandResult {
    let ev = evaluate_default(cfg)?;
    let mut out = String::new();
    header(&mut out, cfg);
    writeln!(out, "# last_order = {}", ev.last_order).unwrap();
    writeln!(out, "# mode_sum_converged = {}", ev.converged()).unwrap();
    out.push_str("quantity,value,quadrature_error,truncation_estimate\n");
    let (r, s) = (&ev.rates, &ev.shifts);
    let rows = [
        ("gamma", r.gamma, r.error, ev.rate_truncation),
        ("gamma_ab", r.gamma_ab, r.error, ev.rate_truncation),
        ("gamma_plus", r.gamma_plus, r.error, ev.rate_truncation),
        ("gamma_minus", r.gamma_minus, r.error, ev.rate_truncation),
        ("delta_ab", s.delta_ab, s.error, ev.shift_truncation),
        ("delta_plus", s.delta_plus, s.error, ev.shift_truncation + ev.lamb_truncation),
        ("delta_minus", s.delta_minus, s.error, ev.shift_truncation + ev.lamb_truncation),
        ("lamb", s.lamb, s.error, ev.lamb_truncation),
    ];
    for (name, v, e, t) in rows {
        writeln!(out, "{name},{},{},{}", num(v), num(e), num(t)).unwrap();
    }
    if cfg.numerics.pv_cross_check && cfg.scenario == Scenario::Obh {
        let [lo, hi] = cfg.numerics.dispersion_window;
        let check = dipole_shift_pv(&cfg.atoms()?, &cfg.stack()?, &cfg.policy(), (lo, hi), 1e-4)?;
        writeln!(out, "delta_ab_scattering_kk,{},{},{}", num(check.kramers_kronig), num(s.error), num(0.0)).unwrap();
        writeln!(out, "delta_ab_scattering_pv,{},{},{}", num(check.principal_value), num(check.error), num(0.0)).unwrap();
        writeln!(out, "pv_kk_discrepancy,{},{},{}", num(check.discrepancy), num(0.0), num(0.0)).unwrap();
    }
    Ok(out)
}

/// CSV trace `t_gamma0,rho_pp,rho_mm,rho_LL,neg_eigen,neg_closed`.
pub fn negativity(cfg: &RunConfig, doubled: bool) -> CommandResult {
    let ev = evaluate_default(cfg)?;
    let times = uniform_times(cfg.time.t_max, cfg.time.samples)?;
    let trace = NegativityTrace::compute(&ev.rates, &ev.shifts, &times)?;
    let scale = if doubled { 2.0 } else { 1.0 };
    let mut out = String::from("t_gamma0,rho_pp,rho_mm,rho_LL,neg_eigen,neg_closed\n");
    for s in &trace.samples {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            num(s.t),
            num(s.rho_pp),
            num(s.rho_mm),
            num(s.rho_ll),
            num(scale * s.neg_eigen),
            num(scale * s.neg_closed)
        )
        .unwrap();
    }
    Ok(out)
}

/// Point evaluation of the zz Green element: scattering, free-space and total.
pub fn greens(cfg: &RunConfig) -> CommandResult {
    let (field, source) = cfg.probe_points();
    let omega = cfg.probe_omega();
    let mut out = String::new();
    writeln!(out, "# scenario = {}", scenario_name(cfg.scenario)).unwrap();
    writeln!(out, "# field = ({}, {}, {})", num(field.r), num(field.phi), num(field.z)).unwrap();
    writeln!(out, "# source = ({}, {}, {})", num(source.r), num(source.phi), num(source.z)).unwrap();
    writeln!(out, "# omega = {}", num(omega)).unwrap();
    let scattering = match cfg.scenario {
        Scenario::Vacuum => None,
        Scenario::Obh => Some(scattering_green_zz(
            field,
            source,
            Complex64::new(omega, 0.0),
            &cfg.stack()?,
            &cfg.policy(),
        )?),
    };
    if let Some(s) = &scattering {
        writeln!(out, "# last_order = {}", s.last_order).unwrap();
        writeln!(out, "# mode_sum_converged = {}", s.converged).unwrap();
    }
    out.push_str("component,re,im,error_bound\n");
    let (gs, err) = scattering.map(|s| (s.value, s.error + s.truncation.norm())).unwrap_or_default();
    writeln!(out, "scattering,{},{},{}", num(gs.re), num(gs.im), num(err)).unwrap();
    // The free-space element needs a finite separation; it is only defined
    // for points sharing z with the separation perpendicular to the axis.
    let (x1, y1) = (field.r * field.phi.cos(), field.r * field.phi.sin());
    let (x2, y2) = (source.r * source.phi.cos(), source.r * source.phi.sin());
    let sep = ((x1 - x2).powi(2) + (y1 - y2).powi(2)).sqrt();
    if field.z == source.z && sep > 0.0 {
        let g0 = freespace_green_zz(sep, omega)?;
        let total = g0 + gs;
        writeln!(out, "free_space,{},{},{}", num(g0.re), num(g0.im), num(0.0)).unwrap();
        writeln!(out, "total,{},{},{}", num(total.re), num(total.im), num(err)).unwrap();
    }
    Ok(out)
}

/// Order caps swept by the convergence report.
pub const ORDER_SWEEP: [usize; 4] = [60, 120, 240, 400];
/// Quadrature tolerances swept by the convergence report.
pub const TOLERANCE_SWEEP: [f64; 2] = [1e-6, 1e-8];
/// Shell discretisations swept by the convergence report.
pub const LAYER_SWEEP: [usize; 4] = [5, 10, 20, 40];

/// Sensitivity of `Gamma_pm` to the order cap, the quadrature tolerance and
/// the number of shell layers, each varied from the configured point.
pub fn convergence(cfg: &RunConfig) -> CommandResult {
    let base = cfg.policy();
    let mut cache: Vec<((usize, u64, usize), Evaluation)> = Vec::new();
    let mut eval = |n_max: usize, rel_tol: f64, layers: usize| -> Result<Evaluation, CommandError> {
        let key = (n_max, rel_tol.to_bits(), layers);
        if let Some((_, e)) = cache.iter().find(|(k, _)| *k == key) {
            return Ok(e.clone());
        }
        let policy = QuadraturePolicy { n_max, rel_tol, ..base };
        let e = evaluate(cfg, &policy, layers)?;
        cache.push((key, e.clone()));
        Ok(e)
    };

    let mut out = String::new();
    header(&mut out, cfg);
    let atoms = cfg.atoms()?;
    let audit = vacuum_rates_mode_sum(&atoms, &QuadraturePolicy { n_max: 60, ..base })?;
    let deviation = (audit.gamma - 1.0).abs().max((audit.gamma_ab - RateSet::vacuum(atoms.size_parameter()).gamma_ab).abs());
    writeln!(
        out,
        "# prefactor_audit = {} (free-space mode expansion vs closed form, max deviation {})",
        if deviation < 1e-6 { "pass" } else { "fail" },
        num(deviation)
    )
    .unwrap();
    out.push_str("parameter,value,gamma_plus,gamma_minus,delta_ab,diff_plus,diff_minus,quadrature_error,truncation_estimate,converged\n");

    let layers = cfg.geometry.shell_layers;
    let sweeps: [(&str, Vec<(String, usize, f64, usize)>); 3] = [
        (
            "n_max",
            ORDER_SWEEP.iter().map(|&n| (n.to_string(), n, base.rel_tol, layers)).collect(),
        ),
        (
            "rel_tol",
            TOLERANCE_SWEEP.iter().map(|&t| (format!("{t:e}"), base.n_max, t, layers)).collect(),
        ),
        (
            "shell_layers",
            LAYER_SWEEP.iter().map(|&l| (l.to_string(), base.n_max, base.rel_tol, l)).collect(),
        ),
    ];
    for (name, points) in sweeps {
        let mut prev: Option<RateSet> = None;
        for (label, n_max, rel_tol, layers) in points {
            let e = eval(n_max, rel_tol, layers)?;
            let (dp, dm) = match prev {
                Some(p) => (e.rates.gamma_plus - p.gamma_plus, e.rates.gamma_minus - p.gamma_minus),
                None => (0.0, 0.0),
            };
            writeln!(
                out,
                "{name},{label},{},{},{},{},{},{},{},{}",
                num(e.rates.gamma_plus),
                num(e.rates.gamma_minus),
                num(e.shifts.delta_ab),
                num(dp),
                num(dm),
                num(e.rates.error),
                num(e.rate_truncation),
                e.converged()
            )
            .unwrap();
            prev = Some(e.rates);
        }
    }
    Ok(out)
}
