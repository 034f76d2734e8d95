//! Hard-core correspondence table, WKB estimates and the C60 application.
//!
//! A hard core at `R_c` and the regularized well describe the same low-energy
//! physics when they share the scattering length `L = g tan φ`. For the hard
//! core this gives `L = g cot(g/R_c)`, i.e. `R_c = g/((s + ½)π - φ)`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::Serialize;
use statrs::function::gamma::gamma;

use crate::error::{domain, Error, Result};
use crate::quad;
use crate::rgflow::{reduce_phase, CutoffConfig, ModelParams};
use crate::roots::bisect;
use crate::solver::{bound_states, BoundState, PotentialSpec};

/// Conversion constants for atomic units with `ħ = 2m = 1`, `e² = 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UnitsContext {
    pub bohr_radius_angstrom: f64,
    #[serde(rename = "rydberg_meV")]
    pub rydberg_mev: f64,
}

impl Default for UnitsContext {
    fn default() -> Self {
        Self { bohr_radius_angstrom: 0.529177, rydberg_mev: 13605.69 }
    }
}

/// Cutoff `R/g` used for the R-method column of the correspondence table.
pub const TABLE_CUTOFF: f64 = 0.1;

/// Flow branch used for the R-method column of the correspondence table.
pub const TABLE_BRANCH: u32 = 2;

/// One line of the correspondence table. `_r` columns come from the
/// regularized well, `_hc` columns from the hard core.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorrespondenceRow {
    pub phi: f64,
    pub rc_over_g: f64,
    pub g_kappa_r: f64,
    pub g_kappa_hc: f64,
    pub rms_r: f64,
    pub rms_hc: f64,
}

/// `L = g cot(g/R_c)`.
pub fn hardcore_scattering_length(g: f64, rc: f64) -> Result<f64> {
    if !(rc > 0.0) || !(g > 0.0) {
        return Err(domain(format!("need g > 0 and R_c > 0 (got g = {g}, R_c = {rc})")));
    }
    let x = g / rc;
    let s = x.sin();
    if s.abs() <= 1e-12 * x.max(1.0) {
        return Err(Error::Pole(format!("g/R_c = {x} is a multiple of π")));
    }
    Ok(g * x.cos() / s)
}

/// `φ = arctan(L/g)` in `[0, π)`.
pub fn phi_from_scattering_length(l: f64, g: f64) -> Result<f64> {
    if !(g > 0.0) {
        return Err(domain(format!("coupling length g must be positive, got {g}")));
    }
    Ok(reduce_phase((l / g).atan()))
}

/// `R_c = g/((s + ½)π - φ)`.
pub fn hardcore_radius(g: f64, phi: f64, s: u32) -> Result<f64> {
    if !(g > 0.0) {
        return Err(domain(format!("coupling length g must be positive, got {g}")));
    }
    if s == 0 {
        return Err(domain("hard-core index s must be at least 1"));
    }
    if !(0.0..=PI).contains(&phi) {
        return Err(domain(format!("φ must lie in [0, π], got {phi}")));
    }
    Ok(g / ((s as f64 + 0.5) * PI - phi))
}

fn weakest(states: &[BoundState], what: &str) -> Result<BoundState> {
    states
        .last()
        .copied()
        .ok_or_else(|| Error::NoRoot(format!("no bound state for the {what}")))
}

/// Weakest state of the regularized well at `R = cutoff·g` on flow branch `n`.
pub fn r_method_weakest(g: f64, phi: f64, cutoff: f64, n: u32) -> Result<BoundState> {
    let params = ModelParams::new(g, phi)?;
    let config = CutoffConfig::on_branch(&params, cutoff * g, n)?;
    weakest(&bound_states(&PotentialSpec::from_config(&config))?, "regularized well")
}

/// Weakest state of the hard core `R_c = hardcore_radius(g, φ, s)`.
pub fn hardcore_weakest(g: f64, phi: f64, s: u32) -> Result<BoundState> {
    let rc = hardcore_radius(g, phi, s)?;
    weakest(&bound_states(&PotentialSpec::hard_core(rc, g)?)?, "hard core")
}

/// Correspondence rows for each `φ`, R-method at [`TABLE_CUTOFF`] on [`TABLE_BRANCH`].
pub fn table1(g: f64, phis: &[f64], s: u32) -> Result<Vec<CorrespondenceRow>> {
    table1_with(g, phis, s, TABLE_CUTOFF, TABLE_BRANCH)
}

pub fn table1_with(g: f64, phis: &[f64], s: u32, cutoff: f64, branch: u32) -> Result<Vec<CorrespondenceRow>> {
    phis.par_iter()
        .map(|&phi| {
            let rc = hardcore_radius(g, phi, s)?;
            let hc = hardcore_weakest(g, phi, s)?;
            let r = r_method_weakest(g, phi, cutoff, branch)?;
            Ok(CorrespondenceRow {
                phi,
                rc_over_g: rc / g,
                g_kappa_r: g * r.kappa,
                g_kappa_hc: g * hc.kappa,
                rms_r: r.rms_radius / g,
                rms_hc: hc.rms_radius / g,
            })
        })
        .collect()
}

/// `∫₀^{x₀}`-complement of the scaled outer action, `∫_{x₀}^1 √(1 - x⁴)/x² dx`.
fn scaled_outer_action(x0: f64) -> Result<f64> {
    let tol = 1e-12;
    let split = 0.5;
    // Near x = 1 use x = 1 - u², which removes the square-root endpoint.
    let near_one = |u: f64| {
        let x = 1.0 - u * u;
        let one_minus_x4 = (1.0 - x * x) * (1.0 + x * x);
        2.0 * u * one_minus_x4.max(0.0).sqrt() / (x * x)
    };
    if x0 >= split {
        return Ok(quad::integrate(near_one, 0.0, (1.0 - x0).sqrt(), tol)?.value);
    }
    let upper = quad::integrate(near_one, 0.0, (1.0 - split).sqrt(), tol)?.value;
    // Near the cutoff use x = e^s to tame the 1/x² growth.
    let lower = quad::integrate(
        |s: f64| {
            let x = s.exp();
            (1.0 - x.powi(4)).sqrt() / x
        },
        x0.ln(),
        split.ln(),
        tol / x0,
    )?
    .value;
    Ok(upper + lower)
}

/// Semiclassical action `∫₀^R √(E + α_s²/R²) dr + ∫_R^{r₊} √(E + g²/r⁴) dr`
/// with outer turning point `r₊ = √(g/κ)`.
pub fn wkb_action(energy: f64, alpha_s: f64, r: f64, g: f64) -> Result<f64> {
    if !(energy < 0.0) {
        return Err(domain(format!("WKB action needs a negative energy, got {energy}")));
    }
    if !(r > 0.0) || !(g > 0.0) {
        return Err(domain(format!("need R > 0 and g > 0 (got R = {r}, g = {g})")));
    }
    let inner2 = energy + (alpha_s / r).powi(2);
    if !(inner2 > 0.0) {
        return Err(domain("the square well is classically forbidden at this energy"));
    }
    let kappa = (-energy).sqrt();
    let r_plus = (g / kappa).sqrt();
    if r_plus <= r {
        return Err(domain(format!("outer turning point {r_plus} does not exceed R = {r}")));
    }
    let inner = r * inner2.sqrt();
    let outer = (g * kappa).sqrt() * scaled_outer_action(r / r_plus)?;
    Ok(inner + outer)
}

/// κ with `wkb_action(-κ², α_s, R, g) = (n - ½)π`.
pub fn wkb_kappa_finite(alpha_s: f64, r: f64, g: f64, n: u32) -> Result<f64> {
    if n == 0 {
        return Err(domain("WKB quantum number must be at least 1"));
    }
    let target = (n as f64 - 0.5) * PI;
    let k_hi = alpha_s.min(g / r) / r * (1.0 - 1e-12);
    let k_lo = k_hi * 1e-14;
    let f = |k: f64| wkb_action(-k * k, alpha_s, r, g).map(|a| a - target).unwrap_or(f64::NAN);
    let (f_lo, f_hi) = (f(k_lo), f(k_hi));
    if !(f_lo > 0.0 && f_hi < 0.0) {
        return Err(Error::NoRoot(format!(
            "WKB level n = {n} does not exist for α_s = {alpha_s}, R = {r}, g = {g}"
        )));
    }
    bisect(f, k_lo, k_hi, 0.0, 1e-12)
}

/// Largest WKB quantum number supported by the potential.
pub fn wkb_level_count(alpha_s: f64, r: f64, g: f64) -> u32 {
    // The action decreases from α_s + g/R at κ → 0.
    let top = alpha_s + g / r;
    (top / PI + 0.5).ceil().max(1.0) as u32 - 1
}

/// `Γ(5/4)/Γ(3/4)`, checked once against `Γ(1/4)²/(4π√2)`.
pub fn gamma_ratio() -> Result<f64> {
    static RATIO: OnceLock<std::result::Result<f64, f64>> = OnceLock::new();
    let checked = RATIO.get_or_init(|| {
        let direct = gamma(1.25) / gamma(0.75);
        let identity = gamma(0.25).powi(2) / (4.0 * PI * 2f64.sqrt());
        if (direct - identity).abs() <= 1e-12 * direct {
            Ok(direct)
        } else {
            Err((direct - identity).abs())
        }
    });
    checked.map_err(|diff| {
        Error::QuadratureFailure { tol: 1e-12, err: diff }
    })
}

/// `κ` with `gκ = (4/π)(Γ(5/4)/Γ(3/4))²(φ + ½)²`.
pub fn wkb_kappa_limit(g: f64, phi: f64) -> Result<f64> {
    if !(g > 0.0) {
        return Err(domain(format!("coupling length g must be positive, got {g}")));
    }
    let ratio = gamma_ratio()?;
    Ok(4.0 / PI * ratio * ratio * (phi + 0.5).powi(2) / g)
}

/// `g/a₀ = √(α^P/a₀³)`.
pub fn polarizability_coupling(alpha_p: f64) -> Result<f64> {
    if !(alpha_p > 0.0) {
        return Err(domain(format!("polarizability must be positive, got {alpha_p}")));
    }
    Ok(alpha_p.sqrt())
}

/// Short-range input for the polarization-binding report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum ShortRange {
    Phi(f64),
    RadiusAngstrom(f64),
    /// In units of a₀.
    ScatteringLength(f64),
}

impl ShortRange {
    /// Exactly one of the three inputs must be present.
    pub fn from_options(phi: Option<f64>, radius_angstrom: Option<f64>, scattering_length: Option<f64>) -> Result<Self> {
        let given = [phi.is_some(), radius_angstrom.is_some(), scattering_length.is_some()];
        let count = given.iter().filter(|&&b| b).count();
        match (phi, radius_angstrom, scattering_length) {
            (Some(p), None, None) => Ok(Self::Phi(p)),
            (None, Some(r), None) => Ok(Self::RadiusAngstrom(r)),
            (None, None, Some(l)) => Ok(Self::ScatteringLength(l)),
            _ => Err(Error::Ambiguous(count)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PolarizationReport {
    pub alpha_p_a0_cubed: f64,
    pub g_a0: f64,
    pub phi: f64,
    pub scattering_length_a0: f64,
    pub radius_a0: f64,
    pub radius_angstrom: f64,
    pub g_kappa: f64,
    #[serde(rename = "binding_meV")]
    pub binding_mev: f64,
    pub r_method_g_kappa: f64,
    #[serde(rename = "r_method_binding_meV")]
    pub r_method_binding_mev: f64,
}

/// Weakest electron bound state in the `-α^P e²/(2r⁴)` field of a molecule.
pub fn c60_report(alpha_p: f64, short_range: ShortRange, units: &UnitsContext) -> Result<PolarizationReport> {
    let g = polarizability_coupling(alpha_p)?;
    let phi = match short_range {
        ShortRange::Phi(p) => {
            if !(0.0..=PI).contains(&p) {
                return Err(domain(format!("φ must lie in [0, π], got {p}")));
            }
            p
        }
        ShortRange::RadiusAngstrom(rc) => {
            if !(rc > 0.0) {
                return Err(domain(format!("radius must be positive, got {rc}")));
            }
            let x = g / (rc / units.bohr_radius_angstrom);
            // s = 1 branch of R_c = g/((s + ½)π - φ)
            let phi = 1.5 * PI - x;
            if !(0.0..=PI).contains(&phi) {
                return Err(domain(format!(
                    "radius {rc} Å gives φ = {phi} outside [0, π] for the s = 1 core"
                )));
            }
            phi
        }
        ShortRange::ScatteringLength(l) => phi_from_scattering_length(l, g)?,
    };
    if (phi - FRAC_PI_2).abs() < 1e-12 {
        return Err(Error::Pole("φ = π/2 has an infinite scattering length".into()));
    }
    let rc = hardcore_radius(g, phi, 1)?;
    let hc = hardcore_weakest(g, phi, 1)?;
    let r = r_method_weakest(g, phi, TABLE_CUTOFF, TABLE_BRANCH)?;
    Ok(PolarizationReport {
        alpha_p_a0_cubed: alpha_p,
        g_a0: g,
        phi,
        scattering_length_a0: g * phi.tan(),
        radius_a0: rc,
        radius_angstrom: rc * units.bohr_radius_angstrom,
        g_kappa: g * hc.kappa,
        binding_mev: hc.kappa * hc.kappa * units.rydberg_mev,
        r_method_g_kappa: g * r.kappa,
        r_method_binding_mev: r.kappa * r.kappa * units.rydberg_mev,
    })
}
