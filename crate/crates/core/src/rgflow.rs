//! Renormalization-group flow of the regulating square-well strength.
//!
//! The regularized potential replaces the `-g²/r⁴` tail inside the cutoff `R`
//! by a square well of depth `α_s²/R²`. Matching the zero-energy solutions at
//! `R` gives the flow equation
//!
//! ```text
//! α_s cot α_s = 1 + α tan(α + φ) = 1/ω,      α = g/R,
//! ```
//!
//! whose solutions form infinitely many branches `β_n(ω)`. Each branch is
//! available in closed form as an exponential of a principal-argument integral,
//! and independently as a bracketed root of the flow equation.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::levels::count_bound_states;
use crate::quad;
use crate::roots::bisect;

/// Distance of `α + φ` to a tangent pole below which ω is taken as exactly 0.
pub const TAN_POLE_TOLERANCE: f64 = 1e-12;

/// Absolute tolerance of the branch integrals.
pub const BRANCH_QUAD_TOL: f64 = 1e-10;

/// Below this `t` the branch integrands are replaced by their `t → 0` limit.
const SMALL_T: f64 = 1e-12;

/// Upper end of the `t = 1 - e^{-u}` substitution on the last subinterval.
const U_MAX: f64 = 45.0;

/// Fixed physical inputs: the coupling length `g` of the `-g²/r⁴` tail and
/// the zero-energy phase `φ`, stored reduced to `[0, π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelParams {
    g: f64,
    phi: f64,
}

impl ModelParams {
    pub fn new(g: f64, phi: f64) -> Result<Self> {
        if !(g > 0.0) || !g.is_finite() {
            return Err(domain(format!("coupling length g must be positive, got {g}")));
        }
        if !phi.is_finite() {
            return Err(domain("zero-energy phase must be finite"));
        }
        Ok(Self { g, phi: reduce_phase(phi) })
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// `L = g tan φ`.
    pub fn scattering_length(&self) -> f64 {
        self.g * self.phi.tan()
    }

    pub fn alpha(&self, r: f64) -> f64 {
        self.g / r
    }
}

/// Map an angle into `[0, π)`.
pub fn reduce_phase(phi: f64) -> f64 {
    let reduced = phi.rem_euclid(PI);
    // rem_euclid can round up to exactly π for tiny negative inputs.
    if reduced >= PI {
        0.0
    } else {
        reduced
    }
}

/// Regulator state at one cutoff. `α = g/R` is always derived.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CutoffConfig {
    r: f64,
    g: f64,
    alpha_s: f64,
    branch: u32,
}

impl CutoffConfig {
    pub fn new(params: &ModelParams, r: f64, alpha_s: f64, branch: u32) -> Result<Self> {
        if !(r > 0.0) || !r.is_finite() {
            return Err(domain(format!("cutoff radius must be positive, got {r}")));
        }
        if !(alpha_s >= 0.0) {
            return Err(domain(format!("square-well strength must be non-negative, got {alpha_s}")));
        }
        Ok(Self { r, g: params.g(), alpha_s, branch })
    }

    /// The configuration on branch `n` at cutoff `r`, using the integral form.
    pub fn on_branch(params: &ModelParams, r: f64, branch: u32) -> Result<Self> {
        let omega = omega_of(params.alpha(r), params.phi());
        let alpha_s = branch_value(omega.omega, branch)?;
        Self::new(params, r, alpha_s, branch)
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn alpha(&self) -> f64 {
        self.g / self.r
    }

    pub fn alpha_s(&self) -> f64 {
        self.alpha_s
    }

    pub fn branch(&self) -> u32 {
        self.branch
    }
}

/// `ω` with `1/ω = 1 + α tan(α + φ)`. At a tangent pole ω is exactly 0 and
/// `singular` is set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OmegaValue {
    pub omega: f64,
    pub singular: bool,
}

pub fn omega_of(alpha: f64, phi: f64) -> OmegaValue {
    let arg = alpha + phi;
    // Distance to the nearest odd multiple of π/2.
    let offset = (arg - FRAC_PI_2).rem_euclid(PI);
    let distance = offset.min(PI - offset);
    if distance < TAN_POLE_TOLERANCE {
        return OmegaValue { omega: 0.0, singular: true };
    }
    let inverse = 1.0 + alpha * arg.tan();
    OmegaValue { omega: 1.0 / inverse, singular: false }
}

fn check_t(t: f64) -> Result<()> {
    if t > 0.0 && t < 1.0 {
        Ok(())
    } else {
        Err(domain(format!("kernel argument t must lie in (0, 1), got {t}")))
    }
}

/// `λ(t) = 1 + (ωt/2) ln((1 - t)/(1 + t))`.
pub fn lambda_kernel(t: f64, omega: f64) -> Result<f64> {
    check_t(t)?;
    Ok(lambda_with_log(t, (-t).ln_1p(), omega))
}

/// `Λ₀(t) = λ(t) + iπωt/2`.
pub fn capital_lambda0(t: f64, omega: f64) -> Result<Complex64> {
    check_t(t)?;
    Ok(lambda0_with_log(t, (-t).ln_1p(), omega))
}

/// `Ω_n(t) = Λ₀(t)² + n²π²ω²t²`.
pub fn capital_omega_n(t: f64, omega: f64, n: u32) -> Result<Complex64> {
    check_t(t)?;
    if n == 0 {
        return Err(domain("Ω_n requires n ≥ 1"));
    }
    Ok(omega_n_with_log(t, (-t).ln_1p(), omega, n))
}

// The kernels take ln(1 - t) separately so the substituted integral near
// t = 1 keeps full precision.
fn lambda_with_log(t: f64, ln_one_minus_t: f64, omega: f64) -> f64 {
    1.0 + 0.5 * omega * t * (ln_one_minus_t - t.ln_1p())
}

fn lambda0_with_log(t: f64, ln_one_minus_t: f64, omega: f64) -> Complex64 {
    Complex64::new(lambda_with_log(t, ln_one_minus_t, omega), 0.5 * PI * omega * t)
}

fn omega_n_with_log(t: f64, ln_one_minus_t: f64, omega: f64, n: u32) -> Complex64 {
    let l0 = lambda0_with_log(t, ln_one_minus_t, omega);
    let shift = n as f64 * PI * omega * t;
    l0 * l0 + shift * shift
}

/// `∫₀¹ arg K(t) dt/t` for a kernel given as a function of `(t, ln(1 - t))`.
///
/// `[0, 1/2]` is integrated directly with extra breakpoints near `t ~ 1/|ω|`;
/// `[1/2, 1)` uses `t = 1 - e^{-u}` where the logarithm in λ diverges.
fn arg_integral<K>(kernel: K, omega: f64, small_t_limit: f64) -> Result<f64>
where
    K: Fn(f64, f64) -> Complex64,
{
    let near_zero = |t: f64| {
        if t < SMALL_T {
            small_t_limit
        } else {
            kernel(t, (-t).ln_1p()).arg() / t
        }
    };
    let mut breaks = vec![0.0];
    let scale = omega.abs();
    if scale > 2.0 {
        for c in [0.1, 0.3, 1.0, 3.0, 10.0] {
            let t = c / scale;
            if t < 0.5 {
                breaks.push(t);
            }
        }
    }
    breaks.push(0.5);
    let tol = BRANCH_QUAD_TOL / 2.0;
    let piece_tol = tol / (breaks.len() - 1) as f64;
    let mut total = 0.0;
    for w in breaks.windows(2) {
        total += quad::integrate(near_zero, w[0], w[1], piece_tol)?.value;
    }
    let tail = |u: f64| {
        let one_minus_t = (-u).exp();
        let t = 1.0 - one_minus_t;
        kernel(t, -u).arg() / t * one_minus_t
    };
    total += quad::integrate(tail, std::f64::consts::LN_2, U_MAX, tol)?.value;
    Ok(total)
}

/// Branch `β₀`, defined for `ω > 1` and lying in `(0, π/2)`.
pub fn beta0(omega: f64) -> Result<f64> {
    if !(omega > 1.0) || !omega.is_finite() {
        return Err(domain(format!("β₀ requires ω > 1, got {omega}")));
    }
    let integral = arg_integral(
        |t, l| lambda0_with_log(t, l, omega),
        omega,
        0.5 * PI * omega,
    )?;
    Ok((omega - 1.0).sqrt() / omega * (integral / PI).exp())
}

/// Branch `β_n`, `n ≥ 1`, for any finite ω. Exactly `nπ` at ω = 0.
pub fn beta_n(omega: f64, n: u32) -> Result<f64> {
    if n == 0 {
        return Err(domain("β_n requires n ≥ 1; use beta0 for the n = 0 branch"));
    }
    if !omega.is_finite() {
        return Err(domain("ω is infinite: the cutoff sits on a flow discontinuity"));
    }
    let n_pi = n as f64 * PI;
    if omega == 0.0 {
        return Ok(n_pi);
    }
    let integral = arg_integral(|t, l| omega_n_with_log(t, l, omega, n), omega, PI * omega)?;
    Ok(n_pi * (integral / PI).exp())
}

/// `β₀` for `n = 0`, otherwise `β_n`.
pub fn branch_value(omega: f64, n: u32) -> Result<f64> {
    if n == 0 {
        beta0(omega)
    } else {
        beta_n(omega, n)
    }
}

/// Residual of the flow equation, `β cot β - 1/ω`.
pub fn flow_residual(beta: f64, omega: f64) -> f64 {
    beta / beta.tan() - 1.0 / omega
}

/// Independent root-finding route to the flow branches: the root of
/// `x cot x = 1/ω` in `(0, π)` for `n = 0`, in `(nπ, (n+1)π)` for `ω > 0`
/// and in `((n-1)π, nπ)` for `ω < 0`.
pub fn beta_oracle(omega: f64, n: u32) -> Result<f64> {
    let n_pi = n as f64 * PI;
    if n == 0 {
        if !(omega > 1.0) {
            return Err(domain(format!("branch 0 requires ω > 1, got {omega}")));
        }
    } else if omega == 0.0 {
        return Ok(n_pi);
    }
    if !omega.is_finite() {
        return Err(domain("ω is infinite: the cutoff sits on a flow discontinuity"));
    }
    let target = 1.0 / omega;
    let (lo, hi) = if n == 0 {
        (0.0, PI)
    } else if omega > 0.0 {
        (n_pi, n_pi + PI)
    } else {
        (n_pi - PI, n_pi)
    };
    // x cot x is strictly decreasing on each bracket; evaluate it through
    // sin/cos so the endpoints map to ±∞ cleanly.
    let shrink = 1e-15 * (hi.max(1.0));
    let a = if lo == 0.0 { f64::MIN_POSITIVE } else { lo + shrink };
    let b = hi - shrink;
    let f = |x: f64| {
        if x < 1e-8 {
            1.0 - x * x / 3.0 - target
        } else {
            x * x.cos() / x.sin() - target
        }
    };
    bisect(f, a, b, 1e-13, 1e-15).map_err(|_| Error::BracketFailure { lo, hi })
}

/// How the branch index is chosen along a flow curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BranchPolicy {
    Fixed(u32),
    /// Switch branches so the regularized potential keeps `target` bound states.
    Continuous { target: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FlowSample {
    pub r: f64,
    pub alpha: f64,
    pub omega: OmegaValue,
    pub alpha_s: f64,
    pub branch: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlowCurve {
    pub params: ModelParams,
    pub policy: BranchPolicy,
    /// Ascending in `r`.
    pub samples: Vec<FlowSample>,
    /// Flow discontinuities inside the sampled span, ascending.
    pub discontinuities: Vec<f64>,
}

impl FlowCurve {
    pub fn configs(&self) -> Vec<CutoffConfig> {
        self.samples
            .iter()
            .map(|s| CutoffConfig { r: s.r, g: self.params.g(), alpha_s: s.alpha_s, branch: s.branch })
            .collect()
    }

    /// True for samples whose interval to the previous sample contains a
    /// discontinuity.
    pub fn discontinuity_flags(&self) -> Vec<bool> {
        let mut flags = vec![false; self.samples.len()];
        for (flag, w) in flags.iter_mut().skip(1).zip(self.samples.windows(2)) {
            *flag = self.discontinuities.iter().any(|&d| d > w[0].r && d <= w[1].r);
        }
        flags
    }
}

/// Validate a strictly monotone positive grid and return it ascending.
fn ascending_grid(r_grid: &[f64]) -> Result<Vec<f64>> {
    if r_grid.is_empty() {
        return Err(domain("cutoff grid is empty"));
    }
    if r_grid.iter().any(|&r| !(r > 0.0) || !r.is_finite()) {
        return Err(domain("cutoff grid must be positive and finite"));
    }
    let mut grid = r_grid.to_vec();
    if grid.len() > 1 && grid[0] > grid[grid.len() - 1] {
        grid.reverse();
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(domain("cutoff grid must be strictly monotone"));
    }
    Ok(grid)
}

fn sample_at(params: &ModelParams, r: f64, branch: u32) -> Result<FlowSample> {
    let alpha = params.alpha(r);
    let omega = omega_of(alpha, params.phi());
    let alpha_s = branch_value(omega.omega, branch)?;
    Ok(FlowSample { r, alpha, omega, alpha_s, branch })
}

/// Evaluate branch `n` over a cutoff grid.
pub fn sample_branch(params: &ModelParams, n: u32, r_grid: &[f64]) -> Result<FlowCurve> {
    let grid = ascending_grid(r_grid)?;
    let samples = grid
        .par_iter()
        .map(|&r| sample_at(params, r, n))
        .collect::<Result<Vec<_>>>()?;
    let discontinuities = find_discontinuities(params, grid[0], grid[grid.len() - 1]);
    Ok(FlowCurve { params: *params, policy: BranchPolicy::Fixed(n), samples, discontinuities })
}

/// `cos(α + φ) + α sin(α + φ)`: proportional to `1 + α tan(α + φ)` but free
/// of the tangent poles.
fn pole_function(alpha: f64, phi: f64) -> f64 {
    (alpha + phi).cos() + alpha * (alpha + phi).sin()
}

/// Scan step in α: consecutive tangent poles (spaced π apart in α) get at
/// least this many scan points between them.
const SCAN_POINTS_PER_PERIOD: f64 = 16.0;

/// Discontinuities of the flow branches (poles of ω) with `R` in
/// `[r_lo, r_hi]`, ascending.
pub fn find_discontinuities(params: &ModelParams, r_lo: f64, r_hi: f64) -> Vec<f64> {
    let (r_lo, r_hi) = (r_lo.min(r_hi), r_lo.max(r_hi));
    if !(r_lo > 0.0) || r_lo == r_hi {
        return Vec::new();
    }
    let (a_lo, a_hi) = (params.g() / r_hi, params.g() / r_lo);
    let phi = params.phi();
    let steps = (((a_hi - a_lo) / PI) * SCAN_POINTS_PER_PERIOD).ceil().max(4.0) as usize;
    let h = (a_hi - a_lo) / steps as f64;
    let mut roots = Vec::new();
    let mut prev_a = a_lo;
    let mut prev_f = pole_function(a_lo, phi);
    for i in 1..=steps {
        let a = if i == steps { a_hi } else { a_lo + h * i as f64 };
        let f = pole_function(a, phi);
        if prev_f == 0.0 {
            roots.push(prev_a);
        } else if prev_f * f < 0.0 {
            if let Ok(root) = bisect(|x| pole_function(x, phi), prev_a, a, 1e-15, 1e-15) {
                roots.push(root);
            }
        }
        prev_a = a;
        prev_f = f;
    }
    if prev_f == 0.0 {
        roots.push(prev_a);
    }
    let mut rs: Vec<f64> = roots.into_iter().map(|a| params.g() / a).collect();
    rs.sort_by(f64::total_cmp);
    rs.dedup();
    rs
}

/// Smallest cutoff at which some branch `n ≥ 1` still carries `target` bound
/// states: the `target`-th flow discontinuity counted from large `R`.
pub fn minimal_cutoff(params: &ModelParams, target: u32) -> Result<f64> {
    if target == 0 {
        return Err(domain("target bound-state count must be at least 1"));
    }
    // The m-th discontinuity satisfies α + φ + arctan(1/α) = mπ, so it lies
    // below α = mπ; scan up to there.
    let alpha_cap = (target as f64 + 2.0) * PI;
    let found = find_discontinuities(params, params.g() / alpha_cap, params.g() * 1e6);
    let mut descending = found;
    descending.reverse();
    descending
        .get(target as usize - 1)
        .copied()
        .ok_or_else(|| Error::NoRoot(format!("fewer than {target} flow discontinuities")))
}

/// Flow that keeps a fixed number of bound states by switching to the next
/// lower branch at each discontinuity crossed with decreasing `R`.
pub fn continuous_flow(params: &ModelParams, target: u32, r_grid: &[f64]) -> Result<FlowCurve> {
    if target == 0 {
        return Err(domain("target bound-state count must be at least 1"));
    }
    let grid = ascending_grid(r_grid)?;
    let samples = grid
        .par_iter()
        .map(|&r| continuous_sample(params, target, r))
        .collect::<Result<Vec<_>>>()?;
    let discontinuities = find_discontinuities(params, grid[0], grid[grid.len() - 1]);
    Ok(FlowCurve {
        params: *params,
        policy: BranchPolicy::Continuous { target },
        samples,
        discontinuities,
    })
}

/// Branch `n ≥ 1` carrying exactly `target` bound states at cutoff `r`.
pub fn continuous_sample(params: &ModelParams, target: u32, r: f64) -> Result<FlowSample> {
    let alpha = params.alpha(r);
    let omega = omega_of(alpha, params.phi());
    for n in 1..=target {
        let alpha_s = beta_n(omega.omega, n)?;
        if count_bound_states(alpha_s, alpha, params.phi()) == target {
            return Ok(FlowSample { r, alpha, omega, alpha_s, branch: n });
        }
    }
    let r_min = minimal_cutoff(params, target)?;
    Err(Error::RMinViolation { r, r_min, target })
}
