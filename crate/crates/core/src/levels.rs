//! Zero-energy solution of the regularized potential and closed-form
//! bound-state counting.
//!
//! The number of bound states equals the number of nodes of the zero-energy
//! solution on `(0, ∞)`, which in turn equals its number of extrema. Extrema
//! are counted separately inside the well and in the `1/r⁴` tail.
//!
//! At parameters where an extremum sits exactly on a counting boundary
//! (a zero-energy resonance) the lower count is returned.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{domain, Result};
use crate::rgflow::{CutoffConfig, ModelParams};

/// Number of `k ≥ 0` with `k < x` (strict): `⌈x⌉` for positive `x`.
fn count_below(x: f64) -> u32 {
    if x <= 0.0 {
        0
    } else {
        x.ceil() as u32
    }
}

/// Extrema of `sin(α_s r/R)` on `0 < r < R`: `⌊α_s/π + 1/2⌋` away from ties.
pub fn count_inner(alpha_s: f64) -> u32 {
    count_below(alpha_s / PI - 0.5)
}

/// Extrema of `r cos(g/r + φ)` on `r > R`, i.e. solutions of
/// `x tan(x + φ) = -1` with `0 < x < α`.
///
/// These are the points where `x + φ + arctan(1/x)` crosses a multiple of π.
/// For `φ < π/2` this is `⌊(α + φ + arctan(1/α))/π⌋`; for `φ ≥ π/2` the first
/// multiple lies below the range of the left side and is discounted.
pub fn count_outer(alpha: f64, phi: f64) -> u32 {
    let upper = (alpha + phi + (1.0 / alpha).atan()) / PI;
    let lower = (phi + FRAC_PI_2) / PI;
    // multiples m with lower < m < upper
    let above_lower = lower.floor() as i64 + 1;
    let below_upper = upper.ceil() as i64 - 1;
    (below_upper - above_lower + 1).max(0) as u32
}

/// Bound states of the regularized potential, `N₁ + N₂`.
pub fn count_bound_states(alpha_s: f64, alpha: f64, phi: f64) -> u32 {
    count_inner(alpha_s) + count_outer(alpha, phi)
}

/// Closed-form zero-energy solution: `A sin(α_s r/R)` inside the well and
/// `B r cos(g/r + φ)` outside, with `A = 1` and `B` fixed by continuity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroEnergySolution {
    pub params: ModelParams,
    pub config: CutoffConfig,
    pub inner_amplitude: f64,
    pub outer_amplitude: f64,
}

/// Relative mismatch allowed in `ψ` and `ψ'` at `r = R`.
pub const MATCH_TOLERANCE: f64 = 1e-8;

impl ZeroEnergySolution {
    /// Fails unless `α_s` satisfies the flow equation for these parameters.
    pub fn new(params: ModelParams, config: CutoffConfig) -> Result<Self> {
        let sol = Self::unchecked(params, config);
        let residual = sol.matching_residual();
        if residual > MATCH_TOLERANCE {
            return Err(domain(format!(
                "α_s = {} does not satisfy the flow equation at R = {} (residual {residual:e})",
                config.alpha_s(),
                config.r()
            )));
        }
        Ok(sol)
    }

    fn unchecked(params: ModelParams, config: CutoffConfig) -> Self {
        let r = config.r();
        let (alpha, alpha_s, phi) = (config.alpha(), config.alpha_s(), params.phi());
        let inner_value = alpha_s.sin();
        let inner_slope = alpha_s / r * alpha_s.cos();
        let outer_value = r * (alpha + phi).cos();
        let outer_slope = (alpha + phi).cos() + alpha * (alpha + phi).sin();
        // Match on whichever of value or slope is better conditioned.
        let b = if outer_value.abs() >= r * outer_slope.abs() {
            inner_value / outer_value
        } else {
            inner_slope / outer_slope
        };
        Self { params, config, inner_amplitude: 1.0, outer_amplitude: b }
    }

    /// Largest of the relative value and slope mismatches at `R`.
    pub fn matching_residual(&self) -> f64 {
        let r = self.config.r();
        let (v_in, d_in) = self.inner(r);
        let (v_out, d_out) = self.outer(r);
        let scale = (v_in.abs() + r * d_in.abs()).max(f64::MIN_POSITIVE);
        ((v_in - v_out).abs() / scale).max(r * (d_in - d_out).abs() / scale)
    }

    fn inner(&self, r: f64) -> (f64, f64) {
        let q = self.config.alpha_s() / self.config.r();
        (self.inner_amplitude * (q * r).sin(), self.inner_amplitude * q * (q * r).cos())
    }

    fn outer(&self, r: f64) -> (f64, f64) {
        let g = self.config.g();
        let theta = g / r + self.params.phi();
        let b = self.outer_amplitude;
        (b * r * theta.cos(), b * (theta.cos() + g / r * theta.sin()))
    }

    /// `(ψ₀, ψ₀')` at `r`. The outer form is used from `r = R` on.
    pub fn value_and_slope(&self, r: f64) -> (f64, f64) {
        if r < self.config.r() {
            self.inner(r)
        } else {
            self.outer(r)
        }
    }

    /// Nodes of `ψ₀` on `(0, ∞)` from the closed form: zeros of the sine
    /// inside the well plus zeros of `cos(g/r + φ)` outside.
    pub fn node_count(&self) -> u32 {
        // zeros of sin(α_s r/R) strictly inside (0, R)
        let inner = count_below(self.config.alpha_s() / PI).saturating_sub(1);
        let (alpha, phi) = (self.config.alpha(), self.params.phi());
        // (m + 1/2)π strictly inside (φ, α + φ)
        let lo = (phi / PI - 0.5).floor() as i64 + 1;
        let hi = ((alpha + phi) / PI - 0.5).ceil() as i64 - 1;
        inner + (hi - lo + 1).max(0) as u32
    }
}

/// `ψ₀(r)` for `r > 0`.
pub fn zero_energy_psi(r: f64, sol: &ZeroEnergySolution) -> Result<f64> {
    if !(r > 0.0) {
        return Err(domain(format!("radius must be positive, got {r}")));
    }
    Ok(sol.value_and_slope(r).0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rgflow::{beta_oracle, omega_of};
    use approx::assert_abs_diff_eq;

    #[test]
    fn inner_counts() {
        assert_eq!(count_inner(0.5), 0);
        assert_eq!(count_inner(2.0), 1);
        assert_eq!(count_inner(4.0), 1);
        assert_eq!(count_inner(0.0), 0);
        // tie at π/2 returns the lower count
        assert_eq!(count_inner(FRAC_PI_2), 0);
    }

    #[test]
    fn outer_counts() {
        assert_eq!(count_outer(1e-9, 1.0), 0);
        assert_eq!(count_outer(10.0, 1.0), 3);
        assert_eq!(count_outer(1.0, 0.0), 0);
    }

    #[test]
    fn total_counts() {
        assert_eq!(count_bound_states(2.0, 10.0, 1.0), 4);
        assert_eq!(count_bound_states(0.5, 1e-9, 1.0), 0);
    }

    fn matched(g: f64, phi: f64, r: f64, n: u32) -> ZeroEnergySolution {
        let params = ModelParams::new(g, phi).unwrap();
        let w = omega_of(g / r, params.phi()).omega;
        let alpha_s = beta_oracle(w, n).unwrap();
        let cfg = CutoffConfig::new(&params, r, alpha_s, n).unwrap();
        ZeroEnergySolution::new(params, cfg).unwrap()
    }

    #[test]
    fn continuity_at_cutoff() {
        let sol = matched(1.0, 1.0, 0.3, 1);
        assert!(sol.matching_residual() < 1e-10, "{}", sol.matching_residual());
        let r = sol.config.r();
        let below = zero_energy_psi(r * (1.0 - 1e-12), &sol).unwrap();
        let at = zero_energy_psi(r, &sol).unwrap();
        assert_abs_diff_eq!(below, at, epsilon = 1e-9 * at.abs().max(1.0));
    }

    #[test]
    fn vanishes_at_origin() {
        let sol = matched(1.0, 1.0, 0.3, 2);
        assert!(zero_energy_psi(1e-12, &sol).unwrap().abs() < 1e-9);
        assert!(zero_energy_psi(0.0, &sol).is_err());
    }

    #[test]
    fn asymptotic_zero_at_scattering_length() {
        let sol = matched(1.0, 1.0, 0.3, 1);
        let l = sol.params.scattering_length();
        // ψ ≈ B(r cos φ - g sin φ) + O(g²/r): the zero moves toward L as r grows.
        let far = 1e4;
        let psi = zero_energy_psi(far, &sol).unwrap() / sol.outer_amplitude;
        let linear = far * 1f64.cos() - 1f64.sin();
        assert!((psi - linear).abs() < 1e-3 * far.recip() * 10.0 + 1e-3);
        assert_abs_diff_eq!(l, 1f64.tan(), epsilon = 1e-14);
    }

    #[test]
    fn unmatched_strength_is_rejected() {
        let params = ModelParams::new(1.0, 1.0).unwrap();
        let cfg = CutoffConfig::new(&params, 0.3, 2.0, 1).unwrap();
        assert!(ZeroEnergySolution::new(params, cfg).is_err());
    }

    #[test]
    fn node_count_matches_formula_on_branches() {
        for &phi in &[0.1, 0.5, 1.0, 1.5, 2.5] {
            for i in 0..60 {
                let r = 0.05 + 0.03 * i as f64;
                for n in 1..4 {
                    let sol = matched(1.0, phi, r, n);
                    let (a_s, a) = (sol.config.alpha_s(), sol.config.alpha());
                    assert_eq!(
                        sol.node_count(),
                        count_bound_states(a_s, a, sol.params.phi()),
                        "φ = {phi}, R = {r}, n = {n}"
                    );
                }
            }
        }
    }
}
