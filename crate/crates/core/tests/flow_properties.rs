use std::f64::consts::PI;

use proptest::prelude::*;
use r4flow::levels::count_bound_states;
use r4flow::rgflow::{
    beta0, beta_n, beta_oracle, continuous_flow, flow_residual, minimal_cutoff, omega_of, reduce_phase,
    sample_branch, BranchPolicy, ModelParams,
};

fn omega_strategy() -> impl Strategy<Value = f64> {
    prop_oneof![-1e3..-1e-3f64, 1e-3..1e3f64]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn integral_branch_matches_root(omega in omega_strategy(), n in 1u32..6) {
        let integral = beta_n(omega, n).unwrap();
        let root = beta_oracle(omega, n).unwrap();
        prop_assert!((integral - root).abs() <= 1e-7 * root.max(1.0), "ω = {omega}, n = {n}: {integral} vs {root}");
    }

    #[test]
    fn branch_solves_flow_equation(omega in omega_strategy(), n in 1u32..6) {
        let beta = beta_n(omega, n).unwrap();
        // The residual is 1/ω - β cot β; scale by the slope of β cot β.
        let slope = (1.0 / beta.tan() - beta / beta.sin().powi(2)).abs();
        prop_assert!(flow_residual(beta, omega).abs() <= 1e-7 * slope.max(1.0));
    }

    #[test]
    fn branches_are_ordered(omega in omega_strategy(), n in 1u32..5) {
        let lower = beta_n(omega, n).unwrap();
        let upper = beta_n(omega, n + 1).unwrap();
        prop_assert!(lower < upper);
        let n_pi = n as f64 * PI;
        if omega > 0.0 {
            prop_assert!(lower > n_pi && lower < n_pi + PI);
        } else {
            prop_assert!(lower > n_pi - PI && lower < n_pi);
        }
    }

    #[test]
    fn lowest_branch_matches_root(omega in 1.0001..1e3f64) {
        let integral = beta0(omega).unwrap();
        let root = beta_oracle(omega, 0).unwrap();
        prop_assert!((integral - root).abs() <= 1e-7, "ω = {omega}: {integral} vs {root}");
        prop_assert!(integral > 0.0 && integral < PI / 2.0);
    }

    #[test]
    fn phase_reduction_is_modulo_pi(phi in 0.0..PI, k in -5i32..5) {
        let shifted = reduce_phase(phi + k as f64 * PI);
        prop_assert!((0.0..PI).contains(&shifted));
        let d = (shifted - phi).abs();
        prop_assert!(d < 1e-12 || (PI - d) < 1e-12);
    }

    #[test]
    fn continuous_flow_keeps_the_count(phi in 0.05..3.0f64, target in 1u32..4, frac in 0.05..0.95f64) {
        let params = ModelParams::new(1.0, phi).unwrap();
        let r_min = minimal_cutoff(&params, target).unwrap();
        let r = r_min * (1.0 + 3.0 * frac);
        let curve = continuous_flow(&params, target, &[r]).unwrap();
        let s = curve.samples[0];
        prop_assert_eq!(count_bound_states(s.alpha_s, s.alpha, params.phi()), target);
    }
}

#[test]
fn regular_point_limit() {
    // α ≈ 10³ with α + φ just below a tangent pole makes |ω| tiny.
    let phi = 1.0;
    let alpha = 318.5 * PI - phi - 0.01;
    let w = omega_of(alpha, phi).omega;
    assert!(w.abs() <= 1e-4, "ω = {w}");
    for n in 1..=3 {
        let b = beta_n(w, n).unwrap();
        assert!((b - n as f64 * PI).abs() <= 1e-3);
    }
}

#[test]
fn branch_curve_grid_is_ascending() {
    let params = ModelParams::new(1.0, 1.0).unwrap();
    let grid: Vec<f64> = (0..40).map(|i| 1.5 - i as f64 * 0.035).collect();
    let curve = sample_branch(&params, 1, &grid).unwrap();
    assert_eq!(curve.policy, BranchPolicy::Fixed(1));
    assert!(curve.samples.windows(2).all(|w| w[0].r < w[1].r));
    let flags = curve.discontinuity_flags();
    assert_eq!(flags.len(), curve.samples.len());
    assert!(flags.iter().any(|&f| f));
}

#[test]
fn continuous_branch_index_drops_with_cutoff() {
    let params = ModelParams::new(1.0, 1.0).unwrap();
    let grid: Vec<f64> = (0..30).map(|i| 0.13 + i as f64 * 0.05).collect();
    let curve = continuous_flow(&params, 3, &grid).unwrap();
    let branches: Vec<u32> = curve.samples.iter().map(|s| s.branch).collect();
    assert!(branches.windows(2).all(|w| w[0] <= w[1]), "{branches:?}");
    assert_eq!(branches[0], 1);
    assert_eq!(*branches.last().unwrap(), 3);
}
