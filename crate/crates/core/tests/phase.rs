use std::f64::consts::PI;

use r4flow::rgflow::{CutoffConfig, ModelParams};
use r4flow::solver::{phase_curve, phase_shift, PotentialSpec};

fn regularized(r: f64) -> PotentialSpec {
    let params = ModelParams::new(1.0, 1.0).unwrap();
    PotentialSpec::from_config(&CutoffConfig::on_branch(&params, r, 1).unwrap())
}

#[test]
fn low_energy_phase_follows_scattering_length() {
    // δ₀ → π - kL with L = g tan φ.
    let spec = regularized(0.2);
    let k = 1e-4;
    let d = phase_shift(k, &spec).unwrap();
    assert!((d - (PI - k * 1f64.tan())).abs() < 1e-6, "{d}");
}

#[test]
fn hard_sphere_without_tail() {
    // g = 0, core radius a: δ₀ = -ka mod π.
    let spec = PotentialSpec::hard_core(0.7, 0.0).unwrap();
    for k in [0.3, 1.1, 4.0] {
        let d = phase_shift(k, &spec).unwrap();
        let exact = (-k * 0.7f64).rem_euclid(PI);
        let diff = (d - exact).abs();
        assert!(diff.min(PI - diff) < 1e-8, "k = {k}: {d} vs {exact}");
    }
}

#[test]
fn curves_are_cutoff_insensitive_below_gk_one() {
    let ks: Vec<f64> = (1..100).map(|i| 0.01 * i as f64).collect();
    let curves: Vec<Vec<f64>> = [0.1, 0.2, 0.4]
        .iter()
        .map(|&r| phase_curve(&regularized(r), &ks).unwrap().samples.iter().map(|s| s.1).collect())
        .collect();
    for a in 0..3 {
        for b in a + 1..3 {
            let worst = curves[a].iter().zip(&curves[b]).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            assert!(worst <= 0.05, "pair ({a}, {b}): {worst}");
        }
    }
    for c in &curves {
        assert!((c[0] - PI).abs() <= 0.05);
    }
}

#[test]
fn unwrapped_curve_is_continuous() {
    let ks: Vec<f64> = (1..=30).map(|i| 0.2 * i as f64).collect();
    let curve = phase_curve(&regularized(0.1), &ks).unwrap();
    assert!(curve.samples.len() >= ks.len());
    assert!(curve.samples.windows(2).all(|w| w[1].0 > w[0].0 && (w[1].1 - w[0].1).abs() < PI / 2.0));
    assert_eq!(curve.anchor, PI);
}

#[test]
fn curve_rejects_bad_grids() {
    let spec = regularized(0.2);
    assert!(phase_curve(&spec, &[]).is_err());
    assert!(phase_curve(&spec, &[0.5, 0.4]).is_err());
    assert!(phase_curve(&spec, &[0.0, 0.4]).is_err());
}
