use r4flow::correspondence::{hardcore_radius, hardcore_weakest, r_method_weakest, table1};
use r4flow::levels::count_bound_states;
use r4flow::quad;
use r4flow::rgflow::{continuous_sample, CutoffConfig, ModelParams};
use r4flow::solver::{bound_states, bound_states_with, wavefunction, PotentialSpec, SolverConfig};

fn spec_on_branch(phi: f64, r: f64, n: u32) -> (CutoffConfig, PotentialSpec) {
    let params = ModelParams::new(1.0, phi).unwrap();
    let config = CutoffConfig::on_branch(&params, r, n).unwrap();
    (config, PotentialSpec::from_config(&config))
}

#[test]
fn spectrum_size_matches_closed_form_count() {
    for &phi in &[0.3, 1.0, 2.0, 2.9] {
        for &r in &[0.09, 0.17, 0.33, 0.52, 0.8, 1.3] {
            for n in 1..=3 {
                let (c, spec) = spec_on_branch(phi, r, n);
                let states = bound_states(&spec).unwrap();
                let expected = count_bound_states(c.alpha_s(), c.alpha(), phi);
                assert_eq!(states.len() as u32, expected, "φ = {phi}, R = {r}, n = {n}");
                let nodes: Vec<u32> = states.iter().map(|s| s.nodes).collect();
                assert_eq!(nodes, (0..expected).collect::<Vec<_>>());
            }
        }
    }
}

#[test]
fn weakest_state_plateau_at_small_cutoff() {
    let params = ModelParams::new(1.0, 1.0).unwrap();
    for target in 2..=4u32 {
        let r_min = r4flow::rgflow::minimal_cutoff(&params, target).unwrap();
        let grid: Vec<f64> = (0..6).map(|i| r_min * 1.02 + (0.3 - r_min * 1.02) * i as f64 / 5.0).collect();
        let mut kappas = Vec::new();
        let mut radii = Vec::new();
        for &r in &grid {
            let s = continuous_sample(&params, target, r).unwrap();
            let c = CutoffConfig::new(&params, r, s.alpha_s, s.branch).unwrap();
            let states = bound_states(&PotentialSpec::from_config(&c)).unwrap();
            assert_eq!(states.len() as u32, target);
            let w = states.last().unwrap();
            kappas.push(w.kappa);
            radii.push(w.rms_radius);
        }
        let spread = |v: &[f64]| {
            let max = v.iter().cloned().fold(f64::MIN, f64::max);
            let min = v.iter().cloned().fold(f64::MAX, f64::min);
            (max - min) / min
        };
        assert!(spread(&kappas) < 0.02, "N = {target}: {kappas:?}");
        assert!(spread(&radii) < 0.02, "N = {target}: {radii:?}");
    }
}

#[test]
fn table_is_monotone_in_phase() {
    let phis = [0.1, 0.2, 0.4, 0.6, 0.8, 1.0, 1.2, 1.4, 1.5];
    let rows = table1(1.0, &phis, 1).unwrap();
    for w in rows.windows(2) {
        assert!(w[1].g_kappa_hc < w[0].g_kappa_hc);
        assert!(w[1].g_kappa_r < w[0].g_kappa_r);
        assert!(w[1].rms_hc > w[0].rms_hc);
        assert!(w[1].rms_r > w[0].rms_r);
    }
    for row in &rows {
        assert!((row.g_kappa_r - row.g_kappa_hc).abs() / row.g_kappa_hc <= 0.04, "{row:?}");
    }
}

fn direct_norm(spec: &PotentialSpec, kappa: f64) -> f64 {
    let cfg = SolverConfig::default();
    let wf = wavefunction(spec, kappa, &cfg).unwrap();
    let start = match *spec {
        PotentialSpec::HardCore { rc, .. } => rc,
        PotentialSpec::Regularized { .. } => 0.0,
    };
    let mut breaks = vec![start];
    if let PotentialSpec::Regularized { r, .. } = *spec {
        // resolve the interior oscillations
        breaks.extend((1..=8).map(|i| r * i as f64 / 8.0));
    }
    let mut x = breaks.last().copied().unwrap().max(0.05);
    while x < wf.outer_start() {
        x = (x * 1.5).min(wf.outer_start());
        breaks.push(x);
    }
    breaks.push(wf.outer_start() + 60.0 / kappa);
    breaks
        .windows(2)
        .map(|w| quad::integrate(|r| wf.eval(r).unwrap().powi(2), w[0], w[1], 1e-13).unwrap().value)
        .sum()
}

#[test]
fn every_state_is_normalized() {
    let (_, reg) = spec_on_branch(1.0, 0.2, 2);
    let hc = PotentialSpec::hard_core(hardcore_radius(1.0, 0.6, 3).unwrap(), 1.0).unwrap();
    for spec in [reg, hc] {
        for state in bound_states(&spec).unwrap() {
            let n = direct_norm(&spec, state.kappa);
            assert!((n - 1.0).abs() < 1e-8, "{spec:?} κ = {}: ∫ψ² = {n}", state.kappa);
        }
    }
}

#[test]
fn matching_radius_is_immaterial() {
    let spec = PotentialSpec::hard_core(hardcore_radius(1.0, 1.0, 2).unwrap(), 1.0).unwrap();
    let base = bound_states(&spec).unwrap();
    let default_rm = SolverConfig::default().matching_radius(&spec);
    for factor in [0.5, 1.5] {
        let cfg = SolverConfig { r_match: Some(default_rm * factor), ..SolverConfig::default() };
        let moved = bound_states_with(&spec, &cfg).unwrap();
        assert_eq!(moved.len(), base.len());
        for (a, b) in base.iter().zip(&moved) {
            assert!((a.kappa - b.kappa).abs() <= 1e-6 * a.kappa, "{} vs {}", a.kappa, b.kappa);
            assert_eq!(a.nodes, b.nodes);
        }
    }
}

#[test]
fn hard_core_index_sets_weakest_nodes() {
    let base = hardcore_weakest(1.0, 1.0, 1).unwrap();
    for s in 1..=3 {
        let w = hardcore_weakest(1.0, 1.0, s).unwrap();
        assert_eq!(w.nodes, s);
        assert!((w.kappa - base.kappa).abs() / base.kappa < 0.01);
    }
}

#[test]
#[allow(clippy::approx_constant)]
fn second_table_example_row() {
    let hc = hardcore_weakest(1.0, 0.1, 1).unwrap();
    assert!((hc.kappa - 3.14).abs() / 3.14 < 0.01);
    assert!((hc.rms_radius - 0.548).abs() / 0.548 < 0.01);
    let r = r_method_weakest(1.0, 1.0, 0.1, 2).unwrap();
    assert!((r.kappa - 0.83).abs() < 0.01);
}

#[test]
fn free_well_without_tail_has_square_well_levels() {
    // g = 0: a square well of depth (2.8π)² on R = 1 with ψ = e^{-κr} outside.
    // Levels solve q cot q = -κ, q² + κ² = (2.8π)².
    let depth = 2.8 * std::f64::consts::PI;
    let spec = PotentialSpec::regularized(depth, 1.0, 0.0).unwrap();
    let states = bound_states(&spec).unwrap();
    assert_eq!(states.len(), 3);
    for s in &states {
        let q = (depth * depth - s.kappa * s.kappa).sqrt();
        assert!((q / q.tan() + s.kappa).abs() < 1e-8, "κ = {}", s.kappa);
    }
}
