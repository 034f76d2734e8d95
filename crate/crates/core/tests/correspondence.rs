use std::f64::consts::PI;

use proptest::prelude::*;
use r4flow::correspondence::{
    c60_report, hardcore_radius, hardcore_scattering_length, phi_from_scattering_length, wkb_kappa_limit,
    ShortRange, UnitsContext,
};

proptest! {
    #[test]
    fn phase_round_trip(phi in 0.01..(PI / 2.0 - 0.01), s in 1u32..6, g in 0.1..50.0f64) {
        let rc = hardcore_radius(g, phi, s).unwrap();
        let l = hardcore_scattering_length(g, rc).unwrap();
        let back = phi_from_scattering_length(l, g).unwrap();
        prop_assert!((back - phi).abs() < 1e-9);
    }

    #[test]
    fn limit_is_quadratic_in_shifted_phase(phi in 0.0..PI, g in 0.1..10.0f64) {
        let c = wkb_kappa_limit(g, phi).unwrap() * g / (phi + 0.5).powi(2);
        let c1 = wkb_kappa_limit(1.0, 1.0).unwrap() / 2.25;
        prop_assert!((c - c1).abs() <= 1e-12 * c1);
    }
}

#[test]
fn polarization_binding_for_unit_phase() {
    let r = c60_report(558.0, ShortRange::Phi(1.0), &UnitsContext::default()).unwrap();
    assert!((r.binding_mev - 17.0).abs() <= 1.0, "{r:?}");
    assert!((r.radius_a0 - 6.37).abs() <= 0.05);
    assert!((r.radius_angstrom - 3.37).abs() <= 0.01);
    assert!((r.r_method_binding_mev - r.binding_mev).abs() / r.binding_mev < 0.02);
}

#[test]
fn polarization_binding_for_measured_radius() {
    let r = c60_report(558.0, ShortRange::RadiusAngstrom(3.55), &UnitsContext::default()).unwrap();
    assert!((r.phi - 1.192).abs() <= 0.002, "{r:?}");
    assert!((r.binding_mev - 6.0).abs() <= 1.0);
    assert!((r.g_kappa - 0.50).abs() <= 0.01);
}

#[test]
fn scattering_length_input_matches_phase_input() {
    let units = UnitsContext::default();
    let by_phi = c60_report(558.0, ShortRange::Phi(1.0), &units).unwrap();
    let l = 558f64.sqrt() * 1f64.tan();
    let by_length = c60_report(558.0, ShortRange::ScatteringLength(l), &units).unwrap();
    assert!((by_phi.binding_mev - by_length.binding_mev).abs() < 1e-9);
    assert!((by_phi.phi - by_length.phi).abs() < 1e-12);
}
