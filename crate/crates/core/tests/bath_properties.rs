use std::f64::consts::PI;

use accelphase::bath::{
    inertial_limit, kossakowski, kossakowski_from_spectrum, numerical_spectral_density,
    rindler_trajectory, spectral_density, unruh_kms_ratio, AtomBathParams,
};
use proptest::prelude::*;

const LAMBDAS: [f64; 5] = [0.1, 0.5, 1.0, 2.0, 10.0];
const ABARS: [f64; 4] = [0.5, 1.0, 4.0, 10.0];

#[test]
fn kms_detailed_balance_grid() {
    for &l in &LAMBDAS {
        for &a in &ABARS {
            let ratio = unruh_kms_ratio(l, a).unwrap();
            let boltzmann = (-2.0 * PI * l / a).exp();
            assert!((ratio - boltzmann).abs() < 1e-12, "λ̄={l} ā={a}");
        }
    }
}

#[test]
fn spectral_density_is_positive() {
    for &l in &LAMBDAS {
        for &a in &ABARS {
            assert!(spectral_density(l, a).unwrap() > 0.0);
            assert!(spectral_density(-l, a).unwrap() > 0.0);
        }
    }
}

#[test]
fn numerical_transform_matches_analytic() {
    // The regulator suppresses the exact transform by e^{-λ̄ε}.
    let analytic = spectral_density(1.0, 2.0).unwrap();
    let numeric = numerical_spectral_density(1.0, 2.0, 1e-3, 20.0).unwrap();
    assert!(((numeric - analytic) / analytic).abs() < 0.01);
    assert!(((numeric - analytic * (-1e-3f64).exp()) / analytic).abs() < 1e-6);

    // Negative frequency picks up only the thermal tail.
    let analytic = spectral_density(-1.0, 2.0).unwrap();
    let numeric = numerical_spectral_density(-1.0, 2.0, 1e-3, 20.0).unwrap();
    assert!(((numeric - analytic * 1e-3f64.exp()) / analytic).abs() < 1e-4);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn hyperbola_invariant(tau in -30.0f64..30.0, abar in 1e-3f64..10.0) {
        let p = rindler_trajectory(tau, abar).unwrap();
        let interval = p.x * p.x - p.ct * p.ct;
        prop_assert!((interval - 1.0).abs() <= 1e-10 * p.x * p.x);
        prop_assert_eq!((p.y, p.z), (0.0, 0.0));
    }

    #[test]
    fn coefficient_ordering(g in 1e-9f64..1e-1, abar in 1e-3f64..50.0) {
        let k = kossakowski(&AtomBathParams::new(g, abar, 0.0).unwrap());
        prop_assert!(k.a >= k.b && k.b > 0.0);
        prop_assert_eq!(k.c, -k.a);
        let tanh = (PI / abar).tanh();
        prop_assert!(((k.r - tanh) / tanh).abs() < 1e-12);
        prop_assert!((0.0..=1.0).contains(&k.r));
    }

    #[test]
    fn cross_formula_consistency(g in 1e-9f64..1e-1, abar in 1e-3f64..50.0) {
        let p = AtomBathParams::new(g, abar, 0.0).unwrap();
        let closed = kossakowski(&p);
        let spectral = kossakowski_from_spectrum(&p);
        prop_assert!(((spectral.a - closed.a) / closed.a).abs() < 1e-12);
        prop_assert!(((spectral.b - closed.b) / closed.b).abs() < 1e-12);
        prop_assert!(((spectral.r - closed.r) / closed.r).abs() < 1e-12);
    }

    #[test]
    fn inertial_limit_is_pointwise_limit(l in prop_oneof![-5.0f64..-0.1, 0.1f64..5.0]) {
        let g = spectral_density(l, 1e-4).unwrap();
        let lim = inertial_limit(l);
        prop_assert!((g - lim).abs() <= 1e-7 * lim.abs().max(1.0));
    }
}
