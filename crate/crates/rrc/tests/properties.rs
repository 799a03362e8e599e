//! Cross-module properties: the comparison theorem recovered as a corollary
//! of the extremal solve, and classification feeding back into certified
//! comparisons.

use rrc::candle::{candle, integrate_jacobi, Boundary};
use rrc::comparison::check_class_conditions;
use rrc::curvature::{classify_kappa, make_random_class_profile, ManifoldModel, RicClassParams};
use rrc::extremal::extremal_solve;

/// The candle log-derivative of every class-(ρ, κ) profile dominates the
/// extremal minimum: Theorem-as-corollary over 100 seeded profiles.
#[test]
fn theorem_as_corollary() {
    let (rho, kappa, n, r) = (0.5, -1.0, 3usize, 1.0);
    let minimum = extremal_solve(rho, kappa, n, r, 512).unwrap().min_log_deriv;
    let params = RicClassParams::new(rho, kappa).unwrap();

    let mut closest = f64::INFINITY;
    for seed in 0..100u64 {
        let profile = make_random_class_profile(n, &params, r, seed, 65).unwrap();
        let sol = integrate_jacobi(&profile, r, 512, Boundary::InitialVelocity).unwrap();
        let ld = candle(&sol).unwrap().log_deriv;
        assert!(
            ld >= minimum - 1e-6,
            "seed {seed}: (log s)′ = {ld} below minimum {minimum}"
        );
        closest = closest.min(ld - minimum);
    }
    println!("theorem corollary: 100 profiles ≥ extremal minimum (closest slack {closest:.3e})");
}

/// Classification is self-certifying: the κ* produced by classify_kappa
/// defines a class whose LCD/Candle conditions then hold for the profile
/// that produced it.
#[test]
fn classification_certifies_comparison() {
    let params = RicClassParams::new(0.25, -1.5).unwrap();
    for seed in [1u64, 4, 9, 16] {
        let profile = make_random_class_profile(3, &params, 1.0, seed, 65).unwrap();
        let model = ManifoldModel::explicit(profile.clone());
        let kappa_star = classify_kappa(&model, params.rho()).unwrap();
        assert!(
            kappa_star <= params.kappa() + 1e-12,
            "profile must be at least class κ"
        );

        let tight = RicClassParams::new(params.rho(), kappa_star).unwrap();
        let reports = check_class_conditions(&profile, &tight, 1.0, 1024).unwrap();
        for report in reports.iter().filter(|c| c.applicable) {
            assert!(
                report.holds,
                "seed {seed}: {} fails at its own κ* with margin {}",
                report.condition, report.worst_margin
            );
        }
    }
}

/// Tightening κ strengthens every margin: for fixed profile, margins are
/// monotone in the comparison constant.
#[test]
fn margins_monotone_in_kappa() {
    let params = RicClassParams::new(0.0, -1.0).unwrap();
    let profile = make_random_class_profile(3, &params, 1.0, 42, 65).unwrap();
    let mut prev_lcd = f64::NEG_INFINITY;
    let mut prev_candle = f64::NEG_INFINITY;
    for kappa in [-1.0, -0.75, -0.5, -0.25] {
        let reports = check_class_conditions(
            &profile,
            &RicClassParams::new(0.0, kappa).unwrap(),
            1.0,
            1024,
        )
        .unwrap();
        assert!(
            reports[0].worst_margin >= prev_lcd,
            "LCD margin not monotone in κ"
        );
        assert!(
            reports[1].worst_margin >= prev_candle,
            "Candle margin not monotone in κ"
        );
        prev_lcd = reports[0].worst_margin;
        prev_candle = reports[1].worst_margin;
    }
}
