//! Jet-based curvature against a finite-difference pipeline built from
//! metric values alone.

mod common;

use common::*;
use lcw_core::curvature::levi_civita;
use lcw_core::CurvaturePackage;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn christoffel_and_riemann_match_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for n in [3, 4, 5] {
        for _ in 0..2 {
            let spec = random_polynomial_metric(&mut rng, n);
            let x = random_point(&mut rng, n, 0.3);
            let pkg = CurvaturePackage::compute(&spec, &x, 1).unwrap();
            let fd = FdOracle { spec: &spec, h: 1e-2 };
            let gam = fd.christoffel(&x);
            assert!(rel(gam.distance(&pkg.christoffel), gam.norm()) < 1e-9, "n={n} christoffel");
            let r = fd.riemann(&x);
            let r_coord = pkg.to_coordinates(&pkg.riemann);
            assert!(rel(r.distance(&r_coord), r.norm()) < 1e-7, "n={n} riemann");
        }
    }
}

#[test]
fn cotton_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    for n in [3, 4] {
        let spec = random_polynomial_metric(&mut rng, n);
        let x = random_point(&mut rng, n, 0.3);
        let pkg = CurvaturePackage::compute(&spec, &x, 1).unwrap();
        let fd = FdOracle { spec: &spec, h: 1e-2 };
        let c = fd.cotton(&x);
        let c_coord = pkg.to_coordinates(&pkg.cotton);
        assert!(rel(c.distance(&c_coord), c.norm()) < 1e-6, "n={n} cotton {:e}", rel(c.distance(&c_coord), c.norm()));
    }
}

#[test]
fn analytic_entries_match_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let spec = random_product_metric(&mut rng, 4);
    let x = random_point(&mut rng, 4, 0.3);
    let pkg = CurvaturePackage::compute(&spec, &x, 1).unwrap();
    let fd = FdOracle { spec: &spec, h: 1e-2 };
    let r = fd.riemann(&x);
    assert!(rel(r.distance(&pkg.to_coordinates(&pkg.riemann)), r.norm()) < 1e-7);
}

/// `CY_ab = ½ Σ_cd C_cda ε_cdb` in the orthonormal frame.
#[test]
fn cotton_york_frame_formula() {
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    for orientation in [1i8, -1] {
        let spec = random_polynomial_metric(&mut rng, 3);
        let x = random_point(&mut rng, 3, 0.3);
        let pkg = CurvaturePackage::compute(&spec, &x, orientation).unwrap();
        let c = &pkg.cotton;
        let cy = pkg.cotton_york.clone().unwrap();
        for a in 0..3 {
            for b in 0..3 {
                let mut v = 0.0;
                for i in 0..3 {
                    for j in 0..3 {
                        v += 0.5 * c[[i, j, a]] * levi_civita::<f64>(i, j, b);
                    }
                }
                v *= orientation as f64;
                assert!((v - cy[[a, b]]).abs() < 1e-10 * (1.0 + cy.norm()), "CY[{a}][{b}]");
            }
        }
        // Symmetric and traceless.
        assert!(cy.distance(&cy.transpose()) < 1e-10 * cy.norm());
        assert!(cy.trace().abs() < 1e-10 * cy.norm());
    }
}
