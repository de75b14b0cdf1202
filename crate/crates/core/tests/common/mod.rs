//! Shared generators for the integration tests and the acceptance harness.
#![allow(dead_code)]

use kolmogorov::{BivariatePoly, DegeneracyCase, ParamPoint, SystemModel, DEFAULT_RADIUS};
use rand::Rng;

/// Magnitude in `[lo, hi]` with a random sign.
pub fn signed<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    let m = rng.gen_range(lo..=hi);
    if rng.gen_bool(0.5) {
        m
    } else {
        -m
    }
}

/// Polynomial with the given constant term and random terms of degree 1 and 2.
pub fn poly_with<R: Rng>(rng: &mut R, c0: f64) -> BivariatePoly {
    let mut terms = vec![(0, 0, c0)];
    for (i, j) in [(1, 0), (0, 1), (2, 0), (1, 1), (0, 2)] {
        terms.push((i, j, rng.gen_range(-2.0..=2.0)));
    }
    BivariatePoly::from_terms(&terms)
}

/// A random valid model of the requested case with `O(1)` coefficients.
pub fn random_model<R: Rng>(rng: &mut R, case: DegeneracyCase) -> SystemModel {
    let (theta0, delta0) = match case {
        DegeneracyCase::CaseA => (0.0, signed(rng, 0.5, 2.0)),
        DegeneracyCase::CaseB => (signed(rng, 0.5, 2.0), 0.0),
        other => panic!("no generator for {other:?}"),
    };
    let gamma0 = -rng.gen_range(0.5..=2.0);
    let n0 = signed(rng, 0.5, 2.0);
    let mut rest = [0.0; 3];
    for r in &mut rest {
        *r = rng.gen_range(-2.0..=2.0);
    }
    SystemModel::new(
        poly_with(rng, theta0),
        poly_with(rng, gamma0),
        poly_with(rng, delta0),
        poly_with(rng, rest[0]),
        poly_with(rng, n0),
        poly_with(rng, rest[1]),
        poly_with(rng, rest[2]),
        DEFAULT_RADIUS,
    )
    .expect("generated model is valid")
}

pub fn random_case<R: Rng>(rng: &mut R) -> DegeneracyCase {
    if rng.gen_bool(0.5) {
        DegeneracyCase::CaseA
    } else {
        DegeneracyCase::CaseB
    }
}

/// Uniform point of the disk `|mu| <= r`.
pub fn random_mu<R: Rng>(rng: &mut R, r: f64) -> ParamPoint {
    let rho = r * rng.gen_range(0.0f64..=1.0).sqrt();
    let phi = rng.gen_range(0.0..std::f64::consts::TAU);
    ParamPoint::new(rho * phi.cos(), rho * phi.sin())
}
