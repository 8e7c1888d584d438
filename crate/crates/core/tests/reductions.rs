use std::f64::consts::PI;

use mathieu_core::oracle::{integrate, residual_of_samples, uniform_grid};
use mathieu_core::reductions::{pullback, reduce, source_ode};
use mathieu_core::{ComplexScalar, DampedParams, LinearOde, ReductionFamily, ReductionInput};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-10;

/// Interior 90% of the source domain expressed in the Mathieu variable.
fn interior_z(input: &ReductionInput) -> (f64, f64) {
    let r = reduce(input).unwrap();
    match r.variable_map.interior() {
        Some(span) => span,
        None => {
            let (a, b) = (r.variable_map.inverse(0.5).unwrap(), r.variable_map.inverse(9.5).unwrap());
            (a.min(b), a.max(b))
        }
    }
}

fn pulled_back_residual(input: &ReductionInput) -> f64 {
    let r = reduce(input).unwrap();
    let (z0, z1) = interior_z(input);
    let traj = integrate(
        &LinearOde::mathieu(r.gp),
        ComplexScalar::new(1.0, 0.0),
        ComplexScalar::new(0.3, -0.2),
        (z0, z1),
        TOL,
    )
    .unwrap();
    let series = traj.sample(&uniform_grid(z0, z1, 400)).unwrap();
    let pulled: Vec<_> = pullback(&r, &series.values)
        .unwrap()
        .iter()
        .map(|s| s.to_solution_sample().expect("interior samples are regular"))
        .collect();
    residual_of_samples(&source_ode(input).unwrap(), &pulled).linf
}

#[test]
fn every_family_pulls_back_to_its_source_equation() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for family in [
        ReductionFamily::Eq11,
        ReductionFamily::Eq13,
        ReductionFamily::Eq15,
        ReductionFamily::Eq17Sin,
        ReductionFamily::Eq17Cos,
    ] {
        for _ in 0..4 {
            let (a, b) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let input = if family == ReductionFamily::Eq15 {
                ReductionInput::eq15(a, b, rng.gen_range(0.5..3.0))
            } else {
                ReductionInput::family(family, a, b)
            };
            let res = pulled_back_residual(&input);
            assert!(res < 1e-6, "{family} a={a} b={b}: {res:e}");
        }
    }
}

#[test]
fn damped_family_pulls_back() {
    let params = DampedParams::new(0.7, 0.3, 2.0, 0.8, 1.3).unwrap();
    let input = ReductionInput::damped(params);
    let res = pulled_back_residual(&input);
    assert!(res < 1e-6, "{res:e}");
}

#[test]
fn opposite_sign_mappings_fail_the_pullback() {
    // Flipping the overall sign of (h, θ) breaks the sine-modulated family.
    let input = ReductionInput::eq15(1.3, 0.7, 1.1);
    let mut r = reduce(&input).unwrap();
    r.gp.h = -r.gp.h;
    r.gp.theta = -r.gp.theta;
    let (z0, z1) = interior_z(&input);
    let traj = integrate(
        &LinearOde::mathieu(r.gp),
        ComplexScalar::new(1.0, 0.0),
        ComplexScalar::new(0.0, 0.0),
        (z0, z1),
        TOL,
    )
    .unwrap();
    let series = traj.sample(&uniform_grid(z0, z1, 200)).unwrap();
    let pulled: Vec<_> = pullback(&r, &series.values)
        .unwrap()
        .iter()
        .filter_map(|s| s.to_solution_sample())
        .collect();
    assert!(residual_of_samples(&source_ode(&input).unwrap(), &pulled).linf > 1e-3);
}

#[test]
fn cosine_map_interior_stays_away_from_endpoints() {
    let input = ReductionInput::family(ReductionFamily::Eq11, 1.0, 1.0);
    let (z0, z1) = interior_z(&input);
    assert!((z0 - 0.05 * PI).abs() < 1e-15 && (z1 - 0.95 * PI).abs() < 1e-15);
}
