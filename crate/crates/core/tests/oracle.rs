use std::f64::consts::PI;

use mathieu_core::oracle::{integrate, integrate_fixed, monodromy_exponent, residual, uniform_grid};
use mathieu_core::{ComplexScalar, GeneralParams, LinearOde};

fn c(re: f64, im: f64) -> ComplexScalar {
    ComplexScalar::new(re, im)
}

fn harmonic() -> LinearOde {
    LinearOde::constant(c(0.0, 0.0), c(1.0, 0.0))
}

fn return_error(y: ComplexScalar, dy: ComplexScalar) -> f64 {
    (y - c(1.0, 0.0)).norm().max(dy.norm())
}

#[test]
fn harmonic_oscillator_returns_after_one_period() {
    let tr = integrate(&harmonic(), c(1.0, 0.0), c(0.0, 0.0), (0.0, 2.0 * PI), 1e-10).unwrap();
    let (y, dy) = tr.end_state();
    assert!(return_error(y, dy) < 1e-9);
}

#[test]
fn fixed_step_order_is_five() {
    let errs: Vec<f64> = [32, 64, 128, 256]
        .iter()
        .map(|&n| {
            let (y, dy) = integrate_fixed(&harmonic(), c(1.0, 0.0), c(0.0, 0.0), (0.0, 2.0 * PI), n)
                .unwrap()
                .end_state();
            return_error(y, dy)
        })
        .collect();
    let orders: Vec<f64> = errs.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    assert!(orders.iter().all(|&p| p > 4.9), "{orders:?}");
    // Pairwise estimates approach the limit linearly in h.
    let n = orders.len();
    let limit = 2.0 * orders[n - 1] - orders[n - 2];
    assert!(limit >= 5.0, "{orders:?} -> {limit}");
}

#[test]
fn adaptive_error_tracks_tolerance() {
    for tol in [1e-6, 1e-8, 1e-10, 1e-12] {
        let tr = integrate(&harmonic(), c(1.0, 0.0), c(0.0, 0.0), (0.0, 2.0 * PI), tol).unwrap();
        let (y, dy) = tr.end_state();
        let err = return_error(y, dy);
        println!("tol {tol:e} err {err:e} steps {}", tr.stats.accepted);
        assert!(err < 10.0 * tol);
    }
}

#[test]
fn dense_output_residual_is_within_ten_tolerances() {
    let ode = LinearOde::mathieu(GeneralParams::real(3.7, 1.4));
    for tol in [1e-6, 1e-9, 1e-11] {
        let tr = integrate(&ode, c(1.0, 0.0), c(0.2, 0.0), (0.0, 12.0), tol).unwrap();
        let rep = residual(&ode, &tr, &uniform_grid(0.0, 12.0, 997)).unwrap();
        assert!(rep.linf < 10.0 * tol, "tol {tol:e}: {:e}", rep.linf);
    }
}

#[test]
fn complex_coefficients_are_integrated() {
    // y'' = -(i) y has solution exp(λt) with λ² = -i.
    let lam = c(0.0, -1.0).sqrt();
    let ode = LinearOde::constant(c(0.0, 0.0), c(0.0, 1.0));
    let tr = integrate(&ode, c(1.0, 0.0), lam, (0.0, 3.0), 1e-12).unwrap();
    let (y, _) = tr.end_state();
    assert!((y - (lam * 3.0).exp()).norm() < 1e-10);
}

#[test]
fn monodromy_of_free_equation() {
    for h in [0.25, 1.0, 2.25, 4.0] {
        let m = monodromy_exponent(GeneralParams::real(h, 0.0)).unwrap();
        assert!((m.det - c(1.0, 0.0)).norm() < 1e-11);
        assert!((m.trace - c(2.0 * (h.sqrt() * PI).cos(), 0.0)).norm() < 1e-11);
    }
}

#[test]
fn invalid_tolerance_and_span_are_rejected() {
    assert!(integrate(&harmonic(), c(1.0, 0.0), c(0.0, 0.0), (0.0, 1.0), 1e-2).is_err());
    assert!(integrate(&harmonic(), c(1.0, 0.0), c(0.0, 0.0), (1.0, 1.0), 1e-8).is_err());
    let tr = integrate(&harmonic(), c(1.0, 0.0), c(0.0, 0.0), (0.0, 1.0), 1e-8).unwrap();
    assert!(tr.at(1.5).is_err());
}
