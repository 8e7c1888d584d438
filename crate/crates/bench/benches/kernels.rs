use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use mathieu_bench::{admissible_params, bessel_inputs, mathieu_points};
use mathieu_core::bessel::bessel_jy;
use mathieu_core::closed_form::{first_equation, general_solution};
use mathieu_core::floquet::{characteristic_exponent, solve};
use mathieu_core::oracle::{integrate, monodromy_exponent, residual, uniform_grid};
use mathieu_core::{ComplexScalar, LinearOde, Variant};

fn bessel(c: &mut Criterion) {
    let inputs = bessel_inputs();
    c.bench_function("bessel_jy/64 points", |b| {
        b.iter(|| {
            for &(n, z) in &inputs {
                black_box(bessel_jy(n, z).unwrap());
            }
        })
    });
}

fn floquet(c: &mut Criterion) {
    let mut g = c.benchmark_group("floquet");
    for gp in mathieu_points() {
        let label = format!("h={} theta={}", gp.h.re, gp.theta.re);
        g.bench_function(format!("exponent {label}"), |b| {
            b.iter(|| black_box(characteristic_exponent(gp, 25).unwrap()))
        });
        g.bench_function(format!("solve {label}"), |b| b.iter(|| black_box(solve(gp).unwrap())));
        g.bench_function(format!("monodromy {label}"), |b| {
            b.iter(|| black_box(monodromy_exponent(gp).unwrap()))
        });
    }
    g.finish();
}

fn oracle(c: &mut Criterion) {
    let gp = mathieu_points()[1];
    let ode = LinearOde::mathieu(gp);
    let one = ComplexScalar::new(1.0, 0.0);
    let zero = ComplexScalar::new(0.0, 0.0);
    let mut g = c.benchmark_group("integrate");
    for tol in [1e-6, 1e-10] {
        g.bench_function(format!("mathieu [0, 20] tol {tol:e}"), |b| {
            b.iter(|| black_box(integrate(&ode, one, zero, (0.0, 20.0), tol).unwrap()))
        });
    }
    g.finish();
}

fn closed_form(c: &mut Criterion) {
    let params = admissible_params();
    let spec = general_solution(&params, Variant::Corrected, ComplexScalar::new(1.0, 0.0), ComplexScalar::new(0.5, -0.2), false)
        .unwrap();
    let grid = uniform_grid(0.0, 10.0, 500);
    let ode = first_equation(&params);
    c.bench_function("closed form residual/501 points", |b| {
        b.iter(|| black_box(residual(&ode, &spec, &grid).unwrap()))
    });
}

criterion_group!(benches, bessel, floquet, oracle, closed_form);
criterion_main!(benches);
