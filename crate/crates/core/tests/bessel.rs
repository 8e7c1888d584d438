use std::f64::consts::PI;

use mathieu_core::bessel::bessel_jy;
use mathieu_core::{bessel_j, bessel_y, ComplexScalar};
use proptest::prelude::*;

fn c(re: f64, im: f64) -> ComplexScalar {
    ComplexScalar::new(re, im)
}

fn close(a: ComplexScalar, b: ComplexScalar, tol: f64) -> bool {
    (a - b).norm() <= tol * b.norm().max(1.0)
}

#[test]
fn reference_values() {
    // Tabulated values of J0, Y0, J1, Y1 and the modified functions I0, I1.
    let table = [
        (0, c(1.0, 0.0), c(0.765_197_686_557_966_6, 0.0), c(0.088_256_964_215_676_96, 0.0)),
        (0, c(10.0, 0.0), c(-0.245_935_764_451_348_3, 0.0), c(0.055_671_167_283_599_39, 0.0)),
        (1, c(1.0, 0.0), c(0.440_050_585_744_933_5, 0.0), c(-0.781_212_821_300_288_7, 0.0)),
    ];
    for (n, z, j, y) in table {
        assert!(close(bessel_j(n, z).unwrap().value, j, 1e-12), "J_{n}({z})");
        assert!(close(bessel_y(n, z).unwrap().value, y, 1e-12), "Y_{n}({z})");
    }
    assert!(close(bessel_j(0, c(0.0, 1.0)).unwrap().value, c(1.266_065_877_752_008_4, 0.0), 1e-14));
    assert!(close(bessel_j(1, c(0.0, 1.0)).unwrap().value, c(0.0, 0.565_159_103_992_485_1), 1e-14));
}

#[test]
fn origin_and_range_errors() {
    assert_eq!(bessel_j(0, c(0.0, 0.0)).unwrap().value, c(1.0, 0.0));
    assert_eq!(bessel_j(3, c(0.0, 0.0)).unwrap().value, c(0.0, 0.0));
    assert!(bessel_y(0, c(0.0, 0.0)).is_err());
    assert!(bessel_j(500, c(1.0, 0.0)).is_err());
    assert!(bessel_j(1, c(f64::NAN, 0.0)).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn wronskian_identity(n in -20i32..=20, r in 0.1f64..50.0, arg in -PI..PI) {
        let z = ComplexScalar::from_polar(r, arg);
        let (j, y) = bessel_jy(n, z).unwrap();
        let w = j.value * y.derivative - j.derivative * y.value;
        let exact = 2.0 / (PI * z);
        // Off the real axis both products grow like exp(2|Im z|) while their
        // difference stays O(1/|z|).
        let scale = exact.norm().max((j.value * y.derivative).norm()).max((j.derivative * y.value).norm());
        prop_assert!((w - exact).norm() <= 1e-10 * scale, "n={} z={} w={} exact={}", n, z, w, exact);
    }

    #[test]
    fn wronskian_identity_on_the_real_axis(n in -20i32..=20, x in 0.1f64..50.0) {
        let (j, y) = bessel_jy(n, c(x, 0.0)).unwrap();
        let w = j.value * y.derivative - j.derivative * y.value;
        let exact = 2.0 / (PI * x);
        prop_assert!((w - exact).norm() <= 1e-10 * exact, "n={} x={}", n, x);
    }

    #[test]
    fn three_term_recurrence(n in -19i32..=19, r in 0.1f64..40.0, arg in -PI..PI) {
        let z = ComplexScalar::from_polar(r, arg);
        let jm = bessel_j(n - 1, z).unwrap().value;
        let j = bessel_j(n, z).unwrap().value;
        let jp = bessel_j(n + 1, z).unwrap().value;
        let scale = jm.norm().max(jp.norm()).max((j * 2.0 * n as f64 / z).norm()).max(1e-300);
        prop_assert!((jm + jp - j * (2.0 * n as f64) / z).norm() <= 1e-11 * scale);
    }

    #[test]
    fn negative_order_reflection(n in 0i32..=20, r in 0.1f64..30.0, arg in -PI..PI) {
        let z = ComplexScalar::from_polar(r, arg);
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let (jp, yp) = bessel_jy(n, z).unwrap();
        let (jn, yn) = bessel_jy(-n, z).unwrap();
        prop_assert_eq!(jn.value, jp.value * sign);
        prop_assert_eq!(yn.value, yp.value * sign);
    }

    #[test]
    fn conjugate_symmetry(n in -10i32..=10, re in 0.1f64..30.0, im in -20.0f64..20.0) {
        let z = c(re, im);
        let a = bessel_j(n, z.conj()).unwrap().value;
        let b = bessel_j(n, z).unwrap().value.conj();
        prop_assert!(close(a, b, 1e-13));
    }
}
