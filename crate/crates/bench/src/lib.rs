//! Shared inputs for the criterion benchmarks.

use mathieu_core::{ComplexScalar, DampedParams, GeneralParams};

/// Bessel arguments spread over the supported annulus and orders.
pub fn bessel_inputs() -> Vec<(i32, ComplexScalar)> {
    (0..64)
        .map(|i| {
            let n = (i % 41) - 20;
            let r = 0.1 + 49.9 * ((i * 37) % 64) as f64 / 63.0;
            let arg = -3.0 + 6.0 * ((i * 11) % 64) as f64 / 63.0;
            (n, ComplexScalar::from_polar(r, arg))
        })
        .collect()
}

/// A damped set with corrected index 2.
pub fn admissible_params() -> DampedParams {
    let (m, eta, omega) = (1.0, 0.4, 1.5);
    let a = eta / m;
    let k0 = m * (a * a + 4.0 * omega * omega) / 4.0;
    DampedParams::new(m, eta, k0, 0.8, omega).expect("valid parameters")
}

/// Points inside and outside the first instability tongue.
pub fn mathieu_points() -> [GeneralParams; 3] {
    [
        GeneralParams::real(1.0, 0.2),
        GeneralParams::real(4.5, 1.3),
        GeneralParams::real(9.0, 2.0),
    ]
}
