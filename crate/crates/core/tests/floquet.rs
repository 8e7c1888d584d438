use mathieu_core::floquet::{
    characteristic_exponent, class_distance, classify_stability, second_solution, solve, stability_sweep,
};
use mathieu_core::oracle::{monodromy_exponent, residual, uniform_grid, wronskian_abel};
use mathieu_core::{ComplexScalar, GeneralParams, LinearOde, Stability};

#[test]
fn determinant_and_monodromy_agree_on_a_coarse_grid() {
    for h in [-2.0, -0.5, 1.0, 2.5, 4.0, 7.0, 10.0] {
        for theta in [-2.0, -0.7, 0.3, 1.1, 2.0] {
            let gp = GeneralParams::real(h, theta);
            let ce = characteristic_exponent(gp, 25).unwrap();
            let m = monodromy_exponent(gp).unwrap();
            assert!(class_distance(ce.mu, m.mu) < 1e-6, "h={h} θ={theta}");
        }
    }
}

#[test]
fn series_solves_the_equation() {
    for (h, theta) in [(1.0, 0.5), (3.3, -1.2), (-1.0, 0.8), (8.0, 2.0)] {
        let gp = GeneralParams::real(h, theta);
        let sol = solve(gp).unwrap();
        let r = residual(&LinearOde::mathieu(gp), &sol, &uniform_grid(0.0, 6.0, 240)).unwrap();
        assert!(r.linf < 1e-8, "h={h} θ={theta}: {:e}", r.linf);
    }
}

#[test]
fn free_equation_is_exact() {
    for h in [0.25f64, 1.0, 2.25, 4.0] {
        let sol = solve(GeneralParams::real(h, 0.0)).unwrap();
        assert!((sol.mu - ComplexScalar::new(0.0, h.sqrt())).norm() < 1e-10);
        for n in -(sol.truncation as i64)..=sol.truncation as i64 {
            let expected = if n == 0 { 1.0 } else { 0.0 };
            assert_eq!(sol.coeff(n), ComplexScalar::new(expected, 0.0));
        }
    }
}

#[test]
fn second_solution_completes_the_pair() {
    let gp = GeneralParams::real(2.0, 0.4);
    let a = solve(gp).unwrap();
    let b = second_solution(&a).unwrap();
    let rep = wronskian_abel((&a, &b), &LinearOde::mathieu(gp), &uniform_grid(0.0, 5.0, 100)).unwrap();
    assert!(!rep.dependent && rep.report.linf < 1e-8);
    // h = 4, θ = 0: μ = 2i lies in 2iℤ.
    assert!(second_solution(&solve(GeneralParams::real(4.0, 0.0)).unwrap()).is_err());
}

#[test]
fn sweep_classifies_known_regions() {
    let pts = stability_sweep(&[-1.0, 1.0], &[0.0, 0.2], 25).unwrap();
    assert_eq!(pts.len(), 4);
    assert_eq!((pts[0].h, pts[0].theta), (-1.0, 0.0));
    assert_eq!(pts[0].stability, Stability::Unstable);
    assert_eq!(pts[2].stability, Stability::Stable);
    // First resonance tongue around h = 1.
    assert_eq!(pts[3].stability, Stability::Unstable);
    assert_eq!(classify_stability(ComplexScalar::new(0.0, 0.3), 1e-8), Stability::Stable);
}
