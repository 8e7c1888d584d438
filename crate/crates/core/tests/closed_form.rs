use mathieu_core::closed_form::{adjudicate, first_equation, fundamental_pair, general_solution};
use mathieu_core::oracle::{integrate, residual, uniform_grid, wronskian_abel, Verdict};
use mathieu_core::{ComplexScalar, DampedParams, Variant};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> ComplexScalar {
    ComplexScalar::new(re, im)
}

/// Parameters with the corrected index equal to `n`: `K0 = m (a² + n²ω²)/4`.
fn admissible(rng: &mut ChaCha8Rng) -> DampedParams {
    let m = rng.gen_range(0.5..2.0);
    let eta = rng.gen_range(0.0..0.8);
    let omega = rng.gen_range(0.8..2.5);
    let n = rng.gen_range(0..=3) as f64;
    let a = eta / m;
    let k0 = m * (a * a + n * n * omega * omega) / 4.0;
    let k = rng.gen_range(0.1..1.5) * m;
    DampedParams::new(m, eta, k0, k, omega).unwrap()
}

#[test]
fn corrected_form_agrees_with_direct_integration() {
    let params = DampedParams::new(1.0, 0.4, 1.04, 0.9, 2.0).unwrap();
    let spec = general_solution(&params, Variant::Corrected, c(0.5, 0.1), c(0.2, -0.3), false).unwrap();
    let s0 = spec.eval(0.0).unwrap();
    let traj = integrate(&first_equation(&params), s0.y, s0.dy, (0.0, 6.0), 1e-12).unwrap();
    for t in [1.0, 3.0, 6.0] {
        let (a, b) = (spec.eval(t).unwrap().y, mathieu_core::AnalyticSolution::sample(&traj, t).unwrap().y);
        assert!((a - b).norm() < 1e-8 * a.norm().max(1.0), "t={t}");
    }
}

#[test]
fn random_admissible_sets_satisfy_the_split_equation() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let grid = uniform_grid(0.0, 10.0, 300);
    for _ in 0..10 {
        let params = admissible(&mut rng);
        let adj = adjudicate(&params, c(1.0, 0.2), c(-0.4, 0.7), &grid).unwrap();
        assert_eq!(adj.corrected.report.verdict, Verdict::Pass, "{params:?}");
        assert_eq!(adj.passing_variant, Some(Variant::Corrected));
        assert_eq!(adj.paper_literal.report.verdict == Verdict::Pass, adj.paper_literal.report.linf < 1e-8);
    }
}

#[test]
fn literal_form_fails_when_stiffness_and_modulation_differ() {
    let params = DampedParams::new(1.0, 0.0, 1.0, 0.3, 2.0).unwrap();
    let spec = general_solution(&params, Variant::PaperLiteral, c(1.0, 0.0), c(0.0, 0.0), true).unwrap();
    let r = residual(&first_equation(&params), &spec, &uniform_grid(0.0, 10.0, 200)).unwrap();
    assert!(r.linf > 1e-3);
}

#[test]
fn fundamental_pair_obeys_abel() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let grid = uniform_grid(0.0, 10.0, 200);
    for _ in 0..5 {
        let params = admissible(&mut rng);
        let (a, b) = fundamental_pair(&params, Variant::Corrected, c(1.0, 0.0), c(1.0, 0.0)).unwrap();
        let rep = wronskian_abel((&a, &b), &first_equation(&params), &grid).unwrap();
        assert!(!rep.dependent);
        assert!(rep.report.linf < 1e-8, "{params:?}: {:e}", rep.report.linf);
    }
}
