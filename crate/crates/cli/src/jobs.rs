use serde_json::{json, Value};

use mathieu_core::closed_form::{adjudicate, first_equation, general_solution, damped_mathieu, PASS_THRESHOLD};
use mathieu_core::floquet::{
    characteristic_exponent, class_distance, classify_stability, coefficients, multiplier, stability_sweep,
    STABILITY_TOL, TAIL_TOL,
};
use mathieu_core::flux::{
    field_from_displacement, modulation_analysis, particular_k0, simulate_full, InducedFieldModel,
};
use mathieu_core::oracle::{integrate, monodromy_exponent, residual_of_samples, uniform_grid, Verdict};
use mathieu_core::reductions::{pullback, reduce, source_ode};
use mathieu_core::{
    ComplexScalar, DampedParams, FluxParams, GeneralParams, LinearOde, MathieuError, ReductionFamily,
    ReductionInput, Result, SolutionSample, Variant,
};

use crate::args::{
    Command, ConstantsArgs, DampedArgs, EquationArg, FloquetArgs, FluxArgs, GridArgs, IntegrateArgs, ResidualArgs,
    SolveArgs, SweepArgs, TransformArgs,
};
use crate::output::{complex, csv_table, num, sample_row, samples_csv, Artifact, Sidecar, SAMPLE_HEADER};
use crate::{exit_code_for, JobSpec, EXIT_NUMERICAL, EXIT_OK};

/// Upper bound on emitted samples and sweep points per job.
pub const MAX_POINTS: usize = 2_000_000;
/// Pull-back residual threshold used by `transform`.
pub const PULLBACK_THRESHOLD: f64 = 1e-6;
/// Floquet series residual threshold used by `floquet`.
pub const SERIES_THRESHOLD: f64 = 1e-8;

fn c(re: f64, im: f64) -> ComplexScalar {
    ComplexScalar::new(re, im)
}

fn invalid(msg: impl Into<String>) -> MathieuError {
    MathieuError::InvalidInput(msg.into())
}

fn damped(a: &DampedArgs) -> Result<DampedParams> {
    DampedParams::new(a.m, a.eta, a.k0, a.k, a.omega)
}

fn constants(a: &ConstantsArgs) -> (ComplexScalar, ComplexScalar) {
    (c(a.c1_re, a.c1_im), c(a.c2_re, a.c2_im))
}

fn time_grid(t0: f64, t1: f64, dt: f64) -> Result<Vec<f64>> {
    if !(t0.is_finite() && t1.is_finite() && t1 > t0) {
        return Err(invalid(format!("need finite t0 < t1, got [{t0}, {t1}]")));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(invalid(format!("dt = {dt} must be positive")));
    }
    let n = ((t1 - t0) / dt).round().max(1.0);
    if n > MAX_POINTS as f64 {
        return Err(invalid(format!("{n} samples exceed the limit of {MAX_POINTS}")));
    }
    Ok(uniform_grid(t0, t1, n as usize))
}

fn grid_of(g: &GridArgs) -> Result<Vec<f64>> {
    time_grid(g.t0, g.t1, g.dt)
}

fn linspace(lo: f64, hi: f64, n: usize, name: &str) -> Result<Vec<f64>> {
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
        return Err(invalid(format!("{name}: need finite min <= max, got [{lo}, {hi}]")));
    }
    match n {
        0 => Err(invalid(format!("{name}: at least one point required"))),
        1 => Ok(vec![lo]),
        _ => Ok(uniform_grid(lo, hi, n - 1)),
    }
}

fn require(v: Option<f64>, name: &str, command: &str) -> Result<f64> {
    v.ok_or_else(|| invalid(format!("{command} needs --{name}")))
}

fn reduction_input(a: &TransformArgs) -> Result<ReductionInput> {
    let family = ReductionFamily::from(a.family);
    if family == ReductionFamily::Damped {
        let p = DampedParams::new(
            a.m.unwrap_or(1.0),
            a.eta.unwrap_or(0.0),
            require(a.k0, "k0", "transform --family damped")?,
            require(a.k, "k", "transform --family damped")?,
            require(a.omega, "omega", "transform --family damped")?,
        )?;
        return Ok(ReductionInput::damped(p));
    }
    let aa = require(a.a, "a", "transform")?;
    let bb = require(a.b, "b", "transform")?;
    let input = if family == ReductionFamily::Eq15 {
        ReductionInput::eq15(aa, bb, require(a.lambda, "lambda", "transform --family eq15")?)
    } else {
        ReductionInput::family(family, aa, bb)
    };
    reduce(&input)?;
    Ok(input)
}

fn integrate_equation(a: &IntegrateArgs) -> Result<LinearOde> {
    match a.equation {
        EquationArg::Mathieu => {
            let h = require(a.h, "h", "integrate --equation mathieu")?;
            let theta = require(a.theta, "theta", "integrate --equation mathieu")?;
            Ok(LinearOde::mathieu(GeneralParams::new(c(h, 0.0), c(theta, 0.0))?))
        }
        EquationArg::Damped | EquationArg::Split => {
            let p = DampedParams::new(
                a.m.unwrap_or(1.0),
                a.eta.unwrap_or(0.0),
                require(a.k0, "k0", "integrate")?,
                require(a.k, "k", "integrate")?,
                require(a.omega, "omega", "integrate")?,
            )?;
            Ok(if a.equation == EquationArg::Damped { damped_mathieu(&p) } else { first_equation(&p) })
        }
    }
}

fn flux_params(a: &FluxArgs) -> Result<FluxParams> {
    let fp = FluxParams::new(damped(&a.damped)?, a.b_field, a.j0, a.big_omega, a.c_light)?;
    if fp.base.k0 == 0.0 {
        return Err(invalid("flux needs K0 != 0"));
    }
    Ok(fp)
}

/// Checks every module precondition that can be checked without computing.
pub fn validate(cmd: &Command) -> Result<()> {
    match cmd {
        Command::Solve(a) => {
            damped(&a.damped)?;
            grid_of(&a.grid)?;
        }
        Command::Floquet(a) => {
            GeneralParams::new(c(a.h, a.h_im), c(a.theta, a.theta_im))?;
            if a.trunc < 5 || a.trunc > mathieu_core::floquet::MAX_TRUNCATION {
                return Err(invalid(format!("--trunc {} outside [5, 400]", a.trunc)));
            }
            time_grid(a.t0, a.t1, a.dt)?;
        }
        Command::Residual(a) => {
            damped(&a.damped)?;
            grid_of(&a.grid)?;
        }
        Command::Sweep(a) => {
            let h = linspace(a.h_min, a.h_max, a.h_n, "h")?;
            let t = linspace(a.theta_min, a.theta_max, a.theta_n, "theta")?;
            if h.len() * t.len() > MAX_POINTS {
                return Err(invalid("sweep grid too large"));
            }
            if a.trunc < 5 || a.trunc > mathieu_core::floquet::MAX_TRUNCATION {
                return Err(invalid(format!("--trunc {} outside [5, 400]", a.trunc)));
            }
        }
        Command::Transform(a) => {
            reduction_input(a)?;
            if a.samples < 2 || a.samples > MAX_POINTS {
                return Err(invalid(format!("--samples {} outside [2, {MAX_POINTS}]", a.samples)));
            }
        }
        Command::Flux(a) => {
            flux_params(a)?;
            time_grid(0.0, a.t1, a.dt)?;
        }
        Command::Integrate(a) => {
            integrate_equation(a)?;
            grid_of(&a.grid)?;
        }
    }
    Ok(())
}

type Outcome = Result<(Option<Vec<u8>>, u8)>;

pub fn run(job: &JobSpec) -> Artifact {
    let mut sidecar = Sidecar::new(job.command.name(), job.command.params(), job.tol);
    let result = match &job.command {
        Command::Solve(a) => solve(a, &mut sidecar),
        Command::Floquet(a) => floquet(a, &mut sidecar),
        Command::Residual(a) => residual_job(a, &mut sidecar),
        Command::Sweep(a) => sweep(a, &mut sidecar),
        Command::Transform(a) => transform(a, job.tol, &mut sidecar),
        Command::Flux(a) => flux(a, job.tol, &mut sidecar),
        Command::Integrate(a) => integrate_job(a, job.tol, &mut sidecar),
    };
    let (csv, exit_code, diagnostic) = match result {
        Ok((csv, code)) => {
            let diag = (code != EXIT_OK).then(|| format!("{}: numerical check failed", job.command.name()));
            (csv, code, diag)
        }
        Err(e) => {
            sidecar.error = Some(e.to_string());
            (None, exit_code_for(&e), Some(format!("{}: {e}", job.command.name())))
        }
    };
    sidecar.exit_code = exit_code;
    Artifact { csv, sidecar, exit_code, diagnostic }
}

fn verdict_code(v: Verdict) -> u8 {
    if v == Verdict::Pass {
        EXIT_OK
    } else {
        EXIT_NUMERICAL
    }
}

fn solve(a: &SolveArgs, sc: &mut Sidecar) -> Outcome {
    let params = damped(&a.damped)?;
    let variant = Variant::from(a.variant);
    let (c1, c2) = constants(&a.constants);
    let spec = general_solution(&params, variant, c1, c2, a.allow_override)?;
    sc.variant = Some(variant.to_string());
    sc.nu = complex(spec.nu);
    if spec.overridden {
        sc.validity_flags.push(format!("index-overridden-to-{}", spec.order));
    }
    let samples = grid_of(&a.grid)?
        .iter()
        .map(|&t| spec.eval(t))
        .collect::<Result<Vec<_>>>()?;
    let report = residual_of_samples(&first_equation(&params), &samples)
        .without_points()
        .judged(PASS_THRESHOLD);
    sc.residual_linf = json!(report.linf);
    sc.residual_l2 = json!(report.l2);
    sc.details = json!({
        "order": spec.order,
        "admissible_nu": spec.admissible_nu,
        "argument_scale": complex(spec.argument_scale),
        "decay_rate": spec.decay_rate,
        "verdict": report.verdict,
        "threshold": PASS_THRESHOLD,
    });
    Ok((Some(samples_csv(&samples)), verdict_code(report.verdict)))
}

fn floquet(a: &FloquetArgs, sc: &mut Sidecar) -> Outcome {
    let gp = GeneralParams::new(c(a.h, a.h_im), c(a.theta, a.theta_im))?;
    let ce = characteristic_exponent(gp, a.trunc)?;
    sc.mu = complex(ce.mu);
    let sol = coefficients(gp, ce.unreduced, a.trunc)?;
    let mono = monodromy_exponent(gp)?;
    let distance = class_distance(ce.mu, mono.mu);
    if sol.tail_ratio > TAIL_TOL {
        sc.validity_flags.push("coefficient-tail-above-tolerance".into());
    }
    if mono.branch_ambiguous {
        sc.validity_flags.push("monodromy-branch-ambiguous".into());
    }
    let samples: Vec<SolutionSample> = time_grid(a.t0, a.t1, a.dt)?.iter().map(|&t| sol.eval(t)).collect();
    let report = residual_of_samples(&LinearOde::mathieu(gp), &samples)
        .without_points()
        .judged(SERIES_THRESHOLD);
    sc.residual_linf = json!(report.linf);
    sc.residual_l2 = json!(report.l2);
    let n = sol.truncation as i64;
    let coeffs: Vec<Value> = (-n..=n)
        .map(|k| json!({ "n": k, "re": sol.coeff(k).re, "im": sol.coeff(k).im }))
        .collect();
    sc.details = json!({
        "unreduced_mu": complex(ce.unreduced),
        "truncation": sol.truncation,
        "tail_ratio": sol.tail_ratio,
        "recurrence_residual": sol.recurrence_residual,
        "stability": classify_stability(ce.mu, STABILITY_TOL).as_str(),
        "multiplier": complex(multiplier(ce.mu)),
        "monodromy_mu": complex(mono.mu),
        "class_distance": distance,
        "verdict": report.verdict,
        "coefficients": coeffs,
    });
    let ok = report.verdict == Verdict::Pass && distance < 1e-6;
    Ok((Some(samples_csv(&samples)), if ok { EXIT_OK } else { EXIT_NUMERICAL }))
}

fn residual_job(a: &ResidualArgs, sc: &mut Sidecar) -> Outcome {
    let params = damped(&a.damped)?;
    let (c1, c2) = constants(&a.constants);
    let adj = adjudicate(&params, c1, c2, &grid_of(&a.grid)?)?;
    let outcomes = [(Variant::PaperLiteral, &adj.paper_literal), (Variant::Corrected, &adj.corrected)];
    sc.nu = json!({
        "paper-literal": complex(adj.paper_literal.nu),
        "corrected": complex(adj.corrected.nu),
    });
    sc.residual_linf = json!({
        "paper-literal": adj.paper_literal.report.linf,
        "corrected": adj.corrected.report.linf,
    });
    sc.residual_l2 = json!({
        "paper-literal": adj.paper_literal.report.l2,
        "corrected": adj.corrected.report.l2,
    });
    sc.passing_variant = adj.passing_variant.map(|v| v.to_string());
    for (v, o) in &outcomes {
        if o.overridden {
            sc.validity_flags.push(format!("{v}-index-overridden-to-{}", o.order));
        }
    }
    sc.details = json!({
        "threshold": PASS_THRESHOLD,
        "paper-literal": { "order": adj.paper_literal.order, "verdict": adj.paper_literal.report.verdict },
        "corrected": { "order": adj.corrected.order, "verdict": adj.corrected.report.verdict },
    });
    let rows = outcomes.iter().map(|(v, o)| {
        vec![
            v.to_string(),
            num(o.nu.re),
            num(o.nu.im),
            o.order.to_string(),
            o.overridden.to_string(),
            num(o.report.linf),
            num(o.report.l2),
            serde_json::to_value(o.report.verdict)
                .ok()
                .and_then(|v| v.as_str().map(str::to_string))
                .unwrap_or_default(),
        ]
    });
    let csv = csv_table(&["variant", "re_nu", "im_nu", "order", "overridden", "linf", "l2", "verdict"], rows);
    let code = if adj.passing_variant.is_some() { EXIT_OK } else { EXIT_NUMERICAL };
    Ok((Some(csv), code))
}

fn sweep(a: &SweepArgs, sc: &mut Sidecar) -> Outcome {
    let hs = linspace(a.h_min, a.h_max, a.h_n, "h")?;
    let ts = linspace(a.theta_min, a.theta_max, a.theta_n, "theta")?;
    let points = stability_sweep(&hs, &ts, a.trunc)?;
    let count = |s: &str| points.iter().filter(|p| p.stability.as_str() == s).count();
    sc.details = json!({
        "points": points.len(),
        "stable": count("stable"),
        "unstable": count("unstable"),
        "boundary": count("boundary"),
        "stability_tol": STABILITY_TOL,
    });
    let rows = points.iter().map(|p| {
        vec![num(p.h), num(p.theta), num(p.mu.re), num(p.mu.im), p.stability.as_str().to_string()]
    });
    Ok((Some(csv_table(&["h", "theta", "re_mu", "im_mu", "stability"], rows)), EXIT_OK))
}

fn transform(a: &TransformArgs, tol: f64, sc: &mut Sidecar) -> Outcome {
    let input = reduction_input(a)?;
    let r = reduce(&input)?;
    let map = r.variable_map;
    let (z0, z1) = match map.interior() {
        Some(span) => span,
        None => {
            let (u, v) = (map.inverse(0.5)?, map.inverse(9.5)?);
            (u.min(v), u.max(v))
        }
    };
    let traj = integrate(&LinearOde::mathieu(r.gp), c(1.0, 0.0), c(0.0, 0.0), (z0, z1), tol)?;
    let series = traj.sample(&uniform_grid(z0, z1, a.samples - 1))?;
    let mut pulled = pullback(&r, &series.values)?;
    if pulled.first().map(|s| s.t) > pulled.last().map(|s| s.t) {
        pulled.reverse();
    }
    let regular: Vec<SolutionSample> = pulled.iter().filter_map(|s| s.to_solution_sample()).collect();
    if regular.len() < pulled.len() {
        sc.validity_flags.push("singular-samples-skipped".into());
    }
    if map.domain().is_some() {
        sc.validity_flags.push("map-derivative-vanishes-at-domain-ends".into());
    }
    let report = residual_of_samples(&source_ode(&input)?, &regular)
        .without_points()
        .judged(PULLBACK_THRESHOLD);
    sc.residual_linf = json!(report.linf);
    sc.residual_l2 = json!(report.l2);
    sc.details = json!({
        "family": r.family.as_str(),
        "h": r.gp.h.re,
        "theta": r.gp.theta.re,
        "variable_map": map,
        "map": map.description(),
        "prefactor_rate": r.prefactor_rate,
        "time_scale": r.time_scale,
        "z_interval": [z0, z1],
        "threshold": PULLBACK_THRESHOLD,
        "verdict": report.verdict,
    });
    Ok((Some(samples_csv(&regular)), verdict_code(report.verdict)))
}

fn flux(a: &FluxArgs, tol: f64, sc: &mut Sidecar) -> Outcome {
    let fp = flux_params(a)?;
    let model = InducedFieldModel::new(&fp)?;
    sc.validity_flags = model.validity.flags();
    let series = simulate_full(&fp, a.y0, a.dy0, (0.0, a.t1), a.dt, tol)?;
    let field = field_from_displacement(&fp, &series);
    let keep: Vec<usize> = (0..series.len()).filter(|&i| series.grid[i] >= a.t_discard).collect();
    let grid: Vec<f64> = keep.iter().map(|&i| series.grid[i]).collect();
    let signal: Vec<f64> = keep.iter().map(|&i| field[i]).collect();
    let steady = particular_k0(&fp).ok();
    let (modulation, code) = match modulation_analysis(&grid, &signal, fp.big_omega, fp.base.omega) {
        Ok(r) => {
            let rel = if model.epsilon != 0.0 {
                json!((r.modulation_depth - model.epsilon).abs() / model.epsilon.abs())
            } else {
                Value::Null
            };
            (json!({ "report": r, "depth_relative_error": rel }), EXIT_OK)
        }
        Err(MathieuError::Span(msg)) => {
            sc.validity_flags.push("modulation-span-insufficient".into());
            (json!({ "error": msg }), EXIT_NUMERICAL)
        }
        Err(e) => return Err(e),
    };
    sc.details = json!({
        "model": {
            "epsilon": model.epsilon,
            "phi": model.phi,
            "alpha": model.alpha,
            "prefactor": model.prefactor,
            "in_regime": model.validity.in_regime(),
        },
        "steady_state": steady,
        "modulation": modulation,
        "field_convention": "E = -(B/c) dy/dt",
    });
    let mut header = SAMPLE_HEADER.to_vec();
    header.push("field");
    let rows = series.values.iter().zip(&field).map(|(s, e)| {
        let mut row = sample_row(s);
        row.push(num(*e));
        row
    });
    Ok((Some(csv_table(&header, rows)), code))
}

fn integrate_job(a: &IntegrateArgs, tol: f64, sc: &mut Sidecar) -> Outcome {
    let ode = integrate_equation(a)?;
    let grid = grid_of(&a.grid)?;
    let traj = integrate(&ode, c(a.y0_re, a.y0_im), c(a.dy0_re, a.dy0_im), (a.grid.t0, a.grid.t1), tol)?;
    let series = traj.sample(&grid)?;
    let threshold = 10.0 * tol;
    let report = residual_of_samples(&ode, &series.values).without_points().judged(threshold);
    sc.residual_linf = json!(report.linf);
    sc.residual_l2 = json!(report.l2);
    let (y1, dy1) = traj.end_state();
    sc.details = json!({
        "stats": traj.stats,
        "end_state": { "y": complex(y1), "dy": complex(dy1) },
        "threshold": threshold,
        "verdict": report.verdict,
    });
    Ok((Some(samples_csv(&series.values)), verdict_code(report.verdict)))
}
