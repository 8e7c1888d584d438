use std::process::Command as Process;

use mathieu_cli::{execute, parse_with_env, Command, JobSpec, OutputFormat, ParseFailure, EXIT_USAGE};

fn argv(s: &str) -> Vec<String> {
    std::iter::once("mathieu-kit").chain(s.split_whitespace()).map(String::from).collect()
}

fn job(s: &str) -> JobSpec {
    parse_with_env(argv(s), None).unwrap_or_else(|e| panic!("{s}: {e:?}"))
}

fn usage_error(s: &str) -> String {
    match parse_with_env(argv(s), None) {
        Err(ParseFailure::Usage(msg)) => msg,
        other => panic!("{s}: expected usage error, got {other:?}"),
    }
}

fn kit(args: &[&str]) -> std::process::Output {
    Process::new(env!("CARGO_BIN_EXE_mathieu-kit"))
        .args(args)
        .env_remove("MATHIEU_KIT_TOL")
        .output()
        .unwrap()
}

#[test]
fn parses_documented_invocations() {
    let j = job("solve --m 1 --eta 0 --k0 1 --k 1 --omega 2 --variant corrected --t0 0 --t1 10 --dt 0.01");
    assert!(matches!(j.command, Command::Solve(_)));
    assert_eq!(j.output, OutputFormat::Csv);
    assert_eq!(j.tol, 1e-10);
    let j = job("floquet --h 1 --theta 0.5 --trunc 25");
    assert!(matches!(j.command, Command::Floquet(_)));
}

#[test]
fn rejects_bad_input_before_execution() {
    assert!(usage_error("solve --omega 0 --k0 1 --k 1").contains("omega"));
    usage_error("solve --k0 1 --k 1 --omega 2 --frobnicate 3");
    usage_error("floquet --h 1 --theta 0.5 --trunc 3");
    usage_error("sweep --h-min 2 --h-max 1 --h-n 3 --theta-min 0 --theta-max 1 --theta-n 2");
    usage_error("transform --family eq15 --a 1 --b 1");
    usage_error("transform --family eq15 --a 1 --b 1 --lambda 0");
    usage_error("integrate --equation mathieu --h 1");
    usage_error("flux --k0 0 --k 0.01 --omega 0.01 --big-omega 1 --t1 10");
    usage_error("solve --k0 1 --k 1 --omega 2 --tol 1e-20");
}

#[test]
fn tolerance_comes_from_flag_then_environment() {
    let j = parse_with_env(argv("floquet --h 1 --theta 0.5"), Some("1e-8")).unwrap();
    assert_eq!(j.tol, 1e-8);
    let j = parse_with_env(argv("floquet --h 1 --theta 0.5 --tol 1e-9"), Some("1e-8")).unwrap();
    assert_eq!(j.tol, 1e-9);
    assert!(matches!(parse_with_env(argv("floquet --h 1 --theta 0.5"), Some("abc")), Err(ParseFailure::Usage(_))));
    assert!(matches!(parse_with_env(argv("floquet --h 1 --theta 0.5"), Some("1")), Err(ParseFailure::Usage(_))));
}

#[test]
fn sidecar_carries_the_schema_keys_and_echoes_flags() {
    let a = execute(&job("solve --k0 1 --k 1 --omega 2 --t1 5 --dt 0.5"));
    let v: serde_json::Value = serde_json::from_str(&a.sidecar_json()).unwrap();
    for key in ["command", "params", "variant", "nu", "mu", "residual_linf", "residual_l2", "passing_variant", "validity_flags"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["command"], "solve");
    assert_eq!(v["params"]["damped"]["omega"], 2.0);
    assert_eq!(v["params"]["grid"]["dt"], 0.5);
    assert_eq!(v["variant"], "corrected");
}

#[test]
fn csv_headers_follow_the_format_contract() {
    let a = execute(&job("solve --k0 1 --k 1 --omega 2 --t1 1 --dt 0.5"));
    let text = String::from_utf8(a.csv.unwrap()).unwrap();
    let mut lines = text.split("\r\n");
    assert_eq!(lines.next(), Some("t,re_y,im_y,re_dy,im_dy"));
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(first.len(), 5);
    assert_eq!(first[0], "0.0000000000000000e0");
    assert!(first.iter().all(|f| f.parse::<f64>().is_ok()));

    let a = execute(&job("sweep --h-min 0 --h-max 1 --h-n 2 --theta-min 0 --theta-max 0.5 --theta-n 2"));
    let text = String::from_utf8(a.csv.unwrap()).unwrap();
    let rows: Vec<&str> = text.trim_end().split("\r\n").collect();
    assert_eq!(rows[0], "h,theta,re_mu,im_mu,stability");
    assert_eq!(rows.len(), 5);
    let coords: Vec<(f64, f64)> = rows[1..]
        .iter()
        .map(|r| {
            let f: Vec<&str> = r.split(',').collect();
            (f[0].parse().unwrap(), f[1].parse().unwrap())
        })
        .collect();
    let mut sorted = coords.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    assert_eq!(coords, sorted);
}

#[test]
fn residual_job_reports_both_variants() {
    let a = execute(&job("residual --m 1 --eta 0 --k0 1 --k 0.3 --omega 2 --output json"));
    let v = &a.sidecar;
    assert!(v.residual_linf["paper-literal"].as_f64().unwrap() > 1e-3);
    assert!(v.residual_linf["corrected"].as_f64().unwrap() < 1e-8);
    assert_eq!(v.passing_variant.as_deref(), Some("corrected"));
    assert_eq!(a.exit_code, 0);
}

#[test]
fn literal_solve_is_a_numerical_failure_with_report() {
    let a = execute(&job("solve --k0 1 --k 0.3 --omega 2 --variant paper-literal --allow-override --t1 5"));
    assert_eq!(a.exit_code, 1);
    assert!(a.csv.is_some());
    assert!(a.sidecar.residual_linf.as_f64().unwrap() > 1e-8);
    assert!(a.sidecar.validity_flags.iter().any(|f| f.starts_with("index-overridden")));
}

#[test]
fn transform_verifies_the_pullback() {
    let a = execute(&job("transform --family eq11 --a 1 --b 2 --output json"));
    assert_eq!(a.exit_code, 0);
    assert_eq!(a.sidecar.details["h"], 3.0);
    assert_eq!(a.sidecar.details["theta"], -0.5);
    let a = execute(&job("transform --family damped --m 1 --eta 2 --k0 4 --k 0 --omega 2"));
    assert_eq!(a.sidecar.details["h"], 3.0);
    assert_eq!(a.sidecar.details["prefactor_rate"], 1.0);
}

#[test]
fn flux_span_too_short_is_flagged() {
    let a = execute(&job("flux --m 0.01 --eta 0.01 --k0 1 --k 0.01 --omega 0.01 --big-omega 1 --t1 200"));
    assert_eq!(a.exit_code, 1);
    assert!(a.sidecar.validity_flags.contains(&"modulation-span-insufficient".to_string()));
    let a = execute(&job("flux --m 1 --eta 0.1 --k0 1 --k 0.5 --omega 0.5 --big-omega 1 --t1 200"));
    assert!(a.sidecar.validity_flags.len() >= 2);
}

#[test]
fn binary_exit_codes() {
    assert_eq!(kit(&["solve", "--omega", "0", "--k0", "1", "--k", "1"]).status.code(), Some(i32::from(EXIT_USAGE)));
    let out = kit(&["solve", "--omega", "0", "--k0", "1", "--k", "1"]);
    assert!(!out.stderr.is_empty() && out.stdout.is_empty());
    assert_eq!(kit(&["floquet", "--h", "1", "--theta", "0.5"]).status.code(), Some(0));
    assert_eq!(kit(&["--help"]).status.code(), Some(0));
    assert_eq!(kit(&[]).status.code(), Some(0));
    let out = Process::new(env!("CARGO_BIN_EXE_mathieu-kit"))
        .args(["floquet", "--h", "1", "--theta", "0.5"])
        .env("MATHIEU_KIT_TOL", "5")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sidecar_file_lands_next_to_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("chart.csv");
    let status = kit(&["sweep", "--h-min", "0", "--h-max", "1", "--h-n", "2", "--theta-min", "0", "--theta-max", "1", "--theta-n", "2", "--out", out.to_str().unwrap()]);
    assert_eq!(status.status.code(), Some(0));
    assert!(out.exists());
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.path().join("chart.json")).unwrap()).unwrap();
    assert_eq!(v["command"], "sweep");
}

#[test]
fn in_process_execution_is_deterministic() {
    let j = job("integrate --equation split --m 1 --eta 0.2 --k0 1.5 --k 0.7 --omega 1.3 --t1 8");
    let (a, b) = (execute(&j), execute(&j));
    assert_eq!(a.csv, b.csv);
    assert_eq!(a.sidecar_json(), b.sidecar_json());
}
