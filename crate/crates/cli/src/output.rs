use serde::Serialize;
use serde_json::{json, Value};

use mathieu_core::{ComplexScalar, SolutionSample};

/// JSON sidecar. The first nine fields are always present (null when not
/// applicable).
#[derive(Debug, Clone, Serialize)]
pub struct Sidecar {
    pub command: String,
    pub params: Value,
    pub variant: Option<String>,
    pub nu: Value,
    pub mu: Value,
    pub residual_linf: Value,
    pub residual_l2: Value,
    pub passing_variant: Option<String>,
    pub validity_flags: Vec<String>,
    pub tol: f64,
    pub exit_code: u8,
    pub error: Option<String>,
    pub details: Value,
}

impl Sidecar {
    pub fn new(command: &str, params: Value, tol: f64) -> Self {
        Self {
            command: command.to_string(),
            params,
            variant: None,
            nu: Value::Null,
            mu: Value::Null,
            residual_linf: Value::Null,
            residual_l2: Value::Null,
            passing_variant: None,
            validity_flags: Vec::new(),
            tol,
            exit_code: 0,
            error: None,
            details: Value::Null,
        }
    }
}

/// Result of executing a job.
#[derive(Debug, Clone)]
pub struct Artifact {
    pub csv: Option<Vec<u8>>,
    pub sidecar: Sidecar,
    pub exit_code: u8,
    pub diagnostic: Option<String>,
}

impl Artifact {
    pub fn sidecar_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.sidecar).expect("sidecar serializes");
        s.push('\n');
        s
    }
}

pub fn complex(z: ComplexScalar) -> Value {
    json!({ "re": z.re, "im": z.im })
}

/// Fixed 17-significant-digit rendering.
pub fn num(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.16e}")
}

pub fn csv_table<I>(header: &[&str], rows: I) -> Vec<u8>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::CRLF)
        .from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

pub const SAMPLE_HEADER: [&str; 5] = ["t", "re_y", "im_y", "re_dy", "im_dy"];

pub fn sample_row(s: &SolutionSample) -> Vec<String> {
    vec![num(s.t), num(s.y.re), num(s.y.im), num(s.dy.re), num(s.dy.im)]
}

pub fn samples_csv(samples: &[SolutionSample]) -> Vec<u8> {
    csv_table(&SAMPLE_HEADER, samples.iter().map(sample_row))
}
