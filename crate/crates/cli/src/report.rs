//! Text and JSON rendering. Both are byte-deterministic: checks appear in
//! declaration order, floats use the fixed 17-significant-digit format and
//! JSON object keys are sorted.

use cav_core::fmt_f64;
use serde_json::{json, Map, Value};

use crate::run::{CheckResult, Verdict};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub scenario: String,
    pub description: String,
    pub seed: u64,
    pub tol_scale: f64,
    pub results: Vec<CheckResult>,
    pub exit_code: i32,
}

impl Report {
    pub fn count(&self, v: Verdict) -> usize {
        self.results.iter().filter(|r| r.verdict == v).count()
    }
}

fn opt(v: Option<String>) -> Value {
    v.map_or(Value::Null, Value::String)
}

fn check_json(r: &CheckResult) -> Value {
    let details: Map<String, Value> = r
        .details
        .iter()
        .map(|(k, v)| (k.clone(), Value::String(v.clone())))
        .collect();
    json!({
        "name": r.name,
        "kind": r.kind,
        "verdict": r.verdict.as_str(),
        "gap": opt(r.gap.map(|g| g.render())),
        "tolerance": opt(r.tolerance.map(fmt_f64)),
        "witness": opt(r.witness.clone()),
        "details": details,
        "timing_ms": opt(r.timing_ms.map(fmt_f64)),
    })
}

pub fn render_json(rep: &Report) -> String {
    let v = json!({
        "scenario": rep.scenario,
        "version": VERSION,
        "seed": rep.seed.to_string(),
        "tol_scale": fmt_f64(rep.tol_scale),
        "checks": rep.results.iter().map(check_json).collect::<Vec<_>>(),
        "summary": {
            "checks": rep.results.len(),
            "pass": rep.count(Verdict::Pass),
            "fail": rep.count(Verdict::Fail),
            "vacuous": rep.count(Verdict::Vacuous),
        },
        "exit_code": rep.exit_code,
    });
    let mut s = serde_json::to_string_pretty(&v).expect("report serializes");
    s.push('\n');
    s
}

pub fn render_text(rep: &Report) -> String {
    let mut out = String::new();
    let mut line = |s: String| {
        out.push_str(&s);
        out.push('\n');
    };
    line(format!("scenario: {}", rep.scenario));
    if !rep.description.is_empty() {
        line(format!("description: {}", rep.description));
    }
    line(format!("version: {VERSION}"));
    line(format!("seed: {}", rep.seed));
    line(format!("tol-scale: {}", fmt_f64(rep.tol_scale)));
    for (i, r) in rep.results.iter().enumerate() {
        line(String::new());
        line(format!("[{}] {} ({}): {}", i + 1, r.name, r.kind, r.verdict.as_str().to_uppercase()));
        if let Some(g) = r.gap {
            line(format!("    gap: {}", g.render()));
        }
        if let Some(t) = r.tolerance {
            line(format!("    tolerance: {}", fmt_f64(t)));
        }
        if let Some(w) = &r.witness {
            line(format!("    witness: {w}"));
        }
        for (k, v) in &r.details {
            line(format!("    {k}: {v}"));
        }
        if let Some(t) = r.timing_ms {
            line(format!("    timing_ms: {}", fmt_f64(t)));
        }
    }
    line(String::new());
    line(format!(
        "summary: {} checks, {} pass, {} fail, {} vacuous",
        rep.results.len(),
        rep.count(Verdict::Pass),
        rep.count(Verdict::Fail),
        rep.count(Verdict::Vacuous)
    ));
    line(format!("exit code: {}", rep.exit_code));
    out
}
