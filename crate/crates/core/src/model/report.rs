use std::fmt::Write as _;

use serde_json::{json, Map, Value};

use crate::algebroid::ALT_SIGN;
use crate::berezin::MEASURE_ORDER;
use crate::graded::{fmt_monomial, fmt_rational, GradedPolynomial};

use super::checks::Report;

pub const ENGINE: &str = concat!("qpcalc ", env!("CARGO_PKG_VERSION"));

/// Sign and normalization conventions the verdicts depend on.
pub fn conventions() -> Vec<(&'static str, String)> {
    vec![
        ("basic_curvature_alt_sign", ALT_SIGN.to_string()),
        ("berezin_measure", MEASURE_ORDER.to_string()),
        ("bianchi_slot", "(E nabla_e Phi)(v) = E nabla_e(Phi v) - Phi(E nabla_e v)".into()),
        ("bv_laplacian", "sum (-1)^|Phi| d_Phi d_Phi*".into()),
        ("canonical_bracket", "{x^i, xi_j} = +delta^i_j".into()),
        ("courant_differential", "D f = -{Theta, f}".into()),
        ("courant_e_connection", "E nabla_e e' = nabla_{rho(e)} e'".into()),
        ("master_normalization", "1/2{Theta,Theta} = 1/6 J^{ijk} xi_i xi_j xi_k".into()),
        ("pre_courant_h", "H = dC".into()),
        ("schouten", "[P,Q]_S = {Q,P}".into()),
        ("twisted_anchor", "+pi#".into()),
    ]
}

fn terms(p: &GradedPolynomial) -> Value {
    Value::Array(
        p.terms()
            .map(|(m, c)| json!({ "coefficient": fmt_rational(c), "monomial": fmt_monomial(m, p.chart()) }))
            .collect(),
    )
}

/// Structured report: sorted keys, rationals as strings, trailing newline.
pub fn emit_json(report: &Report) -> String {
    let conv: Map<String, Value> = conventions().into_iter().map(|(k, v)| (k.to_string(), Value::String(v))).collect();
    let checks: Vec<Value> = report
        .checks
        .iter()
        .map(|c| {
            let failing = c.report.failing_parts().next();
            json!({
                "name": c.name,
                "verdict": c.report.verdict().as_str(),
                "obstruction": failing.map(|p| terms(&p.residual)).unwrap_or_else(|| json!([])),
                "failing_part": failing.map(|p| p.label.clone()),
                "paper_anchor": c.anchor,
            })
        })
        .collect();
    let v = json!({
        "model": report.model,
        "model_sha256": report.model_sha256,
        "engine": ENGINE,
        "seed": report.seed,
        "conventions": conv,
        "checks": checks,
    });
    let mut s = serde_json::to_string_pretty(&v).expect("json values serialize");
    s.push('\n');
    s
}

/// Line-oriented report: one verdict line per check, failing residuals and
/// notes indented below.
pub fn emit_text(report: &Report) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "model {} ({})", report.model, ENGINE);
    let _ = writeln!(out, "sha256 {}", report.model_sha256);
    let _ = writeln!(out, "seed {}", report.seed);
    for c in &report.checks {
        out.push_str(&c.report.to_string());
    }
    let passed = report.checks.iter().filter(|c| c.report.passed()).count();
    let _ = writeln!(out, "{passed}/{} checks passed", report.checks.len());
    out
}
