//! JSON and CSV renderings of a [`FlagReport`].
//!
//! Output is byte-stable: keys keep insertion order and every float is
//! written with 17 significant digits. Non-finite values become `null`.

use serde_json::{Map, Number, Value};

use crate::curvature::FlagReport;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// A float with 17 significant digits.
pub fn number(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    let text = format!("{x:.16e}");
    text.parse::<Number>().map_or(Value::Null, Value::Number)
}

fn numbers(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| number(x)).collect())
}

fn integers(xs: &[usize]) -> Value {
    Value::Array(xs.iter().map(|&x| Value::from(x)).collect())
}

pub fn report_value(report: &FlagReport) -> Value {
    let mut meta = Map::new();
    meta.insert("name".into(), Value::from(report.name.clone()));
    meta.insert("n".into(), Value::from(report.n));
    meta.insert("m".into(), Value::from(report.m));
    meta.insert("base_point".into(), numbers(&report.base_point));
    meta.insert("max_order".into(), Value::from(report.max_order));
    meta.insert("tolerance".into(), number(report.tolerance));
    meta.insert("tool_version".into(), Value::from(TOOL_VERSION));

    let levels: Vec<Value> = report
        .flag
        .levels
        .iter()
        .map(|l| {
            let mut o = Map::new();
            o.insert("order".into(), Value::from(l.order));
            o.insert("rank_k".into(), Value::from(l.rank_k));
            o.insert("bound".into(), Value::from(l.bound));
            o.insert("curvatures".into(), numbers(&l.curvatures));
            o.insert("sqrt_curvatures".into(), numbers(&l.sqrt_curvatures()));
            o.insert(
                "normal_vectors".into(),
                Value::Array(l.normal_vectors.iter().map(|v| numbers(v)).collect()),
            );
            o.insert("ill_conditioned".into(), Value::Bool(l.ill_conditioned));
            Value::Object(o)
        })
        .collect();

    let mut checks = Map::new();
    checks.insert("symmetry_residual".into(), number(report.symmetry_residual));
    checks.insert(
        "eigen_span_residuals".into(),
        numbers(&report.eigen_span_residuals),
    );
    if let Some(r) = report.frame_invariance_residual {
        checks.insert("frame_invariance_residual".into(), number(r));
    }
    checks.insert(
        "bound_satisfied".into(),
        Value::Bool(report.bound_satisfied()),
    );
    checks.insert(
        "weak_bounds_satisfied".into(),
        Value::Bool(report.weak_bounds_satisfied()),
    );
    checks.insert("psd_satisfied".into(), Value::Bool(report.psd_satisfied()));
    checks.insert("oracle_match".into(), Value::Bool(report.oracle_match()));

    let mut doc = Map::new();
    doc.insert("meta".into(), Value::Object(meta));
    doc.insert("levels".into(), Value::Array(levels));
    doc.insert("dims".into(), integers(&report.flag.dims));
    doc.insert("oracle_dims".into(), integers(&report.oracle_dims));
    doc.insert("checks".into(), Value::Object(checks));
    doc.insert(
        "stop_reason".into(),
        Value::from(report.flag.stop_reason.as_str()),
    );
    Value::Object(doc)
}

/// Pretty JSON with a trailing newline.
pub fn render_json(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("values always serialize");
    s.push('\n');
    s
}

fn csv_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        String::new()
    }
}

/// One row per `(order, eigenvalue)`. A level of rank zero still gets a
/// row, with the eigenvalue columns left empty.
pub fn render_csv(report: &FlagReport) -> Result<String, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "name",
        "order",
        "rank_k",
        "bound",
        "index",
        "eigenvalue",
        "sqrt_eigenvalue",
        "ill_conditioned",
    ])?;
    for l in &report.flag.levels {
        let fixed = [
            report.name.clone(),
            l.order.to_string(),
            l.rank_k.to_string(),
            l.bound.to_string(),
        ];
        if l.curvatures.is_empty() {
            w.write_record(fixed.iter().cloned().chain([
                String::new(),
                String::new(),
                String::new(),
                l.ill_conditioned.to_string(),
            ]))?;
        }
        for (i, &lambda) in l.curvatures.iter().enumerate() {
            w.write_record(fixed.iter().cloned().chain([
                (i + 1).to_string(),
                csv_float(lambda),
                csv_float(lambda.sqrt()),
                l.ill_conditioned.to_string(),
            ]))?;
        }
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
