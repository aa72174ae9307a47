use serde_json::{json, Value};

use super::{ChartMap, VField, VForm};
use crate::scalar::Scalar;

/// `{num, den}` with both parts in canonical polynomial text.
pub fn scalar_json(s: &Scalar) -> Value {
    json!({ "num": s.numer().to_string(), "den": s.denom().to_string() })
}

pub fn form_json(a: &VForm) -> Value {
    let chart = a.chart();
    let terms: Vec<Value> = a
        .terms()
        .map(|(k, c)| {
            let form: Vec<&str> = k
                .form
                .iter()
                .map(|&i| chart.var(i as usize).name())
                .collect();
            json!({ "form": form, "value": k.value, "coeff": scalar_json(c) })
        })
        .collect();
    json!({
        "chart": chart.name(),
        "form_degree": a.form_degree(),
        "value_degree": a.value_degree(),
        "terms": terms,
        "text": a.to_string(),
    })
}

pub fn field_json(x: &VField) -> Value {
    let comps: Vec<Value> = x
        .nonzero()
        .map(|(v, c)| json!({ "coord": v.name(), "coeff": scalar_json(c) }))
        .collect();
    json!({ "chart": x.chart().name(), "components": comps, "text": x.to_string() })
}

pub fn map_json(m: &ChartMap) -> Value {
    let assignment: Vec<Value> = m
        .assignment()
        .map(|(v, s)| json!({ "coord": v.name(), "expr": scalar_json(s), "text": s.to_string() }))
        .collect();
    json!({ "source": m.source().name(), "target": m.target().name(), "assignment": assignment })
}
