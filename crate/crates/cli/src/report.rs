use serde_json::{json, Map, Value};
use torq_core::io::{cone_value, fan_value, map_value, sublattice_value, vector_value};
use torq_core::{Cone, Error, Fan, IntMatrix, IntVector, Sublattice};

/// Everything a verb produces: the JSON envelope parts and the human text.
pub struct Report {
    pub verb: &'static str,
    pub inputs: Map<String, Value>,
    pub result: Value,
    pub trace: Value,
    pub witnesses: Vec<Value>,
    pub human: String,
}

impl Report {
    pub fn new(verb: &'static str, inputs: Map<String, Value>) -> Report {
        Report {
            verb,
            inputs,
            result: Value::Null,
            trace: Value::Null,
            witnesses: Vec::new(),
            human: String::new(),
        }
    }

    pub fn line(&mut self, text: impl AsRef<str>) {
        self.human.push_str(text.as_ref());
        self.human.push('\n');
    }

    pub fn envelope(&self) -> Value {
        json!({
            "report": {
                "verb": self.verb,
                "inputs": self.inputs,
                "result": self.result,
                "trace": self.trace,
                "witnesses": self.witnesses,
            }
        })
    }
}

pub fn cone(c: &Cone) -> Value {
    cone_value(c, None)
}

pub fn cones(cs: &[Cone]) -> Value {
    Value::Array(cs.iter().map(cone).collect())
}

pub fn fan(f: &Fan) -> Value {
    fan_value(f, None)
}

pub fn lattice(l: &Sublattice) -> Value {
    sublattice_value(l, None)
}

pub fn matrix(m: &IntMatrix) -> Value {
    map_value(m)
}

pub fn point(v: &IntVector) -> Value {
    vector_value(v)
}

pub fn lattice_text(l: &Sublattice) -> String {
    if l.rank() == 0 {
        return "0".into();
    }
    let gens: Vec<String> = l.basis().iter().map(|b| b.to_string()).collect();
    format!("span{{{}}}", gens.join(", "))
}

pub fn matrix_text(m: &IntMatrix) -> String {
    let rows: Vec<String> = m.row_vectors().iter().map(|r| r.to_string()).collect();
    format!("[{}]", rows.join(", "))
}

/// Witness data carried by an error, as JSON.
pub fn error_details(e: &Error) -> Value {
    match e {
        Error::DimensionMismatch { expected, found } => json!({"expected": expected, "found": found}),
        Error::NotStrictlyConvex(c) => json!({"cone": cone(c)}),
        Error::FaceToFaceViolation { first, second } | Error::LinealityMismatch { first, second } => {
            json!({"first": cone(first), "second": cone(second)})
        }
        Error::NotContained { inner, outer } => json!({"inner": cone(inner), "outer": cone(outer)}),
        Error::ChartIndexOutOfRange { index, count } => json!({"index": index, "count": count}),
        Error::SymmetryViolation { i, j } => json!({"charts": [i, j]}),
        Error::TripleConditionViolation { i, j, k, cone: c } => {
            json!({"charts": [i, j, k], "cone": cone(c)})
        }
        Error::NotSubfan { i, j, cone: c } => json!({"charts": [i, j], "cone": cone(c)}),
        Error::Incompatible { cone: c } => json!({"cone": cone(c)}),
        Error::NotSaturated { cone: c, partner } => json!({"cone": cone(c), "partner": cone(partner)}),
        Error::OutsideSupport { point: p } => json!({"point": point(p)}),
        Error::IterationCapExceeded { cap } => json!({"cap": cap}),
        Error::Schema { path, line, .. } => json!({"path": path, "line": line}),
        Error::Validation { object, .. } => json!({"object": object}),
        Error::UnsaturatedSublattice
        | Error::EmptySystem
        | Error::PreconditionViolated(_)
        | Error::Internal(_) => json!({}),
    }
}

pub fn error_envelope(verb: &str, e: &Error) -> Value {
    json!({
        "report": {
            "verb": verb,
            "error": {
                "kind": e.kind(),
                "message": e.to_string(),
                "details": error_details(e),
            }
        }
    })
}
