//! The `.torq.json` document format and the bundled example corpus.
//!
//! A document has a mandatory `version`, a default `lattice_rank` and a map of
//! named `objects`. Vector entries are decimal strings. Objects may refer to
//! cones by name wherever a cone is expected.

use std::collections::BTreeMap;
use std::str::FromStr;

use num_bigint::BigInt;
use serde_json::{json, Map, Value};

use crate::cone::Cone;
use crate::error::{Error, Result};
use crate::fan::{
    fan_from_max_cones, maximal_elements, system_from_charts, system_from_common_faces,
    AffineSystemOfFans, Fan,
};
use crate::lattice::Sublattice;
use crate::linalg::{IntMatrix, IntVector};

pub const FORMAT_VERSION: &str = "1";

pub const CORPUS: &[(&str, &str)] = &[
    (
        "example_c2_projection",
        include_str!("../../../corpus/example_c2_projection.torq.json"),
    ),
    (
        "example_section7",
        include_str!("../../../corpus/example_section7.torq.json"),
    ),
    (
        "example_gap_merge",
        include_str!("../../../corpus/example_gap_merge.torq.json"),
    ),
    (
        "example_diagonal_collapse",
        include_str!("../../../corpus/example_diagonal_collapse.torq.json"),
    ),
];

pub fn corpus(name: &str) -> Option<&'static str> {
    let name = name.trim_end_matches(".torq.json");
    CORPUS.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Object {
    Cone(Cone),
    Fan(Fan),
    System(AffineSystemOfFans),
    Sublattice(Sublattice),
    Map(IntMatrix),
}

impl Object {
    pub fn kind(&self) -> &'static str {
        match self {
            Object::Cone(_) => "cone",
            Object::Fan(_) => "fan",
            Object::System(_) => "system",
            Object::Sublattice(_) => "sublattice",
            Object::Map(_) => "map",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Document {
    pub version: String,
    pub lattice_rank: usize,
    pub objects: BTreeMap<String, Object>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ParseMode {
    #[default]
    Strict,
    Lenient,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Parsed {
    pub document: Document,
    pub warnings: Vec<String>,
}

impl Document {
    pub fn new(lattice_rank: usize) -> Document {
        Document {
            version: FORMAT_VERSION.to_string(),
            lattice_rank,
            objects: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, name: impl Into<String>, object: Object) {
        self.objects.insert(name.into(), object);
    }

    fn lookup(&self, name: &str, kind: &str) -> Result<&Object> {
        self.objects.get(name).ok_or_else(|| Error::Validation {
            object: name.to_string(),
            message: format!("no {kind} named {name:?}"),
        })
    }

    fn wrong_kind(name: &str, kind: &str, found: &Object) -> Error {
        Error::Validation {
            object: name.to_string(),
            message: format!("expected a {kind}, found a {}", found.kind()),
        }
    }

    pub fn cone(&self, name: &str) -> Result<&Cone> {
        match self.lookup(name, "cone")? {
            Object::Cone(c) => Ok(c),
            other => Err(Self::wrong_kind(name, "cone", other)),
        }
    }

    pub fn fan(&self, name: &str) -> Result<&Fan> {
        match self.lookup(name, "fan")? {
            Object::Fan(f) => Ok(f),
            other => Err(Self::wrong_kind(name, "fan", other)),
        }
    }

    /// A system, or a fan viewed as one.
    pub fn system(&self, name: &str) -> Result<AffineSystemOfFans> {
        match self.lookup(name, "system")? {
            Object::System(s) => Ok(s.clone()),
            Object::Fan(f) => Ok(AffineSystemOfFans::from_fan(f)),
            other => Err(Self::wrong_kind(name, "system", other)),
        }
    }

    pub fn sublattice(&self, name: &str) -> Result<&Sublattice> {
        match self.lookup(name, "sublattice")? {
            Object::Sublattice(l) => Ok(l),
            other => Err(Self::wrong_kind(name, "sublattice", other)),
        }
    }

    pub fn map(&self, name: &str) -> Result<&IntMatrix> {
        match self.lookup(name, "map")? {
            Object::Map(m) => Ok(m),
            other => Err(Self::wrong_kind(name, "map", other)),
        }
    }

    /// Names of all objects of the given kind, sorted.
    pub fn names_of_kind(&self, kind: &str) -> Vec<&str> {
        self.objects
            .iter()
            .filter(|(_, o)| o.kind() == kind)
            .map(|(n, _)| n.as_str())
            .collect()
    }
}

struct Parser<'a> {
    text: &'a str,
    mode: ParseMode,
    warnings: Vec<String>,
    raw: &'a Map<String, Value>,
    lattice_rank: usize,
    done: BTreeMap<String, Object>,
    in_progress: Vec<String>,
}

fn line_of(text: &str, key: &str) -> Option<usize> {
    let needle = format!("\"{key}\"");
    text.lines().position(|l| l.contains(&needle)).map(|i| i + 1)
}

impl<'a> Parser<'a> {
    fn schema(&self, path: &str, message: impl Into<String>) -> Error {
        let key = path.rsplit('.').next().unwrap_or(path);
        let key = key.split('[').next().unwrap_or(key);
        Error::Schema {
            path: path.to_string(),
            line: line_of(self.text, key),
            message: message.into(),
        }
    }

    fn check_fields(&mut self, path: &str, obj: &Map<String, Value>, allowed: &[&str]) -> Result<()> {
        for key in obj.keys() {
            if !allowed.contains(&key.as_str()) {
                match self.mode {
                    ParseMode::Strict => {
                        return Err(self.schema(&format!("{path}.{key}"), "unknown field"))
                    }
                    ParseMode::Lenient => self.warnings.push(format!("{path}.{key}: unknown field ignored")),
                }
            }
        }
        Ok(())
    }

    fn usize_field(&self, path: &str, v: &Value) -> Result<usize> {
        match v {
            Value::Number(n) => n
                .as_u64()
                .map(|x| x as usize)
                .ok_or_else(|| self.schema(path, "expected a non-negative integer")),
            Value::String(s) => s
                .parse()
                .map_err(|_| self.schema(path, "expected a non-negative integer")),
            _ => Err(self.schema(path, "expected a non-negative integer")),
        }
    }

    fn integer(&mut self, path: &str, v: &Value) -> Result<BigInt> {
        match v {
            Value::String(s) => {
                let digits = s.strip_prefix('-').unwrap_or(s);
                if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                    return Err(self.schema(path, format!("{s:?} is not a decimal integer")));
                }
                BigInt::from_str(s).map_err(|e| self.schema(path, e.to_string()))
            }
            Value::Number(n) if self.mode == ParseMode::Lenient => {
                if let Some(i) = n.as_i64() {
                    self.warnings.push(format!("{path}: number accepted in place of a string"));
                    Ok(BigInt::from(i))
                } else if let Some(u) = n.as_u64() {
                    self.warnings.push(format!("{path}: number accepted in place of a string"));
                    Ok(BigInt::from(u))
                } else {
                    Err(self.schema(path, "non-integral number"))
                }
            }
            Value::Number(_) => Err(self.schema(path, "integers must be written as strings")),
            _ => Err(self.schema(path, "expected an integer string")),
        }
    }

    fn vector(&mut self, path: &str, v: &Value, rank: usize) -> Result<IntVector> {
        let items = v
            .as_array()
            .ok_or_else(|| self.schema(path, "expected an array"))?;
        if items.len() != rank {
            return Err(self.schema(
                path,
                format!("vector has {} entries, declared rank is {rank}", items.len()),
            ));
        }
        let entries = items
            .iter()
            .enumerate()
            .map(|(i, x)| self.integer(&format!("{path}[{i}]"), x))
            .collect::<Result<Vec<_>>>()?;
        Ok(IntVector::new(entries))
    }

    fn vectors(&mut self, path: &str, v: &Value, rank: usize) -> Result<Vec<IntVector>> {
        let items = v
            .as_array()
            .ok_or_else(|| self.schema(path, "expected an array of vectors"))?;
        items
            .iter()
            .enumerate()
            .map(|(i, x)| self.vector(&format!("{path}[{i}]"), x, rank))
            .collect()
    }

    fn rank_of(&self, path: &str, obj: &Map<String, Value>) -> Result<usize> {
        match obj.get("rank") {
            Some(v) => self.usize_field(&format!("{path}.rank"), v),
            None => Ok(self.lattice_rank),
        }
    }

    fn validation(name: &str, e: Error) -> Error {
        match e {
            Error::Schema { .. } | Error::Validation { .. } => e,
            other => Error::Validation {
                object: name.to_string(),
                message: format!("{}: {other}", other.kind()),
            },
        }
    }

    /// A cone given by name or inline.
    fn cone_ref(&mut self, owner: &str, path: &str, v: &Value, rank: usize) -> Result<Cone> {
        match v {
            Value::String(name) => match self.resolve(name)? {
                Object::Cone(c) => Ok(c),
                other => Err(self.schema(
                    path,
                    format!("{name:?} is a {}, expected a cone", other.kind()),
                )),
            },
            Value::Object(obj) => self
                .cone_body(path, obj, rank)
                .map_err(|e| Self::validation(owner, e)),
            _ => Err(self.schema(path, "expected a cone name or an inline cone")),
        }
    }

    fn cone_refs(&mut self, owner: &str, path: &str, v: &Value, rank: usize) -> Result<Vec<Cone>> {
        let items = v
            .as_array()
            .ok_or_else(|| self.schema(path, "expected an array of cones"))?;
        items
            .iter()
            .enumerate()
            .map(|(i, x)| self.cone_ref(owner, &format!("{path}[{i}]"), x, rank))
            .collect()
    }

    fn cone_body(&mut self, path: &str, obj: &Map<String, Value>, default_rank: usize) -> Result<Cone> {
        self.check_fields(path, obj, &["type", "rank", "generators"])?;
        if let Some(t) = obj.get("type") {
            if t != "cone" {
                return Err(self.schema(&format!("{path}.type"), "inline object must be a cone"));
            }
        }
        let rank = match obj.get("rank") {
            Some(v) => self.usize_field(&format!("{path}.rank"), v)?,
            None => default_rank,
        };
        let gens = match obj.get("generators") {
            Some(v) => self.vectors(&format!("{path}.generators"), v, rank)?,
            None => return Err(self.schema(path, "missing field \"generators\"")),
        };
        Cone::from_generators(rank, &gens)
    }

    fn resolve(&mut self, name: &str) -> Result<Object> {
        if let Some(o) = self.done.get(name) {
            return Ok(o.clone());
        }
        if self.in_progress.iter().any(|n| n == name) {
            return Err(self.schema(&format!("objects.{name}"), "circular reference"));
        }
        let raw = self.raw;
        let Some(value) = raw.get(name) else {
            return Err(Error::Validation {
                object: name.to_string(),
                message: "reference to an undefined object".into(),
            });
        };
        self.in_progress.push(name.to_string());
        let object = self.object(name, value);
        self.in_progress.pop();
        let object = object?;
        self.done.insert(name.to_string(), object.clone());
        Ok(object)
    }

    fn object(&mut self, name: &str, value: &Value) -> Result<Object> {
        let path = format!("objects.{name}");
        let obj = value
            .as_object()
            .ok_or_else(|| self.schema(&path, "expected an object"))?;
        let kind = obj
            .get("type")
            .and_then(Value::as_str)
            .ok_or_else(|| self.schema(&format!("{path}.type"), "missing or non-string type"))?;
        let wrap = |e: Error| Self::validation(name, e);
        match kind {
            "cone" => {
                let rank = self.lattice_rank;
                self.cone_body(&path, obj, rank).map(Object::Cone).map_err(wrap)
            }
            "fan" => {
                self.check_fields(&path, obj, &["type", "rank", "cones", "quasi"])?;
                let rank = self.rank_of(&path, obj)?;
                let quasi = match obj.get("quasi") {
                    None => false,
                    Some(Value::Bool(b)) => *b,
                    Some(_) => return Err(self.schema(&format!("{path}.quasi"), "expected a boolean")),
                };
                let cones = match obj.get("cones") {
                    Some(v) => self.cone_refs(name, &format!("{path}.cones"), v, rank)?,
                    None => return Err(self.schema(&path, "missing field \"cones\"")),
                };
                fan_from_max_cones(rank, &cones, quasi)
                    .map(Object::Fan)
                    .map_err(wrap)
            }
            "system" => {
                self.check_fields(&path, obj, &["type", "rank", "charts", "glueings"])?;
                let rank = self.rank_of(&path, obj)?;
                let charts = match obj.get("charts") {
                    Some(v) => self.cone_refs(name, &format!("{path}.charts"), v, rank)?,
                    None => return Err(self.schema(&path, "missing field \"charts\"")),
                };
                match obj.get("glueings") {
                    None => system_from_charts(rank, charts, &[]),
                    Some(Value::String(s)) if s == "common_faces" => {
                        system_from_common_faces(rank, charts)
                    }
                    Some(Value::Array(items)) => {
                        let mut glueings = Vec::new();
                        for (k, item) in items.iter().enumerate() {
                            let gpath = format!("{path}.glueings[{k}]");
                            let g = item
                                .as_object()
                                .ok_or_else(|| self.schema(&gpath, "expected an object"))?;
                            self.check_fields(&gpath, g, &["charts", "cones"])?;
                            let pair = g
                                .get("charts")
                                .and_then(Value::as_array)
                                .filter(|a| a.len() == 2)
                                .ok_or_else(|| {
                                    self.schema(&format!("{gpath}.charts"), "expected two chart indices")
                                })?;
                            let i = self.usize_field(&format!("{gpath}.charts[0]"), &pair[0])?;
                            let j = self.usize_field(&format!("{gpath}.charts[1]"), &pair[1])?;
                            let cones = match g.get("cones") {
                                Some(v) => self.cone_refs(name, &format!("{gpath}.cones"), v, rank)?,
                                None => Vec::new(),
                            };
                            glueings.push(((i, j), cones));
                        }
                        system_from_charts(rank, charts, &glueings)
                    }
                    Some(_) => {
                        return Err(self.schema(
                            &format!("{path}.glueings"),
                            "expected a list of glueings or \"common_faces\"",
                        ))
                    }
                }
                .map(Object::System)
                .map_err(wrap)
            }
            "sublattice" => {
                self.check_fields(&path, obj, &["type", "rank", "generators"])?;
                let rank = self.rank_of(&path, obj)?;
                let gens = match obj.get("generators") {
                    Some(v) => self.vectors(&format!("{path}.generators"), v, rank)?,
                    None => return Err(self.schema(&path, "missing field \"generators\"")),
                };
                Sublattice::new(rank, &gens).map(Object::Sublattice).map_err(wrap)
            }
            "map" => {
                self.check_fields(&path, obj, &["type", "rows", "cols", "entries"])?;
                let entries = obj
                    .get("entries")
                    .and_then(Value::as_array)
                    .ok_or_else(|| self.schema(&format!("{path}.entries"), "expected an array of rows"))?;
                let rows = match obj.get("rows") {
                    Some(v) => self.usize_field(&format!("{path}.rows"), v)?,
                    None => entries.len(),
                };
                let cols = match obj.get("cols") {
                    Some(v) => self.usize_field(&format!("{path}.cols"), v)?,
                    None => match entries.first().and_then(Value::as_array) {
                        Some(r) => r.len(),
                        None => self.lattice_rank,
                    },
                };
                if entries.len() != rows {
                    return Err(self.schema(
                        &format!("{path}.entries"),
                        format!("{} rows given, {rows} declared", entries.len()),
                    ));
                }
                let value = Value::Array(entries.clone());
                let row_vecs = self.vectors(&format!("{path}.entries"), &value, cols)?;
                IntMatrix::from_rows(cols, &row_vecs).map(Object::Map).map_err(wrap)
            }
            other => Err(self.schema(&format!("{path}.type"), format!("unknown object type {other:?}"))),
        }
    }
}

pub fn parse(text: &str) -> Result<Document> {
    parse_with(text, ParseMode::Strict).map(|p| p.document)
}

/// Parses and validates a document. Every object is rebuilt through the
/// validating constructors, so all invariants are re-checked on load.
pub fn parse_with(text: &str, mode: ParseMode) -> Result<Parsed> {
    let root: Value = serde_json::from_str(text).map_err(|e| Error::Schema {
        path: String::new(),
        line: Some(e.line()),
        message: e.to_string(),
    })?;
    let schema = |path: &str, message: &str| Error::Schema {
        path: path.to_string(),
        line: line_of(text, path),
        message: message.to_string(),
    };
    let top = root
        .as_object()
        .ok_or_else(|| schema("", "document must be an object"))?;
    let version = top
        .get("version")
        .and_then(Value::as_str)
        .ok_or_else(|| schema("version", "missing or non-string version"))?;
    if version != FORMAT_VERSION {
        return Err(schema("version", &format!("unsupported version {version:?}")));
    }
    let empty = Map::new();
    let raw = match top.get("objects") {
        Some(Value::Object(m)) => m,
        Some(_) => return Err(schema("objects", "expected an object")),
        None => &empty,
    };
    let mut parser = Parser {
        text,
        mode,
        warnings: Vec::new(),
        raw,
        lattice_rank: 0,
        done: BTreeMap::new(),
        in_progress: Vec::new(),
    };
    parser.check_fields("", top, &["version", "lattice_rank", "objects"])?;
    parser.lattice_rank = match top.get("lattice_rank") {
        Some(v) => parser.usize_field("lattice_rank", v)?,
        None => return Err(schema("lattice_rank", "missing field \"lattice_rank\"")),
    };
    for name in raw.keys() {
        parser.resolve(name)?;
    }
    Ok(Parsed {
        document: Document {
            version: version.to_string(),
            lattice_rank: parser.lattice_rank,
            objects: parser.done,
        },
        warnings: parser.warnings,
    })
}

pub fn vector_value(v: &IntVector) -> Value {
    Value::Array(v.entries().iter().map(|x| Value::String(x.to_string())).collect())
}

pub fn vectors_value(vs: &[IntVector]) -> Value {
    Value::Array(vs.iter().map(vector_value).collect())
}

fn with_rank(mut obj: Map<String, Value>, rank: usize, default_rank: Option<usize>) -> Value {
    if default_rank != Some(rank) {
        obj.insert("rank".into(), json!(rank));
    }
    Value::Object(obj)
}

/// Canonical cone form: rays followed by the lineality basis and its
/// negatives. The `rank` field is omitted when it equals `default_rank`.
pub fn cone_value(c: &Cone, default_rank: Option<usize>) -> Value {
    let mut obj = Map::new();
    obj.insert("type".into(), json!("cone"));
    obj.insert("generators".into(), vectors_value(&c.generators()));
    with_rank(obj, c.ambient_rank(), default_rank)
}

fn inline_cone(c: &Cone, default_rank: Option<usize>) -> Value {
    let mut v = cone_value(c, default_rank);
    if let Value::Object(m) = &mut v {
        m.remove("type");
    }
    v
}

pub fn fan_value(f: &Fan, default_rank: Option<usize>) -> Value {
    let mut obj = Map::new();
    obj.insert("type".into(), json!("fan"));
    let rank = Some(f.ambient_rank());
    obj.insert(
        "cones".into(),
        Value::Array(f.max_cones().iter().map(|c| inline_cone(c, rank)).collect()),
    );
    if f.is_quasi() {
        obj.insert("quasi".into(), json!(true));
    }
    with_rank(obj, f.ambient_rank(), default_rank)
}

/// Glueings are listed for every pair glued along more than the origin, by
/// their maximal cones.
pub fn system_value(s: &AffineSystemOfFans, default_rank: Option<usize>) -> Value {
    let n = s.charts().len();
    let rank = Some(s.ambient_rank());
    let mut glueings = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let cones: Vec<Cone> = maximal_elements(&s.glueing(i, j))
                .into_iter()
                .filter(|c| !c.is_zero())
                .collect();
            if !cones.is_empty() {
                glueings.push(json!({
                    "charts": [i, j],
                    "cones": cones.iter().map(|c| inline_cone(c, rank)).collect::<Vec<_>>(),
                }));
            }
        }
    }
    let mut obj = Map::new();
    obj.insert("type".into(), json!("system"));
    obj.insert(
        "charts".into(),
        Value::Array(s.charts().iter().map(|c| inline_cone(c, rank)).collect()),
    );
    obj.insert("glueings".into(), Value::Array(glueings));
    with_rank(obj, s.ambient_rank(), default_rank)
}

pub fn sublattice_value(l: &Sublattice, default_rank: Option<usize>) -> Value {
    let mut obj = Map::new();
    obj.insert("type".into(), json!("sublattice"));
    obj.insert("generators".into(), vectors_value(l.basis()));
    with_rank(obj, l.ambient_rank(), default_rank)
}

pub fn map_value(m: &IntMatrix) -> Value {
    json!({
        "type": "map",
        "rows": m.rows(),
        "cols": m.cols(),
        "entries": vectors_value(&m.row_vectors()),
    })
}

pub fn object_value(o: &Object, default_rank: Option<usize>) -> Value {
    match o {
        Object::Cone(c) => cone_value(c, default_rank),
        Object::Fan(f) => fan_value(f, default_rank),
        Object::System(s) => system_value(s, default_rank),
        Object::Sublattice(l) => sublattice_value(l, default_rank),
        Object::Map(m) => map_value(m),
    }
}

pub fn document_value(doc: &Document) -> Value {
    let rank = Some(doc.lattice_rank);
    let objects: Map<String, Value> = doc
        .objects
        .iter()
        .map(|(k, o)| (k.clone(), object_value(o, rank)))
        .collect();
    json!({
        "version": doc.version,
        "lattice_rank": doc.lattice_rank,
        "objects": objects,
    })
}

/// Pretty-prints with arrays of scalars kept on one line.
pub fn to_text(v: &Value) -> String {
    let mut out = String::new();
    write_value(v, 0, &mut out);
    out.push('\n');
    out
}

fn is_scalar(v: &Value) -> bool {
    !matches!(v, Value::Array(_) | Value::Object(_))
}

fn write_value(v: &Value, indent: usize, out: &mut String) {
    let pad = |n: usize| " ".repeat(n);
    match v {
        Value::Array(items) if items.is_empty() => out.push_str("[]"),
        Value::Array(items) if items.iter().all(is_scalar) => {
            let parts: Vec<String> = items.iter().map(Value::to_string).collect();
            out.push('[');
            out.push_str(&parts.join(", "));
            out.push(']');
        }
        Value::Array(items) => {
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                out.push_str(&pad(indent + 2));
                write_value(item, indent + 2, out);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push(']');
        }
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => {
            out.push_str("{\n");
            for (i, (k, item)) in map.iter().enumerate() {
                out.push_str(&pad(indent + 2));
                out.push_str(&Value::String(k.clone()).to_string());
                out.push_str(": ");
                write_value(item, indent + 2, out);
                out.push_str(if i + 1 < map.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
        scalar => out.push_str(&scalar.to_string()),
    }
}

/// Canonical text: sorted keys, canonical cone forms, two-space indentation.
pub fn serialize(doc: &Document) -> String {
    to_text(&document_value(doc))
}
