//! Geometry files: JSON with patches and inner edges; vertices and boundary
//! edges are inferred.
//!
//! ```json
//! {"patches": [{"type": "bilinear", "corners": [["0","0"], ["1","0"], ["1","1"], ["0","1"]]}],
//!  "inner_edges": []}
//! ```
//!
//! Bilinear corners are F(0,0), F(1,0), F(1,1), F(0,1). Spline nets are
//! row-major in (j1, j2). Numbers are JSON numbers, decimal strings or "n/d".

use super::{EdgeSpec, GeometryError, Mapping, MultiPatchDomain, Number, Patch, Point2};
use crate::mixed_space::Side;
use serde_json::{json, Value};
use std::path::Path;

fn schema(msg: impl Into<String>) -> GeometryError {
    GeometryError::Schema(msg.into())
}

fn number(v: &Value) -> Result<Number, GeometryError> {
    match v {
        Value::String(s) => Number::parse(s),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(Number::ratio(i, 1))
            } else {
                Ok(Number::Float(n.as_f64().ok_or_else(|| schema("bad number"))?))
            }
        }
        _ => Err(schema(format!("expected a number, got {v}"))),
    }
}

fn point(v: &Value) -> Result<Point2, GeometryError> {
    match v.as_array() {
        Some(a) if a.len() == 2 => Ok([number(&a[0])?, number(&a[1])?]),
        _ => Err(schema(format!("expected [x, y], got {v}"))),
    }
}

fn usize_field(o: &Value, key: &str) -> Result<usize, GeometryError> {
    o.get(key)
        .and_then(Value::as_u64)
        .map(|x| x as usize)
        .ok_or_else(|| schema(format!("missing integer field {key:?}")))
}

fn side_field(o: &Value, key: &str) -> Result<Side, GeometryError> {
    let s = o.get(key).and_then(Value::as_str).ok_or_else(|| schema(format!("missing field {key:?}")))?;
    Side::from_name(s).ok_or_else(|| schema(format!("unknown side {s:?}")))
}

pub fn parse_geometry(text: &str, name: &str) -> Result<MultiPatchDomain, GeometryError> {
    let root: Value = serde_json::from_str(text).map_err(|e| schema(e.to_string()))?;
    let plist = root.get("patches").and_then(Value::as_array).ok_or_else(|| schema("missing \"patches\""))?;
    let mut patches = Vec::new();
    for (i, p) in plist.iter().enumerate() {
        let kind = p.get("type").and_then(Value::as_str).ok_or_else(|| schema(format!("patch {i}: missing type")))?;
        let mapping = match kind {
            "bilinear" => {
                let c = p
                    .get("corners")
                    .and_then(Value::as_array)
                    .filter(|c| c.len() == 4)
                    .ok_or_else(|| schema(format!("patch {i}: need 4 corners")))?;
                Mapping::Bilinear { corners: [point(&c[0])?, point(&c[1])?, point(&c[2])?, point(&c[3])?] }
            }
            "spline" => {
                let net = p
                    .get("control_net")
                    .and_then(Value::as_array)
                    .ok_or_else(|| schema(format!("patch {i}: missing control_net")))?
                    .iter()
                    .map(point)
                    .collect::<Result<Vec<_>, _>>()?;
                Mapping::Spline {
                    degree: usize_field(p, "degree")?,
                    regularity: usize_field(p, "regularity")?,
                    k: usize_field(p, "k")?,
                    net,
                }
            }
            other => return Err(schema(format!("patch {i}: unknown type {other:?}"))),
        };
        patches.push(Patch::new(i, mapping)?);
    }
    let mut specs = Vec::new();
    if let Some(edges) = root.get("inner_edges") {
        let edges = edges.as_array().ok_or_else(|| schema("\"inner_edges\" must be a list"))?;
        for e in edges {
            specs.push(EdgeSpec {
                patch_a: usize_field(e, "patch_a")?,
                side_a: side_field(e, "side_a")?,
                patch_b: usize_field(e, "patch_b")?,
                side_b: side_field(e, "side_b")?,
                reversed: e.get("reversed").and_then(Value::as_bool).unwrap_or(false),
            });
        }
    }
    MultiPatchDomain::new(name, patches, specs)
}

pub fn load_geometry(path: impl AsRef<Path>) -> Result<MultiPatchDomain, GeometryError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("file");
    parse_geometry(&text, name)
}

fn point_json(p: &Point2) -> Value {
    let n = |x: &Number| match x {
        Number::Exact(_) => Value::String(x.to_text()),
        Number::Float(f) => json!(f),
    };
    json!([n(&p[0]), n(&p[1])])
}

pub fn export_geometry(d: &MultiPatchDomain) -> String {
    let patches: Vec<Value> = d
        .patches
        .iter()
        .map(|p| match &p.mapping {
            Mapping::Bilinear { corners } => {
                json!({"type": "bilinear", "corners": corners.iter().map(point_json).collect::<Vec<_>>()})
            }
            Mapping::Spline { degree, regularity, k, net } => json!({
                "type": "spline", "degree": degree, "regularity": regularity, "k": k,
                "control_net": net.iter().map(point_json).collect::<Vec<_>>()
            }),
        })
        .collect();
    let edges: Vec<Value> = d
        .specs
        .iter()
        .map(|e| {
            json!({"patch_a": e.patch_a, "side_a": e.side_a.name(), "patch_b": e.patch_b,
                   "side_b": e.side_b.name(), "reversed": e.reversed})
        })
        .collect();
    serde_json::to_string_pretty(&json!({"patches": patches, "inner_edges": edges})).unwrap()
}
