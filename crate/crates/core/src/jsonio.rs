//! JSON parsing and emission. Parsing is strict: unknown keys are rejected,
//! numbers must be integers, and every structural rule of the graph types is
//! enforced before a value is returned. Emission is canonical: object keys
//! sorted, vector lists in lexicographic order, arbitrary-precision integers
//! printed in full, so equal inputs produce byte-equal output.

use crate::affine::AffineMonoid;
use crate::enumerate::{DualEdge, DualGraphInput, DualLeg, DualVertex, Enumeration};
use crate::graph::{Edge, Leg, MarkedGraph, Vertex};
use crate::graph_monoid::AssociatedMonoid;
use crate::morphism::MonoidMorphism;
use num_bigint::BigInt;
use serde::Deserialize;
use serde_json::{Map, Number, Value};
use std::collections::BTreeMap;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ParseError {
    /// Malformed JSON or a schema violation; the message carries the line
    /// and column, and names the offending field where applicable.
    #[error("{0}")]
    Json(#[from] serde_json::Error),
    /// Structurally valid JSON whose content breaks a graph or monoid rule.
    #[error("{0}")]
    Semantic(String),
}

fn value_to_bigint(v: &Value) -> Result<BigInt, String> {
    match v {
        Value::Number(n) => {
            let s = n.to_string();
            if s.contains(['.', 'e', 'E']) {
                return Err(format!("expected an integer, found {}", s));
            }
            BigInt::from_str(&s).map_err(|_| format!("expected an integer, found {}", s))
        }
        other => Err(format!("expected an integer, found {}", other)),
    }
}

fn bigint_value(x: &BigInt) -> Value {
    Value::Number(Number::from_str(&x.to_string()).expect("integer literal parses"))
}

fn vector_value(v: &[BigInt]) -> Value {
    Value::Array(v.iter().map(bigint_value).collect())
}

fn vector_list_value(vs: &[Vec<BigInt>]) -> Value {
    let mut sorted: Vec<&Vec<BigInt>> = vs.iter().collect();
    sorted.sort();
    Value::Array(sorted.into_iter().map(|v| vector_value(v)).collect())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct VertexDoc {
    id: String,
    nondegenerate: bool,
    #[serde(default)]
    multidegree: Option<i64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeDoc {
    id: String,
    ends: (String, String),
    contact_order: u64,
    orientation: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LegDoc {
    id: String,
    vertex: String,
    contact_order: u64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphDoc {
    vertices: Vec<VertexDoc>,
    #[serde(default)]
    edges: Vec<EdgeDoc>,
    #[serde(default)]
    legs: Vec<LegDoc>,
}

fn parse_orientation(edge_id: &str, s: &str) -> Result<Option<(String, String)>, ParseError> {
    if s == "none" {
        return Ok(None);
    }
    if let Some((a, b)) = s.split_once("->") {
        if !a.is_empty() && !b.is_empty() && !b.contains("->") {
            return Ok(Some((a.to_string(), b.to_string())));
        }
    }
    Err(ParseError::Semantic(format!(
        "edge {:?}: orientation must be \"none\" or \"a->b\", found {:?}",
        edge_id, s
    )))
}

pub fn parse_marked_graph(s: &str) -> Result<MarkedGraph, ParseError> {
    let doc: GraphDoc = serde_json::from_str(s)?;
    let vertices: Vec<Vertex> = doc
        .vertices
        .into_iter()
        .map(|v| Vertex { id: v.id, nondegenerate: v.nondegenerate, multidegree: v.multidegree })
        .collect();
    let mut edges: Vec<Edge> = Vec::with_capacity(doc.edges.len());
    for e in doc.edges {
        let orientation = parse_orientation(&e.id, &e.orientation)?;
        edges.push(Edge { id: e.id, ends: e.ends, contact_order: e.contact_order, orientation });
    }
    let legs: Vec<Leg> = doc
        .legs
        .into_iter()
        .map(|l| Leg { id: l.id, vertex: l.vertex, contact_order: l.contact_order })
        .collect();
    MarkedGraph::new(vertices, edges, legs).map_err(ParseError::Semantic)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DualVertexDoc {
    id: String,
    nondegenerate: bool,
    multidegree: i64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DualEdgeDoc {
    id: String,
    ends: (String, String),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DualGraphDoc {
    vertices: Vec<DualVertexDoc>,
    #[serde(default)]
    edges: Vec<DualEdgeDoc>,
    #[serde(default)]
    legs: Vec<LegDoc>,
}

/// Enumeration input: the graph schema with undecorated edges (a
/// contact_order or orientation key on an edge is rejected) and mandatory
/// multidegrees.
pub fn parse_dual_input(s: &str) -> Result<DualGraphInput, ParseError> {
    let doc: DualGraphDoc = serde_json::from_str(s)?;
    let vertices = doc
        .vertices
        .into_iter()
        .map(|v| DualVertex {
            id: v.id,
            nondegenerate: v.nondegenerate,
            multidegree: v.multidegree,
        })
        .collect();
    let edges = doc.edges.into_iter().map(|e| DualEdge { id: e.id, ends: e.ends }).collect();
    let legs = doc
        .legs
        .into_iter()
        .map(|l| DualLeg { id: l.id, vertex: l.vertex, contact_order: l.contact_order })
        .collect();
    DualGraphInput::new(vertices, edges, legs).map_err(ParseError::Semantic)
}

/// Assignment for the minimality check: an object mapping generator names
/// to integer vectors.
pub fn parse_assignment(s: &str) -> Result<BTreeMap<String, Vec<BigInt>>, ParseError> {
    let doc: BTreeMap<String, Vec<Value>> = serde_json::from_str(s)?;
    let mut out = BTreeMap::new();
    for (name, vals) in doc {
        let mut vec = Vec::with_capacity(vals.len());
        for v in &vals {
            vec.push(value_to_bigint(v).map_err(|e| {
                ParseError::Semantic(format!("assignment for {:?}: {}", name, e))
            })?);
        }
        out.insert(name, vec);
    }
    Ok(out)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MonoidDoc {
    rank: usize,
    #[serde(default)]
    torsion: Vec<Value>,
    hilbert_basis: Vec<Vec<Value>>,
    #[serde(default)]
    extremal_rays: Option<Vec<Vec<Value>>>,
    #[serde(default)]
    sharp: Option<bool>,
    #[serde(default)]
    generator_images: Option<Value>,
}

/// Target monoid for the minimality check, reconstructed from its rank and
/// Hilbert basis. The torsion list must be empty (an embedded monoid is
/// torsion free); redundant fields are accepted and cross-checked where
/// cheap.
pub fn parse_target_monoid(s: &str) -> Result<AffineMonoid, ParseError> {
    let doc: MonoidDoc = serde_json::from_str(s)?;
    if !doc.torsion.is_empty() {
        return Err(ParseError::Semantic(
            "field \"torsion\" must be empty: an embedded target monoid is torsion free"
                .to_string(),
        ));
    }
    let mut generators = Vec::with_capacity(doc.hilbert_basis.len());
    for row in &doc.hilbert_basis {
        if row.len() != doc.rank {
            return Err(ParseError::Semantic(format!(
                "field \"hilbert_basis\": vector {:?} does not have rank {} coordinates",
                row, doc.rank
            )));
        }
        let mut vec = Vec::with_capacity(row.len());
        for v in row {
            vec.push(value_to_bigint(v).map_err(|e| {
                ParseError::Semantic(format!("field \"hilbert_basis\": {}", e))
            })?);
        }
        generators.push(vec);
    }
    let m = AffineMonoid::from_generators(doc.rank, generators);
    if let Some(sharp) = doc.sharp {
        if sharp != m.is_sharp() {
            return Err(ParseError::Semantic(format!(
                "field \"sharp\": declared {}, computed {}",
                sharp,
                m.is_sharp()
            )));
        }
    }
    let _ = (doc.extremal_rays, doc.generator_images);
    Ok(m)
}

pub fn graph_value(g: &MarkedGraph) -> Value {
    let vertices: Vec<Value> = g
        .vertices()
        .iter()
        .map(|v| {
            let mut o = Map::new();
            o.insert("id".to_string(), Value::String(v.id.clone()));
            o.insert("nondegenerate".to_string(), Value::Bool(v.nondegenerate));
            if let Some(d) = v.multidegree {
                o.insert("multidegree".to_string(), Value::from(d));
            }
            Value::Object(o)
        })
        .collect();
    let edges: Vec<Value> = g
        .edges()
        .iter()
        .map(|e| {
            let mut o = Map::new();
            o.insert("id".to_string(), Value::String(e.id.clone()));
            o.insert(
                "ends".to_string(),
                Value::Array(vec![
                    Value::String(e.ends.0.clone()),
                    Value::String(e.ends.1.clone()),
                ]),
            );
            o.insert("contact_order".to_string(), Value::from(e.contact_order));
            let orientation = match &e.orientation {
                None => "none".to_string(),
                Some((a, b)) => format!("{}->{}", a, b),
            };
            o.insert("orientation".to_string(), Value::String(orientation));
            Value::Object(o)
        })
        .collect();
    let legs: Vec<Value> = g
        .legs()
        .iter()
        .map(|l| {
            let mut o = Map::new();
            o.insert("id".to_string(), Value::String(l.id.clone()));
            o.insert("vertex".to_string(), Value::String(l.vertex.clone()));
            o.insert("contact_order".to_string(), Value::from(l.contact_order));
            Value::Object(o)
        })
        .collect();
    let mut o = Map::new();
    o.insert("vertices".to_string(), Value::Array(vertices));
    o.insert("edges".to_string(), Value::Array(edges));
    o.insert("legs".to_string(), Value::Array(legs));
    Value::Object(o)
}

/// The monoid report: rank and torsion of the presented group, sharpness,
/// Hilbert basis and extremal rays of the saturation (null when undefined,
/// which happens exactly for non-sharp monoids), and the lattice image of
/// every presentation generator.
pub fn associated_monoid_value(m: &AssociatedMonoid) -> Value {
    let mut o = Map::new();
    o.insert("rank".to_string(), Value::from(m.group.free_rank));
    o.insert(
        "torsion".to_string(),
        Value::Array(m.group.torsion.iter().map(bigint_value).collect()),
    );
    o.insert("sharp".to_string(), Value::Bool(m.saturated.is_sharp()));
    o.insert(
        "hilbert_basis".to_string(),
        match m.saturated.hilbert_basis() {
            Ok(hb) => vector_list_value(&hb),
            Err(_) => Value::Null,
        },
    );
    o.insert(
        "extremal_rays".to_string(),
        match m.saturated.extremal_rays() {
            Ok(rays) => vector_list_value(rays),
            Err(_) => Value::Null,
        },
    );
    let images: Map<String, Value> = m
        .generator_images
        .iter()
        .map(|(name, img)| (name.clone(), vector_value(img)))
        .collect();
    o.insert("generator_images".to_string(), Value::Object(images));
    Value::Object(o)
}

/// Specialization report: the contracted graph and the induced morphism,
/// given as its matrix (source coordinates act on the left) plus the image
/// of every presentation generator of the source.
pub fn specialization_value(
    source: &AssociatedMonoid,
    g2: &MarkedGraph,
    q: &MonoidMorphism,
) -> Value {
    let mut morphism = Map::new();
    morphism.insert("source_rank".to_string(), Value::from(q.source().rank()));
    morphism.insert("target_rank".to_string(), Value::from(q.target().rank()));
    morphism.insert(
        "matrix".to_string(),
        Value::Array(q.matrix().to_rows().iter().map(|r| vector_value(r)).collect()),
    );
    let images: Map<String, Value> = source
        .generator_images
        .iter()
        .map(|(name, img)| (name.clone(), vector_value(&q.apply(img))))
        .collect();
    morphism.insert("generator_images".to_string(), Value::Object(images));
    let mut o = Map::new();
    o.insert("graph".to_string(), graph_value(g2));
    o.insert("morphism".to_string(), Value::Object(morphism));
    Value::Object(o)
}

pub fn enumeration_value(e: &Enumeration) -> Value {
    let mut o = Map::new();
    o.insert("count".to_string(), Value::from(e.solutions.len()));
    o.insert("complete".to_string(), Value::Bool(e.complete));
    o.insert(
        "solutions".to_string(),
        Value::Array(e.solutions.iter().map(graph_value).collect()),
    );
    Value::Object(o)
}

/// Canonical rendering: pretty-printed with sorted keys and a trailing
/// newline. Equal values give byte-equal strings.
pub fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serialization cannot fail");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::validate;
    use crate::graph_monoid::associated_monoid;
    use crate::mat::big;

    const CHAIN: &str = r#"{
        "vertices": [
            {"id": "v1", "nondegenerate": true},
            {"id": "v2", "nondegenerate": false, "multidegree": -1}
        ],
        "edges": [
            {"id": "l", "ends": ["v1", "v2"], "contact_order": 1, "orientation": "v1->v2"}
        ],
        "legs": [
            {"id": "p", "vertex": "v2", "contact_order": 3}
        ]
    }"#;

    #[test]
    fn graph_round_trip() {
        let g = parse_marked_graph(CHAIN).unwrap();
        assert!(validate(&g).is_empty());
        assert_eq!(g.vertices().len(), 2);
        assert_eq!(g.vertices()[1].multidegree, Some(-1));
        assert_eq!(
            g.edges()[0].orientation,
            Some(("v1".to_string(), "v2".to_string()))
        );
        let rendered = render(&graph_value(&g));
        let g2 = parse_marked_graph(&rendered).unwrap();
        assert_eq!(g, g2);
        // Byte determinism through a second cycle.
        assert_eq!(rendered, render(&graph_value(&g2)));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let s = r#"{"vertices": [{"id": "v", "nondegenerate": false, "genus": 2}]}"#;
        match parse_marked_graph(s) {
            Err(ParseError::Json(e)) => assert!(e.to_string().contains("genus")),
            other => panic!("expected Json error, got {:?}", other),
        }
    }

    #[test]
    fn bad_orientation_strings() {
        let s = r#"{
            "vertices": [{"id": "a", "nondegenerate": false}, {"id": "b", "nondegenerate": false}],
            "edges": [{"id": "l", "ends": ["a", "b"], "contact_order": 1, "orientation": "sideways"}]
        }"#;
        match parse_marked_graph(s) {
            Err(ParseError::Semantic(msg)) => assert!(msg.contains("sideways")),
            other => panic!("expected Semantic error, got {:?}", other),
        }
    }

    #[test]
    fn dual_input_forbids_decorations() {
        let s = r#"{
            "vertices": [{"id": "a", "nondegenerate": false, "multidegree": 0}],
            "edges": [{"id": "l", "ends": ["a", "a"], "contact_order": 1}]
        }"#;
        match parse_dual_input(s) {
            Err(ParseError::Json(e)) => assert!(e.to_string().contains("contact_order")),
            other => panic!("expected Json error, got {:?}", other),
        }
        let ok = r#"{
            "vertices": [{"id": "a", "nondegenerate": false, "multidegree": 0}],
            "edges": [{"id": "l", "ends": ["a", "a"]}]
        }"#;
        assert_eq!(parse_dual_input(ok).unwrap().edges().len(), 1);
        let missing_degree = r#"{"vertices": [{"id": "a", "nondegenerate": false}]}"#;
        match parse_dual_input(missing_degree) {
            Err(ParseError::Json(e)) => assert!(e.to_string().contains("multidegree")),
            other => panic!("expected Json error, got {:?}", other),
        }
    }

    #[test]
    fn monoid_report_for_chain() {
        let g = parse_marked_graph(CHAIN).unwrap();
        let m = associated_monoid(&g);
        let v = associated_monoid_value(&m);
        assert_eq!(v["rank"], Value::from(1));
        assert_eq!(v["torsion"], Value::Array(vec![]));
        assert_eq!(v["sharp"], Value::Bool(true));
        assert_eq!(v["hilbert_basis"], serde_json::json!([[1]]));
        assert_eq!(v["generator_images"]["v:v1"], serde_json::json!([0]));
        assert_eq!(v["generator_images"]["l:l"], serde_json::json!([1]));
        // Keys come out sorted.
        let rendered = render(&v);
        let ext = rendered.find("extremal_rays").unwrap();
        let hb = rendered.find("hilbert_basis").unwrap();
        let rk = rendered.find("rank").unwrap();
        assert!(ext < hb && hb < rk);
    }

    #[test]
    fn assignment_and_target_parse() {
        let a = parse_assignment(r#"{"v:v": [1, -2], "l:l": [0, 3]}"#).unwrap();
        assert_eq!(a["v:v"], vec![big(1), big(-2)]);
        let bad = parse_assignment(r#"{"v:v": [1.5]}"#);
        assert!(matches!(bad, Err(ParseError::Semantic(_))));

        let m =
            parse_target_monoid(r#"{"rank": 1, "torsion": [], "hilbert_basis": [[1]]}"#).unwrap();
        assert_eq!(m.rank(), 1);
        assert!(m.is_sharp() && m.is_saturated());
        let t = parse_target_monoid(r#"{"rank": 1, "torsion": [2], "hilbert_basis": [[1]]}"#);
        assert!(matches!(t, Err(ParseError::Semantic(_))));
        let wrong =
            parse_target_monoid(r#"{"rank": 2, "hilbert_basis": [[1]]}"#);
        assert!(matches!(wrong, Err(ParseError::Semantic(_))));
        let contradiction =
            parse_target_monoid(r#"{"rank": 1, "hilbert_basis": [[1]], "sharp": false}"#);
        assert!(matches!(contradiction, Err(ParseError::Semantic(_))));
    }

    #[test]
    fn huge_integers_survive() {
        let big_num = "123456789012345678901234567890";
        let s = format!(r#"{{"v:v": [{}]}}"#, big_num);
        let a = parse_assignment(&s).unwrap();
        assert_eq!(a["v:v"][0].to_string(), big_num);
        let back = bigint_value(&a["v:v"][0]);
        assert_eq!(back.to_string(), big_num);
    }

    #[test]
    fn json_errors_carry_position() {
        let e = match parse_marked_graph("{\n  \"vertices\": [,]\n}") {
            Err(ParseError::Json(e)) => e,
            other => panic!("expected Json error, got {:?}", other),
        };
        assert_eq!(e.line(), 2);
        assert!(e.column() > 0);
    }
}
