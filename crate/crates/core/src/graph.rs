//! Marked dual graphs: vertices carrying a nondegeneracy flag and optional
//! multidegree, edges with contact orders and a compatible partial
//! orientation, and legs (markings) with contact orders.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vertex {
    pub id: String,
    pub nondegenerate: bool,
    pub multidegree: Option<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub id: String,
    pub ends: (String, String),
    pub contact_order: u64,
    /// (initial, terminal). Present iff contact_order > 0 on valid graphs.
    pub orientation: Option<(String, String)>,
}

impl Edge {
    pub fn is_loop(&self) -> bool {
        self.ends.0 == self.ends.1
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Leg {
    pub id: String,
    pub vertex: String,
    pub contact_order: u64,
}

/// A connected decorated dual graph. Construction checks referential
/// integrity only; the geometric invariants are checked by `validate`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarkedGraph {
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    legs: Vec<Leg>,
}

fn check_id(kind: &str, id: &str) -> Result<(), String> {
    if id.is_empty() {
        return Err(format!("{} id must be nonempty", kind));
    }
    if !id.is_ascii() {
        return Err(format!("{} id {:?} must be ASCII", kind, id));
    }
    Ok(())
}

impl MarkedGraph {
    pub fn new(
        vertices: Vec<Vertex>,
        edges: Vec<Edge>,
        legs: Vec<Leg>,
    ) -> Result<MarkedGraph, String> {
        if vertices.is_empty() {
            return Err("graph must have at least one vertex".to_string());
        }
        let mut vertex_ids = BTreeSet::new();
        for v in &vertices {
            check_id("vertex", &v.id)?;
            if !vertex_ids.insert(v.id.as_str()) {
                return Err(format!("duplicate vertex id {:?}", v.id));
            }
        }
        let mut edge_ids = BTreeSet::new();
        for e in &edges {
            check_id("edge", &e.id)?;
            if !edge_ids.insert(e.id.as_str()) {
                return Err(format!("duplicate edge id {:?}", e.id));
            }
            for end in [&e.ends.0, &e.ends.1] {
                if !vertex_ids.contains(end.as_str()) {
                    return Err(format!("edge {:?} references unknown vertex {:?}", e.id, end));
                }
            }
            if let Some((a, b)) = &e.orientation {
                let mut declared = [a.as_str(), b.as_str()];
                let mut ends = [e.ends.0.as_str(), e.ends.1.as_str()];
                declared.sort_unstable();
                ends.sort_unstable();
                if declared != ends {
                    return Err(format!(
                        "edge {:?} orientation {:?}->{:?} does not match its endpoints",
                        e.id, a, b
                    ));
                }
            }
        }
        let mut leg_ids = BTreeSet::new();
        for l in &legs {
            check_id("leg", &l.id)?;
            if !leg_ids.insert(l.id.as_str()) {
                return Err(format!("duplicate leg id {:?}", l.id));
            }
            if !vertex_ids.contains(l.vertex.as_str()) {
                return Err(format!("leg {:?} references unknown vertex {:?}", l.id, l.vertex));
            }
        }
        Ok(MarkedGraph { vertices, edges, legs })
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn legs(&self) -> &[Leg] {
        &self.legs
    }

    pub fn vertex(&self, id: &str) -> Option<&Vertex> {
        self.vertices.iter().find(|v| v.id == id)
    }

    pub fn edge(&self, id: &str) -> Option<&Edge> {
        self.edges.iter().find(|e| e.id == id)
    }

    pub(crate) fn vertex_index(&self) -> BTreeMap<&str, usize> {
        self.vertices.iter().enumerate().map(|(i, v)| (v.id.as_str(), i)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Diagnostic {
    LoopWithContact { edge: String },
    OrientationContactMismatch { edge: String },
    OrientedIntoNondegenerate { edge: String, vertex: String },
    Disconnected,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::LoopWithContact { edge } => {
                write!(f, "loop edge {:?} must have contact order 0", edge)
            }
            Diagnostic::OrientationContactMismatch { edge } => write!(
                f,
                "edge {:?} must be oriented exactly when its contact order is positive",
                edge
            ),
            Diagnostic::OrientedIntoNondegenerate { edge, vertex } => write!(
                f,
                "oriented edge {:?} ends at nondegenerate vertex {:?}",
                edge, vertex
            ),
            Diagnostic::Disconnected => write!(f, "graph is not connected"),
        }
    }
}

/// Checks the geometric invariants; an empty list means the graph is valid.
pub fn validate(g: &MarkedGraph) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let idx = g.vertex_index();
    for e in g.edges() {
        if e.is_loop() && e.contact_order != 0 {
            out.push(Diagnostic::LoopWithContact { edge: e.id.clone() });
        }
        if e.orientation.is_some() != (e.contact_order > 0) {
            out.push(Diagnostic::OrientationContactMismatch { edge: e.id.clone() });
        }
        if let Some((_, end)) = &e.orientation {
            if g.vertex(end).is_some_and(|v| v.nondegenerate) {
                out.push(Diagnostic::OrientedIntoNondegenerate {
                    edge: e.id.clone(),
                    vertex: end.clone(),
                });
            }
        }
    }
    let mut uf = UnionFind::new(g.vertices().len());
    for e in g.edges() {
        uf.union(idx[e.ends.0.as_str()], idx[e.ends.1.as_str()]);
    }
    if (0..g.vertices().len()).map(|i| uf.find(i)).collect::<BTreeSet<_>>().len() > 1 {
        out.push(Diagnostic::Disconnected);
    }
    out
}

/// A strict cycle is a closed walk that uses every oriented edge in its
/// direction, non-oriented edges freely, and at least one oriented edge.
/// Detected by condensing the non-oriented subgraph and looking for a
/// directed cycle (a self-loop counts) in the condensed multigraph.
pub fn has_strict_cycle(g: &MarkedGraph) -> bool {
    let idx = g.vertex_index();
    let mut uf = UnionFind::new(g.vertices().len());
    for e in g.edges() {
        if e.orientation.is_none() {
            uf.union(idx[e.ends.0.as_str()], idx[e.ends.1.as_str()]);
        }
    }
    let mut arcs: Vec<(usize, usize)> = Vec::new();
    for e in g.edges() {
        if let Some((init, end)) = &e.orientation {
            let a = uf.find(idx[init.as_str()]);
            let b = uf.find(idx[end.as_str()]);
            if a == b {
                return true;
            }
            arcs.push((a, b));
        }
    }
    // Kahn's algorithm on the condensed classes.
    let classes: BTreeSet<usize> = (0..g.vertices().len()).map(|i| uf.find(i)).collect();
    let mut indegree: BTreeMap<usize, usize> = classes.iter().map(|&c| (c, 0)).collect();
    for &(_, b) in &arcs {
        *indegree.get_mut(&b).unwrap() += 1;
    }
    let mut queue: VecDeque<usize> =
        indegree.iter().filter(|(_, &d)| d == 0).map(|(&c, _)| c).collect();
    let mut removed = 0;
    while let Some(c) = queue.pop_front() {
        removed += 1;
        for &(a, b) in &arcs {
            if a == c {
                let d = indegree.get_mut(&b).unwrap();
                *d -= 1;
                if *d == 0 {
                    queue.push_back(b);
                }
            }
        }
    }
    removed < classes.len()
}

/// The splitting-node partition at a vertex: incoming oriented edges on the
/// low side; outgoing oriented edges and positive-contact legs on the up
/// side. Non-oriented edges and contact-zero legs belong to neither.
pub fn distinguished_partition(g: &MarkedGraph, v: &str) -> (Vec<String>, Vec<String>) {
    let mut low = Vec::new();
    let mut up = Vec::new();
    for e in g.edges() {
        if let Some((init, end)) = &e.orientation {
            if end == v {
                low.push(e.id.clone());
            }
            if init == v {
                up.push(e.id.clone());
            }
        }
    }
    for l in g.legs() {
        if l.vertex == v && l.contact_order > 0 {
            up.push(l.id.clone());
        }
    }
    (low, up)
}

/// Whether d_v equals the contact-order balance at v: incoming oriented
/// contact minus outgoing oriented and positive leg contact.
pub fn degree_balance(g: &MarkedGraph, v: &str, d_v: i64) -> bool {
    let mut sum: i128 = 0;
    for e in g.edges() {
        if let Some((init, end)) = &e.orientation {
            if end == v {
                sum += e.contact_order as i128;
            }
            if init == v {
                sum -= e.contact_order as i128;
            }
        }
    }
    for l in g.legs() {
        if l.vertex == v {
            sum -= l.contact_order as i128;
        }
    }
    sum == d_v as i128
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub fn vertex(id: &str, nondegenerate: bool) -> Vertex {
        Vertex { id: id.to_string(), nondegenerate, multidegree: None }
    }

    pub fn oriented(id: &str, from: &str, to: &str, c: u64) -> Edge {
        Edge {
            id: id.to_string(),
            ends: (from.to_string(), to.to_string()),
            contact_order: c,
            orientation: Some((from.to_string(), to.to_string())),
        }
    }

    pub fn unoriented(id: &str, a: &str, b: &str) -> Edge {
        Edge {
            id: id.to_string(),
            ends: (a.to_string(), b.to_string()),
            contact_order: 0,
            orientation: None,
        }
    }

    pub fn leg(id: &str, v: &str, c: u64) -> Leg {
        Leg { id: id.to_string(), vertex: v.to_string(), contact_order: c }
    }

    #[test]
    fn single_vertex_is_valid() {
        let g = MarkedGraph::new(vec![vertex("v1", true)], vec![], vec![]).unwrap();
        assert!(validate(&g).is_empty());
        assert!(!has_strict_cycle(&g));
    }

    #[test]
    fn structural_errors_are_rejected() {
        assert!(MarkedGraph::new(vec![], vec![], vec![]).is_err());
        assert!(MarkedGraph::new(
            vec![vertex("v", false), vertex("v", true)],
            vec![],
            vec![]
        )
        .is_err());
        assert!(MarkedGraph::new(
            vec![vertex("v", false)],
            vec![oriented("l", "v", "w", 1)],
            vec![]
        )
        .is_err());
        assert!(MarkedGraph::new(vec![vertex("v", false)], vec![], vec![leg("p", "w", 1)])
            .is_err());
        // Orientation endpoints must be the edge's endpoints.
        let mut e = oriented("l", "v", "v", 0);
        e.ends = ("v".to_string(), "w".to_string());
        assert!(MarkedGraph::new(
            vec![vertex("v", false), vertex("w", false)],
            vec![e],
            vec![]
        )
        .is_err());
    }

    #[test]
    fn loop_with_contact_is_flagged() {
        let g = MarkedGraph::new(
            vec![vertex("v", false)],
            vec![oriented("l", "v", "v", 1)],
            vec![],
        )
        .unwrap();
        let diags = validate(&g);
        assert!(diags.contains(&Diagnostic::LoopWithContact { edge: "l".to_string() }));
    }

    #[test]
    fn orientation_must_match_contact() {
        let mut e = unoriented("l", "v", "w");
        e.contact_order = 1;
        let g = MarkedGraph::new(
            vec![vertex("v", false), vertex("w", false)],
            vec![e],
            vec![],
        )
        .unwrap();
        assert_eq!(
            validate(&g),
            vec![Diagnostic::OrientationContactMismatch { edge: "l".to_string() }]
        );
        let mut e2 = oriented("l", "v", "w", 0);
        e2.contact_order = 0;
        let g2 = MarkedGraph::new(
            vec![vertex("v", false), vertex("w", false)],
            vec![e2],
            vec![],
        )
        .unwrap();
        assert_eq!(
            validate(&g2),
            vec![Diagnostic::OrientationContactMismatch { edge: "l".to_string() }]
        );
    }

    #[test]
    fn oriented_edges_cannot_end_nondegenerately() {
        let g = MarkedGraph::new(
            vec![vertex("v", false), vertex("w", true)],
            vec![oriented("l", "v", "w", 2)],
            vec![],
        )
        .unwrap();
        assert_eq!(
            validate(&g),
            vec![Diagnostic::OrientedIntoNondegenerate {
                edge: "l".to_string(),
                vertex: "w".to_string()
            }]
        );
    }

    #[test]
    fn disconnected_graphs_are_flagged() {
        let g = MarkedGraph::new(
            vec![vertex("v", false), vertex("w", false)],
            vec![],
            vec![],
        )
        .unwrap();
        assert_eq!(validate(&g), vec![Diagnostic::Disconnected]);
    }

    #[test]
    fn strict_cycle_through_unoriented_component() {
        // v1 -> v2 -> v3, then back to v1 through a non-oriented edge.
        let g = MarkedGraph::new(
            vec![vertex("v1", false), vertex("v2", false), vertex("v3", false)],
            vec![
                oriented("l1", "v1", "v2", 1),
                oriented("l2", "v2", "v3", 1),
                unoriented("l3", "v3", "v1"),
            ],
            vec![],
        )
        .unwrap();
        assert!(validate(&g).is_empty());
        assert!(has_strict_cycle(&g));
    }

    #[test]
    fn parallel_oriented_edges_are_acyclic() {
        let g = MarkedGraph::new(
            vec![vertex("v1", false), vertex("v2", false)],
            vec![oriented("l1", "v1", "v2", 1), oriented("l2", "v1", "v2", 2)],
            vec![],
        )
        .unwrap();
        assert!(!has_strict_cycle(&g));
    }

    #[test]
    fn contact_zero_loop_is_not_a_cycle() {
        let g = MarkedGraph::new(
            vec![vertex("v1", false)],
            vec![unoriented("l", "v1", "v1")],
            vec![],
        )
        .unwrap();
        assert!(validate(&g).is_empty());
        assert!(!has_strict_cycle(&g));
    }

    #[test]
    fn two_cycle_is_strict() {
        let g = MarkedGraph::new(
            vec![vertex("v1", false), vertex("v2", false)],
            vec![oriented("l1", "v1", "v2", 1), oriented("l2", "v2", "v1", 1)],
            vec![],
        )
        .unwrap();
        assert!(has_strict_cycle(&g));
    }

    #[test]
    fn partition_classifies_edges_and_legs() {
        let g = MarkedGraph::new(
            vec![vertex("v1", false), vertex("v2", false)],
            vec![oriented("l", "v1", "v2", 1), unoriented("m", "v1", "v2")],
            vec![leg("p", "v2", 3), leg("q", "v2", 0)],
        )
        .unwrap();
        let (low, up) = distinguished_partition(&g, "v2");
        assert_eq!(low, vec!["l".to_string()]);
        assert_eq!(up, vec!["p".to_string()]);
        let (low1, up1) = distinguished_partition(&g, "v1");
        assert!(low1.is_empty());
        assert_eq!(up1, vec!["l".to_string()]);
    }

    #[test]
    fn balance_examples() {
        let g = MarkedGraph::new(
            vec![vertex("v1", true), vertex("v2", false)],
            vec![oriented("l", "v1", "v2", 2)],
            vec![leg("p", "v2", 3)],
        )
        .unwrap();
        assert!(degree_balance(&g, "v1", -2));
        assert!(degree_balance(&g, "v2", -1));
        assert!(!degree_balance(&g, "v2", 1));
    }
}
