//! Specialization of marked graphs: contract a set of edges, mark a set of
//! vertices nondegenerate, and produce the induced map between the attached
//! monoids. Combinatorially this is the quotient of ℳ(G) by the face spanned
//! by the killed generators; the two descriptions are cross-checked on every
//! call.

use crate::cone::dot;
use crate::graph::{validate, Edge, Leg, MarkedGraph, UnionFind, Vertex};
use crate::graph_monoid::{admissibility_of, associated_monoid, AssociatedMonoid};
use crate::mat::{solve_right, IntMat};
use crate::morphism::MonoidMorphism;
use num_bigint::BigInt;
use num_traits::Zero;
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SpecializationSpec {
    pub contracted_edges: Vec<String>,
    pub vanishing_vertices: Vec<String>,
}

#[derive(Debug, Error)]
pub enum SpecializeError {
    #[error("invalid specialization: {0}")]
    InvalidSpec(String),
    #[error("not a face: {0}")]
    NotAFace(String),
    #[error("contracted graph is invalid: {0}")]
    ResultInvalid(String),
    #[error("internal coherence failure: {0}")]
    Internal(String),
}

fn is_zero_vec(v: &[BigInt]) -> bool {
    v.iter().all(|x| x.is_zero())
}

/// Contracts `spec.contracted_edges`, marks `spec.vanishing_vertices`
/// nondegenerate, and returns the new graph together with the induced
/// morphism ℳ(G) → ℳ(G'). Merged vertices take the lexicographically
/// smallest constituent id; a merged vertex is nondegenerate iff some
/// constituent was nondegenerate or vanishing. Fails when the declared data
/// does not match the face structure of ℳ(G): the face spanned by the killed
/// generator images must not kill any undeclared edge, and every degenerate
/// vertex whose degeneracy it kills must end up nondegenerate.
pub fn specialize(
    g: &MarkedGraph,
    spec: &SpecializationSpec,
) -> Result<(MarkedGraph, MonoidMorphism), SpecializeError> {
    let m = associated_monoid(g);
    specialize_with_monoid(g, &m, spec)
}

/// Same as `specialize`, with ℳ(G) supplied by the caller. Saves the monoid
/// recomputation when many specializations of one graph are taken; `m` must
/// be the monoid of `g`.
pub fn specialize_with_monoid(
    g: &MarkedGraph,
    m: &AssociatedMonoid,
    spec: &SpecializationSpec,
) -> Result<(MarkedGraph, MonoidMorphism), SpecializeError> {
    let e0: BTreeSet<&str> = spec.contracted_edges.iter().map(|s| s.as_str()).collect();
    let v0: BTreeSet<&str> = spec.vanishing_vertices.iter().map(|s| s.as_str()).collect();
    for id in &e0 {
        if g.edge(id).is_none() {
            return Err(SpecializeError::InvalidSpec(format!("unknown edge id {:?}", id)));
        }
    }
    for id in &v0 {
        match g.vertex(id) {
            None => {
                return Err(SpecializeError::InvalidSpec(format!("unknown vertex id {:?}", id)))
            }
            Some(v) if v.nondegenerate => {
                return Err(SpecializeError::InvalidSpec(format!(
                    "vertex {:?} is already nondegenerate",
                    id
                )))
            }
            _ => {}
        }
    }
    let diags = validate(g);
    if !diags.is_empty() {
        let msgs: Vec<String> = diags.iter().map(|d| d.to_string()).collect();
        return Err(SpecializeError::InvalidSpec(format!(
            "graph is not valid: {}",
            msgs.join("; ")
        )));
    }
    if let Err(reason) = admissibility_of(m) {
        return Err(SpecializeError::InvalidSpec(format!(
            "graph is not admissible: {}",
            reason
        )));
    }

    let image = |name: &str| m.image_of(name).expect("generator exists").to_vec();

    // The zero set: killed edge generators and vanishing degeneracies.
    let mut zero_set: Vec<Vec<BigInt>> = Vec::new();
    for id in &e0 {
        zero_set.push(image(&format!("l:{}", id)));
    }
    for id in &v0 {
        zero_set.push(image(&format!("v:{}", id)));
    }

    // Normals vanishing on the whole zero set cut out the minimal face
    // containing it; membership in that face is vanishing against all of them.
    let vanishing: Vec<&Vec<BigInt>> = m
        .saturated
        .dual_description()
        .iter()
        .filter(|h| zero_set.iter().all(|z| dot(h, z).is_zero()))
        .collect();
    let in_face = |x: &[BigInt]| vanishing.iter().all(|h| dot(h, x).is_zero());

    // Merge vertex classes along the contracted edges.
    let idx = g.vertex_index();
    let mut uf = UnionFind::new(g.vertices().len());
    for e in g.edges() {
        if e0.contains(e.id.as_str()) {
            uf.union(idx[e.ends.0.as_str()], idx[e.ends.1.as_str()]);
        }
    }
    let mut class_members: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..g.vertices().len() {
        class_members.entry(uf.find(i)).or_default().push(i);
    }
    let rep_id = |class_members: &BTreeMap<usize, Vec<usize>>, root: usize| -> String {
        class_members[&root]
            .iter()
            .map(|&i| g.vertices()[i].id.as_str())
            .min()
            .unwrap()
            .to_string()
    };
    let class_nondegenerate = |members: &[usize]| {
        members.iter().any(|&i| {
            let v = &g.vertices()[i];
            v.nondegenerate || v0.contains(v.id.as_str())
        })
    };

    // Face coherence: an undeclared edge must survive the quotient, and a
    // vertex whose (nonzero) degeneracy dies must become nondegenerate.
    for e in g.edges() {
        if !e0.contains(e.id.as_str()) && in_face(&image(&format!("l:{}", e.id))) {
            return Err(SpecializeError::NotAFace(format!(
                "edge {:?} is killed by the face but not contracted",
                e.id
            )));
        }
    }
    let mut root_of: BTreeMap<&str, usize> = BTreeMap::new();
    for (i, v) in g.vertices().iter().enumerate() {
        root_of.insert(v.id.as_str(), uf.find(i));
    }
    for v in g.vertices() {
        if v.nondegenerate || v0.contains(v.id.as_str()) {
            continue;
        }
        let img = image(&format!("v:{}", v.id));
        if !is_zero_vec(&img)
            && in_face(&img)
            && !class_nondegenerate(&class_members[&root_of[v.id.as_str()]])
        {
            return Err(SpecializeError::NotAFace(format!(
                "the degeneracy of vertex {:?} is killed by the face, but the vertex stays degenerate",
                v.id
            )));
        }
    }

    // Build the contracted graph: each class appears at the position of its
    // representative, so an empty specialization reproduces the input.
    let mut new_vertices: Vec<Vertex> = Vec::new();
    for (i, v) in g.vertices().iter().enumerate() {
        let root = uf.find(i);
        let rid = rep_id(&class_members, root);
        if v.id != rid {
            continue;
        }
        let members = &class_members[&root];
        let multidegree = members
            .iter()
            .map(|&j| g.vertices()[j].multidegree)
            .try_fold(0i64, |acc, d| d.and_then(|d| acc.checked_add(d)));
        new_vertices.push(Vertex {
            id: rid,
            nondegenerate: class_nondegenerate(members),
            multidegree,
        });
    }
    let map_id =
        |id: &str| rep_id(&class_members, root_of[id]);
    let new_edges: Vec<Edge> = g
        .edges()
        .iter()
        .filter(|e| !e0.contains(e.id.as_str()))
        .map(|e| Edge {
            id: e.id.clone(),
            ends: (map_id(&e.ends.0), map_id(&e.ends.1)),
            contact_order: e.contact_order,
            orientation: e
                .orientation
                .as_ref()
                .map(|(a, b)| (map_id(a), map_id(b))),
        })
        .collect();
    let new_legs: Vec<Leg> = g
        .legs()
        .iter()
        .map(|l| Leg {
            id: l.id.clone(),
            vertex: map_id(&l.vertex),
            contact_order: l.contact_order,
        })
        .collect();
    let g2 = MarkedGraph::new(new_vertices, new_edges, new_legs)
        .map_err(SpecializeError::ResultInvalid)?;
    let diags2 = validate(&g2);
    if !diags2.is_empty() {
        let msgs: Vec<String> = diags2.iter().map(|d| d.to_string()).collect();
        return Err(SpecializeError::ResultInvalid(msgs.join("; ")));
    }

    let m2 = associated_monoid(&g2);
    let morphism = induced_morphism(g, m, &m2, &e0, &map_id)?;
    coherence_check(m, &m2, &morphism, &vanishing)?;
    Ok((g2, morphism))
}

/// Solves for the integer matrix sending every generator image of ℳ(G) to
/// the image of its surviving counterpart in ℳ(G') (contracted edges to 0).
fn induced_morphism(
    g: &MarkedGraph,
    m: &AssociatedMonoid,
    m2: &AssociatedMonoid,
    e0: &BTreeSet<&str>,
    map_id: &impl Fn(&str) -> String,
) -> Result<MonoidMorphism, SpecializeError> {
    let rank2 = m2.group.free_rank;
    let mut target_rows: Vec<Vec<BigInt>> = Vec::new();
    for name in &m.presentation.generators {
        if let Some(vid) = name.strip_prefix("v:") {
            let rep = map_id(vid);
            target_rows.push(m2.image_of(&format!("v:{}", rep)).unwrap().to_vec());
        } else if let Some(eid) = name.strip_prefix("l:") {
            if e0.contains(eid) {
                target_rows.push(vec![BigInt::zero(); rank2]);
            } else {
                target_rows.push(m2.image_of(name).unwrap().to_vec());
            }
        } else {
            unreachable!("generator names are v:/l: prefixed");
        }
    }
    let source_mat =
        IntMat::from_rows_with_cols(m.group.free_images.clone(), m.group.free_rank);
    let target_mat = IntMat::from_rows_with_cols(target_rows, rank2);
    let a = solve_right(&source_mat, &target_mat).ok_or_else(|| {
        SpecializeError::Internal(format!(
            "no integral matrix realizes the specialization of graph with {} vertices",
            g.vertices().len()
        ))
    })?;
    MonoidMorphism::new(m.saturated.clone(), m2.saturated.clone(), a)
        .map_err(|e| SpecializeError::Internal(format!("induced map is not a morphism: {}", e)))
}

/// Verifies that ℳ(G') really is the face quotient of ℳ(G): the face's
/// Hilbert basis elements are those annihilated by the vanishing normals,
/// and the quotient must be isomorphic to ℳ(G') over the induced map.
fn coherence_check(
    m: &AssociatedMonoid,
    m2: &AssociatedMonoid,
    morphism: &MonoidMorphism,
    vanishing: &[&Vec<BigInt>],
) -> Result<(), SpecializeError> {
    let hb = m
        .saturated
        .hilbert_basis()
        .map_err(|e| SpecializeError::Internal(e.to_string()))?;
    let face_hb: Vec<Vec<BigInt>> = hb
        .into_iter()
        .filter(|b| vanishing.iter().all(|h| dot(h, b).is_zero()))
        .collect();
    let (fq, fq_morph) = m
        .saturated
        .face_quotient(&face_hb)
        .map_err(|e| SpecializeError::Internal(format!("face quotient failed: {}", e)))?;
    let fq_rows: Vec<Vec<BigInt>> =
        m.group.free_images.iter().map(|img| fq_morph.apply(img)).collect();
    let q_rows: Vec<Vec<BigInt>> =
        m.group.free_images.iter().map(|img| morphism.apply(img)).collect();
    let b = solve_right(
        &IntMat::from_rows_with_cols(fq_rows, fq.rank()),
        &IntMat::from_rows_with_cols(q_rows, m2.group.free_rank),
    )
    .ok_or_else(|| {
        SpecializeError::Internal("face quotient does not factor the induced map".to_string())
    })?;
    let psi = MonoidMorphism::new(fq, m2.saturated.clone(), b)
        .map_err(|e| SpecializeError::Internal(format!("comparison map invalid: {}", e)))?;
    if !psi.is_isomorphism() {
        return Err(SpecializeError::Internal(
            "face quotient is not isomorphic to the contracted graph's monoid".to_string(),
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::tests::{leg, oriented, unoriented, vertex};

    fn spec(edges: &[&str], vertices: &[&str]) -> SpecializationSpec {
        SpecializationSpec {
            contracted_edges: edges.iter().map(|s| s.to_string()).collect(),
            vanishing_vertices: vertices.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn two_vertex_graph() -> MarkedGraph {
        MarkedGraph::new(
            vec![vertex("v1", false), vertex("v2", false)],
            vec![oriented("l", "v1", "v2", 1)],
            vec![],
        )
        .unwrap()
    }

    #[test]
    fn empty_spec_is_identity() {
        let g = two_vertex_graph();
        let (g2, q) = specialize(&g, &spec(&[], &[])).unwrap();
        assert_eq!(g2, g);
        assert!(q.is_isomorphism());
        assert!(q.matrix().is_identity());
    }

    #[test]
    fn contracting_the_only_edge() {
        let g = two_vertex_graph();
        let (g2, q) = specialize(&g, &spec(&["l"], &[])).unwrap();
        assert_eq!(g2.vertices().len(), 1);
        assert_eq!(g2.vertices()[0].id, "v1");
        assert!(!g2.vertices()[0].nondegenerate);
        assert!(g2.edges().is_empty());
        // ℳ(G) = N² surjects onto ℳ(G') = N, killing the edge direction.
        assert_eq!(q.source().rank(), 2);
        assert_eq!(q.target().rank(), 1);
        let m = associated_monoid(&g);
        let el = m.image_of("l:l").unwrap();
        assert!(q.apply(el).iter().all(|x| x.is_zero()));
    }

    #[test]
    fn vanishing_a_vertex() {
        let g = two_vertex_graph();
        let (g2, q) = specialize(&g, &spec(&[], &["v1"])).unwrap();
        assert!(g2.vertices()[0].nondegenerate);
        assert!(!g2.vertices()[1].nondegenerate);
        assert_eq!(g2.edges().len(), 1);
        assert_eq!(q.source().rank(), 2);
        assert_eq!(q.target().rank(), 1);
        // The edge image survives.
        let m = associated_monoid(&g);
        let el = m.image_of("l:l").unwrap();
        assert!(!q.apply(el).iter().all(|x| x.is_zero()));
    }

    #[test]
    fn merged_vertex_takes_smallest_id_and_degree_sum() {
        let mut va = vertex("b", false);
        va.multidegree = Some(2);
        let mut vb = vertex("a", false);
        vb.multidegree = Some(-1);
        let g = MarkedGraph::new(
            vec![va, vb],
            vec![oriented("l", "b", "a", 3)],
            vec![leg("p", "a", 1)],
        )
        .unwrap();
        let (g2, _) = specialize(&g, &spec(&["l"], &[])).unwrap();
        assert_eq!(g2.vertices().len(), 1);
        assert_eq!(g2.vertices()[0].id, "a");
        assert_eq!(g2.vertices()[0].multidegree, Some(1));
        assert_eq!(g2.legs()[0].vertex, "a");
    }

    #[test]
    fn undeclared_killed_edge_is_rejected() {
        // Two parallel edges with equal contact: killing one kills the other.
        let g = MarkedGraph::new(
            vec![vertex("v1", false), vertex("v2", false)],
            vec![oriented("l1", "v1", "v2", 2), oriented("l2", "v1", "v2", 2)],
            vec![],
        )
        .unwrap();
        match specialize(&g, &spec(&["l1"], &[])) {
            Err(SpecializeError::NotAFace(msg)) => assert!(msg.contains("l2")),
            other => panic!("expected NotAFace, got {:?}", other),
        }
        // Declaring both works.
        let (g2, _) = specialize(&g, &spec(&["l1", "l2"], &[])).unwrap();
        assert_eq!(g2.vertices().len(), 1);
    }

    #[test]
    fn vanishing_upstream_kills_downstream_degeneracy() {
        // v1 (V_n) ->(1) v2 ->(1) v3: killing e_l2's source degeneracy region:
        // vanishing v3 alone kills e_v3 = e_l1 + e_l2 image only if both edge
        // images die; the minimal face containing e_v3 contains both edges.
        let g = MarkedGraph::new(
            vec![vertex("v1", true), vertex("v2", false), vertex("v3", false)],
            vec![oriented("l1", "v1", "v2", 1), oriented("l2", "v2", "v3", 1)],
            vec![],
        )
        .unwrap();
        match specialize(&g, &spec(&[], &["v3"])) {
            Err(SpecializeError::NotAFace(_)) => {}
            other => panic!("expected NotAFace, got {:?}", other),
        }
        // Vanishing the whole chain and contracting both edges works.
        let (g2, q) = specialize(&g, &spec(&["l1", "l2"], &["v2", "v3"])).unwrap();
        assert_eq!(g2.vertices().len(), 1);
        assert!(g2.vertices()[0].nondegenerate);
        assert_eq!(q.target().rank(), 0);
    }

    #[test]
    fn unknown_ids_are_invalid() {
        let g = two_vertex_graph();
        assert!(matches!(
            specialize(&g, &spec(&["nope"], &[])),
            Err(SpecializeError::InvalidSpec(_))
        ));
        assert!(matches!(
            specialize(&g, &spec(&[], &["nope"])),
            Err(SpecializeError::InvalidSpec(_))
        ));
        // Vanishing an already nondegenerate vertex is invalid.
        let g2 = MarkedGraph::new(
            vec![vertex("v1", true), vertex("v2", false)],
            vec![oriented("l", "v1", "v2", 1)],
            vec![],
        )
        .unwrap();
        assert!(matches!(
            specialize(&g2, &spec(&[], &["v1"])),
            Err(SpecializeError::InvalidSpec(_))
        ));
    }

    #[test]
    fn contact_zero_edge_contraction() {
        // Two degenerate vertices joined by a contact-zero edge; contracting
        // it merges them and drops the free edge generator.
        let g = MarkedGraph::new(
            vec![vertex("v1", false), vertex("v2", false)],
            vec![unoriented("l", "v1", "v2")],
            vec![],
        )
        .unwrap();
        let m = associated_monoid(&g);
        assert_eq!(m.group.free_rank, 2);
        let (g2, q) = specialize(&g, &spec(&["l"], &[])).unwrap();
        assert_eq!(g2.vertices().len(), 1);
        assert_eq!(q.target().rank(), 1);
    }

    #[test]
    fn chain_contraction_collapses_one_step() {
        // v1 (V_n) ->(2) v2 ->(3) v3; contract l1 merges v1, v2 into a
        // nondegenerate vertex, so l2 then starts at a nondegenerate vertex.
        let g = MarkedGraph::new(
            vec![vertex("v1", true), vertex("v2", false), vertex("v3", false)],
            vec![oriented("l1", "v1", "v2", 2), oriented("l2", "v2", "v3", 3)],
            vec![],
        )
        .unwrap();
        let (g2, q) = specialize(&g, &spec(&["l1"], &["v2"])).unwrap();
        assert_eq!(g2.vertices().len(), 2);
        assert!(g2.vertices()[0].nondegenerate);
        assert_eq!(g2.edges().len(), 1);
        assert_eq!(q.source().rank(), 2);
        assert_eq!(q.target().rank(), 1);
    }
}
