//! The monoid attached to a marked graph: one generator per vertex and per
//! edge, relations killing nondegenerate vertices and propagating contact
//! orders along oriented edges, then the torsion-free image and its
//! saturation.

use crate::affine::AffineMonoid;
use crate::graph::MarkedGraph;
use crate::presentation::{relation, GroupData, MonoidPresentation, Relation};
use num_bigint::BigInt;
use num_traits::Zero;

/// Generator names are "v:<id>" for vertices and "l:<id>" for edges, in that
/// order, each block sorted lexicographically by id.
pub fn presentation_of(g: &MarkedGraph) -> MonoidPresentation {
    let mut vertex_ids: Vec<&str> = g.vertices().iter().map(|v| v.id.as_str()).collect();
    vertex_ids.sort_unstable();
    let mut edge_ids: Vec<&str> = g.edges().iter().map(|e| e.id.as_str()).collect();
    edge_ids.sort_unstable();

    let mut names: Vec<String> = Vec::with_capacity(vertex_ids.len() + edge_ids.len());
    names.extend(vertex_ids.iter().map(|id| format!("v:{}", id)));
    names.extend(edge_ids.iter().map(|id| format!("l:{}", id)));
    let n = names.len();
    let index = |name: &str| names.iter().position(|x| x == name).unwrap();

    let unit = |i: usize| {
        let mut v = vec![BigInt::zero(); n];
        v[i] = BigInt::from(1);
        v
    };

    let mut relations: Vec<Relation> = Vec::new();
    for id in &vertex_ids {
        let v = g.vertex(id).unwrap();
        if v.nondegenerate {
            relations.push(relation(
                &format!("h_v:{}", id),
                unit(index(&format!("v:{}", id))),
                vec![BigInt::zero(); n],
            ));
        }
    }
    for id in &edge_ids {
        let e = g.edge(id).unwrap();
        let el = index(&format!("l:{}", id));
        match &e.orientation {
            Some((init, end)) => {
                // e_end = e_init + c_l · e_l
                let lhs = unit(index(&format!("v:{}", end)));
                let mut rhs = unit(index(&format!("v:{}", init)));
                rhs[el] = BigInt::from(e.contact_order);
                relations.push(relation(&format!("h_l:{}", id), lhs, rhs));
            }
            None => {
                // e_u = e_w; the edge generator stays free.
                let lhs = unit(index(&format!("v:{}", e.ends.0)));
                let rhs = unit(index(&format!("v:{}", e.ends.1)));
                relations.push(relation(&format!("h_l:{}", id), lhs, rhs));
            }
        }
    }
    MonoidPresentation::new(names, relations)
}

/// The full monoid package of a marked graph.
pub struct AssociatedMonoid {
    pub presentation: MonoidPresentation,
    pub group: GroupData,
    /// N(G): the image of the presentation in the torsion-free quotient.
    pub unsaturated: AffineMonoid,
    /// ℳ(G) = saturate(N(G)).
    pub saturated: AffineMonoid,
    /// Per generator (presentation order): its vector in ℳ(G)'s lattice.
    pub generator_images: Vec<(String, Vec<BigInt>)>,
}

pub fn associated_monoid(g: &MarkedGraph) -> AssociatedMonoid {
    let presentation = presentation_of(g);
    let group = presentation.groupify();
    let unsaturated =
        AffineMonoid::from_generators(group.free_rank, group.free_images.clone());
    let saturated = unsaturated.saturate();
    let generator_images = presentation
        .generators
        .iter()
        .cloned()
        .zip(group.free_images.iter().cloned())
        .collect();
    AssociatedMonoid { presentation, group, unsaturated, saturated, generator_images }
}

impl AssociatedMonoid {
    pub fn image_of(&self, name: &str) -> Option<&[BigInt]> {
        self.generator_images
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_slice())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Inadmissibility {
    /// The associated monoid has a nonzero unit.
    NotSharp,
    /// The named edge generator maps to zero.
    ZeroEdgeImage(String),
    /// Opt-in check: the named degenerate vertex has zero degeneracy.
    ZeroDegeneracy(String),
}

impl std::fmt::Display for Inadmissibility {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Inadmissibility::NotSharp => write!(f, "NotSharp"),
            Inadmissibility::ZeroEdgeImage(id) => write!(f, "ZeroEdgeImage:{}", id),
            Inadmissibility::ZeroDegeneracy(id) => write!(f, "ZeroDegeneracy:{}", id),
        }
    }
}

/// Admissibility read from a monoid that is already built: the saturation
/// spans the same cone as N(G), so sharpness can be read off either, and a
/// generator image is zero in ℳ(G) iff its torsion-free vector is zero.
pub fn admissibility_of(m: &AssociatedMonoid) -> Result<(), Inadmissibility> {
    if !m.unsaturated.is_sharp() {
        return Err(Inadmissibility::NotSharp);
    }
    for (name, img) in &m.generator_images {
        if let Some(edge_id) = name.strip_prefix("l:") {
            if img.iter().all(|x| x.is_zero()) {
                return Err(Inadmissibility::ZeroEdgeImage(edge_id.to_string()));
            }
        }
    }
    Ok(())
}

/// Admissibility from scratch, sharing the reasoning of `admissibility_of`.
pub fn is_admissible(g: &MarkedGraph) -> Result<(), Inadmissibility> {
    let presentation = presentation_of(g);
    let group = presentation.groupify();
    let n = AffineMonoid::from_generators(group.free_rank, group.free_images.clone());
    if !n.is_sharp() {
        return Err(Inadmissibility::NotSharp);
    }
    for (name, img) in presentation.generators.iter().zip(&group.free_images) {
        if let Some(edge_id) = name.strip_prefix("l:") {
            if img.iter().all(|x| x.is_zero()) {
                return Err(Inadmissibility::ZeroEdgeImage(edge_id.to_string()));
            }
        }
    }
    Ok(())
}

/// The opt-in degeneracy check: every degenerate vertex should have nonzero
/// image (not required by admissibility itself).
pub fn zero_degeneracy(g: &MarkedGraph) -> Option<String> {
    let presentation = presentation_of(g);
    let group = presentation.groupify();
    for (name, img) in presentation.generators.iter().zip(&group.free_images) {
        if let Some(vertex_id) = name.strip_prefix("v:") {
            let degenerate = g.vertex(vertex_id).map(|v| !v.nondegenerate).unwrap_or(false);
            if degenerate && img.iter().all(|x| x.is_zero()) {
                return Some(vertex_id.to_string());
            }
        }
    }
    None
}

/// image(e_v) for every vertex, in lexicographic id order.
pub fn degeneracies(g: &MarkedGraph) -> Vec<(String, Vec<BigInt>)> {
    let presentation = presentation_of(g);
    let group = presentation.groupify();
    presentation
        .generators
        .iter()
        .zip(&group.free_images)
        .filter_map(|(name, img)| {
            name.strip_prefix("v:").map(|id| (id.to_string(), img.clone()))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::tests::{leg, oriented, unoriented, vertex};
    use crate::graph::MarkedGraph;
    use crate::mat::big;

    fn chain_graph() -> MarkedGraph {
        MarkedGraph::new(
            vec![vertex("v1", true), vertex("v2", false)],
            vec![oriented("l", "v1", "v2", 1)],
            vec![],
        )
        .unwrap()
    }

    #[test]
    fn one_edge_chain_gives_n() {
        let m = associated_monoid(&chain_graph());
        assert_eq!(m.group.free_rank, 1);
        assert!(m.group.torsion.is_empty());
        assert_eq!(m.saturated.hilbert_basis().unwrap(), vec![vec![big(1)]]);
        assert_eq!(m.image_of("v:v1").unwrap(), &[big(0)][..]);
        // e_v2 = e_l = the generator.
        assert_eq!(m.image_of("v:v2"), m.image_of("l:l"));
        assert!(!m.image_of("l:l").unwrap()[0].is_zero());
        assert!(is_admissible(&chain_graph()).is_ok());
    }

    #[test]
    fn parallel_mixed_contacts() {
        // Both vertices degenerate; edges v1 -> v2 with contacts 1 and 2.
        let g = MarkedGraph::new(
            vec![vertex("v1", false), vertex("v2", false)],
            vec![oriented("l1", "v1", "v2", 1), oriented("l2", "v1", "v2", 2)],
            vec![],
        )
        .unwrap();
        let m = associated_monoid(&g);
        assert_eq!(m.group.free_rank, 2);
        assert!(m.group.torsion.is_empty());
        assert_eq!(m.saturated.hilbert_basis().unwrap().len(), 2);
        let l1 = m.image_of("l:l1").unwrap();
        let l2 = m.image_of("l:l2").unwrap();
        let doubled: Vec<BigInt> = l2.iter().map(|x| x * big(2)).collect();
        assert_eq!(l1, &doubled[..]);
    }

    #[test]
    fn parallel_equal_contacts_torsion() {
        let g = MarkedGraph::new(
            vec![vertex("v1", false), vertex("v2", false)],
            vec![oriented("l1", "v1", "v2", 2), oriented("l2", "v1", "v2", 2)],
            vec![],
        )
        .unwrap();
        let m = associated_monoid(&g);
        assert_eq!(m.group.free_rank, 2);
        assert_eq!(m.group.torsion, vec![big(2)]);
        // The two edge generators agree in ℳ(G) (their difference is torsion).
        assert_eq!(m.image_of("l:l1"), m.image_of("l:l2"));
    }

    #[test]
    fn opposite_edges_are_not_sharp() {
        let g = MarkedGraph::new(
            vec![vertex("v1", false), vertex("v2", false)],
            vec![oriented("l1", "v1", "v2", 1), oriented("l2", "v2", "v1", 1)],
            vec![],
        )
        .unwrap();
        assert_eq!(is_admissible(&g), Err(Inadmissibility::NotSharp));
    }

    #[test]
    fn contact_zero_edge_between_nondegenerate_vertices() {
        let g = MarkedGraph::new(
            vec![vertex("v1", true), vertex("v2", true)],
            vec![unoriented("l", "v1", "v2")],
            vec![],
        )
        .unwrap();
        assert!(is_admissible(&g).is_ok());
        let m = associated_monoid(&g);
        // Everything dies except the free edge generator.
        assert_eq!(m.group.free_rank, 1);
        assert_eq!(m.image_of("v:v1").unwrap(), &[big(0)][..]);
        assert!(!m.image_of("l:l").unwrap()[0].is_zero());
    }

    #[test]
    fn zero_degeneracy_detection() {
        // Degenerate v2 tied to nondegenerate v1 by a contact-zero edge:
        // admissible, but v2 has zero degeneracy.
        let g = MarkedGraph::new(
            vec![vertex("v1", true), vertex("v2", false)],
            vec![unoriented("l", "v1", "v2")],
            vec![],
        )
        .unwrap();
        assert!(is_admissible(&g).is_ok());
        assert_eq!(zero_degeneracy(&g), Some("v2".to_string()));
        assert_eq!(zero_degeneracy(&chain_graph()), None);
    }

    #[test]
    fn degeneracies_respect_oriented_relations() {
        // v1 (V_n) ->(1) v2 ->(3) v3.
        let g = MarkedGraph::new(
            vec![vertex("v1", true), vertex("v2", false), vertex("v3", false)],
            vec![oriented("l1", "v1", "v2", 1), oriented("l2", "v2", "v3", 3)],
            vec![leg("p", "v3", 0)],
        )
        .unwrap();
        let m = associated_monoid(&g);
        let degs = degeneracies(&g);
        assert_eq!(degs.len(), 3);
        for (id, img) in &degs {
            assert_eq!(m.image_of(&format!("v:{}", id)).unwrap(), &img[..]);
        }
        for e in g.edges() {
            let (init, end) = e.orientation.as_ref().unwrap();
            let ei = m.image_of(&format!("v:{}", init)).unwrap();
            let ee = m.image_of(&format!("v:{}", end)).unwrap();
            let el = m.image_of(&format!("l:{}", e.id)).unwrap();
            let expect: Vec<BigInt> = ei
                .iter()
                .zip(el)
                .map(|(a, b)| a + b * big(e.contact_order as i64))
                .collect();
            assert_eq!(ee, &expect[..]);
        }
        // degeneracy(v2) = image(e_l1), degeneracy(v3) = image(e_l1) + 3·image(e_l2).
        let l1 = m.image_of("l:l1").unwrap();
        let l2 = m.image_of("l:l2").unwrap();
        let v3: Vec<BigInt> =
            l1.iter().zip(l2).map(|(a, b)| a + b * big(3)).collect();
        assert_eq!(m.image_of("v:v2").unwrap(), l1);
        assert_eq!(m.image_of("v:v3").unwrap(), &v3[..]);
    }

    #[test]
    fn chain_with_contact_two() {
        let g = MarkedGraph::new(
            vec![vertex("v1", true), vertex("v2", false)],
            vec![oriented("l", "v1", "v2", 2)],
            vec![],
        )
        .unwrap();
        let m = associated_monoid(&g);
        let l = m.image_of("l:l").unwrap();
        let twice: Vec<BigInt> = l.iter().map(|x| x * big(2)).collect();
        assert_eq!(m.image_of("v:v2").unwrap(), &twice[..]);
        // N(G) is generated by {2, 1} up to sign, so already saturated... it
        // contains the edge image, which is primitive.
        assert!(m.unsaturated.is_sharp());
    }

    #[test]
    fn strict_cycle_graph_is_not_sharp() {
        use crate::graph::has_strict_cycle;
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
        assert!(has_strict_cycle(&g));
        assert_eq!(is_admissible(&g), Err(Inadmissibility::NotSharp));
    }

    #[test]
    fn relabeling_preserves_invariants() {
        let g1 = MarkedGraph::new(
            vec![vertex("a", true), vertex("b", false)],
            vec![oriented("x", "a", "b", 2), unoriented("y", "a", "b")],
            vec![leg("p", "b", 1)],
        )
        .unwrap();
        let g2 = MarkedGraph::new(
            vec![vertex("zz", true), vertex("m", false)],
            vec![oriented("q", "zz", "m", 2), unoriented("a", "zz", "m")],
            vec![leg("r", "m", 1)],
        )
        .unwrap();
        let m1 = associated_monoid(&g1);
        let m2 = associated_monoid(&g2);
        assert_eq!(m1.group.free_rank, m2.group.free_rank);
        assert_eq!(m1.group.torsion, m2.group.torsion);
        assert_eq!(
            m1.saturated.hilbert_basis().unwrap().len(),
            m2.saturated.hilbert_basis().unwrap().len()
        );
        assert_eq!(is_admissible(&g1).is_ok(), is_admissible(&g2).is_ok());
    }
}
