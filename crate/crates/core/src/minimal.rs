//! The minimality test: given a marked graph, a candidate monoid, and an
//! assignment of target vectors to the presentation generators, decide
//! whether the induced map ℳ(G) → target is an isomorphism. The target is
//! always a concrete embedded monoid and the map is the one the assignment
//! induces; no search over abstract isomorphisms happens here.

use crate::affine::{AffineMonoid, MonoidError};
use crate::graph::MarkedGraph;
use crate::graph_monoid::associated_monoid;
use crate::mat::{solve_right, IntMat};
use crate::morphism::MonoidMorphism;
use num_bigint::BigInt;
use num_traits::Zero;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MinimalityError {
    #[error("target monoid is not sharp")]
    TargetNotSharp,
    #[error("target monoid is not saturated")]
    TargetNotSaturated,
    #[error("assignment is missing generator {0:?}")]
    MissingGenerator(String),
    #[error("assignment names unknown generator {0:?}")]
    UnknownGenerator(String),
    #[error("assignment for {name:?} has {got} coordinates, target has rank {expected}")]
    WrongDimension { name: String, expected: usize, got: usize },
    #[error("relation {0:?} is violated by the assignment")]
    RelationViolated(String),
    #[error("internal: {0}")]
    Internal(String),
}

/// Checks whether the assignment turns `target` into the monoid attached to
/// `g` via the canonical map. The assignment must cover every presentation
/// generator (`v:<id>` and `l:<id>` names) and satisfy every presentation
/// relation; violating a relation is an input error naming the relation,
/// while an assignment that respects the relations but fails to be an
/// isomorphism (or to land in the target at all) is just a `false` verdict.
pub fn minimality_check(
    g: &MarkedGraph,
    target: &AffineMonoid,
    assignment: &BTreeMap<String, Vec<BigInt>>,
) -> Result<bool, MinimalityError> {
    if !target.is_sharp() {
        return Err(MinimalityError::TargetNotSharp);
    }
    if !target.is_saturated() {
        return Err(MinimalityError::TargetNotSaturated);
    }
    let m = associated_monoid(g);
    let gens = &m.presentation.generators;
    for name in assignment.keys() {
        if !gens.contains(name) {
            return Err(MinimalityError::UnknownGenerator(name.clone()));
        }
    }
    let mut assigned: Vec<Vec<BigInt>> = Vec::with_capacity(gens.len());
    for name in gens {
        let v = assignment
            .get(name)
            .ok_or_else(|| MinimalityError::MissingGenerator(name.clone()))?;
        if v.len() != target.rank() {
            return Err(MinimalityError::WrongDimension {
                name: name.clone(),
                expected: target.rank(),
                got: v.len(),
            });
        }
        assigned.push(v.clone());
    }

    for rel in &m.presentation.relations {
        let eval = |coeffs: &[BigInt]| -> Vec<BigInt> {
            let mut acc = vec![BigInt::zero(); target.rank()];
            for (c, v) in coeffs.iter().zip(&assigned) {
                if !c.is_zero() {
                    for (a, x) in acc.iter_mut().zip(v) {
                        *a += c * x;
                    }
                }
            }
            acc
        };
        if eval(&rel.lhs) != eval(&rel.rhs) {
            return Err(MinimalityError::RelationViolated(rel.name.clone()));
        }
    }

    // The assignment respects the relations and the target lattice is
    // torsion free, so it factors through the generator images; the matrix
    // realizing that factorization always exists over the integers.
    let source_mat =
        IntMat::from_rows_with_cols(m.group.free_images.clone(), m.group.free_rank);
    let assign_mat = IntMat::from_rows_with_cols(assigned, target.rank());
    let a = solve_right(&source_mat, &assign_mat).ok_or_else(|| {
        MinimalityError::Internal("assignment does not factor through the monoid".to_string())
    })?;
    match MonoidMorphism::new(m.saturated.clone(), target.clone(), a) {
        Ok(phi) => Ok(phi.is_isomorphism()),
        Err(MonoidError::ImageOutsideTarget) => Ok(false),
        Err(e) => Err(MinimalityError::Internal(e.to_string())),
    }
}
