//! Monoid morphisms as integer matrices on the ambient lattices, acting on
//! row vectors from the right, together with the recorded generator images.

use crate::affine::{AffineMonoid, MonoidError};
use crate::cone::in_cone;
use crate::mat::IntMat;
use num_bigint::BigInt;
use num_traits::One;
use std::collections::BTreeSet;

#[derive(Clone, Debug)]
pub struct MonoidMorphism {
    source: AffineMonoid,
    target: AffineMonoid,
    matrix: IntMat,
    generator_images: Vec<Vec<BigInt>>,
}

impl MonoidMorphism {
    /// Builds the morphism x -> x · matrix and checks that every source
    /// generator lands in the target monoid. For a saturated target the
    /// check is exact via the cone; for a sharp unsaturated target it uses
    /// the membership search.
    pub fn new(
        source: AffineMonoid,
        target: AffineMonoid,
        matrix: IntMat,
    ) -> Result<MonoidMorphism, MonoidError> {
        assert_eq!(matrix.rows(), source.rank(), "matrix rows must match source rank");
        assert_eq!(matrix.cols(), target.rank(), "matrix cols must match target rank");
        let generator_images: Vec<Vec<BigInt>> =
            source.generators().iter().map(|g| matrix.apply_row(g)).collect();
        for img in &generator_images {
            let ok = if !target.is_saturated() && target.is_sharp() {
                target.contains(img)?.is_some()
            } else {
                in_cone(img, target.dual_description())
            };
            if !ok {
                return Err(MonoidError::ImageOutsideTarget);
            }
        }
        Ok(MonoidMorphism { source, target, matrix, generator_images })
    }

    pub fn source(&self) -> &AffineMonoid {
        &self.source
    }

    pub fn target(&self) -> &AffineMonoid {
        &self.target
    }

    pub fn matrix(&self) -> &IntMat {
        &self.matrix
    }

    /// Image of each source generator, in generator-list order.
    pub fn generator_images(&self) -> &[Vec<BigInt>] {
        &self.generator_images
    }

    pub fn apply(&self, x: &[BigInt]) -> Vec<BigInt> {
        self.matrix.apply_row(x)
    }

    /// other ∘ self: first this morphism, then the other.
    pub fn compose(&self, other: &MonoidMorphism) -> Result<MonoidMorphism, MonoidError> {
        assert_eq!(
            self.target.rank(),
            other.source.rank(),
            "composition rank mismatch"
        );
        MonoidMorphism::new(
            self.source.clone(),
            other.target.clone(),
            self.matrix.mul(&other.matrix),
        )
    }

    /// True iff the matrix is a lattice isomorphism (square with determinant
    /// ±1; the ambient lattices are free, so there are no torsion invariants
    /// to compare) and the source's minimal generators map bijectively onto
    /// the target's.
    pub fn is_isomorphism(&self) -> bool {
        if self.source.rank() != self.target.rank() {
            return false;
        }
        if !self.matrix.det().magnitude().is_one() {
            return false;
        }
        let (Ok(hs), Ok(ht)) = (self.source.hilbert_basis(), self.target.hilbert_basis())
        else {
            return false;
        };
        let mapped: BTreeSet<Vec<BigInt>> = hs.iter().map(|b| self.apply(b)).collect();
        let tset: BTreeSet<Vec<BigInt>> = ht.into_iter().collect();
        mapped == tset
    }
}
