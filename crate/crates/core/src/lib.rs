//! Exact combinatorics of degenerating maps to a divisor: affine monoids
//! presented by generators and relations, marked dual graphs with contact
//! orders and partial orientations, and enumeration of such graphs under
//! fixed discrete data.
//!
//! All arithmetic is arbitrary-precision integer arithmetic; there is no
//! floating point anywhere in the crate.

pub mod affine;
pub mod cone;
pub mod enumerate;
pub mod graph;
pub mod graph_monoid;
pub mod jsonio;
pub mod mat;
pub mod minimal;
pub mod morphism;
pub mod presentation;
pub mod specialize;

pub use affine::{AffineMonoid, MonoidError};
pub use enumerate::{
    brute_force_enumerate, check_input, enumerate, DualEdge, DualGraphInput, DualLeg, DualVertex,
    EnumerateError, Enumeration, EnumerationLimits,
};
pub use graph::{
    degree_balance, distinguished_partition, has_strict_cycle, validate, Diagnostic, Edge, Leg,
    MarkedGraph, Vertex,
};
pub use graph_monoid::{
    admissibility_of, associated_monoid, degeneracies, is_admissible, zero_degeneracy,
    AssociatedMonoid, Inadmissibility,
};
pub use mat::{smith_normal_form, IntMat, Smith};
pub use minimal::{minimality_check, MinimalityError};
pub use morphism::MonoidMorphism;
pub use presentation::{GroupData, MonoidPresentation, Relation};
pub use specialize::{
    specialize, specialize_with_monoid, SpecializationSpec, SpecializeError,
};
