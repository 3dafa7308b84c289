//! Python bindings: marked graphs, their monoids, morphisms, enumeration,
//! and integer normal forms. Graphs cross the boundary as JSON strings in
//! the same schema the CLI uses; vectors and matrices cross as lists of
//! Python ints, with no precision limit.

use logmap_core::enumerate::{enumerate, EnumerationLimits};
use logmap_core::graph::{degree_balance, distinguished_partition, has_strict_cycle, validate};
use logmap_core::graph_monoid::{associated_monoid, is_admissible, zero_degeneracy};
use logmap_core::jsonio;
use logmap_core::mat::{smith_normal_form, IntMat};
use logmap_core::minimal::{minimality_check, MinimalityError};
use logmap_core::specialize::{specialize, SpecializationSpec, SpecializeError};
use num_bigint::BigInt;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use std::collections::BTreeMap;

#[pyclass(name = "MarkedGraph", frozen)]
struct PyMarkedGraph {
    inner: logmap_core::MarkedGraph,
}

#[pyclass(name = "AffineMonoid", frozen)]
struct PyAffineMonoid {
    inner: logmap_core::AffineMonoid,
}

#[pyclass(name = "AssociatedMonoid", frozen)]
struct PyAssociatedMonoid {
    inner: logmap_core::AssociatedMonoid,
}

#[pyclass(name = "Morphism", frozen)]
struct PyMorphism {
    inner: logmap_core::MonoidMorphism,
}

fn value_err(msg: String) -> PyErr {
    PyValueError::new_err(msg)
}

fn monoid_err(e: logmap_core::MonoidError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

#[pymethods]
impl PyMarkedGraph {
    /// Parse a graph from the JSON schema used by the CLI.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let g = jsonio::parse_marked_graph(text).map_err(|e| value_err(e.to_string()))?;
        Ok(PyMarkedGraph { inner: g })
    }

    fn to_json(&self) -> String {
        jsonio::render(&jsonio::graph_value(&self.inner))
    }

    /// Diagnostic strings; empty means the graph is valid.
    fn validate(&self) -> Vec<String> {
        validate(&self.inner).iter().map(|d| d.to_string()).collect()
    }

    fn has_strict_cycle(&self) -> bool {
        has_strict_cycle(&self.inner)
    }

    fn is_admissible(&self) -> bool {
        is_admissible(&self.inner).is_ok()
    }

    /// Why the graph is not admissible, or None when it is.
    fn admissibility_failure(&self) -> Option<String> {
        is_admissible(&self.inner).err().map(|e| e.to_string())
    }

    /// Id of a degenerate vertex whose degeneracy image is zero, if any.
    fn zero_degeneracy(&self) -> Option<String> {
        zero_degeneracy(&self.inner)
    }

    fn associated_monoid(&self) -> PyAssociatedMonoid {
        PyAssociatedMonoid { inner: associated_monoid(&self.inner) }
    }

    /// (incoming oriented edges, outgoing oriented edges plus positive legs)
    /// at a vertex.
    fn distinguished_partition(&self, vertex: &str) -> PyResult<(Vec<String>, Vec<String>)> {
        if self.inner.vertex(vertex).is_none() {
            return Err(value_err(format!("unknown vertex id {:?}", vertex)));
        }
        Ok(distinguished_partition(&self.inner, vertex))
    }

    fn degree_balance(&self, vertex: &str, multidegree: i64) -> PyResult<bool> {
        if self.inner.vertex(vertex).is_none() {
            return Err(value_err(format!("unknown vertex id {:?}", vertex)));
        }
        Ok(degree_balance(&self.inner, vertex, multidegree))
    }

    /// Contract edges and mark vertices nondegenerate; returns the new
    /// graph and the induced morphism between the monoids.
    #[pyo3(signature = (contract=vec![], vanish=vec![]))]
    fn specialize(
        &self,
        contract: Vec<String>,
        vanish: Vec<String>,
    ) -> PyResult<(PyMarkedGraph, PyMorphism)> {
        let spec = SpecializationSpec { contracted_edges: contract, vanishing_vertices: vanish };
        let (g2, q) = specialize(&self.inner, &spec).map_err(|e| match e {
            SpecializeError::Internal(_) => PyRuntimeError::new_err(e.to_string()),
            _ => value_err(e.to_string()),
        })?;
        Ok((PyMarkedGraph { inner: g2 }, PyMorphism { inner: q }))
    }

    /// Whether the assignment identifies the target with this graph's
    /// monoid. Assignment maps generator names ("v:<id>", "l:<id>") to
    /// integer vectors in the target's lattice.
    fn minimality_check(
        &self,
        target: &PyAffineMonoid,
        assignment: BTreeMap<String, Vec<BigInt>>,
    ) -> PyResult<bool> {
        minimality_check(&self.inner, &target.inner, &assignment).map_err(|e| match e {
            MinimalityError::Internal(_) => PyRuntimeError::new_err(e.to_string()),
            _ => value_err(e.to_string()),
        })
    }

    fn __repr__(&self) -> String {
        format!(
            "MarkedGraph({} vertices, {} edges, {} legs)",
            self.inner.vertices().len(),
            self.inner.edges().len(),
            self.inner.legs().len()
        )
    }
}

#[pymethods]
impl PyAssociatedMonoid {
    #[getter]
    fn rank(&self) -> usize {
        self.inner.group.free_rank
    }

    /// Invariant factors of the torsion part of the presented group.
    #[getter]
    fn torsion(&self) -> Vec<BigInt> {
        self.inner.group.torsion.clone()
    }

    /// The saturated monoid ℳ(G).
    fn monoid(&self) -> PyAffineMonoid {
        PyAffineMonoid { inner: self.inner.saturated.clone() }
    }

    /// The unsaturated monoid N(G) generated by the raw images.
    fn unsaturated(&self) -> PyAffineMonoid {
        PyAffineMonoid { inner: self.inner.unsaturated.clone() }
    }

    fn generator_names(&self) -> Vec<String> {
        self.inner.generator_images.iter().map(|(n, _)| n.clone()).collect()
    }

    fn generator_image(&self, name: &str) -> PyResult<Vec<BigInt>> {
        self.inner
            .image_of(name)
            .map(|v| v.to_vec())
            .ok_or_else(|| value_err(format!("unknown generator {:?}", name)))
    }

    /// Report in the CLI's JSON shape.
    fn to_json(&self) -> String {
        jsonio::render(&jsonio::associated_monoid_value(&self.inner))
    }

    fn __repr__(&self) -> String {
        format!(
            "AssociatedMonoid(rank={}, torsion={:?}, sharp={})",
            self.inner.group.free_rank,
            self.inner.group.torsion.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
            self.inner.saturated.is_sharp()
        )
    }
}

#[pymethods]
impl PyAffineMonoid {
    /// Monoid generated by integer vectors inside Z^rank.
    #[staticmethod]
    fn from_generators(rank: usize, generators: Vec<Vec<BigInt>>) -> PyResult<Self> {
        for g in &generators {
            if g.len() != rank {
                return Err(value_err(format!(
                    "generator {:?} does not have {} coordinates",
                    g.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                    rank
                )));
            }
        }
        Ok(PyAffineMonoid { inner: logmap_core::AffineMonoid::from_generators(rank, generators) })
    }

    #[getter]
    fn rank(&self) -> usize {
        self.inner.rank()
    }

    fn generators(&self) -> Vec<Vec<BigInt>> {
        self.inner.generators().to_vec()
    }

    fn is_sharp(&self) -> bool {
        self.inner.is_sharp()
    }

    fn is_saturated(&self) -> bool {
        self.inner.is_saturated()
    }

    /// Supporting hyperplane normals of the generated cone.
    fn dual_description(&self) -> Vec<Vec<BigInt>> {
        self.inner.dual_description().to_vec()
    }

    fn extremal_rays(&self) -> PyResult<Vec<Vec<BigInt>>> {
        Ok(self.inner.extremal_rays().map_err(monoid_err)?.to_vec())
    }

    fn hilbert_basis(&self) -> PyResult<Vec<Vec<BigInt>>> {
        self.inner.hilbert_basis().map_err(monoid_err)
    }

    fn saturate(&self) -> PyAffineMonoid {
        PyAffineMonoid { inner: self.inner.saturate().clone() }
    }

    /// Expansion of x over the generators, or None when x is not a member.
    fn contains(&self, x: Vec<BigInt>) -> PyResult<Option<Vec<BigInt>>> {
        if x.len() != self.inner.rank() {
            return Err(value_err(format!("expected {} coordinates", self.inner.rank())));
        }
        self.inner.contains(&x).map_err(monoid_err)
    }

    /// Smallest m >= 1 with m*a in the monoid, plus the witness expansion.
    #[pyo3(signature = (a, cap=64))]
    fn multiple_in_unsaturated(&self, a: Vec<BigInt>, cap: u32) -> PyResult<(u32, Vec<BigInt>)> {
        if a.len() != self.inner.rank() {
            return Err(value_err(format!("expected {} coordinates", self.inner.rank())));
        }
        self.inner.multiple_in_unsaturated(&a, cap).map_err(monoid_err)
    }

    /// Quotient by the face spanned by the given Hilbert basis elements.
    fn face_quotient(&self, face: Vec<Vec<BigInt>>) -> PyResult<(PyAffineMonoid, PyMorphism)> {
        let (q, f) = self.inner.face_quotient(&face).map_err(monoid_err)?;
        Ok((PyAffineMonoid { inner: q }, PyMorphism { inner: f }))
    }

    fn __repr__(&self) -> String {
        format!(
            "AffineMonoid(rank={}, generators={}, sharp={}, saturated={})",
            self.inner.rank(),
            self.inner.generators().len(),
            self.inner.is_sharp(),
            self.inner.is_saturated()
        )
    }
}

#[pymethods]
impl PyMorphism {
    /// Matrix rows indexed by source coordinates: x maps to x @ matrix.
    fn matrix(&self) -> Vec<Vec<BigInt>> {
        self.inner.matrix().to_rows()
    }

    fn apply(&self, x: Vec<BigInt>) -> PyResult<Vec<BigInt>> {
        if x.len() != self.inner.source().rank() {
            return Err(value_err(format!("expected {} coordinates", self.inner.source().rank())));
        }
        Ok(self.inner.apply(&x))
    }

    fn source(&self) -> PyAffineMonoid {
        PyAffineMonoid { inner: self.inner.source().clone() }
    }

    fn target(&self) -> PyAffineMonoid {
        PyAffineMonoid { inner: self.inner.target().clone() }
    }

    fn is_isomorphism(&self) -> bool {
        self.inner.is_isomorphism()
    }

    fn compose(&self, other: &PyMorphism) -> PyResult<PyMorphism> {
        self.inner
            .compose(&other.inner)
            .map(|m| PyMorphism { inner: m })
            .map_err(monoid_err)
    }

    fn __repr__(&self) -> String {
        format!(
            "Morphism(source_rank={}, target_rank={})",
            self.inner.source().rank(),
            self.inner.target().rank()
        )
    }
}

/// Enumerate admissible decorations of an undecorated dual graph given as
/// JSON. Returns (graphs, complete).
#[pyfunction]
#[pyo3(signature = (input_json, max_solutions=None, max_contact=None))]
fn enumerate_decorations(
    input_json: &str,
    max_solutions: Option<usize>,
    max_contact: Option<u64>,
) -> PyResult<(Vec<PyMarkedGraph>, bool)> {
    let input = jsonio::parse_dual_input(input_json).map_err(|e| value_err(e.to_string()))?;
    let defaults = EnumerationLimits::defaults_for(&input);
    let limits = EnumerationLimits {
        max_solutions: max_solutions.unwrap_or(defaults.max_solutions),
        max_contact: max_contact.unwrap_or(defaults.max_contact),
    };
    if limits.max_solutions < 1 || limits.max_contact < 1 {
        return Err(value_err("limits must be at least 1".to_string()));
    }
    let result = enumerate(&input, &limits).map_err(|e| value_err(e.to_string()))?;
    Ok((
        result.solutions.into_iter().map(|g| PyMarkedGraph { inner: g }).collect(),
        result.complete,
    ))
}

type Rows = Vec<Vec<BigInt>>;

/// Smith normal form: returns (u, d, v) with u @ a @ v == d, u and v
/// unimodular, and the diagonal of d a divisibility chain.
#[pyfunction]
fn smith(a: Rows) -> PyResult<(Rows, Rows, Rows)> {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    if a.iter().any(|r| r.len() != cols) {
        return Err(value_err("matrix rows must all have the same length".to_string()));
    }
    let m = if rows == 0 { IntMat::zero(0, 0) } else { IntMat::from_rows(a) };
    let s = smith_normal_form(&m);
    Ok((s.u.to_rows(), s.d.to_rows(), s.v.to_rows()))
}

#[pymodule]
fn logmap_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyMarkedGraph>()?;
    m.add_class::<PyAffineMonoid>()?;
    m.add_class::<PyAssociatedMonoid>()?;
    m.add_class::<PyMorphism>()?;
    m.add_function(wrap_pyfunction!(enumerate_decorations, m)?)?;
    m.add_function(wrap_pyfunction!(smith, m)?)?;
    Ok(())
}
