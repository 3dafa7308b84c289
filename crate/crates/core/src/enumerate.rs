//! Enumeration of admissible decorations: given an undecorated dual graph
//! with multidegrees and leg contact orders, list every choice of edge
//! orientations and contact orders that balances the degree at each vertex
//! and yields an admissible marked graph. The search branches over per-edge
//! status (non-oriented, or one of two directions), prunes directed cycles
//! through the condensation of the non-oriented part, and then solves the
//! balance equations vertex by vertex starting from maximal vertices.

use crate::graph::{degree_balance, validate, Edge, Leg, MarkedGraph, UnionFind, Vertex};
use crate::graph_monoid::is_admissible;
use rayon::prelude::*;
use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualVertex {
    pub id: String,
    pub nondegenerate: bool,
    pub multidegree: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualEdge {
    pub id: String,
    pub ends: (String, String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualLeg {
    pub id: String,
    pub vertex: String,
    pub contact_order: u64,
}

/// An undecorated connected dual graph: vertices with multidegrees and
/// nondegeneracy flags, unoriented edges without contact data, and legs with
/// fixed contact orders.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualGraphInput {
    vertices: Vec<DualVertex>,
    edges: Vec<DualEdge>,
    legs: Vec<DualLeg>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EnumerateError {
    #[error("degree mismatch: multidegrees sum to {degree_sum}, leg contact orders sum to {contact_sum}")]
    DegreeMismatch { degree_sum: i128, contact_sum: i128 },
    #[error("input graph is not connected")]
    Disconnected,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnumerationLimits {
    pub max_solutions: usize,
    pub max_contact: u64,
}

/// The result list plus a completeness flag; `complete` is false exactly
/// when a limit cut the search short, in which case the solutions present
/// are still correct but possibly not all of them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enumeration {
    pub solutions: Vec<MarkedGraph>,
    pub complete: bool,
}

impl DualGraphInput {
    pub fn new(
        vertices: Vec<DualVertex>,
        edges: Vec<DualEdge>,
        legs: Vec<DualLeg>,
    ) -> Result<DualGraphInput, String> {
        if vertices.is_empty() {
            return Err("a graph needs at least one vertex".to_string());
        }
        let check_id = |id: &str, what: &str| -> Result<(), String> {
            if id.is_empty() || !id.is_ascii() {
                return Err(format!("{} id {:?} must be nonempty ASCII", what, id));
            }
            Ok(())
        };
        let mut seen = BTreeSet::new();
        for v in &vertices {
            check_id(&v.id, "vertex")?;
            if !seen.insert(&v.id) {
                return Err(format!("duplicate vertex id {:?}", v.id));
            }
        }
        let vertex_ids: BTreeSet<&str> = vertices.iter().map(|v| v.id.as_str()).collect();
        let mut seen = BTreeSet::new();
        for e in &edges {
            check_id(&e.id, "edge")?;
            if !seen.insert(&e.id) {
                return Err(format!("duplicate edge id {:?}", e.id));
            }
            for end in [&e.ends.0, &e.ends.1] {
                if !vertex_ids.contains(end.as_str()) {
                    return Err(format!("edge {:?} references unknown vertex {:?}", e.id, end));
                }
            }
        }
        let mut seen = BTreeSet::new();
        for l in &legs {
            check_id(&l.id, "leg")?;
            if !seen.insert(&l.id) {
                return Err(format!("duplicate leg id {:?}", l.id));
            }
            if !vertex_ids.contains(l.vertex.as_str()) {
                return Err(format!("leg {:?} references unknown vertex {:?}", l.id, l.vertex));
            }
        }
        Ok(DualGraphInput { vertices, edges, legs })
    }

    pub fn vertices(&self) -> &[DualVertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[DualEdge] {
        &self.edges
    }

    pub fn legs(&self) -> &[DualLeg] {
        &self.legs
    }

    /// Σ |d_v| + Σ c_i: no admissible decoration puts a larger contact order
    /// on any single edge. Summing the balance over the set of vertices
    /// reachable from an edge's head shows the edge's contact is at most
    /// that set's degree total plus its leg contacts.
    pub fn contact_bound(&self) -> u64 {
        let b: i128 = self.vertices.iter().map(|v| (v.multidegree as i128).abs()).sum::<i128>()
            + self.legs.iter().map(|l| l.contact_order as i128).sum::<i128>();
        u64::try_from(b).unwrap_or(u64::MAX)
    }
}

impl EnumerationLimits {
    /// 10000 solutions, and a contact cap just above the largest value any
    /// solution can attain, so nothing is cut off by default.
    pub fn defaults_for(input: &DualGraphInput) -> EnumerationLimits {
        EnumerationLimits {
            max_solutions: 10000,
            max_contact: input.contact_bound().saturating_add(1),
        }
    }
}

/// Connectivity and the global degree constraint Σ d_v + Σ c_i = 0.
pub fn check_input(input: &DualGraphInput) -> Result<(), EnumerateError> {
    let degree_sum: i128 = input.vertices.iter().map(|v| v.multidegree as i128).sum();
    let contact_sum: i128 = input.legs.iter().map(|l| l.contact_order as i128).sum();
    if degree_sum + contact_sum != 0 {
        return Err(EnumerateError::DegreeMismatch { degree_sum, contact_sum });
    }
    let index: BTreeMap<&str, usize> =
        input.vertices.iter().enumerate().map(|(i, v)| (v.id.as_str(), i)).collect();
    let mut uf = UnionFind::new(input.vertices.len());
    for e in &input.edges {
        uf.union(index[e.ends.0.as_str()], index[e.ends.1.as_str()]);
    }
    let root = uf.find(0);
    if (1..input.vertices.len()).any(|i| uf.find(i) != root) {
        return Err(EnumerateError::Disconnected);
    }
    Ok(())
}

// Per-edge status in a branch of the search.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Status {
    None,
    Fwd, // ends.0 -> ends.1
    Bwd, // ends.1 -> ends.0
}

/// (edge id, orientation code, contact order) triples, sorted: equal graphs
/// over the same input have equal forms.
fn canonical_form(g: &MarkedGraph) -> Vec<(String, u8, u64)> {
    let mut form: Vec<(String, u8, u64)> = g
        .edges()
        .iter()
        .map(|e| {
            let code = match &e.orientation {
                None => 0,
                Some((a, _)) if *a == e.ends.0 && e.ends.0 != e.ends.1 => 1,
                Some(_) => 2,
            };
            (e.id.clone(), code, e.contact_order)
        })
        .collect();
    form.sort();
    form
}

// Everything fixed for one input, shared across branches.
struct SearchContext<'a> {
    input: &'a DualGraphInput,
    // Per vertex: sum of leg contact orders.
    leg_sums: Vec<i128>,
    // Edge endpoints as vertex indices.
    ends: Vec<(usize, usize)>,
    // Indices of non-loop edges (the branched ones).
    branched: Vec<usize>,
    // min(max_contact, analytic bound): values above this never appear.
    eff_bound: i128,
    // True when max_contact is the binding part of eff_bound, so clipping
    // may actually lose solutions.
    cap_can_cut: bool,
    per_branch_cap: usize,
}

struct BranchOutcome {
    solutions: Vec<MarkedGraph>,
    cap_hit: bool,
    truncated: bool,
}

/// All admissible decorations of `input`, canonically sorted, subject to
/// `limits`. Deterministic for fixed input and limits, however many threads
/// run the search.
pub fn enumerate(
    input: &DualGraphInput,
    limits: &EnumerationLimits,
) -> Result<Enumeration, EnumerateError> {
    assert!(limits.max_solutions >= 1 && limits.max_contact >= 1, "limits must be positive");
    check_input(input)?;

    let vertex_index: BTreeMap<&str, usize> =
        input.vertices.iter().enumerate().map(|(i, v)| (v.id.as_str(), i)).collect();
    let mut leg_sums = vec![0i128; input.vertices.len()];
    for l in &input.legs {
        leg_sums[vertex_index[l.vertex.as_str()]] += l.contact_order as i128;
    }
    let ends: Vec<(usize, usize)> = input
        .edges
        .iter()
        .map(|e| (vertex_index[e.ends.0.as_str()], vertex_index[e.ends.1.as_str()]))
        .collect();
    let branched: Vec<usize> =
        (0..input.edges.len()).filter(|&i| ends[i].0 != ends[i].1).collect();
    let analytic = input.contact_bound();
    let ctx = SearchContext {
        input,
        leg_sums,
        ends,
        branched,
        eff_bound: limits.max_contact.min(analytic) as i128,
        cap_can_cut: limits.max_contact < analytic,
        per_branch_cap: limits.max_solutions.saturating_add(1),
    };

    // Branches are explored in canonical order (base-3 digits over the
    // non-loop edges); chunks run in parallel but merge in that order, so
    // the outcome does not depend on scheduling. The pattern budget is a
    // safety valve against astronomically large branch spaces; hitting it
    // flags the result incomplete instead of hanging.
    const PATTERN_BUDGET: u128 = 20_000_000;
    const CHUNK: u128 = 4096;
    let total: u128 =
        3u128.checked_pow(ctx.branched.len() as u32).expect("branch count fits in u128");
    let mut by_form: BTreeMap<Vec<(String, u8, u64)>, MarkedGraph> = BTreeMap::new();
    let mut complete = true;
    let mut start: u128 = 0;
    let budget_end = total.min(PATTERN_BUDGET);
    while start < budget_end {
        let stop = (start + CHUNK).min(budget_end);
        let chunk: Vec<u128> = (start..stop).collect();
        let outcomes: Vec<BranchOutcome> =
            chunk.into_par_iter().map(|k| explore_branch(&ctx, k)).collect();
        for o in outcomes {
            if o.cap_hit || o.truncated {
                complete = false;
            }
            for g in o.solutions {
                by_form.insert(canonical_form(&g), g);
            }
        }
        start = stop;
        if by_form.len() > limits.max_solutions {
            complete = false;
            break;
        }
    }
    if start < total {
        complete = false;
    }
    let mut solutions: Vec<MarkedGraph> = by_form.into_values().collect();
    solutions.truncate(limits.max_solutions);
    Ok(Enumeration { solutions, complete })
}

fn explore_branch(ctx: &SearchContext, pattern: u128) -> BranchOutcome {
    let mut out = BranchOutcome { solutions: Vec::new(), cap_hit: false, truncated: false };
    let ne = ctx.input.edges.len();
    let nv = ctx.input.vertices.len();
    let mut status = vec![Status::None; ne];
    let mut k = pattern;
    for &i in &ctx.branched {
        status[i] = match k % 3 {
            0 => Status::None,
            1 => Status::Fwd,
            _ => Status::Bwd,
        };
        k /= 3;
    }
    let arc_of = |i: usize| -> Option<(usize, usize)> {
        match status[i] {
            Status::None => None,
            Status::Fwd => Some(ctx.ends[i]),
            Status::Bwd => Some((ctx.ends[i].1, ctx.ends[i].0)),
        }
    };

    // Arcs never point into a nondegenerate vertex.
    for i in 0..ne {
        if let Some((_, to)) = arc_of(i) {
            if ctx.input.vertices[to].nondegenerate {
                return out;
            }
        }
    }

    // Condense along non-oriented edges; an arc inside one class is a
    // directed cycle through contact-zero edges, never admissible.
    let mut uf = UnionFind::new(nv);
    for (i, s) in status.iter().enumerate() {
        if *s == Status::None {
            uf.union(ctx.ends[i].0, ctx.ends[i].1);
        }
    }
    let mut arcs: Vec<(usize, usize)> = Vec::new(); // (from class, to class)
    for i in 0..ne {
        if let Some((from, to)) = arc_of(i) {
            let (cf, ct) = (uf.find(from), uf.find(to));
            if cf == ct {
                return out;
            }
            arcs.push((cf, ct));
        }
    }

    // Process classes starting from maximal ones (no outgoing arcs), ties by
    // smallest member id; a leftover class means a directed cycle.
    let mut class_members: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for v in 0..nv {
        class_members.entry(uf.find(v)).or_default().push(v);
    }
    let class_key = |root: usize| -> &str {
        class_members[&root].iter().map(|&v| ctx.input.vertices[v].id.as_str()).min().unwrap()
    };
    let mut pending_out: BTreeMap<usize, usize> = BTreeMap::new();
    for &root in class_members.keys() {
        pending_out.insert(root, 0);
    }
    for &(cf, _) in &arcs {
        *pending_out.get_mut(&cf).unwrap() += 1;
    }
    let mut heap: BinaryHeap<Reverse<(&str, usize)>> = BinaryHeap::new();
    for (&root, &n) in &pending_out {
        if n == 0 {
            heap.push(Reverse((class_key(root), root)));
        }
    }
    let mut vertex_order: Vec<usize> = Vec::with_capacity(nv);
    let mut done = 0usize;
    while let Some(Reverse((_, root))) = heap.pop() {
        done += 1;
        vertex_order.extend(class_members[&root].iter().copied());
        for &(cf, ct) in &arcs {
            if ct == root {
                let n = pending_out.get_mut(&cf).unwrap();
                *n -= 1;
                if *n == 0 {
                    heap.push(Reverse((class_key(cf), cf)));
                }
            }
        }
    }
    if done < class_members.len() {
        return out;
    }

    let mut incoming: Vec<Vec<usize>> = vec![Vec::new(); nv];
    let mut outgoing: Vec<Vec<usize>> = vec![Vec::new(); nv];
    for i in 0..ne {
        if let Some((from, to)) = arc_of(i) {
            incoming[to].push(i);
            outgoing[from].push(i);
        }
    }
    let mut contact: Vec<Option<u64>> = status
        .iter()
        .map(|s| if *s == Status::None { Some(0) } else { None })
        .collect();
    let mut solver = BranchSolver {
        ctx,
        status: &status,
        vertex_order: &vertex_order,
        incoming: &incoming,
        outgoing: &outgoing,
        contact: &mut contact,
        out: &mut out,
    };
    solver.solve(0);
    out
}

struct BranchSolver<'a, 'b> {
    ctx: &'a SearchContext<'a>,
    status: &'b [Status],
    vertex_order: &'b [usize],
    incoming: &'b [Vec<usize>],
    outgoing: &'b [Vec<usize>],
    contact: &'b mut Vec<Option<u64>>,
    out: &'b mut BranchOutcome,
}

impl BranchSolver<'_, '_> {
    // Assigns the incoming arcs of vertex_order[pos..]; the outgoing arcs of
    // each vertex end at already-processed vertices, hence are known.
    fn solve(&mut self, pos: usize) {
        if self.out.truncated {
            return;
        }
        if pos == self.vertex_order.len() {
            self.emit();
            return;
        }
        let v = self.vertex_order[pos];
        let known: i128 = self.outgoing[v]
            .iter()
            .map(|&i| self.contact[i].expect("outgoing arc assigned") as i128)
            .sum();
        let residue =
            self.ctx.input.vertices[v].multidegree as i128 + known + self.ctx.leg_sums[v];
        if self.incoming[v].is_empty() {
            if residue == 0 {
                self.solve(pos + 1);
            }
            return;
        }
        if residue < self.incoming[v].len() as i128 {
            return; // each incoming arc needs contact at least 1
        }
        self.compose(pos, 0, residue);
    }

    // Fills incoming[v][j..] with contact orders in [1, eff_bound] summing
    // to residue.
    fn compose(&mut self, pos: usize, j: usize, residue: i128) {
        if self.out.truncated {
            return;
        }
        let arcs = &self.incoming[self.vertex_order[pos]];
        if j == arcs.len() {
            debug_assert_eq!(residue, 0);
            self.solve(pos + 1);
            return;
        }
        let later = (arcs.len() - j - 1) as i128;
        let natural = residue - later;
        let upper = natural.min(self.ctx.eff_bound);
        if natural > self.ctx.eff_bound && self.ctx.cap_can_cut {
            self.out.cap_hit = true;
        }
        let lower = 1i128.max(residue - later * self.ctx.eff_bound);
        let edge = arcs[j];
        let mut c = lower;
        while c <= upper {
            self.contact[edge] = Some(c as u64);
            self.compose(pos, j + 1, residue - c);
            self.contact[edge] = None;
            c += 1;
        }
    }

    fn emit(&mut self) {
        if let Some(g) = build_solution(self.ctx, self.status, self.contact) {
            if self.out.solutions.len() >= self.ctx.per_branch_cap {
                self.out.truncated = true;
            } else {
                self.out.solutions.push(g);
            }
        }
    }
}

fn build_solution(
    ctx: &SearchContext,
    status: &[Status],
    contact: &[Option<u64>],
) -> Option<MarkedGraph> {
    let vertices: Vec<Vertex> = ctx
        .input
        .vertices
        .iter()
        .map(|v| Vertex {
            id: v.id.clone(),
            nondegenerate: v.nondegenerate,
            multidegree: Some(v.multidegree),
        })
        .collect();
    let edges: Vec<Edge> = ctx
        .input
        .edges
        .iter()
        .enumerate()
        .map(|(i, e)| Edge {
            id: e.id.clone(),
            ends: e.ends.clone(),
            contact_order: contact[i].expect("all contacts assigned"),
            orientation: match status[i] {
                Status::None => None,
                Status::Fwd => Some(e.ends.clone()),
                Status::Bwd => Some((e.ends.1.clone(), e.ends.0.clone())),
            },
        })
        .collect();
    let legs: Vec<Leg> = ctx
        .input
        .legs
        .iter()
        .map(|l| Leg { id: l.id.clone(), vertex: l.vertex.clone(), contact_order: l.contact_order })
        .collect();
    let g = MarkedGraph::new(vertices, edges, legs).ok()?;
    if !validate(&g).is_empty() || is_admissible(&g).is_err() {
        return None;
    }
    Some(g)
}

/// Independent oracle: scan every orientation/contact decoration with
/// contact orders up to `contact_bound` and keep what survives validation,
/// per-vertex degree balance, and admissibility. Same canonical order and
/// duplicate elimination as `enumerate`.
pub fn brute_force_enumerate(input: &DualGraphInput, contact_bound: u64) -> Vec<MarkedGraph> {
    let ne = input.edges.len();
    // Decoration per edge: (orientation code, contact), codes as in
    // canonical_form. All combinations, including invalid ones; the filters
    // decide.
    let mut decorations: Vec<(u8, u64)> = Vec::new();
    for code in 0..3u8 {
        for c in 0..=contact_bound {
            decorations.push((code, c));
        }
    }
    let mut results: BTreeMap<Vec<(String, u8, u64)>, MarkedGraph> = BTreeMap::new();
    let mut choice = vec![0usize; ne];
    loop {
        let vertices: Vec<Vertex> = input
            .vertices
            .iter()
            .map(|v| Vertex {
                id: v.id.clone(),
                nondegenerate: v.nondegenerate,
                multidegree: Some(v.multidegree),
            })
            .collect();
        let edges: Vec<Edge> = input
            .edges
            .iter()
            .enumerate()
            .map(|(i, e)| {
                let (code, c) = decorations[choice[i]];
                Edge {
                    id: e.id.clone(),
                    ends: e.ends.clone(),
                    contact_order: c,
                    orientation: match code {
                        0 => None,
                        1 => Some(e.ends.clone()),
                        _ => Some((e.ends.1.clone(), e.ends.0.clone())),
                    },
                }
            })
            .collect();
        let legs: Vec<Leg> = input
            .legs
            .iter()
            .map(|l| Leg {
                id: l.id.clone(),
                vertex: l.vertex.clone(),
                contact_order: l.contact_order,
            })
            .collect();
        if let Ok(g) = MarkedGraph::new(vertices, edges, legs) {
            if validate(&g).is_empty()
                && input.vertices.iter().all(|v| degree_balance(&g, &v.id, v.multidegree))
                && is_admissible(&g).is_ok()
            {
                results.insert(canonical_form(&g), g);
            }
        }
        // Odometer step.
        let mut i = 0;
        loop {
            if i == ne {
                return results.into_values().collect();
            }
            choice[i] += 1;
            if choice[i] < decorations.len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}
