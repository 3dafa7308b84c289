//! Rational polyhedral cones in exact integer arithmetic.
//!
//! Cones live in Z^r with row-vector conventions. An inequality system is a
//! list of integer normals h, cutting out { x : <h, x> >= 0 }. The functions
//! here convert between generator and inequality descriptions, and compute
//! Hilbert bases of pointed cones by placing triangulation over the extremal
//! rays followed by fundamental-parallelepiped lattice point enumeration.

use crate::mat::{div_floor_big, primitive, row_hnf, smith_normal_form, IntMat};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeSet;

pub fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    assert_eq!(a.len(), b.len(), "dot dimension mismatch");
    let mut s = BigInt::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            s += x * y;
        }
    }
    s
}

pub fn in_cone(x: &[BigInt], normals: &[Vec<BigInt>]) -> bool {
    normals.iter().all(|h| !dot(h, x).is_negative())
}

fn is_zero_vec(v: &[BigInt]) -> bool {
    v.iter().all(|x| x.is_zero())
}

/// Sorted deduplicated nonzero vectors.
fn canonical_set(vs: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let set: BTreeSet<Vec<BigInt>> = vs.iter().filter(|v| !is_zero_vec(v)).cloned().collect();
    set.into_iter().collect()
}

fn for_each_combination(m: usize, k: usize, f: &mut impl FnMut(&[usize])) {
    fn go(start: usize, m: usize, left: usize, acc: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if left == 0 {
            f(acc);
            return;
        }
        for i in start..=m.saturating_sub(left) {
            acc.push(i);
            go(i + 1, m, left - 1, acc, f);
            acc.pop();
        }
    }
    if k > m {
        return;
    }
    go(0, m, k, &mut Vec::new(), f);
}

/// Coordinates for Z^r modulo the sublattice spanned by `rows`, with torsion
/// killed: the kept coordinates are the last `ambient - t` positions of
/// x · v, where t is the rank of the row lattice. When the row lattice is
/// pure the quotient is exactly Z^ambient / L.
pub struct LatticeQuotient {
    pub ambient: usize,
    pub killed: usize,
    v: IntMat,
    v_inv: IntMat,
    pure: bool,
}

impl LatticeQuotient {
    pub fn new(rows: &[Vec<BigInt>], ambient: usize) -> Self {
        let mat = if rows.is_empty() {
            IntMat::zero(0, ambient)
        } else {
            IntMat::from_rows(rows.to_vec())
        };
        let s = smith_normal_form(&mat);
        let m = mat.rows().min(ambient);
        let mut killed = 0;
        let mut pure = true;
        for j in 0..m {
            if s.d[(j, j)].is_zero() {
                break;
            }
            if !s.d[(j, j)].is_one() {
                pure = false;
            }
            killed += 1;
        }
        LatticeQuotient { ambient, killed, v: s.v, v_inv: s.v_inv, pure }
    }

    /// True iff the input rows spanned a pure (saturated) sublattice.
    pub fn input_was_pure(&self) -> bool {
        self.pure
    }

    pub fn quotient_rank(&self) -> usize {
        self.ambient - self.killed
    }

    pub fn project(&self, x: &[BigInt]) -> Vec<BigInt> {
        let y = self.v.apply_row(x);
        y[self.killed..].to_vec()
    }

    /// One integral preimage of a quotient vector.
    pub fn lift(&self, z: &[BigInt]) -> Vec<BigInt> {
        let mut y = vec![BigInt::zero(); self.killed];
        y.extend_from_slice(z);
        self.v_inv.apply_row(&y)
    }

    /// The projection as a matrix: project(x) = x · matrix.
    pub fn matrix(&self) -> IntMat {
        let rows: Vec<Vec<BigInt>> =
            (0..self.ambient).map(|i| self.v.row(i)[self.killed..].to_vec()).collect();
        IntMat::from_rows_with_cols(rows, self.quotient_rank())
    }
}

impl IntMat {
    /// Like `from_rows` but usable when the row list may be empty.
    pub fn from_rows_with_cols(rows: Vec<Vec<BigInt>>, cols: usize) -> IntMat {
        if rows.is_empty() {
            IntMat::zero(0, cols)
        } else {
            let m = IntMat::from_rows(rows);
            assert_eq!(m.cols(), cols);
            m
        }
    }
}

/// Minimal ray description of { x in Q^r : <h, x> >= 0 for all h }.
///
/// Returns (lineality basis, rays): the lineality lattice basis is Hermite
/// reduced, the rays are primitive, nonzero, lex-sorted, and extremal modulo
/// lineality. The cone is the set of non-negative combinations of the rays
/// plus arbitrary integer combinations of the lineality basis.
pub fn rays_and_lineality(ineqs: &[Vec<BigInt>], rank: usize) -> (Vec<Vec<BigInt>>, Vec<Vec<BigInt>>) {
    if rank == 0 {
        return (Vec::new(), Vec::new());
    }
    let sys = canonical_set(ineqs);
    let a = IntMat::from_rows_with_cols(sys.clone(), rank);

    // Lineality = integer kernel of the inequality matrix, Hermite reduced.
    let kernel = a.kernel_basis();
    let lineality = hermite_rows(&kernel, rank);
    let s = lineality.len();
    let qr = rank - s;
    if qr == 0 {
        return (lineality, Vec::new());
    }

    let quot = LatticeQuotient::new(&lineality, rank);
    assert!(quot.input_was_pure(), "kernel lattice must be pure");
    assert_eq!(quot.quotient_rank(), qr);

    // Transform each functional to quotient coordinates. Functionals vanish
    // on the lineality, so the killed coordinates drop out exactly.
    let mut q_rows: Vec<Vec<BigInt>> = Vec::with_capacity(sys.len());
    for h in &sys {
        let hy = quot.v_inv.apply_col(h);
        assert!(hy[..quot.killed].iter().all(|x| x.is_zero()), "functional does not kill lineality");
        q_rows.push(hy[quot.killed..].to_vec());
    }
    let aq = IntMat::from_rows_with_cols(q_rows.clone(), qr);
    assert!(aq.kernel_basis().is_empty(), "quotient cone must be pointed");

    // Every extremal ray of a pointed cone is cut out by a rank (qr-1)
    // subset of active inequalities; enumerate those subsets.
    assert!(q_rows.len() <= 30, "inequality system too large for subset enumeration");
    let mut found: BTreeSet<Vec<BigInt>> = BTreeSet::new();
    for_each_combination(q_rows.len(), qr - 1, &mut |idx: &[usize]| {
        let sub = IntMat::from_rows_with_cols(idx.iter().map(|&i| q_rows[i].clone()).collect(), qr);
        let ker = sub.kernel_basis();
        if ker.len() != 1 {
            return;
        }
        let dir = primitive(&ker[0]);
        let vals: Vec<BigInt> = q_rows.iter().map(|h| dot(h, &dir)).collect();
        if vals.iter().all(|x| !x.is_negative()) {
            found.insert(dir);
        } else if vals.iter().all(|x| !x.is_positive()) {
            found.insert(dir.iter().map(|x| -x).collect());
        }
    });

    let rays: BTreeSet<Vec<BigInt>> =
        found.iter().map(|z| primitive(&quot.lift(z))).collect();
    (lineality, rays.into_iter().collect())
}

/// Hermite-reduces a spanning set to a canonical lattice basis (nonzero rows).
pub fn hermite_rows(rows: &[Vec<BigInt>], rank: usize) -> Vec<Vec<BigInt>> {
    if rows.is_empty() {
        return Vec::new();
    }
    let (h, _) = row_hnf(&IntMat::from_rows_with_cols(rows.to_vec(), rank));
    (0..h.rows())
        .map(|i| h.row(i).to_vec())
        .filter(|r| !is_zero_vec(r))
        .collect()
}

/// Minimal set of primitive integer normals h with
/// cone(generators) = { x : <h, x> >= 0 for all h }.
///
/// Facet normals come from the extremal rays of the dual cone; if the
/// generators do not span Q^r, the span conditions are emitted as +/- pairs
/// over a Hermite-reduced basis of the orthogonal complement.
pub fn dual_description(generators: &[Vec<BigInt>], rank: usize) -> Vec<Vec<BigInt>> {
    let (complement, facets) = rays_and_lineality(generators, rank);
    let mut out: BTreeSet<Vec<BigInt>> = facets.into_iter().collect();
    for b in complement {
        out.insert(b.iter().map(|x| -x).collect());
        out.insert(b);
    }
    let out: Vec<Vec<BigInt>> = out.into_iter().collect();
    debug_assert!(generators.iter().all(|g| in_cone(g, &out)));
    out
}

/// Extremal rays of a pointed cone given by generators and its normals:
/// a nonzero generator is extremal iff its active normals have rank r - 1.
/// Returned primitive, deduplicated, lex-sorted.
pub fn extremal_rays(generators: &[Vec<BigInt>], normals: &[Vec<BigInt>], rank: usize) -> Vec<Vec<BigInt>> {
    let mut out = BTreeSet::new();
    for g in canonical_set(generators) {
        let active: Vec<Vec<BigInt>> =
            normals.iter().filter(|h| dot(h, &g).is_zero()).cloned().collect();
        let arank = IntMat::from_rows_with_cols(active, rank).rank();
        if arank + 1 == rank {
            out.insert(primitive(&g));
        }
    }
    out.into_iter().collect()
}

/// A grading that is strictly positive on every nonzero cone point; exists
/// exactly for pointed cones (sum of all supporting normals).
pub fn positive_grading(normals: &[Vec<BigInt>], rank: usize) -> Vec<BigInt> {
    let mut w = vec![BigInt::zero(); rank];
    for h in normals {
        for (wi, hi) in w.iter_mut().zip(h) {
            *wi += hi;
        }
    }
    w
}

/// Placing (lexicographic) triangulation of a pointed cone over its extremal
/// rays, as index sets into `rays`. Every simplex has full rank equal to the
/// dimension of the cone.
fn triangulate(rays: &[Vec<BigInt>], rank: usize) -> Vec<Vec<usize>> {
    let mut simplices: Vec<Vec<usize>> = Vec::new();
    for j in 0..rays.len() {
        if simplices.is_empty() {
            simplices.push(vec![j]);
            continue;
        }
        let dim = simplices[0].len();
        let span_rows: Vec<Vec<BigInt>> = rays[..j].to_vec();
        let mut with_new = span_rows.clone();
        with_new.push(rays[j].clone());
        let old_rank = IntMat::from_rows_with_cols(span_rows, rank).rank();
        let new_rank = IntMat::from_rows_with_cols(with_new, rank).rank();
        if new_rank > old_rank {
            // Dimension raise: pyramid over every existing simplex.
            for s in &mut simplices {
                s.push(j);
            }
            continue;
        }
        // In-span placement: attach the new ray over every visible boundary
        // facet. A facet is on the boundary iff it belongs to one simplex.
        use std::collections::BTreeMap;
        let mut facets: BTreeMap<Vec<usize>, Vec<(usize, usize)>> = BTreeMap::new();
        for (si, s) in simplices.iter().enumerate() {
            for (drop_pos, &dropped) in s.iter().enumerate() {
                let mut facet = s.clone();
                facet.remove(drop_pos);
                facets.entry(facet).or_default().push((si, dropped));
            }
        }
        let mut new_simplices = Vec::new();
        for (facet, owners) in &facets {
            if owners.len() != 1 {
                continue;
            }
            let (_, dropped) = owners[0];
            // Functional vanishing on the facet, positive on the dropped ray.
            let fmat = IntMat::from_rows_with_cols(
                facet.iter().map(|&i| rays[i].clone()).collect(),
                rank,
            );
            let kernel = fmat.kernel_basis();
            let mut phi: Option<Vec<BigInt>> = None;
            for k in &kernel {
                let val = dot(k, &rays[dropped]);
                if !val.is_zero() {
                    phi = Some(if val.is_negative() {
                        k.iter().map(|x| -x).collect()
                    } else {
                        k.clone()
                    });
                    break;
                }
            }
            let phi = phi.expect("simplex rays must be independent");
            if dot(&phi, &rays[j]).is_negative() {
                let mut s = facet.clone();
                s.push(j);
                s.sort_unstable();
                new_simplices.push(s);
            }
        }
        simplices.extend(new_simplices);
        debug_assert!(simplices.iter().all(|s| s.len() == dim));
    }
    for s in &simplices {
        let m = IntMat::from_rows_with_cols(s.iter().map(|&i| rays[i].clone()).collect(), rank);
        assert_eq!(m.rank(), s.len(), "degenerate simplex in triangulation");
    }
    simplices
}

/// Lattice points of the half-open parallelepiped { sum t_i r_i : 0 <= t_i < 1 }
/// spanned by independent rows.
fn parallelepiped_points(rows: &[Vec<BigInt>], rank: usize) -> Vec<Vec<BigInt>> {
    let d = rows.len();
    let m = IntMat::from_rows_with_cols(rows.to_vec(), rank);
    let s = smith_normal_form(&m);
    let mut invariants: Vec<u64> = Vec::with_capacity(d);
    let mut index = 1u64;
    for i in 0..d {
        let di = &s.d[(i, i)];
        assert!(di.is_positive(), "parallelepiped rows must be independent");
        let di_u64 = u64::try_from(di.clone()).expect("simplex index too large");
        index = index.checked_mul(di_u64).expect("simplex index too large");
        assert!(index <= 1 << 24, "simplex index too large for enumeration");
        invariants.push(di_u64);
    }
    if index == 1 {
        return vec![vec![BigInt::zero(); rank]];
    }

    // Column rank profile of the ray matrix, for Cramer-style reduction.
    let mut profile: Vec<usize> = Vec::new();
    for c in 0..rank {
        if profile.len() == d {
            break;
        }
        let mut cols = profile.clone();
        cols.push(c);
        let sub = IntMat::from_rows_with_cols(
            rows.iter().map(|r| cols.iter().map(|&j| r[j].clone()).collect()).collect(),
            cols.len(),
        );
        if sub.rank() == cols.len() {
            profile.push(c);
        }
    }
    assert_eq!(profile.len(), d);
    let msq = IntMat::from_rows_with_cols(
        rows.iter().map(|r| profile.iter().map(|&j| r[j].clone()).collect()).collect(),
        d,
    );
    let det = msq.det();
    assert!(!det.is_zero());

    let mut out = BTreeSet::new();
    let mut counters = vec![0u64; d];
    loop {
        // Integral representative of this residue class.
        let mut y = vec![BigInt::zero(); rank];
        for (i, &c) in counters.iter().enumerate() {
            y[i] = BigInt::from(c);
        }
        let x0 = {
            let full = s.v_inv.apply_row(&y);
            // y lives in the first d transformed coordinates; x0 = y · v^{-1}.
            full
        };
        // Reduce x0 into the half-open parallelepiped: subtract floor parts of
        // the exact rational coordinates, solved by Cramer on the rank profile.
        let target: Vec<BigInt> = profile.iter().map(|&j| x0[j].clone()).collect();
        let mut x = x0.clone();
        for i in 0..d {
            // mu_i = det(msq with row i replaced by target) / det
            let mut rep = msq.to_rows();
            rep[i] = target.clone();
            let num = IntMat::from_rows(rep).det();
            let f = div_floor_big(&num, &det);
            if !f.is_zero() {
                for (xj, rj) in x.iter_mut().zip(&rows[i]) {
                    *xj -= &f * rj;
                }
            }
        }
        out.insert(x);

        // Advance the mixed-radix counter.
        let mut pos = 0;
        loop {
            if pos == d {
                let pts: Vec<Vec<BigInt>> = out.into_iter().collect();
                assert_eq!(pts.len() as u64, index, "parallelepiped point count mismatch");
                return pts;
            }
            counters[pos] += 1;
            if counters[pos] < invariants[pos] {
                break;
            }
            counters[pos] = 0;
            pos += 1;
        }
    }
}

/// Hilbert basis of the lattice-point monoid of a pointed cone, given its
/// primitive extremal rays and supporting normals. Triangulates, gathers ray
/// generators plus parallelepiped points, and removes reducible elements
/// under the positive grading. Result is lex-sorted.
pub fn hilbert_basis_of_cone(rays: &[Vec<BigInt>], normals: &[Vec<BigInt>], rank: usize) -> Vec<Vec<BigInt>> {
    if rays.is_empty() {
        return Vec::new();
    }
    let mut candidates: BTreeSet<Vec<BigInt>> = rays.iter().cloned().collect();
    for simplex in triangulate(rays, rank) {
        let rows: Vec<Vec<BigInt>> = simplex.iter().map(|&i| rays[i].clone()).collect();
        for p in parallelepiped_points(&rows, rank) {
            if !is_zero_vec(&p) {
                candidates.insert(p);
            }
        }
    }
    let w = positive_grading(normals, rank);
    let mut ordered: Vec<(BigInt, Vec<BigInt>)> =
        candidates.into_iter().map(|c| (dot(&w, &c), c)).collect();
    ordered.sort();
    let mut kept: Vec<Vec<BigInt>> = Vec::new();
    'cand: for (_, c) in ordered {
        for h in &kept {
            let diff: Vec<BigInt> = c.iter().zip(h).map(|(a, b)| a - b).collect();
            if !is_zero_vec(&diff) && in_cone(&diff, normals) {
                continue 'cand;
            }
        }
        kept.push(c);
    }
    kept.sort();
    kept
}
