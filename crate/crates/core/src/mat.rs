//! Dense integer matrices with exact normal forms.
//!
//! Everything here is over `BigInt`. The three workhorses are the Smith
//! normal form (with all four transformation matrices tracked), the row
//! Hermite normal form (used wherever a serialized basis has to be
//! reproducible), and exact linear solvers built on top of them.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::fmt;

/// Row-major dense matrix over the integers.
#[derive(Clone, PartialEq, Eq)]
pub struct IntMat {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl fmt::Debug for IntMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self[(i, j)].to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl std::ops::Index<(usize, usize)> for IntMat {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

pub fn big(n: i64) -> BigInt {
    BigInt::from(n)
}

impl IntMat {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMat { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMat::zero(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    /// Builds a matrix from rows; all rows must have the same length.
    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        IntMat { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_i64(rows: &[Vec<i64>]) -> Self {
        IntMat::from_rows(rows.iter().map(|r| r.iter().map(|&x| big(x)).collect()).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn col(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> IntMat {
        let mut t = IntMat::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    if i == j {
                        self[(i, j)].is_one()
                    } else {
                        self[(i, j)].is_zero()
                    }
                })
            })
    }

    pub fn mul(&self, other: &IntMat) -> IntMat {
        assert_eq!(self.cols, other.rows, "dimension mismatch in mul");
        let mut out = IntMat::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        let prod = a * b;
                        out[(i, j)] += prod;
                    }
                }
            }
        }
        out
    }

    /// Row vector times matrix: y = x · self.
    pub fn apply_row(&self, x: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(x.len(), self.rows, "dimension mismatch in apply_row");
        let mut y = vec![BigInt::zero(); self.cols];
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for j in 0..self.cols {
                let t = xi * &self[(i, j)];
                y[j] += t;
            }
        }
        y
    }

    /// Matrix times column vector: y = self · x.
    pub fn apply_col(&self, x: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(x.len(), self.cols, "dimension mismatch in apply_col");
        (0..self.rows)
            .map(|i| {
                let mut s = BigInt::zero();
                for (j, xj) in x.iter().enumerate() {
                    if !xj.is_zero() {
                        s += &self[(i, j)] * xj;
                    }
                }
                s
            })
            .collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] += q * row[src]
    fn add_row_mul(&mut self, dst: usize, src: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let t = q * &self[(src, j)];
            self[(dst, j)] += t;
        }
    }

    /// col[dst] += q * col[src]
    fn add_col_mul(&mut self, dst: usize, src: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let t = q * &self[(i, src)];
            self[(i, dst)] += t;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -self[(i, j)].clone();
            self[(i, j)] = v;
        }
    }

    /// Determinant by fraction-free (Bareiss) elimination. Exact.
    pub fn det(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "det of non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.clone();
        let mut sign = 1i64;
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[(k, k)].is_zero() {
                match (k + 1..n).find(|&i| !a[(i, k)].is_zero()) {
                    Some(i) => {
                        a.swap_rows(k, i);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &a[(i, j)] * &a[(k, k)] - &a[(i, k)] * &a[(k, j)];
                    let (q, r) = num.div_rem(&prev);
                    debug_assert!(r.is_zero(), "Bareiss division not exact");
                    a[(i, j)] = q;
                }
                a[(i, k)] = BigInt::zero();
            }
            prev = a[(k, k)].clone();
        }
        let d = a[(n - 1, n - 1)].clone();
        if sign < 0 {
            -d
        } else {
            d
        }
    }

    pub fn rank(&self) -> usize {
        let (h, _) = row_hnf(self);
        (0..h.rows).filter(|&i| h.row(i).iter().any(|x| !x.is_zero())).count()
    }

    /// Integer kernel: a lattice basis of { x : self · x = 0 }, as column
    /// vectors returned in row form. The basis spans the full (pure) kernel
    /// lattice because it comes from the columns of a unimodular matrix.
    pub fn kernel_basis(&self) -> Vec<Vec<BigInt>> {
        let s = smith_normal_form(self);
        let m = self.rows.min(self.cols);
        let mut out = Vec::new();
        for j in 0..self.cols {
            let free = j >= m || s.d[(j, j)].is_zero();
            if free {
                out.push(s.v.col(j));
            }
        }
        out
    }
}

/// Floor division for BigInt (rounds toward negative infinity).
pub fn div_floor_big(a: &BigInt, b: &BigInt) -> BigInt {
    a.div_floor(b)
}

/// Primitive vector on the same ray: divides out the gcd of the entries.
/// The zero vector is returned unchanged.
pub fn primitive(v: &[BigInt]) -> Vec<BigInt> {
    let mut g = BigInt::zero();
    for x in v {
        g = g.gcd(x);
    }
    if g.is_zero() || g.is_one() {
        return v.to_vec();
    }
    v.iter().map(|x| x / &g).collect()
}

/// Smith normal form decomposition: u · a · v = d with u, v unimodular and d
/// diagonal with non-negative entries in a divisibility chain. `v_inv` is the
/// exact inverse of `v`, tracked during the reduction.
pub struct Smith {
    pub u: IntMat,
    pub d: IntMat,
    pub v: IntMat,
    pub v_inv: IntMat,
}

/// Computes the Smith normal form. The pivot at each step is a nonzero entry
/// of minimal absolute value in the remaining submatrix.
pub fn smith_normal_form(a: &IntMat) -> Smith {
    let (rows, cols) = (a.rows(), a.cols());
    let mut d = a.clone();
    let mut u = IntMat::identity(rows);
    let mut v = IntMat::identity(cols);
    let mut v_inv = IntMat::identity(cols);
    let lim = rows.min(cols);

    for t in 0..lim {
        loop {
            // Minimal-absolute-value nonzero pivot in the submatrix.
            let mut pivot: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if d[(i, j)].is_zero() {
                        continue;
                    }
                    match pivot {
                        None => pivot = Some((i, j)),
                        Some(p) => {
                            if d[(i, j)].abs() < d[p].abs() {
                                pivot = Some((i, j));
                            }
                        }
                    }
                }
            }
            let Some((pi, pj)) = pivot else {
                // Remaining submatrix is zero; done with the diagonal phase.
                return finish_smith(d, u, v, v_inv, t);
            };
            d.swap_rows(t, pi);
            u.swap_rows(t, pi);
            d.swap_cols(t, pj);
            v.swap_cols(t, pj);
            v_inv.swap_rows(t, pj);

            // Clear column t below the pivot, then row t right of the pivot.
            let mut clean = true;
            for i in t + 1..rows {
                if d[(i, t)].is_zero() {
                    continue;
                }
                let q = -(&d[(i, t)] / &d[(t, t)]);
                d.add_row_mul(i, t, &q);
                u.add_row_mul(i, t, &q);
                if !d[(i, t)].is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..cols {
                if d[(t, j)].is_zero() {
                    continue;
                }
                let q = -(&d[(t, j)] / &d[(t, t)]);
                d.add_col_mul(j, t, &q);
                v.add_col_mul(j, t, &q);
                v_inv.add_row_mul(t, j, &-q);
                if !d[(t, j)].is_zero() {
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
    }
    finish_smith(d, u, v, v_inv, lim)
}

/// Sign-normalizes the diagonal and enforces the divisibility chain.
fn finish_smith(mut d: IntMat, mut u: IntMat, mut v: IntMat, mut v_inv: IntMat, rank: usize) -> Smith {
    for t in 0..rank {
        if d[(t, t)].is_negative() {
            d.negate_row(t);
            u.negate_row(t);
        }
    }
    if rank > 1 {
        loop {
            let mut changed = false;
            for t in 0..rank - 1 {
                let a = d[(t, t)].clone();
                let b = d[(t + 1, t + 1)].clone();
                if a.is_zero() || b.is_zero() || (&b % &a).is_zero() {
                    continue;
                }
                changed = true;
                // Replace diag(a, b) by diag(g, a*b/g) with tracked unimodular
                // transformations on both sides.
                let e = a.extended_gcd(&b);
                let (g, x, y) = (e.gcd, e.x, e.y);
                let (a_g, b_g) = (&a / &g, &b / &g);
                // Left factor rows: [x, y; -b/g, a/g]
                let u_r0: Vec<BigInt> = (0..u.cols())
                    .map(|j| &x * &u[(t, j)] + &y * &u[(t + 1, j)])
                    .collect();
                let u_r1: Vec<BigInt> = (0..u.cols())
                    .map(|j| -&b_g * &u[(t, j)] + &a_g * &u[(t + 1, j)])
                    .collect();
                for j in 0..u.cols() {
                    u[(t, j)] = u_r0[j].clone();
                    u[(t + 1, j)] = u_r1[j].clone();
                }
                // Right factor cols: [1, -y*b/g; 1, x*a/g]
                let yb_g = &y * &b_g;
                let xa_g = &x * &a_g;
                for i in 0..v.rows() {
                    let c0 = &v[(i, t)] + &v[(i, t + 1)];
                    let c1 = -&yb_g * &v[(i, t)] + &xa_g * &v[(i, t + 1)];
                    v[(i, t)] = c0;
                    v[(i, t + 1)] = c1;
                }
                // Inverse of the right factor: [x*a/g, y*b/g; -1, 1]
                for j in 0..v_inv.cols() {
                    let r0 = &xa_g * &v_inv[(t, j)] + &yb_g * &v_inv[(t + 1, j)];
                    let r1 = -&v_inv[(t, j)] + &v_inv[(t + 1, j)];
                    v_inv[(t, j)] = r0;
                    v_inv[(t + 1, j)] = r1;
                }
                d[(t, t)] = g;
                d[(t + 1, t + 1)] = (&a * &b) / &d[(t, t)];
            }
            if !changed {
                break;
            }
        }
    }
    Smith { u, d, v, v_inv }
}

/// Row Hermite normal form: returns (h, u) with h = u · a, u unimodular.
/// Pivots are positive, entries above each pivot are reduced into [0, pivot),
/// pivot columns strictly increase, zero rows sit at the bottom.
pub fn row_hnf(a: &IntMat) -> (IntMat, IntMat) {
    let (rows, cols) = (a.rows(), a.cols());
    let mut h = a.clone();
    let mut u = IntMat::identity(rows);
    let mut r = 0usize;
    for c in 0..cols {
        if r == rows {
            break;
        }
        // Gcd-reduce column c among rows >= r until one nonzero entry remains.
        loop {
            let mut best: Option<usize> = None;
            for i in r..rows {
                if h[(i, c)].is_zero() {
                    continue;
                }
                match best {
                    None => best = Some(i),
                    Some(b) => {
                        if h[(i, c)].abs() < h[(b, c)].abs() {
                            best = Some(i);
                        }
                    }
                }
            }
            let Some(b) = best else {
                break;
            };
            h.swap_rows(r, b);
            u.swap_rows(r, b);
            let mut clean = true;
            for i in r + 1..rows {
                if h[(i, c)].is_zero() {
                    continue;
                }
                let q = -(&h[(i, c)] / &h[(r, c)]);
                h.add_row_mul(i, r, &q);
                u.add_row_mul(i, r, &q);
                if !h[(i, c)].is_zero() {
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
        if h[(r, c)].is_zero() {
            continue;
        }
        if h[(r, c)].is_negative() {
            h.negate_row(r);
            u.negate_row(r);
        }
        for i in 0..r {
            let q = -div_floor_big(&h[(i, c)], &h[(r, c)]);
            h.add_row_mul(i, r, &q);
            u.add_row_mul(i, r, &q);
        }
        r += 1;
    }
    (h, u)
}

/// Solves a · x = b over the integers (b given column-wise as a matrix).
/// Returns one exact solution or None if no integral solution exists.
pub fn solve_right(a: &IntMat, b: &IntMat) -> Option<IntMat> {
    assert_eq!(a.rows(), b.rows(), "dimension mismatch in solve_right");
    let s = smith_normal_form(a);
    let ub = s.u.mul(b);
    let mut y = IntMat::zero(a.cols(), b.cols());
    let m = a.rows().min(a.cols());
    for i in 0..a.rows() {
        let di = if i < m { s.d[(i, i)].clone() } else { BigInt::zero() };
        for j in 0..b.cols() {
            if di.is_zero() {
                if !ub[(i, j)].is_zero() {
                    return None;
                }
            } else if i < a.cols() {
                let (q, r) = ub[(i, j)].div_rem(&di);
                if !r.is_zero() {
                    return None;
                }
                y[(i, j)] = q;
            }
        }
    }
    Some(s.v.mul(&y))
}

/// Solves x · a = b over the integers.
pub fn solve_left(a: &IntMat, b: &IntMat) -> Option<IntMat> {
    solve_right(&a.transpose(), &b.transpose()).map(|x| x.transpose())
}
