//! Finitely presented commutative monoids and their groupification.
//!
//! A presentation is a list of named generators together with relations of
//! the form `lhs = rhs`, both sides being formal N-linear combinations of the
//! generators. Groupification quotients the free abelian group on the
//! generators by the differences `lhs - rhs`; the result is reported as a
//! free part plus torsion invariants, with the image of every generator.

use crate::mat::{row_hnf, smith_normal_form, IntMat};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// One relation `lhs = rhs`; the vectors are coefficient lists over the
/// presentation's generators (entries must be non-negative).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    pub name: String,
    pub lhs: Vec<BigInt>,
    pub rhs: Vec<BigInt>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonoidPresentation {
    pub generators: Vec<String>,
    pub relations: Vec<Relation>,
}

impl MonoidPresentation {
    pub fn new(generators: Vec<String>, relations: Vec<Relation>) -> Self {
        let n = generators.len();
        for r in &relations {
            assert_eq!(r.lhs.len(), n, "relation {} has wrong lhs arity", r.name);
            assert_eq!(r.rhs.len(), n, "relation {} has wrong rhs arity", r.name);
            assert!(
                r.lhs.iter().chain(r.rhs.iter()).all(|c| !c.is_negative()),
                "relation {} has negative coefficients",
                r.name
            );
        }
        MonoidPresentation { generators, relations }
    }

    pub fn generator_index(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g == name)
    }

    /// Groupification: the abelian group presented by the relations, split
    /// into a free part and torsion invariants.
    pub fn groupify(&self) -> GroupData {
        let n = self.generators.len();
        let rel_rows: Vec<Vec<BigInt>> = self
            .relations
            .iter()
            .map(|r| (0..n).map(|i| &r.lhs[i] - &r.rhs[i]).collect())
            .collect();
        let k = rel_rows.len();
        let rel = if k == 0 { IntMat::zero(0, n) } else { IntMat::from_rows(rel_rows) };
        let s = smith_normal_form(&rel);
        let m = k.min(n);

        // In the coordinates y = x · v the relation lattice becomes the span
        // of d_j · e_j. Coordinates with d_j = 1 die, d_j >= 2 give torsion,
        // the rest stay free.
        let mut free_cols = Vec::new();
        let mut torsion_cols = Vec::new();
        for j in 0..n {
            if j >= m || s.d[(j, j)].is_zero() {
                free_cols.push(j);
            } else if !s.d[(j, j)].is_one() {
                torsion_cols.push(j);
            }
        }
        let torsion: Vec<BigInt> = torsion_cols.iter().map(|&j| s.d[(j, j)].clone()).collect();
        let free_rank = free_cols.len();

        let mut free_images: Vec<Vec<BigInt>> = Vec::with_capacity(n);
        let mut torsion_images: Vec<Vec<BigInt>> = Vec::with_capacity(n);
        for i in 0..n {
            free_images.push(free_cols.iter().map(|&j| s.v[(i, j)].clone()).collect());
            torsion_images.push(
                torsion_cols
                    .iter()
                    .enumerate()
                    .map(|(t, &j)| s.v[(i, j)].mod_floor_ref(&torsion[t]))
                    .collect(),
            );
        }

        // The serialized basis of the free part is fixed by Hermite reduction:
        // replace the image matrix P by its column-HNF P · W. The rows of P
        // generate all of Z^r, so the reduced form is unique.
        if free_rank > 0 && n > 0 {
            let p = IntMat::from_rows(free_images.clone());
            let (ht, _) = row_hnf(&p.transpose());
            free_images = ht.transpose().to_rows();
        }

        GroupData { free_rank, torsion, free_images, torsion_images }
    }
}

trait ModFloorRef {
    fn mod_floor_ref(&self, m: &BigInt) -> BigInt;
}

impl ModFloorRef for BigInt {
    fn mod_floor_ref(&self, m: &BigInt) -> BigInt {
        use num_integer::Integer;
        self.mod_floor(m)
    }
}

/// Groupification result: `Z^free_rank ⊕ ⊕_i Z/torsion[i]`, plus the image
/// of each presentation generator (free part in the Hermite-fixed basis,
/// torsion part reduced modulo the invariants).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupData {
    pub free_rank: usize,
    /// Invariant factors, each >= 2, in a divisibility chain.
    pub torsion: Vec<BigInt>,
    /// Per generator, the image in the free quotient Z^free_rank.
    pub free_images: Vec<Vec<BigInt>>,
    /// Per generator, the torsion components (aligned with `torsion`).
    pub torsion_images: Vec<Vec<BigInt>>,
}

impl GroupData {
    /// Evaluates a coefficient vector over the generators in the free quotient.
    pub fn eval_free(&self, coeffs: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(coeffs.len(), self.free_images.len());
        let mut out = vec![BigInt::zero(); self.free_rank];
        for (c, img) in coeffs.iter().zip(&self.free_images) {
            if c.is_zero() {
                continue;
            }
            for (o, x) in out.iter_mut().zip(img) {
                *o += c * x;
            }
        }
        out
    }
}

pub fn relation(name: &str, lhs: Vec<BigInt>, rhs: Vec<BigInt>) -> Relation {
    Relation { name: name.to_string(), lhs, rhs }
}
