//! Finitely generated submonoids of Z^r, with the cone data (supporting
//! normals, extremal rays, Hilbert basis, saturation) computed eagerly at
//! construction time. Values are immutable afterwards and safe to share.

use crate::cone::{
    dot, dual_description, extremal_rays, hermite_rows, hilbert_basis_of_cone, in_cone,
    positive_grading, LatticeQuotient,
};
use crate::mat::IntMat;
use crate::morphism::MonoidMorphism;
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MonoidError {
    #[error("monoid is not sharp")]
    NotSharp,
    #[error("monoid is not saturated")]
    NotSaturated,
    #[error("not a face: {0}")]
    NotAFace(String),
    #[error("no multiple of the given vector lies in the monoid below cap {cap}")]
    CapExceeded { cap: u32 },
    #[error("generator image lies outside the target monoid")]
    ImageOutsideTarget,
}

/// A submonoid of Z^r given by a finite generator list. The cone over the
/// generators is described both ways (normals and rays), sharpness and
/// saturation are decided at construction, and the saturation itself is
/// precomputed whenever the monoid is not already saturated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineMonoid {
    rank: usize,
    generators: Vec<Vec<BigInt>>,
    normals: Vec<Vec<BigInt>>,
    lineality: Vec<Vec<BigInt>>,
    rays: Vec<Vec<BigInt>>,
    sharp: bool,
    saturated: bool,
    hilbert: Option<Vec<Vec<BigInt>>>,
    saturation: Option<Box<AffineMonoid>>,
}

fn is_zero_vec(v: &[BigInt]) -> bool {
    v.iter().all(|x| x.is_zero())
}

/// Deduplicated nonzero generators, each tagged with the position of its
/// first occurrence in the original list, sorted by (grading value, lex).
fn dedup_generators(
    generators: &[Vec<BigInt>],
    w: &[BigInt],
) -> Vec<(BigInt, Vec<BigInt>, usize)> {
    let mut seen: BTreeSet<Vec<BigInt>> = BTreeSet::new();
    let mut out = Vec::new();
    for (i, g) in generators.iter().enumerate() {
        if is_zero_vec(g) || !seen.insert(g.clone()) {
            continue;
        }
        out.push((dot(w, g), g.clone(), i));
    }
    out.sort();
    out
}

/// The unique k >= 0 with y = k·g, if it exists. g must be nonzero.
fn exact_multiple(y: &[BigInt], g: &[BigInt]) -> Option<BigInt> {
    let i = g.iter().position(|c| !c.is_zero()).expect("nonzero generator");
    let (k, rem) = num_integer::div_rem(y[i].clone(), g[i].clone());
    if !rem.is_zero() || k.is_negative() {
        return None;
    }
    if y.iter().zip(g).all(|(a, b)| *a == b * &k) {
        Some(k)
    } else {
        None
    }
}

/// Graded backtracking search for x as a non-negative integer combination of
/// the generators. Returns multiplicity counts over the original generator
/// list (duplicates attributed to the first occurrence), or None.
///
/// One recursion level per distinct generator, choosing its multiplicity
/// outright, so certificates with huge counts cost no stack depth. The
/// multiplicity at each level is capped by the grading and the remainder is
/// kept inside the cone; both prunes are lossless because any tail of a
/// valid combination is itself a sum of generators.
fn membership(
    x: &[BigInt],
    generators: &[Vec<BigInt>],
    normals: &[Vec<BigInt>],
    w: &[BigInt],
) -> Option<Vec<BigInt>> {
    if !in_cone(x, normals) {
        return None;
    }
    let mut counts = vec![BigInt::zero(); generators.len()];
    if is_zero_vec(x) {
        return Some(counts);
    }
    let mut gens = dedup_generators(generators, w);
    gens.reverse();
    if gens.is_empty() {
        return None;
    }
    let mut failed: BTreeSet<(usize, Vec<BigInt>)> = BTreeSet::new();

    fn go(
        idx: usize,
        y: Vec<BigInt>,
        gens: &[(BigInt, Vec<BigInt>, usize)],
        normals: &[Vec<BigInt>],
        w: &[BigInt],
        failed: &mut BTreeSet<(usize, Vec<BigInt>)>,
        counts: &mut [BigInt],
    ) -> bool {
        if is_zero_vec(&y) {
            return true;
        }
        let (wg, g, orig) = &gens[idx];
        if idx + 1 == gens.len() {
            if let Some(k) = exact_multiple(&y, g) {
                counts[*orig] += k;
                return true;
            }
            return false;
        }
        if failed.contains(&(idx, y.clone())) {
            return false;
        }
        let mut k = dot(w, &y) / wg;
        loop {
            let z: Vec<BigInt> = y.iter().zip(g).map(|(a, b)| a - b * &k).collect();
            if in_cone(&z, normals) && go(idx + 1, z, gens, normals, w, failed, counts) {
                counts[*orig] += k;
                return true;
            }
            if k.is_zero() {
                break;
            }
            k -= 1;
        }
        failed.insert((idx, y));
        false
    }

    if go(0, x.to_vec(), &gens, normals, w, &mut failed, &mut counts) {
        Some(counts)
    } else {
        None
    }
}

impl AffineMonoid {
    pub fn from_generators(rank: usize, generators: Vec<Vec<BigInt>>) -> AffineMonoid {
        for g in &generators {
            assert_eq!(g.len(), rank, "generator has wrong dimension");
        }
        let mut cone_gens: Vec<Vec<BigInt>> = {
            let set: BTreeSet<Vec<BigInt>> =
                generators.iter().filter(|g| !is_zero_vec(g)).cloned().collect();
            set.into_iter().collect()
        };
        cone_gens.sort();
        let normals = dual_description(&cone_gens, rank);
        let sharp = IntMat::from_rows_with_cols(normals.clone(), rank).rank() == rank;

        if sharp {
            let rays = extremal_rays(&cone_gens, &normals, rank);
            let hb = hilbert_basis_of_cone(&rays, &normals, rank);
            let w = positive_grading(&normals, rank);
            let saturated = hb
                .iter()
                .all(|b| membership(b, &generators, &normals, &w).is_some());
            let saturation = if saturated {
                None
            } else {
                Some(Box::new(AffineMonoid {
                    rank,
                    generators: hb.clone(),
                    normals: normals.clone(),
                    lineality: Vec::new(),
                    rays: rays.clone(),
                    sharp: true,
                    saturated: true,
                    hilbert: Some(hb.clone()),
                    saturation: None,
                }))
            };
            AffineMonoid {
                rank,
                generators,
                normals,
                lineality: Vec::new(),
                rays,
                sharp: true,
                saturated,
                hilbert: if saturated { Some(hb) } else { None },
                saturation,
            }
        } else {
            // Not sharp: split off the unit directions. The cone's lineality
            // lattice is the kernel of the normals; the monoid is saturated
            // iff its unit lattice is that whole lattice and the projection
            // to the pointed quotient is saturated there.
            let lineality = hermite_rows(
                &IntMat::from_rows_with_cols(normals.clone(), rank).kernel_basis(),
                rank,
            );
            let unit_gens: Vec<Vec<BigInt>> = cone_gens
                .iter()
                .filter(|g| normals.iter().all(|h| dot(h, g).is_zero()))
                .cloned()
                .collect();
            let units_full = hermite_rows(&unit_gens, rank) == lineality;
            let quot = LatticeQuotient::new(&lineality, rank);
            let q_gens: Vec<Vec<BigInt>> =
                cone_gens.iter().map(|g| quot.project(g)).collect();
            let q = AffineMonoid::from_generators(quot.quotient_rank(), q_gens);
            debug_assert!(q.sharp, "pointed quotient must be sharp");
            let saturated = units_full && q.saturated;
            let saturation = if saturated {
                None
            } else {
                let mut sat_gens: Vec<Vec<BigInt>> = Vec::new();
                for b in &lineality {
                    sat_gens.push(b.clone());
                    sat_gens.push(b.iter().map(|x| -x).collect());
                }
                for h in q.saturate().hilbert_basis().expect("pointed quotient") {
                    sat_gens.push(quot.lift(&h));
                }
                sat_gens.sort();
                let sat = AffineMonoid::from_generators(rank, sat_gens);
                debug_assert!(sat.saturated, "saturation must be saturated");
                Some(Box::new(sat))
            };
            AffineMonoid {
                rank,
                generators,
                normals,
                lineality,
                rays: Vec::new(),
                sharp: false,
                saturated,
                hilbert: None,
                saturation,
            }
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn generators(&self) -> &[Vec<BigInt>] {
        &self.generators
    }

    /// Minimal primitive inequality description of cone(N).
    pub fn dual_description(&self) -> &[Vec<BigInt>] {
        &self.normals
    }

    pub fn is_sharp(&self) -> bool {
        self.sharp
    }

    pub fn is_saturated(&self) -> bool {
        self.saturated
    }

    /// Hermite basis of the unit lattice of cone(N); empty iff sharp.
    pub fn lineality(&self) -> &[Vec<BigInt>] {
        &self.lineality
    }

    pub fn extremal_rays(&self) -> Result<&[Vec<BigInt>], MonoidError> {
        if !self.sharp {
            return Err(MonoidError::NotSharp);
        }
        Ok(&self.rays)
    }

    /// The unique minimal generating set of a sharp monoid: the cached cone
    /// Hilbert basis when saturated, the irreducible generators otherwise.
    pub fn hilbert_basis(&self) -> Result<Vec<Vec<BigInt>>, MonoidError> {
        if !self.sharp {
            return Err(MonoidError::NotSharp);
        }
        if let Some(hb) = &self.hilbert {
            return Ok(hb.clone());
        }
        let w = positive_grading(&self.normals, self.rank);
        let cands = dedup_generators(&self.generators, &w);
        let mut out = Vec::new();
        'cand: for (_, c, _) in &cands {
            for (_, g, _) in &cands {
                let z: Vec<BigInt> = c.iter().zip(g).map(|(a, b)| a - b).collect();
                if is_zero_vec(&z) {
                    continue;
                }
                if membership(&z, &self.generators, &self.normals, &w).is_some() {
                    continue 'cand;
                }
            }
            out.push(c.clone());
        }
        out.sort();
        Ok(out)
    }

    /// The saturation cone_Q(N) ∩ Z^r, precomputed at construction.
    pub fn saturate(&self) -> AffineMonoid {
        match &self.saturation {
            None => self.clone(),
            Some(s) => (**s).clone(),
        }
    }

    /// Membership with certificate: multiplicities over the generator list
    /// summing to x, or None. Requires sharpness for graded termination.
    pub fn contains(&self, x: &[BigInt]) -> Result<Option<Vec<BigInt>>, MonoidError> {
        assert_eq!(x.len(), self.rank);
        if !self.sharp {
            return Err(MonoidError::NotSharp);
        }
        let w = positive_grading(&self.normals, self.rank);
        Ok(membership(x, &self.generators, &self.normals, &w))
    }

    /// Smallest m in 1..=cap with m·a in the monoid, with its certificate.
    pub fn multiple_in_unsaturated(
        &self,
        a: &[BigInt],
        cap: u32,
    ) -> Result<(u32, Vec<BigInt>), MonoidError> {
        assert!(cap >= 1);
        for m in 1..=cap {
            let x: Vec<BigInt> = a.iter().map(|c| c * BigInt::from(m)).collect();
            if let Some(cert) = self.contains(&x)? {
                return Ok((m, cert));
            }
        }
        Err(MonoidError::CapExceeded { cap })
    }

    /// Quotient by the face spanned by the given Hilbert basis elements:
    /// the image of N in Z^r modulo the group spanned by the face, torsion
    /// killed and the image re-saturated. The morphism records where every
    /// generator goes. Fails unless the given set is exactly the Hilbert
    /// basis of a face of the cone.
    pub fn face_quotient(
        &self,
        face: &[Vec<BigInt>],
    ) -> Result<(AffineMonoid, MonoidMorphism), MonoidError> {
        if !self.sharp {
            return Err(MonoidError::NotSharp);
        }
        if !self.saturated {
            return Err(MonoidError::NotSaturated);
        }
        let hb = self.hilbert.as_ref().expect("saturated monoid carries its basis");
        let hb_set: BTreeSet<&Vec<BigInt>> = hb.iter().collect();
        let face_set: BTreeSet<&Vec<BigInt>> = face.iter().collect();
        for f in &face_set {
            if !hb_set.contains(*f) {
                return Err(MonoidError::NotAFace(format!(
                    "{:?} is not a Hilbert basis element",
                    f
                )));
            }
        }
        // The minimal face containing the given elements is cut out by the
        // normals vanishing on all of them; it must contain no other basis
        // element.
        let vanishing: Vec<&Vec<BigInt>> = self
            .normals
            .iter()
            .filter(|h| face_set.iter().all(|f| dot(h, f).is_zero()))
            .collect();
        let zero_hb: Vec<&Vec<BigInt>> = hb
            .iter()
            .filter(|b| vanishing.iter().all(|h| dot(h, b).is_zero()))
            .collect();
        if zero_hb.len() != face_set.len() {
            let extra: Vec<String> = zero_hb
                .iter()
                .filter(|b| !face_set.contains(**b))
                .map(|b| format!("{:?}", b))
                .collect();
            return Err(MonoidError::NotAFace(format!(
                "the minimal face containing the given elements also contains {}",
                extra.join(", ")
            )));
        }

        let face_rows: Vec<Vec<BigInt>> = face_set.iter().map(|f| (*f).clone()).collect();
        let quot = LatticeQuotient::new(&face_rows, self.rank);
        let images: Vec<Vec<BigInt>> =
            self.generators.iter().map(|g| quot.project(g)).collect();
        let image = AffineMonoid::from_generators(quot.quotient_rank(), images);
        let target = image.saturate();
        let morphism = MonoidMorphism::new(self.clone(), target.clone(), quot.matrix())?;
        Ok((target, morphism))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mat::big;

    fn vecs(data: &[&[i64]]) -> Vec<Vec<BigInt>> {
        data.iter().map(|r| r.iter().map(|&x| big(x)).collect()).collect()
    }

    fn monoid(rank: usize, data: &[&[i64]]) -> AffineMonoid {
        AffineMonoid::from_generators(rank, vecs(data))
    }

    #[test]
    fn quadrant_is_sharp_and_saturated() {
        let n = monoid(2, &[&[1, 0], &[0, 1]]);
        assert!(n.is_sharp());
        assert!(n.is_saturated());
        assert_eq!(n.hilbert_basis().unwrap(), vecs(&[&[0, 1], &[1, 0]]));
        assert_eq!(n.extremal_rays().unwrap(), vecs(&[&[0, 1], &[1, 0]]));
    }

    #[test]
    fn numerical_semigroup_saturates_to_n() {
        let n = monoid(1, &[&[2], &[3]]);
        assert!(n.is_sharp());
        assert!(!n.is_saturated());
        let sat = n.saturate();
        assert!(sat.is_saturated());
        assert_eq!(sat.hilbert_basis().unwrap(), vecs(&[&[1]]));
        // Irreducible generators of the unsaturated monoid.
        assert_eq!(n.hilbert_basis().unwrap(), vecs(&[&[2], &[3]]));
    }

    #[test]
    fn skew_cone_saturation() {
        let n = monoid(2, &[&[1, 0], &[1, 2]]);
        assert!(!n.is_saturated());
        let sat = n.saturate();
        assert_eq!(
            sat.hilbert_basis().unwrap(),
            vecs(&[&[1, 0], &[1, 1], &[1, 2]])
        );
        assert_eq!(n.extremal_rays().unwrap(), vecs(&[&[1, 0], &[1, 2]]));
    }

    #[test]
    fn single_ray_off_axis_is_saturated() {
        let n = monoid(1, &[&[1]]);
        assert!(n.is_saturated());
        // A non-primitive single generator is not saturated in its span.
        let m = monoid(1, &[&[2]]);
        assert!(!m.is_saturated());
        assert_eq!(m.saturate().hilbert_basis().unwrap(), vecs(&[&[1]]));
    }

    #[test]
    fn full_line_is_not_sharp() {
        let n = monoid(1, &[&[1], &[-1]]);
        assert!(!n.is_sharp());
        assert!(n.is_saturated());
        assert_eq!(n.extremal_rays(), Err(MonoidError::NotSharp));
        assert_eq!(n.hilbert_basis(), Err(MonoidError::NotSharp));
    }

    #[test]
    fn sign_cancellation_units() {
        let n = monoid(2, &[&[1, 0], &[0, 1], &[-1, -1]]);
        assert!(!n.is_sharp());
        // The three generators sum to zero, so every generator is a unit and
        // the monoid is the full lattice: saturated.
        assert!(n.is_saturated());
    }

    #[test]
    fn non_sharp_unsaturated() {
        // Lineality direction generated imprimitively: units are 2Z x 0,
        // but the lineality lattice is Z x 0.
        let n = monoid(2, &[&[2, 0], &[-2, 0], &[0, 1]]);
        assert!(!n.is_sharp());
        assert!(!n.is_saturated());
        let sat = n.saturate();
        assert!(sat.is_saturated());
        assert!(!sat.is_sharp());
        // (1, 0) is a unit of the saturation.
        assert_eq!(sat.lineality(), &vecs(&[&[1, 0]])[..]);
    }

    #[test]
    fn saturate_is_idempotent_and_extensive() {
        for gens in [
            vecs(&[&[2], &[3]]),
            vecs(&[&[1, 0], &[1, 2]]),
            vecs(&[&[2, 0], &[0, 3]]),
            vecs(&[&[1, 1], &[-1, 1]]),
        ] {
            let rank = gens[0].len();
            let n = AffineMonoid::from_generators(rank, gens.clone());
            let sat = n.saturate();
            let sat2 = sat.saturate();
            assert!(sat.is_saturated());
            assert_eq!(sat.dual_description(), sat2.dual_description());
            if sat.is_sharp() {
                assert_eq!(sat.hilbert_basis(), sat2.hilbert_basis());
                for g in &gens {
                    assert!(sat.contains(g).unwrap().is_some(), "extensive: {:?}", g);
                }
            }
        }
    }

    #[test]
    fn contains_certificates() {
        let n = monoid(1, &[&[2], &[3]]);
        let cert = n.contains(&[big(7)]).unwrap().expect("7 = 2 + 2 + 3");
        assert_eq!(&cert[0] * big(2) + &cert[1] * big(3), big(7));
        assert_eq!(n.contains(&[big(1)]).unwrap(), None);
        let n2 = monoid(2, &[&[1, 0], &[0, 1]]);
        assert_eq!(
            n2.contains(&[big(0), big(0)]).unwrap(),
            Some(vec![big(0), big(0)])
        );
    }

    #[test]
    fn certificate_respects_duplicate_generators() {
        let n = monoid(1, &[&[2], &[2], &[3]]);
        let cert = n.contains(&[big(4)]).unwrap().unwrap();
        assert_eq!(cert.len(), 3);
        assert_eq!(&cert[0] * big(2) + &cert[1] * big(2) + &cert[2] * big(3), big(4));
        // Duplicates are attributed to the first occurrence.
        assert_eq!(cert[1], big(0));
    }

    #[test]
    fn smallest_multiples() {
        let n = monoid(1, &[&[2], &[3]]);
        let (m, cert) = n.multiple_in_unsaturated(&[big(1)], 256).unwrap();
        assert_eq!(m, 2);
        assert_eq!(&cert[0] * big(2) + &cert[1] * big(3), big(2));

        let skew = monoid(2, &[&[1, 0], &[1, 2]]);
        let (m2, _) = skew.multiple_in_unsaturated(&[big(1), big(1)], 256).unwrap();
        assert_eq!(m2, 2);

        // Saturated monoid: every Hilbert basis element is already inside.
        let sat = skew.saturate();
        for b in sat.hilbert_basis().unwrap() {
            assert_eq!(sat.multiple_in_unsaturated(&b, 8).unwrap().0, 1);
        }

        // A cap that is too small reports itself.
        assert_eq!(
            n.multiple_in_unsaturated(&[big(1)], 1),
            Err(MonoidError::CapExceeded { cap: 1 })
        );
    }

    #[test]
    fn face_quotient_of_quadrant() {
        let n = monoid(2, &[&[1, 0], &[0, 1]]);
        let (q, phi) = n.face_quotient(&vecs(&[&[0, 1]])).unwrap();
        assert_eq!(q.rank(), 1);
        assert_eq!(q.hilbert_basis().unwrap(), vecs(&[&[1]]));
        // The face maps to zero, the complementary generator to a generator.
        let images: BTreeSet<Vec<BigInt>> =
            phi.generator_images().iter().cloned().collect();
        assert!(images.contains(&vec![big(0)]));
        assert_eq!(phi.apply(&[big(0), big(1)]), vec![big(0)]);
    }

    #[test]
    fn face_quotient_empty_face_is_identity() {
        let n = monoid(2, &[&[1, 0], &[0, 1]]);
        let (q, phi) = n.face_quotient(&[]).unwrap();
        assert_eq!(q.rank(), 2);
        assert_eq!(q.hilbert_basis().unwrap(), n.hilbert_basis().unwrap());
        assert!(phi.is_isomorphism());
    }

    #[test]
    fn face_quotient_of_skew_cone_face() {
        // Hilbert basis {(1,0),(1,1),(1,2)}; the face spanned by (1,0) kills
        // it, sends (1,1) to a half-point, and re-saturates to N.
        let sat = monoid(2, &[&[1, 0], &[1, 2]]).saturate();
        let (q, phi) = sat.face_quotient(&vecs(&[&[1, 0]])).unwrap();
        assert_eq!(q.rank(), 1);
        assert_eq!(q.hilbert_basis().unwrap(), vecs(&[&[1]]));
        let mut image_abs: Vec<BigInt> = phi
            .generator_images()
            .iter()
            .map(|v| if v[0] < BigInt::zero() { -&v[0] } else { v[0].clone() })
            .collect();
        image_abs.sort();
        assert_eq!(image_abs, vec![big(0), big(1), big(2)]);
    }

    #[test]
    fn face_quotient_of_whole_monoid_is_zero() {
        let n = monoid(2, &[&[1, 0], &[0, 1]]);
        let hb = n.hilbert_basis().unwrap();
        let (q, phi) = n.face_quotient(&hb).unwrap();
        assert_eq!(q.rank(), 0);
        for img in phi.generator_images() {
            assert!(img.is_empty());
        }
    }

    #[test]
    fn face_quotient_rejects_non_faces() {
        // (1,1) is interior: the minimal face containing it is everything.
        let sat = monoid(2, &[&[1, 0], &[1, 2]]).saturate();
        assert!(matches!(
            sat.face_quotient(&vecs(&[&[1, 1]])),
            Err(MonoidError::NotAFace(_))
        ));
        // (5,5) is not a Hilbert basis element at all.
        assert!(matches!(
            sat.face_quotient(&vecs(&[&[5, 5]])),
            Err(MonoidError::NotAFace(_))
        ));
        // Unsaturated and non-sharp inputs are rejected up front.
        let unsat = monoid(1, &[&[2], &[3]]);
        assert_eq!(
            unsat.face_quotient(&[]).unwrap_err(),
            MonoidError::NotSaturated
        );
        let line = monoid(1, &[&[1], &[-1]]);
        assert_eq!(line.face_quotient(&[]).unwrap_err(), MonoidError::NotSharp);
    }

    #[test]
    fn rank_zero_monoid() {
        let n = AffineMonoid::from_generators(0, vec![vec![], vec![]]);
        assert!(n.is_sharp());
        assert!(n.is_saturated());
        assert!(n.hilbert_basis().unwrap().is_empty());
        assert_eq!(n.contains(&[]).unwrap(), Some(vec![big(0), big(0)]));
    }

    #[test]
    fn no_basis_element_is_a_sum() {
        for gens in [vecs(&[&[1, 0], &[1, 2]]), vecs(&[&[1, 0], &[1, 3]])] {
            let sat = AffineMonoid::from_generators(2, gens).saturate();
            let hb = sat.hilbert_basis().unwrap();
            for b in &hb {
                for x in &hb {
                    let rest: Vec<BigInt> = b.iter().zip(x).map(|(a, c)| a - c).collect();
                    if rest.iter().all(|v| v.is_zero()) {
                        continue;
                    }
                    // b - x must not be a nonzero monoid element.
                    if let Some(_c) = sat.contains(&rest).unwrap() {
                        panic!("basis element {:?} = {:?} + {:?}", b, x, rest);
                    }
                }
            }
        }
    }
}
