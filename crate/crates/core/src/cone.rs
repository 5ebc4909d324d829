//! Rational polyhedral cones with both descriptions kept canonical.
//!
//! A cone stores its extreme rays modulo lineality and its facet normals
//! modulo the orthogonal complement of its span. Representatives are chosen
//! canonically: rays are projected orthogonally onto the complement of the
//! lineality space, facet normals onto the span, both made primitive and
//! sorted. Lineality and equation lattices are stored by Hermite basis. Two
//! cones are equal iff they are equal as sets, and the dual is obtained by
//! swapping the two descriptions.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::dd::hrep_to_vrep;
use crate::error::{Error, Result};
use crate::lattice::{orthogonal_basis, Sublattice};
use crate::linalg::{project_orthogonal, IntMatrix, IntVector};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cone {
    ambient_rank: usize,
    rays: Vec<IntVector>,
    lineality: Vec<IntVector>,
    facets: Vec<IntVector>,
    equations: Vec<IntVector>,
}

/// Position of a point relative to a cone.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Membership {
    Outside,
    Boundary,
    RelativeInterior,
}

/// A face together with a normal `u` in the dual cone cutting it out as
/// `cone ∩ u^⊥`. The cone itself is the improper face and carries no normal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Face {
    pub cone: Cone,
    pub supporting_normal: Option<IntVector>,
}

fn check_dims(n: usize, vs: &[IntVector]) -> Result<()> {
    match vs.iter().find(|v| v.dim() != n) {
        Some(v) => Err(Error::DimensionMismatch {
            expected: n,
            found: v.dim(),
        }),
        None => Ok(()),
    }
}

fn rank_of(n: usize, vs: &[IntVector]) -> usize {
    if vs.is_empty() {
        return 0;
    }
    IntMatrix::from_rows(n, vs).expect("dimension").rank()
}

impl Cone {
    fn build(n: usize, gens: &[IntVector]) -> Cone {
        let gens: Vec<IntVector> = gens
            .iter()
            .filter(|g| !g.is_zero())
            .map(IntVector::primitive)
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();

        let equations = orthogonal_basis(n, &gens);
        let dual = hrep_to_vrep(n, &gens);
        debug_assert_eq!(dual.lineality.len(), equations.len());
        let facets: Vec<IntVector> = dual
            .rays
            .iter()
            .map(|r| project_orthogonal(r, &equations))
            .filter(|r| !r.is_zero())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();

        let mut normals = equations.clone();
        normals.extend(facets.iter().cloned());
        let lineality = orthogonal_basis(n, &normals);

        let target_rank = n.saturating_sub(lineality.len() + 1);
        let mut rays = BTreeSet::new();
        for g in &gens {
            let p = project_orthogonal(g, &lineality);
            if p.is_zero() {
                continue;
            }
            let mut tight: Vec<IntVector> = facets
                .iter()
                .filter(|f| f.dot(&p).is_zero())
                .cloned()
                .collect();
            tight.extend(equations.iter().cloned());
            if rank_of(n, &tight) == target_rank {
                rays.insert(p);
            }
        }

        Cone {
            ambient_rank: n,
            rays: rays.into_iter().collect(),
            lineality,
            facets,
            equations,
        }
    }

    /// Conic hull of the generators, canonicalized.
    pub fn from_generators(ambient_rank: usize, generators: &[IntVector]) -> Result<Cone> {
        check_dims(ambient_rank, generators)?;
        Ok(Self::build(ambient_rank, generators))
    }

    /// `{v : a.v >= 0 for a in ineqs, e.v = 0 for e in eqs}`.
    pub fn from_inequalities(
        ambient_rank: usize,
        ineqs: &[IntVector],
        eqs: &[IntVector],
    ) -> Result<Cone> {
        check_dims(ambient_rank, ineqs)?;
        check_dims(ambient_rank, eqs)?;
        let mut gens = ineqs.to_vec();
        for e in eqs {
            gens.push(e.clone());
            gens.push(e.neg());
        }
        Ok(Self::build(ambient_rank, &gens).dual())
    }

    pub fn zero(ambient_rank: usize) -> Cone {
        Self::build(ambient_rank, &[])
    }

    pub fn full(ambient_rank: usize) -> Cone {
        Self::zero(ambient_rank).dual()
    }

    /// The linear subspace spanned by `basis`.
    pub fn linear(ambient_rank: usize, basis: &[IntVector]) -> Result<Cone> {
        let mut gens = basis.to_vec();
        gens.extend(basis.iter().map(IntVector::neg));
        Self::from_generators(ambient_rank, &gens)
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient_rank
    }

    /// Extreme rays modulo lineality (canonical representatives).
    pub fn rays(&self) -> &[IntVector] {
        &self.rays
    }

    /// Hermite basis of the lattice points of the lineality space.
    pub fn lineality(&self) -> &[IntVector] {
        &self.lineality
    }

    pub fn facet_normals(&self) -> &[IntVector] {
        &self.facets
    }

    /// Hermite basis of the lattice points of `span(c)^⊥`.
    pub fn equations(&self) -> &[IntVector] {
        &self.equations
    }

    pub fn dim(&self) -> usize {
        self.ambient_rank - self.equations.len()
    }

    pub fn lineality_dim(&self) -> usize {
        self.lineality.len()
    }

    pub fn is_strictly_convex(&self) -> bool {
        self.lineality.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.rays.is_empty() && self.lineality.is_empty()
    }

    pub fn is_linear(&self) -> bool {
        self.rays.is_empty()
    }

    /// Rays plus both signs of the lineality basis.
    pub fn generators(&self) -> Vec<IntVector> {
        let mut g = self.rays.clone();
        for l in &self.lineality {
            g.push(l.clone());
            g.push(l.neg());
        }
        g
    }

    pub fn dual(&self) -> Cone {
        Cone {
            ambient_rank: self.ambient_rank,
            rays: self.facets.clone(),
            lineality: self.equations.clone(),
            facets: self.rays.clone(),
            equations: self.lineality.clone(),
        }
    }

    pub fn sum(&self, other: &Cone) -> Result<Cone> {
        self.same_rank(other)?;
        let mut gens = self.generators();
        gens.extend(other.generators());
        Ok(Self::build(self.ambient_rank, &gens))
    }

    pub fn intersect(&self, other: &Cone) -> Result<Cone> {
        self.same_rank(other)?;
        Ok(self.dual().sum(&other.dual())?.dual())
    }

    fn same_rank(&self, other: &Cone) -> Result<()> {
        if self.ambient_rank != other.ambient_rank {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_rank,
                found: other.ambient_rank,
            });
        }
        Ok(())
    }

    pub fn membership(&self, v: &IntVector) -> Membership {
        if v.dim() != self.ambient_rank || self.equations.iter().any(|e| !e.dot(v).is_zero()) {
            return Membership::Outside;
        }
        let mut interior = true;
        for f in &self.facets {
            let x = f.dot(v);
            if x.is_negative() {
                return Membership::Outside;
            }
            if x.is_zero() {
                interior = false;
            }
        }
        if interior {
            Membership::RelativeInterior
        } else {
            Membership::Boundary
        }
    }

    pub fn contains_point(&self, v: &IntVector) -> bool {
        self.membership(v) != Membership::Outside
    }

    pub fn contains(&self, other: &Cone) -> bool {
        self.ambient_rank == other.ambient_rank
            && other.generators().iter().all(|g| self.contains_point(g))
    }

    /// Sum of the rays and the lineality basis: a deterministic lattice point
    /// of the relative interior (the origin for the zero cone).
    pub fn relative_interior_point(&self) -> IntVector {
        self.rays
            .iter()
            .chain(&self.lineality)
            .fold(IntVector::zero(self.ambient_rank), |acc, r| acc.add(r))
    }

    pub fn minimal_face(&self) -> Cone {
        Cone::linear(self.ambient_rank, &self.lineality).expect("lineality dimension")
    }

    fn tight_facets(&self, p: &IntVector) -> Vec<usize> {
        (0..self.facets.len())
            .filter(|&i| self.facets[i].dot(p).is_zero())
            .collect()
    }

    fn face_from_tight(&self, tight: &[usize]) -> Face {
        if tight.is_empty() {
            return Face {
                cone: self.clone(),
                supporting_normal: None,
            };
        }
        let mut gens: Vec<IntVector> = self
            .rays
            .iter()
            .filter(|r| tight.iter().all(|&i| self.facets[i].dot(r).is_zero()))
            .cloned()
            .collect();
        for l in &self.lineality {
            gens.push(l.clone());
            gens.push(l.neg());
        }
        let normal = tight
            .iter()
            .fold(IntVector::zero(self.ambient_rank), |acc, &i| acc.add(&self.facets[i]))
            .primitive();
        Face {
            cone: Self::build(self.ambient_rank, &gens),
            supporting_normal: Some(normal),
        }
    }

    /// The face whose relative interior meets the relative interior of `sub`.
    pub fn smallest_face_containing(&self, sub: &Cone) -> Result<Face> {
        if !self.contains(sub) {
            return Err(Error::NotContained {
                inner: sub.clone(),
                outer: self.clone(),
            });
        }
        let tight = self.tight_facets(&sub.relative_interior_point());
        Ok(self.face_from_tight(&tight))
    }

    pub fn is_face(&self, sub: &Cone) -> bool {
        self.smallest_face_containing(sub)
            .map(|f| f.cone == *sub)
            .unwrap_or(false)
    }

    /// All faces, sorted by dimension and then canonical key; the cone itself
    /// is last.
    pub fn faces(&self) -> Vec<Face> {
        let incidence: Vec<BTreeSet<usize>> = self
            .rays
            .iter()
            .map(|r| self.tight_facets(r).into_iter().collect())
            .collect();
        let all: BTreeSet<usize> = (0..self.rays.len()).collect();
        let mut seen: BTreeSet<BTreeSet<usize>> = BTreeSet::new();
        seen.insert(all.clone());
        let mut stack = vec![all];
        let mut faces = Vec::new();
        while let Some(rs) = stack.pop() {
            let tight: Vec<usize> = (0..self.facets.len())
                .filter(|i| rs.iter().all(|&j| incidence[j].contains(i)))
                .collect();
            faces.push(self.face_from_tight(&tight));
            for i in 0..self.facets.len() {
                if tight.contains(&i) {
                    continue;
                }
                let next: BTreeSet<usize> =
                    rs.iter().copied().filter(|&j| incidence[j].contains(&i)).collect();
                if seen.insert(next.clone()) {
                    stack.push(next);
                }
            }
        }
        faces.sort_by(|a, b| {
            a.cone
                .dim()
                .cmp(&b.cone.dim())
                .then_with(|| a.cone.cmp(&b.cone))
        });
        faces
    }

    /// All faces as cones, in the order of [`Cone::faces`].
    pub fn face_cones(&self) -> Vec<Cone> {
        self.faces().into_iter().map(|f| f.cone).collect()
    }

    pub fn image(&self, a: &IntMatrix) -> Result<Cone> {
        if a.cols() != self.ambient_rank {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_rank,
                found: a.cols(),
            });
        }
        let gens = self
            .generators()
            .iter()
            .map(|g| a.apply(g))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::build(a.rows(), &gens))
    }

    /// `{v : A v ∈ self}`.
    pub fn preimage(&self, a: &IntMatrix) -> Result<Cone> {
        if a.rows() != self.ambient_rank {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_rank,
                found: a.rows(),
            });
        }
        let at = a.transpose();
        let ineqs = self
            .facets
            .iter()
            .map(|f| at.apply(f))
            .collect::<Result<Vec<_>>>()?;
        let eqs = self
            .equations
            .iter()
            .map(|e| at.apply(e))
            .collect::<Result<Vec<_>>>()?;
        Cone::from_inequalities(a.cols(), &ineqs, &eqs)
    }

    /// `(c ∩ {u >= 0}, c ∩ {u <= 0}, c ∩ u^⊥)`.
    pub fn halfspace_split(&self, u: &IntVector) -> Result<(Cone, Cone, Cone)> {
        if u.dim() != self.ambient_rank {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_rank,
                found: u.dim(),
            });
        }
        if u.is_zero() {
            return Ok((self.clone(), self.clone(), self.clone()));
        }
        let n = self.ambient_rank;
        let pos = self.intersect(&Cone::from_inequalities(n, std::slice::from_ref(u), &[])?)?;
        let neg = self.intersect(&Cone::from_inequalities(n, &[u.neg()], &[])?)?;
        let zero = self.intersect(&Cone::from_inequalities(n, &[], std::slice::from_ref(u))?)?;
        Ok((pos, neg, zero))
    }

    /// `N ∩ span(c)`.
    pub fn span_lattice(&self) -> Sublattice {
        Sublattice::from_saturated_basis(
            self.ambient_rank,
            orthogonal_basis(self.ambient_rank, &self.equations),
        )
    }

    pub fn lineality_lattice(&self) -> Sublattice {
        Sublattice::from_saturated_basis(self.ambient_rank, self.lineality.clone())
    }

    /// Evaluates `sum c_i * ray_i` for nonnegative integer coefficients; used by
    /// samplers.
    pub fn combination(&self, ray_coeffs: &[BigInt], lin_coeffs: &[BigInt]) -> IntVector {
        let mut v = IntVector::zero(self.ambient_rank);
        for (c, r) in ray_coeffs.iter().zip(&self.rays) {
            v = v.add(&r.scale(c));
        }
        for (c, l) in lin_coeffs.iter().zip(&self.lineality) {
            v = v.add(&l.scale(c));
        }
        v
    }
}

impl PartialOrd for Cone {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Canonical key order: ambient rank, then sorted rays, then lineality basis.
impl Ord for Cone {
    fn cmp(&self, other: &Self) -> Ordering {
        self.ambient_rank
            .cmp(&other.ambient_rank)
            .then_with(|| self.rays.cmp(&other.rays))
            .then_with(|| self.lineality.cmp(&other.lineality))
    }
}

impl fmt::Display for Cone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "cone(")?;
        for (i, r) in self.rays.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{r}")?;
        }
        if !self.lineality.is_empty() {
            write!(f, "; lin ")?;
            for (i, l) in self.lineality.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{l}")?;
            }
        }
        if self.is_zero() {
            write!(f, "0 in Z^{}", self.ambient_rank)?;
        }
        write!(f, ")")
    }
}

/// Free-function form of [`Cone::from_generators`].
pub fn cone_from_rays(ambient_rank: usize, generators: &[IntVector]) -> Result<Cone> {
    Cone::from_generators(ambient_rank, generators)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(x: &[i64]) -> IntVector {
        IntVector::from_i64s(x)
    }

    fn cone(n: usize, gens: &[&[i64]]) -> Cone {
        let g: Vec<IntVector> = gens.iter().map(|x| v(x)).collect();
        Cone::from_generators(n, &g).unwrap()
    }

    #[test]
    fn redundant_generator_removed() {
        let c = cone(2, &[&[1, 0], &[0, 1], &[1, 1]]);
        assert_eq!(c.rays(), &[v(&[0, 1]), v(&[1, 0])]);
        assert!(c.is_strictly_convex());
        assert_eq!(c.dim(), 2);
    }

    #[test]
    fn opposite_generators_give_lineality() {
        let c = cone(2, &[&[1, 0], &[-1, 0], &[0, 1]]);
        assert_eq!(c.lineality(), &[v(&[1, 0])]);
        assert_eq!(c.rays(), &[v(&[0, 1])]);
        assert_eq!(c.facet_normals(), &[v(&[0, 1])]);
    }

    #[test]
    fn sigma4_canonical() {
        let c = cone(4, &[&[1, 0, 0, 0], &[1, -1, 1, 0], &[0, 0, 1, 0], &[0, 0, 0, 1]]);
        assert_eq!(c.rays().len(), 4);
        assert_eq!(c.dim(), 4);
        assert!(c.is_strictly_convex());
    }

    #[test]
    fn dual_examples() {
        let oct = cone(2, &[&[1, 0], &[0, 1]]);
        assert_eq!(oct.dual(), oct);
        assert_eq!(Cone::full(2).dual(), Cone::zero(2));
        let c = cone(2, &[&[1, 0], &[1, 1]]);
        assert_eq!(c.dual(), cone(2, &[&[0, 1], &[1, -1]]));
    }

    #[test]
    fn intersect_examples() {
        let a = cone(2, &[&[1, 0], &[0, 1]]);
        let b = cone(2, &[&[0, 1], &[-1, 0]]);
        assert_eq!(a.intersect(&b).unwrap(), cone(2, &[&[0, 1]]));
        assert_eq!(a.intersect(&a).unwrap(), a);
        assert!(a.intersect(&Cone::zero(3)).is_err());
    }

    #[test]
    fn sum_examples() {
        let e1 = cone(2, &[&[1, 0]]);
        let e2 = cone(2, &[&[0, 1]]);
        assert_eq!(e1.sum(&e2).unwrap(), cone(2, &[&[1, 0], &[0, 1]]));
        let line = e1.sum(&cone(2, &[&[-1, 0]])).unwrap();
        assert_eq!(line.lineality_dim(), 1);
        assert!(line.rays().is_empty());
        let a = cone(3, &[&[1, 0, 0], &[0, 1, 0]]);
        let b = cone(3, &[&[1, 1, 0], &[0, 0, 1]]);
        assert_eq!(
            a.sum(&b).unwrap(),
            cone(3, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]])
        );
        assert_eq!(a.sum(&Cone::zero(3)).unwrap(), a);
    }

    #[test]
    fn faces_of_quadrant_and_line() {
        let c = cone(2, &[&[1, 0], &[0, 1]]);
        let faces = c.face_cones();
        assert_eq!(faces.len(), 4);
        assert_eq!(faces[0], Cone::zero(2));
        assert_eq!(faces[3], c);
        let line = Cone::linear(2, &[v(&[1, 0])]).unwrap();
        assert_eq!(line.face_cones(), vec![line.clone()]);
    }

    #[test]
    fn faces_of_square_cone() {
        // cone over a unit square: 0, four rays, four 2-faces, itself
        let s1 = cone(4, &[&[0, 0, 1, 0], &[0, 1, 1, 0], &[1, 1, 1, 0], &[1, 0, 1, 0]]);
        let faces = s1.faces();
        let count = |d| faces.iter().filter(|f| f.cone.dim() == d).count();
        assert_eq!((count(0), count(1), count(2), count(3)), (1, 4, 4, 1));
        for f in &faces {
            if let Some(u) = &f.supporting_normal {
                let cut = s1
                    .intersect(&Cone::from_inequalities(4, &[], std::slice::from_ref(u)).unwrap())
                    .unwrap();
                assert_eq!(cut, f.cone);
                assert!(s1.dual().contains_point(u));
            }
        }
    }

    #[test]
    fn minimal_face_examples() {
        assert_eq!(cone(2, &[&[1, 0], &[0, 1]]).minimal_face(), Cone::zero(2));
        let c = cone(2, &[&[1, 0], &[-1, 0], &[0, 1]]);
        assert_eq!(c.minimal_face(), Cone::linear(2, &[v(&[1, 0])]).unwrap());
        let img = cone(2, &[&[1, 0], &[0, 1]])
            .image(&IntMatrix::from_i64_rows(&[&[1, -1]]))
            .unwrap();
        assert_eq!(img.minimal_face(), Cone::full(1));
    }

    #[test]
    fn smallest_face_examples() {
        let c = cone(2, &[&[1, 0], &[0, 1]]);
        let f = c.smallest_face_containing(&cone(2, &[&[1, 0]])).unwrap();
        assert_eq!(f.cone, cone(2, &[&[1, 0]]));
        let f = c.smallest_face_containing(&cone(2, &[&[1, 1]])).unwrap();
        assert_eq!(f.cone, c);
        assert!(f.supporting_normal.is_none());
        let f = c
            .smallest_face_containing(&cone(2, &[&[1, 1], &[1, 2]]))
            .unwrap();
        assert_eq!(f.cone, c);
        assert!(matches!(
            c.smallest_face_containing(&cone(2, &[&[-1, 0]])),
            Err(Error::NotContained { .. })
        ));
    }

    #[test]
    fn membership_examples() {
        let c = cone(2, &[&[1, 0], &[0, 1]]);
        assert_eq!(c.membership(&v(&[1, 1])), Membership::RelativeInterior);
        assert_eq!(c.membership(&v(&[1, 0])), Membership::Boundary);
        assert_eq!(c.membership(&v(&[-1, 0])), Membership::Outside);
    }

    #[test]
    fn relative_interior_point_examples() {
        assert_eq!(cone(2, &[&[1, 0], &[0, 1]]).relative_interior_point(), v(&[1, 1]));
        assert_eq!(cone(2, &[&[1, 0]]).relative_interior_point(), v(&[1, 0]));
        let line = Cone::linear(2, &[v(&[1, 0])]).unwrap();
        assert_eq!(line.relative_interior_point(), v(&[1, 0]));
        assert!(Cone::zero(3).relative_interior_point().is_zero());
    }

    #[test]
    fn image_examples() {
        let s4 = cone(4, &[&[1, 0, 0, 0], &[1, -1, 1, 0], &[0, 0, 1, 0], &[0, 0, 0, 1]]);
        let p = IntMatrix::from_i64_rows(&[&[1, 0, 0, 1], &[0, 1, 0, 0], &[0, 0, 1, 1]]);
        assert_eq!(
            s4.image(&p).unwrap(),
            cone(3, &[&[1, 0, 0], &[0, 0, 1], &[1, -1, 1]])
        );
        let q = cone(2, &[&[1, 0], &[0, 1]]);
        assert_eq!(
            q.image(&IntMatrix::from_i64_rows(&[&[1, 1]])).unwrap(),
            cone(1, &[&[1]])
        );
        let line = q.image(&IntMatrix::from_i64_rows(&[&[1, -1]])).unwrap();
        assert_eq!(line.lineality_dim(), 1);
    }

    #[test]
    fn preimage_examples() {
        let ray = cone(1, &[&[1]]);
        let half = ray.preimage(&IntMatrix::from_i64_rows(&[&[1, 0]])).unwrap();
        assert_eq!(half, cone(2, &[&[1, 0], &[0, 1], &[0, -1]]));
        assert_eq!(
            Cone::zero(2).preimage(&IntMatrix::identity(2)).unwrap(),
            Cone::zero(2)
        );
        let q = cone(2, &[&[1, 0], &[0, 1]]);
        assert_eq!(q.preimage(&IntMatrix::identity(2)).unwrap(), q);
    }

    #[test]
    fn halfspace_split_examples() {
        let c = cone(2, &[&[1, 0], &[0, 1]]);
        let (pos, neg, zero) = c.halfspace_split(&v(&[1, -1])).unwrap();
        assert_eq!(pos, cone(2, &[&[1, 0], &[1, 1]]));
        assert_eq!(neg, cone(2, &[&[1, 1], &[0, 1]]));
        assert_eq!(zero, cone(2, &[&[1, 1]]));
        let (pos, neg, zero) = c.halfspace_split(&v(&[1, 1])).unwrap();
        assert_eq!(pos, c);
        assert_eq!(neg, zero);
        assert_eq!(zero, Cone::zero(2));
        let (pos, neg, zero) = c.halfspace_split(&v(&[0, 0])).unwrap();
        assert!(pos == c && neg == c && zero == c);
    }

    #[test]
    fn span_lattice_examples() {
        assert_eq!(cone(2, &[&[2, 0]]).span_lattice().basis(), &[v(&[1, 0])]);
        assert_eq!(cone(2, &[&[1, 0], &[0, 1]]).span_lattice(), Sublattice::full(2));
        assert_eq!(cone(2, &[&[1, 1]]).span_lattice().basis(), &[v(&[1, 1])]);
    }

    #[test]
    fn rank_zero_ambient() {
        let z = Cone::zero(0);
        assert_eq!(z, Cone::full(0));
        assert_eq!(z.dim(), 0);
        assert_eq!(z.face_cones().len(), 1);
        assert_eq!(z.membership(&IntVector::zero(0)), Membership::RelativeInterior);
    }

    pub(crate) fn arb_cone(max_rank: usize, max_gens: usize) -> impl Strategy<Value = Cone> {
        (1..=max_rank).prop_flat_map(move |n| {
            prop::collection::vec(prop::collection::vec(-5i64..=5, n), 0..=max_gens)
                .prop_map(move |gs| {
                    let g: Vec<IntVector> = gs.into_iter().map(IntVector::from).collect();
                    Cone::from_generators(n, &g).unwrap()
                })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn double_dual(c in arb_cone(4, 6)) {
            prop_assert_eq!(c.dual().dual(), c.clone());
            // round trip through the inequality description
            let again = Cone::from_inequalities(
                c.ambient_rank(), c.facet_normals(), c.equations()).unwrap();
            prop_assert_eq!(again, c);
        }

        #[test]
        fn interior_point_is_interior(c in arb_cone(4, 6)) {
            prop_assert_eq!(
                c.membership(&c.relative_interior_point()),
                Membership::RelativeInterior
            );
        }

        #[test]
        fn strict_convexity_equivalences(c in arb_cone(4, 6)) {
            let strict = c.is_strictly_convex();
            prop_assert_eq!(strict, c.minimal_face() == Cone::zero(c.ambient_rank()));
            prop_assert_eq!(strict, c.dual().dim() == c.ambient_rank());
        }

        #[test]
        fn faces_closed_under_intersection(c in arb_cone(3, 5)) {
            let faces = c.face_cones();
            for a in &faces {
                for b in &faces {
                    let i = a.intersect(b).unwrap();
                    prop_assert!(faces.contains(&i));
                }
            }
            // one facet per facet normal
            if !c.is_linear() {
                let facets = faces.iter().filter(|f| f.dim() + 1 == c.dim()).count();
                prop_assert_eq!(facets, c.facet_normals().len());
            }
        }

        #[test]
        fn split_membership(
            c in arb_cone(3, 5),
            u in prop::collection::vec(-3i64..=3, 3),
            coeffs in prop::collection::vec(0i64..6, 12),
        ) {
            let n = c.ambient_rank();
            let u = IntVector::from_i64s(&u[..n]);
            let (pos, neg, zero) = c.halfspace_split(&u).unwrap();
            prop_assert_eq!(pos.intersect(&neg).unwrap(), zero.clone());
            let rc: Vec<BigInt> = coeffs[..c.rays().len().min(6)].iter().map(|&x| BigInt::from(x)).collect();
            let lc: Vec<BigInt> = coeffs[6..6 + c.lineality_dim().min(6)].iter().map(|&x| BigInt::from(x - 3)).collect();
            let p = c.combination(&rc, &lc);
            prop_assert!(c.contains_point(&p));
            let side = u.dot(&p);
            prop_assert!(pos.contains_point(&p) || neg.contains_point(&p));
            prop_assert_eq!(pos.contains_point(&p) && neg.contains_point(&p), side.is_zero());
        }

        #[test]
        fn preimage_adjunction(
            c in arb_cone(3, 4),
            entries in prop::collection::vec(-2i64..=2, 9),
            x in prop::collection::vec(-4i64..=4, 3),
        ) {
            let n = c.ambient_rank();
            let rows: Vec<IntVector> = entries.chunks(3).take(n).map(IntVector::from_i64s).collect();
            let a = IntMatrix::from_rows(3, &rows).unwrap();
            let pre = c.preimage(&a).unwrap();
            let x = IntVector::from_i64s(&x);
            prop_assert_eq!(pre.contains_point(&x), c.contains_point(&a.apply(&x).unwrap()));
        }
    }
}
