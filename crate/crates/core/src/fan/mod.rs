//! Fans, quasi-fans and affine systems of fans.

mod covering;
mod equality;
mod system;

use std::collections::BTreeSet;

pub use covering::{covers, support_is_convex, CoveringCertificate};
pub use equality::{fans_equal, FanComparison};
pub use system::{system_from_charts, system_from_common_faces, AffineSystemOfFans, OrbitClass, OrbitClasses};

use crate::cone::{Cone, Membership};
use crate::error::{Error, Result};
use crate::linalg::IntVector;

/// A fan given by its maximal cones. Faces are derived on demand.
///
/// A quasi-fan allows cones that are not strictly convex, provided all of
/// them share the same lineality space.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Fan {
    ambient_rank: usize,
    max_cones: Vec<Cone>,
    quasi: bool,
}

/// Keeps the inclusion-maximal cones, deduplicated and sorted.
pub(crate) fn maximal_elements(cones: &[Cone]) -> Vec<Cone> {
    let unique: Vec<Cone> = cones.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    unique
        .iter()
        .filter(|c| !unique.iter().any(|d| d != *c && d.contains(c)))
        .cloned()
        .collect()
}

/// All faces of the given cones, deduplicated and sorted by dimension then key.
pub(crate) fn face_closure(cones: &[Cone]) -> Vec<Cone> {
    let mut all: BTreeSet<Cone> = BTreeSet::new();
    for c in cones {
        all.extend(c.face_cones());
    }
    let mut v: Vec<Cone> = all.into_iter().collect();
    v.sort_by(|a, b| a.dim().cmp(&b.dim()).then_with(|| a.cmp(b)));
    v
}

/// Validates and builds a fan from cones whose faces make up the fan. Every
/// pair must meet in a common face; afterwards only the maximal cones are
/// kept. An empty input yields the fan consisting of the origin.
pub fn fan_from_max_cones(ambient_rank: usize, cones: &[Cone], quasi: bool) -> Result<Fan> {
    for c in cones {
        if c.ambient_rank() != ambient_rank {
            return Err(Error::DimensionMismatch {
                expected: ambient_rank,
                found: c.ambient_rank(),
            });
        }
        if !quasi && !c.is_strictly_convex() {
            return Err(Error::NotStrictlyConvex(c.clone()));
        }
    }
    let unique: Vec<Cone> = cones.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    for (i, a) in unique.iter().enumerate() {
        for b in &unique[i + 1..] {
            let meet = a.intersect(b)?;
            if !a.is_face(&meet) || !b.is_face(&meet) {
                return Err(Error::FaceToFaceViolation {
                    first: a.clone(),
                    second: b.clone(),
                });
            }
        }
    }
    let mut max_cones = maximal_elements(&unique);
    if max_cones.is_empty() {
        max_cones.push(Cone::zero(ambient_rank));
    }
    if quasi {
        let first = &max_cones[0];
        if let Some(other) = max_cones
            .iter()
            .find(|c| c.lineality() != first.lineality())
        {
            return Err(Error::LinealityMismatch {
                first: first.clone(),
                second: other.clone(),
            });
        }
    }
    Ok(Fan {
        ambient_rank,
        max_cones,
        quasi,
    })
}

impl Fan {
    pub fn new(ambient_rank: usize, cones: &[Cone]) -> Result<Fan> {
        fan_from_max_cones(ambient_rank, cones, false)
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient_rank
    }

    pub fn max_cones(&self) -> &[Cone] {
        &self.max_cones
    }

    pub fn is_quasi(&self) -> bool {
        self.quasi
    }

    /// Every cone of the fan, sorted by dimension and then key.
    pub fn cones(&self) -> Vec<Cone> {
        face_closure(&self.max_cones)
    }

    pub fn cones_of_dim(&self, k: usize) -> Vec<Cone> {
        self.cones().into_iter().filter(|c| c.dim() == k).collect()
    }

    /// The common minimal face `V`.
    pub fn lineality_cone(&self) -> Cone {
        self.max_cones[0].minimal_face()
    }

    pub fn support_contains(&self, v: &IntVector) -> bool {
        self.max_cones.iter().any(|c| c.contains_point(v))
    }

    /// The unique cone whose relative interior contains `v`.
    pub fn carrier(&self, v: &IntVector) -> Option<Cone> {
        self.max_cones
            .iter()
            .find(|c| c.contains_point(v))
            .map(|c| {
                c.faces()
                    .into_iter()
                    .map(|f| f.cone)
                    .find(|f| f.membership(v) == Membership::RelativeInterior)
                    .expect("relative interiors of faces partition a cone")
            })
    }

    /// Some maximal cone containing `c`.
    pub fn containing_cone(&self, c: &Cone) -> Option<&Cone> {
        self.max_cones.iter().find(|m| m.contains(c))
    }
}

impl std::fmt::Display for Fan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "fan{{")?;
        for (i, c) in self.max_cones.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "}}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn cone(n: usize, gens: &[&[i64]]) -> Cone {
        let g: Vec<IntVector> = gens.iter().map(|x| IntVector::from_i64s(x)).collect();
        Cone::from_generators(n, &g).unwrap()
    }

    #[test]
    fn single_cone_fan() {
        let f = Fan::new(2, &[cone(2, &[&[1, 0], &[0, 1]])]).unwrap();
        assert_eq!(f.cones().len(), 4);
        assert_eq!(f.cones_of_dim(1).len(), 2);
    }

    #[test]
    fn adjacent_quadrants() {
        let f = Fan::new(
            2,
            &[cone(2, &[&[1, 0], &[0, 1]]), cone(2, &[&[0, 1], &[-1, 0]])],
        )
        .unwrap();
        assert_eq!(f.max_cones().len(), 2);
        assert_eq!(f.cones().len(), 6);
    }

    #[test]
    fn overlapping_interiors_rejected() {
        let r = Fan::new(
            2,
            &[cone(2, &[&[1, 0], &[0, 1]]), cone(2, &[&[1, 1], &[1, 3]])],
        );
        assert!(matches!(r, Err(Error::FaceToFaceViolation { .. })));
        let r = Fan::new(2, &[cone(2, &[&[1, 0], &[0, 1]]), cone(2, &[&[1, 0]])]);
        assert_eq!(r.unwrap().max_cones().len(), 1);
        let r = Fan::new(
            2,
            &[cone(2, &[&[1, 0], &[0, 1]]), cone(2, &[&[1, 1], &[-1, 3]])],
        );
        assert!(matches!(r, Err(Error::FaceToFaceViolation { .. })));
    }

    #[test]
    fn non_strict_cone_rejected_unless_quasi() {
        let half = cone(2, &[&[1, 0], &[-1, 0], &[0, 1]]);
        assert!(matches!(
            Fan::new(2, std::slice::from_ref(&half)),
            Err(Error::NotStrictlyConvex(_))
        ));
        let other = cone(2, &[&[1, 0], &[-1, 0], &[0, -1]]);
        let q = fan_from_max_cones(2, &[half.clone(), other.clone()], true).unwrap();
        assert_eq!(q.lineality_cone().lineality_dim(), 1);
        let mismatch = cone(2, &[&[0, 1], &[0, -1], &[1, 0]]);
        assert!(fan_from_max_cones(2, &[half, mismatch], true).is_err());
    }

    #[test]
    fn carrier_finds_relative_interior() {
        let f = Fan::new(2, &[cone(2, &[&[1, 0], &[0, 1]])]).unwrap();
        let c = f.carrier(&IntVector::from([3, 0])).unwrap();
        assert_eq!(c, cone(2, &[&[1, 0]]));
        assert!(f.carrier(&IntVector::from([-1, 0])).is_none());
    }
}
