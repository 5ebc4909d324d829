//! Double description: extreme rays and lineality of `{x : a.x >= 0}`.
//!
//! Constraints are added one at a time. While the lineality space is not
//! orthogonal to a new constraint it shrinks by one dimension; otherwise rays
//! are split by sign and adjacent positive/negative pairs are combined. Two
//! rays are adjacent iff no third ray is tight on every constraint tight on
//! both (combinatorial test; valid because only extreme rays are kept).

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::linalg::IntVector;

#[derive(Clone, Debug)]
struct Ray {
    v: IntVector,
    tight: BTreeSet<usize>,
}

/// Result of the conversion. Rays are primitive but only determined modulo
/// the lineality space.
pub(crate) struct VRep {
    pub lineality: Vec<IntVector>,
    pub rays: Vec<IntVector>,
}

pub(crate) fn hrep_to_vrep(dim: usize, ineqs: &[IntVector]) -> VRep {
    let mut lineality: Vec<IntVector> = (0..dim).map(|i| IntVector::unit(dim, i)).collect();
    let mut rays: Vec<Ray> = Vec::new();

    for (k, a) in ineqs.iter().enumerate() {
        if a.is_zero() {
            for r in rays.iter_mut() {
                r.tight.insert(k);
            }
            continue;
        }
        if let Some(pos) = lineality.iter().position(|l| !a.dot(l).is_zero()) {
            let mut l = lineality.swap_remove(pos);
            let mut al = a.dot(&l);
            if al.is_negative() {
                l = l.neg();
                al = -al;
            }
            for other in lineality.iter_mut() {
                let ao = a.dot(other);
                if !ao.is_zero() {
                    *other = IntVector::combine(&al, other, &-ao, &l).primitive();
                }
            }
            for r in rays.iter_mut() {
                let ar = a.dot(&r.v);
                if !ar.is_zero() {
                    r.v = IntVector::combine(&al, &r.v, &-ar, &l).primitive();
                }
                r.tight.insert(k);
            }
            let tight: BTreeSet<usize> = (0..k).collect();
            rays.push(Ray { v: l, tight });
            continue;
        }

        let values: Vec<BigInt> = rays.iter().map(|r| a.dot(&r.v)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&i| values[i].is_positive()).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&i| values[i].is_negative()).collect();
        if neg.is_empty() {
            for (r, val) in rays.iter_mut().zip(&values) {
                if val.is_zero() {
                    r.tight.insert(k);
                }
            }
            continue;
        }

        let mut next: Vec<Ray> = Vec::new();
        for &p in &pos {
            for &n in &neg {
                let common: BTreeSet<usize> =
                    rays[p].tight.intersection(&rays[n].tight).copied().collect();
                let adjacent = (0..rays.len())
                    .filter(|&i| i != p && i != n)
                    .all(|i| !common.is_subset(&rays[i].tight));
                if !adjacent {
                    continue;
                }
                let v = IntVector::combine(&values[p], &rays[n].v, &-&values[n], &rays[p].v)
                    .primitive();
                let mut tight = common;
                tight.insert(k);
                next.push(Ray { v, tight });
            }
        }
        for (i, r) in rays.into_iter().enumerate() {
            if values[i].is_negative() {
                continue;
            }
            let mut r = r;
            if values[i].is_zero() {
                r.tight.insert(k);
            }
            next.push(r);
        }
        rays = next;
    }

    VRep {
        lineality,
        rays: rays.into_iter().map(|r| r.v).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[i64]) -> IntVector {
        IntVector::from_i64s(x)
    }

    #[test]
    fn octant() {
        let out = hrep_to_vrep(3, &[v(&[1, 0, 0]), v(&[0, 1, 0]), v(&[0, 0, 1])]);
        assert!(out.lineality.is_empty());
        let mut rays = out.rays;
        rays.sort();
        assert_eq!(rays, vec![v(&[0, 0, 1]), v(&[0, 1, 0]), v(&[1, 0, 0])]);
    }

    #[test]
    fn halfplane_keeps_line() {
        let out = hrep_to_vrep(2, &[v(&[1, 0])]);
        assert_eq!(out.lineality.len(), 1);
        assert_eq!(out.rays.len(), 1);
    }

    #[test]
    fn square_cone_has_four_rays() {
        // z >= x, z >= y, x >= 0, y >= 0
        let out = hrep_to_vrep(
            3,
            &[v(&[-1, 0, 1]), v(&[0, -1, 1]), v(&[1, 0, 0]), v(&[0, 1, 0])],
        );
        assert!(out.lineality.is_empty());
        let mut rays = out.rays;
        rays.sort();
        assert_eq!(
            rays,
            vec![v(&[0, 0, 1]), v(&[0, 1, 1]), v(&[1, 0, 1]), v(&[1, 1, 1])]
        );
    }

    #[test]
    fn contradictory_pair_gives_zero_cone() {
        let out = hrep_to_vrep(1, &[v(&[1]), v(&[-1])]);
        assert!(out.lineality.is_empty());
        assert!(out.rays.is_empty());
    }
}
