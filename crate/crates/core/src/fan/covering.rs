//! Exact decision of `target ⊆ ∪ pieces`.
//!
//! The target is cut by every hyperplane that bounds a piece (facet normals
//! and equations). On each open cell of that arrangement inside the target
//! every piece is either all-in or all-out, so one interior lattice point per
//! full-dimensional cell decides the question. Cells already inside a piece
//! are not split further.

use std::collections::BTreeSet;

use rayon::prelude::*;

use super::system::AffineSystemOfFans;
use crate::cone::Cone;
use crate::error::{Error, Result};
use crate::linalg::IntVector;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoveringCertificate {
    pub target: Cone,
    pub pieces: Vec<Cone>,
    pub covered: bool,
    /// A lattice point of the target outside every piece (when not covered).
    pub witness: Option<IntVector>,
}

pub fn covers(target: &Cone, pieces: &[Cone]) -> Result<CoveringCertificate> {
    let n = target.ambient_rank();
    if let Some(p) = pieces.iter().find(|p| p.ambient_rank() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: p.ambient_rank(),
        });
    }
    let certificate = |covered: bool, witness: Option<IntVector>| CoveringCertificate {
        target: target.clone(),
        pieces: pieces.to_vec(),
        covered,
        witness,
    };

    let inside_some = |c: &Cone| pieces.iter().any(|p| p.contains(c));
    if inside_some(target) {
        return Ok(certificate(true, None));
    }

    let hyperplanes: BTreeSet<IntVector> = pieces
        .iter()
        .flat_map(|p| p.facet_normals().iter().chain(p.equations()))
        .map(IntVector::primitive_line)
        .collect();

    let d = target.dim();
    let mut cells = vec![target.clone()];
    for h in &hyperplanes {
        let next: Result<Vec<Vec<Cone>>> = cells
            .par_iter()
            .map(|cell| {
                let (pos, neg, _) = cell.halfspace_split(h)?;
                if pos.dim() == d && neg.dim() == d {
                    Ok([pos, neg].into_iter().filter(|c| !inside_some(c)).collect())
                } else {
                    Ok(vec![cell.clone()])
                }
            })
            .collect();
        cells = next?.into_iter().flatten().collect();
        if cells.is_empty() {
            return Ok(certificate(true, None));
        }
    }

    let uncovered = cells
        .par_iter()
        .map(|cell| cell.relative_interior_point())
        .find_first(|p| !pieces.iter().any(|piece| piece.contains_point(p)));
    Ok(match uncovered {
        Some(w) => certificate(false, Some(w)),
        None => certificate(true, None),
    })
}

/// Whether `|S|` equals the convex hull of its charts; returns the hull too.
pub fn support_is_convex(system: &AffineSystemOfFans) -> Result<(bool, Cone)> {
    let n = system.ambient_rank();
    let mut hull = Cone::zero(n);
    for c in system.charts() {
        hull = hull.sum(c)?;
    }
    let cert = covers(&hull, system.charts())?;
    Ok((cert.covered, hull))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fan::tests::cone;
    use crate::fan::Fan;
    use crate::linalg::IntMatrix;

    #[test]
    fn subdivision_covers() {
        let t = cone(2, &[&[1, 0], &[0, 1]]);
        let pieces = [cone(2, &[&[1, 0], &[1, 1]]), cone(2, &[&[1, 1], &[0, 1]])];
        assert!(covers(&t, &pieces).unwrap().covered);
    }

    #[test]
    fn missing_piece_gives_witness() {
        let t = cone(2, &[&[1, 0], &[0, 1]]);
        let pieces = [cone(2, &[&[1, 0], &[1, 1]])];
        let cert = covers(&t, &pieces).unwrap();
        assert!(!cert.covered);
        let w = cert.witness.unwrap();
        assert!(t.contains_point(&w));
        assert!(!pieces[0].contains_point(&w));
        // the witness sits in the missing wedge between (1,1) and e2
        assert!(w[1] > w[0]);
    }

    #[test]
    fn worked_example_images_cover_octant() {
        let p = IntMatrix::from_i64_rows(&[&[1, 0, 0, 1], &[0, 1, 0, 0], &[0, 0, 1, 1]]);
        let s1 = cone(4, &[&[0, 0, 1, 0], &[0, 1, 1, 0], &[1, 1, 1, 0], &[1, 0, 1, 0]]);
        let s2 = cone(4, &[&[1, 0, 0, 0], &[1, 0, 1, 0], &[1, 1, 1, 0], &[1, 1, 0, 0]]);
        let s3 = cone(4, &[&[0, 1, 0, 0], &[1, 1, 0, 0], &[1, 1, 1, 0], &[0, 1, 1, 0]]);
        let pieces: Vec<Cone> = [s1, s2, s3].iter().map(|s| s.image(&p).unwrap()).collect();
        // the three images are {z>=x,z>=y}, {x>=y,x>=z}, {y>=x,y>=z} in the octant
        assert_eq!(
            pieces[0],
            Cone::from_inequalities(
                3,
                &[
                    IntVector::from([-1, 0, 1]),
                    IntVector::from([0, -1, 1]),
                    IntVector::from([1, 0, 0]),
                    IntVector::from([0, 1, 0])
                ],
                &[]
            )
            .unwrap()
        );
        let octant = cone(3, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        assert!(covers(&octant, &pieces).unwrap().covered);
        assert!(!covers(&octant, &pieces[..2]).unwrap().covered);
    }

    #[test]
    fn covering_is_reflexive_and_handles_zero_target() {
        let t = cone(3, &[&[1, 0, 0], &[1, 1, 0], &[0, 0, 1]]);
        assert!(covers(&t, std::slice::from_ref(&t)).unwrap().covered);
        assert!(covers(&Cone::zero(2), &[Cone::zero(2)]).unwrap().covered);
        assert!(!covers(&Cone::zero(2), &[]).unwrap().covered);
    }

    #[test]
    fn lower_dimensional_pieces_do_not_cover() {
        let t = cone(2, &[&[1, 0], &[0, 1]]);
        let pieces = [cone(2, &[&[1, 0], &[1, 1]]), cone(2, &[&[1, 1]]), cone(2, &[&[0, 1]])];
        assert!(!covers(&t, &pieces).unwrap().covered);
    }

    #[test]
    fn convex_support() {
        let quadrant = Fan::new(2, &[cone(2, &[&[1, 0], &[0, 1]])]).unwrap();
        let (convex, hull) = support_is_convex(&AffineSystemOfFans::from_fan(&quadrant)).unwrap();
        assert!(convex);
        assert_eq!(hull, cone(2, &[&[1, 0], &[0, 1]]));

        let axes = Fan::new(2, &[cone(2, &[&[1, 0]]), cone(2, &[&[0, 1]])]).unwrap();
        let (convex, _) = support_is_convex(&AffineSystemOfFans::from_fan(&axes)).unwrap();
        assert!(!convex);
    }
}
