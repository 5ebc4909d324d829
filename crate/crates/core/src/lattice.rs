//! Exact integer linear algebra: Hermite normal form, kernels, saturation
//! and quotient lattices with explicit projections.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::{IntMatrix, IntVector};

/// Row Hermite normal form: returns `(H, U)` with `U` unimodular and
/// `U * M = H`.
///
/// Nonzero rows of `H` come first, pivots are positive and strictly increase
/// in column, and entries above a pivot are reduced into `[0, pivot)`.
pub fn hermite_normal_form(m: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let rows = m.rows();
    let cols = m.cols();
    let mut h = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        for i in r + 1..rows {
            if h.get(i, c).is_zero() {
                continue;
            }
            if h.get(r, c).is_zero() {
                h.swap_rows(r, i);
                u.swap_rows(r, i);
                continue;
            }
            let a = h.get(r, c).clone();
            let b = h.get(i, c).clone();
            let eg = a.extended_gcd(&b);
            let (g, x, y) = (eg.gcd, eg.x, eg.y);
            let p = -(&b / &g);
            let q = &a / &g;
            h.mix_rows(r, i, &x, &y, &p, &q);
            u.mix_rows(r, i, &x, &y, &p, &q);
        }
        if h.get(r, c).is_zero() {
            continue;
        }
        if h.get(r, c).is_negative() {
            h.negate_row(r);
            u.negate_row(r);
        }
        let pivot = h.get(r, c).clone();
        for i in 0..r {
            let q = h.get(i, c).div_floor(&pivot);
            if !q.is_zero() {
                let k = -q;
                h.add_row_multiple(i, r, &k);
                u.add_row_multiple(i, r, &k);
            }
        }
        r += 1;
    }
    (h, u)
}

/// Nonzero rows of the Hermite form of the given generators: a canonical
/// basis of the lattice they generate.
pub(crate) fn hnf_basis(cols: usize, gens: &[IntVector]) -> Vec<IntVector> {
    if gens.is_empty() {
        return Vec::new();
    }
    let m = IntMatrix::from_rows(cols, gens).expect("generator dimension");
    let (h, _) = hermite_normal_form(&m);
    h.row_vectors().into_iter().filter(|r| !r.is_zero()).collect()
}

/// Saturated basis (in Hermite form) of `{v : A v = 0}`.
fn kernel_basis(a: &IntMatrix) -> Vec<IntVector> {
    let t = a.transpose();
    let (h, u) = hermite_normal_form(&t);
    let rank = (0..h.rows()).filter(|&i| !h.row(i).is_zero()).count();
    let gens: Vec<IntVector> = (rank..u.rows()).map(|i| u.row(i)).collect();
    hnf_basis(a.cols(), &gens)
}

/// Saturated basis of `{u : u . g = 0 for all g}`.
pub(crate) fn orthogonal_basis(dim: usize, gens: &[IntVector]) -> Vec<IntVector> {
    let m = IntMatrix::from_rows(dim, gens).expect("generator dimension");
    kernel_basis(&m)
}

/// A sublattice of `Z^n`, stored by a canonical (Hermite) basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Sublattice {
    ambient_rank: usize,
    basis: Vec<IntVector>,
    saturated: bool,
}

impl Sublattice {
    /// The sublattice generated by `gens` (which need not be independent).
    pub fn new(ambient_rank: usize, gens: &[IntVector]) -> Result<Self> {
        for g in gens {
            if g.dim() != ambient_rank {
                return Err(Error::DimensionMismatch {
                    expected: ambient_rank,
                    found: g.dim(),
                });
            }
        }
        let basis = hnf_basis(ambient_rank, gens);
        let saturated = {
            let perp = orthogonal_basis(ambient_rank, &basis);
            orthogonal_basis(ambient_rank, &perp) == basis
        };
        Ok(Sublattice {
            ambient_rank,
            basis,
            saturated,
        })
    }

    pub(crate) fn from_saturated_basis(ambient_rank: usize, basis: Vec<IntVector>) -> Self {
        Sublattice {
            ambient_rank,
            basis,
            saturated: true,
        }
    }

    pub fn zero(ambient_rank: usize) -> Self {
        Self::from_saturated_basis(ambient_rank, Vec::new())
    }

    pub fn full(ambient_rank: usize) -> Self {
        let basis = (0..ambient_rank)
            .map(|i| IntVector::unit(ambient_rank, i))
            .collect();
        Self::from_saturated_basis(ambient_rank, basis)
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient_rank
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[IntVector] {
        &self.basis
    }

    pub fn basis_matrix(&self) -> IntMatrix {
        IntMatrix::from_rows(self.ambient_rank, &self.basis).expect("basis dimension")
    }

    pub fn is_saturated(&self) -> bool {
        self.saturated
    }

    /// Lattice membership, by reduction against the echelon basis.
    pub fn contains(&self, v: &IntVector) -> bool {
        if v.dim() != self.ambient_rank {
            return false;
        }
        let mut rest = v.clone();
        for row in &self.basis {
            let p = row
                .entries()
                .iter()
                .position(|x| !x.is_zero())
                .expect("basis rows are nonzero");
            let (q, r) = rest[p].div_rem(&row[p]);
            if !r.is_zero() {
                return false;
            }
            rest = rest.sub(&row.scale(&q));
        }
        rest.is_zero()
    }

    /// Lattice generated by both.
    pub fn join(&self, other: &Sublattice) -> Sublattice {
        let mut gens = self.basis.clone();
        gens.extend(other.basis.iter().cloned());
        Sublattice::new(self.ambient_rank, &gens).expect("same ambient rank")
    }

    /// Image under an integer matrix.
    pub fn image(&self, a: &IntMatrix) -> Result<Sublattice> {
        let gens = self
            .basis
            .iter()
            .map(|b| a.apply(b))
            .collect::<Result<Vec<_>>>()?;
        Sublattice::new(a.rows(), &gens)
    }
}

/// Saturated lattice `{v : A v = 0}`.
pub fn kernel_lattice(a: &IntMatrix) -> Sublattice {
    Sublattice::from_saturated_basis(a.cols(), kernel_basis(a))
}

/// `N ∩ span_Q(L)`.
pub fn saturate(l: &Sublattice) -> Sublattice {
    let perp = orthogonal_basis(l.ambient_rank, &l.basis);
    Sublattice::from_saturated_basis(l.ambient_rank, orthogonal_basis(l.ambient_rank, &perp))
}

/// The projection `Z^n -> Z^n / L` for a saturated `L`, together with an
/// integral section witnessing surjectivity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientLattice {
    source_rank: usize,
    target_rank: usize,
    projection: IntMatrix,
    section: IntMatrix,
    kernel: Sublattice,
}

impl QuotientLattice {
    pub fn source_rank(&self) -> usize {
        self.source_rank
    }

    pub fn target_rank(&self) -> usize {
        self.target_rank
    }

    pub fn projection(&self) -> &IntMatrix {
        &self.projection
    }

    /// `S` with `P * S = I`.
    pub fn section(&self) -> &IntMatrix {
        &self.section
    }

    pub fn kernel(&self) -> &Sublattice {
        &self.kernel
    }
}

/// Projection onto `Z^n / L`. The rows of the projection are the Hermite
/// basis of `L^⊥ ∩ Z^n`, which is saturated, so the map is onto.
pub fn quotient_projection(ambient_rank: usize, l: &Sublattice) -> Result<QuotientLattice> {
    if l.ambient_rank != ambient_rank {
        return Err(Error::DimensionMismatch {
            expected: ambient_rank,
            found: l.ambient_rank,
        });
    }
    if !l.saturated {
        return Err(Error::UnsaturatedSublattice);
    }
    let rows = orthogonal_basis(ambient_rank, &l.basis);
    let target_rank = rows.len();
    let projection = IntMatrix::from_rows(ambient_rank, &rows)?;
    let (h, u) = hermite_normal_form(&projection.transpose());
    let identity_top = (0..target_rank).all(|i| {
        (0..target_rank).all(|j| {
            let want = if i == j { BigInt::from(1) } else { BigInt::zero() };
            *h.get(i, j) == want
        })
    });
    if !identity_top {
        return Err(Error::Internal(format!(
            "projection {projection} is not surjective"
        )));
    }
    let section_rows: Vec<IntVector> = (0..target_rank).map(|i| u.row(i)).collect();
    let section = IntMatrix::from_rows(ambient_rank, &section_rows)?.transpose();
    Ok(QuotientLattice {
        source_rank: ambient_rank,
        target_rank,
        projection,
        section,
        kernel: l.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_i64_rows(rows)
    }

    fn v(x: &[i64]) -> IntVector {
        IntVector::from_i64s(x)
    }

    #[test]
    fn hnf_identity() {
        let (h, u) = hermite_normal_form(&IntMatrix::identity(2));
        assert_eq!(h, IntMatrix::identity(2));
        assert_eq!(u, IntMatrix::identity(2));
    }

    #[test]
    fn hnf_already_reduced() {
        let a = m(&[&[2, 0], &[0, 2]]);
        let (h, u) = hermite_normal_form(&a);
        assert_eq!(h, a);
        assert_eq!(u, IntMatrix::identity(2));
    }

    #[test]
    fn hnf_two_by_two() {
        let a = m(&[&[1, 2], &[3, 4]]);
        let (h, u) = hermite_normal_form(&a);
        // Echelon form by hand is [[1,2],[0,2]]; reducing above the second
        // pivot gives the normal form.
        assert_eq!(h, m(&[&[1, 0], &[0, 2]]));
        assert_eq!(u.mul(&a).unwrap(), h);
        let echelon = Sublattice::new(2, &[v(&[1, 2]), v(&[0, 2])]).unwrap();
        assert_eq!(echelon.basis(), h.row_vectors().as_slice());
    }

    #[test]
    fn kernel_of_worked_example_projection() {
        let p = m(&[&[1, 0, 0, 1], &[0, 1, 0, 0], &[0, 0, 1, 1]]);
        let k = kernel_lattice(&p);
        assert_eq!(k.basis(), &[v(&[1, 0, 1, -1])]);
        assert!(k.is_saturated());
    }

    #[test]
    fn kernel_trivial_cases() {
        assert_eq!(kernel_lattice(&IntMatrix::identity(3)).rank(), 0);
        assert_eq!(kernel_lattice(&m(&[&[1, 1]])).basis(), &[v(&[1, -1])]);
    }

    #[test]
    fn saturation_examples() {
        let l = Sublattice::new(2, &[v(&[2, 0])]).unwrap();
        assert!(!l.is_saturated());
        assert_eq!(saturate(&l).basis(), &[v(&[1, 0])]);

        let l = Sublattice::new(4, &[v(&[1, 0, 1, -1])]).unwrap();
        assert!(l.is_saturated());
        assert_eq!(saturate(&l), l);

        let l = Sublattice::new(2, &[v(&[2, 2]), v(&[0, 4])]).unwrap();
        assert!(!l.is_saturated());
        assert_eq!(saturate(&l), Sublattice::full(2));
    }

    #[test]
    fn projection_examples() {
        let q = quotient_projection(2, &Sublattice::zero(2)).unwrap();
        assert_eq!(q.projection(), &IntMatrix::identity(2));

        let l = Sublattice::new(2, &[v(&[1, 1])]).unwrap();
        let q = quotient_projection(2, &l).unwrap();
        assert_eq!(q.projection(), &m(&[&[1, -1]]));

        let l = Sublattice::new(4, &[v(&[1, 0, 1, -1])]).unwrap();
        let q = quotient_projection(4, &l).unwrap();
        assert_eq!(q.target_rank(), 3);
        assert_eq!(
            q.projection().mul(q.section()).unwrap(),
            IntMatrix::identity(3)
        );
        assert!(q.projection().apply(&v(&[1, 0, 1, -1])).unwrap().is_zero());
        // The Hermite choice happens to coincide with the printed matrix.
        assert_eq!(
            q.projection(),
            &m(&[&[1, 0, 0, 1], &[0, 1, 0, 0], &[0, 0, 1, 1]])
        );
    }

    #[test]
    fn projection_rejects_unsaturated() {
        let l = Sublattice::new(2, &[v(&[2, 0])]).unwrap();
        assert!(matches!(
            quotient_projection(2, &l),
            Err(Error::UnsaturatedSublattice)
        ));
        assert!(quotient_projection(3, &Sublattice::zero(2)).is_err());
    }

    #[test]
    fn full_collapse_has_rank_zero_target() {
        let q = quotient_projection(2, &Sublattice::full(2)).unwrap();
        assert_eq!(q.target_rank(), 0);
        assert_eq!(q.projection().rows(), 0);
    }

    fn small_matrix() -> impl Strategy<Value = IntMatrix> {
        (1usize..5, 1usize..5).prop_flat_map(|(r, c)| {
            prop::collection::vec(-6i64..=6, r * c).prop_map(move |xs| {
                let rows: Vec<IntVector> = xs.chunks(c).map(IntVector::from_i64s).collect();
                IntMatrix::from_rows(c, &rows).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn hnf_reconstructs(a in small_matrix()) {
            let (h, u) = hermite_normal_form(&a);
            prop_assert_eq!(u.mul(&a).unwrap(), h.clone());
            prop_assert!(u.determinant().abs() == BigInt::from(1));
            // echelon shape with reduced, positive pivots
            let mut last_pivot: Option<usize> = None;
            for i in 0..h.rows() {
                let row = h.row(i);
                match row.entries().iter().position(|x| !x.is_zero()) {
                    None => {
                        for k in i..h.rows() { prop_assert!(h.row(k).is_zero()); }
                        break;
                    }
                    Some(p) => {
                        prop_assert!(last_pivot.is_none_or(|lp| p > lp));
                        prop_assert!(row[p].is_positive());
                        for k in 0..i {
                            prop_assert!(!h.get(k, p).is_negative() && h.get(k, p) < &row[p]);
                        }
                        last_pivot = Some(p);
                    }
                }
            }
        }

        #[test]
        fn kernel_rank_nullity(a in small_matrix()) {
            let k = kernel_lattice(&a);
            for b in k.basis() {
                prop_assert!(a.apply(b).unwrap().is_zero());
            }
            prop_assert_eq!(k.rank() + a.rank(), a.cols());
        }

        #[test]
        fn saturation_idempotent(a in small_matrix()) {
            let l = Sublattice::new(a.cols(), &a.row_vectors()).unwrap();
            let s = saturate(&l);
            prop_assert_eq!(saturate(&s), s.clone());
            prop_assert_eq!(s.rank(), l.rank());
            for b in l.basis() {
                prop_assert!(s.contains(b));
            }
            let q = quotient_projection(s.ambient_rank(), &s).unwrap();
            for b in s.basis() {
                prop_assert!(q.projection().apply(b).unwrap().is_zero());
            }
            prop_assert_eq!(
                q.projection().mul(q.section()).unwrap(),
                IntMatrix::identity(q.target_rank())
            );
        }
    }
}
