//! Fan comparison, exactly or up to a unimodular change of coordinates.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::Fan;
use crate::cone::Cone;
use crate::lattice::{orthogonal_basis, quotient_projection};
use crate::linalg::{solve_rational, IntVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FanComparison {
    Exact,
    UpToUnimodular,
}

pub fn fans_equal(a: &Fan, b: &Fan, mode: FanComparison) -> bool {
    match mode {
        FanComparison::Exact => {
            a.ambient_rank() == b.ambient_rank() && a.max_cones() == b.max_cones()
        }
        FanComparison::UpToUnimodular => isomorphic(a, b),
    }
}

/// Removes the common lineality space, giving a strictly convex fan in the
/// quotient lattice.
fn pointed_part(f: &Fan) -> Option<(usize, Vec<Cone>)> {
    let lin = f.lineality_cone().lineality_lattice();
    let q = quotient_projection(f.ambient_rank(), &lin).ok()?;
    let cones = f
        .max_cones()
        .iter()
        .map(|c| c.image(q.projection()).ok())
        .collect::<Option<Vec<_>>>()?;
    Some((q.target_rank(), cones))
}

struct Combinatorics {
    rays: Vec<IntVector>,
    /// Ray coordinates in a basis of the saturated span lattice.
    coords: Vec<Vec<BigRational>>,
    cones: BTreeSet<BTreeSet<usize>>,
    signature: Vec<Vec<usize>>,
    span_rank: usize,
}

fn combinatorics(n: usize, cones: &[Cone]) -> Combinatorics {
    let rays: Vec<IntVector> = cones
        .iter()
        .flat_map(|c| c.rays().iter().cloned())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let index: BTreeMap<&IntVector, usize> = rays.iter().enumerate().map(|(i, r)| (r, i)).collect();
    let cone_sets: BTreeSet<BTreeSet<usize>> = cones
        .iter()
        .map(|c| c.rays().iter().map(|r| index[r]).collect())
        .collect();
    let mut signature = vec![Vec::new(); rays.len()];
    for set in &cone_sets {
        for &i in set {
            signature[i].push(set.len());
        }
    }
    for s in signature.iter_mut() {
        s.sort_unstable();
    }

    let perp = orthogonal_basis(n, &rays);
    let basis = orthogonal_basis(n, &perp);
    let gram: Vec<Vec<BigRational>> = basis
        .iter()
        .map(|b| basis.iter().map(|c| BigRational::from_integer(b.dot(c))).collect())
        .collect();
    let coords = rays
        .iter()
        .map(|r| {
            let rhs: Vec<BigRational> = basis
                .iter()
                .map(|b| BigRational::from_integer(b.dot(r)))
                .collect();
            solve_rational(&gram, &rhs).unwrap_or_default()
        })
        .collect();
    Combinatorics {
        rays,
        coords,
        cones: cone_sets,
        signature,
        span_rank: basis.len(),
    }
}

fn rational_rank(vs: &[&Vec<BigRational>]) -> usize {
    let mut rows: Vec<Vec<BigRational>> = vs.iter().map(|v| (*v).clone()).collect();
    let mut rank = 0;
    let cols = rows.first().map_or(0, Vec::len);
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot_row = rows[rank].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != rank && !row[c].is_zero() {
                let f = &row[c] / &pivot_row[c];
                for (x, y) in row[c..cols].iter_mut().zip(&pivot_row[c..cols]) {
                    *x -= &f * y;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn isomorphic(a: &Fan, b: &Fan) -> bool {
    if a.ambient_rank() != b.ambient_rank()
        || a.max_cones().len() != b.max_cones().len()
        || a.lineality_cone().lineality_dim() != b.lineality_cone().lineality_dim()
    {
        return false;
    }
    let (Some((na, ca)), Some((nb, cb))) = (pointed_part(a), pointed_part(b)) else {
        return false;
    };
    let ka = combinatorics(na, &ca);
    let kb = combinatorics(nb, &cb);
    if ka.rays.len() != kb.rays.len() || ka.span_rank != kb.span_rank {
        return false;
    }
    let mut sig_a: Vec<_> = ka.signature.clone();
    let mut sig_b: Vec<_> = kb.signature.clone();
    sig_a.sort();
    sig_b.sort();
    if sig_a != sig_b {
        return false;
    }
    if ka.span_rank == 0 {
        return true;
    }

    // rays of `a` forming a rational basis of its span
    let mut basis_idx: Vec<usize> = Vec::new();
    for i in 0..ka.rays.len() {
        let mut trial: Vec<&Vec<BigRational>> = basis_idx.iter().map(|&j| &ka.coords[j]).collect();
        trial.push(&ka.coords[i]);
        if rational_rank(&trial) == trial.len() {
            basis_idx.push(i);
        }
        if basis_idx.len() == ka.span_rank {
            break;
        }
    }

    let mut chosen = Vec::new();
    search(&ka, &kb, &basis_idx, &mut chosen)
}

fn search(ka: &Combinatorics, kb: &Combinatorics, basis_idx: &[usize], chosen: &mut Vec<usize>) -> bool {
    if chosen.len() == basis_idx.len() {
        return try_assignment(ka, kb, basis_idx, chosen);
    }
    let i = basis_idx[chosen.len()];
    for j in 0..kb.rays.len() {
        if chosen.contains(&j) || ka.signature[i] != kb.signature[j] {
            continue;
        }
        chosen.push(j);
        if search(ka, kb, basis_idx, chosen) {
            return true;
        }
        chosen.pop();
    }
    false
}

/// Solves for the linear map sending the chosen basis rays of `a` to the
/// chosen rays of `b` and checks that it is unimodular and maps the fan onto
/// the fan.
fn try_assignment(ka: &Combinatorics, kb: &Combinatorics, basis_idx: &[usize], chosen: &[usize]) -> bool {
    let r = ka.span_rank;
    // M * X = Y, so each row m of M solves X^T m^T = row of Y.
    let xt: Vec<Vec<BigRational>> = basis_idx.iter().map(|&i| ka.coords[i].clone()).collect();
    let mut m: Vec<Vec<BigRational>> = Vec::with_capacity(r);
    for row in 0..r {
        let rhs: Vec<BigRational> = chosen.iter().map(|&j| kb.coords[j][row].clone()).collect();
        match solve_rational(&xt, &rhs) {
            Some(sol) => m.push(sol),
            None => return false,
        }
    }
    if m.iter().flatten().any(|x| !x.is_integer()) {
        return false;
    }
    let mi: Vec<IntVector> = m
        .iter()
        .map(|row| IntVector::new(row.iter().map(|x| x.to_integer()).collect()))
        .collect();
    let det = crate::linalg::IntMatrix::from_rows(r, &mi)
        .expect("square")
        .determinant();
    if det.abs() != BigInt::one() {
        return false;
    }
    let apply = |x: &Vec<BigRational>| -> Vec<BigRational> {
        m.iter()
            .map(|row| row.iter().zip(x).map(|(p, q)| p * q).sum())
            .collect()
    };
    let lookup: BTreeMap<&Vec<BigRational>, usize> =
        kb.coords.iter().enumerate().map(|(j, c)| (c, j)).collect();
    let mut perm = Vec::with_capacity(ka.rays.len());
    for x in &ka.coords {
        match lookup.get(&apply(x)) {
            Some(&j) => perm.push(j),
            None => return false,
        }
    }
    let mapped: BTreeSet<BTreeSet<usize>> = ka
        .cones
        .iter()
        .map(|s| s.iter().map(|&i| perm[i]).collect())
        .collect();
    mapped == kb.cones
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fan::tests::cone;
    use crate::linalg::IntMatrix;

    fn quadrant() -> Fan {
        Fan::new(2, &[cone(2, &[&[1, 0], &[0, 1]])]).unwrap()
    }

    #[test]
    fn fan_equals_itself() {
        let f = quadrant();
        assert!(fans_equal(&f, &f, FanComparison::Exact));
        assert!(fans_equal(&f, &f, FanComparison::UpToUnimodular));
    }

    #[test]
    fn different_cones_differ() {
        let g = Fan::new(2, &[cone(2, &[&[1, 0], &[1, 1]])]).unwrap();
        assert!(!fans_equal(&quadrant(), &g, FanComparison::Exact));
        // (1,0),(1,1) is a lattice basis, so the fans are isomorphic
        assert!(fans_equal(&quadrant(), &g, FanComparison::UpToUnimodular));
        let h = Fan::new(2, &[cone(2, &[&[1, 0], &[1, 2]])]).unwrap();
        assert!(!fans_equal(&quadrant(), &h, FanComparison::UpToUnimodular));
    }

    #[test]
    fn unimodular_image_is_equal() {
        let f = Fan::new(
            3,
            &[
                cone(3, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]),
                cone(3, &[&[1, 0, 0], &[0, 0, 1], &[1, -1, 1]]),
            ],
        )
        .unwrap();
        let u = IntMatrix::from_i64_rows(&[&[1, 2, 0], &[0, 1, 0], &[3, 1, 1]]);
        let cones: Vec<Cone> = f.max_cones().iter().map(|c| c.image(&u).unwrap()).collect();
        let g = Fan::new(3, &cones).unwrap();
        assert!(!fans_equal(&f, &g, FanComparison::Exact));
        assert!(fans_equal(&f, &g, FanComparison::UpToUnimodular));
    }

    #[test]
    fn different_cone_counts_differ() {
        let two = Fan::new(
            3,
            &[cone(3, &[&[0, 0, 1], &[0, 1, 1]]), cone(3, &[&[0, 1, 1], &[0, 1, 0]])],
        )
        .unwrap();
        let one = Fan::new(3, &[cone(3, &[&[0, 1, 0], &[0, 0, 1]])]).unwrap();
        assert!(!fans_equal(&two, &one, FanComparison::UpToUnimodular));
    }
}
