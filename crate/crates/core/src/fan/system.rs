//! Affine systems of fans: charts `σ_ii` glued along common subfans `Δ_ij`.

use std::collections::{BTreeMap, BTreeSet};

use super::{face_closure, Fan};
use crate::cone::Cone;
use crate::error::{Error, Result};
use crate::linalg::IntVector;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineSystemOfFans {
    ambient_rank: usize,
    charts: Vec<Cone>,
    /// Face-closed `Δ_ij` for `i < j`.
    glueings: BTreeMap<(usize, usize), Vec<Cone>>,
}

/// Validates charts and glueing data. Each glueing entry is face-closed on
/// input; pairs that are not listed are glued along the origin only.
pub fn system_from_charts(
    ambient_rank: usize,
    charts: Vec<Cone>,
    glueings: &[((usize, usize), Vec<Cone>)],
) -> Result<AffineSystemOfFans> {
    if charts.is_empty() {
        return Err(Error::EmptySystem);
    }
    for c in &charts {
        if c.ambient_rank() != ambient_rank {
            return Err(Error::DimensionMismatch {
                expected: ambient_rank,
                found: c.ambient_rank(),
            });
        }
        if !c.is_strictly_convex() {
            return Err(Error::NotStrictlyConvex(c.clone()));
        }
    }
    let count = charts.len();
    let chart_faces: Vec<BTreeSet<Cone>> = charts
        .iter()
        .map(|c| c.face_cones().into_iter().collect())
        .collect();

    let mut given: BTreeMap<(usize, usize), Vec<Cone>> = BTreeMap::new();
    for ((i, j), cones) in glueings {
        let (i, j) = (*i, *j);
        for index in [i, j] {
            if index >= count {
                return Err(Error::ChartIndexOutOfRange { index, count });
            }
        }
        let closed = face_closure(cones);
        for c in &closed {
            if !chart_faces[i].contains(c) || !chart_faces[j].contains(c) {
                return Err(Error::NotSubfan {
                    i,
                    j,
                    cone: c.clone(),
                });
            }
        }
        if i == j {
            continue;
        }
        let key = (i.min(j), i.max(j));
        if let Some(previous) = given.get(&key) {
            if *previous != closed {
                return Err(Error::SymmetryViolation { i: key.0, j: key.1 });
            }
        }
        given.insert(key, closed);
    }

    let mut stored = BTreeMap::new();
    for i in 0..count {
        for j in i + 1..count {
            let cones = given
                .remove(&(i, j))
                .unwrap_or_else(|| vec![Cone::zero(ambient_rank)]);
            stored.insert((i, j), cones);
        }
    }
    let system = AffineSystemOfFans {
        ambient_rank,
        charts,
        glueings: stored,
    };
    system.check_triples()?;
    Ok(system)
}

/// An orbit class `[τ, i]`: a cone together with every chart label glued to
/// it.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OrbitClass {
    pub cone: Cone,
    pub charts: BTreeSet<usize>,
}

impl OrbitClass {
    pub fn representative(&self) -> (&Cone, usize) {
        (&self.cone, *self.charts.iter().next().expect("nonempty class"))
    }
}

/// The labelled faces modulo glueing, with the induced order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitClasses {
    pub classes: Vec<OrbitClass>,
}

impl OrbitClasses {
    /// `[τ,j] ≺ [σ,i]` iff `τ` is a face of `σ` and `(τ,i)` is glued to `(τ,j)`.
    pub fn precedes(&self, a: &OrbitClass, b: &OrbitClass) -> bool {
        b.cone.is_face(&a.cone) && !a.charts.is_disjoint(&b.charts)
    }

    pub fn class_of(&self, cone: &Cone, chart: usize) -> Option<&OrbitClass> {
        self.classes
            .iter()
            .find(|c| c.cone == *cone && c.charts.contains(&chart))
    }
}

/// Charts glued along every face they have in common. For cones forming a
/// fan this is the fan itself; otherwise the result is non-separated.
pub fn system_from_common_faces(ambient_rank: usize, charts: Vec<Cone>) -> Result<AffineSystemOfFans> {
    let faces: Vec<BTreeSet<Cone>> = charts
        .iter()
        .map(|c| c.face_cones().into_iter().collect())
        .collect();
    let mut glueings = Vec::new();
    for i in 0..charts.len() {
        for j in i + 1..charts.len() {
            let common: Vec<Cone> = faces[i].intersection(&faces[j]).cloned().collect();
            glueings.push(((i, j), common));
        }
    }
    system_from_charts(ambient_rank, charts, &glueings)
}

impl AffineSystemOfFans {
    /// A fan as a system: charts are the maximal cones, glued along the faces
    /// of their pairwise intersections.
    pub fn from_fan(fan: &Fan) -> AffineSystemOfFans {
        let charts = fan.max_cones().to_vec();
        let mut glueings = BTreeMap::new();
        for i in 0..charts.len() {
            for j in i + 1..charts.len() {
                let meet = charts[i].intersect(&charts[j]).expect("same rank");
                glueings.insert((i, j), meet.face_cones());
            }
        }
        AffineSystemOfFans {
            ambient_rank: fan.ambient_rank(),
            charts,
            glueings,
        }
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient_rank
    }

    pub fn charts(&self) -> &[Cone] {
        &self.charts
    }

    /// `Δ_ij`; for `i == j` the faces of the chart.
    pub fn glueing(&self, i: usize, j: usize) -> Vec<Cone> {
        if i == j {
            return self.charts[i].face_cones();
        }
        self.glueings[&(i.min(j), i.max(j))].clone()
    }

    fn glued(&self, cone: &Cone, i: usize, j: usize) -> bool {
        i == j || self.glueings[&(i.min(j), i.max(j))].contains(cone)
    }

    fn check_triples(&self) -> Result<()> {
        let n = self.charts.len();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if i == j || j == k || i == k {
                        continue;
                    }
                    let ij = self.glueing(i, j);
                    let jk = self.glueing(j, k);
                    for c in ij.iter().filter(|c| jk.contains(c)) {
                        if !self.glued(c, i, k) {
                            return Err(Error::TripleConditionViolation {
                                i,
                                j,
                                k,
                                cone: c.clone(),
                            });
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Re-runs every system axiom check.
    pub fn validate(&self) -> Result<()> {
        let glueings: Vec<((usize, usize), Vec<Cone>)> = self
            .glueings
            .iter()
            .map(|(k, v)| (*k, v.clone()))
            .collect();
        let rebuilt = system_from_charts(self.ambient_rank, self.charts.clone(), &glueings)?;
        if rebuilt != *self {
            return Err(Error::Internal("system does not re-validate to itself".into()));
        }
        Ok(())
    }

    /// `C(S)`, deduplicated, optionally restricted to dimension `k`.
    pub fn cones(&self, k: Option<usize>) -> Vec<Cone> {
        face_closure(&self.charts)
            .into_iter()
            .filter(|c| k.is_none_or(|k| c.dim() == k))
            .collect()
    }

    pub fn support_contains(&self, v: &IntVector) -> bool {
        self.charts.iter().any(|c| c.contains_point(v))
    }

    /// True iff glueing along common faces is complete, i.e. the system is a fan.
    pub fn is_separated(&self) -> bool {
        let n = self.charts.len();
        (0..n).all(|i| {
            (i + 1..n).all(|j| {
                let meet = self.charts[i].intersect(&self.charts[j]).expect("same rank");
                self.charts[i].is_face(&meet)
                    && self.charts[j].is_face(&meet)
                    && self.glueings[&(i, j)] == meet.face_cones()
            })
        })
    }

    pub fn orbit_classes(&self) -> OrbitClasses {
        let mut classes = Vec::new();
        for cone in self.cones(None) {
            let owners: Vec<usize> = (0..self.charts.len())
                .filter(|&i| self.charts[i].is_face(&cone))
                .collect();
            let mut parent: BTreeMap<usize, usize> = owners.iter().map(|&i| (i, i)).collect();
            fn find(parent: &mut BTreeMap<usize, usize>, x: usize) -> usize {
                let p = parent[&x];
                if p == x {
                    return x;
                }
                let r = find(parent, p);
                parent.insert(x, r);
                r
            }
            for (a, &i) in owners.iter().enumerate() {
                for &j in &owners[a + 1..] {
                    if self.glued(&cone, i, j) {
                        let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                        if ri != rj {
                            parent.insert(ri.max(rj), ri.min(rj));
                        }
                    }
                }
            }
            let mut groups: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
            for &i in &owners {
                let r = find(&mut parent, i);
                groups.entry(r).or_default().insert(i);
            }
            for charts in groups.into_values() {
                classes.push(OrbitClass {
                    cone: cone.clone(),
                    charts,
                });
            }
        }
        OrbitClasses { classes }
    }

    /// `S ∩ σ`: charts `σ_ii ∩ σ`, glueings `{τ ∩ σ : τ ∈ Δ_ij}` (face-closed).
    pub fn intersect_with_cone(&self, sigma: &Cone) -> Result<AffineSystemOfFans> {
        let charts = self
            .charts
            .iter()
            .map(|c| c.intersect(sigma))
            .collect::<Result<Vec<_>>>()?;
        let mut glueings = Vec::new();
        for (&(i, j), cones) in &self.glueings {
            let cut = cones
                .iter()
                .map(|c| c.intersect(sigma))
                .collect::<Result<Vec<_>>>()?;
            glueings.push(((i, j), cut));
        }
        system_from_charts(self.ambient_rank, charts, &glueings)
    }

    /// The open subsystem given by the labelled cones `(τ, i)`, each `τ` a
    /// face of chart `i`. Two selected cones are glued along their common
    /// faces that the ambient system glues.
    pub fn subsystem(&self, selection: &[(Cone, usize)]) -> Result<AffineSystemOfFans> {
        if selection.is_empty() {
            return Err(Error::EmptySystem);
        }
        for (cone, i) in selection {
            if *i >= self.charts.len() {
                return Err(Error::ChartIndexOutOfRange {
                    index: *i,
                    count: self.charts.len(),
                });
            }
            if !self.charts[*i].is_face(cone) {
                return Err(Error::NotSubfan {
                    i: *i,
                    j: *i,
                    cone: cone.clone(),
                });
            }
        }
        let charts: Vec<Cone> = selection.iter().map(|(c, _)| c.clone()).collect();
        let mut glueings = Vec::new();
        for a in 0..selection.len() {
            for b in a + 1..selection.len() {
                let (ca, ia) = &selection[a];
                let (cb, ib) = &selection[b];
                let fb: BTreeSet<Cone> = cb.face_cones().into_iter().collect();
                let common: Vec<Cone> = ca
                    .face_cones()
                    .into_iter()
                    .filter(|f| fb.contains(f) && self.glued(f, *ia, *ib))
                    .collect();
                glueings.push(((a, b), common));
            }
        }
        system_from_charts(self.ambient_rank, charts, &glueings)
    }

    /// Labels each cone with the first chart having it as a face.
    pub fn label(&self, cone: &Cone) -> Option<usize> {
        (0..self.charts.len()).find(|&i| self.charts[i].is_face(cone))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fan::tests::cone;

    fn c2_fan() -> Fan {
        Fan::new(2, &[cone(2, &[&[1, 0], &[0, 1]])]).unwrap()
    }

    fn doubled_origin_line() -> AffineSystemOfFans {
        let ray = cone(1, &[&[1]]);
        system_from_charts(1, vec![ray.clone(), ray], &[]).unwrap()
    }

    #[test]
    fn single_chart() {
        let s = AffineSystemOfFans::from_fan(&c2_fan());
        assert_eq!(s.charts().len(), 1);
        assert_eq!(s.cones(Some(1)).len(), 2);
        assert!(s.is_separated());
        s.validate().unwrap();
    }

    #[test]
    fn doubled_origin() {
        let s = doubled_origin_line();
        assert_eq!(s.cones(None), vec![Cone::zero(1), cone(1, &[&[1]])]);
        assert!(!s.is_separated());
        let oc = s.orbit_classes();
        assert_eq!(oc.classes.len(), 3);
        let origin = oc.class_of(&Cone::zero(1), 0).unwrap();
        assert_eq!(origin.charts.len(), 2);
        let r0 = oc.class_of(&cone(1, &[&[1]]), 0).unwrap();
        let r1 = oc.class_of(&cone(1, &[&[1]]), 1).unwrap();
        assert_ne!(r0, r1);
        assert!(oc.precedes(origin, r0) && oc.precedes(origin, r1));
        assert!(!oc.precedes(r0, r1));
    }

    #[test]
    fn empty_system_rejected() {
        assert!(matches!(
            system_from_charts(2, vec![], &[]),
            Err(Error::EmptySystem)
        ));
    }

    #[test]
    fn glueing_must_be_common_face() {
        let a = cone(2, &[&[1, 0], &[0, 1]]);
        let b = cone(2, &[&[0, 1], &[-1, 0]]);
        let bad = cone(2, &[&[1, 0]]);
        assert!(matches!(
            system_from_charts(2, vec![a.clone(), b.clone()], &[((0, 1), vec![bad])]),
            Err(Error::NotSubfan { .. })
        ));
        let shared = cone(2, &[&[0, 1]]);
        let s = system_from_charts(
            2,
            vec![a.clone(), b.clone()],
            &[((0, 1), vec![shared.clone()]), ((1, 0), vec![shared])],
        )
        .unwrap();
        assert!(s.is_separated());
        assert!(matches!(
            system_from_charts(
                2,
                vec![a, b],
                &[((0, 1), vec![cone(2, &[&[0, 1]])]), ((1, 0), vec![])]
            ),
            Err(Error::SymmetryViolation { .. })
        ));
    }

    #[test]
    fn triple_condition() {
        // three copies of a ray: 0~1 and 1~2 along the ray, but 0,2 only at the origin
        let ray = cone(1, &[&[1]]);
        let r = system_from_charts(
            1,
            vec![ray.clone(), ray.clone(), ray.clone()],
            &[((0, 1), vec![ray.clone()]), ((1, 2), vec![ray.clone()])],
        );
        assert!(matches!(r, Err(Error::TripleConditionViolation { .. })));
    }

    #[test]
    fn separated_orbits_match_cones() {
        let f = Fan::new(
            2,
            &[cone(2, &[&[1, 0], &[0, 1]]), cone(2, &[&[0, 1], &[-1, 0]])],
        )
        .unwrap();
        let s = AffineSystemOfFans::from_fan(&f);
        let oc = s.orbit_classes();
        assert_eq!(oc.classes.len(), f.cones().len());
        for c in &oc.classes {
            assert_eq!(c.charts.len(), s.charts().iter().filter(|m| m.is_face(&c.cone)).count());
        }
    }

    #[test]
    fn intersect_with_cone_examples() {
        let s = AffineSystemOfFans::from_fan(&c2_fan());
        let cut = s.intersect_with_cone(&cone(2, &[&[1, 0]])).unwrap();
        assert_eq!(cut.charts(), &[cone(2, &[&[1, 0]])]);
        let same = s.intersect_with_cone(&cone(2, &[&[1, 0], &[0, 1]])).unwrap();
        assert_eq!(same, s);
        let wedge = s.intersect_with_cone(&cone(2, &[&[1, 1], &[1, 2]])).unwrap();
        assert_eq!(wedge.cones(Some(1)).len(), 2);
        wedge.validate().unwrap();
    }

    #[test]
    fn support_membership() {
        let s = AffineSystemOfFans::from_fan(&c2_fan());
        assert!(s.support_contains(&IntVector::from([1, 1])));
        assert!(!s.support_contains(&IntVector::from([-1, 0])));
    }
}
