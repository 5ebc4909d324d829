//! Toric morphisms given by a lattice map from a system of fans to a fan.

use std::collections::{BTreeMap, BTreeSet};

use crate::cone::Cone;
use crate::error::{Error, Result};
use crate::fan::{covers, face_closure, AffineSystemOfFans, CoveringCertificate, Fan, OrbitClass};
use crate::lattice::{kernel_lattice, quotient_projection, saturate, Sublattice};
use crate::linalg::{IntMatrix, IntVector};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ToricMorphism {
    source: AffineSystemOfFans,
    target: Fan,
    map: IntMatrix,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Compatibility {
    pub compatible: bool,
    /// A source cone whose image lies in no target cone.
    pub witness: Option<Cone>,
}

fn check_map_shape(map: &IntMatrix, source: &AffineSystemOfFans, target: &Fan) -> Result<()> {
    if map.cols() != source.ambient_rank() {
        return Err(Error::DimensionMismatch {
            expected: source.ambient_rank(),
            found: map.cols(),
        });
    }
    if map.rows() != target.ambient_rank() {
        return Err(Error::DimensionMismatch {
            expected: target.ambient_rank(),
            found: map.rows(),
        });
    }
    Ok(())
}

/// Every chart (hence every cone of `C(S)`) must map into some target cone.
pub fn check_compatible(
    map: &IntMatrix,
    source: &AffineSystemOfFans,
    target: &Fan,
) -> Result<Compatibility> {
    check_map_shape(map, source, target)?;
    for chart in source.charts() {
        let image = chart.image(map)?;
        if target.containing_cone(&image).is_none() {
            return Ok(Compatibility {
                compatible: false,
                witness: Some(chart.clone()),
            });
        }
    }
    Ok(Compatibility {
        compatible: true,
        witness: None,
    })
}

impl ToricMorphism {
    pub fn new(source: AffineSystemOfFans, target: Fan, map: IntMatrix) -> Result<Self> {
        let check = check_compatible(&map, &source, &target)?;
        if let Some(cone) = check.witness {
            return Err(Error::Incompatible { cone });
        }
        Ok(ToricMorphism {
            source,
            target,
            map,
        })
    }

    pub fn source(&self) -> &AffineSystemOfFans {
        &self.source
    }

    pub fn target(&self) -> &Fan {
        &self.target
    }

    pub fn map(&self) -> &IntMatrix {
        &self.map
    }

    pub fn kernel(&self) -> Sublattice {
        kernel_lattice(&self.map)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeakProperness {
    pub weakly_proper: bool,
    /// One covering decision per maximal target cone, in order; stops at the
    /// first failure.
    pub certificates: Vec<CoveringCertificate>,
}

impl WeakProperness {
    pub fn failure(&self) -> Option<&CoveringCertificate> {
        self.certificates.iter().find(|c| !c.covered)
    }
}

/// `F(|S|) = |Δ|`, decided by covering each maximal target cone with the
/// images of the charts.
pub fn is_weakly_proper(m: &ToricMorphism) -> Result<WeakProperness> {
    let images = m
        .source
        .charts()
        .iter()
        .map(|c| c.image(&m.map))
        .collect::<Result<Vec<_>>>()?;
    let mut certificates = Vec::new();
    for target in m.target.max_cones() {
        let cert = covers(target, &images)?;
        let covered = cert.covered;
        certificates.push(cert);
        if !covered {
            return Ok(WeakProperness {
                weakly_proper: false,
                certificates,
            });
        }
    }
    Ok(WeakProperness {
        weakly_proper: true,
        certificates,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivalenceClass {
    pub target: Cone,
    pub members: Vec<Cone>,
    /// `N ∩ lin` of the class support.
    pub support_lattice: Sublattice,
}

/// The classes of `C(S)` under `σ ~ σ'` iff `F(σ°)` and `F(σ'°)` lie in the
/// relative interior of the same target cone, keyed by that cone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivalenceClasses {
    pub classes: BTreeMap<Cone, EquivalenceClass>,
    assignment: BTreeMap<Cone, Cone>,
}

impl EquivalenceClasses {
    /// Target cone whose relative interior receives `F(σ°)`.
    pub fn target_of(&self, sigma: &Cone) -> Option<&Cone> {
        self.assignment.get(sigma)
    }

    pub fn class_of(&self, sigma: &Cone) -> Option<&EquivalenceClass> {
        self.target_of(sigma).map(|t| &self.classes[t])
    }

    pub fn equivalent(&self, a: &Cone, b: &Cone) -> bool {
        matches!((self.target_of(a), self.target_of(b)), (Some(x), Some(y)) if x == y)
    }
}

pub fn equivalence_classes(m: &ToricMorphism) -> Result<EquivalenceClasses> {
    let mut assignment = BTreeMap::new();
    let mut grouped: BTreeMap<Cone, Vec<Cone>> = BTreeMap::new();
    for sigma in m.source.cones(None) {
        let p = m.map.apply(&sigma.relative_interior_point())?;
        let target = m
            .target
            .carrier(&p)
            .ok_or_else(|| Error::Incompatible { cone: sigma.clone() })?;
        grouped.entry(target.clone()).or_default().push(sigma.clone());
        assignment.insert(sigma, target);
    }
    let n = m.source.ambient_rank();
    let classes = grouped
        .into_iter()
        .map(|(target, members)| {
            let joined = members
                .iter()
                .fold(Sublattice::zero(n), |acc, c| acc.join(&c.span_lattice()));
            let class = EquivalenceClass {
                target: target.clone(),
                members,
                support_lattice: saturate(&joined),
            };
            (target, class)
        })
        .collect();
    Ok(EquivalenceClasses {
        classes,
        assignment,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiberData {
    pub target_cone: Cone,
    pub orbit_members: Vec<OrbitClass>,
    pub stabilizer_lattice: Sublattice,
}

/// Orbits mapping into the orbit of `target_cone`, and the lattice of the
/// subtorus acting transitively on the fiber.
pub fn fiber_data(m: &ToricMorphism, target_cone: &Cone) -> Result<FiberData> {
    if !m.target.cones().contains(target_cone) {
        return Err(Error::PreconditionViolated(format!(
            "{target_cone} is not a cone of the target fan"
        )));
    }
    let classes = equivalence_classes(m)?;
    let kernel = m.kernel();
    let (members, support) = match classes.classes.get(target_cone) {
        Some(class) => (class.members.clone(), class.support_lattice.clone()),
        None => (Vec::new(), Sublattice::zero(m.source.ambient_rank())),
    };
    let orbit_members = m
        .source
        .orbit_classes()
        .classes
        .into_iter()
        .filter(|o| members.contains(&o.cone))
        .collect();
    Ok(FiberData {
        target_cone: target_cone.clone(),
        orbit_members,
        stabilizer_lattice: saturate(&support.join(&kernel)),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FactorizationWitness {
    /// A kernel vector of `p` not killed by `f`.
    KernelVector(IntVector),
    /// Two `p`-equivalent cones that `f` separates.
    ClassPair(Cone, Cone),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub factors: bool,
    pub witness: Option<FactorizationWitness>,
}

/// Whether toric `f` factors through `p`: `f` kills `ker p` and every
/// `p`-class lies inside an `f`-class.
pub fn factors_through(f: &ToricMorphism, p: &ToricMorphism) -> Result<Factorization> {
    if f.source != p.source {
        return Err(Error::PreconditionViolated(
            "morphisms have different source systems".into(),
        ));
    }
    let image = Sublattice::new(
        p.map.rows(),
        &(0..p.map.cols()).map(|j| p.map.column(j)).collect::<Vec<_>>(),
    )?;
    if !image.is_saturated() {
        return Err(Error::PreconditionViolated(
            "the lattice map of p has torsion cokernel (kernel torus not connected)".into(),
        ));
    }
    if !is_weakly_proper(p)?.weakly_proper {
        return Err(Error::PreconditionViolated("p is not weakly proper".into()));
    }
    for k in p.kernel().basis() {
        if !f.map.apply(k)?.is_zero() {
            return Ok(Factorization {
                factors: false,
                witness: Some(FactorizationWitness::KernelVector(k.clone())),
            });
        }
    }
    let fc = equivalence_classes(f)?;
    let pc = equivalence_classes(p)?;
    for class in pc.classes.values() {
        let first = &class.members[0];
        for other in &class.members[1..] {
            if !fc.equivalent(first, other) {
                return Ok(Factorization {
                    factors: false,
                    witness: Some(FactorizationWitness::ClassPair(first.clone(), other.clone())),
                });
            }
        }
    }
    Ok(Factorization {
        factors: true,
        witness: None,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Restriction {
    pub system: AffineSystemOfFans,
    pub projection: IntMatrix,
    pub target: Cone,
}

/// `S ∩ σ` with the projection killing the minimal face of `σ` and the
/// (strictly convex) image of `σ`.
pub fn restrict_to_cone(system: &AffineSystemOfFans, sigma: &Cone) -> Result<Restriction> {
    let cert = covers(sigma, system.charts())?;
    if let Some(point) = cert.witness {
        return Err(Error::OutsideSupport { point });
    }
    let cut = system.intersect_with_cone(sigma)?;
    let q = quotient_projection(sigma.ambient_rank(), &sigma.lineality_lattice())?;
    let target = sigma.image(q.projection())?;
    Ok(Restriction {
        system: cut,
        projection: q.projection().clone(),
        target,
    })
}

/// Cones picked out of a system, either whole charts or explicit cones of
/// `C(S)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Selection {
    Charts(Vec<usize>),
    Cones(Vec<Cone>),
}

impl Selection {
    /// The selected cones with a chart label each.
    pub fn labelled(&self, system: &AffineSystemOfFans) -> Result<Vec<(Cone, usize)>> {
        match self {
            Selection::Charts(idx) => idx
                .iter()
                .map(|&i| {
                    system
                        .charts()
                        .get(i)
                        .map(|c| (c.clone(), i))
                        .ok_or(Error::ChartIndexOutOfRange {
                            index: i,
                            count: system.charts().len(),
                        })
                })
                .collect(),
            Selection::Cones(cones) => cones
                .iter()
                .map(|c| {
                    system.label(c).map(|i| (c.clone(), i)).ok_or_else(|| {
                        Error::PreconditionViolated(format!("{c} is not a cone of the system"))
                    })
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SaturationCheck {
    pub saturated: bool,
    /// A selected cone and a `p`-equivalent cone outside the selection.
    pub witness: Option<(Cone, Cone)>,
}

/// Whether the face closure of the selection is a union of `p`-classes.
pub fn is_saturated_subfan(p: &ToricMorphism, selection: &Selection) -> Result<SaturationCheck> {
    let picked: Vec<Cone> = selection
        .labelled(&p.source)?
        .into_iter()
        .map(|(c, _)| c)
        .collect();
    let closure: BTreeSet<Cone> = face_closure(&picked).into_iter().collect();
    let classes = equivalence_classes(p)?;
    for sigma in &closure {
        let class = classes
            .class_of(sigma)
            .ok_or_else(|| Error::Internal(format!("{sigma} has no class")))?;
        if let Some(outside) = class.members.iter().find(|m| !closure.contains(m)) {
            return Ok(SaturationCheck {
                saturated: false,
                witness: Some((sigma.clone(), outside.clone())),
            });
        }
    }
    Ok(SaturationCheck {
        saturated: true,
        witness: None,
    })
}
