//! Quotients of systems of fans by a sublattice: the merge loop producing the
//! quotient quasi-fan, the separated toric quotient and its certification as
//! a categorical quotient.

use std::collections::BTreeSet;

use crate::cone::Cone;
use crate::error::{Error, Result};
use crate::fan::{
    covers, face_closure, fan_from_max_cones, fans_equal, maximal_elements, support_is_convex,
    AffineSystemOfFans, CoveringCertificate, Fan, FanComparison,
};
use crate::lattice::{quotient_projection, QuotientLattice, Sublattice};
use crate::linalg::IntMatrix;
use crate::morphism::{
    is_saturated_subfan, is_weakly_proper, Selection, ToricMorphism, WeakProperness,
};

pub const DEFAULT_ITERATION_CAP: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuotientOptions {
    pub iteration_cap: usize,
    /// Fan comparison used by the uniformity probe.
    pub comparison: FanComparison,
}

impl Default for QuotientOptions {
    fn default() -> Self {
        QuotientOptions {
            iteration_cap: DEFAULT_ITERATION_CAP,
            comparison: FanComparison::UpToUnimodular,
        }
    }
}

/// One pass of the loop: `τ ∩ τ'` is not a face of `τ'`, `ρ'` is the smallest
/// face of `τ'` containing it and `merged = τ + ρ'`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MergeStep {
    pub tau: Cone,
    pub tau_prime: Cone,
    pub rho_prime: Cone,
    pub merged: Cone,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientQuasiFan {
    pub projection: QuotientLattice,
    /// Maximal images of the cones of the system.
    pub initial: Vec<Cone>,
    pub sigma: Fan,
    /// `V(Σ) ∩ N/L`.
    pub lineality: Sublattice,
    pub trace: Vec<MergeStep>,
}

impl QuotientQuasiFan {
    /// Replays the trace from the initial antichain, returning every
    /// intermediate antichain (the first is `initial`).
    pub fn replay(&self) -> Vec<Vec<Cone>> {
        let mut states = vec![self.initial.clone()];
        for step in &self.trace {
            let mut next = states.last().cloned().unwrap_or_default();
            next.push(step.merged.clone());
            states.push(maximal_elements(&next));
        }
        states
    }
}

fn check_sublattice(system: &AffineSystemOfFans, l: &Sublattice) -> Result<QuotientLattice> {
    if l.ambient_rank() != system.ambient_rank() {
        return Err(Error::DimensionMismatch {
            expected: system.ambient_rank(),
            found: l.ambient_rank(),
        });
    }
    quotient_projection(system.ambient_rank(), l)
}

fn violating_pair(s: &[Cone]) -> Result<Option<(usize, usize, Cone)>> {
    for (i, tau) in s.iter().enumerate() {
        for (j, tau_prime) in s.iter().enumerate() {
            if i == j {
                continue;
            }
            let meet = tau.intersect(tau_prime)?;
            if !tau_prime.is_face(&meet) {
                return Ok(Some((i, j, meet)));
            }
        }
    }
    Ok(None)
}

pub fn quotient_quasifan(system: &AffineSystemOfFans, l: &Sublattice) -> Result<QuotientQuasiFan> {
    quotient_quasifan_with(system, l, &QuotientOptions::default())
}

/// Pairs are examined in the order of the sorted antichain, so the first
/// violating ordered pair found is the lexicographically smallest.
pub fn quotient_quasifan_with(
    system: &AffineSystemOfFans,
    l: &Sublattice,
    options: &QuotientOptions,
) -> Result<QuotientQuasiFan> {
    let projection = check_sublattice(system, l)?;
    let images = system
        .cones(None)
        .iter()
        .map(|c| c.image(projection.projection()))
        .collect::<Result<Vec<_>>>()?;
    let initial = maximal_elements(&images);

    let mut current = initial.clone();
    let mut trace = Vec::new();
    while let Some((i, j, meet)) = violating_pair(&current)? {
        if trace.len() >= options.iteration_cap {
            return Err(Error::IterationCapExceeded {
                cap: options.iteration_cap,
            });
        }
        let tau = current[i].clone();
        let tau_prime = current[j].clone();
        let rho_prime = tau_prime.smallest_face_containing(&meet)?.cone;
        let merged = tau.sum(&rho_prime)?;
        current.push(merged.clone());
        current = maximal_elements(&current);
        trace.push(MergeStep {
            tau,
            tau_prime,
            rho_prime,
            merged,
        });
    }

    let m = projection.target_rank();
    let sigma = fan_from_max_cones(m, &current, true)
        .map_err(|e| Error::Internal(format!("merged cones do not form a quasi-fan: {e}")))?;
    let v = sigma.lineality_cone();
    if let Some(c) = sigma.max_cones().iter().find(|c| c.minimal_face() != v) {
        return Err(Error::Internal(format!(
            "cone {c} does not share the minimal face {v}"
        )));
    }
    Ok(QuotientQuasiFan {
        projection,
        initial,
        sigma,
        lineality: v.lineality_lattice(),
        trace,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeparatedToricQuotient {
    pub source: AffineSystemOfFans,
    pub sublattice: Sublattice,
    pub quasifan: QuotientQuasiFan,
    /// `N/L → (N/L)/L'`.
    pub p_prime: QuotientLattice,
    pub fan: Fan,
}

impl SeparatedToricQuotient {
    /// `P: N → N/L`.
    pub fn p(&self) -> &IntMatrix {
        self.quasifan.projection.projection()
    }

    /// `P'∘P`.
    pub fn composite(&self) -> IntMatrix {
        self.p_prime
            .projection()
            .mul(self.p())
            .expect("projection shapes agree")
    }

    pub fn morphism(&self) -> Result<ToricMorphism> {
        ToricMorphism::new(self.source.clone(), self.fan.clone(), self.composite())
            .map_err(|e| Error::Internal(format!("quotient map is not toric: {e}")))
    }
}

pub fn separated_toric_quotient(
    system: &AffineSystemOfFans,
    l: &Sublattice,
) -> Result<SeparatedToricQuotient> {
    separated_toric_quotient_with(system, l, &QuotientOptions::default())
}

pub fn separated_toric_quotient_with(
    system: &AffineSystemOfFans,
    l: &Sublattice,
    options: &QuotientOptions,
) -> Result<SeparatedToricQuotient> {
    let quasifan = quotient_quasifan_with(system, l, options)?;
    let p_prime = quotient_projection(quasifan.projection.target_rank(), &quasifan.lineality)?;
    let cones = quasifan
        .sigma
        .max_cones()
        .iter()
        .map(|c| c.image(p_prime.projection()))
        .collect::<Result<Vec<_>>>()?;
    let fan = Fan::new(p_prime.target_rank(), &cones)
        .map_err(|e| Error::Internal(format!("quotient fan failed validation: {e}")))?;
    Ok(SeparatedToricQuotient {
        source: system.clone(),
        sublattice: l.clone(),
        quasifan,
        p_prime,
        fan,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Thm62Check {
    pub holds: bool,
    /// One covering decision per maximal cone of `Δ`; stops at the first
    /// failure.
    pub certificates: Vec<CoveringCertificate>,
}

impl Thm62Check {
    pub fn failure(&self) -> Option<&CoveringCertificate> {
        self.certificates.iter().find(|c| !c.covered)
    }
}

/// Decides `P(|S|) = P'⁻¹(|Δ|)`. The inclusion `⊆` holds by construction; `⊇`
/// is a covering question per maximal cone of `Δ`.
pub fn check_thm62(q: &SeparatedToricQuotient) -> Result<Thm62Check> {
    let images = q
        .source
        .charts()
        .iter()
        .map(|c| c.image(q.p()))
        .collect::<Result<Vec<_>>>()?;
    let mut certificates = Vec::new();
    for delta in q.fan.max_cones() {
        let pre = delta.preimage(q.p_prime.projection())?;
        let cert = covers(&pre, &images)?;
        let covered = cert.covered;
        certificates.push(cert);
        if !covered {
            return Ok(Thm62Check {
                holds: false,
                certificates,
            });
        }
    }
    Ok(Thm62Check {
        holds: true,
        certificates,
    })
}

/// The sufficient conditions for the separated toric quotient to be
/// categorical.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Condition {
    WeaklyProper,
    ExpectedDimension,
    Thm62,
    ConvexSupport,
    CodimLe2,
}

impl Condition {
    pub fn name(self) -> &'static str {
        match self {
            Condition::WeaklyProper => "weakly_proper",
            Condition::ExpectedDimension => "expected_dimension",
            Condition::Thm62 => "thm62",
            Condition::ConvexSupport => "convex_support",
            Condition::CodimLe2 => "codim_le_2",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    CertifiedCategorical,
    NotCertified,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::CertifiedCategorical => "certified_categorical",
            Verdict::NotCertified => "not_certified",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certification {
    pub weakly_proper: bool,
    pub expected_dimension: bool,
    pub convex_support: bool,
    pub codim_le_2: bool,
    pub thm62: bool,
    pub verdict: Verdict,
    /// Conditions that fired; empty when not certified.
    pub reasons: Vec<Condition>,
    pub quotient: SeparatedToricQuotient,
    pub weak_properness: WeakProperness,
    pub thm62_check: Thm62Check,
}

pub fn certify_categorical(system: &AffineSystemOfFans, l: &Sublattice) -> Result<Certification> {
    certify_categorical_with(system, l, &QuotientOptions::default())
}

pub fn certify_categorical_with(
    system: &AffineSystemOfFans,
    l: &Sublattice,
    options: &QuotientOptions,
) -> Result<Certification> {
    let quotient = separated_toric_quotient_with(system, l, options)?;
    let morphism = quotient.morphism()?;
    let (weak, (thm62, convex)) = rayon::join(
        || is_weakly_proper(&morphism),
        || rayon::join(|| check_thm62(&quotient), || support_is_convex(system)),
    );
    let (weak, thm62, (convex_support, _)) = (weak?, thm62?, convex?);
    let weakly_proper = weak.weakly_proper;
    let expected_dimension = quotient.quasifan.lineality.rank() == 0;
    let codim_le_2 = system.ambient_rank() - l.rank() <= 2;

    let mut reasons = Vec::new();
    if weakly_proper && expected_dimension {
        reasons.extend([Condition::WeaklyProper, Condition::ExpectedDimension]);
    }
    if thm62.holds {
        reasons.push(Condition::Thm62);
    }
    if convex_support {
        reasons.push(Condition::ConvexSupport);
    }
    if codim_le_2 {
        reasons.push(Condition::CodimLe2);
    }
    let verdict = if reasons.is_empty() {
        Verdict::NotCertified
    } else {
        Verdict::CertifiedCategorical
    };
    Ok(Certification {
        weakly_proper,
        expected_dimension,
        convex_support,
        codim_le_2,
        thm62: thm62.holds,
        verdict,
        reasons,
        quotient,
        weak_properness: weak,
        thm62_check: thm62,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniformityReport {
    /// Separated toric quotient of the selected subsystem.
    pub restricted: Fan,
    /// Cones of the full quotient receiving the selected cones.
    pub image: Fan,
    pub equal: bool,
}

pub fn uniformity_probe(
    system: &AffineSystemOfFans,
    l: &Sublattice,
    selection: &Selection,
) -> Result<UniformityReport> {
    uniformity_probe_with(system, l, selection, &QuotientOptions::default())
}

pub fn uniformity_probe_with(
    system: &AffineSystemOfFans,
    l: &Sublattice,
    selection: &Selection,
    options: &QuotientOptions,
) -> Result<UniformityReport> {
    let full = separated_toric_quotient_with(system, l, options)?;
    let morphism = full.morphism()?;
    let check = is_saturated_subfan(&morphism, selection)?;
    if let Some((cone, partner)) = check.witness {
        return Err(Error::NotSaturated { cone, partner });
    }

    let labelled = selection.labelled(system)?;
    let sub = system.subsystem(&labelled)?;
    let restricted = separated_toric_quotient_with(&sub, l, options)?.fan;

    let composite = full.composite();
    let picked: Vec<Cone> = labelled.into_iter().map(|(c, _)| c).collect();
    let mut targets = BTreeSet::new();
    for sigma in face_closure(&picked) {
        let p = composite.apply(&sigma.relative_interior_point())?;
        let t = full
            .fan
            .carrier(&p)
            .ok_or_else(|| Error::Internal(format!("{sigma} maps outside the quotient fan")))?;
        targets.insert(t);
    }
    let targets: Vec<Cone> = targets.into_iter().collect();
    let image = Fan::new(full.fan.ambient_rank(), &face_closure(&targets))?;
    let equal = fans_equal(&restricted, &image, options.comparison);
    Ok(UniformityReport {
        restricted,
        image,
        equal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::IntVector;

    fn cone(n: usize, gens: &[&[i64]]) -> Cone {
        let g: Vec<IntVector> = gens.iter().map(|x| IntVector::from_i64s(x)).collect();
        Cone::from_generators(n, &g).unwrap()
    }

    fn line(n: usize, v: &[i64]) -> Sublattice {
        Sublattice::new(n, &[IntVector::from_i64s(v)]).unwrap()
    }

    fn c2() -> AffineSystemOfFans {
        AffineSystemOfFans::from_fan(&Fan::new(2, &[cone(2, &[&[1, 0], &[0, 1]])]).unwrap())
    }

    fn octant() -> Cone {
        cone(3, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]])
    }

    fn gap_merge() -> AffineSystemOfFans {
        crate::fan::system_from_charts(
            3,
            vec![
                cone(3, &[&[1, 0, 0], &[0, 1, 0]]),
                cone(3, &[&[1, 1, 0], &[0, 0, 1]]),
            ],
            &[],
        )
        .unwrap()
    }

    fn worked_example() -> (AffineSystemOfFans, Sublattice) {
        let sigmas = [
            cone(4, &[&[0, 0, 1, 0], &[0, 1, 1, 0], &[1, 1, 1, 0], &[1, 0, 1, 0]]),
            cone(4, &[&[1, 0, 0, 0], &[1, 0, 1, 0], &[1, 1, 1, 0], &[1, 1, 0, 0]]),
            cone(4, &[&[0, 1, 0, 0], &[1, 1, 0, 0], &[1, 1, 1, 0], &[0, 1, 1, 0]]),
            cone(4, &[&[1, 0, 0, 0], &[1, -1, 1, 0], &[0, 0, 1, 0], &[0, 0, 0, 1]]),
        ];
        // σ1 ∩ σ4 = cone(e3, e1+e3) is not a face of σ4, so the charts are
        // glued along their common faces rather than forming a fan
        assert!(Fan::new(4, &sigmas).is_err());
        let s = crate::fan::system_from_common_faces(4, sigmas.to_vec()).unwrap();
        (s, line(4, &[1, 0, 1, -1]))
    }

    #[test]
    fn c2_by_vertical_axis() {
        let q = quotient_quasifan(&c2(), &line(2, &[0, 1])).unwrap();
        assert_eq!(q.initial, vec![cone(1, &[&[1]])]);
        assert!(q.trace.is_empty());
        assert_eq!(q.lineality.rank(), 0);
        assert_eq!(q.sigma.max_cones(), &[cone(1, &[&[1]])]);
    }

    #[test]
    fn c2_by_diagonal_collapses() {
        let s = c2();
        let l = line(2, &[1, 1]);
        let q = separated_toric_quotient(&s, &l).unwrap();
        assert_eq!(q.quasifan.initial, vec![Cone::full(1)]);
        assert_eq!(q.quasifan.lineality.rank(), 1);
        assert_eq!(q.fan.ambient_rank(), 0);
        assert_eq!(q.fan.max_cones(), &[Cone::zero(0)]);
        assert!(check_thm62(&q).unwrap().holds);
        let cert = certify_categorical(&s, &l).unwrap();
        assert_eq!(cert.verdict, Verdict::CertifiedCategorical);
        assert!(cert.convex_support && cert.codim_le_2);
    }

    #[test]
    fn gap_merge_fires_once() {
        let q = separated_toric_quotient(&gap_merge(), &Sublattice::zero(3)).unwrap();
        assert_eq!(q.quasifan.trace.len(), 1);
        let step = &q.quasifan.trace[0];
        assert_eq!(step.merged, octant());
        assert_eq!(step.tau, cone(3, &[&[1, 1, 0], &[0, 0, 1]]));
        assert_eq!(step.rho_prime, cone(3, &[&[1, 0, 0], &[0, 1, 0]]));
        assert_eq!(q.fan.max_cones(), &[octant()]);

        let check = check_thm62(&q).unwrap();
        assert!(!check.holds);
        let w = check.failure().unwrap().witness.clone().unwrap();
        assert_eq!(octant().membership(&w), crate::cone::Membership::RelativeInterior);
        for c in gap_merge().charts() {
            assert!(!c.contains_point(&w));
        }

        let cert = certify_categorical(&gap_merge(), &Sublattice::zero(3)).unwrap();
        assert_eq!(cert.verdict, Verdict::NotCertified);
        assert!(!cert.weakly_proper && !cert.thm62 && !cert.convex_support && !cert.codim_le_2);
        assert!(cert.expected_dimension);
        assert!(cert.reasons.is_empty());
    }

    #[test]
    fn worked_example_quotient() {
        let (s, l) = worked_example();
        let q = separated_toric_quotient(&s, &l).unwrap();
        let printed = IntMatrix::from_i64_rows(&[&[1, 0, 0, 1], &[0, 1, 0, 0], &[0, 0, 1, 1]]);
        assert_eq!(q.p(), &printed);
        assert_eq!(q.quasifan.lineality.rank(), 0);
        assert_eq!(q.fan.ambient_rank(), 3);
        assert_eq!(
            q.fan.max_cones(),
            &[octant(), cone(3, &[&[1, 0, 0], &[0, 0, 1], &[1, -1, 1]])]
        );
        // the first violation is P(σ1) against P(σ4); later merges stay in the octant
        let first = &q.quasifan.trace[0];
        assert_eq!(first.tau, cone(3, &[&[0, 0, 1], &[0, 1, 1], &[1, 0, 1], &[1, 1, 1]]));
        assert_eq!(first.tau_prime, cone(3, &[&[1, 0, 0], &[0, 0, 1], &[1, -1, 1]]));
        assert_eq!(first.rho_prime, cone(3, &[&[1, 0, 0], &[0, 0, 1]]));
        for step in &q.quasifan.trace {
            assert!(octant().contains(&step.merged));
        }
    }

    #[test]
    fn worked_example_certified() {
        let (s, l) = worked_example();
        let cert = certify_categorical(&s, &l).unwrap();
        assert_eq!(cert.verdict, Verdict::CertifiedCategorical);
        assert!(cert.weakly_proper && cert.expected_dimension && cert.thm62);
        assert!(!cert.codim_le_2);
        assert_eq!(
            &cert.reasons[..3],
            &[Condition::WeaklyProper, Condition::ExpectedDimension, Condition::Thm62]
        );
    }

    #[test]
    fn worked_example_not_uniform() {
        let (s, l) = worked_example();
        let sel = Selection::Cones(vec![
            cone(4, &[&[0, 0, 1, 0], &[0, 1, 1, 0]]),
            cone(4, &[&[0, 1, 1, 0], &[0, 1, 0, 0]]),
        ]);
        let r = uniformity_probe(&s, &l, &sel).unwrap();
        assert_eq!(
            r.restricted.max_cones(),
            &[cone(3, &[&[0, 0, 1], &[0, 1, 1]]), cone(3, &[&[0, 1, 1], &[0, 1, 0]])]
        );
        assert_eq!(r.image.max_cones(), &[cone(3, &[&[0, 1, 0], &[0, 0, 1]])]);
        assert!(!r.equal);

        let whole = Selection::Charts((0..s.charts().len()).collect());
        assert!(uniformity_probe(&s, &l, &whole).unwrap().equal);
    }

    #[test]
    fn unsaturated_selection_rejected() {
        let (s, l) = worked_example();
        let sel = Selection::Cones(vec![cone(4, &[&[0, 0, 1, 0], &[0, 1, 1, 0]])]);
        assert!(matches!(
            uniformity_probe(&s, &l, &sel),
            Err(Error::NotSaturated { .. })
        ));
    }

    #[test]
    fn fan_quotient_by_zero_is_identity() {
        let fan = Fan::new(
            2,
            &[cone(2, &[&[1, 0], &[0, 1]]), cone(2, &[&[0, 1], &[-1, -1]])],
        )
        .unwrap();
        let q = separated_toric_quotient(&AffineSystemOfFans::from_fan(&fan), &Sublattice::zero(2))
            .unwrap();
        assert_eq!(q.fan, fan);
        assert!(q.quasifan.trace.is_empty());
    }

    #[test]
    fn iteration_cap_is_enforced() {
        let opts = QuotientOptions {
            iteration_cap: 0,
            ..QuotientOptions::default()
        };
        assert!(matches!(
            quotient_quasifan_with(&gap_merge(), &Sublattice::zero(3), &opts),
            Err(Error::IterationCapExceeded { cap: 0 })
        ));
    }

    #[test]
    fn unsaturated_sublattice_rejected() {
        let l = Sublattice::new(2, &[IntVector::from([2, 0])]).unwrap();
        assert!(matches!(
            quotient_quasifan(&c2(), &l),
            Err(Error::UnsaturatedSublattice)
        ));
    }

    #[test]
    fn replay_is_monotone() {
        let (s, l) = worked_example();
        let q = quotient_quasifan(&s, &l).unwrap();
        let states = q.replay();
        assert_eq!(states.last().unwrap().as_slice(), q.sigma.max_cones());
        for w in states.windows(2) {
            for c in &w[0] {
                assert!(w[1].iter().any(|d| d.contains(c)));
            }
        }
    }
}
