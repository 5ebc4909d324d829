use serde_json::{json, Map, Value};
use torq_core::io::{self, Document};
use torq_core::morphism::{
    check_compatible, equivalence_classes, factors_through, fiber_data, is_saturated_subfan,
    is_weakly_proper, restrict_to_cone, FactorizationWitness, Selection, ToricMorphism,
};
use torq_core::quotient::{
    certify_categorical_with, separated_toric_quotient_with, uniformity_probe_with,
    QuotientOptions, SeparatedToricQuotient,
};
use torq_core::{AffineSystemOfFans, Error, FanComparison, Result};

use crate::report::{self, Report};
use crate::{Command, CompareMode, Inputs, LoopFlags};

/// The given name, or the unique object of the first kind that has any.
fn pick(doc: &Document, given: Option<&String>, kinds: &[&str], flag: &str) -> Result<String> {
    if let Some(name) = given {
        return Ok(name.clone());
    }
    for kind in kinds {
        let names = doc.names_of_kind(kind);
        match names.len() {
            0 => continue,
            1 => return Ok(names[0].to_string()),
            _ => {
                return Err(Error::Validation {
                    object: flag.to_string(),
                    message: format!(
                        "several {kind} objects ({}); choose one with --{flag}",
                        names.join(", ")
                    ),
                })
            }
        }
    }
    Err(Error::Validation {
        object: flag.to_string(),
        message: format!("no {} object in the document; pass --{flag}", kinds[0]),
    })
}

struct Resolved {
    inputs: Map<String, Value>,
}

impl Resolved {
    fn new(inputs: &Inputs) -> Resolved {
        let mut m = Map::new();
        m.insert("file".into(), json!(inputs.input.display().to_string()));
        Resolved { inputs: m }
    }

    fn system(&mut self, doc: &Document, inputs: &Inputs) -> Result<(String, AffineSystemOfFans)> {
        let name = pick(doc, inputs.system.as_ref(), &["system", "fan"], "system")?;
        self.inputs.insert("system".into(), json!(name));
        let s = doc.system(&name)?;
        Ok((name, s))
    }

    fn sublattice(&mut self, doc: &Document, inputs: &Inputs) -> Result<(String, torq_core::Sublattice)> {
        let name = pick(doc, inputs.sublattice.as_ref(), &["sublattice"], "sublattice")?;
        self.inputs.insert("sublattice".into(), json!(name));
        let l = doc.sublattice(&name)?.clone();
        Ok((name, l))
    }

    fn morphism(&mut self, doc: &Document, inputs: &Inputs) -> Result<ToricMorphism> {
        let (_, source) = self.system(doc, inputs)?;
        let map_name = pick(doc, inputs.map.as_ref(), &["map"], "map")?;
        let target_name = pick(doc, inputs.target.as_ref(), &["fan"], "target")?;
        self.inputs.insert("map".into(), json!(map_name));
        self.inputs.insert("target".into(), json!(target_name));
        let map = doc.map(&map_name)?.clone();
        let target = doc.fan(&target_name)?.clone();
        let check = check_compatible(&map, &source, &target)?;
        if let Some(cone) = check.witness {
            return Err(Error::Incompatible { cone });
        }
        ToricMorphism::new(source, target, map)
    }

    fn insert(&mut self, key: &str, value: Value) {
        self.inputs.insert(key.into(), value);
    }
}

fn options(flags: &LoopFlags) -> QuotientOptions {
    QuotientOptions {
        iteration_cap: flags.iteration_cap,
        ..QuotientOptions::default()
    }
}

fn selection(doc: &Document, sub: &str) -> Result<Selection> {
    let tokens: Vec<&str> = sub.split(',').map(str::trim).filter(|t| !t.is_empty()).collect();
    if tokens.is_empty() {
        return Err(Error::Validation {
            object: "sub".into(),
            message: "empty selection".into(),
        });
    }
    let indices: Option<Vec<usize>> = tokens
        .iter()
        .map(|t| if doc.objects.contains_key(*t) { None } else { t.parse().ok() })
        .collect();
    if let Some(idx) = indices {
        return Ok(Selection::Charts(idx));
    }
    tokens
        .iter()
        .map(|t| doc.cone(t).cloned())
        .collect::<Result<Vec<_>>>()
        .map(Selection::Cones)
}

fn trace_value(q: &SeparatedToricQuotient) -> Value {
    Value::Array(
        q.quasifan
            .trace
            .iter()
            .map(|s| {
                json!({
                    "tau": report::cone(&s.tau),
                    "tau_prime": report::cone(&s.tau_prime),
                    "rho_prime": report::cone(&s.rho_prime),
                    "merged": report::cone(&s.merged),
                })
            })
            .collect(),
    )
}

fn quotient_result(q: &SeparatedToricQuotient) -> Value {
    json!({
        "quotient_lattice_rank": q.quasifan.projection.target_rank(),
        "projection": report::matrix(q.p()),
        "quasifan": report::fan(&q.quasifan.sigma),
        "lineality": report::lattice(&q.quasifan.lineality),
        "projection_prime": report::matrix(q.p_prime.projection()),
        "fan": report::fan(&q.fan),
        "merge_steps": q.quasifan.trace.len(),
    })
}

fn describe_quotient(r: &mut Report, q: &SeparatedToricQuotient, trace: bool) {
    r.line(format!("P = {}", report::matrix_text(q.p())));
    r.line(format!(
        "N/L has rank {}; L' = {}",
        q.quasifan.projection.target_rank(),
        report::lattice_text(&q.quasifan.lineality)
    ));
    r.line(format!("merge steps: {}", q.quasifan.trace.len()));
    if trace {
        for (i, s) in q.quasifan.trace.iter().enumerate() {
            r.line(format!(
                "  {}: tau = {}, tau' = {}, rho' = {} -> {}",
                i + 1,
                s.tau,
                s.tau_prime,
                s.rho_prime,
                s.merged
            ));
        }
    }
    r.line(format!(
        "quotient fan in rank {} ({} maximal cones):",
        q.fan.ambient_rank(),
        q.fan.max_cones().len()
    ));
    for c in q.fan.max_cones() {
        r.line(format!("  {c}"));
    }
}

pub fn run(command: &Command, doc: &Document, warnings: Vec<String>) -> Result<Report> {
    let verb = command.verb();
    match command {
        Command::Quotient { inputs, flags } => {
            let mut res = Resolved::new(inputs);
            let (sname, system) = res.system(doc, inputs)?;
            let (lname, l) = res.sublattice(doc, inputs)?;
            let q = separated_toric_quotient_with(&system, &l, &options(flags))?;
            let mut r = Report::new(verb, res.inputs);
            r.line(format!("quotient of {sname} by {lname}"));
            describe_quotient(&mut r, &q, !flags.no_trace);
            r.result = quotient_result(&q);
            if !flags.no_trace {
                r.trace = trace_value(&q);
            }
            Ok(r)
        }
        Command::Certify { inputs, flags } => {
            let mut res = Resolved::new(inputs);
            let (sname, system) = res.system(doc, inputs)?;
            let (lname, l) = res.sublattice(doc, inputs)?;
            let c = certify_categorical_with(&system, &l, &options(flags))?;
            let mut r = Report::new(verb, res.inputs);
            let reasons: Vec<&str> = c.reasons.iter().map(|x| x.name()).collect();
            r.line(format!("certification of the quotient of {sname} by {lname}"));
            r.line(format!("verdict: {}", c.verdict.name()));
            r.line(format!("reasons: [{}]", reasons.join(", ")));
            for (name, value) in [
                ("weakly_proper", c.weakly_proper),
                ("expected_dimension", c.expected_dimension),
                ("thm62", c.thm62),
                ("convex_support", c.convex_support),
                ("codim_le_2", c.codim_le_2),
            ] {
                r.line(format!("  {name}: {value}"));
            }
            if let Some(f) = c.weak_properness.failure() {
                if let Some(w) = &f.witness {
                    r.line(format!("  not weakly proper: {w} in {} is not hit", f.target));
                    r.witnesses.push(json!({
                        "condition": "weakly_proper",
                        "cone": report::cone(&f.target),
                        "point": report::point(w),
                    }));
                }
            }
            if let Some(f) = c.thm62_check.failure() {
                if let Some(w) = &f.witness {
                    r.line(format!("  thm62 fails: {w} lies in the preimage of a quotient cone but outside P(|S|)"));
                    r.witnesses.push(json!({
                        "condition": "thm62",
                        "cone": report::cone(&f.target),
                        "point": report::point(w),
                    }));
                }
            }
            r.result = json!({
                "verdict": c.verdict.name(),
                "reasons": reasons,
                "weakly_proper": c.weakly_proper,
                "expected_dimension": c.expected_dimension,
                "thm62": c.thm62,
                "convex_support": c.convex_support,
                "codim_le_2": c.codim_le_2,
                "fan": report::fan(&c.quotient.fan),
            });
            if !flags.no_trace {
                r.trace = trace_value(&c.quotient);
            }
            Ok(r)
        }
        Command::WeaklyProper { inputs } => {
            let mut res = Resolved::new(inputs);
            let m = res.morphism(doc, inputs)?;
            let wp = is_weakly_proper(&m)?;
            let mut r = Report::new(verb, res.inputs);
            r.line(format!("weakly proper: {}", wp.weakly_proper));
            if let Some(f) = wp.failure() {
                if let Some(w) = &f.witness {
                    r.line(format!("  {w} in {} is not in the image", f.target));
                    r.witnesses.push(json!({
                        "cone": report::cone(&f.target),
                        "point": report::point(w),
                    }));
                }
            }
            r.result = json!({"weakly_proper": wp.weakly_proper});
            Ok(r)
        }
        Command::Classes { inputs } => {
            let mut res = Resolved::new(inputs);
            let m = res.morphism(doc, inputs)?;
            let classes = equivalence_classes(&m)?;
            let mut r = Report::new(verb, res.inputs);
            let mut out = Vec::new();
            r.line(format!("{} classes", classes.classes.len()));
            for class in classes.classes.values() {
                r.line(format!("over {}:", class.target));
                for c in &class.members {
                    r.line(format!("  {c}"));
                }
                r.line(format!("  support lattice {}", report::lattice_text(&class.support_lattice)));
                out.push(json!({
                    "target": report::cone(&class.target),
                    "members": report::cones(&class.members),
                    "support_lattice": report::lattice(&class.support_lattice),
                }));
            }
            r.result = json!({"classes": out});
            Ok(r)
        }
        Command::Fibers { inputs, cone } => {
            let mut res = Resolved::new(inputs);
            let m = res.morphism(doc, inputs)?;
            res.insert("cone", json!(cone));
            let target = doc.cone(cone)?;
            let fd = fiber_data(&m, target)?;
            let mut r = Report::new(verb, res.inputs);
            r.line(format!("fiber over {}", fd.target_cone));
            let mut orbits = Vec::new();
            for o in &fd.orbit_members {
                let charts: Vec<usize> = o.charts.iter().copied().collect();
                r.line(format!("  orbit of {} (charts {:?})", o.cone, charts));
                orbits.push(json!({"cone": report::cone(&o.cone), "charts": charts}));
            }
            r.line(format!(
                "stabilizer lattice {}",
                report::lattice_text(&fd.stabilizer_lattice)
            ));
            r.result = json!({
                "target_cone": report::cone(&fd.target_cone),
                "orbits": orbits,
                "stabilizer_lattice": report::lattice(&fd.stabilizer_lattice),
            });
            Ok(r)
        }
        Command::Factors {
            inputs,
            via_map,
            via_target,
        } => {
            let mut res = Resolved::new(inputs);
            let f = res.morphism(doc, inputs)?;
            res.insert("via_map", json!(via_map));
            res.insert("via_target", json!(via_target));
            let p = ToricMorphism::new(
                f.source().clone(),
                doc.fan(via_target)?.clone(),
                doc.map(via_map)?.clone(),
            )?;
            let fac = factors_through(&f, &p)?;
            let mut r = Report::new(verb, res.inputs);
            r.line(format!("factors: {}", fac.factors));
            match &fac.witness {
                Some(FactorizationWitness::KernelVector(v)) => {
                    r.line(format!("  {v} is killed by the second map but not the first"));
                    r.witnesses.push(json!({"kernel_vector": report::point(v)}));
                }
                Some(FactorizationWitness::ClassPair(a, b)) => {
                    r.line(format!("  {a} and {b} are identified by the second map only"));
                    r.witnesses.push(json!({"cones": [report::cone(a), report::cone(b)]}));
                }
                None => {}
            }
            r.result = json!({"factors": fac.factors});
            Ok(r)
        }
        Command::Restrict { inputs, cone } => {
            let mut res = Resolved::new(inputs);
            let (sname, system) = res.system(doc, inputs)?;
            res.insert("cone", json!(cone));
            let sigma = doc.cone(cone)?;
            let rs = restrict_to_cone(&system, sigma)?;
            let mut r = Report::new(verb, res.inputs);
            r.line(format!("restriction of {sname} to {sigma}"));
            r.line("charts:");
            for c in rs.system.charts() {
                r.line(format!("  {c}"));
            }
            r.line(format!("projection {}", report::matrix_text(&rs.projection)));
            r.line(format!("target {}", rs.target));
            r.result = json!({
                "system": io::system_value(&rs.system, None),
                "projection": report::matrix(&rs.projection),
                "target": report::cone(&rs.target),
            });
            Ok(r)
        }
        Command::Saturated { inputs, sub, flags } => {
            let mut res = Resolved::new(inputs);
            let sel = selection(doc, sub)?;
            res.insert("sub", json!(sub));
            let explicit_map = inputs.map.is_some() || inputs.target.is_some();
            let no_sublattice =
                inputs.sublattice.is_none() && doc.names_of_kind("sublattice").is_empty();
            let m = if explicit_map || no_sublattice {
                res.morphism(doc, inputs)?
            } else {
                let (_, system) = res.system(doc, inputs)?;
                let (_, l) = res.sublattice(doc, inputs)?;
                separated_toric_quotient_with(&system, &l, &options(flags))?.morphism()?
            };
            let check = is_saturated_subfan(&m, &sel)?;
            let mut r = Report::new(verb, res.inputs);
            r.line(format!("saturated: {}", check.saturated));
            if let Some((a, b)) = &check.witness {
                r.line(format!("  {a} is equivalent to {b}, which is not selected"));
                r.witnesses.push(json!({"cone": report::cone(a), "partner": report::cone(b)}));
            }
            r.result = json!({"saturated": check.saturated});
            Ok(r)
        }
        Command::Uniformity {
            inputs,
            sub,
            mode,
            flags,
        } => {
            let mut res = Resolved::new(inputs);
            let (_, system) = res.system(doc, inputs)?;
            let (_, l) = res.sublattice(doc, inputs)?;
            let sel = selection(doc, sub)?;
            res.insert("sub", json!(sub));
            let comparison = match mode {
                CompareMode::Exact => FanComparison::Exact,
                CompareMode::Unimodular => FanComparison::UpToUnimodular,
            };
            let opts = QuotientOptions {
                comparison,
                ..options(flags)
            };
            let u = uniformity_probe_with(&system, &l, &sel, &opts)?;
            let mut r = Report::new(verb, res.inputs);
            r.line(format!("equal: {}", u.equal));
            r.line("quotient of the selection:");
            for c in u.restricted.max_cones() {
                r.line(format!("  {c}"));
            }
            r.line("image in the full quotient:");
            for c in u.image.max_cones() {
                r.line(format!("  {c}"));
            }
            r.result = json!({
                "equal": u.equal,
                "mode": match mode { CompareMode::Exact => "exact", CompareMode::Unimodular => "unimodular" },
                "restricted": report::fan(&u.restricted),
                "image": report::fan(&u.image),
            });
            Ok(r)
        }
        Command::Validate { input } => {
            let mut inputs = Map::new();
            inputs.insert("file".into(), json!(input.display().to_string()));
            let mut r = Report::new(verb, inputs);
            let kinds: Map<String, Value> = doc
                .objects
                .iter()
                .map(|(k, o)| (k.clone(), json!(o.kind())))
                .collect();
            r.line(format!("valid: {} objects", doc.objects.len()));
            for (name, o) in &doc.objects {
                r.line(format!("  {name}: {}", o.kind()));
            }
            for w in &warnings {
                r.line(format!("warning: {w}"));
            }
            r.result = json!({
                "valid": true,
                "objects": kinds,
                "warnings": warnings,
                "document": io::document_value(doc),
            });
            Ok(r)
        }
    }
}
