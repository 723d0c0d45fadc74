//! Charts, coordinate transformations, cocycle verification and
//! global-section gluing checks, at jet level over one sampled base point
//! per overlap.
//!
//! Overlaps are modeled by centered morphisms between chart signatures;
//! the full open-cover topology is out of scope. Every check is exact in
//! the quotient, and a failing check names the first offending coordinate
//! or chart together with the leading counterexample term.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::morphism::Morphism;
use crate::series::Series;

/// A chart: an id and the signature of its superdomain.
#[derive(Debug, Clone)]
pub struct Chart {
    pub id: String,
    pub signature: crate::morphism::SuperdomainSignature,
}

/// A coordinate transformation between two charts, with both directions
/// supplied explicitly. `forward` maps the `from` chart to the `to` chart.
#[derive(Debug, Clone)]
pub struct Transition {
    pub from: String,
    pub to: String,
    pub forward: Morphism,
    pub backward: Morphism,
}

/// Charts plus transitions, validated for referential consistency.
#[derive(Debug, Clone)]
pub struct Atlas {
    charts: Vec<Chart>,
    transitions: Vec<Transition>,
}

/// Per-chart local expressions of one candidate global section.
#[derive(Debug, Clone)]
pub struct SectionWitness {
    pub name: String,
    pub locals: BTreeMap<String, Series>,
}

/// Outcome of a single verification step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckReport {
    pub label: String,
    pub failure: Option<String>,
}

impl CheckReport {
    fn pass(label: impl Into<String>) -> Self {
        CheckReport {
            label: label.into(),
            failure: None,
        }
    }

    fn fail(label: impl Into<String>, detail: impl Into<String>) -> Self {
        CheckReport {
            label: label.into(),
            failure: Some(detail.into()),
        }
    }

    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.failure {
            None => write!(f, "PASS {}", self.label),
            Some(detail) => write!(f, "FAIL {}: {}", self.label, detail),
        }
    }
}

impl Atlas {
    pub fn new(charts: Vec<Chart>, transitions: Vec<Transition>) -> Result<Self> {
        let mut seen = std::collections::BTreeSet::new();
        for c in &charts {
            if !seen.insert(c.id.clone()) {
                return Err(Error::DuplicateChart { id: c.id.clone() });
            }
        }
        let atlas = Atlas {
            charts,
            transitions,
        };
        for t in &atlas.transitions {
            let from = atlas.chart(&t.from)?;
            let to = atlas.chart(&t.to)?;
            if t.forward.source().formal() != from.signature.formal()
                || t.forward.target().formal() != to.signature.formal()
                || t.backward.source().formal() != to.signature.formal()
                || t.backward.target().formal() != from.signature.formal()
            {
                return Err(Error::SignatureMismatch);
            }
        }
        Ok(atlas)
    }

    pub fn charts(&self) -> &[Chart] {
        &self.charts
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn chart(&self, id: &str) -> Result<&Chart> {
        self.charts
            .iter()
            .find(|c| c.id == id)
            .ok_or_else(|| Error::MissingChart { id: id.to_string() })
    }

    /// The stored morphism from one chart to another, looking through both
    /// directions of the transitions.
    pub fn morphism(&self, from: &str, to: &str) -> Option<&Morphism> {
        for t in &self.transitions {
            if t.from == from && t.to == to {
                return Some(&t.forward);
            }
            if t.from == to && t.to == from {
                return Some(&t.backward);
            }
        }
        None
    }

    fn require_morphism(&self, from: &str, to: &str) -> Result<&Morphism> {
        self.morphism(from, to).ok_or_else(|| Error::MissingTransition {
            from: from.to_string(),
            to: to.to_string(),
        })
    }
}

/// Jet composition that survives empty base tuples: a jet over zero
/// variables composed with no arguments is its constant, embedded in the
/// requested variable count.
fn compose_base(
    jet: &crate::jet::Jet,
    args: &[crate::jet::Jet],
    vars: usize,
    order: usize,
) -> Result<crate::jet::Jet> {
    if args.is_empty() {
        return Ok(crate::jet::Jet::constant(vars, order, jet.constant_term()));
    }
    jet.compose(args)
}

/// Coordinate labels of a morphism's target, in pullback order.
fn coordinate_labels(m: &Morphism) -> Vec<String> {
    let tgt = m.target().formal();
    (1..=tgt.base_vars())
        .map(|i| format!("x{i}"))
        .chain((1..=tgt.formal_vars()).map(|a| format!("t{a}")))
        .collect()
}

/// First coordinate on which two parallel morphisms disagree, with the
/// leading term of the difference.
fn first_coordinate_defect(got: &Morphism, expected: &Morphism) -> Option<String> {
    let labels = coordinate_labels(expected);
    let pairs = got
        .base_pullbacks()
        .iter()
        .chain(got.formal_pullbacks())
        .zip(expected.base_pullbacks().iter().chain(expected.formal_pullbacks()));
    for (label, (g, e)) in labels.iter().zip(pairs) {
        let diff = g.sub(e).expect("parallel morphisms share the signature");
        if !diff.is_zero() {
            return Some(format!(
                "coordinate {label}: off by leading term {}",
                crate::display::leading_term(&diff)
            ));
        }
    }
    None
}

/// Verifies that the two directions of a transition are mutually inverse
/// in the quotient and that the induced base jets are mutually inverse.
pub fn check_transition(t: &Transition) -> Result<CheckReport> {
    let label = format!("transition {} <-> {}", t.from, t.to);
    if t.forward.source().formal() != t.backward.target().formal()
        || t.forward.target().formal() != t.backward.source().formal()
    {
        return Err(Error::SignatureMismatch);
    }

    let round_from = t.forward.compose(&t.backward)?;
    let id_from = Morphism::identity(t.forward.source());
    if round_from != id_from {
        let detail = first_coordinate_defect(&round_from, &id_from)
            .unwrap_or_else(|| "round trip differs".into());
        return Ok(CheckReport::fail(label, format!("{} -> {} -> {}: {detail}", t.from, t.to, t.from)));
    }
    let round_to = t.backward.compose(&t.forward)?;
    let id_to = Morphism::identity(t.backward.source());
    if round_to != id_to {
        let detail = first_coordinate_defect(&round_to, &id_to)
            .unwrap_or_else(|| "round trip differs".into());
        return Ok(CheckReport::fail(label, format!("{} -> {} -> {}: {detail}", t.to, t.from, t.to)));
    }

    // Base-level round trips of the induced jets.
    let from_formal = t.forward.source().formal();
    let to_formal = t.backward.source().formal();
    for (i, g) in t.backward.base_map().iter().enumerate() {
        let composed = compose_base(
            g,
            t.forward.base_map(),
            from_formal.base_vars(),
            from_formal.order(),
        )?;
        let coord =
            crate::jet::Jet::variable(from_formal.base_vars(), from_formal.order(), i + 1)?;
        if composed != coord {
            return Ok(CheckReport::fail(
                label,
                format!("base jet x{} does not return to itself", i + 1),
            ));
        }
    }
    for (j, f) in t.forward.base_map().iter().enumerate() {
        let composed = compose_base(
            f,
            t.backward.base_map(),
            to_formal.base_vars(),
            to_formal.order(),
        )?;
        let coord = crate::jet::Jet::variable(to_formal.base_vars(), to_formal.order(), j + 1)?;
        if composed != coord {
            return Ok(CheckReport::fail(
                label,
                format!("base jet x{} does not return to itself", j + 1),
            ));
        }
    }
    Ok(CheckReport::pass(label))
}

/// Verifies the cocycle condition on one ordered chart triple: going
/// `alpha -> gamma -> beta` agrees with the direct `alpha -> beta`.
pub fn check_cocycle(atlas: &Atlas, alpha: &str, beta: &str, gamma: &str) -> Result<CheckReport> {
    let label = format!("cocycle {alpha} -> {gamma} -> {beta}");
    atlas.chart(alpha)?;
    atlas.chart(beta)?;
    atlas.chart(gamma)?;
    let via_first = atlas.require_morphism(alpha, gamma)?;
    let via_second = atlas.require_morphism(gamma, beta)?;
    let direct = atlas.require_morphism(alpha, beta)?;
    let composed = via_first.compose(via_second)?;
    if composed == *direct {
        Ok(CheckReport::pass(label))
    } else {
        let detail = first_coordinate_defect(&composed, direct)
            .unwrap_or_else(|| "composite differs".into());
        Ok(CheckReport::fail(label, detail))
    }
}

/// Verifies that the local expressions of a candidate global section glue:
/// across every transition the pullback of the far expression equals the
/// near one, and the projected base jets are compatible.
pub fn check_global_section(atlas: &Atlas, witness: &SectionWitness) -> Result<Vec<CheckReport>> {
    let mut reports = Vec::new();
    for t in atlas.transitions() {
        let label = format!("section {} over {} <- {}", witness.name, t.from, t.to);
        let near = witness
            .locals
            .get(&t.from)
            .ok_or_else(|| Error::MissingWitnessEntry { id: t.from.clone() })?;
        let far = witness
            .locals
            .get(&t.to)
            .ok_or_else(|| Error::MissingWitnessEntry { id: t.to.clone() })?;
        let pulled = t.forward.pullback(far)?;
        if pulled != *near {
            let diff = pulled.sub(near)?;
            reports.push(CheckReport::fail(
                label,
                format!(
                    "pullback disagrees, leading term {}",
                    crate::display::leading_term(&diff)
                ),
            ));
            continue;
        }
        // Projections glue: projecting the pullback equals composing the
        // projected far expression with the base map.
        let src = t.forward.source().formal();
        let lhs = pulled.base_projection();
        let rhs = compose_base(
            &far.base_projection(),
            t.forward.base_map(),
            src.base_vars(),
            src.order(),
        )?;
        if lhs != rhs {
            reports.push(CheckReport::fail(label, "base projections do not glue"));
            continue;
        }
        reports.push(CheckReport::pass(label));
    }
    Ok(reports)
}

/// Runs every transition check, every cocycle on ordered triples of
/// distinct charts whose morphisms are all present, and every witness.
pub fn run_all_checks(atlas: &Atlas, witnesses: &[SectionWitness]) -> Result<Vec<CheckReport>> {
    let mut reports = Vec::new();
    for t in atlas.transitions() {
        reports.push(check_transition(t)?);
    }
    let ids: Vec<&str> = atlas.charts().iter().map(|c| c.id.as_str()).collect();
    for &a in &ids {
        for &b in &ids {
            for &c in &ids {
                if a == b || b == c || a == c {
                    continue;
                }
                let all_present = atlas.morphism(a, c).is_some()
                    && atlas.morphism(c, b).is_some()
                    && atlas.morphism(a, b).is_some();
                if all_present {
                    reports.push(check_cocycle(atlas, a, b, c)?);
                }
            }
        }
    }
    for w in witnesses {
        reports.extend(check_global_section(atlas, w)?);
    }
    Ok(reports)
}
