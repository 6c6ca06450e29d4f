//! Rule-based checks over a document.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::graph;
use crate::layering::{self, LayerError};
use crate::model::{
    signature_error, Category, EntityRefinement, ProvenanceDocument, QualifiedName, RelationKind,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValidationError {
    #[error("unknown profile `{0}` (expected core or dashboard-strict)")]
    UnknownProfile(String),
    #[error("unknown rule `{0}` (rules are R1 to R10)")]
    UnknownRule(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Severity {
    Info,
    Warning,
    Error,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Info => "info",
            Severity::Warning => "warning",
            Severity::Error => "error",
        })
    }
}

/// Stable rule identifier, `R1` through `R10`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RuleId(u8);

impl RuleId {
    pub const ALL: [RuleId; 10] = [
        RuleId(1),
        RuleId(2),
        RuleId(3),
        RuleId(4),
        RuleId(5),
        RuleId(6),
        RuleId(7),
        RuleId(8),
        RuleId(9),
        RuleId(10),
    ];

    pub fn new(n: u8) -> Option<RuleId> {
        (1..=10).contains(&n).then_some(RuleId(n))
    }

    pub fn number(self) -> u8 {
        self.0
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "R{}", self.0)
    }
}

impl FromStr for RuleId {
    type Err = ValidationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.strip_prefix(['R', 'r'])
            .and_then(|n| n.parse::<u8>().ok())
            .and_then(RuleId::new)
            .ok_or_else(|| ValidationError::UnknownRule(s.to_string()))
    }
}

impl Serialize for RuleId {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Diagnostic {
    pub rule_id: RuleId,
    pub severity: Severity,
    pub subjects: Vec<QualifiedName>,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}] {}", self.severity, self.rule_id, self.message)?;
        if !self.subjects.is_empty() {
            let subjects: Vec<String> = self.subjects.iter().map(ToString::to_string).collect();
            write!(f, " ({})", subjects.join(", "))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Profile {
    pub name: String,
    pub enabled_rules: BTreeSet<RuleId>,
    pub severity_overrides: BTreeMap<RuleId, Severity>,
}

pub const PROFILE_NAMES: [&str; 2] = ["core", "dashboard-strict"];

impl Profile {
    /// Structural PROV rules only.
    pub fn core() -> Self {
        Profile {
            name: "core".into(),
            enabled_rules: RULES.iter().filter(|r| r.core).map(|r| r.id).collect(),
            severity_overrides: BTreeMap::new(),
        }
    }

    /// Every rule, including the dashboard-model expectations.
    pub fn dashboard_strict() -> Self {
        Profile {
            name: "dashboard-strict".into(),
            enabled_rules: RuleId::ALL.into_iter().collect(),
            severity_overrides: BTreeMap::new(),
        }
    }

    pub fn from_name(name: &str) -> Result<Self, ValidationError> {
        match name {
            "core" => Ok(Self::core()),
            "dashboard-strict" => Ok(Self::dashboard_strict()),
            other => Err(ValidationError::UnknownProfile(other.to_string())),
        }
    }
}

impl FromStr for Profile {
    type Err = ValidationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Profile::from_name(s)
    }
}

struct RuleInfo {
    id: RuleId,
    title: &'static str,
    severity: &'static str,
    core: bool,
    description: &'static str,
    motivation: &'static str,
    check: fn(&ProvenanceDocument, &mut Sink),
}

static RULES: [RuleInfo; 10] = [
    RuleInfo {
        id: RuleId(1),
        title: "endpoint signature",
        severity: "error",
        core: true,
        description: "Every relation must connect elements of the categories its kind allows, and hadMember must start at a collection.",
        motivation: "Relations carry meaning only between the right kinds of element: an activity generates an entity, an agent is responsible for an entity or activity.",
        check: check_signatures,
    },
    RuleInfo {
        id: RuleId(2),
        title: "activity time order",
        severity: "error",
        core: true,
        description: "An activity's startedAtTime must not be later than its endedAtTime.",
        motivation: "Start and end times of activities such as data updates tell readers when content changed; a reversed span is a recording error.",
        check: check_time_order,
    },
    RuleInfo {
        id: RuleId(3),
        title: "derivation cycle",
        severity: "error",
        core: true,
        description: "wasDerivedFrom and hadPrimarySource together must form an acyclic graph.",
        motivation: "Lineage questions (which data does this chart come from?) must have finite answers within one document snapshot.",
        check: check_derivation_cycles,
    },
    RuleInfo {
        id: RuleId(4),
        title: "membership shape",
        severity: "error",
        core: false,
        description: "There is exactly one Dashboard entity, hadMember is acyclic, and collections nest at most two levels below the dashboard.",
        motivation: "Dashboard provenance is read at three levels of detail: the dashboard, its subtopics, and individual visual entities.",
        check: check_membership_shape,
    },
    RuleInfo {
        id: RuleId(5),
        title: "metadata completeness",
        severity: "error for a missing name, warning otherwise",
        core: true,
        description: "Every element carries dash:name; the Dashboard entity should carry description, version and url; every agent should carry role and url.",
        motivation: "Names, versions, roles and links are what let a reader judge the reliability and quality of what a dashboard shows.",
        check: check_metadata,
    },
    RuleInfo {
        id: RuleId(6),
        title: "delegation cycle",
        severity: "error",
        core: true,
        description: "actedOnBehalfOf must be acyclic.",
        motivation: "Delegation expresses an organizational hierarchy of responsibility, which has a top.",
        check: check_delegation_cycles,
    },
    RuleInfo {
        id: RuleId(7),
        title: "dangling reference",
        severity: "error",
        core: true,
        description: "Both endpoints of every relation must be elements of the document.",
        motivation: "A relation to an undeclared element cannot be interpreted or displayed.",
        check: check_dangling,
    },
    RuleInfo {
        id: RuleId(8),
        title: "orphan element",
        severity: "warning",
        core: false,
        description: "Every element should take part in at least one relation.",
        motivation: "An element detached from the graph adds no provenance information about the dashboard.",
        check: check_orphans,
    },
    RuleInfo {
        id: RuleId(9),
        title: "duplicate membership",
        severity: "warning",
        core: false,
        description: "The same (collection, member) hadMember pair should not be repeated.",
        motivation: "A repeated member usually signals a copy error in the member list of a dashboard or subtopic.",
        check: check_duplicate_members,
    },
    RuleInfo {
        id: RuleId(10),
        title: "unsourced data entity",
        severity: "warning",
        core: false,
        description: "Every DataEntity should have a hadPrimarySource or wasAttributedTo relation.",
        motivation: "Data-source transparency: many dashboards do not tell their users where the displayed data comes from.",
        check: check_data_sources,
    },
];

fn rule(id: RuleId) -> &'static RuleInfo {
    &RULES[usize::from(id.0) - 1]
}

struct Sink {
    rule: RuleId,
    out: Vec<Diagnostic>,
}

impl Sink {
    fn push(&mut self, severity: Severity, subjects: Vec<QualifiedName>, message: String) {
        self.out.push(Diagnostic { rule_id: self.rule, severity, subjects, message });
    }
}

/// Runs the profile's rules. The result is ordered by severity (most severe
/// first), rule number, then subjects.
pub fn validate(doc: &ProvenanceDocument, profile: &Profile) -> Vec<Diagnostic> {
    let mut all = Vec::new();
    for &id in &profile.enabled_rules {
        let mut sink = Sink { rule: id, out: Vec::new() };
        (rule(id).check)(doc, &mut sink);
        if let Some(&severity) = profile.severity_overrides.get(&id) {
            sink.out.iter_mut().for_each(|d| d.severity = severity);
        }
        all.extend(sink.out);
    }
    all.sort_by(|a, b| {
        b.severity
            .cmp(&a.severity)
            .then(a.rule_id.cmp(&b.rule_id))
            .then_with(|| a.subjects.cmp(&b.subjects))
            .then_with(|| a.message.cmp(&b.message))
    });
    all
}

pub fn has_errors(diagnostics: &[Diagnostic]) -> bool {
    diagnostics.iter().any(|d| d.severity == Severity::Error)
}

/// One line per diagnostic followed by a count summary.
pub fn text_report(diagnostics: &[Diagnostic]) -> String {
    let mut out = String::new();
    for d in diagnostics {
        out.push_str(&d.to_string());
        out.push('\n');
    }
    let count = |s: Severity| diagnostics.iter().filter(|d| d.severity == s).count();
    let plural = |n: usize, word: &str| format!("{n} {word}{}", if n == 1 { "" } else { "s" });
    out.push_str(&format!(
        "{}, {}, {}\n",
        plural(count(Severity::Error), "error"),
        plural(count(Severity::Warning), "warning"),
        plural(count(Severity::Info), "info")
    ));
    out
}

pub fn json_report(diagnostics: &[Diagnostic]) -> String {
    serde_json::to_string_pretty(diagnostics).expect("diagnostics serialize")
}

/// Description, severity, profiles and motivation of a rule.
pub fn explain_rule(id: &str) -> Result<String, ValidationError> {
    let info = rule(id.parse()?);
    let profiles = if info.core { "core, dashboard-strict" } else { "dashboard-strict" };
    let mut text = format!(
        "{} {}\n  {}\n  severity: {}\n  profiles: {}\n  motivation: {}\n",
        info.id, info.title, info.description, info.severity, profiles, info.motivation
    );
    if info.id == RuleId(1) {
        text.push_str("  signatures:\n");
        for kind in RelationKind::ALL {
            let (s, o) = kind.signature();
            let note = if kind.requires_collection_subject() { " (subject must be a collection)" } else { "" };
            text.push_str(&format!("    {kind}: {s} -> {o}{note}\n"));
        }
    }
    Ok(text)
}

fn check_signatures(doc: &ProvenanceDocument, sink: &mut Sink) {
    for r in doc.relations() {
        let (Some(s), Some(o)) = (doc.element(&r.subject), doc.element(&r.object)) else {
            continue;
        };
        if let Some(err) = signature_error(r, s, o) {
            sink.push(Severity::Error, vec![r.subject.clone(), r.object.clone()], err.to_string());
        }
    }
}

fn check_time_order(doc: &ProvenanceDocument, sink: &mut Sink) {
    for a in doc.elements_of(Category::Activity) {
        if let (Some(start), Some(end)) = (a.started_at, a.ended_at) {
            if start > end {
                sink.push(
                    Severity::Error,
                    vec![a.id.clone()],
                    format!("activity starts at {start} but ends earlier, at {end}"),
                );
            }
        }
    }
}

fn check_derivation_cycles(doc: &ProvenanceDocument, sink: &mut Sink) {
    for cycle in graph::cycles(doc, &[RelationKind::WasDerivedFrom, RelationKind::HadPrimarySource]) {
        let message = format!("derivation cycle through {}", join(&cycle));
        sink.push(Severity::Error, cycle, message);
    }
}

fn check_membership_shape(doc: &ProvenanceDocument, sink: &mut Sink) {
    let root = match layering::root_dashboard(doc) {
        Ok(root) => Some(root),
        Err(err) => {
            let subjects = match &err {
                LayerError::MultipleRootDashboards(roots) => roots.clone(),
                _ => Vec::new(),
            };
            sink.push(Severity::Error, subjects, err.to_string());
            None
        }
    };
    let cycles = layering::membership_cycles(doc);
    for cycle in &cycles {
        sink.push(Severity::Error, cycle.clone(), LayerError::MembershipCycle(cycle.clone()).to_string());
    }
    let (Some(root), true) = (root, cycles.is_empty()) else {
        return;
    };
    let children = graph::successors(doc, &[RelationKind::HadMember]);
    let step = |from: &BTreeSet<QualifiedName>| -> BTreeSet<QualifiedName> {
        from.iter().filter_map(|id| children.get(id)).flatten().filter(|id| doc.contains(id)).cloned().collect()
    };
    let depth1 = step(&BTreeSet::from([root]));
    let depth2 = step(&depth1);
    for id in depth2.iter().filter(|id| doc.element(id).is_some_and(|e| e.kind.is_collection())) {
        sink.push(Severity::Error, vec![id.clone()], format!("collection `{id}` is nested two levels below the dashboard"));
    }
    for id in step(&depth2) {
        let message = LayerError::DepthExceeded(id.clone()).to_string();
        sink.push(Severity::Error, vec![id], message);
    }
}

fn check_metadata(doc: &ProvenanceDocument, sink: &mut Sink) {
    for e in doc.elements() {
        if e.dash.name.as_deref().is_none_or(|n| n.trim().is_empty()) {
            sink.push(Severity::Error, vec![e.id.clone()], format!("{} has no dash:name", e.category()));
        }
        let mut missing = Vec::new();
        let d = &e.dash;
        if e.kind.entity_refinement() == Some(EntityRefinement::Dashboard) {
            if d.description.is_none() {
                missing.push("dash:description");
            }
            if d.version.is_none() {
                missing.push("dash:version");
            }
            if d.url.is_none() {
                missing.push("dash:url");
            }
        }
        if e.category() == Category::Agent {
            if d.roles.is_empty() {
                missing.push("dash:role");
            }
            if d.url.is_none() {
                missing.push("dash:url");
            }
        }
        if !missing.is_empty() {
            let what = if e.category() == Category::Agent { "agent" } else { "dashboard" };
            sink.push(Severity::Warning, vec![e.id.clone()], format!("{what} is missing {}", missing.join(", ")));
        }
    }
}

fn check_delegation_cycles(doc: &ProvenanceDocument, sink: &mut Sink) {
    for cycle in graph::cycles(doc, &[RelationKind::ActedOnBehalfOf]) {
        let message = format!("delegation cycle through {}", join(&cycle));
        sink.push(Severity::Error, cycle, message);
    }
}

fn check_dangling(doc: &ProvenanceDocument, sink: &mut Sink) {
    for r in doc.relations() {
        for (end, id) in [("subject", &r.subject), ("object", &r.object)] {
            if !doc.contains(id) {
                sink.push(
                    Severity::Error,
                    vec![r.subject.clone(), r.object.clone()],
                    format!("{} {end} `{id}` is not an element of the document", r.kind),
                );
            }
        }
    }
}

fn check_orphans(doc: &ProvenanceDocument, sink: &mut Sink) {
    let connected: BTreeSet<&QualifiedName> = doc.relations().iter().flat_map(|r| [&r.subject, &r.object]).collect();
    for e in doc.elements().filter(|e| !connected.contains(&e.id)) {
        sink.push(Severity::Warning, vec![e.id.clone()], format!("{} takes part in no relation", e.category()));
    }
}

fn check_duplicate_members(doc: &ProvenanceDocument, sink: &mut Sink) {
    let mut counts: BTreeMap<(&QualifiedName, &QualifiedName), usize> = BTreeMap::new();
    for r in doc.relations_of(RelationKind::HadMember) {
        *counts.entry((&r.subject, &r.object)).or_default() += 1;
    }
    for ((collection, member), n) in counts.into_iter().filter(|(_, n)| *n > 1) {
        sink.push(
            Severity::Warning,
            vec![collection.clone(), member.clone()],
            format!("`{member}` is listed {n} times as a member of `{collection}`"),
        );
    }
}

fn check_data_sources(doc: &ProvenanceDocument, sink: &mut Sink) {
    let sourced: BTreeSet<&QualifiedName> = doc
        .relations()
        .iter()
        .filter(|r| matches!(r.kind, RelationKind::HadPrimarySource | RelationKind::WasAttributedTo))
        .map(|r| &r.subject)
        .collect();
    for e in doc.elements_of(Category::Entity) {
        if e.kind.entity_refinement() == Some(EntityRefinement::DataEntity) && !sourced.contains(&e.id) {
            sink.push(
                Severity::Warning,
                vec![e.id.clone()],
                "data entity has neither a primary source nor an attributed agent".into(),
            );
        }
    }
}

fn join(ids: &[QualifiedName]) -> String {
    ids.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}
