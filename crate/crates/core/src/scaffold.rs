//! Skeleton documents generated from a small JSON outline of a dashboard.
//!
//! ```json
//! {
//!   "dashboardName": "COVID-19 NO BRASIL",
//!   "subtopics": [{"name": "Casos", "entities": ["Casos novos", "Casos acumulados"]}],
//!   "entities": ["Summary card"],
//!   "agents": [
//!     {"name": "Taskforce", "kind": "organization", "role": "Developer", "delegatesTo": "SUS"},
//!     {"name": "SUS", "kind": "organization"}
//!   ]
//! }
//! ```
//!
//! `entities` at the top level are charts placed directly under the dashboard.
//! The first agent is the one the generated entities are attributed to.

use std::collections::{BTreeMap, BTreeSet};

use serde::Deserialize;
use thiserror::Error;

use crate::model::{
    ActivityRefinement, AgentRefinement, Element, EntityRefinement, ModelError, ProvenanceDocument, QualifiedName,
    Relation, RelationKind,
};

pub const SCAFFOLD_PREFIX: &str = "ex";
pub const SCAFFOLD_NAMESPACE: &str = "http://example.org/dashboard#";

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Outline {
    pub dashboard_name: String,
    #[serde(default)]
    pub subtopics: Vec<SubtopicOutline>,
    #[serde(default)]
    pub entities: Vec<String>,
    #[serde(default)]
    pub agents: Vec<AgentOutline>,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubtopicOutline {
    pub name: String,
    #[serde(default)]
    pub entities: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct AgentOutline {
    pub name: String,
    pub kind: String,
    #[serde(default)]
    pub role: Option<String>,
    #[serde(default)]
    pub delegates_to: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScaffoldError {
    #[error("malformed outline at line {line}, column {column}: {message}")]
    Malformed { line: usize, column: usize, message: String },
    #[error("the dashboard name is empty")]
    EmptyDashboardName,
    #[error("agent `{name}` has unknown kind `{kind}` (expected organization, department, person, software or agent)")]
    UnknownAgentKind { name: String, kind: String },
    #[error("agent `{name}` delegates to `{target}`, which is not an agent of the outline")]
    UnknownDelegate { name: String, target: String },
    #[error("two agents are named `{0}`")]
    DuplicateAgent(String),
    #[error(transparent)]
    Model(Box<ModelError>),
}

impl From<ModelError> for ScaffoldError {
    fn from(err: ModelError) -> Self {
        ScaffoldError::Model(Box::new(err))
    }
}

pub fn parse_outline(text: &str) -> Result<Outline, ScaffoldError> {
    serde_json::from_str(text).map_err(|e| ScaffoldError::Malformed {
        line: e.line(),
        column: e.column(),
        message: e.to_string().split(" at line").next().unwrap_or_default().to_string(),
    })
}

fn agent_kind(agent: &AgentOutline) -> Result<AgentRefinement, ScaffoldError> {
    Ok(match agent.kind.to_ascii_lowercase().as_str() {
        "organization" | "organisation" => AgentRefinement::Organization,
        "department" => AgentRefinement::Department,
        "person" => AgentRefinement::Person,
        "software" | "softwareagent" | "software-agent" => AgentRefinement::SoftwareAgent,
        "agent" | "generic" => AgentRefinement::GenericAgent,
        _ => {
            return Err(ScaffoldError::UnknownAgentKind { name: agent.name.clone(), kind: agent.kind.clone() });
        }
    })
}

/// Allocates readable, unique local names.
#[derive(Default)]
struct Ids {
    used: BTreeSet<String>,
}

impl Ids {
    fn slug(name: &str) -> String {
        let mut out = String::new();
        for c in name.chars() {
            if c.is_alphanumeric() || c == '_' {
                out.push(c);
            } else if !out.is_empty() && !out.ends_with('-') {
                out.push('-');
            }
        }
        let trimmed = out.trim_end_matches('-');
        if trimmed.is_empty() {
            "item".to_string()
        } else {
            trimmed.to_string()
        }
    }

    fn fresh(&mut self, name: &str) -> QualifiedName {
        let base = Self::slug(name);
        let mut local = base.clone();
        let mut n = 2;
        while !self.used.insert(local.clone()) {
            local = format!("{base}-{n}");
            n += 1;
        }
        QualifiedName::new(SCAFFOLD_PREFIX, local).expect("slugs are valid local names")
    }
}

/// Builds the skeleton: dashboard, subtopic collections and charts wired by
/// `hadMember`, the agents with their delegations, and one creation and
/// maintenance activity that generated every entity.
pub fn scaffold(outline: &Outline) -> Result<ProvenanceDocument, ScaffoldError> {
    if outline.dashboard_name.trim().is_empty() {
        return Err(ScaffoldError::EmptyDashboardName);
    }
    let mut doc = ProvenanceDocument::new();
    doc.declare_prefix(SCAFFOLD_PREFIX, SCAFFOLD_NAMESPACE)?;
    let mut ids = Ids::default();
    let mut relations = Vec::new();

    let dashboard = ids.fresh("dashboard");
    let activity = ids.fresh("creation-maintenance");
    doc.add_element(Element::entity(dashboard.clone(), EntityRefinement::Dashboard).with_name(&outline.dashboard_name))?;
    doc.add_element(
        Element::activity(activity.clone(), ActivityRefinement::CreationMaintenance)
            .with_name(format!("Creation and maintenance of {}", outline.dashboard_name)),
    )?;
    let mut entities = vec![dashboard.clone()];

    for subtopic in &outline.subtopics {
        let id = ids.fresh(&subtopic.name);
        doc.add_element(Element::entity(id.clone(), EntityRefinement::SubtopicCollection).with_name(&subtopic.name))?;
        relations.push(Relation::new(RelationKind::HadMember, dashboard.clone(), id.clone()));
        entities.push(id.clone());
        for chart in &subtopic.entities {
            let chart_id = ids.fresh(chart);
            doc.add_element(Element::entity(chart_id.clone(), EntityRefinement::VisualEntity).with_name(chart))?;
            relations.push(Relation::new(RelationKind::HadMember, id.clone(), chart_id.clone()));
            entities.push(chart_id);
        }
    }
    for chart in &outline.entities {
        let chart_id = ids.fresh(chart);
        doc.add_element(Element::entity(chart_id.clone(), EntityRefinement::VisualEntity).with_name(chart))?;
        relations.push(Relation::new(RelationKind::HadMember, dashboard.clone(), chart_id.clone()));
        entities.push(chart_id);
    }

    let mut agent_ids: BTreeMap<&str, QualifiedName> = BTreeMap::new();
    let mut first_agent = None;
    for agent in &outline.agents {
        let refinement = agent_kind(agent)?;
        if agent_ids.contains_key(agent.name.as_str()) {
            return Err(ScaffoldError::DuplicateAgent(agent.name.clone()));
        }
        let id = ids.fresh(&agent.name);
        let mut element = Element::agent(id.clone(), refinement).with_name(&agent.name);
        element.dash.roles.extend(agent.role.clone());
        doc.add_element(element)?;
        first_agent.get_or_insert_with(|| id.clone());
        agent_ids.insert(&agent.name, id);
    }
    for agent in &outline.agents {
        if let Some(target) = &agent.delegates_to {
            let principal = agent_ids.get(target.as_str()).ok_or_else(|| ScaffoldError::UnknownDelegate {
                name: agent.name.clone(),
                target: target.clone(),
            })?;
            relations.push(Relation::new(RelationKind::ActedOnBehalfOf, agent_ids[agent.name.as_str()].clone(), principal.clone()));
        }
    }

    for entity in &entities {
        relations.push(Relation::new(RelationKind::WasGeneratedBy, entity.clone(), activity.clone()));
    }
    if let Some(agent) = &first_agent {
        for entity in &entities {
            relations.push(Relation::new(RelationKind::WasAttributedTo, entity.clone(), agent.clone()));
        }
        relations.push(Relation::new(RelationKind::WasAssociatedWith, activity.clone(), agent.clone()));
    }
    for r in relations {
        doc.add_relation(r)?;
    }
    Ok(doc)
}
