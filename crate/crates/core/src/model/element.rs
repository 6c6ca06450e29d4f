use std::fmt;

use serde::{Deserialize, Serialize};

use super::{ModelError, QualifiedName, Timestamp};

/// The three PROV node categories.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Category {
    Entity,
    Activity,
    Agent,
}

impl Category {
    pub const ALL: [Category; 3] = [Category::Entity, Category::Activity, Category::Agent];

    pub fn as_str(self) -> &'static str {
        match self {
            Category::Entity => "Entity",
            Category::Activity => "Activity",
            Category::Agent => "Agent",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum EntityRefinement {
    Dashboard,
    SubtopicCollection,
    VisualEntity,
    DataEntity,
    GenericEntity,
}

impl EntityRefinement {
    pub const ALL: [EntityRefinement; 5] = [
        EntityRefinement::Dashboard,
        EntityRefinement::SubtopicCollection,
        EntityRefinement::VisualEntity,
        EntityRefinement::DataEntity,
        EntityRefinement::GenericEntity,
    ];

    /// Dashboards and subtopics are collections by definition.
    pub fn requires_collection(self) -> bool {
        matches!(self, EntityRefinement::Dashboard | EntityRefinement::SubtopicCollection)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum AgentRefinement {
    Organization,
    Department,
    Person,
    SoftwareAgent,
    GenericAgent,
}

impl AgentRefinement {
    pub const ALL: [AgentRefinement; 5] = [
        AgentRefinement::Organization,
        AgentRefinement::Department,
        AgentRefinement::Person,
        AgentRefinement::SoftwareAgent,
        AgentRefinement::GenericAgent,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ActivityRefinement {
    CreationMaintenance,
    Sustainability,
    DataUpdate,
    GenericActivity,
}

impl ActivityRefinement {
    pub const ALL: [ActivityRefinement; 4] = [
        ActivityRefinement::CreationMaintenance,
        ActivityRefinement::Sustainability,
        ActivityRefinement::DataUpdate,
        ActivityRefinement::GenericActivity,
    ];
}

/// Category plus the dashboard-specific refinement of an element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ElementKind {
    Entity { refinement: EntityRefinement, collection: bool },
    Agent(AgentRefinement),
    Activity(ActivityRefinement),
}

impl ElementKind {
    /// An entity kind; dashboards and subtopics are marked as collections.
    pub fn entity(refinement: EntityRefinement) -> Self {
        ElementKind::Entity { refinement, collection: refinement.requires_collection() }
    }

    pub fn collection(refinement: EntityRefinement) -> Self {
        ElementKind::Entity { refinement, collection: true }
    }

    pub fn category(&self) -> Category {
        match self {
            ElementKind::Entity { .. } => Category::Entity,
            ElementKind::Agent(_) => Category::Agent,
            ElementKind::Activity(_) => Category::Activity,
        }
    }

    pub fn is_collection(&self) -> bool {
        matches!(self, ElementKind::Entity { collection: true, .. })
    }

    pub fn entity_refinement(&self) -> Option<EntityRefinement> {
        match self {
            ElementKind::Entity { refinement, .. } => Some(*refinement),
            _ => None,
        }
    }

    /// Short label for the refinement, e.g. `Dashboard` or `SoftwareAgent`.
    pub fn refinement_label(&self) -> &'static str {
        match self {
            ElementKind::Entity { refinement, .. } => match refinement {
                EntityRefinement::Dashboard => "Dashboard",
                EntityRefinement::SubtopicCollection => "SubtopicCollection",
                EntityRefinement::VisualEntity => "VisualEntity",
                EntityRefinement::DataEntity => "DataEntity",
                EntityRefinement::GenericEntity => "GenericEntity",
            },
            ElementKind::Agent(r) => match r {
                AgentRefinement::Organization => "Organization",
                AgentRefinement::Department => "Department",
                AgentRefinement::Person => "Person",
                AgentRefinement::SoftwareAgent => "SoftwareAgent",
                AgentRefinement::GenericAgent => "GenericAgent",
            },
            ElementKind::Activity(r) => match r {
                ActivityRefinement::CreationMaintenance => "CreationMaintenance",
                ActivityRefinement::Sustainability => "Sustainability",
                ActivityRefinement::DataUpdate => "DataUpdate",
                ActivityRefinement::GenericActivity => "GenericActivity",
            },
        }
    }

    pub(crate) fn check(&self) -> Result<(), String> {
        match self {
            ElementKind::Entity { refinement, collection: false } if refinement.requires_collection() => {
                Err(format!("{refinement:?} entities must be collections"))
            }
            _ => Ok(()),
        }
    }
}

/// The `dash:` property bundle carried by every element.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DashAttributes {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub version: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub roles: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub annotations: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub contact_information: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trustworthiness: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub url: Option<String>,
    /// Attributes outside the modeled prov/dash terms, in source order.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub extensions: Vec<(QualifiedName, String)>,
}

impl DashAttributes {
    pub fn is_empty(&self) -> bool {
        *self == DashAttributes::default()
    }
}

/// Checks that `url` is absolute with a scheme and an authority.
pub fn check_url(url: &str) -> Result<(), ModelError> {
    match url::Url::parse(url) {
        Ok(parsed) if parsed.has_host() => Ok(()),
        _ => Err(ModelError::InvalidUrl(url.to_string())),
    }
}

/// One provenance node.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Element {
    pub id: QualifiedName,
    pub kind: ElementKind,
    pub dash: DashAttributes,
    pub generated_at: Option<Timestamp>,
    pub started_at: Option<Timestamp>,
    pub ended_at: Option<Timestamp>,
}

impl Element {
    pub fn new(id: QualifiedName, kind: ElementKind) -> Self {
        Self {
            id,
            kind,
            dash: DashAttributes::default(),
            generated_at: None,
            started_at: None,
            ended_at: None,
        }
    }

    pub fn entity(id: QualifiedName, refinement: EntityRefinement) -> Self {
        Self::new(id, ElementKind::entity(refinement))
    }

    pub fn agent(id: QualifiedName, refinement: AgentRefinement) -> Self {
        Self::new(id, ElementKind::Agent(refinement))
    }

    pub fn activity(id: QualifiedName, refinement: ActivityRefinement) -> Self {
        Self::new(id, ElementKind::Activity(refinement))
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.dash.name = Some(name.into());
        self
    }

    pub fn category(&self) -> Category {
        self.kind.category()
    }

    pub fn name(&self) -> Option<&str> {
        self.dash.name.as_deref()
    }

    /// Checks the kind and timestamp placement rules, but not time order.
    pub(crate) fn check_shape(&self) -> Result<(), ModelError> {
        self.kind
            .check()
            .map_err(|reason| ModelError::KindMismatch { id: self.id.clone(), reason })?;
        let category = self.category();
        if self.generated_at.is_some() && category != Category::Entity {
            return Err(ModelError::KindMismatch {
                id: self.id.clone(),
                reason: format!("generatedAtTime is only allowed on entities, not on a {category}"),
            });
        }
        if (self.started_at.is_some() || self.ended_at.is_some()) && category != Category::Activity {
            return Err(ModelError::KindMismatch {
                id: self.id.clone(),
                reason: format!("startedAtTime/endedAtTime are only allowed on activities, not on a {category}"),
            });
        }
        if let Some(url) = &self.dash.url {
            check_url(url)?;
        }
        for (key, _) in &self.dash.extensions {
            super::check_extension_key(key)?;
        }
        Ok(())
    }

    /// Full invariant check: shape plus startedAtTime <= endedAtTime.
    pub(crate) fn check(&self) -> Result<(), ModelError> {
        self.check_shape()?;
        if let (Some(start), Some(end)) = (self.started_at, self.ended_at) {
            if start > end {
                return Err(ModelError::KindMismatch {
                    id: self.id.clone(),
                    reason: format!("activity starts at {start} after it ends at {end}"),
                });
            }
        }
        Ok(())
    }
}
