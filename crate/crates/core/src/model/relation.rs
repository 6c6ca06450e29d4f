use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{Category, QualifiedName, Timestamp};

/// The relation kinds of the dashboard model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RelationKind {
    WasGeneratedBy,
    WasDerivedFrom,
    HadPrimarySource,
    WasAttributedTo,
    Used,
    WasAssociatedWith,
    ActedOnBehalfOf,
    HadMember,
}

impl RelationKind {
    pub const ALL: [RelationKind; 8] = [
        RelationKind::WasGeneratedBy,
        RelationKind::WasDerivedFrom,
        RelationKind::HadPrimarySource,
        RelationKind::WasAttributedTo,
        RelationKind::Used,
        RelationKind::WasAssociatedWith,
        RelationKind::ActedOnBehalfOf,
        RelationKind::HadMember,
    ];

    /// Required (subject, object) categories. `HadMember` additionally needs
    /// a collection subject; see [`RelationKind::requires_collection_subject`].
    pub fn signature(self) -> (Category, Category) {
        use Category::*;
        match self {
            RelationKind::WasGeneratedBy => (Entity, Activity),
            RelationKind::WasDerivedFrom => (Entity, Entity),
            RelationKind::HadPrimarySource => (Entity, Entity),
            RelationKind::WasAttributedTo => (Entity, Agent),
            RelationKind::Used => (Activity, Entity),
            RelationKind::WasAssociatedWith => (Activity, Agent),
            RelationKind::ActedOnBehalfOf => (Agent, Agent),
            RelationKind::HadMember => (Entity, Entity),
        }
    }

    pub fn requires_collection_subject(self) -> bool {
        self == RelationKind::HadMember
    }

    /// The PROV term, also used as the PROV-JSON bucket name.
    pub fn term(self) -> &'static str {
        match self {
            RelationKind::WasGeneratedBy => "wasGeneratedBy",
            RelationKind::WasDerivedFrom => "wasDerivedFrom",
            RelationKind::HadPrimarySource => "hadPrimarySource",
            RelationKind::WasAttributedTo => "wasAttributedTo",
            RelationKind::Used => "used",
            RelationKind::WasAssociatedWith => "wasAssociatedWith",
            RelationKind::ActedOnBehalfOf => "actedOnBehalfOf",
            RelationKind::HadMember => "hadMember",
        }
    }

    /// Capitalized form used as the type of a standalone relation record.
    pub fn record_type(self) -> &'static str {
        match self {
            RelationKind::WasGeneratedBy => "WasGeneratedBy",
            RelationKind::WasDerivedFrom => "WasDerivedFrom",
            RelationKind::HadPrimarySource => "HadPrimarySource",
            RelationKind::WasAttributedTo => "WasAttributedTo",
            RelationKind::Used => "Used",
            RelationKind::WasAssociatedWith => "WasAssociatedWith",
            RelationKind::ActedOnBehalfOf => "ActedOnBehalfOf",
            RelationKind::HadMember => "HadMember",
        }
    }

    /// PROV-JSON role keys (without the `prov:` prefix) for subject and object.
    pub fn roles(self) -> (&'static str, &'static str) {
        match self {
            RelationKind::WasGeneratedBy => ("entity", "activity"),
            RelationKind::WasDerivedFrom | RelationKind::HadPrimarySource => {
                ("generatedEntity", "usedEntity")
            }
            RelationKind::WasAttributedTo => ("entity", "agent"),
            RelationKind::Used => ("activity", "entity"),
            RelationKind::WasAssociatedWith => ("activity", "agent"),
            RelationKind::ActedOnBehalfOf => ("delegate", "responsible"),
            RelationKind::HadMember => ("collection", "entity"),
        }
    }

    pub fn from_term(term: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.term() == term)
    }

    pub fn from_record_type(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.record_type() == name)
    }
}

impl fmt::Display for RelationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.term())
    }
}

impl FromStr for RelationKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::from_term(s)
            .or_else(|| Self::from_record_type(s))
            .ok_or_else(|| format!("unknown relation kind `{s}`"))
    }
}

/// One typed, directed edge between two element identifiers.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Relation {
    pub kind: RelationKind,
    pub subject: QualifiedName,
    pub object: QualifiedName,
    pub at_time: Option<Timestamp>,
    pub attributes: Vec<(QualifiedName, String)>,
}

impl Relation {
    pub fn new(kind: RelationKind, subject: QualifiedName, object: QualifiedName) -> Self {
        Self { kind, subject, object, at_time: None, attributes: Vec::new() }
    }

    /// True when the relation carries a time or extra attributes.
    pub fn is_qualified(&self) -> bool {
        self.at_time.is_some() || !self.attributes.is_empty()
    }
}
