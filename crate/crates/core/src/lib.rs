//! Dashboard provenance toolkit.
//!
//! A typed W3C-PROV graph extended with dashboard metadata (`dash:` terms) and
//! a three-layer view of a dashboard: the dashboard as a whole, its subtopics,
//! and its individual visual entities.

pub mod graph;
pub mod layering;
pub mod model;
pub mod query;
pub mod render;
pub mod scaffold;
pub mod serialization;
pub mod validation;
pub mod vocab;

pub use model::{
    ActivityRefinement, AgentRefinement, Category, DashAttributes, Element, ElementKind, EntityRefinement,
    ModelError, ProvenanceDocument, QualifiedName, Relation, RelationKind, Timestamp,
};
