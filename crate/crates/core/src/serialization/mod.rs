//! Readers and writers for the two interchange formats: a PROV-JSON profile
//! and a constrained Turtle profile.

mod provjson;
mod turtle;

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{ProvenanceDocument, QualifiedName};
use crate::vocab;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FormatId {
    ProvJson,
    TurtleProfile,
}

impl FormatId {
    pub fn extension(self) -> &'static str {
        match self {
            FormatId::ProvJson => "provjson",
            FormatId::TurtleProfile => "ttl",
        }
    }

    /// Format implied by a file extension (`.provjson` or `.ttl`).
    pub fn from_path(path: &Path) -> Option<FormatId> {
        match path.extension()?.to_str()? {
            "provjson" => Some(FormatId::ProvJson),
            "ttl" => Some(FormatId::TurtleProfile),
            _ => None,
        }
    }
}

impl fmt::Display for FormatId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FormatId::ProvJson => "PROV-JSON",
            FormatId::TurtleProfile => "Turtle",
        })
    }
}

impl FromStr for FormatId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "provjson" | "prov-json" | "json" => Ok(FormatId::ProvJson),
            "ttl" | "turtle" => Ok(FormatId::TurtleProfile),
            other => Err(format!("unknown format `{other}` (expected provjson or ttl)")),
        }
    }
}

/// A positioned parse failure. Line and column are 1-based; columns count
/// characters, not bytes.
#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[error("{format} parse error at line {line}, column {column}: expected {expected}, found {found}")]
pub struct ParseError {
    pub format: FormatId,
    pub line: usize,
    pub column: usize,
    pub expected: String,
    pub found: String,
}

/// Parses `input` in the given format.
///
/// Relation endpoints are not required to resolve and relation signatures and
/// activity time order are not enforced here; the validator reports those.
pub fn parse(input: &[u8], format: FormatId) -> Result<ProvenanceDocument, ParseError> {
    let text = std::str::from_utf8(input).map_err(|err| {
        let valid = &input[..err.valid_up_to()];
        let valid = std::str::from_utf8(valid).expect("prefix is valid UTF-8");
        let (line, column) = position_after(valid);
        ParseError {
            format,
            line,
            column,
            expected: "UTF-8 text".into(),
            found: format!("invalid byte 0x{:02x}", input[err.valid_up_to()]),
        }
    })?;
    match format {
        FormatId::ProvJson => provjson::parse(text),
        FormatId::TurtleProfile => turtle::parse(text),
    }
}

/// Serializes `doc`. Output is deterministic, UTF-8, LF line endings.
pub fn write(doc: &ProvenanceDocument, format: FormatId) -> Vec<u8> {
    match format {
        FormatId::ProvJson => provjson::write(doc).into_bytes(),
        FormatId::TurtleProfile => turtle::write(doc).into_bytes(),
    }
}

pub fn write_string(doc: &ProvenanceDocument, format: FormatId) -> String {
    String::from_utf8(write(doc, format)).expect("writers emit UTF-8")
}

pub fn convert(input: &[u8], from: FormatId, to: FormatId) -> Result<Vec<u8>, ParseError> {
    Ok(write(&parse(input, from)?, to))
}

// Line and column of the character right after `text`.
fn position_after(text: &str) -> (usize, usize) {
    let line = text.matches('\n').count() + 1;
    let column = text.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

/// Vocabulary a prefixed name belongs to, resolved through its namespace IRI.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Vocab {
    Prov,
    Dash,
    Xsd,
    Other,
}

pub(crate) fn vocab_of(doc: &ProvenanceDocument, name: &QualifiedName) -> Vocab {
    match doc.prefix_iri(name.prefix()) {
        Some(vocab::PROV_NS) => Vocab::Prov,
        Some(vocab::DASH_NS) => Vocab::Dash,
        Some(vocab::XSD_NS) => Vocab::Xsd,
        _ => Vocab::Other,
    }
}

/// Type terms that may appear in `a` lists and `prov:type` values.
pub(crate) mod types {
    use super::{vocab_of, Vocab};
    use crate::model::{
        ActivityRefinement, AgentRefinement, Category, ElementKind, EntityRefinement, ProvenanceDocument,
        QualifiedName,
    };

    #[derive(Debug, Clone, Copy, PartialEq, Eq)]
    pub enum TypeTerm {
        Category(Category),
        Collection,
        Entity(EntityRefinement),
        Agent(AgentRefinement),
        Activity(ActivityRefinement),
    }

    impl TypeTerm {
        fn category(self) -> Option<Category> {
            match self {
                TypeTerm::Category(c) => Some(c),
                TypeTerm::Collection | TypeTerm::Entity(_) => Some(Category::Entity),
                TypeTerm::Agent(_) => Some(Category::Agent),
                TypeTerm::Activity(_) => Some(Category::Activity),
            }
        }
    }

    pub fn lookup(doc: &ProvenanceDocument, name: &QualifiedName) -> Option<TypeTerm> {
        use TypeTerm::{Activity, Agent, Collection, Entity};
        let term = match (vocab_of(doc, name), name.local()) {
            (Vocab::Prov, "Entity") => TypeTerm::Category(Category::Entity),
            (Vocab::Prov, "Agent") => TypeTerm::Category(Category::Agent),
            (Vocab::Prov, "Activity") => TypeTerm::Category(Category::Activity),
            (Vocab::Prov, "Collection") => Collection,
            (Vocab::Dash, "Dashboard") => Entity(EntityRefinement::Dashboard),
            (Vocab::Dash, "SubtopicCollection") => Entity(EntityRefinement::SubtopicCollection),
            (Vocab::Dash, "VisualEntity") => Entity(EntityRefinement::VisualEntity),
            (Vocab::Dash, "DataEntity") => Entity(EntityRefinement::DataEntity),
            (Vocab::Prov, "Organization") => Agent(AgentRefinement::Organization),
            (Vocab::Dash, "Department") => Agent(AgentRefinement::Department),
            (Vocab::Prov, "Person") => Agent(AgentRefinement::Person),
            (Vocab::Prov, "SoftwareAgent") => Agent(AgentRefinement::SoftwareAgent),
            (Vocab::Dash, "CreationMaintenance") => Activity(ActivityRefinement::CreationMaintenance),
            (Vocab::Dash, "Sustainability") => Activity(ActivityRefinement::Sustainability),
            (Vocab::Dash, "DataUpdate") => Activity(ActivityRefinement::DataUpdate),
            _ => return None,
        };
        Some(term)
    }

    /// Type terms written for `kind`, excluding the category term itself.
    pub fn refinement_terms(kind: &ElementKind) -> Vec<&'static str> {
        let mut out = Vec::new();
        match kind {
            ElementKind::Entity { refinement, collection } => {
                if *collection {
                    out.push("prov:Collection");
                }
                match refinement {
                    EntityRefinement::Dashboard => out.push("dash:Dashboard"),
                    EntityRefinement::SubtopicCollection => out.push("dash:SubtopicCollection"),
                    EntityRefinement::VisualEntity => out.push("dash:VisualEntity"),
                    EntityRefinement::DataEntity => out.push("dash:DataEntity"),
                    EntityRefinement::GenericEntity => {}
                }
            }
            ElementKind::Agent(r) => match r {
                AgentRefinement::Organization => out.push("prov:Organization"),
                AgentRefinement::Department => out.push("dash:Department"),
                AgentRefinement::Person => out.push("prov:Person"),
                AgentRefinement::SoftwareAgent => out.push("prov:SoftwareAgent"),
                AgentRefinement::GenericAgent => {}
            },
            ElementKind::Activity(r) => match r {
                ActivityRefinement::CreationMaintenance => out.push("dash:CreationMaintenance"),
                ActivityRefinement::Sustainability => out.push("dash:Sustainability"),
                ActivityRefinement::DataUpdate => out.push("dash:DataUpdate"),
                ActivityRefinement::GenericActivity => {}
            },
        }
        out
    }

    pub fn category_term(category: Category) -> &'static str {
        match category {
            Category::Entity => "prov:Entity",
            Category::Agent => "prov:Agent",
            Category::Activity => "prov:Activity",
        }
    }

    /// Folds type terms into a kind. `fallback` supplies the category when no
    /// term names one (PROV-JSON buckets already fix it).
    #[derive(Default)]
    pub struct KindBuilder {
        category: Option<Category>,
        collection: bool,
        entity: Option<EntityRefinement>,
        agent: Option<AgentRefinement>,
        activity: Option<ActivityRefinement>,
    }

    impl KindBuilder {
        /// Adds a term; on conflict returns a description of what was expected.
        pub fn add(&mut self, term: TypeTerm) -> Result<(), String> {
            let category = term.category().expect("every term implies a category");
            if let Some(existing) = self.category {
                if existing != category {
                    return Err(format!("a type consistent with {existing}"));
                }
            }
            self.category = Some(category);
            let clash = |set: bool| if set { Err("at most one refinement type".to_string()) } else { Ok(()) };
            match term {
                TypeTerm::Category(_) => {}
                TypeTerm::Collection => self.collection = true,
                TypeTerm::Entity(r) => {
                    clash(self.entity.is_some_and(|e| e != r))?;
                    self.entity = Some(r);
                }
                TypeTerm::Agent(r) => {
                    clash(self.agent.is_some_and(|e| e != r))?;
                    self.agent = Some(r);
                }
                TypeTerm::Activity(r) => {
                    clash(self.activity.is_some_and(|e| e != r))?;
                    self.activity = Some(r);
                }
            }
            Ok(())
        }

        pub fn build(self, fallback: Option<Category>) -> Option<ElementKind> {
            Some(match self.category.or(fallback)? {
                Category::Entity => {
                    let refinement = self.entity.unwrap_or(EntityRefinement::GenericEntity);
                    ElementKind::Entity {
                        refinement,
                        collection: self.collection || refinement.requires_collection(),
                    }
                }
                Category::Agent => ElementKind::Agent(self.agent.unwrap_or(AgentRefinement::GenericAgent)),
                Category::Activity => {
                    ElementKind::Activity(self.activity.unwrap_or(ActivityRefinement::GenericActivity))
                }
            })
        }
    }
}
