//! The typed provenance graph: elements, relations, and the document that owns them.

mod element;
mod name;
mod relation;
mod time;

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

pub use element::{
    check_url, ActivityRefinement, AgentRefinement, Category, DashAttributes, Element, ElementKind,
    EntityRefinement,
};
pub use name::{is_valid_local, is_valid_prefix, QualifiedName};
pub(crate) use name::is_local_continue;
pub use relation::{Relation, RelationKind};
pub use time::Timestamp;

use crate::vocab;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("invalid prefix token `{0}`")]
    InvalidPrefix(String),
    #[error("invalid qualified name `{0}`")]
    InvalidQualifiedName(String),
    #[error("invalid namespace IRI `{0}`")]
    InvalidIri(String),
    #[error("prefix `{prefix}` is already bound to <{existing}>, cannot rebind to <{requested}>")]
    PrefixConflict { prefix: String, existing: String, requested: String },
    #[error("prefix of `{0}` is not declared")]
    UndeclaredPrefix(String),
    #[error("identifier `{0}` is already present")]
    DuplicateIdentifier(QualifiedName),
    #[error("element `{id}`: {reason}")]
    KindMismatch { id: QualifiedName, reason: String },
    #[error("relation endpoint `{0}` does not resolve to an element")]
    DanglingReference(QualifiedName),
    #[error("{kind} cannot connect `{subject}` to `{object}`: {reason}")]
    SignatureViolation {
        kind: RelationKind,
        subject: QualifiedName,
        object: QualifiedName,
        reason: String,
    },
    #[error("`{0}` is not a collection entity")]
    NotACollection(QualifiedName),
    #[error("unknown identifier `{0}`")]
    UnknownIdentifier(QualifiedName),
    #[error("`{0}` is not an absolute URL with scheme and authority")]
    InvalidUrl(String),
    #[error("`{0}` is not an ISO-8601 date-time with offset or a YYYY-MM-DD date")]
    InvalidTimestamp(String),
    #[error("`{0}` is a modeled term and cannot be used as an extension attribute")]
    ReservedAttribute(QualifiedName),
}

/// Extension keys may not shadow a term the model already represents.
pub(crate) fn check_extension_key(key: &QualifiedName) -> Result<(), ModelError> {
    if is_reserved_term(key) {
        Err(ModelError::ReservedAttribute(key.clone()))
    } else {
        Ok(())
    }
}

pub(crate) fn is_reserved_term(key: &QualifiedName) -> bool {
    match key.prefix() {
        vocab::DASH_PREFIX => vocab::canonical_dash_attribute(key.local()).is_some(),
        vocab::PROV_PREFIX => {
            let local = key.local();
            matches!(
                local,
                vocab::PROV_TYPE
                    | vocab::PROV_GENERATED_AT_TIME
                    | vocab::PROV_STARTED_AT_TIME
                    | vocab::PROV_ENDED_AT_TIME
                    | vocab::PROV_TIME
            ) || RelationKind::from_term(local).is_some()
                || RelationKind::ALL.iter().any(|k| {
                    let (s, o) = k.roles();
                    s == local || o == local
                })
        }
        _ => false,
    }
}

fn check_iri(iri: &str) -> Result<(), ModelError> {
    let bad = iri.is_empty()
        || iri
            .chars()
            .any(|c| c.is_whitespace() || c.is_control() || matches!(c, '<' | '>' | '"' | '{' | '}' | '|' | '^' | '`' | '\\'));
    if bad {
        Err(ModelError::InvalidIri(iri.to_string()))
    } else {
        Ok(())
    }
}

/// A complete provenance graph: prefix table, elements by identifier, and an
/// ordered relation list.
///
/// Mutating operations either apply fully or leave the document unchanged.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProvenanceDocument {
    prefixes: BTreeMap<String, String>,
    elements: BTreeMap<QualifiedName, Element>,
    relations: Vec<Relation>,
}

impl Default for ProvenanceDocument {
    fn default() -> Self {
        Self::new()
    }
}

impl ProvenanceDocument {
    /// An empty document with `prov`, `dash` and `xsd` declared.
    pub fn new() -> Self {
        let prefixes = vocab::STANDARD_PREFIXES
            .iter()
            .map(|(p, iri)| (p.to_string(), iri.to_string()))
            .collect();
        Self { prefixes, elements: BTreeMap::new(), relations: Vec::new() }
    }

    /// Binds `prefix` to `iri`. Re-declaring the same binding is a no-op;
    /// rebinding to a different IRI is a [`ModelError::PrefixConflict`].
    pub fn declare_prefix(&mut self, prefix: &str, iri: &str) -> Result<(), ModelError> {
        if !is_valid_prefix(prefix) {
            return Err(ModelError::InvalidPrefix(prefix.to_string()));
        }
        check_iri(iri)?;
        match self.prefixes.get(prefix) {
            Some(existing) if existing == iri => Ok(()),
            Some(existing) => Err(ModelError::PrefixConflict {
                prefix: prefix.to_string(),
                existing: existing.clone(),
                requested: iri.to_string(),
            }),
            None => {
                self.prefixes.insert(prefix.to_string(), iri.to_string());
                Ok(())
            }
        }
    }

    pub fn prefix_iri(&self, prefix: &str) -> Option<&str> {
        self.prefixes.get(prefix).map(String::as_str)
    }

    /// Prefix bindings sorted by token.
    pub fn prefixes(&self) -> impl Iterator<Item = (&str, &str)> {
        self.prefixes.iter().map(|(p, iri)| (p.as_str(), iri.as_str()))
    }

    pub fn prefix_count(&self) -> usize {
        self.prefixes.len()
    }

    pub fn is_declared(&self, name: &QualifiedName) -> bool {
        self.prefixes.contains_key(name.prefix())
    }

    fn check_declared(&self, name: &QualifiedName) -> Result<(), ModelError> {
        if self.is_declared(name) {
            Ok(())
        } else {
            Err(ModelError::UndeclaredPrefix(name.to_string()))
        }
    }

    fn check_element_names(&self, e: &Element) -> Result<(), ModelError> {
        self.check_declared(&e.id)?;
        for (key, _) in &e.dash.extensions {
            self.check_declared(key)?;
        }
        if self.elements.contains_key(&e.id) {
            return Err(ModelError::DuplicateIdentifier(e.id.clone()));
        }
        Ok(())
    }

    /// Inserts an element after checking every element invariant.
    pub fn add_element(&mut self, element: Element) -> Result<(), ModelError> {
        self.check_element_names(&element)?;
        element.check()?;
        self.elements.insert(element.id.clone(), element);
        Ok(())
    }

    /// Parser entry point: activity time order is left to the validator.
    pub(crate) fn insert_element_unvalidated(&mut self, element: Element) -> Result<(), ModelError> {
        self.check_element_names(&element)?;
        element.check_shape()?;
        self.elements.insert(element.id.clone(), element);
        Ok(())
    }

    fn check_relation_names(&self, r: &Relation) -> Result<(), ModelError> {
        self.check_declared(&r.subject)?;
        self.check_declared(&r.object)?;
        for (key, _) in &r.attributes {
            self.check_declared(key)?;
            check_extension_key(key)?;
        }
        Ok(())
    }

    /// Checks that `relation` may be added to this document as it stands.
    pub fn check_relation(&self, relation: &Relation) -> Result<(), ModelError> {
        self.check_relation_names(relation)?;
        let subject = self
            .elements
            .get(&relation.subject)
            .ok_or_else(|| ModelError::DanglingReference(relation.subject.clone()))?;
        let object = self
            .elements
            .get(&relation.object)
            .ok_or_else(|| ModelError::DanglingReference(relation.object.clone()))?;
        signature_error(relation, subject, object).map_or(Ok(()), Err)
    }

    /// Appends a relation after the endpoint and signature checks.
    pub fn add_relation(&mut self, relation: Relation) -> Result<(), ModelError> {
        self.check_relation(&relation)?;
        self.relations.push(relation);
        Ok(())
    }

    /// Parser entry point: dangling endpoints and signature violations are
    /// reported by the validator instead.
    pub(crate) fn push_relation_unvalidated(&mut self, relation: Relation) -> Result<(), ModelError> {
        self.check_relation_names(&relation)?;
        self.relations.push(relation);
        Ok(())
    }

    pub fn element(&self, id: &QualifiedName) -> Option<&Element> {
        self.elements.get(id)
    }

    pub fn contains(&self, id: &QualifiedName) -> bool {
        self.elements.contains_key(id)
    }

    /// Elements in identifier order.
    pub fn elements(&self) -> impl Iterator<Item = &Element> {
        self.elements.values()
    }

    pub fn elements_of(&self, category: Category) -> impl Iterator<Item = &Element> {
        self.elements.values().filter(move |e| e.category() == category)
    }

    pub fn element_count(&self) -> usize {
        self.elements.len()
    }

    /// Relations in insertion order.
    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    pub fn relations_of(&self, kind: RelationKind) -> impl Iterator<Item = &Relation> {
        self.relations.iter().filter(move |r| r.kind == kind)
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty() && self.relations.is_empty()
    }

    /// Objects of the `HadMember` relations of `collection`, in insertion
    /// order, duplicates preserved.
    pub fn members_of(&self, collection: &QualifiedName) -> Result<Vec<QualifiedName>, ModelError> {
        let element = self
            .elements
            .get(collection)
            .ok_or_else(|| ModelError::UnknownIdentifier(collection.clone()))?;
        if !element.kind.is_collection() {
            return Err(ModelError::NotACollection(collection.clone()));
        }
        Ok(self
            .relations_of(RelationKind::HadMember)
            .filter(|r| &r.subject == collection)
            .map(|r| r.object.clone())
            .collect())
    }

    /// A document with the same prefixes, the elements in `keep`, and every
    /// relation whose endpoints are both kept.
    pub fn restricted_to(&self, keep: &BTreeSet<QualifiedName>) -> Self {
        Self {
            prefixes: self.prefixes.clone(),
            elements: self
                .elements
                .iter()
                .filter(|(id, _)| keep.contains(*id))
                .map(|(id, e)| (id.clone(), e.clone()))
                .collect(),
            relations: self
                .relations
                .iter()
                .filter(|r| keep.contains(&r.subject) && keep.contains(&r.object))
                .cloned()
                .collect(),
        }
    }

    /// Canonical form used for semantic comparison.
    ///
    /// Extension pairs are grouped by key and relations by (subject, kind);
    /// order inside each group is kept, so member lists stay order-sensitive.
    pub fn normalized(&self) -> Self {
        let mut doc = self.clone();
        for element in doc.elements.values_mut() {
            element.dash.extensions.sort_by(|a, b| a.0.cmp(&b.0));
        }
        for relation in &mut doc.relations {
            relation.attributes.sort_by(|a, b| a.0.cmp(&b.0));
        }
        doc.relations.sort_by(|a, b| (&a.subject, a.kind).cmp(&(&b.subject, b.kind)));
        doc
    }

    /// Equality up to the orderings a serialization format may not preserve.
    pub fn semantic_eq(&self, other: &Self) -> bool {
        self.normalized() == other.normalized()
    }
}

/// Reason a relation's resolved endpoints break its kind's signature, if any.
pub(crate) fn signature_error(relation: &Relation, subject: &Element, object: &Element) -> Option<ModelError> {
    let (want_subject, want_object) = relation.kind.signature();
    let reason = if subject.category() != want_subject || object.category() != want_object {
        Some(format!(
            "expected {want_subject} -> {want_object}, found {} -> {}",
            subject.category(),
            object.category()
        ))
    } else if relation.kind.requires_collection_subject() && !subject.kind.is_collection() {
        Some(format!("subject `{}` is not a collection", subject.id))
    } else {
        None
    };
    reason.map(|reason| ModelError::SignatureViolation {
        kind: relation.kind,
        subject: relation.subject.clone(),
        object: relation.object.clone(),
        reason,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> QualifiedName {
        s.parse().unwrap()
    }

    fn ex_doc() -> ProvenanceDocument {
        let mut doc = ProvenanceDocument::new();
        doc.declare_prefix("ex", "http://example.org/").unwrap();
        doc
    }

    fn ts(s: &str) -> Timestamp {
        Timestamp::parse(s).unwrap()
    }

    #[test]
    fn new_document_has_three_prefixes() {
        let doc = ProvenanceDocument::new();
        assert_eq!(doc.prefix_count(), 3);
        assert_eq!(doc.element_count(), 0);
        assert!(doc.relations().is_empty());
        assert_eq!(doc.prefix_iri("prov"), Some(vocab::PROV_NS));
        assert_eq!(doc.prefix_iri("dash"), Some(vocab::DASH_NS));
        assert_eq!(doc.prefix_iri("xsd"), Some(vocab::XSD_NS));
    }

    #[test]
    fn declare_prefix_contract() {
        let mut doc = ProvenanceDocument::new();
        doc.declare_prefix("ex", "http://example.org/").unwrap();
        assert_eq!(doc.prefix_iri("ex"), Some("http://example.org/"));
        doc.declare_prefix("dash", "http://dash.com/dash#").unwrap();
        assert_eq!(doc.prefix_count(), 4);
        assert!(matches!(
            doc.declare_prefix("prov", "http://other/"),
            Err(ModelError::PrefixConflict { .. })
        ));
        assert!(matches!(
            doc.declare_prefix("ex", "http://example.com/"),
            Err(ModelError::PrefixConflict { .. })
        ));
        assert!(doc.declare_prefix("bad prefix", "http://x/").is_err());
        assert!(doc.declare_prefix("ok", "").is_err());
        assert_eq!(doc.prefix_iri("prov"), Some(vocab::PROV_NS));
    }

    #[test]
    fn add_element_round() {
        let mut doc = ex_doc();
        let dashboard = Element::entity(q("ex:dashboard"), EntityRefinement::Dashboard).with_name("COVID-19 NO BRASIL");
        doc.add_element(dashboard).unwrap();
        assert_eq!(doc.element_count(), 1);
        let stored = doc.element(&q("ex:dashboard")).unwrap();
        assert_eq!(stored.name(), Some("COVID-19 NO BRASIL"));
        assert!(stored.kind.is_collection());

        let mut sus = Element::agent(q("ex:SUS"), AgentRefinement::Organization);
        sus.dash.roles.push("demanding".into());
        doc.add_element(sus).unwrap();
        assert_eq!(doc.element(&q("ex:SUS")).unwrap().dash.roles, vec!["demanding"]);
    }

    #[test]
    fn duplicate_ids_fail_regardless_of_kind() {
        let mut doc = ex_doc();
        doc.add_element(Element::entity(q("ex:x"), EntityRefinement::VisualEntity)).unwrap();
        for kind in [
            ElementKind::entity(EntityRefinement::DataEntity),
            ElementKind::Agent(AgentRefinement::Person),
            ElementKind::Activity(ActivityRefinement::DataUpdate),
        ] {
            let err = doc.add_element(Element::new(q("ex:x"), kind)).unwrap_err();
            assert_eq!(err, ModelError::DuplicateIdentifier(q("ex:x")));
        }
        assert_eq!(doc.element_count(), 1);
    }

    #[test]
    fn activity_time_order_is_enforced() {
        let mut doc = ex_doc();
        let mut a = Element::activity(q("ex:update"), ActivityRefinement::DataUpdate);
        a.started_at = Some(ts("2023-03-04"));
        a.ended_at = Some(ts("2023-03-03"));
        assert!(matches!(doc.add_element(a.clone()), Err(ModelError::KindMismatch { .. })));
        a.ended_at = Some(ts("2023-03-04"));
        doc.add_element(a).unwrap();
    }

    #[test]
    fn timestamps_must_match_category() {
        let mut doc = ex_doc();
        let mut agent = Element::agent(q("ex:a"), AgentRefinement::Person);
        agent.generated_at = Some(ts("2023-03-03"));
        assert!(matches!(doc.add_element(agent), Err(ModelError::KindMismatch { .. })));
        let mut entity = Element::entity(q("ex:e"), EntityRefinement::DataEntity);
        entity.started_at = Some(ts("2023-03-03"));
        assert!(matches!(doc.add_element(entity), Err(ModelError::KindMismatch { .. })));
    }

    #[test]
    fn dashboards_must_be_collections() {
        let mut doc = ex_doc();
        let e = Element::new(
            q("ex:d"),
            ElementKind::Entity { refinement: EntityRefinement::Dashboard, collection: false },
        );
        assert!(matches!(doc.add_element(e), Err(ModelError::KindMismatch { .. })));
    }

    #[test]
    fn undeclared_prefix_and_bad_url_rejected() {
        let mut doc = ex_doc();
        let e = Element::entity(q("other:x"), EntityRefinement::VisualEntity);
        assert!(matches!(doc.add_element(e), Err(ModelError::UndeclaredPrefix(_))));
        let mut e = Element::entity(q("ex:x"), EntityRefinement::VisualEntity);
        e.dash.url = Some("infoms.saude.gov.br/covid".into());
        assert!(matches!(doc.add_element(e.clone()), Err(ModelError::InvalidUrl(_))));
        e.dash.url = Some("mailto:someone@example.org".into());
        assert!(matches!(doc.add_element(e.clone()), Err(ModelError::InvalidUrl(_))));
        e.dash.url = Some("https://infoms.saude.gov.br/extensions/covid-19.html".into());
        doc.add_element(e).unwrap();
    }

    #[test]
    fn reserved_extension_keys_rejected() {
        let mut doc = ex_doc();
        let mut e = Element::entity(q("ex:x"), EntityRefinement::VisualEntity);
        e.dash.extensions.push((q("dash:Name"), "x".into()));
        assert!(matches!(doc.add_element(e.clone()), Err(ModelError::ReservedAttribute(_))));
        e.dash.extensions = vec![(q("dash:source"), "x".into()), (q("ex:frequency"), "daily".into())];
        doc.add_element(e).unwrap();
    }

    #[test]
    fn add_relation_checks_endpoints_and_signature() {
        let mut doc = ex_doc();
        doc.add_element(Element::entity(q("ex:dashboard"), EntityRefinement::Dashboard)).unwrap();
        doc.add_element(Element::activity(q("ex:creationMaintenanceDashboard"), ActivityRefinement::CreationMaintenance))
            .unwrap();
        doc.add_element(Element::agent(q("ex:taskforce"), AgentRefinement::Organization)).unwrap();
        doc.add_element(Element::agent(q("ex:SUS"), AgentRefinement::Organization)).unwrap();
        doc.add_element(Element::entity(q("ex:chart"), EntityRefinement::VisualEntity)).unwrap();

        doc.add_relation(Relation::new(
            RelationKind::WasGeneratedBy,
            q("ex:dashboard"),
            q("ex:creationMaintenanceDashboard"),
        ))
        .unwrap();
        doc.add_relation(Relation::new(RelationKind::ActedOnBehalfOf, q("ex:taskforce"), q("ex:SUS"))).unwrap();
        assert!(matches!(
            doc.add_relation(Relation::new(RelationKind::WasGeneratedBy, q("ex:dashboard"), q("ex:chart"))),
            Err(ModelError::SignatureViolation { .. })
        ));
        assert!(matches!(
            doc.add_relation(Relation::new(RelationKind::HadMember, q("ex:chart"), q("ex:dashboard"))),
            Err(ModelError::SignatureViolation { .. })
        ));
        assert_eq!(
            doc.add_relation(Relation::new(RelationKind::Used, q("ex:creationMaintenanceDashboard"), q("ex:missing"))),
            Err(ModelError::DanglingReference(q("ex:missing")))
        );
        assert_eq!(doc.relations().len(), 2);
    }

    /// Every kind against every (subject, object) category pair: exactly one
    /// pair per kind is accepted.
    #[test]
    fn signature_table_is_exhaustive() {
        let mut base = ex_doc();
        let reps = [
            (Category::Entity, q("ex:coll")),
            (Category::Activity, q("ex:act")),
            (Category::Agent, q("ex:agent")),
        ];
        base.add_element(Element::new(q("ex:coll"), ElementKind::collection(EntityRefinement::GenericEntity)))
            .unwrap();
        base.add_element(Element::activity(q("ex:act"), ActivityRefinement::GenericActivity)).unwrap();
        base.add_element(Element::agent(q("ex:agent"), AgentRefinement::GenericAgent)).unwrap();

        let mut accepted = Vec::new();
        for kind in RelationKind::ALL {
            for (sc, s) in &reps {
                for (oc, o) in &reps {
                    let mut doc = base.clone();
                    if doc.add_relation(Relation::new(kind, s.clone(), o.clone())).is_ok() {
                        accepted.push((kind, *sc, *oc));
                    }
                }
            }
        }
        let expected: Vec<_> = RelationKind::ALL
            .iter()
            .map(|k| (*k, k.signature().0, k.signature().1))
            .collect();
        assert_eq!(accepted, expected);
    }

    #[test]
    fn members_of_keeps_order_and_duplicates() {
        let mut doc = ex_doc();
        doc.add_element(Element::entity(q("ex:dashboard"), EntityRefinement::Dashboard)).unwrap();
        doc.add_element(Element::entity(q("ex:empty"), EntityRefinement::SubtopicCollection)).unwrap();
        doc.add_element(Element::entity(q("ex:a"), EntityRefinement::VisualEntity)).unwrap();
        doc.add_element(Element::entity(q("ex:b"), EntityRefinement::VisualEntity)).unwrap();
        for m in ["ex:b", "ex:a", "ex:b"] {
            doc.add_relation(Relation::new(RelationKind::HadMember, q("ex:dashboard"), q(m))).unwrap();
        }
        assert_eq!(doc.members_of(&q("ex:dashboard")).unwrap(), vec![q("ex:b"), q("ex:a"), q("ex:b")]);
        assert!(doc.members_of(&q("ex:empty")).unwrap().is_empty());
        assert_eq!(doc.members_of(&q("ex:a")), Err(ModelError::NotACollection(q("ex:a"))));
        assert_eq!(doc.members_of(&q("ex:zz")), Err(ModelError::UnknownIdentifier(q("ex:zz"))));
    }

    #[test]
    fn semantic_eq_ignores_cross_group_order_only() {
        let mut doc = ex_doc();
        doc.add_element(Element::entity(q("ex:d"), EntityRefinement::Dashboard)).unwrap();
        doc.add_element(Element::entity(q("ex:a"), EntityRefinement::VisualEntity)).unwrap();
        doc.add_element(Element::entity(q("ex:b"), EntityRefinement::VisualEntity)).unwrap();
        let mut one = doc.clone();
        one.add_relation(Relation::new(RelationKind::HadMember, q("ex:d"), q("ex:a"))).unwrap();
        one.add_relation(Relation::new(RelationKind::WasDerivedFrom, q("ex:a"), q("ex:b"))).unwrap();
        one.add_relation(Relation::new(RelationKind::HadMember, q("ex:d"), q("ex:b"))).unwrap();

        let mut two = doc.clone();
        two.add_relation(Relation::new(RelationKind::WasDerivedFrom, q("ex:a"), q("ex:b"))).unwrap();
        two.add_relation(Relation::new(RelationKind::HadMember, q("ex:d"), q("ex:a"))).unwrap();
        two.add_relation(Relation::new(RelationKind::HadMember, q("ex:d"), q("ex:b"))).unwrap();
        assert!(one.semantic_eq(&two));

        let mut three = doc;
        three.add_relation(Relation::new(RelationKind::HadMember, q("ex:d"), q("ex:b"))).unwrap();
        three.add_relation(Relation::new(RelationKind::HadMember, q("ex:d"), q("ex:a"))).unwrap();
        three.add_relation(Relation::new(RelationKind::WasDerivedFrom, q("ex:a"), q("ex:b"))).unwrap();
        assert!(!one.semantic_eq(&three));
    }
}
