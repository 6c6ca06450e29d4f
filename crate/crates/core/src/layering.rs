//! Three-layer decomposition of a dashboard document.
//!
//! Layer 1 is the root dashboard collection, layer 2 the subtopic collections
//! it directly contains, and layer 3 the individual visual entities reachable
//! from the root (directly, or through a subtopic). Data entities inherit the
//! layers of the layered visual entities derived from them. Agents and
//! activities are layerless.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph;
use crate::model::{Category, EntityRefinement, ProvenanceDocument, QualifiedName, RelationKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Layer {
    #[serde(rename = "L1")]
    L1Dashboard,
    #[serde(rename = "L2")]
    L2Subtopic,
    #[serde(rename = "L3")]
    L3Individual,
    Unlayered,
}

impl Layer {
    pub const LAYERED: [Layer; 3] = [Layer::L1Dashboard, Layer::L2Subtopic, Layer::L3Individual];

    /// Layer from its number, 1 to 3.
    pub fn from_number(n: u8) -> Option<Layer> {
        match n {
            1 => Some(Layer::L1Dashboard),
            2 => Some(Layer::L2Subtopic),
            3 => Some(Layer::L3Individual),
            _ => None,
        }
    }

    pub fn number(self) -> Option<u8> {
        match self {
            Layer::L1Dashboard => Some(1),
            Layer::L2Subtopic => Some(2),
            Layer::L3Individual => Some(3),
            Layer::Unlayered => None,
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            Layer::L1Dashboard => "Dashboard",
            Layer::L2Subtopic => "Subtopics",
            Layer::L3Individual => "Individual visual entities",
            Layer::Unlayered => "Unlayered",
        }
    }
}

impl fmt::Display for Layer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.number() {
            Some(n) => write!(f, "L{n}"),
            None => f.write_str("Unlayered"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LayerError {
    #[error("no entity is refined as a Dashboard")]
    NoRootDashboard,
    #[error("more than one Dashboard entity: {}", join(.0))]
    MultipleRootDashboards(Vec<QualifiedName>),
    #[error("hadMember forms a cycle through {}", join(.0))]
    MembershipCycle(Vec<QualifiedName>),
    #[error("`{0}` sits below layer 2 of the membership tree")]
    DepthExceeded(QualifiedName),
    #[error("unknown identifier `{0}`")]
    UnknownIdentifier(QualifiedName),
    #[error("`{0}` is not reachable from the dashboard by membership")]
    Unlayered(QualifiedName),
}

fn join(ids: &[QualifiedName]) -> String {
    ids.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

/// Layers for every entity of a document. Data entities may hold several
/// layers; every other entity holds exactly one value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LayerAssignment {
    root: QualifiedName,
    layers: BTreeMap<QualifiedName, BTreeSet<Layer>>,
}

impl LayerAssignment {
    pub fn root(&self) -> &QualifiedName {
        &self.root
    }

    pub fn layers_of(&self, id: &QualifiedName) -> Option<&BTreeSet<Layer>> {
        self.layers.get(id)
    }

    pub fn has_layer(&self, id: &QualifiedName, layer: Layer) -> bool {
        self.layers.get(id).is_some_and(|set| set.contains(&layer))
    }

    /// Entities carrying `layer`, in identifier order.
    pub fn in_layer(&self, layer: Layer) -> Vec<&QualifiedName> {
        self.layers
            .iter()
            .filter(|(_, set)| set.contains(&layer))
            .map(|(id, _)| id)
            .collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&QualifiedName, &BTreeSet<Layer>)> {
        self.layers.iter()
    }
}

/// Entities refined as `Dashboard`, sorted.
pub fn dashboard_roots(doc: &ProvenanceDocument) -> Vec<QualifiedName> {
    doc.elements_of(Category::Entity)
        .filter(|e| e.kind.entity_refinement() == Some(EntityRefinement::Dashboard))
        .map(|e| e.id.clone())
        .collect()
}

pub fn membership_cycles(doc: &ProvenanceDocument) -> Vec<Vec<QualifiedName>> {
    graph::cycles(doc, &[RelationKind::HadMember])
}

/// The single root dashboard, or why there is not exactly one.
pub fn root_dashboard(doc: &ProvenanceDocument) -> Result<QualifiedName, LayerError> {
    let mut roots = dashboard_roots(doc);
    match roots.len() {
        0 => Err(LayerError::NoRootDashboard),
        1 => Ok(roots.remove(0)),
        _ => Err(LayerError::MultipleRootDashboards(roots)),
    }
}

struct Membership {
    root: QualifiedName,
    depth1: BTreeSet<QualifiedName>,
    depth2: BTreeSet<QualifiedName>,
}

fn membership(doc: &ProvenanceDocument) -> Result<Membership, LayerError> {
    let root = root_dashboard(doc)?;
    if let Some(cycle) = membership_cycles(doc).into_iter().next() {
        return Err(LayerError::MembershipCycle(cycle));
    }
    let children = graph::successors(doc, &[RelationKind::HadMember]);
    let step = |from: &BTreeSet<QualifiedName>| -> BTreeSet<QualifiedName> {
        from.iter()
            .filter_map(|id| children.get(id))
            .flatten()
            .filter(|id| doc.contains(id))
            .cloned()
            .collect()
    };
    let depth1 = step(&BTreeSet::from([root.clone()]));
    let depth2 = step(&depth1);
    let is_collection = |id: &QualifiedName| doc.element(id).is_some_and(|e| e.kind.is_collection());
    if let Some(deep) = depth2.iter().find(|id| is_collection(id)) {
        return Err(LayerError::DepthExceeded(deep.clone()));
    }
    if let Some(deep) = step(&depth2).into_iter().next() {
        return Err(LayerError::DepthExceeded(deep));
    }
    Ok(Membership { root, depth1, depth2 })
}

/// Assigns a layer to every entity of `doc`.
pub fn infer_layers(doc: &ProvenanceDocument) -> Result<LayerAssignment, LayerError> {
    let Membership { root, depth1, depth2 } = membership(doc)?;

    let mut layers: BTreeMap<QualifiedName, BTreeSet<Layer>> = BTreeMap::new();
    let mut data = Vec::new();
    for e in doc.elements_of(Category::Entity) {
        let refinement = e.kind.entity_refinement();
        if refinement == Some(EntityRefinement::DataEntity) {
            data.push(e.id.clone());
            continue;
        }
        let layer = if e.id == root {
            Layer::L1Dashboard
        } else if depth1.contains(&e.id) && e.kind.is_collection() {
            Layer::L2Subtopic
        } else if depth1.contains(&e.id) || depth2.contains(&e.id) {
            Layer::L3Individual
        } else {
            Layer::Unlayered
        };
        layers.insert(e.id.clone(), BTreeSet::from([layer]));
    }

    let mut data_layers: BTreeMap<QualifiedName, BTreeSet<Layer>> =
        data.into_iter().map(|id| (id, BTreeSet::new())).collect();
    for r in doc.relations_of(RelationKind::WasDerivedFrom) {
        let (Some(target), Some(source)) = (data_layers.get_mut(&r.object), layers.get(&r.subject)) else {
            continue;
        };
        target.extend(source.iter().copied().filter(|l| *l != Layer::Unlayered));
    }
    for (id, mut set) in data_layers {
        if set.is_empty() {
            set.insert(Layer::Unlayered);
        }
        layers.insert(id, set);
    }
    Ok(LayerAssignment { root, layers })
}

/// Sub-document for one layer.
///
/// Holds the entities assigned `layer`, the agents and activities directly
/// related to them, the direct `hadMember` children of those entities (so a
/// collection keeps its member edges), and every relation among the retained
/// elements.
pub fn layer_view(doc: &ProvenanceDocument, layer: Layer) -> Result<ProvenanceDocument, LayerError> {
    let assignment = infer_layers(doc)?;
    Ok(doc.restricted_to(&view_members(doc, &assignment, layer)))
}

pub(crate) fn view_members(
    doc: &ProvenanceDocument,
    assignment: &LayerAssignment,
    layer: Layer,
) -> BTreeSet<QualifiedName> {
    let core: BTreeSet<QualifiedName> = assignment.in_layer(layer).into_iter().cloned().collect();
    let mut keep = core.clone();
    let is_actor = |id: &QualifiedName| {
        doc.element(id)
            .is_some_and(|e| matches!(e.category(), Category::Agent | Category::Activity))
    };
    for r in doc.relations() {
        if core.contains(&r.subject) && is_actor(&r.object) {
            keep.insert(r.object.clone());
        }
        if core.contains(&r.object) && is_actor(&r.subject) {
            keep.insert(r.subject.clone());
        }
        if r.kind == RelationKind::HadMember && core.contains(&r.subject) && doc.contains(&r.object) {
            keep.insert(r.object.clone());
        }
    }
    keep
}

/// The membership chain from the root dashboard to `target`, inclusive.
///
/// With several parents, the lexicographically smallest chain wins.
pub fn drill_path(doc: &ProvenanceDocument, target: &QualifiedName) -> Result<Vec<QualifiedName>, LayerError> {
    if !doc.contains(target) {
        return Err(LayerError::UnknownIdentifier(target.clone()));
    }
    let Membership { root, depth1, .. } = membership(doc)?;
    if *target == root {
        return Ok(vec![root]);
    }
    let parents: BTreeSet<&QualifiedName> = doc
        .relations_of(RelationKind::HadMember)
        .filter(|r| &r.object == target)
        .map(|r| &r.subject)
        .collect();
    let mut best: Option<Vec<QualifiedName>> = None;
    for parent in parents {
        let chain = if *parent == root {
            vec![root.clone(), target.clone()]
        } else if depth1.contains(parent) {
            vec![root.clone(), parent.clone(), target.clone()]
        } else {
            continue;
        };
        if best.as_ref().is_none_or(|b| chain < *b) {
            best = Some(chain);
        }
    }
    best.ok_or_else(|| LayerError::Unlayered(target.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ActivityRefinement, AgentRefinement, Element, ElementKind, Relation};

    fn q(s: &str) -> QualifiedName {
        s.parse().unwrap()
    }

    fn doc_with(entities: &[(&str, EntityRefinement)], members: &[(&str, &str)]) -> ProvenanceDocument {
        let mut doc = ProvenanceDocument::new();
        doc.declare_prefix("ex", "http://example.org/").unwrap();
        for (id, r) in entities {
            doc.add_element(Element::entity(q(id), *r)).unwrap();
        }
        for (s, o) in members {
            doc.add_relation(Relation::new(RelationKind::HadMember, q(s), q(o))).unwrap();
        }
        doc
    }

    use EntityRefinement::*;

    #[test]
    fn two_charts_without_subtopics() {
        let doc = doc_with(
            &[("ex:d", Dashboard), ("ex:a", VisualEntity), ("ex:b", VisualEntity)],
            &[("ex:d", "ex:a"), ("ex:d", "ex:b")],
        );
        let layers = infer_layers(&doc).unwrap();
        assert_eq!(layers.in_layer(Layer::L3Individual), vec![&q("ex:a"), &q("ex:b")]);
        assert!(layers.in_layer(Layer::L2Subtopic).is_empty());
        assert_eq!(layers.root(), &q("ex:d"));
    }

    #[test]
    fn root_errors() {
        let doc = doc_with(&[("ex:a", VisualEntity)], &[]);
        assert_eq!(infer_layers(&doc), Err(LayerError::NoRootDashboard));
        let doc = doc_with(&[("ex:d1", Dashboard), ("ex:d2", Dashboard)], &[]);
        assert_eq!(
            infer_layers(&doc),
            Err(LayerError::MultipleRootDashboards(vec![q("ex:d1"), q("ex:d2")]))
        );
    }

    #[test]
    fn cycles_and_depth_are_errors() {
        let doc = doc_with(
            &[("ex:d", Dashboard), ("ex:s", SubtopicCollection)],
            &[("ex:d", "ex:s"), ("ex:s", "ex:d")],
        );
        assert_eq!(infer_layers(&doc), Err(LayerError::MembershipCycle(vec![q("ex:d"), q("ex:s")])));

        let doc = doc_with(
            &[("ex:d", Dashboard), ("ex:s", SubtopicCollection), ("ex:t", SubtopicCollection)],
            &[("ex:d", "ex:s"), ("ex:s", "ex:t")],
        );
        assert_eq!(infer_layers(&doc), Err(LayerError::DepthExceeded(q("ex:t"))));
    }

    #[test]
    fn data_entities_take_layers_from_derivations() {
        let mut doc = doc_with(
            &[
                ("ex:d", Dashboard),
                ("ex:s", SubtopicCollection),
                ("ex:c", VisualEntity),
                ("ex:data", DataEntity),
                ("ex:unused", DataEntity),
                ("ex:stray", VisualEntity),
            ],
            &[("ex:d", "ex:s"), ("ex:s", "ex:c")],
        );
        for s in ["ex:d", "ex:c", "ex:stray"] {
            doc.add_relation(Relation::new(RelationKind::WasDerivedFrom, q(s), q("ex:data"))).unwrap();
        }
        let layers = infer_layers(&doc).unwrap();
        assert_eq!(
            layers.layers_of(&q("ex:data")).unwrap(),
            &BTreeSet::from([Layer::L1Dashboard, Layer::L3Individual])
        );
        assert_eq!(layers.layers_of(&q("ex:unused")).unwrap(), &BTreeSet::from([Layer::Unlayered]));
        assert_eq!(layers.layers_of(&q("ex:stray")).unwrap(), &BTreeSet::from([Layer::Unlayered]));
    }

    #[test]
    fn drill_paths() {
        let doc = doc_with(
            &[
                ("ex:d", Dashboard),
                ("ex:s1", SubtopicCollection),
                ("ex:s2", SubtopicCollection),
                ("ex:c", VisualEntity),
                ("ex:lone", VisualEntity),
            ],
            &[("ex:d", "ex:s2"), ("ex:d", "ex:s1"), ("ex:s2", "ex:c"), ("ex:s1", "ex:c")],
        );
        assert_eq!(drill_path(&doc, &q("ex:d")).unwrap(), vec![q("ex:d")]);
        assert_eq!(drill_path(&doc, &q("ex:s2")).unwrap(), vec![q("ex:d"), q("ex:s2")]);
        assert_eq!(drill_path(&doc, &q("ex:c")).unwrap(), vec![q("ex:d"), q("ex:s1"), q("ex:c")]);
        assert_eq!(drill_path(&doc, &q("ex:lone")), Err(LayerError::Unlayered(q("ex:lone"))));
        assert_eq!(drill_path(&doc, &q("ex:nope")), Err(LayerError::UnknownIdentifier(q("ex:nope"))));
    }

    #[test]
    fn views_keep_connected_actors() {
        let mut doc = doc_with(
            &[("ex:d", Dashboard), ("ex:s", SubtopicCollection), ("ex:c", VisualEntity)],
            &[("ex:d", "ex:s"), ("ex:s", "ex:c")],
        );
        doc.add_element(Element::activity(q("ex:make"), ActivityRefinement::CreationMaintenance)).unwrap();
        doc.add_element(Element::agent(q("ex:team"), AgentRefinement::Department)).unwrap();
        doc.add_element(Element::agent(q("ex:boss"), AgentRefinement::Organization)).unwrap();
        doc.add_relation(Relation::new(RelationKind::WasGeneratedBy, q("ex:d"), q("ex:make"))).unwrap();
        doc.add_relation(Relation::new(RelationKind::WasAttributedTo, q("ex:c"), q("ex:team"))).unwrap();
        doc.add_relation(Relation::new(RelationKind::ActedOnBehalfOf, q("ex:team"), q("ex:boss"))).unwrap();

        let l1 = layer_view(&doc, Layer::L1Dashboard).unwrap();
        let ids: Vec<String> = l1.elements().map(|e| e.id.to_string()).collect();
        assert_eq!(ids, ["ex:d", "ex:make", "ex:s"]);
        assert_eq!(l1.relations().len(), 2);

        let l3 = layer_view(&doc, Layer::L3Individual).unwrap();
        let ids: Vec<String> = l3.elements().map(|e| e.id.to_string()).collect();
        assert_eq!(ids, ["ex:c", "ex:team"]);
        assert_eq!(l3.prefix_count(), doc.prefix_count());
    }

    #[test]
    fn empty_root_views_are_empty() {
        let doc = doc_with(&[("ex:d", Dashboard)], &[]);
        let view = layer_view(&doc, Layer::L3Individual).unwrap();
        assert_eq!(view.element_count(), 0);
        assert!(view.relations().is_empty());
        assert_eq!(view.prefix_count(), 4);
    }

    #[test]
    fn generic_collection_at_depth_one_is_a_subtopic() {
        let mut doc = doc_with(&[("ex:d", Dashboard)], &[]);
        doc.add_element(Element::new(q("ex:g"), ElementKind::collection(GenericEntity))).unwrap();
        doc.add_relation(Relation::new(RelationKind::HadMember, q("ex:d"), q("ex:g"))).unwrap();
        let layers = infer_layers(&doc).unwrap();
        assert!(layers.has_layer(&q("ex:g"), Layer::L2Subtopic));
    }
}
