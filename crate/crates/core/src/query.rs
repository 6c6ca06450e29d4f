//! Read-only analyses: lineage, delegation, attribution, freshness, counts.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::Serialize;
use thiserror::Error;

use crate::graph;
use crate::layering::{self, Layer};
use crate::model::{
    ActivityRefinement, Category, ElementKind, EntityRefinement, ProvenanceDocument, QualifiedName, RelationKind,
    Timestamp,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QueryError {
    #[error("unknown identifier `{0}`")]
    UnknownIdentifier(QualifiedName),
    #[error("`{id}` is not an {expected}")]
    WrongCategory { id: QualifiedName, expected: Category },
    #[error("derivation cycle through {}", join(.0))]
    CyclicDerivation(Vec<QualifiedName>),
    #[error("delegation cycle through {}", join(.0))]
    CyclicDelegation(Vec<QualifiedName>),
}

fn join(ids: &[QualifiedName]) -> String {
    ids.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

fn expect(doc: &ProvenanceDocument, id: &QualifiedName, category: Category) -> Result<(), QueryError> {
    let element = doc.element(id).ok_or_else(|| QueryError::UnknownIdentifier(id.clone()))?;
    if element.category() != category {
        return Err(QueryError::WrongCategory { id: id.clone(), expected: category });
    }
    Ok(())
}

pub const DERIVATION_KINDS: [RelationKind; 2] = [RelationKind::WasDerivedFrom, RelationKind::HadPrimarySource];

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct LineageEdge {
    pub subject: QualifiedName,
    pub kind: RelationKind,
    pub object: QualifiedName,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct LineageReport {
    pub root: QualifiedName,
    pub edges: Vec<LineageEdge>,
    pub depth_by_node: BTreeMap<QualifiedName, usize>,
}

impl LineageReport {
    /// Nodes reached from the root, excluding the root, by (depth, id).
    pub fn closure(&self) -> Vec<&QualifiedName> {
        let mut nodes: Vec<(&usize, &QualifiedName)> =
            self.depth_by_node.iter().filter(|(id, _)| **id != self.root).map(|(id, d)| (d, id)).collect();
        nodes.sort();
        nodes.into_iter().map(|(_, id)| id).collect()
    }
}

/// Shortest-hop depths from `start`, start included at 0.
fn bfs_depths(
    adjacency: &BTreeMap<QualifiedName, Vec<QualifiedName>>,
    start: &QualifiedName,
) -> BTreeMap<QualifiedName, usize> {
    let mut depth = BTreeMap::from([(start.clone(), 0)]);
    let mut queue = VecDeque::from([start.clone()]);
    while let Some(node) = queue.pop_front() {
        let d = depth[&node];
        for next in adjacency.get(&node).into_iter().flatten() {
            if !depth.contains_key(next) {
                depth.insert(next.clone(), d + 1);
                queue.push_back(next.clone());
            }
        }
    }
    depth
}

/// Everything `id` was derived from, directly or transitively.
pub fn lineage(doc: &ProvenanceDocument, id: &QualifiedName) -> Result<LineageReport, QueryError> {
    expect(doc, id, Category::Entity)?;
    if let Some(cycle) = graph::cycles(doc, &DERIVATION_KINDS).into_iter().next() {
        return Err(QueryError::CyclicDerivation(cycle));
    }
    let depth_by_node = bfs_depths(&graph::successors(doc, &DERIVATION_KINDS), id);
    let edges: BTreeSet<(usize, LineageEdge)> = doc
        .relations()
        .iter()
        .filter(|r| DERIVATION_KINDS.contains(&r.kind))
        .filter_map(|r| {
            let d = *depth_by_node.get(&r.subject)?;
            Some((d, LineageEdge { subject: r.subject.clone(), kind: r.kind, object: r.object.clone() }))
        })
        .collect();
    Ok(LineageReport {
        root: id.clone(),
        edges: edges.into_iter().map(|(_, e)| e).collect(),
        depth_by_node,
    })
}

/// Principals reachable from `agent` through `actedOnBehalfOf`, ordered by
/// hop count then id. The agent itself is not included.
pub fn delegation_chain(doc: &ProvenanceDocument, agent: &QualifiedName) -> Result<Vec<QualifiedName>, QueryError> {
    expect(doc, agent, Category::Agent)?;
    if let Some(cycle) = graph::cycles(doc, &[RelationKind::ActedOnBehalfOf]).into_iter().next() {
        return Err(QueryError::CyclicDelegation(cycle));
    }
    Ok(delegation_closure(doc, agent))
}

pub(crate) fn delegation_closure(doc: &ProvenanceDocument, agent: &QualifiedName) -> Vec<QualifiedName> {
    let depths = bfs_depths(&graph::successors(doc, &[RelationKind::ActedOnBehalfOf]), agent);
    let mut chain: Vec<(usize, QualifiedName)> =
        depths.into_iter().filter(|(id, _)| id != agent).map(|(id, d)| (d, id)).collect();
    chain.sort();
    chain.into_iter().map(|(_, id)| id).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Attribution {
    pub agent: QualifiedName,
    pub roles: Vec<String>,
    pub via_delegation: bool,
}

/// Agents responsible for entity `id`: direct attributions first, then the
/// principals they act for, each group in id order without repeats.
pub fn attribution(doc: &ProvenanceDocument, id: &QualifiedName) -> Result<Vec<Attribution>, QueryError> {
    expect(doc, id, Category::Entity)?;
    let direct: BTreeSet<QualifiedName> = doc
        .relations_of(RelationKind::WasAttributedTo)
        .filter(|r| &r.subject == id)
        .map(|r| r.object.clone())
        .collect();
    let adjacency = graph::successors(doc, &[RelationKind::ActedOnBehalfOf]);
    let mut principals = BTreeSet::new();
    for agent in &direct {
        principals.extend(bfs_depths(&adjacency, agent).into_keys());
    }
    let roles = |agent: &QualifiedName| doc.element(agent).map(|e| e.dash.roles.clone()).unwrap_or_default();
    let mut out: Vec<Attribution> =
        direct.iter().map(|a| Attribution { agent: a.clone(), roles: roles(a), via_delegation: false }).collect();
    out.extend(
        principals
            .iter()
            .filter(|p| !direct.contains(*p))
            .map(|p| Attribution { agent: p.clone(), roles: roles(p), via_delegation: true }),
    );
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct FreshnessReport {
    pub entity: QualifiedName,
    pub latest_generation: Option<Timestamp>,
    pub latest_update_activity_end: Option<Timestamp>,
    pub effective_freshness: Option<Timestamp>,
}

/// How current entity `id` is: its own generation time against the end of
/// the latest data update that produced or read it or anything it derives from.
pub fn freshness(doc: &ProvenanceDocument, id: &QualifiedName) -> Result<FreshnessReport, QueryError> {
    expect(doc, id, Category::Entity)?;
    let scope: BTreeSet<QualifiedName> = bfs_depths(&graph::successors(doc, &DERIVATION_KINDS), id).into_keys().collect();
    let latest_update_activity_end = doc
        .relations()
        .iter()
        .filter_map(|r| match r.kind {
            RelationKind::WasGeneratedBy if scope.contains(&r.subject) => Some(&r.object),
            RelationKind::Used if scope.contains(&r.object) => Some(&r.subject),
            _ => None,
        })
        .filter_map(|a| doc.element(a))
        .filter(|a| a.kind == ElementKind::Activity(ActivityRefinement::DataUpdate))
        .filter_map(|a| a.ended_at)
        .max();
    let latest_generation = doc.element(id).and_then(|e| e.generated_at);
    Ok(FreshnessReport {
        entity: id.clone(),
        latest_generation,
        latest_update_activity_end,
        effective_freshness: latest_generation.max(latest_update_activity_end),
    })
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CategoryCounts {
    pub entity: usize,
    pub activity: usize,
    pub agent: usize,
    pub total: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct LayerCounts {
    pub l1: usize,
    pub l2: usize,
    pub l3: usize,
    pub unlayered: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Stats {
    pub elements: CategoryCounts,
    pub refinements: BTreeMap<String, usize>,
    pub relations: BTreeMap<String, usize>,
    pub relation_total: usize,
    /// Non-data entities per layer; all zero when layering fails.
    pub layers: LayerCounts,
    pub layering_error: Option<String>,
    pub prefixes: usize,
}

pub fn stats(doc: &ProvenanceDocument) -> Stats {
    let mut elements = CategoryCounts::default();
    let mut refinements = BTreeMap::new();
    for e in doc.elements() {
        match e.category() {
            Category::Entity => elements.entity += 1,
            Category::Activity => elements.activity += 1,
            Category::Agent => elements.agent += 1,
        }
        elements.total += 1;
        *refinements.entry(e.kind.refinement_label().to_string()).or_insert(0) += 1;
    }
    let relations = RelationKind::ALL
        .iter()
        .map(|k| (k.term().to_string(), doc.relations_of(*k).count()))
        .collect();

    let mut layers = LayerCounts::default();
    let layering_error = match layering::infer_layers(doc) {
        Ok(assignment) => {
            for (id, set) in assignment.iter() {
                let is_data = doc.element(id).and_then(|e| e.kind.entity_refinement())
                    == Some(EntityRefinement::DataEntity);
                if is_data {
                    continue;
                }
                for layer in set {
                    match layer {
                        Layer::L1Dashboard => layers.l1 += 1,
                        Layer::L2Subtopic => layers.l2 += 1,
                        Layer::L3Individual => layers.l3 += 1,
                        Layer::Unlayered => layers.unlayered += 1,
                    }
                }
            }
            None
        }
        Err(err) => Some(err.to_string()),
    };
    Stats {
        elements,
        refinements,
        relations,
        relation_total: doc.relations().len(),
        layers,
        layering_error,
        prefixes: doc.prefix_count(),
    }
}
