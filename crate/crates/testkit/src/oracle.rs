//! Brute-force recomputations. They share no code with the library's
//! traversals: distances come from Bellman-Ford style relaxation over the raw
//! relation list, membership depths from plain recursion.

use std::collections::{BTreeMap, BTreeSet};

use dashprov::layering::Layer;
use dashprov::{Category, EntityRefinement, ProvenanceDocument, QualifiedName, RelationKind};

fn edges(doc: &ProvenanceDocument, kinds: &[RelationKind]) -> Vec<(QualifiedName, QualifiedName)> {
    doc.relations()
        .iter()
        .filter(|r| kinds.contains(&r.kind))
        .map(|r| (r.subject.clone(), r.object.clone()))
        .collect()
}

/// Hop distance from `start` to every node it reaches, `start` at 0.
pub fn distances(edges: &[(QualifiedName, QualifiedName)], start: &QualifiedName) -> BTreeMap<QualifiedName, usize> {
    let mut dist = BTreeMap::from([(start.clone(), 0usize)]);
    for _ in 0..=edges.len() {
        let mut changed = false;
        for (s, o) in edges {
            if let Some(&ds) = dist.get(s) {
                let better = dist.get(o).is_none_or(|&d| ds + 1 < d);
                if better {
                    dist.insert(o.clone(), ds + 1);
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    dist
}

/// Lineage depths of `id` over derivation and primary-source edges.
pub fn lineage_depths(doc: &ProvenanceDocument, id: &QualifiedName) -> BTreeMap<QualifiedName, usize> {
    distances(&edges(doc, &[RelationKind::WasDerivedFrom, RelationKind::HadPrimarySource]), id)
}

/// Derivation edges leaving any node in the lineage of `id`.
pub fn lineage_edges(doc: &ProvenanceDocument, id: &QualifiedName) -> BTreeSet<(QualifiedName, RelationKind, QualifiedName)> {
    let reach = lineage_depths(doc, id);
    doc.relations()
        .iter()
        .filter(|r| matches!(r.kind, RelationKind::WasDerivedFrom | RelationKind::HadPrimarySource))
        .filter(|r| reach.contains_key(&r.subject))
        .map(|r| (r.subject.clone(), r.kind, r.object.clone()))
        .collect()
}

/// Principals of `agent` ordered by (hops, id), `agent` excluded.
pub fn delegation(doc: &ProvenanceDocument, agent: &QualifiedName) -> Vec<QualifiedName> {
    let mut found: Vec<(usize, QualifiedName)> = distances(&edges(doc, &[RelationKind::ActedOnBehalfOf]), agent)
        .into_iter()
        .filter(|(id, _)| id != agent)
        .map(|(id, d)| (d, id))
        .collect();
    found.sort();
    found.into_iter().map(|(_, id)| id).collect()
}

/// Direct attributions of `entity`, and the principals reached from them that
/// are not themselves direct.
pub fn attribution(doc: &ProvenanceDocument, entity: &QualifiedName) -> (BTreeSet<QualifiedName>, BTreeSet<QualifiedName>) {
    let direct: BTreeSet<QualifiedName> = doc
        .relations()
        .iter()
        .filter(|r| r.kind == RelationKind::WasAttributedTo && &r.subject == entity)
        .map(|r| r.object.clone())
        .collect();
    let delegations = edges(doc, &[RelationKind::ActedOnBehalfOf]);
    let via = direct
        .iter()
        .flat_map(|a| distances(&delegations, a).into_keys())
        .filter(|p| !direct.contains(p))
        .collect();
    (direct, via)
}

/// Why the naive layering refused a document.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LayerRefusal {
    Root,
    Cycle,
    Depth,
}

fn on_cycle(children: &BTreeMap<&QualifiedName, Vec<&QualifiedName>>, node: &QualifiedName, stack: &mut Vec<QualifiedName>) -> bool {
    if stack.contains(node) {
        return true;
    }
    stack.push(node.clone());
    let found = children.get(node).into_iter().flatten().any(|c| on_cycle(children, c, stack));
    stack.pop();
    found
}

/// Layers recomputed by walking every membership path from the dashboard.
pub fn layers(doc: &ProvenanceDocument) -> Result<BTreeMap<QualifiedName, BTreeSet<Layer>>, LayerRefusal> {
    let refinement = |id: &QualifiedName| doc.element(id).and_then(|e| e.kind.entity_refinement());
    let roots: Vec<QualifiedName> = doc
        .elements()
        .filter(|e| e.kind.entity_refinement() == Some(EntityRefinement::Dashboard))
        .map(|e| e.id.clone())
        .collect();
    let [root] = roots.as_slice() else {
        return Err(LayerRefusal::Root);
    };

    let mut children: BTreeMap<&QualifiedName, Vec<&QualifiedName>> = BTreeMap::new();
    for r in doc.relations().iter().filter(|r| r.kind == RelationKind::HadMember) {
        children.entry(&r.subject).or_default().push(&r.object);
    }
    let nodes: BTreeSet<&QualifiedName> = children.keys().copied().collect();
    if nodes.iter().any(|n| on_cycle(&children, n, &mut Vec::new())) {
        return Err(LayerRefusal::Cycle);
    }

    let mut depths: BTreeMap<QualifiedName, BTreeSet<usize>> = BTreeMap::new();
    fn walk(
        doc: &ProvenanceDocument,
        children: &BTreeMap<&QualifiedName, Vec<&QualifiedName>>,
        node: &QualifiedName,
        depth: usize,
        depths: &mut BTreeMap<QualifiedName, BTreeSet<usize>>,
    ) -> Result<(), LayerRefusal> {
        let Some(element) = doc.element(node) else {
            return Ok(());
        };
        if depth > 2 || (depth == 2 && element.kind.is_collection()) {
            return Err(LayerRefusal::Depth);
        }
        depths.entry(node.clone()).or_default().insert(depth);
        for child in children.get(node).into_iter().flatten() {
            walk(doc, children, child, depth + 1, depths)?;
        }
        Ok(())
    }
    walk(doc, &children, root, 0, &mut depths)?;

    let mut out: BTreeMap<QualifiedName, BTreeSet<Layer>> = BTreeMap::new();
    for e in doc.elements().filter(|e| e.category() == Category::Entity) {
        if refinement(&e.id) == Some(EntityRefinement::DataEntity) {
            continue;
        }
        let at = depths.get(&e.id);
        let layer = match at {
            Some(d) if d.contains(&0) => Layer::L1Dashboard,
            Some(d) if d.contains(&1) && e.kind.is_collection() => Layer::L2Subtopic,
            Some(_) => Layer::L3Individual,
            None => Layer::Unlayered,
        };
        out.insert(e.id.clone(), BTreeSet::from([layer]));
    }
    let mut data: BTreeMap<QualifiedName, BTreeSet<Layer>> = BTreeMap::new();
    for e in doc.elements().filter(|e| refinement(&e.id) == Some(EntityRefinement::DataEntity)) {
        let mut set: BTreeSet<Layer> = doc
            .relations()
            .iter()
            .filter(|r| r.kind == RelationKind::WasDerivedFrom && r.object == e.id)
            .filter_map(|r| out.get(&r.subject))
            .flatten()
            .copied()
            .filter(|l| *l != Layer::Unlayered)
            .collect();
        if set.is_empty() {
            set.insert(Layer::Unlayered);
        }
        data.insert(e.id.clone(), set);
    }
    out.extend(data);
    Ok(out)
}

/// Maximum membership depth below the dashboard over all paths.
pub fn max_membership_depth(doc: &ProvenanceDocument, root: &QualifiedName) -> usize {
    let member_edges = edges(doc, &[RelationKind::HadMember]);
    fn deepest(edges: &[(QualifiedName, QualifiedName)], node: &QualifiedName, guard: usize) -> usize {
        if guard == 0 {
            return usize::MAX;
        }
        edges
            .iter()
            .filter(|(s, _)| s == node)
            .map(|(_, o)| deepest(edges, o, guard - 1).saturating_add(1))
            .max()
            .unwrap_or(0)
    }
    deepest(&member_edges, root, 16)
}
