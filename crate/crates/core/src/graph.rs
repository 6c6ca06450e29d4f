//! Graph helpers over selected relation kinds.

use std::collections::{BTreeMap, BTreeSet};

use petgraph::algo::tarjan_scc;
use petgraph::graphmap::DiGraphMap;

use crate::model::{ProvenanceDocument, QualifiedName, RelationKind};

/// Cycles among relations of `kinds`, one sorted member list per strongly
/// connected component (self-loops included), in sorted order.
pub fn cycles(doc: &ProvenanceDocument, kinds: &[RelationKind]) -> Vec<Vec<QualifiedName>> {
    let mut index: BTreeMap<&QualifiedName, usize> = BTreeMap::new();
    let mut names: Vec<&QualifiedName> = Vec::new();
    let mut graph = DiGraphMap::<usize, ()>::new();
    let mut self_loops = BTreeSet::new();
    for r in doc.relations().iter().filter(|r| kinds.contains(&r.kind)) {
        let s = node_index(&mut index, &mut names, &r.subject);
        let o = node_index(&mut index, &mut names, &r.object);
        if s == o {
            self_loops.insert(s);
        }
        graph.add_edge(s, o, ());
    }
    let mut out: Vec<Vec<QualifiedName>> = tarjan_scc(&graph)
        .into_iter()
        .filter(|scc| scc.len() > 1 || self_loops.contains(&scc[0]))
        .map(|scc| {
            let mut members: Vec<QualifiedName> = scc.into_iter().map(|i| names[i].clone()).collect();
            members.sort();
            members
        })
        .collect();
    out.sort();
    out
}

fn node_index<'a>(
    index: &mut BTreeMap<&'a QualifiedName, usize>,
    names: &mut Vec<&'a QualifiedName>,
    q: &'a QualifiedName,
) -> usize {
    *index.entry(q).or_insert_with(|| {
        names.push(q);
        names.len() - 1
    })
}

/// Outgoing adjacency for `kinds`, deduplicated and sorted per node.
pub fn successors(doc: &ProvenanceDocument, kinds: &[RelationKind]) -> BTreeMap<QualifiedName, Vec<QualifiedName>> {
    let mut adj: BTreeMap<QualifiedName, BTreeSet<QualifiedName>> = BTreeMap::new();
    for r in doc.relations().iter().filter(|r| kinds.contains(&r.kind)) {
        adj.entry(r.subject.clone()).or_default().insert(r.object.clone());
    }
    adj.into_iter().map(|(k, v)| (k, v.into_iter().collect())).collect()
}
