//! Random documents. Every generator is driven by a caller-supplied RNG so
//! failures replay from a seed.

use dashprov::{
    ActivityRefinement, AgentRefinement, Category, Element, ElementKind, EntityRefinement, ProvenanceDocument,
    QualifiedName, Relation, RelationKind, Timestamp,
};
use rand::seq::SliceRandom;
use rand::Rng;

use crate::q;

const EX: &str = "http://example.org/random#";
const EXT: &str = "http://example.org/ext#";
const DEFAULT: &str = "http://example.org/default#";

const PALETTE: &[char] = &[
    'a', 'b', 'z', 'A', 'Q', '0', '7', ' ', ' ', '-', '.', ',', ';', ':', '#', '"', '\'', '\\', '\n', '\t', '\r', '<',
    '>', '&', '{', '}', '[', ']', '@', '^', 'é', 'ã', 'Ó', 'ç', '€', '→', '💡',
];

const URLS: &[&str] = &[
    "https://example.org/",
    "http://example.org/a/b?c=1&d=2",
    "https://saúde.example/painel#top",
    "https://example.org/with%20space",
];

pub fn text<R: Rng>(rng: &mut R) -> String {
    let len = rng.gen_range(0..24);
    (0..len).map(|_| *PALETTE.choose(rng).unwrap()).collect()
}

fn maybe_text<R: Rng>(rng: &mut R, p: f64) -> Option<String> {
    rng.gen_bool(p).then(|| text(rng))
}

fn texts<R: Rng>(rng: &mut R) -> Vec<String> {
    let n = if rng.gen_bool(0.6) { 0 } else { rng.gen_range(1..4) };
    (0..n).map(|_| text(rng)).collect()
}

pub fn timestamp<R: Rng>(rng: &mut R) -> Timestamp {
    let offset = ["Z", "+00:00", "-03:00", "+05:30"].choose(rng).unwrap();
    let millis = if rng.gen_bool(0.3) { format!(".{:03}", rng.gen_range(0..1000)) } else { String::new() };
    let s = format!(
        "{:04}-{:02}-{:02}T{:02}:{:02}:{:02}{millis}{offset}",
        rng.gen_range(1990..2031),
        rng.gen_range(1..13),
        rng.gen_range(1..29),
        rng.gen_range(0..24),
        rng.gen_range(0..60),
        rng.gen_range(0..60),
    );
    Timestamp::parse(&s).expect("generated timestamps are valid")
}

fn local<R: Rng>(rng: &mut R, i: usize) -> String {
    match rng.gen_range(0..5) {
        0 => format!("e{i}"),
        1 => format!("Óbito-{i}"),
        2 => format!("_{i}.v2"),
        3 => format!("{i}"),
        _ => format!("n{i}-x_y.z"),
    }
}

fn kind<R: Rng>(rng: &mut R) -> ElementKind {
    match rng.gen_range(0..3) {
        0 => {
            let refinement = *EntityRefinement::ALL.choose(rng).unwrap();
            if refinement.requires_collection() || rng.gen_bool(0.3) {
                ElementKind::collection(refinement)
            } else {
                ElementKind::entity(refinement)
            }
        }
        1 => ElementKind::Activity(*ActivityRefinement::ALL.choose(rng).unwrap()),
        _ => ElementKind::Agent(*AgentRefinement::ALL.choose(rng).unwrap()),
    }
}

fn extensions<R: Rng>(rng: &mut R) -> Vec<(QualifiedName, String)> {
    let n = if rng.gen_bool(0.7) { 0 } else { rng.gen_range(1..4) };
    (0..n).map(|_| (q(&format!("ext:k{}", rng.gen_range(0..3))), text(rng))).collect()
}

fn random_element<R: Rng>(rng: &mut R, id: QualifiedName) -> Element {
    let mut e = Element::new(id, kind(rng));
    let d = &mut e.dash;
    d.name = maybe_text(rng, 0.7);
    d.version = maybe_text(rng, 0.3);
    d.roles = texts(rng);
    d.description = maybe_text(rng, 0.4);
    d.annotations = texts(rng);
    d.contact_information = maybe_text(rng, 0.2);
    d.trustworthiness = maybe_text(rng, 0.2);
    d.url = rng.gen_bool(0.3).then(|| URLS.choose(rng).unwrap().to_string());
    d.extensions = extensions(rng);
    match e.category() {
        Category::Entity => e.generated_at = rng.gen_bool(0.3).then(|| timestamp(rng)),
        Category::Activity => {
            let mut times = [rng.gen_bool(0.4).then(|| timestamp(rng)), rng.gen_bool(0.4).then(|| timestamp(rng))];
            if let [Some(a), Some(b)] = times {
                if a.as_datetime() > b.as_datetime() {
                    times = [Some(b), Some(a)];
                }
            }
            [e.started_at, e.ended_at] = times;
        }
        Category::Agent => {}
    }
    e
}

/// A document with at most `max_elements` elements of every kind, full dash
/// metadata, extensions, qualified relations and awkward string content.
/// Relations respect their signatures; cycles and duplicates may occur.
pub fn random_document<R: Rng>(rng: &mut R, max_elements: usize) -> ProvenanceDocument {
    let mut doc = ProvenanceDocument::new();
    doc.declare_prefix("ex", EX).unwrap();
    doc.declare_prefix("ext", EXT).unwrap();
    let with_default = rng.gen_bool(0.3);
    if with_default {
        doc.declare_prefix("", DEFAULT).unwrap();
    }
    let n = rng.gen_range(0..=max_elements);
    for i in 0..n {
        let prefix = if with_default && rng.gen_bool(0.3) { "" } else { "ex" };
        let id = QualifiedName::new(prefix, local(rng, i)).unwrap();
        doc.add_element(random_element(rng, id)).unwrap();
    }

    let ids: Vec<(QualifiedName, Category, bool)> =
        doc.elements().map(|e| (e.id.clone(), e.category(), e.kind.is_collection())).collect();
    let pick = |rng: &mut R, category: Category, collection: bool| -> Option<QualifiedName> {
        let pool: Vec<&QualifiedName> = ids
            .iter()
            .filter(|(_, c, coll)| *c == category && (!collection || *coll))
            .map(|(id, _, _)| id)
            .collect();
        pool.choose(rng).map(|id| (*id).clone())
    };
    let m = if n == 0 { 0 } else { rng.gen_range(0..=2 * n) };
    for _ in 0..m {
        let kind = *RelationKind::ALL.choose(rng).unwrap();
        let (sc, oc) = kind.signature();
        let (Some(s), Some(o)) = (pick(rng, sc, kind.requires_collection_subject()), pick(rng, oc, false)) else {
            continue;
        };
        let mut r = Relation::new(kind, s, o);
        r.at_time = rng.gen_bool(0.15).then(|| timestamp(rng));
        if rng.gen_bool(0.15) {
            r.attributes = extensions(rng);
        }
        doc.add_relation(r).unwrap();
    }
    doc
}

/// Entities linked by derivation edges and agents linked by delegation edges,
/// both acyclic, plus attributions from entities to agents. At most `max_nodes`
/// elements.
pub fn random_dag<R: Rng>(rng: &mut R, max_nodes: usize) -> ProvenanceDocument {
    let mut doc = ProvenanceDocument::new();
    doc.declare_prefix("ex", EX).unwrap();
    let n = rng.gen_range(1..=max_nodes.max(1));
    let agents = (n / 4).max(1).min(n);
    let entities = n - agents;

    let mut entity_ids: Vec<QualifiedName> = (0..entities).map(|i| q(&format!("ex:e{i}"))).collect();
    let mut agent_ids: Vec<QualifiedName> = (0..agents).map(|i| q(&format!("ex:a{i}"))).collect();
    for id in &entity_ids {
        doc.add_element(Element::entity(id.clone(), *EntityRefinement::ALL.choose(rng).unwrap())).unwrap();
    }
    for id in &agent_ids {
        let mut agent = Element::agent(id.clone(), *AgentRefinement::ALL.choose(rng).unwrap());
        agent.dash.roles = (0..rng.gen_range(0..3)).map(|k| format!("role{k}")).collect();
        doc.add_element(agent).unwrap();
    }
    // A random topological order; edges only point forward in it.
    entity_ids.shuffle(rng);
    agent_ids.shuffle(rng);
    let forward_edges = |rng: &mut R, ids: &[QualifiedName], mean_out: f64| {
        let mut edges = Vec::new();
        for i in 0..ids.len() {
            let later = ids.len() - i - 1;
            if later == 0 {
                continue;
            }
            let p = (mean_out / later as f64).min(1.0);
            for j in i + 1..ids.len() {
                if rng.gen_bool(p) {
                    edges.push((ids[i].clone(), ids[j].clone()));
                }
            }
        }
        edges
    };
    for (s, o) in forward_edges(rng, &entity_ids, 2.0) {
        let kind = if rng.gen_bool(0.8) { RelationKind::WasDerivedFrom } else { RelationKind::HadPrimarySource };
        doc.add_relation(Relation::new(kind, s, o)).unwrap();
    }
    for (s, o) in forward_edges(rng, &agent_ids, 1.2) {
        doc.add_relation(Relation::new(RelationKind::ActedOnBehalfOf, s, o)).unwrap();
    }
    for e in &entity_ids {
        for _ in 0..rng.gen_range(0..3) {
            let a = agent_ids.choose(rng).unwrap().clone();
            doc.add_relation(Relation::new(RelationKind::WasAttributedTo, e.clone(), a)).unwrap();
        }
    }
    doc
}

/// Shape options for [`random_membership_tree`].
#[derive(Debug, Clone, Copy)]
pub struct TreeShape {
    /// Whether subtopic collections sit between the dashboard and its charts.
    pub layer_two: bool,
    /// Whether the generator may nest membership too deeply.
    pub allow_too_deep: bool,
}

/// A dashboard membership tree of at most `max_nodes` entities with charts
/// shared between subtopics, unreachable entities, and data entities that
/// charts derive from.
pub fn random_membership_tree<R: Rng>(rng: &mut R, max_nodes: usize, shape: TreeShape) -> ProvenanceDocument {
    let mut doc = ProvenanceDocument::new();
    doc.declare_prefix("ex", EX).unwrap();
    let n = rng.gen_range(1..=max_nodes.max(1));
    let root = q("ex:dashboard");
    doc.add_element(Element::entity(root.clone(), EntityRefinement::Dashboard)).unwrap();
    let mut members = Vec::new();
    let mut subtopics = Vec::new();
    let mut charts = Vec::new();

    let rest = n - 1;
    let n_sub = if shape.layer_two && rest > 0 { rng.gen_range(1..=(rest / 4).max(1)) } else { 0 };
    for i in 0..n_sub {
        let id = q(&format!("ex:s{i}"));
        let refinement = if rng.gen_bool(0.8) { EntityRefinement::SubtopicCollection } else { EntityRefinement::GenericEntity };
        doc.add_element(Element::new(id.clone(), ElementKind::collection(refinement))).unwrap();
        members.push((root.clone(), id.clone()));
        subtopics.push(id);
    }
    let mut data = Vec::new();
    for i in 0..rest - n_sub {
        let roll = rng.gen_range(0..10);
        if roll == 0 {
            let id = q(&format!("ex:data{i}"));
            doc.add_element(Element::entity(id.clone(), EntityRefinement::DataEntity)).unwrap();
            data.push(id);
            continue;
        }
        let id = q(&format!("ex:c{i}"));
        doc.add_element(Element::entity(id.clone(), EntityRefinement::VisualEntity)).unwrap();
        if roll == 1 {
            // Unreachable from the dashboard.
        } else if subtopics.is_empty() || roll == 2 {
            members.push((root.clone(), id.clone()));
        } else {
            let k = rng.gen_range(1..=2);
            for s in subtopics.choose_multiple(rng, k) {
                members.push((s.clone(), id.clone()));
            }
        }
        charts.push(id);
    }
    if shape.allow_too_deep && !subtopics.is_empty() && rng.gen_bool(0.3) {
        // A collection at depth two, optionally with a member at depth three.
        let deep = q("ex:deep");
        doc.add_element(Element::new(deep.clone(), ElementKind::collection(EntityRefinement::GenericEntity))).unwrap();
        members.push((subtopics.choose(rng).unwrap().clone(), deep.clone()));
        if rng.gen_bool(0.5) {
            let deeper = q("ex:deeper");
            doc.add_element(Element::entity(deeper.clone(), EntityRefinement::VisualEntity)).unwrap();
            members.push((deep, deeper));
        }
    }
    for (s, o) in members {
        doc.add_relation(Relation::new(RelationKind::HadMember, s, o)).unwrap();
    }
    if !data.is_empty() {
        let sources: Vec<QualifiedName> = charts.iter().chain(&subtopics).chain([&root]).cloned().collect();
        for _ in 0..rng.gen_range(0..=sources.len()) {
            let s = sources.choose(rng).unwrap().clone();
            let d = data.choose(rng).unwrap().clone();
            doc.add_relation(Relation::new(RelationKind::WasDerivedFrom, s, d)).unwrap();
        }
        if data.len() > 1 {
            doc.add_relation(Relation::new(RelationKind::WasDerivedFrom, data[0].clone(), data[1].clone())).unwrap();
        }
    }
    doc
}
