use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::{RenderError, RenderOptions};
use crate::layering::{self, Layer};
use crate::model::{Category, Element, ProvenanceDocument};

/// Graphviz reads `\"` as an escaped quote even after another backslash, so
/// backslashes are written as an entity reference instead.
fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("&#92;"),
            '\n' => out.push_str("\\n"),
            '\r' => {}
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn style(category: Category) -> &'static str {
    match category {
        Category::Entity => "shape=ellipse, style=filled, fillcolor=\"#FFFC87\"",
        Category::Activity => "shape=box, style=filled, fillcolor=\"#9FB1FC\"",
        Category::Agent => "shape=house, style=filled, fillcolor=\"#FED37F\"",
    }
}

fn label(e: &Element, opts: &RenderOptions) -> String {
    let mut lines = vec![e.name().map_or_else(|| e.id.to_string(), str::to_string)];
    if opts.include_attributes {
        if e.name().is_some() {
            lines.push(e.id.to_string());
        }
        let d = &e.dash;
        for (key, value) in [
            ("version", &d.version),
            ("description", &d.description),
            ("contact", &d.contact_information),
            ("trustworthiness", &d.trustworthiness),
            ("url", &d.url),
        ] {
            if let Some(v) = value {
                lines.push(format!("{key}: {v}"));
            }
        }
        if !d.roles.is_empty() {
            lines.push(format!("role: {}", d.roles.join(", ")));
        }
        for (key, ts) in [("generated", &e.generated_at), ("started", &e.started_at), ("ended", &e.ended_at)] {
            if let Some(ts) = ts {
                lines.push(format!("{key}: {ts}"));
            }
        }
    }
    lines.join("\n")
}

fn node(out: &mut String, indent: &str, e: &Element, opts: &RenderOptions) {
    let _ = writeln!(out, "{indent}{} [label={}, {}];", quote(&e.id.to_string()), quote(&label(e, opts)), style(e.category()));
}

/// Graphviz digraph with one node per element and one edge per relation.
///
/// When the layers can be inferred, entities holding exactly one layer are
/// grouped into one cluster per layer.
pub fn to_dot(doc: &ProvenanceDocument, opts: &RenderOptions) -> Result<String, RenderError> {
    let view;
    let doc = match opts.layer_filter {
        Some(Layer::Unlayered) => return Err(RenderError::UnlayeredFilter),
        Some(layer) => {
            view = layering::layer_view(doc, layer)?;
            &view
        }
        None => doc,
    };

    let mut clusters: BTreeMap<Layer, Vec<&Element>> = BTreeMap::new();
    let mut loose: Vec<&Element> = Vec::new();
    let assignment = layering::infer_layers(doc).ok();
    for e in doc.elements() {
        let single = assignment
            .as_ref()
            .and_then(|a| a.layers_of(&e.id))
            .filter(|set| set.len() == 1)
            .and_then(|set| set.first().copied())
            .filter(|l| *l != Layer::Unlayered);
        match single {
            Some(layer) => clusters.entry(layer).or_default().push(e),
            None => loose.push(e),
        }
    }

    let mut out = String::from("digraph provenance {\n");
    if let Some(title) = &opts.title {
        let _ = writeln!(out, "  label={};", quote(title));
        out.push_str("  labelloc=t;\n");
    }
    for (layer, members) in &clusters {
        let n = layer.number().expect("clusters hold layered entities");
        let _ = writeln!(out, "  subgraph cluster_l{n} {{");
        let _ = writeln!(out, "    label={};", quote(&format!("Layer {n}: {}", layer.title())));
        for e in members {
            node(&mut out, "    ", e, opts);
        }
        out.push_str("  }\n");
    }
    for e in loose {
        node(&mut out, "  ", e, opts);
    }
    for r in doc.relations() {
        let mut edge_label = r.kind.term().to_string();
        if opts.include_attributes {
            if let Some(ts) = &r.at_time {
                let _ = write!(edge_label, "\n{ts}");
            }
        }
        let _ = writeln!(
            out,
            "  {} -> {} [label={}];",
            quote(&r.subject.to_string()),
            quote(&r.object.to_string()),
            quote(&edge_label)
        );
    }
    out.push_str("}\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{AgentRefinement, EntityRefinement, QualifiedName, Relation, RelationKind};

    fn q(s: &str) -> QualifiedName {
        s.parse().unwrap()
    }

    #[test]
    fn empty_document_has_empty_body() {
        let dot = to_dot(&ProvenanceDocument::new(), &RenderOptions::default()).unwrap();
        assert_eq!(dot, "digraph provenance {\n}\n");
    }

    #[test]
    fn shapes_clusters_and_escaping() {
        let mut doc = ProvenanceDocument::new();
        doc.declare_prefix("ex", "http://e/").unwrap();
        doc.add_element(Element::entity(q("ex:d"), EntityRefinement::Dashboard).with_name("Say \"hi\"")).unwrap();
        doc.add_element(Element::agent(q("ex:a"), AgentRefinement::Person)).unwrap();
        doc.add_relation(Relation::new(RelationKind::WasAttributedTo, q("ex:d"), q("ex:a"))).unwrap();
        let dot = to_dot(&doc, &RenderOptions::default()).unwrap();
        assert!(dot.contains("subgraph cluster_l1 {"));
        assert!(dot.contains("\"ex:d\" [label=\"Say \\\"hi\\\"\", shape=ellipse"));
        assert!(dot.contains("\"ex:a\" [label=\"ex:a\", shape=house"));
        assert!(dot.contains("\"ex:d\" -> \"ex:a\" [label=\"wasAttributedTo\"];"));
        assert_eq!(
            to_dot(&doc, &RenderOptions { layer_filter: Some(Layer::Unlayered), ..Default::default() }),
            Err(RenderError::UnlayeredFilter)
        );
    }
}
