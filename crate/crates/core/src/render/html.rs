use std::fmt::Write as _;

use super::{RenderError, RenderOptions};
use crate::layering::{self, Layer, LayerAssignment};
use crate::model::{Category, Element, EntityRefinement, ProvenanceDocument, QualifiedName, RelationKind};
use crate::query;

const STYLE: &str = "body{font-family:sans-serif;margin:2em;max-width:60em}\
section{border-top:2px solid #888;margin-top:2em}\
.entity,.data{background:#FFFC87;padding:.5em;margin:.5em 0}\
.data{border-left:4px solid #B8B000}\
.agent{background:#FED37F}\
.activity{background:#9FB1FC}\
dt{font-weight:bold}\
.empty{color:#666;font-style:italic}";

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&#39;"),
            c => out.push(c),
        }
    }
    out
}

fn display_name(doc: &ProvenanceDocument, id: &QualifiedName) -> String {
    doc.element(id).and_then(Element::name).map_or_else(|| id.to_string(), str::to_string)
}

fn link(url: &str) -> String {
    let lower = url.to_ascii_lowercase();
    if lower.starts_with("http://") || lower.starts_with("https://") {
        format!("<a href=\"{0}\">{0}</a>", escape(url))
    } else {
        escape(url)
    }
}

fn entity_block(out: &mut String, e: &Element, class: &str) {
    let _ = writeln!(out, "<div class=\"{class}\" id=\"{}\">", escape(&e.id.to_string()));
    let _ = writeln!(out, "<h3>{}</h3>", escape(e.name().unwrap_or("(unnamed)")));
    out.push_str("<dl>\n");
    let _ = writeln!(out, "<dt>id</dt><dd><code>{}</code></dd>", escape(&e.id.to_string()));
    let _ = writeln!(out, "<dt>kind</dt><dd>{}</dd>", escape(e.kind.refinement_label()));
    let d = &e.dash;
    for (key, value) in [
        ("description", &d.description),
        ("version", &d.version),
        ("contact", &d.contact_information),
        ("trustworthiness", &d.trustworthiness),
    ] {
        if let Some(v) = value {
            let _ = writeln!(out, "<dt>{key}</dt><dd>{}</dd>", escape(v));
        }
    }
    if let Some(url) = &d.url {
        let _ = writeln!(out, "<dt>url</dt><dd>{}</dd>", link(url));
    }
    if !d.annotations.is_empty() {
        out.push_str("<dt>annotations</dt><dd><ul>");
        for a in &d.annotations {
            let _ = write!(out, "<li>{}</li>", escape(a));
        }
        out.push_str("</ul></dd>\n");
    }
    if let Some(ts) = &e.generated_at {
        let _ = writeln!(out, "<dt>generated</dt><dd>{ts}</dd>");
    }
    out.push_str("</dl>\n</div>\n");
}

fn agent_item(out: &mut String, doc: &ProvenanceDocument, agent: &Element) {
    let _ = write!(out, "<li class=\"agent\"><strong>{}</strong> <code>{}</code>", escape(&display_name(doc, &agent.id)), escape(&agent.id.to_string()));
    if !agent.dash.roles.is_empty() {
        let roles: Vec<String> = agent.dash.roles.iter().map(|r| escape(r)).collect();
        let _ = write!(out, "; role: {}", roles.join(", "));
    }
    if let Some(url) = &agent.dash.url {
        let _ = write!(out, "; {}", link(url));
    }
    let chain = query::delegation_closure(doc, &agent.id);
    if !chain.is_empty() {
        let mut names = vec![escape(&display_name(doc, &agent.id))];
        names.extend(chain.iter().map(|p| escape(&display_name(doc, p))));
        let _ = write!(out, "<br>delegation: <span class=\"chain\">{}</span>", names.join(" &rarr; "));
    }
    out.push_str("</li>\n");
}

fn activity_item(out: &mut String, doc: &ProvenanceDocument, activity: &Element) {
    let time = |t: &Option<crate::model::Timestamp>| t.map_or_else(|| "unknown".to_string(), |t| t.to_string());
    let _ = writeln!(
        out,
        "<li class=\"activity\"><strong>{}</strong> <code>{}</code> ({}): {} to {}</li>",
        escape(&display_name(doc, &activity.id)),
        escape(&activity.id.to_string()),
        escape(activity.kind.refinement_label()),
        time(&activity.started_at),
        time(&activity.ended_at)
    );
}

fn section(out: &mut String, doc: &ProvenanceDocument, assignment: &LayerAssignment, layer: Layer) {
    let n = layer.number().expect("only layered sections are rendered");
    let _ = writeln!(out, "<section id=\"layer-{n}\">\n<h2>Layer {n}: {}</h2>", layer.title());
    let entities: Vec<&Element> = assignment.in_layer(layer).into_iter().filter_map(|id| doc.element(id)).collect();
    if entities.is_empty() {
        out.push_str("<p class=\"empty\">No entities at this layer.</p>\n</section>\n");
        return;
    }
    let (data, members): (Vec<&Element>, Vec<&Element>) =
        entities.iter().partition(|e| e.kind.entity_refinement() == Some(EntityRefinement::DataEntity));
    for e in members {
        entity_block(out, e, "entity");
    }
    if !data.is_empty() {
        out.push_str("<h3>Data sources</h3>\n");
        for e in data {
            entity_block(out, e, "data");
        }
    }

    let view = doc.restricted_to(&layering::view_members(doc, assignment, layer));
    let agents: Vec<&Element> = view.elements_of(Category::Agent).collect();
    let activities: Vec<&Element> = view.elements_of(Category::Activity).collect();
    if !agents.is_empty() {
        out.push_str("<h3>Responsible agents</h3>\n<ul>\n");
        for a in agents {
            agent_item(out, doc, a);
        }
        out.push_str("</ul>\n");
    }
    if !activities.is_empty() {
        out.push_str("<h3>Activities</h3>\n<ul>\n");
        for a in activities {
            activity_item(out, doc, a);
        }
        out.push_str("</ul>\n");
    }
    out.push_str("</section>\n");
}

/// A self-contained HTML page with one section per layer (or only the
/// filtered layer).
pub fn to_html_report(doc: &ProvenanceDocument, opts: &RenderOptions) -> Result<String, RenderError> {
    let layers: Vec<Layer> = match opts.layer_filter {
        Some(Layer::Unlayered) => return Err(RenderError::UnlayeredFilter),
        Some(layer) => vec![layer],
        None => Layer::LAYERED.to_vec(),
    };
    let assignment = layering::infer_layers(doc)?;
    let title = opts
        .title
        .clone()
        .unwrap_or_else(|| format!("Provenance of {}", display_name(doc, assignment.root())));

    let mut out = String::new();
    out.push_str("<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n");
    let _ = writeln!(out, "<title>{}</title>", escape(&title));
    let _ = writeln!(out, "<style>{STYLE}</style>\n</head>\n<body>");
    let _ = writeln!(out, "<h1>{}</h1>", escape(&title));
    let relations = doc.relations().len();
    let members = doc.relations_of(RelationKind::HadMember).count();
    let _ = writeln!(
        out,
        "<p>{} elements, {relations} relations ({members} memberships).</p>",
        doc.element_count()
    );
    for layer in layers {
        section(&mut out, doc, &assignment, layer);
    }
    out.push_str("</body>\n</html>\n");
    Ok(out)
}
