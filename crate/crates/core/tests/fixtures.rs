use dashprov::layering::{self, Layer};
use dashprov::serialization::{self, FormatId};
use dashprov::{query, scaffold, Category, ProvenanceDocument, QualifiedName};
use dashprov_testkit::{fixtures, q};

fn load(name: &str) -> ProvenanceDocument {
    let format = FormatId::from_path(&fixtures::path(name)).unwrap();
    serialization::parse(fixtures::read(name).as_bytes(), format).unwrap_or_else(|e| panic!("{name}: {e}"))
}

#[test]
fn twins_agree_across_formats() {
    assert!(load(fixtures::FULL).semantic_eq(&load(fixtures::FULL_JSON)));
    assert!(load(fixtures::LISTING).semantic_eq(&load(fixtures::LISTING_JSON)));
}

#[test]
fn full_fixture_layers() {
    let doc = load(fixtures::FULL);
    let layers = layering::infer_layers(&doc).unwrap();
    let names = |layer| -> Vec<String> {
        let mut v: Vec<String> = layers
            .in_layer(layer)
            .into_iter()
            .filter(|id| doc.element(id).unwrap().kind.entity_refinement() != Some(dashprov::EntityRefinement::DataEntity))
            .map(|id| doc.element(id).unwrap().name().unwrap().to_string())
            .collect();
        v.sort();
        v
    };
    assert_eq!(names(Layer::L1Dashboard), ["COVID-19 NO BRASIL"]);
    assert_eq!(names(Layer::L2Subtopic), ["Brasil", "Casos", "Detalhar por", "Óbitos"]);
    assert_eq!(names(Layer::L3Individual).len(), 14);
    let stats = query::stats(&doc);
    assert_eq!((stats.layers.l1, stats.layers.l2, stats.layers.l3, stats.layers.unlayered), (1, 4, 14, 0));
}

#[test]
fn agent_hierarchy() {
    let doc = load(fixtures::FULL);
    let chain = query::delegation_chain(&doc, &q("ex:CORONAVIRUS-COVID-19")).unwrap();
    assert_eq!(chain, [q("ex:SUS"), q("ex:Ministério-da-Saúde"), q("ex:Governo-Federal")]);
    let lineage = query::lineage(&doc, &q("ex:dashboard")).unwrap();
    assert_eq!(lineage.closure(), [&q("ex:dataset")]);
    assert_eq!(lineage.depth_by_node[&q("ex:dataset")], 1);
}

#[test]
fn listing_reads_as_published() {
    let doc = load(fixtures::LISTING);
    assert_eq!(doc.elements_of(Category::Entity).count(), 2);
    assert_eq!(doc.elements_of(Category::Agent).count(), 2);
    assert_eq!(doc.elements_of(Category::Activity).count(), 0);
    let get = |id: &str| doc.element(&q(id)).unwrap();
    let dashboard = get(":dashboard");
    assert_eq!(dashboard.name(), Some("COVID-19 NO BRASIL"));
    assert_eq!(dashboard.dash.version.as_deref(), Some("Beta"));
    assert_eq!(dashboard.dash.url.as_deref(), Some("https://infoms.saude.gov.br/extensions/covid-19.html"));
    assert_eq!(get(":Casos").dash.version.as_deref(), Some("1.0.0.0"));
    let sus = get(":SUS");
    assert_eq!(sus.dash.roles, ["demanding"]);
    assert_eq!(sus.dash.trustworthiness.as_deref(), Some("gov.br"));
    assert_eq!(get(":CORONAVIRUS-COVID-19").dash.roles, ["Developer", "Maintenance"]);
    assert_eq!(doc.members_of(&q(":Casos")).unwrap().len(), 2);
    let members: Vec<QualifiedName> = doc.members_of(&q(":dashboard")).unwrap();
    assert_eq!(members, [q(":Brasil"), q(":Casos"), q(":Óbitos"), q(":Brasil"), q(":Detalhar")]);
}

#[test]
fn raw_listing_fails_at_the_undeclared_prefix() {
    let err = serialization::parse(fixtures::read(fixtures::LISTING_RAW).as_bytes(), FormatId::TurtleProfile).unwrap_err();
    assert_eq!((err.line, err.column), (5, 1));
}

#[test]
fn outline_scaffold_matches_fixture_shape() {
    let outline = scaffold::parse_outline(&fixtures::read(fixtures::OUTLINE)).unwrap();
    let doc = scaffold::scaffold(&outline).unwrap();
    let stats = query::stats(&doc);
    assert_eq!((stats.layers.l1, stats.layers.l2, stats.layers.l3), (1, 4, 14));
    let diags = dashprov::validation::validate(&doc, &dashprov::validation::Profile::core());
    assert!(diags.iter().all(|d| d.rule_id.to_string() == "R5" && d.severity == dashprov::validation::Severity::Warning), "{diags:?}");
}
