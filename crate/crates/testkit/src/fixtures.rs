use std::path::PathBuf;

pub fn dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn path(name: &str) -> PathBuf {
    dir().join(name)
}

pub fn read(name: &str) -> String {
    std::fs::read_to_string(path(name)).unwrap_or_else(|e| panic!("cannot read fixture {name}: {e}"))
}

pub const FULL: &str = "covid19_brasil.ttl";
pub const FULL_JSON: &str = "covid19_brasil.provjson";
pub const LISTING: &str = "published_listing.ttl";
pub const LISTING_JSON: &str = "published_listing.provjson";
pub const LISTING_RAW: &str = "published_listing_raw.ttl";
pub const OUTLINE: &str = "covid19_brasil_outline.json";

/// A copy of the full fixture with one edit aimed at one validation rule.
#[derive(Debug, Clone)]
pub struct Mutant {
    pub rule: u8,
    pub what: &'static str,
    pub text: String,
}

fn edit(base: &str, find: &str, replace: &str) -> String {
    assert_eq!(base.matches(find).count(), 1, "mutation anchor must occur once: {find:?}");
    base.replacen(find, replace, 1)
}

/// One mutant per rule, R1 through R10, applied to the full fixture text.
pub fn mutants() -> Vec<Mutant> {
    let base = read(FULL);
    let orphan = "\nex:orphan\n    a prov:Agent, prov:Person ;\n    dash:name \"Orphan\" ;\n    dash:role \"none\" ;\n    dash:url \"https://example.org/orphan\" .\n";
    vec![
        Mutant {
            rule: 1,
            what: "the dashboard is generated by an entity",
            text: edit(
                &base,
                "prov:wasGeneratedBy ex:creationMaintenanceDashboard ;\n    prov:wasDerivedFrom ex:dataset ;\n    prov:wasAttributedTo ex:CORONAVIRUS-COVID-19 ;\n    prov:hadMember ex:Brasil,",
                "prov:wasGeneratedBy ex:Brasil ;\n    prov:wasDerivedFrom ex:dataset ;\n    prov:wasAttributedTo ex:CORONAVIRUS-COVID-19 ;\n    prov:hadMember ex:Brasil,",
            ),
        },
        Mutant {
            rule: 2,
            what: "the data update starts after it ends",
            text: edit(&base, "prov:startedAtTime \"2020-02-25T00:00:00Z\"", "prov:startedAtTime \"2024-02-25T00:00:00Z\""),
        },
        Mutant {
            rule: 3,
            what: "the dataset is derived from one of its charts",
            text: edit(
                &base,
                "    prov:wasGeneratedBy ex:dataUpdate ;",
                "    prov:wasDerivedFrom ex:Casos-novos ;\n    prov:wasGeneratedBy ex:dataUpdate ;",
            ),
        },
        Mutant {
            rule: 4,
            what: "a subtopic is also refined as a dashboard",
            text: edit(
                &base,
                "ex:Brasil\n    a prov:Entity, prov:Collection, dash:SubtopicCollection ;",
                "ex:Brasil\n    a prov:Entity, prov:Collection, dash:Dashboard ;",
            ),
        },
        Mutant {
            rule: 5,
            what: "an agent has no name",
            text: edit(&base, "    dash:name \"DataSUS\" ;\n", ""),
        },
        Mutant {
            rule: 6,
            what: "the top principal delegates back to the taskforce",
            text: edit(
                &base,
                "dash:url \"https://www.gov.br\" .",
                "dash:url \"https://www.gov.br\" ;\n    prov:actedOnBehalfOf ex:CORONAVIRUS-COVID-19 .",
            ),
        },
        Mutant {
            rule: 7,
            what: "a subtopic lists an undeclared member",
            text: edit(&base, "prov:hadMember ex:Detalhar-por-tabela .", "prov:hadMember ex:Detalhar-por-tabela, ex:Detalhar-por-mapa ."),
        },
        Mutant { rule: 8, what: "an agent takes part in no relation", text: format!("{base}{orphan}") },
        Mutant {
            rule: 9,
            what: "a subtopic lists its only chart twice",
            text: edit(&base, "prov:hadMember ex:Detalhar-por-tabela .", "prov:hadMember ex:Detalhar-por-tabela, ex:Detalhar-por-tabela ."),
        },
        Mutant {
            rule: 10,
            what: "the dataset names no source",
            text: edit(
                &edit(
                    &base,
                    "    prov:wasGeneratedBy ex:dataUpdate ;\n    prov:wasAttributedTo ex:Secretarias-Estaduais-de-Saúde, ex:DataSUS .",
                    "    prov:wasGeneratedBy ex:dataUpdate .",
                ),
                "prov:wasAssociatedWith ex:DataSUS .",
                "prov:wasAssociatedWith ex:DataSUS, ex:Secretarias-Estaduais-de-Saúde .",
            ),
        },
    ]
}
