use std::collections::BTreeSet;

use dashprov::query;
use dashprov::{Category, ProvenanceDocument, QualifiedName};
use dashprov_testkit::{gen, oracle};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn ids(doc: &ProvenanceDocument, category: Category) -> Vec<QualifiedName> {
    doc.elements_of(category).map(|e| e.id.clone()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn lineage_matches_relaxation(seed in any::<u64>()) {
        let doc = gen::random_dag(&mut ChaCha8Rng::seed_from_u64(seed), 200);
        for id in ids(&doc, Category::Entity) {
            let report = query::lineage(&doc, &id).unwrap();
            prop_assert_eq!(&report.depth_by_node, &oracle::lineage_depths(&doc, &id));
            let edges: BTreeSet<_> = report.edges.iter().map(|e| (e.subject.clone(), e.kind, e.object.clone())).collect();
            prop_assert_eq!(edges.len(), report.edges.len(), "edges repeat");
            prop_assert_eq!(edges, oracle::lineage_edges(&doc, &id));
        }
    }

    #[test]
    fn delegation_matches_relaxation(seed in any::<u64>()) {
        let doc = gen::random_dag(&mut ChaCha8Rng::seed_from_u64(seed), 200);
        for id in ids(&doc, Category::Agent) {
            prop_assert_eq!(query::delegation_chain(&doc, &id).unwrap(), oracle::delegation(&doc, &id));
        }
    }

    #[test]
    fn attribution_matches_relaxation(seed in any::<u64>()) {
        let doc = gen::random_dag(&mut ChaCha8Rng::seed_from_u64(seed), 200);
        for id in ids(&doc, Category::Entity) {
            let found = query::attribution(&doc, &id).unwrap();
            let (direct, via) = oracle::attribution(&doc, &id);
            let got_direct: BTreeSet<_> = found.iter().filter(|a| !a.via_delegation).map(|a| a.agent.clone()).collect();
            let got_via: BTreeSet<_> = found.iter().filter(|a| a.via_delegation).map(|a| a.agent.clone()).collect();
            prop_assert_eq!(got_direct.len() + got_via.len(), found.len(), "agents repeat");
            prop_assert_eq!(got_direct, direct);
            prop_assert_eq!(got_via, via);
            for a in &found {
                prop_assert_eq!(&a.roles, &doc.element(&a.agent).unwrap().dash.roles);
            }
        }
    }

    #[test]
    fn queries_leave_the_document_alone(seed in any::<u64>()) {
        let doc = gen::random_document(&mut ChaCha8Rng::seed_from_u64(seed), 80);
        let before = doc.clone();
        for e in ids(&doc, Category::Entity) {
            let first = (query::lineage(&doc, &e), query::attribution(&doc, &e), query::freshness(&doc, &e));
            let again = (query::lineage(&doc, &e), query::attribution(&doc, &e), query::freshness(&doc, &e));
            prop_assert_eq!(first, again);
        }
        for a in ids(&doc, Category::Agent) {
            prop_assert_eq!(query::delegation_chain(&doc, &a), query::delegation_chain(&doc, &a));
        }
        prop_assert_eq!(query::stats(&doc), query::stats(&doc));
        prop_assert_eq!(doc, before);
    }
}

#[test]
fn wrong_ids_are_rejected() {
    let doc = gen::random_dag(&mut ChaCha8Rng::seed_from_u64(7), 20);
    let missing: QualifiedName = "ex:missing".parse().unwrap();
    assert_eq!(query::lineage(&doc, &missing), Err(query::QueryError::UnknownIdentifier(missing.clone())));
    let agent = ids(&doc, Category::Agent).remove(0);
    assert!(matches!(query::lineage(&doc, &agent), Err(query::QueryError::WrongCategory { .. })));
    let entity = ids(&doc, Category::Entity).remove(0);
    assert!(matches!(query::delegation_chain(&doc, &entity), Err(query::QueryError::WrongCategory { .. })));
}
