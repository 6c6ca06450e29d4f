use std::collections::{BTreeMap, BTreeSet};

use dashprov::layering::{self, Layer, LayerError};
use dashprov::{EntityRefinement, QualifiedName};
use dashprov_testkit::gen::{self, TreeShape};
use dashprov_testkit::oracle::{self, LayerRefusal};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn refusal(e: &LayerError) -> Option<LayerRefusal> {
    match e {
        LayerError::NoRootDashboard | LayerError::MultipleRootDashboards(_) => Some(LayerRefusal::Root),
        LayerError::MembershipCycle(_) => Some(LayerRefusal::Cycle),
        LayerError::DepthExceeded(_) => Some(LayerRefusal::Depth),
        _ => None,
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 128, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn layers_match_naive_walk(seed in any::<u64>(), layer_two in any::<bool>(), allow_too_deep in any::<bool>()) {
        let shape = TreeShape { layer_two, allow_too_deep };
        let doc = gen::random_membership_tree(&mut ChaCha8Rng::seed_from_u64(seed), 150, shape);
        match (layering::infer_layers(&doc), oracle::layers(&doc)) {
            (Ok(got), Ok(want)) => {
                let got: BTreeMap<QualifiedName, BTreeSet<Layer>> = got.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
                prop_assert_eq!(&got, &want);
                prop_assert!(oracle::max_membership_depth(&doc, &"ex:dashboard".parse().unwrap()) <= 2);
                if !layer_two {
                    prop_assert!(got.values().all(|set| !set.contains(&Layer::L2Subtopic)));
                }
            }
            (Err(e), Err(want)) => prop_assert_eq!(refusal(&e), Some(want)),
            (got, want) => prop_assert!(false, "library {:?} but oracle {:?}", got, want),
        }
    }

    #[test]
    fn layer_views_partition_the_entities(seed in any::<u64>()) {
        let shape = TreeShape { layer_two: true, allow_too_deep: false };
        let doc = gen::random_membership_tree(&mut ChaCha8Rng::seed_from_u64(seed), 80, shape);
        let assignment = layering::infer_layers(&doc).unwrap();
        for layer in Layer::LAYERED {
            let view = layering::layer_view(&doc, layer).unwrap();
            for id in assignment.in_layer(layer) {
                prop_assert!(view.contains(id));
            }
            for r in view.relations() {
                prop_assert!(view.contains(&r.subject) && view.contains(&r.object));
            }
        }
        for (id, layers) in assignment.iter() {
            let is_data = doc.element(id).unwrap().kind.entity_refinement() == Some(EntityRefinement::DataEntity);
            if layers.contains(&Layer::L3Individual) && !is_data {
                let path = layering::drill_path(&doc, id).unwrap();
                prop_assert_eq!(path.first(), Some(assignment.root()));
                prop_assert_eq!(path.last(), Some(id));
            }
        }
    }
}

#[test]
fn generator_reaches_every_outcome() {
    let mut seen = BTreeSet::new();
    for seed in 0..200 {
        let shape = TreeShape { layer_two: seed % 2 == 0, allow_too_deep: true };
        let doc = gen::random_membership_tree(&mut ChaCha8Rng::seed_from_u64(seed), 60, shape);
        seen.insert(match oracle::layers(&doc) {
            Ok(layers) if layers.values().any(|s| s.contains(&Layer::L2Subtopic)) => "with layer two",
            Ok(_) => "without layer two",
            Err(LayerRefusal::Depth) => "too deep",
            Err(_) => "other refusal",
        });
    }
    assert!(seen.contains("with layer two") && seen.contains("without layer two") && seen.contains("too deep"), "{seen:?}");
}
