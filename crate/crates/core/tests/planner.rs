mod common;

use proptest::prelude::*;
use xtree::dataset::Instance;
use xtree::planner::{
    apply_plan, build_tree, locate_leaf, plan_for, select_desired_leaf, Action, DecisionTree, PlannerParams, TreeNode,
};
use xtree::synthetic::{generate_project, GeneratorSpec};

fn rows() -> impl Strategy<Value = (usize, Vec<(Vec<f64>, u64)>)> {
    (1usize..=4).prop_flat_map(|d| {
        (
            Just(d),
            prop::collection::vec(
                (prop::collection::vec((0i32..30).prop_map(f64::from), d), 0u64..3),
                16..150,
            ),
        )
    })
}

const NAMES: [&str; 4] = ["wmc", "cbo", "rfc", "loc"];

fn check_conservation(node: &TreeNode) {
    assert!((0.0..=1.0).contains(&node.defect_probability));
    if node.is_leaf() {
        return;
    }
    let support: usize = node.children.iter().map(|c| c.support).sum();
    let defective: usize = node.children.iter().map(|c| c.defective).sum();
    assert_eq!(support, node.support);
    assert_eq!(defective, node.defective);
    let weighted: f64 = node
        .children
        .iter()
        .map(|c| c.support as f64 * c.defect_probability)
        .sum();
    assert!((weighted - node.support as f64 * node.defect_probability).abs() < 1e-9);
    node.children.iter().for_each(check_conservation);
}

fn path_features(tree: &DecisionTree, leaf: &TreeNode) -> Vec<String> {
    tree.lineage(&leaf.path)
        .unwrap()
        .iter()
        .filter_map(|n| n.feature.clone())
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn trees_conserve_counts_and_never_repeat_a_feature((d, rows) in rows()) {
        let data = common::dataset("p", &NAMES[..d], rows);
        let tree = build_tree(&data, PlannerParams::default()).unwrap();
        tree.check_invariants().unwrap();
        check_conservation(&tree.root);
        prop_assert_eq!(tree.root.support, data.len());
        prop_assert_eq!(tree.leaves().iter().map(|l| l.support).sum::<usize>(), data.len());
        for leaf in tree.leaves() {
            let mut f = path_features(&tree, leaf);
            let n = f.len();
            f.sort();
            f.dedup();
            prop_assert_eq!(f.len(), n);
            prop_assert!(leaf.depth <= tree.params.max_depth);
        }
    }

    #[test]
    fn plans_land_where_they_claim(
        (d, rows) in rows(),
        probes in prop::collection::vec(prop::collection::vec(-5i32..35, 4), 1..30),
    ) {
        let data = common::dataset("p", &NAMES[..d], rows);
        let tree = build_tree(&data, PlannerParams::default()).unwrap();
        let probes = probes
            .into_iter()
            .map(|v| Instance::new("z", v[..d].iter().map(|&x| f64::from(x)).collect(), 1))
            .chain(data.instances.iter().cloned());
        for z in probes {
            let leaf = locate_leaf(&tree, &z).unwrap();
            let Some(plan) = plan_for(&tree, &z).unwrap() else {
                let best = select_desired_leaf(&tree, leaf).unwrap();
                prop_assert!(leaf.defect_probability < tree.params.planning_threshold || best.is_none());
                continue;
            };
            let desired = tree.node(&plan.target_leaf).unwrap();
            prop_assert!(plan.expected_probability_drop > 0.0);
            prop_assert!(plan.len() <= desired.depth);
            let allowed = path_features(&tree, desired);
            for (feature, rx) in &plan.prescriptions {
                prop_assert!(allowed.contains(feature));
                let is_move = matches!(rx.action, Action::MoveTo { .. });
                prop_assert!(is_move);
            }
            let moved = apply_plan(&tree.schema, &z, &plan).unwrap();
            prop_assert_eq!(&locate_leaf(&tree, &moved).unwrap().path, &plan.target_leaf);
            for (j, name) in tree.schema.feature_names.iter().enumerate() {
                if !plan.prescriptions.contains_key(name) {
                    prop_assert_eq!(moved.features[j].to_bits(), z.features[j].to_bits());
                }
            }
        }
    }

    #[test]
    fn identical_inputs_give_identical_trees_and_plans((d, rows) in rows()) {
        let data = common::dataset("p", &NAMES[..d], rows);
        let a = build_tree(&data, PlannerParams::default()).unwrap();
        let b = build_tree(&data, PlannerParams::default()).unwrap();
        prop_assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
        let pa = xtree::plan_dataset(&a, &data).unwrap();
        let pb = xtree::plan_dataset(&b, &data).unwrap();
        prop_assert_eq!(serde_json::to_string(&pa).unwrap(), serde_json::to_string(&pb).unwrap());
    }
}

#[test]
fn single_class_training_gives_one_leaf() {
    let data = common::dataset("p", &["loc"], (0..10).map(|i| (vec![f64::from(i)], 0)).collect());
    let tree = build_tree(&data, PlannerParams::default()).unwrap();
    assert!(tree.root.is_leaf());
    assert_eq!(tree.root.support, 10);
    assert_eq!(tree.root.defect_probability, 0.0);
}

#[test]
fn two_leaf_tree_from_the_worked_example() {
    let rows = [1.0, 2.0, 3.0, 10.0, 11.0, 12.0]
        .iter()
        .enumerate()
        .map(|(i, &v)| (vec![v], u64::from(i >= 3)))
        .collect();
    let data = common::dataset("p", &["loc"], rows);
    let params = PlannerParams {
        min_support: Some(2),
        ..PlannerParams::default()
    };
    let tree = build_tree(&data, params).unwrap();
    let probs: Vec<f64> = tree.leaves().iter().map(|l| l.defect_probability).collect();
    assert_eq!(probs, vec![0.0, 1.0]);
    assert_eq!(tree.root.children[1].interval.low, 6.5);
    assert_eq!(
        locate_leaf(&tree, &Instance::new("z", vec![6.5], 0))
            .unwrap()
            .defect_probability,
        1.0
    );
    let plan = plan_for(&tree, &Instance::new("z", vec![50.0], 1)).unwrap().unwrap();
    assert_eq!(plan.expected_probability_drop, 1.0);
    // training loc population std on the six values
    let mean = 39.0 / 6.0;
    let sigma = ([1.0f64, 2.0, 3.0, 10.0, 11.0, 12.0]
        .iter()
        .map(|v| (v - mean).powi(2))
        .sum::<f64>()
        / 6.0)
        .sqrt();
    assert!((sigma - 4.6).abs() < 0.05);
    let moved = apply_plan(&tree.schema, &Instance::new("z", vec![50.0], 1), &plan).unwrap();
    assert!((moved.features[0] - (6.5 - sigma)).abs() < 1e-12);
    assert!((moved.features[0] - 1.9).abs() < 0.05);
}

#[test]
fn synthetic_project_trees_conserve_support() {
    let data = generate_project("demo", &GeneratorSpec::default(), 4).unwrap();
    let tree = build_tree(&data, PlannerParams::default()).unwrap();
    check_conservation(&tree.root);
    assert_eq!(tree.leaves().iter().map(|l| l.support).sum::<usize>(), data.len());
    let back = DecisionTree::from_json(&tree.to_json().unwrap()).unwrap();
    assert_eq!(back, tree);
}
