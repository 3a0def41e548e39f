//! Grow an XTREE on one project and plan for the defect-prone modules of another.

use xtree::planner::{apply_plan, build_tree, locate_leaf, plan_for, PlannerParams};
use xtree::synthetic::{generate_project, GeneratorSpec};

fn main() -> xtree::Result<()> {
    let spec = GeneratorSpec::default();
    let train = generate_project("train", &spec, 11)?;
    let test = generate_project("test", &spec, 12)?;
    let tree = build_tree(&train, PlannerParams::default())?;
    println!(
        "tree: {} leaves, min support {}, root split on {}",
        tree.leaves().len(),
        tree.min_support,
        tree.root
            .children
            .first()
            .and_then(|c| c.feature.clone())
            .unwrap_or_else(|| "-".into())
    );

    let mut shown = 0;
    for z in &test.instances {
        let Some(plan) = plan_for(&tree, z)? else { continue };
        let after = apply_plan(&tree.schema, z, &plan)?;
        let reached = locate_leaf(&tree, &after)?;
        println!(
            "\n{}: leaf {} -> {} (expected drop {:.2}), lands in {}",
            z.identifier, plan.source_leaf, plan.target_leaf, plan.expected_probability_drop, reached.path
        );
        for (feature, rx) in &plan.prescriptions {
            let j = tree.schema.index_of(feature).expect("planned feature is in the schema");
            println!(
                "  {feature}: {} -> {} ({:?})",
                z.features[j], after.features[j], rx.action
            );
        }
        shown += 1;
        if shown == 5 {
            break;
        }
    }
    println!(
        "\nwire format:\n{}",
        serde_json::to_string_pretty(&xtree::plan_dataset(&tree, &test)?[..1])?
    );
    Ok(())
}
