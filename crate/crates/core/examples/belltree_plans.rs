//! Plan for a project using a tree grown on its family's bellwether.

use xtree::bellwether::belltree_plan;
use xtree::planner::PlannerParams;
use xtree::synthetic::{planted_family, PlantOptions};

fn main() -> xtree::Result<()> {
    let mut family = planted_family(&PlantOptions::default(), 8)?.projects;
    let target = family.pop().expect("family is non-empty");
    let outcome = belltree_plan(&family, &target, PlannerParams::default(), 1)?;
    println!("target {}, bellwether {}", target.name, outcome.report.winner);
    println!("{} of {} modules received a plan", outcome.plans.len(), target.len());
    for p in outcome.plans.iter().take(5) {
        let changes: Vec<String> = p
            .prescriptions
            .iter()
            .map(|rx| format!("{} in [{}, {})", rx.feature, fmt(rx.low, "-inf"), fmt(rx.high, "inf")))
            .collect();
        println!("  {}: {}", p.identifier, changes.join(", "));
    }
    Ok(())
}

fn fmt(v: Option<f64>, open: &str) -> String {
    v.map_or_else(|| open.to_string(), |x| x.to_string())
}
