//! Compare XTREE and BELLTREE on every project of a family and print the
//! ranked report.
//!
//! cargo run --release --example rank_treatments -- [family_dir] [repeats]

use xtree::dataset::load_project_family;
use xtree::oracle::{run_experiment, ExperimentConfig, Treatment};
use xtree::stats::{rank_treatments, render_report, ProjectSummary, DEFAULT_ALPHA, DEFAULT_EFFECT_THRESHOLD};
use xtree::synthetic::{planted_family, PlantOptions};

fn main() -> xtree::Result<()> {
    let mut args = std::env::args().skip(1);
    let family = match args.next() {
        Some(dir) => load_project_family(dir)?,
        None => planted_family(&PlantOptions::default(), 2)?.projects,
    };
    let repeats = args
        .next()
        .map_or(10, |s| s.parse().expect("repeats must be an integer"));
    let config = ExperimentConfig {
        repeats,
        ..ExperimentConfig::default()
    };
    let mut summaries = Vec::new();
    for target in &family {
        let others: Vec<_> = family.iter().filter(|p| p.name != target.name).cloned().collect();
        let mut groups = Vec::new();
        for t in [Treatment::Xtree, Treatment::Belltree] {
            let result = run_experiment(target, &others, t, &config)?;
            let scores = result.scores();
            if !scores.is_empty() {
                groups.push((t.to_string(), scores));
            }
        }
        summaries.push(ProjectSummary {
            project: target.name.clone(),
            treatments: rank_treatments(&groups, DEFAULT_ALPHA, DEFAULT_EFFECT_THRESHOLD)?,
        });
    }
    print!("{}", render_report(&summaries));
    Ok(())
}
