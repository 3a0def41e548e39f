//! Run the 30-repeat XTREE/BELLTREE comparison on the ant, ivy, poi and jedit
//! CK datasets from the PROMISE repository.
//!
//! cargo run --release --example promise_reproduction -- path/to/promise
//!
//! The directory must hold ant.csv, ivy.csv, poi.csv and jedit.csv (one
//! release each, PROMISE column layout). `XTREE_PROMISE_DIR` is used when no
//! argument is given.

use std::path::PathBuf;

use xtree::dataset::{align_family, load_csv};
use xtree::oracle::{run_experiment, ExperimentConfig, Treatment};
use xtree::stats::{rank_treatments, render_report, ProjectSummary, DEFAULT_ALPHA, DEFAULT_EFFECT_THRESHOLD};

const PROJECTS: [&str; 4] = ["ant", "ivy", "poi", "jedit"];

fn main() -> xtree::Result<()> {
    let dir = std::env::args()
        .nth(1)
        .or_else(|| std::env::var("XTREE_PROMISE_DIR").ok())
        .map(PathBuf::from)
        .unwrap_or_else(|| {
            eprintln!("usage: promise_reproduction <dir with ant.csv ivy.csv poi.csv jedit.csv>");
            std::process::exit(2);
        });
    let family = align_family(
        PROJECTS
            .iter()
            .map(|p| load_csv(dir.join(format!("{p}.csv")), None))
            .collect::<xtree::Result<Vec<_>>>()?,
    )?;
    let config = ExperimentConfig::default();
    let mut summaries = Vec::new();
    for target in &family {
        let others: Vec<_> = family.iter().filter(|p| p.name != target.name).cloned().collect();
        let mut groups = Vec::new();
        for t in [Treatment::Xtree, Treatment::Belltree] {
            let result = run_experiment(target, &others, t, &config)?;
            eprintln!(
                "{} {}: {} skipped of {}",
                target.name,
                t,
                result.skipped(),
                result.runs.len()
            );
            groups.push((t.to_string(), result.scores()));
        }
        groups.retain(|g| !g.1.is_empty());
        summaries.push(ProjectSummary {
            project: target.name.clone(),
            treatments: rank_treatments(&groups, DEFAULT_ALPHA, DEFAULT_EFFECT_THRESHOLD)?,
        });
    }
    print!("{}", render_report(&summaries));
    Ok(())
}
