//! Score XTREE plans with an independent defect predictor over repeated splits.

use xtree::oracle::{run_experiment, ExperimentConfig, Treatment};
use xtree::stats::summarize;
use xtree::synthetic::{generate_project, GeneratorSpec};

fn main() -> xtree::Result<()> {
    let spec = GeneratorSpec {
        instances: 400,
        ..GeneratorSpec::default()
    };
    let project = generate_project("demo", &spec, 21)?;
    let config = ExperimentConfig {
        repeats: 10,
        ..ExperimentConfig::default()
    };
    let result = run_experiment(&project, &[], Treatment::Xtree, &config)?;
    println!("repeat  before  after  planned       R");
    for r in &result.runs {
        let score = r.improvement.map_or("skipped".to_string(), |v| format!("{v:.1}"));
        println!(
            "{:>6}  {:>6}  {:>5}  {:>7}  {:>6}",
            r.repeat_index, r.before, r.after, r.planned, score
        );
    }
    let (median, iqr) = summarize(&result.scores())?;
    println!("median R {median:.1}, IQR {iqr:.1}");
    Ok(())
}
