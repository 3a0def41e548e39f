//! Load a metrics CSV and split it into planner, oracle and test parts.
//!
//! cargo run --example load_and_split -- path/to/project.csv
//! Without an argument a synthetic project is used.

use xtree::dataset::{load_csv, three_way_split, DEFAULT_FRACTIONS};
use xtree::synthetic::{generate_project, GeneratorSpec};

fn main() -> xtree::Result<()> {
    let data = match std::env::args().nth(1) {
        Some(path) => load_csv(path, None)?,
        None => generate_project("demo", &GeneratorSpec::default(), 1)?,
    };
    println!("{}: {} modules, {} features", data.name, data.len(), data.schema.len());
    println!("features: {}", data.schema.feature_names.join(", "));
    println!("identifier columns: {:?}", data.schema.identifier_columns);
    println!("target: {}", data.schema.target_column);

    let split = three_way_split(&data, DEFAULT_FRACTIONS, 42)?;
    for (label, part) in ["planner", "oracle", "test"].iter().zip(split.parts()) {
        println!(
            "{label:>8}: {:4} modules, defect ratio {:.3}",
            part.len(),
            part.defect_ratio()
        );
    }
    println!(
        "   whole: {:4} modules, defect ratio {:.3}",
        data.len(),
        data.defect_ratio()
    );
    Ok(())
}
