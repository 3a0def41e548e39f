//! Find the bellwether of a project family.
//!
//! cargo run --example bellwether_discovery -- [family_dir]
//! Without an argument a synthetic family with a planted bellwether is used.

use xtree::bellwether::discover_bellwether;
use xtree::dataset::load_project_family;
use xtree::synthetic::{planted_family, PlantOptions};

fn main() -> xtree::Result<()> {
    let (family, planted) = match std::env::args().nth(1) {
        Some(dir) => (load_project_family(dir)?, None),
        None => {
            let f = planted_family(&PlantOptions::default(), 5)?;
            (f.projects, Some(f.planted))
        }
    };
    let report = discover_bellwether(&family, 1)?;
    print!("{:>10}", "train\\test");
    for p in &report.matrix.projects {
        print!("{p:>8}");
    }
    println!("{:>9}", "median");
    for (i, row) in report.matrix.scores.iter().enumerate() {
        let name = &report.matrix.projects[i];
        print!("{name:>10}");
        for cell in row {
            match cell {
                Some(v) => print!("{v:>8.3}"),
                None => print!("{:>8}", "-"),
            }
        }
        println!("{:>9.3}", report.per_project_summary[name]);
    }
    println!("bellwether: {}", report.winner);
    if let Some(p) = planted {
        println!("planted:    {p}");
    }
    Ok(())
}
