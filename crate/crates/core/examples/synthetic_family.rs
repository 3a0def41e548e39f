//! Write a planted synthetic project family as CSV files.
//!
//! cargo run --example synthetic_family -- out/family [seed]

use std::path::PathBuf;

use xtree::synthetic::{planted_family, PlantOptions};

fn main() -> xtree::Result<()> {
    let mut args = std::env::args().skip(1);
    let dir = PathBuf::from(args.next().unwrap_or_else(|| "family".into()));
    let seed = args.next().map_or(7, |s| s.parse().expect("seed must be an integer"));
    std::fs::create_dir_all(&dir).map_err(|e| xtree::Error::Io {
        path: dir.clone(),
        source: e,
    })?;
    let family = planted_family(&PlantOptions::default(), seed)?;
    for p in &family.projects {
        let path = dir.join(format!("{}.csv", p.name));
        p.write_csv(&path)?;
        println!(
            "{}  {} modules, {:.0}% defective",
            path.display(),
            p.len(),
            100.0 * p.defect_ratio()
        );
    }
    println!("planted generalizer: {}", family.planted);
    Ok(())
}
