//! Supervised MDLP discretization of each metric against the defect label.

use xtree::discretize::{default_min_support, mdlp_bins};
use xtree::synthetic::{generate_project, GeneratorSpec};

fn main() -> xtree::Result<()> {
    let data = match std::env::args().nth(1) {
        Some(path) => xtree::load_csv(path, None)?,
        None => generate_project("demo", &GeneratorSpec::default(), 3)?,
    };
    let labels = data.labels();
    let support = default_min_support(data.len());
    println!("{} modules, min support {support}", data.len());
    for (j, name) in data.schema.feature_names.iter().enumerate() {
        let bins = mdlp_bins(&data.column(j), &labels, support)?.with_feature(name.clone());
        let ranges: Vec<String> = bins.intervals().iter().map(|iv| iv.to_string()).collect();
        println!("{name:>8}  gain {:.4}  {}", bins.gain, ranges.join(" "));
    }

    // a tiny hand-checkable case
    let v = [1.0, 2.0, 3.0, 10.0, 11.0, 12.0];
    let y = [false, false, false, true, true, true];
    let bins = mdlp_bins(&v, &y, 1)?;
    println!("toy cut points {:?}, gain {}", bins.cuts, bins.gain);
    Ok(())
}
