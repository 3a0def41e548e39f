#![allow(dead_code)]

use std::path::{Path, PathBuf};

use xtree::dataset::{load_csv, Instance, MetricSchema, ProjectDataset};

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

/// Binary entropy from counts, written out directly.
pub fn h2(pos: usize, n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let mut h = 0.0;
    for c in [pos, n - pos] {
        if c > 0 {
            let p = c as f64 / n as f64;
            h -= p * p.log2();
        }
    }
    h
}

/// First MDLP cut by brute force: try every midpoint between adjacent
/// distinct values, keep the highest-gain one (lowest cut on ties), then
/// apply the MDL acceptance test. `None` when nothing qualifies.
pub fn exhaustive_first_cut(values: &[f64], labels: &[bool], min_support: usize) -> Option<f64> {
    let n = values.len();
    let pos = labels.iter().filter(|&&l| l).count();
    if pos == 0 || pos == n {
        return None;
    }
    let mut distinct: Vec<f64> = values.to_vec();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();

    let mut best: Option<(f64, f64, usize, usize, usize, usize)> = None;
    for w in distinct.windows(2) {
        let cut = (w[0] + w[1]) / 2.0;
        let (mut n1, mut p1) = (0, 0);
        for (v, l) in values.iter().zip(labels) {
            if *v < cut {
                n1 += 1;
                p1 += usize::from(*l);
            }
        }
        let (n2, p2) = (n - n1, pos - p1);
        if n1 < min_support || n2 < min_support {
            continue;
        }
        let gain = h2(pos, n) - n1 as f64 / n as f64 * h2(p1, n1) - n2 as f64 / n as f64 * h2(p2, n2);
        match best {
            Some((g, ..)) if gain <= g + 1e-12 => {}
            _ => best = Some((gain, cut, n1, p1, n2, p2)),
        }
    }
    let (gain, cut, n1, p1, n2, p2) = best?;
    let k = |p: usize, m: usize| if p == 0 || p == m { 1.0 } else { 2.0 };
    let (k0, k1, k2) = (k(pos, n), k(p1, n1), k(p2, n2));
    let delta = (3f64.powf(k0) - 2.0).log2() - (k0 * h2(pos, n) - k1 * h2(p1, n1) - k2 * h2(p2, n2));
    let threshold = ((n as f64 - 1.0).log2() + delta) / n as f64;
    (gain > threshold).then_some(cut)
}

pub fn dataset(name: &str, features: &[&str], rows: Vec<(Vec<f64>, u64)>) -> ProjectDataset {
    let schema = MetricSchema::new(features.iter().map(|s| s.to_string()).collect(), vec![], "bug").unwrap();
    let instances = rows
        .into_iter()
        .enumerate()
        .map(|(i, (f, c))| Instance::new(format!("{name}{i}"), f, c))
        .collect();
    ProjectDataset::new(name, schema, instances).unwrap()
}

/// Two features, label = x + y > 100, with a margin of 3 around the line.
pub fn separable() -> ProjectDataset {
    load_csv(fixture("separable.csv"), None).unwrap()
}

/// Directory expected to hold ant.csv, ivy.csv, poi.csv and jedit.csv.
pub fn promise_dir() -> PathBuf {
    std::env::var_os("XTREE_PROMISE_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/promise"))
}

pub const PROMISE_PROJECTS: [&str; 4] = ["ant", "ivy", "poi", "jedit"];

/// The four PROMISE projects aligned to shared features, or a description of
/// what is missing.
pub fn promise_family() -> Result<Vec<ProjectDataset>, String> {
    let dir = promise_dir();
    let mut out = Vec::new();
    for p in PROMISE_PROJECTS {
        let path = dir.join(format!("{p}.csv"));
        if !path.is_file() {
            return Err(format!(
                "{} not found (set XTREE_PROMISE_DIR to a directory with ant/ivy/poi/jedit CSVs)",
                path.display()
            ));
        }
        out.push(load_csv(&path, None).map_err(|e| e.to_string())?);
    }
    xtree::dataset::align_family(out).map_err(|e| e.to_string())
}
