use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;
use xtree::synthetic::{planted_family, PlantOptions};

fn xtree(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_xtree")).args(args).output().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// Four synthetic projects written as CSVs under `dir/family`.
fn family(dir: &Path) -> String {
    let fam = dir.join("family");
    std::fs::create_dir_all(&fam).unwrap();
    let opts = PlantOptions {
        projects: 4,
        instances: 200,
        ..PlantOptions::default()
    };
    for p in planted_family(&opts, 3).unwrap().projects {
        p.write_csv(fam.join(format!("{}.csv", p.name))).unwrap();
    }
    fam.to_str().unwrap().to_string()
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

#[test]
fn plan_xtree_writes_plans() {
    let tmp = TempDir::new().unwrap();
    let fam = family(tmp.path());
    let out = path(tmp.path(), "plans.json");
    let o = xtree(&[
        "plan",
        "--train",
        &format!("{fam}/proja.csv"),
        "--test",
        &format!("{fam}/projb.csv"),
        "--out",
        &out,
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let plans: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!(plans.is_array());
    assert!(String::from_utf8_lossy(&o.stdout).contains("plans, mean expected_probability_drop"));
}

#[test]
fn plan_without_test_is_a_usage_error() {
    let tmp = TempDir::new().unwrap();
    let fam = family(tmp.path());
    let o = xtree(&[
        "plan",
        "--train",
        &format!("{fam}/proja.csv"),
        "--out",
        &path(tmp.path(), "p.json"),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).to_lowercase().contains("usage"), "{}", stderr(&o));
}

#[test]
fn plan_belltree_names_the_bellwether() {
    let tmp = TempDir::new().unwrap();
    let fam = family(tmp.path());
    let out = path(tmp.path(), "plans.csv");
    let target = format!("{fam}/projc.csv");
    let o = xtree(&[
        "plan",
        "--treatment",
        "belltree",
        "--family",
        &fam,
        "--target",
        &target,
        "--out",
        &out,
        "--format",
        "csv",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let line = stderr(&o)
        .lines()
        .find(|l| l.starts_with("bellwether: "))
        .unwrap()
        .to_string();
    assert_ne!(line, "bellwether: projc");
    assert!(std::fs::read_to_string(&out).unwrap().lines().next().is_some());
}

#[test]
fn bellwether_reports_a_full_matrix_and_reruns_identically() {
    let tmp = TempDir::new().unwrap();
    let fam = family(tmp.path());
    let (a, b) = (path(tmp.path(), "a.json"), path(tmp.path(), "b.json"));
    for out in [&a, &b] {
        let o = xtree(&["bellwether", "--family", &fam, "--out", out]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let rows = v["matrix"]["scores"].as_array().unwrap();
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r.as_array().unwrap().len() == 4));
}

#[test]
fn bellwether_on_one_project_exits_2() {
    let tmp = TempDir::new().unwrap();
    let fam = family(tmp.path());
    let lone = tmp.path().join("lone");
    std::fs::create_dir_all(&lone).unwrap();
    std::fs::copy(format!("{fam}/proja.csv"), lone.join("proja.csv")).unwrap();
    let o = xtree(&[
        "bellwether",
        "--family",
        lone.to_str().unwrap(),
        "--out",
        &path(tmp.path(), "b.json"),
    ]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn evaluate_rejects_zero_repeats() {
    let tmp = TempDir::new().unwrap();
    let fam = family(tmp.path());
    let o = xtree(&[
        "evaluate",
        "--family",
        &fam,
        "--repeats",
        "0",
        "--out-dir",
        &path(tmp.path(), "r"),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn evaluate_writes_results_and_is_byte_identical() {
    let tmp = TempDir::new().unwrap();
    let fam = family(tmp.path());
    let mut dirs = Vec::new();
    for run in ["r1", "r2"] {
        let dir = path(tmp.path(), run);
        let o = xtree(&[
            "evaluate",
            "--family",
            &fam,
            "--projects",
            "proja,projb",
            "--repeats",
            "3",
            "--seed",
            "7",
            "--out-dir",
            &dir,
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        dirs.push(dir);
    }
    let mut names: Vec<String> = std::fs::read_dir(&dirs[0])
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(
        names,
        [
            "proja_BELLTREE.json",
            "proja_XTREE.json",
            "projb_BELLTREE.json",
            "projb_XTREE.json",
            "report.txt"
        ]
    );
    for n in &names {
        let a = std::fs::read(Path::new(&dirs[0]).join(n)).unwrap();
        let b = std::fs::read(Path::new(&dirs[1]).join(n)).unwrap();
        assert_eq!(a, b, "{n} differs between runs");
    }

    let o = xtree(&["report", "--results", &dirs[0]]);
    assert!(o.status.success(), "{}", stderr(&o));
    let report = std::fs::read_to_string(Path::new(&dirs[0]).join("report.txt")).unwrap();
    assert_eq!(String::from_utf8_lossy(&o.stdout), report);
}

#[test]
fn help_lists_defaults() {
    let o = xtree(&["evaluate", "--help"]);
    let text = String::from_utf8_lossy(&o.stdout);
    for needle in [
        "[default: 30]",
        "[default: 25]",
        "[default: 0.05]",
        "[default: 0.147]",
        "[default: xtree,belltree]",
    ] {
        assert!(text.contains(needle), "missing {needle}\n{text}");
    }
    let top = xtree(&["--help"]);
    let text = String::from_utf8_lossy(&top.stdout);
    for sub in ["plan", "bellwether", "evaluate", "report"] {
        assert!(text.contains(sub));
    }
}
