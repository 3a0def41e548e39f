//! Bellwether discovery and BELLTREE.
//!
//! Every project in a family trains a defect predictor that is scored on
//! every other project. The project whose predictor transfers best (highest
//! median off-diagonal score) is the bellwether. BELLTREE is an XTREE grown
//! on the bellwether's data and used to plan for a different project.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{three_way_split, ProjectDataset, DEFAULT_FRACTIONS};
use crate::error::{Error, Result};
use crate::oracle::{train_forest_with, DefectPredictor, DEFAULT_TREES};
use crate::planner::{build_tree, plan_dataset, DecisionTree, PlanRecord, PlannerParams};
use crate::seeding::derive_seed;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransferMeasure {
    /// Harmonic mean of recall and `1 - false alarm rate`.
    #[default]
    GScore,
    Recall,
    F1,
}

impl std::str::FromStr for TransferMeasure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "g" | "g_score" | "gscore" => Ok(TransferMeasure::GScore),
            "recall" => Ok(TransferMeasure::Recall),
            "f1" => Ok(TransferMeasure::F1),
            _ => Err(Error::InvalidParameter(format!("unknown transfer measure `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscoveryOptions {
    pub measure: TransferMeasure,
    pub n_trees: usize,
}

impl Default for DiscoveryOptions {
    fn default() -> Self {
        DiscoveryOptions {
            measure: TransferMeasure::GScore,
            n_trees: DEFAULT_TREES,
        }
    }
}

impl DiscoveryOptions {
    pub fn validate(&self) -> Result<()> {
        if self.n_trees == 0 || self.n_trees.is_multiple_of(2) {
            return Err(Error::EvenTreeCount(self.n_trees));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    pub fn_: usize,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

fn harmonic(a: f64, b: f64) -> f64 {
    if a + b == 0.0 {
        0.0
    } else {
        2.0 * a * b / (a + b)
    }
}

impl Confusion {
    pub fn from_predictions(actual: &[bool], predicted: &[bool]) -> Self {
        let mut c = Confusion::default();
        for (&a, &p) in actual.iter().zip(predicted) {
            match (a, p) {
                (true, true) => c.tp += 1,
                (false, true) => c.fp += 1,
                (false, false) => c.tn += 1,
                (true, false) => c.fn_ += 1,
            }
        }
        c
    }

    /// Zero when the test set has no defective instance.
    pub fn recall(&self) -> f64 {
        ratio(self.tp, self.tp + self.fn_)
    }

    /// Zero when the test set has no clean instance.
    pub fn false_alarm(&self) -> f64 {
        ratio(self.fp, self.fp + self.tn)
    }

    pub fn precision(&self) -> f64 {
        ratio(self.tp, self.tp + self.fp)
    }

    pub fn g_score(&self) -> f64 {
        g_score(self.recall(), self.false_alarm())
    }

    pub fn f1(&self) -> f64 {
        harmonic(self.precision(), self.recall())
    }

    pub fn score(&self, measure: TransferMeasure) -> f64 {
        match measure {
            TransferMeasure::GScore => self.g_score(),
            TransferMeasure::Recall => self.recall(),
            TransferMeasure::F1 => self.f1(),
        }
    }
}

pub fn g_score(recall: f64, false_alarm: f64) -> f64 {
    harmonic(recall, 1.0 - false_alarm)
}

fn check_compatible(a: &ProjectDataset, b: &ProjectDataset) -> Result<()> {
    if a.schema.feature_names != b.schema.feature_names {
        return Err(Error::SchemaMismatch(format!(
            "projects `{}` and `{}` have different features",
            a.name, b.name
        )));
    }
    Ok(())
}

fn score_predictor(oracle: &DefectPredictor, test: &ProjectDataset, measure: TransferMeasure) -> f64 {
    let predicted: Vec<bool> = test.instances.iter().map(|z| oracle.predict(z)).collect();
    Confusion::from_predictions(&test.labels(), &predicted).score(measure)
}

fn train(train: &ProjectDataset, seed: u64, opts: &DiscoveryOptions) -> Result<DefectPredictor> {
    train_forest_with(train, opts.n_trees, seed, PlannerParams::default())
}

/// Score of a predictor trained on `train` and applied to `test`.
pub fn transfer_score(train: &ProjectDataset, test: &ProjectDataset, seed: u64) -> Result<f64> {
    transfer_score_with(train, test, seed, &DiscoveryOptions::default())
}

pub fn transfer_score_with(
    train_set: &ProjectDataset,
    test: &ProjectDataset,
    seed: u64,
    opts: &DiscoveryOptions,
) -> Result<f64> {
    check_compatible(train_set, test)?;
    let oracle = train(train_set, seed, opts)?;
    Ok(score_predictor(&oracle, test, opts.measure))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferScoreMatrix {
    pub projects: Vec<String>,
    /// `scores[i][j]`: trained on project `i`, tested on project `j`. The
    /// diagonal is `None`.
    pub scores: Vec<Vec<Option<f64>>>,
}

impl TransferScoreMatrix {
    pub fn get(&self, train: &str, test: &str) -> Option<f64> {
        let i = self.projects.iter().position(|p| p == train)?;
        let j = self.projects.iter().position(|p| p == test)?;
        self.scores[i][j]
    }

    pub fn off_diagonal(&self, i: usize) -> Vec<f64> {
        self.scores[i].iter().flatten().copied().collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BellwetherReport {
    pub matrix: TransferScoreMatrix,
    pub per_project_summary: BTreeMap<String, f64>,
    pub winner: String,
}

impl BellwetherReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n == 0 {
        return 0.0;
    }
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}

pub fn discover_bellwether(family: &[ProjectDataset], seed: u64) -> Result<BellwetherReport> {
    discover_bellwether_with(family, seed, &DiscoveryOptions::default())
}

/// Round-robin transfer matrix, summarized per training project by the
/// median of its row. Highest median wins; ties go to the lexicographically
/// first name.
///
/// Every project's predictor is trained with the same seed, so cell `(i, j)`
/// equals `transfer_score(family[i], family[j], seed)` and renaming projects
/// only permutes the report.
pub fn discover_bellwether_with(
    family: &[ProjectDataset],
    seed: u64,
    opts: &DiscoveryOptions,
) -> Result<BellwetherReport> {
    opts.validate()?;
    if family.len() < 2 {
        return Err(Error::FewerThanTwoProjects(family.len()));
    }
    for p in &family[1..] {
        check_compatible(&family[0], p)?;
    }
    let predictors = family
        .par_iter()
        .map(|p| train(p, seed, opts))
        .collect::<Result<Vec<_>>>()?;
    let scores: Vec<Vec<Option<f64>>> = predictors
        .par_iter()
        .enumerate()
        .map(|(i, oracle)| {
            family
                .iter()
                .enumerate()
                .map(|(j, test)| (i != j).then(|| score_predictor(oracle, test, opts.measure)))
                .collect()
        })
        .collect();
    let matrix = TransferScoreMatrix {
        projects: family.iter().map(|p| p.name.clone()).collect(),
        scores,
    };
    let per_project_summary: BTreeMap<String, f64> = (0..family.len())
        .map(|i| (matrix.projects[i].clone(), median(&mut matrix.off_diagonal(i))))
        .collect();
    let winner = per_project_summary
        .iter()
        .fold(None::<(&String, f64)>, |best, (name, &score)| match best {
            Some((_, s)) if s >= score => best,
            _ => Some((name, score)),
        })
        .map(|(n, _)| n.clone())
        .expect("family has at least two projects");
    Ok(BellwetherReport {
        matrix,
        per_project_summary,
        winner,
    })
}

pub(crate) struct BelltreeFit {
    pub report: BellwetherReport,
    pub tree: DecisionTree,
    /// The bellwether slice the tree was trained on.
    pub training: ProjectDataset,
}

/// Discover the bellwether among `family` and grow an XTREE on its
/// planner-train part.
pub(crate) fn belltree_planner(
    family: &[ProjectDataset],
    fractions: [f64; 3],
    params: PlannerParams,
    opts: &DiscoveryOptions,
    seed: u64,
) -> Result<BelltreeFit> {
    let report = match family {
        // a lone candidate is the bellwether by default; nothing to score
        [only] => BellwetherReport {
            matrix: TransferScoreMatrix {
                projects: vec![only.name.clone()],
                scores: vec![vec![None]],
            },
            per_project_summary: BTreeMap::new(),
            winner: only.name.clone(),
        },
        _ => discover_bellwether_with(family, derive_seed(seed, "bellwether", 0), opts)?,
    };
    let bellwether = family
        .iter()
        .find(|p| p.name == report.winner)
        .expect("winner is a family member");
    let split = three_way_split(bellwether, fractions, derive_seed(seed, "bellwether-split", 0))?;
    let tree = build_tree(&split.planner_train, params)?;
    Ok(BelltreeFit {
        report,
        tree,
        training: split.planner_train,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BelltreeOutcome {
    pub report: BellwetherReport,
    pub tree: DecisionTree,
    pub plans: Vec<PlanRecord>,
}

/// Plans for `target` from a tree grown on the bellwether of `family`.
/// `target` must not be a member of `family`.
pub fn belltree_plan(
    family: &[ProjectDataset],
    target: &ProjectDataset,
    params: PlannerParams,
    seed: u64,
) -> Result<BelltreeOutcome> {
    belltree_plan_with(family, target, params, &DiscoveryOptions::default(), seed)
}

pub fn belltree_plan_with(
    family: &[ProjectDataset],
    target: &ProjectDataset,
    params: PlannerParams,
    opts: &DiscoveryOptions,
    seed: u64,
) -> Result<BelltreeOutcome> {
    if family.iter().any(|p| p.name == target.name) {
        return Err(Error::TargetInFamily(target.name.clone()));
    }
    params.validate()?;
    let target = if let Some(first) = family.first() {
        target.restrict_features(&first.schema.feature_names)?
    } else {
        return Err(Error::FewerThanTwoProjects(0));
    };
    let fit = belltree_planner(family, DEFAULT_FRACTIONS, params, opts, seed)?;
    let plans = plan_dataset(&fit.tree, &target)?;
    Ok(BelltreeOutcome {
        report: fit.report,
        tree: fit.tree,
        plans,
    })
}
