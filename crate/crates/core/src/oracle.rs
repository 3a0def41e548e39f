//! Verification oracle and the plan-evaluation harness.
//!
//! The oracle is a bagged forest of the same supervised trees the planner
//! uses, trained on data the planner never sees. An experiment repeat splits
//! a project three ways, fits the planner and the oracle on disjoint parts,
//! counts test instances the oracle calls defective, applies the plans, and
//! counts again. The improvement is `R = (1 - after/before) * 100`.

use std::collections::BTreeSet;
use std::fmt;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bellwether::{belltree_planner, DiscoveryOptions};
use crate::dataset::{three_way_split, Instance, MetricSchema, ProjectDataset, ThreeWaySplit, DEFAULT_FRACTIONS};
use crate::error::{Error, Result};
use crate::planner::{apply_plan, build_tree, DecisionTree, Plan, Planner, PlannerParams, TreeBuilder};
use crate::seeding::{derive_seed, rng_from_seed};

pub const DEFAULT_TREES: usize = 25;
pub const DEFAULT_REPEATS: usize = 30;

/// Random forest used as the defect predictor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DefectPredictor {
    pub trees: Vec<DecisionTree>,
    pub n_trees: usize,
    pub seed: u64,
}

/// A tree votes "defective" when its leaf is at least half defective.
fn tree_vote(tree: &DecisionTree, z: &Instance) -> bool {
    crate::planner::locate_leaf(tree, z)
        .map(|leaf| leaf.defect_probability >= 0.5)
        .unwrap_or(false)
}

impl DefectPredictor {
    pub fn from_trees(trees: Vec<DecisionTree>, seed: u64) -> Result<Self> {
        if trees.is_empty() || trees.len().is_multiple_of(2) {
            return Err(Error::EvenTreeCount(trees.len()));
        }
        Ok(DefectPredictor {
            n_trees: trees.len(),
            trees,
            seed,
        })
    }

    pub fn schema(&self) -> &MetricSchema {
        &self.trees[0].schema
    }

    pub fn votes(&self, z: &Instance) -> usize {
        self.trees.iter().filter(|t| tree_vote(t, z)).count()
    }

    pub fn predict(&self, z: &Instance) -> bool {
        2 * self.votes(z) > self.trees.len()
    }

    pub fn count_defective<'a>(&self, instances: impl IntoIterator<Item = &'a Instance>) -> usize {
        instances.into_iter().filter(|z| self.predict(z)).count()
    }
}

pub fn predict(oracle: &DefectPredictor, z: &Instance) -> bool {
    oracle.predict(z)
}

/// Bagged forest: each tree sees a bootstrap resample of `oracle_train` and
/// considers `ceil(sqrt(d))` random features per node.
pub fn train_forest(oracle_train: &ProjectDataset, n_trees: usize, seed: u64) -> Result<DefectPredictor> {
    train_forest_with(oracle_train, n_trees, seed, PlannerParams::default())
}

pub fn train_forest_with(
    oracle_train: &ProjectDataset,
    n_trees: usize,
    seed: u64,
    params: PlannerParams,
) -> Result<DefectPredictor> {
    if n_trees == 0 || n_trees.is_multiple_of(2) {
        return Err(Error::EvenTreeCount(n_trees));
    }
    if !oracle_train.has_both_classes() {
        return Err(Error::SingleClassTraining);
    }
    params.validate()?;
    let n = oracle_train.len();
    let d = oracle_train.schema.len();
    let max_features = ((d as f64).sqrt().ceil() as usize).max(1);
    let trees = (0..n_trees)
        .into_par_iter()
        .map(|t| {
            let mut rng = rng_from_seed(derive_seed(seed, "forest-tree", t as u64));
            let rows: Vec<Instance> = (0..n)
                .map(|_| oracle_train.instances[rng.random_range(0..n)].clone())
                .collect();
            TreeBuilder::new(&rows, &oracle_train.schema, params)
                .with_subsampling(max_features, &mut rng)
                .build()
        })
        .collect();
    Ok(DefectPredictor { trees, n_trees, seed })
}

/// Percent improvement `(1 - after/before) * 100`.
pub fn improvement(before: usize, after: usize) -> Result<f64> {
    if before == 0 {
        return Err(Error::ZeroBaseline);
    }
    Ok((1.0 - after as f64 / before as f64) * 100.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Treatment {
    Xtree,
    Belltree,
}

impl fmt::Display for Treatment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Treatment::Xtree => "XTREE",
            Treatment::Belltree => "BELLTREE",
        })
    }
}

impl std::str::FromStr for Treatment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "xtree" => Ok(Treatment::Xtree),
            "belltree" => Ok(Treatment::Belltree),
            _ => Err(Error::InvalidParameter(format!("unknown treatment `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub planner: PlannerParams,
    pub n_trees: usize,
    pub fractions: [f64; 3],
    pub repeats: usize,
    pub master_seed: u64,
    pub discovery: DiscoveryOptions,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            planner: PlannerParams::default(),
            n_trees: DEFAULT_TREES,
            fractions: DEFAULT_FRACTIONS,
            repeats: DEFAULT_REPEATS,
            master_seed: 1,
            discovery: DiscoveryOptions::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.repeats == 0 {
            return Err(Error::InvalidParameter("repeats must be at least 1".into()));
        }
        if self.n_trees == 0 || self.n_trees.is_multiple_of(2) {
            return Err(Error::EvenTreeCount(self.n_trees));
        }
        self.planner.validate()?;
        self.discovery.validate()
    }
}

/// Outcome of one repeat. `improvement` is `None` when the oracle saw no
/// defective test instance before planning (the run is skipped).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationRun {
    pub repeat_index: usize,
    pub seed: u64,
    pub before: usize,
    pub after: usize,
    pub planned: usize,
    #[serde(rename = "R")]
    pub improvement: Option<f64>,
}

impl EvaluationRun {
    pub fn is_skipped(&self) -> bool {
        self.improvement.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub treatment: String,
    pub project: String,
    pub runs: Vec<EvaluationRun>,
}

impl ExperimentResult {
    /// Improvement scores of the non-skipped runs.
    pub fn scores(&self) -> Vec<f64> {
        self.runs.iter().filter_map(|r| r.improvement).collect()
    }

    pub fn skipped(&self) -> usize {
        self.runs.iter().filter(|r| r.is_skipped()).count()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// CSV with columns `treatment,project,repeat,before,after,R`; skipped runs
    /// leave `R` empty.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("treatment,project,repeat,before,after,R\n");
        for r in &self.runs {
            let score = r.improvement.map(|v| v.to_string()).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                self.treatment, self.project, r.repeat_index, r.before, r.after, score
            ));
        }
        out
    }
}

/// Identifier-level record of which data fed which component in one repeat.
/// Identifiers are qualified as `project/identifier`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RepeatAudit {
    pub planner_ids: BTreeSet<String>,
    pub oracle_ids: BTreeSet<String>,
    pub test_ids: BTreeSet<String>,
    /// Projects consulted while choosing a bellwether.
    pub discovery_projects: Vec<String>,
    /// Test instances whose metrics were changed by a plan.
    pub altered_ids: BTreeSet<String>,
    /// True when every unplanned test instance came through bit-identical.
    pub unplanned_untouched: bool,
}

fn qualified(data: &ProjectDataset) -> BTreeSet<String> {
    data.instances
        .iter()
        .map(|i| format!("{}/{}", data.name, i.identifier))
        .collect()
}

/// A fitted planner together with the data that trained it.
pub struct FittedPlanner {
    pub planner: Box<dyn Planner>,
    pub training: Vec<ProjectDataset>,
    pub discovery_projects: Vec<String>,
}

/// Planner that never proposes a change; the neutral baseline.
#[derive(Debug, Clone)]
pub struct IdentityPlanner {
    pub schema: MetricSchema,
}

impl Planner for IdentityPlanner {
    fn schema(&self) -> &MetricSchema {
        &self.schema
    }

    fn plan(&self, _z: &Instance) -> Result<Option<Plan>> {
        Ok(None)
    }
}

/// Apply `planner` to every test instance. Returns the altered test set and,
/// per instance, whether it received a plan.
pub fn alter_test_set(planner: &dyn Planner, test: &[Instance]) -> Result<(Vec<Instance>, Vec<bool>)> {
    let mut planned = Vec::with_capacity(test.len());
    let altered = test
        .iter()
        .map(|z| match planner.plan(z)? {
            Some(plan) => {
                planned.push(true);
                apply_plan(planner.schema(), z, &plan)
            }
            None => {
                planned.push(false);
                Ok(z.clone())
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((altered, planned))
}

fn run_repeat<F>(
    target: &ProjectDataset,
    config: &ExperimentConfig,
    repeat: usize,
    fit: &F,
) -> Result<(EvaluationRun, RepeatAudit)>
where
    F: Fn(&ThreeWaySplit, u64) -> Result<FittedPlanner> + Sync,
{
    let seed = derive_seed(config.master_seed, "repeat", repeat as u64);
    let split = three_way_split(target, config.fractions, derive_seed(seed, "split", 0))?;
    let fitted = fit(&split, derive_seed(seed, "planner", 0))?;
    if fitted.planner.schema().feature_names != target.schema.feature_names {
        return Err(Error::SchemaMismatch(format!(
            "planner features differ from project `{}`",
            target.name
        )));
    }
    let oracle = train_forest_with(
        &split.oracle_train,
        config.n_trees,
        derive_seed(seed, "oracle", 0),
        config.planner,
    )?;

    let before = oracle.count_defective(&split.test.instances);
    let (altered, planned) = alter_test_set(fitted.planner.as_ref(), &split.test.instances)?;
    let after = oracle.count_defective(&altered);

    let mut audit = RepeatAudit {
        planner_ids: fitted.training.iter().flat_map(qualified).collect(),
        oracle_ids: qualified(&split.oracle_train),
        test_ids: qualified(&split.test),
        discovery_projects: fitted.discovery_projects,
        altered_ids: BTreeSet::new(),
        unplanned_untouched: true,
    };
    for ((orig, new), &was_planned) in split.test.instances.iter().zip(&altered).zip(&planned) {
        let same = orig == new
            && orig
                .features
                .iter()
                .zip(&new.features)
                .all(|(a, b)| a.to_bits() == b.to_bits());
        if !same {
            audit.altered_ids.insert(format!("{}/{}", target.name, orig.identifier));
            if !was_planned {
                audit.unplanned_untouched = false;
            }
        }
    }

    let run = EvaluationRun {
        repeat_index: repeat,
        seed,
        before,
        after,
        planned: planned.iter().filter(|&&p| p).count(),
        improvement: improvement(before, after).ok(),
    };
    Ok((run, audit))
}

/// Run `config.repeats` independent repeats with a caller-supplied planner
/// factory. Repeats run in parallel and are merged by repeat index.
pub fn run_experiment_with<F>(
    target: &ProjectDataset,
    treatment: &str,
    config: &ExperimentConfig,
    fit: F,
) -> Result<(ExperimentResult, Vec<RepeatAudit>)>
where
    F: Fn(&ThreeWaySplit, u64) -> Result<FittedPlanner> + Sync,
{
    config.validate()?;
    let outcomes = (0..config.repeats)
        .into_par_iter()
        .map(|r| run_repeat(target, config, r, &fit))
        .collect::<Result<Vec<_>>>()?;
    let (runs, audits) = outcomes.into_iter().unzip();
    Ok((
        ExperimentResult {
            treatment: treatment.to_string(),
            project: target.name.clone(),
            runs,
        },
        audits,
    ))
}

/// XTREE is trained on the target's planner-train part; BELLTREE on the
/// bellwether chosen among `others` (which must not contain the target).
pub fn run_experiment(
    target: &ProjectDataset,
    others: &[ProjectDataset],
    treatment: Treatment,
    config: &ExperimentConfig,
) -> Result<ExperimentResult> {
    run_experiment_audited(target, others, treatment, config).map(|(r, _)| r)
}

pub fn run_experiment_audited(
    target: &ProjectDataset,
    others: &[ProjectDataset],
    treatment: Treatment,
    config: &ExperimentConfig,
) -> Result<(ExperimentResult, Vec<RepeatAudit>)> {
    let name = treatment.to_string();
    match treatment {
        Treatment::Xtree => run_experiment_with(target, &name, config, |split, _seed| {
            let tree = build_tree(&split.planner_train, config.planner)?;
            Ok(FittedPlanner {
                planner: Box::new(tree),
                training: vec![split.planner_train.clone()],
                discovery_projects: Vec::new(),
            })
        }),
        Treatment::Belltree => {
            if others.iter().any(|p| p.name == target.name) {
                return Err(Error::TargetInFamily(target.name.clone()));
            }
            run_experiment_with(target, &name, config, |_split, seed| {
                let fitted = belltree_planner(others, config.fractions, config.planner, &config.discovery, seed)?;
                Ok(FittedPlanner {
                    planner: Box::new(fitted.tree),
                    training: vec![fitted.training],
                    discovery_projects: fitted.report.matrix.projects.clone(),
                })
            })
        }
    }
}
