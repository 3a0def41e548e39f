//! Decision-tree planners that recommend code-metric changes expected to
//! reduce defects, plus a harness that checks those recommendations against
//! an independent defect predictor.
//!
//! * [`planner`]: XTREE. Grows a supervised tree over MDLP-discretized
//!   metrics and turns the difference between a module's leaf and the
//!   nearest better leaf into a plan.
//! * [`bellwether`]: finds the project whose data transfers best across a
//!   family and plans with a tree grown on it (BELLTREE).
//! * [`oracle`]: the verification forest and repeated experiments that score
//!   plans by the relative drop in predicted-defective modules.
//! * [`stats`]: medians, IQRs, rank assignment and the text report.
//!
//! The `examples/` directory has one runnable program per capability.

pub mod bellwether;
pub mod dataset;
pub mod discretize;
pub mod error;
pub mod oracle;
pub mod planner;
pub mod seeding;
pub mod stats;
pub mod synthetic;

pub use bellwether::{belltree_plan, discover_bellwether, BellwetherReport, DiscoveryOptions, TransferMeasure};
pub use dataset::{
    align_family, load_csv, load_project_family, three_way_split, Instance, MetricSchema, ProjectDataset,
    ThreeWaySplit, DEFAULT_FRACTIONS,
};
pub use discretize::{mdlp_bins, FeatureBins, Interval};
pub use error::{Error, Result};
pub use oracle::{
    improvement, predict, run_experiment, train_forest, DefectPredictor, ExperimentConfig, ExperimentResult, Treatment,
};
pub use planner::{
    apply_plan, build_tree, delta_plan, locate_leaf, plan_dataset, plan_for, select_desired_leaf, DecisionTree, Plan,
    PlanRecord, Planner, PlannerParams,
};
pub use stats::{rank_treatments, render_report, summarize, ProjectSummary, TreatmentSummary};
