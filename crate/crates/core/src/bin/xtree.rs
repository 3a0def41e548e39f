use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};

use xtree::bellwether::{belltree_plan_with, discover_bellwether_with, DiscoveryOptions, TransferMeasure};
use xtree::dataset::{load_csv, load_project_family, ProjectDataset};
use xtree::oracle::{run_experiment, ExperimentConfig, ExperimentResult, Treatment, DEFAULT_REPEATS, DEFAULT_TREES};
use xtree::planner::{build_tree, plan_dataset, PlanRecord, PlannerParams};
use xtree::stats::{
    rank_treatments, render_report, summaries_csv, ProjectSummary, DEFAULT_ALPHA, DEFAULT_EFFECT_THRESHOLD,
};
use xtree::Error;

#[derive(Parser)]
#[command(
    name = "xtree",
    version,
    about = "Plan metric changes that reduce defects, and check the plans"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emit plans for every instance of a test project.
    Plan(PlanArgs),
    /// Find the bellwether of a project family.
    Bellwether(BellwetherArgs),
    /// Run repeated plan-verification experiments and rank the treatments.
    Evaluate(EvaluateArgs),
    /// Render the ranking report from saved experiment results.
    Report(ReportArgs),
}

#[derive(Args, Clone)]
struct PlannerFlags {
    /// Maximum tree depth.
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..=64))]
    max_depth: u64,
    /// Minimum instances per bin; defaults to max(4, ceil(sqrt(n))).
    #[arg(long)]
    min_support: Option<usize>,
    /// Minimum information gain for a split.
    #[arg(long, default_value_t = 1e-3)]
    min_gain: f64,
    /// Instances whose leaf defect probability is at least this get a plan.
    #[arg(long, default_value_t = 0.5)]
    planning_threshold: f64,
}

impl PlannerFlags {
    fn params(&self) -> xtree::Result<PlannerParams> {
        let p = PlannerParams {
            max_depth: self.max_depth as usize,
            min_support: self.min_support,
            min_gain: self.min_gain,
            planning_threshold: self.planning_threshold,
        };
        p.validate()?;
        Ok(p)
    }
}

#[derive(Args, Clone)]
struct DiscoveryFlags {
    /// Trees per forest (odd).
    #[arg(long, default_value_t = DEFAULT_TREES)]
    n_trees: usize,
    /// Transfer measure for bellwether discovery: g, recall or f1.
    #[arg(long, default_value = "g")]
    measure: TransferMeasure,
}

impl DiscoveryFlags {
    fn options(&self) -> xtree::Result<DiscoveryOptions> {
        let o = DiscoveryOptions {
            measure: self.measure,
            n_trees: self.n_trees,
        };
        o.validate()?;
        Ok(o)
    }
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum TreatmentArg {
    Xtree,
    Belltree,
}

impl From<TreatmentArg> for Treatment {
    fn from(t: TreatmentArg) -> Self {
        match t {
            TreatmentArg::Xtree => Treatment::Xtree,
            TreatmentArg::Belltree => Treatment::Belltree,
        }
    }
}

#[derive(Args)]
struct PlanArgs {
    #[arg(long, value_enum, default_value = "xtree")]
    treatment: TreatmentArg,
    /// Training project CSV (xtree).
    #[arg(long)]
    train: Option<PathBuf>,
    /// Project CSV to plan for (xtree).
    #[arg(long)]
    test: Option<PathBuf>,
    /// Directory of project CSVs (belltree).
    #[arg(long)]
    family: Option<PathBuf>,
    /// Project CSV to plan for (belltree); excluded from the family by name.
    #[arg(long)]
    target: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[command(flatten)]
    planner: PlannerFlags,
    #[command(flatten)]
    discovery: DiscoveryFlags,
}

#[derive(Args)]
struct BellwetherArgs {
    #[arg(long)]
    family: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[command(flatten)]
    discovery: DiscoveryFlags,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Directory of project CSVs.
    #[arg(long)]
    family: PathBuf,
    /// Comma-separated treatments.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "xtree,belltree")]
    treatments: Vec<TreatmentArg>,
    /// Comma-separated project names to evaluate; defaults to every project.
    #[arg(long, value_delimiter = ',')]
    projects: Vec<String>,
    #[arg(long, default_value_t = DEFAULT_REPEATS)]
    repeats: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Directory for result files and report.txt.
    #[arg(long)]
    out_dir: PathBuf,
    /// Result file format.
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    alpha: f64,
    #[arg(long, default_value_t = DEFAULT_EFFECT_THRESHOLD)]
    effect_threshold: f64,
    #[command(flatten)]
    planner: PlannerFlags,
    #[command(flatten)]
    discovery: DiscoveryFlags,
}

#[derive(Args)]
struct ReportArgs {
    /// Directory of result JSON files written by `evaluate`.
    #[arg(long)]
    results: PathBuf,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    alpha: f64,
    #[arg(long, default_value_t = DEFAULT_EFFECT_THRESHOLD)]
    effect_threshold: f64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Plan(a) => cmd_plan(a),
        Command::Bellwether(a) => cmd_bellwether(a),
        Command::Evaluate(a) => cmd_evaluate(a),
        Command::Report(a) => cmd_report(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_input_error() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn usage_error(subcommand: &str, msg: &str) -> ! {
    let mut cmd = Cli::command();
    cmd.build();
    let sub = cmd.find_subcommand_mut(subcommand).expect("known subcommand");
    sub.error(ErrorKind::MissingRequiredArgument, msg).exit()
}

fn write_atomic(path: &Path, contents: &str) -> xtree::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let io = |e: std::io::Error| Error::Io {
        path: path.to_path_buf(),
        source: e,
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents.as_bytes()).map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

fn plans_csv(plans: &[PlanRecord]) -> String {
    let fmt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    let mut out = String::from("identifier,source_leaf,target_leaf,expected_probability_drop,feature,low,high\n");
    for p in plans {
        for rx in &p.prescriptions {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                p.identifier,
                p.source_leaf,
                p.target_leaf,
                p.expected_probability_drop,
                rx.feature,
                fmt(rx.low),
                fmt(rx.high)
            ));
        }
    }
    out
}

fn cmd_plan(a: PlanArgs) -> xtree::Result<()> {
    let params = a.planner.params()?;
    let plans = match a.treatment {
        TreatmentArg::Xtree => {
            let (Some(train), Some(test)) = (&a.train, &a.test) else {
                usage_error("plan", "plan --treatment xtree requires --train and --test");
            };
            let train = load_csv(train, None)?;
            let test = load_csv(test, None)?.restrict_features(&train.schema.feature_names)?;
            let tree = build_tree(&train, params)?;
            plan_dataset(&tree, &test)?
        }
        TreatmentArg::Belltree => {
            let (Some(family), Some(target)) = (&a.family, &a.target) else {
                usage_error("plan", "plan --treatment belltree requires --family and --target");
            };
            let target = load_csv(target, None)?;
            let family: Vec<ProjectDataset> = load_project_family(family)?
                .into_iter()
                .filter(|p| p.name != target.name)
                .collect();
            let outcome = belltree_plan_with(&family, &target, params, &a.discovery.options()?, a.seed)?;
            eprintln!("bellwether: {}", outcome.report.winner);
            outcome.plans
        }
    };
    let body = match a.format {
        Format::Csv => plans_csv(&plans),
        _ => serde_json::to_string_pretty(&plans)? + "\n",
    };
    write_atomic(&a.out, &body)?;
    let mean_drop = if plans.is_empty() {
        0.0
    } else {
        plans.iter().map(|p| p.expected_probability_drop).sum::<f64>() / plans.len() as f64
    };
    println!("{} plans, mean expected_probability_drop {mean_drop:.4}", plans.len());
    Ok(())
}

fn cmd_bellwether(a: BellwetherArgs) -> xtree::Result<()> {
    let family = load_project_family(&a.family)?;
    let report = discover_bellwether_with(&family, a.seed, &a.discovery.options()?)?;
    write_atomic(&a.out, &(report.to_json()? + "\n"))?;
    println!("bellwether: {}", report.winner);
    Ok(())
}

fn summarize_results(results: &[ExperimentResult], alpha: f64, effect: f64) -> xtree::Result<Vec<ProjectSummary>> {
    let mut projects: Vec<&str> = results.iter().map(|r| r.project.as_str()).collect();
    projects.sort_unstable();
    projects.dedup();
    projects
        .into_iter()
        .map(|project| {
            let groups: Vec<(String, Vec<f64>)> = results
                .iter()
                .filter(|r| r.project == project)
                .filter_map(|r| {
                    let scores = r.scores();
                    if scores.is_empty() {
                        eprintln!(
                            "note: {} on {} has no scored runs; left out of the ranking",
                            r.treatment, project
                        );
                        None
                    } else {
                        Some((r.treatment.clone(), scores))
                    }
                })
                .collect();
            let treatments = if groups.is_empty() {
                Vec::new()
            } else {
                rank_treatments(&groups, alpha, effect)?
            };
            Ok(ProjectSummary {
                project: project.to_string(),
                treatments,
            })
        })
        .collect()
}

fn cmd_evaluate(a: EvaluateArgs) -> xtree::Result<()> {
    if a.repeats == 0 {
        return Err(Error::InvalidParameter("--repeats must be at least 1".into()));
    }
    let config = ExperimentConfig {
        planner: a.planner.params()?,
        n_trees: a.discovery.n_trees,
        repeats: a.repeats,
        master_seed: a.seed,
        discovery: a.discovery.options()?,
        ..ExperimentConfig::default()
    };
    config.validate()?;
    // fail on bad stats flags before the long run
    rank_treatments(&[("probe".into(), vec![0.0])], a.alpha, a.effect_threshold)?;
    let format = match a.format {
        Format::Text => return Err(Error::InvalidParameter("result files are json or csv".into())),
        f => f,
    };

    let family = load_project_family(&a.family)?;
    for name in &a.projects {
        if !family.iter().any(|p| &p.name == name) {
            return Err(Error::InvalidParameter(format!("no project `{name}` in the family")));
        }
    }
    std::fs::create_dir_all(&a.out_dir).map_err(|e| Error::Io {
        path: a.out_dir.clone(),
        source: e,
    })?;

    let mut results = Vec::new();
    for target in &family {
        if !a.projects.is_empty() && !a.projects.contains(&target.name) {
            continue;
        }
        let others: Vec<ProjectDataset> = family.iter().filter(|p| p.name != target.name).cloned().collect();
        for &t in &a.treatments {
            let result = run_experiment(target, &others, t.into(), &config)?;
            let (ext, body) = match format {
                Format::Csv => ("csv", result.to_csv()),
                _ => ("json", result.to_json()? + "\n"),
            };
            write_atomic(
                &a.out_dir.join(format!("{}_{}.{ext}", result.project, result.treatment)),
                &body,
            )?;
            eprintln!(
                "{} {}: {} runs, {} skipped",
                result.project,
                result.treatment,
                result.runs.len(),
                result.skipped()
            );
            results.push(result);
        }
    }
    let report = render_report(&summarize_results(&results, a.alpha, a.effect_threshold)?);
    write_atomic(&a.out_dir.join("report.txt"), &report)?;
    print!("{report}");
    Ok(())
}

fn cmd_report(a: ReportArgs) -> xtree::Result<()> {
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |e| Error::Io { path, source: e }
    };
    let mut files: Vec<PathBuf> = std::fs::read_dir(&a.results)
        .map_err(io(&a.results))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    files.sort();
    let results = files
        .iter()
        .map(|f| {
            let text = std::fs::read_to_string(f).map_err(io(f))?;
            serde_json::from_str::<ExperimentResult>(&text)
                .map_err(|e| Error::InvalidSchema(format!("{}: {e}", f.display())))
        })
        .collect::<xtree::Result<Vec<_>>>()?;
    if results.is_empty() {
        return Err(Error::InvalidParameter(format!(
            "no result files in {}",
            a.results.display()
        )));
    }
    let summaries = summarize_results(&results, a.alpha, a.effect_threshold)?;
    let body = match a.format {
        Format::Csv => summaries_csv(&summaries),
        Format::Json => serde_json::to_string_pretty(&summaries)? + "\n",
        Format::Text => render_report(&summaries),
    };
    match &a.out {
        Some(path) => write_atomic(path, &body)?,
        None => print!("{body}"),
    }
    Ok(())
}
