//! Project metric datasets: CSV loading, validation, stratified splitting,
//! and multi-project families.
//!
//! A dataset is one CSV file per project release. Numeric columns become
//! features, the defect column (`bug`, `bugs`, or `defects` unless overridden)
//! becomes the target, and every other column is carried through as an
//! identifier.

use std::collections::{BTreeSet, HashMap};
use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seeding::rng_from_seed;

/// Header names recognized as the defect-count column, compared case-insensitively.
pub const TARGET_CANDIDATES: [&str; 3] = ["bug", "bugs", "defects"];

/// Header names always treated as identifiers even when their cells are numeric
/// (PROMISE files carry a numeric `version` column, for example).
pub const IDENTIFIER_NAMES: [&str; 10] = [
    "name",
    "name.1",
    "version",
    "id",
    "class",
    "classname",
    "file",
    "filename",
    "module",
    "project",
];

/// Planner-train, oracle-train, and test fractions used when none are given.
pub const DEFAULT_FRACTIONS: [f64; 3] = [0.5, 0.25, 0.25];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSchema {
    pub feature_names: Vec<String>,
    pub identifier_columns: Vec<String>,
    pub target_column: String,
}

impl MetricSchema {
    pub fn new(
        feature_names: Vec<String>,
        identifier_columns: Vec<String>,
        target_column: impl Into<String>,
    ) -> Result<Self> {
        let target_column = target_column.into();
        if feature_names.is_empty() {
            return Err(Error::InvalidSchema("no feature columns".into()));
        }
        let mut seen = BTreeSet::new();
        for name in &feature_names {
            if !seen.insert(name.as_str()) {
                return Err(Error::InvalidSchema(format!("duplicate feature `{name}`")));
            }
        }
        if seen.contains(target_column.as_str()) {
            return Err(Error::InvalidSchema(format!(
                "target `{target_column}` is also listed as a feature"
            )));
        }
        Ok(MetricSchema {
            feature_names,
            identifier_columns,
            target_column,
        })
    }

    pub fn len(&self) -> usize {
        self.feature_names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.feature_names.is_empty()
    }

    pub fn index_of(&self, feature: &str) -> Option<usize> {
        self.feature_names.iter().position(|f| f == feature)
    }
}

/// One module (class/file) of a project: its metric vector and defect count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub identifier: String,
    /// Raw values of the identifier columns, in schema order.
    pub id_fields: Vec<String>,
    pub features: Vec<f64>,
    pub defect_count: u64,
    pub defective: bool,
}

impl Instance {
    pub fn new(identifier: impl Into<String>, features: Vec<f64>, defect_count: u64) -> Self {
        Instance {
            identifier: identifier.into(),
            id_fields: Vec::new(),
            features,
            defect_count,
            defective: defect_count > 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectDataset {
    pub name: String,
    pub schema: MetricSchema,
    pub instances: Vec<Instance>,
}

impl ProjectDataset {
    pub fn new(name: impl Into<String>, schema: MetricSchema, instances: Vec<Instance>) -> Result<Self> {
        let name = name.into();
        if instances.is_empty() {
            return Err(Error::EmptyDataset(name));
        }
        for inst in &instances {
            if inst.features.len() != schema.len() {
                return Err(Error::SchemaMismatch(format!(
                    "instance `{}` has {} features, schema has {}",
                    inst.identifier,
                    inst.features.len(),
                    schema.len()
                )));
            }
            if inst.defective != (inst.defect_count > 0) {
                return Err(Error::InvalidSchema(format!(
                    "instance `{}` has an inconsistent defective flag",
                    inst.identifier
                )));
            }
        }
        Ok(ProjectDataset {
            name,
            schema,
            instances,
        })
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    pub fn labels(&self) -> Vec<bool> {
        self.instances.iter().map(|i| i.defective).collect()
    }

    pub fn defective_count(&self) -> usize {
        self.instances.iter().filter(|i| i.defective).count()
    }

    pub fn defect_ratio(&self) -> f64 {
        if self.instances.is_empty() {
            return 0.0;
        }
        self.defective_count() as f64 / self.len() as f64
    }

    pub fn has_both_classes(&self) -> bool {
        let d = self.defective_count();
        d > 0 && d < self.len()
    }

    pub fn column(&self, feature: usize) -> Vec<f64> {
        self.instances.iter().map(|i| i.features[feature]).collect()
    }

    /// Population standard deviation of one feature.
    pub fn feature_std(&self, feature: usize) -> f64 {
        population_std(&self.column(feature))
    }

    pub fn identifiers(&self) -> Vec<&str> {
        self.instances.iter().map(|i| i.identifier.as_str()).collect()
    }

    /// Copy of the dataset holding only the instances at `indices` (in that order).
    pub fn select(&self, indices: &[usize]) -> ProjectDataset {
        ProjectDataset {
            name: self.name.clone(),
            schema: self.schema.clone(),
            instances: indices.iter().map(|&i| self.instances[i].clone()).collect(),
        }
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Keep only the named features, in the given order.
    pub fn restrict_features(&self, features: &[String]) -> Result<ProjectDataset> {
        let idx = features
            .iter()
            .map(|f| self.schema.index_of(f).ok_or_else(|| Error::UnknownFeature(f.clone())))
            .collect::<Result<Vec<_>>>()?;
        let schema = MetricSchema::new(
            features.to_vec(),
            self.schema.identifier_columns.clone(),
            self.schema.target_column.clone(),
        )?;
        let instances = self
            .instances
            .iter()
            .map(|inst| Instance {
                features: idx.iter().map(|&j| inst.features[j]).collect(),
                ..inst.clone()
            })
            .collect();
        Ok(ProjectDataset {
            name: self.name.clone(),
            schema,
            instances,
        })
    }

    /// Write the dataset as CSV: identifier columns, then features, then the target.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let csv_err = |source| Error::Csv {
            path: path.to_path_buf(),
            source,
        };
        let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
        let header = self
            .schema
            .identifier_columns
            .iter()
            .chain(&self.schema.feature_names)
            .chain(std::iter::once(&self.schema.target_column));
        w.write_record(header).map_err(csv_err)?;
        let n_ids = self.schema.identifier_columns.len();
        for inst in &self.instances {
            let mut rec: Vec<String> = Vec::with_capacity(n_ids + inst.features.len() + 1);
            for k in 0..n_ids {
                rec.push(inst.id_fields.get(k).cloned().unwrap_or_default());
            }
            rec.extend(inst.features.iter().map(|v| v.to_string()));
            rec.push(inst.defect_count.to_string());
            w.write_record(&rec).map_err(csv_err)?;
        }
        w.flush().map_err(|e| Error::io(path, e))?;
        Ok(())
    }
}

pub(crate) fn population_std(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    var.sqrt()
}

#[derive(Debug, Clone, Default)]
pub struct LoadOptions {
    /// Explicit schema; features and target are looked up by name and every
    /// other column becomes an identifier.
    pub schema: Option<MetricSchema>,
    /// Overrides the default defect-column names.
    pub target_column: Option<String>,
}

pub fn load_csv(path: impl AsRef<Path>, schema_hint: Option<&MetricSchema>) -> Result<ProjectDataset> {
    let opts = LoadOptions {
        schema: schema_hint.cloned(),
        target_column: None,
    };
    load_csv_with(path, &opts)
}

enum ColumnRole {
    Identifier,
    Feature,
    Target,
}

pub fn load_csv_with(path: impl AsRef<Path>, opts: &LoadOptions) -> Result<ProjectDataset> {
    let path = path.as_ref();
    let csv_err = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "project".to_string());

    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(file);
    let headers: Vec<String> = reader.headers().map_err(csv_err)?.iter().map(str::to_string).collect();
    let rows: Vec<csv::StringRecord> = reader
        .records()
        .collect::<std::result::Result<_, _>>()
        .map_err(csv_err)?;
    if rows.is_empty() {
        return Err(Error::EmptyDataset(name));
    }

    let roles = match &opts.schema {
        Some(schema) => roles_from_schema(&headers, schema)?,
        None => infer_roles(&headers, &rows, opts.target_column.as_deref())?,
    };

    let mut feature_names = Vec::new();
    let mut identifier_columns = Vec::new();
    let mut target_column = String::new();
    for (h, role) in headers.iter().zip(&roles) {
        match role {
            ColumnRole::Feature => feature_names.push(h.clone()),
            ColumnRole::Identifier => identifier_columns.push(h.clone()),
            ColumnRole::Target => target_column = h.clone(),
        }
    }
    // A hinted schema fixes the feature order; inferred schemas use file order.
    let feature_cols: Vec<usize> = match &opts.schema {
        Some(schema) => schema
            .feature_names
            .iter()
            .map(|f| {
                headers
                    .iter()
                    .position(|h| h == f)
                    .expect("checked by roles_from_schema")
            })
            .collect(),
        None => roles
            .iter()
            .enumerate()
            .filter(|(_, r)| matches!(r, ColumnRole::Feature))
            .map(|(i, _)| i)
            .collect(),
    };
    if let Some(schema) = &opts.schema {
        feature_names = schema.feature_names.clone();
    }
    let schema = MetricSchema::new(feature_names, identifier_columns, target_column)?;
    let target_col = headers
        .iter()
        .position(|h| *h == schema.target_column)
        .expect("target column located");
    let id_cols: Vec<usize> = roles
        .iter()
        .enumerate()
        .filter(|(_, r)| matches!(r, ColumnRole::Identifier))
        .map(|(i, _)| i)
        .collect();

    let mut instances = Vec::with_capacity(rows.len());
    let mut seen: HashMap<String, usize> = HashMap::new();
    for (r, rec) in rows.iter().enumerate() {
        let row = r + 1;
        let mut features = Vec::with_capacity(feature_cols.len());
        for &c in &feature_cols {
            let cell = rec.get(c).unwrap_or("");
            match parse_finite(cell) {
                Some(v) => features.push(v),
                None => {
                    return Err(Error::NonNumericFeature {
                        row,
                        column: headers[c].clone(),
                        value: cell.to_string(),
                    })
                }
            }
        }
        let raw_target = rec.get(target_col).unwrap_or("");
        let defect_count = parse_count(raw_target).ok_or_else(|| Error::InvalidDefectCount {
            row,
            value: raw_target.to_string(),
        })?;
        let id_fields: Vec<String> = id_cols.iter().map(|&c| rec.get(c).unwrap_or("").to_string()).collect();
        let base = if id_fields.is_empty() {
            format!("row{row}")
        } else {
            id_fields.join(":")
        };
        let count = seen.entry(base.clone()).or_insert(0);
        *count += 1;
        let identifier = if *count == 1 { base } else { format!("{base}#{count}") };
        instances.push(Instance {
            identifier,
            id_fields,
            features,
            defect_count,
            defective: defect_count > 0,
        });
    }
    ProjectDataset::new(name, schema, instances)
}

fn parse_finite(cell: &str) -> Option<f64> {
    cell.trim().parse::<f64>().ok().filter(|v| v.is_finite())
}

fn parse_count(cell: &str) -> Option<u64> {
    let v = parse_finite(cell)?;
    (v >= 0.0 && v.fract() == 0.0 && v < u64::MAX as f64).then_some(v as u64)
}

fn roles_from_schema(headers: &[String], schema: &MetricSchema) -> Result<Vec<ColumnRole>> {
    if !headers.contains(&schema.target_column) {
        return Err(Error::MissingTargetColumn {
            candidates: schema.target_column.clone(),
        });
    }
    for f in &schema.feature_names {
        if !headers.contains(f) {
            return Err(Error::MissingColumn { column: f.clone() });
        }
    }
    let mut target_seen = false;
    Ok(headers
        .iter()
        .map(|h| {
            if *h == schema.target_column && !target_seen {
                target_seen = true;
                ColumnRole::Target
            } else if schema.feature_names.contains(h) {
                ColumnRole::Feature
            } else {
                ColumnRole::Identifier
            }
        })
        .collect())
}

fn infer_roles(
    headers: &[String],
    rows: &[csv::StringRecord],
    target_override: Option<&str>,
) -> Result<Vec<ColumnRole>> {
    let target = match target_override {
        Some(t) => headers.iter().position(|h| h.eq_ignore_ascii_case(t)),
        None => headers
            .iter()
            .position(|h| TARGET_CANDIDATES.iter().any(|c| h.eq_ignore_ascii_case(c))),
    }
    .ok_or_else(|| Error::MissingTargetColumn {
        candidates: match target_override {
            Some(t) => t.to_string(),
            None => TARGET_CANDIDATES.join(", "),
        },
    })?;

    let mut feature_seen = BTreeSet::new();
    Ok(headers
        .iter()
        .enumerate()
        .map(|(c, h)| {
            if c == target {
                return ColumnRole::Target;
            }
            let lower = h.to_ascii_lowercase();
            if IDENTIFIER_NAMES.contains(&lower.as_str()) || !feature_seen.insert(h.clone()) {
                return ColumnRole::Identifier;
            }
            // A column with no numeric cell at all is descriptive text.
            let any_numeric = rows.iter().any(|r| r.get(c).and_then(parse_finite).is_some());
            if any_numeric {
                ColumnRole::Feature
            } else {
                ColumnRole::Identifier
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThreeWaySplit {
    pub planner_train: ProjectDataset,
    pub oracle_train: ProjectDataset,
    pub test: ProjectDataset,
}

impl ThreeWaySplit {
    pub fn parts(&self) -> [&ProjectDataset; 3] {
        [&self.planner_train, &self.oracle_train, &self.test]
    }
}

/// Largest-remainder apportionment of `total` across `weights` (which sum to 1).
/// Ties in the remainder go to the earlier slot.
fn apportion(total: usize, weights: &[f64]) -> Vec<usize> {
    let raw: Vec<f64> = weights.iter().map(|w| w * total as f64).collect();
    let mut counts: Vec<usize> = raw.iter().map(|r| r.floor() as usize).collect();
    let assigned: usize = counts.iter().sum();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| {
        let fa = raw[a] - raw[a].floor();
        let fb = raw[b] - raw[b].floor();
        fb.total_cmp(&fa).then(a.cmp(&b))
    });
    for &k in order.iter().take(total.saturating_sub(assigned)) {
        counts[k] += 1;
    }
    counts
}

/// Stratified, seeded split into planner-train, oracle-train, and test parts.
///
/// Part sizes follow `fractions` by largest remainder; within each part the
/// defective share tracks the whole dataset. Instances keep their original
/// order inside each part.
pub fn three_way_split(data: &ProjectDataset, fractions: [f64; 3], seed: u64) -> Result<ThreeWaySplit> {
    if fractions.iter().any(|f| !f.is_finite() || *f < 0.0) || (fractions.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidFractions(fractions));
    }
    if let Some(k) = fractions.iter().position(|&f| f == 0.0) {
        return Err(Error::TooFewInstances(format!("part {k} has a zero fraction")));
    }
    let n = data.len();
    let sizes = apportion(n, &fractions);
    if let Some(k) = sizes.iter().position(|&s| s == 0) {
        return Err(Error::TooFewInstances(format!(
            "part {k} would be empty with {n} instances"
        )));
    }

    let mut pos: Vec<usize> = Vec::new();
    let mut neg: Vec<usize> = Vec::new();
    for (i, inst) in data.instances.iter().enumerate() {
        if inst.defective {
            pos.push(i)
        } else {
            neg.push(i)
        }
    }
    let mut rng = rng_from_seed(seed);
    pos.shuffle(&mut rng);
    neg.shuffle(&mut rng);

    let size_weights: Vec<f64> = sizes.iter().map(|&s| s as f64 / n as f64).collect();
    let pos_counts = apportion(pos.len(), &size_weights);

    let mut parts: Vec<Vec<usize>> = Vec::with_capacity(3);
    let (mut p_at, mut n_at) = (0, 0);
    for k in 0..3 {
        let take_pos = pos_counts[k].min(sizes[k]);
        let take_neg = sizes[k] - take_pos;
        let mut idx: Vec<usize> = pos[p_at..p_at + take_pos]
            .iter()
            .chain(&neg[n_at..n_at + take_neg])
            .copied()
            .collect();
        p_at += take_pos;
        n_at += take_neg;
        if take_pos == 0 || take_neg == 0 {
            return Err(Error::TooFewInstances(format!(
                "part {k} would contain a single class ({take_pos} defective, {take_neg} clean)"
            )));
        }
        idx.sort_unstable();
        parts.push(idx);
    }

    Ok(ThreeWaySplit {
        planner_train: data.select(&parts[0]),
        oracle_train: data.select(&parts[1]),
        test: data.select(&parts[2]),
    })
}

/// Load every `*.csv` in `directory` (lexicographic order), restricted to the
/// features all projects share. Features keep the first project's order.
pub fn load_project_family(directory: impl AsRef<Path>) -> Result<Vec<ProjectDataset>> {
    let directory = directory.as_ref();
    let mut files: Vec<PathBuf> = fs::read_dir(directory)
        .map_err(|e| Error::io(directory, e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")))
        .collect();
    files.sort();
    if files.len() < 2 {
        return Err(Error::FewerThanTwoProjects(files.len()));
    }
    let datasets = files.iter().map(|f| load_csv(f, None)).collect::<Result<Vec<_>>>()?;
    align_family(datasets)
}

/// Restrict a set of datasets to their common features (first dataset's order).
pub fn align_family(datasets: Vec<ProjectDataset>) -> Result<Vec<ProjectDataset>> {
    let Some(first) = datasets.first() else {
        return Err(Error::FewerThanTwoProjects(0));
    };
    let shared: Vec<String> = first
        .schema
        .feature_names
        .iter()
        .filter(|f| datasets.iter().all(|d| d.schema.index_of(f).is_some()))
        .cloned()
        .collect();
    if shared.is_empty() {
        return Err(Error::IncompatibleSchemas);
    }
    datasets.iter().map(|d| d.restrict_features(&shared)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
        let p = dir.join(name);
        let mut f = fs::File::create(&p).unwrap();
        f.write_all(body.as_bytes()).unwrap();
        p
    }

    fn synthetic(n: usize, defective_every: usize) -> ProjectDataset {
        let schema = MetricSchema::new(vec!["wmc".into(), "loc".into()], vec![], "bug").unwrap();
        let instances = (0..n)
            .map(|i| {
                let bug = u64::from(i % defective_every == 0);
                Instance::new(format!("c{i}"), vec![i as f64, (i * 3) as f64], bug)
            })
            .collect();
        ProjectDataset::new("syn", schema, instances).unwrap()
    }

    #[test]
    fn loads_small_csv_and_derives_flags() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(dir.path(), "tiny.csv", "name,wmc,rfc,bug\na,1,2,0\nb,3,4,2\nc,5,6,1\n");
        let d = load_csv(&p, None).unwrap();
        assert_eq!(d.name, "tiny");
        assert_eq!(d.schema.feature_names, vec!["wmc", "rfc"]);
        assert_eq!(d.schema.identifier_columns, vec!["name"]);
        assert_eq!(d.schema.target_column, "bug");
        let flags: Vec<bool> = d.instances.iter().map(|i| i.defective).collect();
        assert_eq!(flags, vec![false, true, true]);
        assert_eq!(d.instances[1].defect_count, 2);
    }

    #[test]
    fn non_numeric_cell_names_row_and_column() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(dir.path(), "bad.csv", "name,wmc,rfc,bug\na,1,2,0\nb,3,n/a,2\nc,5,6,1\n");
        match load_csv(&p, None) {
            Err(Error::NonNumericFeature { row, column, value }) => {
                assert_eq!(row, 2);
                assert_eq!(column, "rfc");
                assert_eq!(value, "n/a");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn missing_target_and_empty_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(dir.path(), "nt.csv", "name,wmc,rfc\na,1,2\n");
        assert!(matches!(load_csv(&p, None), Err(Error::MissingTargetColumn { .. })));
        let p = write(dir.path(), "empty.csv", "name,wmc,bug\n");
        assert!(matches!(load_csv(&p, None), Err(Error::EmptyDataset(_))));
    }

    #[test]
    fn target_recognized_case_insensitively_and_overridable() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(dir.path(), "t.csv", "wmc,Defects\n1,0\n2,3\n");
        let d = load_csv(&p, None).unwrap();
        assert_eq!(d.schema.target_column, "Defects");

        let p = write(dir.path(), "u.csv", "wmc,faults\n1,0\n2,3\n");
        let opts = LoadOptions {
            target_column: Some("faults".into()),
            ..Default::default()
        };
        let d = load_csv_with(&p, &opts).unwrap();
        assert_eq!(d.defective_count(), 1);
    }

    #[test]
    fn fractional_defect_count_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(dir.path(), "f.csv", "wmc,bug\n1,0.5\n");
        assert!(matches!(
            load_csv(&p, None),
            Err(Error::InvalidDefectCount { row: 1, .. })
        ));
    }

    #[test]
    fn duplicate_identifiers_are_disambiguated() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(dir.path(), "d.csv", "name,wmc,bug\nA,1,0\nA,2,1\nA,3,0\n");
        let d = load_csv(&p, None).unwrap();
        assert_eq!(d.identifiers(), vec!["A", "A#2", "A#3"]);
    }

    #[test]
    fn schema_hint_selects_and_orders_features() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(dir.path(), "h.csv", "name,wmc,rfc,loc,bug\na,1,2,3,0\nb,4,5,6,1\n");
        let hint = MetricSchema::new(vec!["loc".into(), "wmc".into()], vec![], "bug").unwrap();
        let d = load_csv(&p, Some(&hint)).unwrap();
        assert_eq!(d.schema.feature_names, vec!["loc", "wmc"]);
        assert_eq!(d.instances[1].features, vec![6.0, 4.0]);
        assert_eq!(d.schema.identifier_columns, vec!["name", "rfc"]);
    }

    #[test]
    fn schema_validation() {
        assert!(MetricSchema::new(vec![], vec![], "bug").is_err());
        assert!(MetricSchema::new(vec!["a".into(), "a".into()], vec![], "bug").is_err());
        assert!(MetricSchema::new(vec!["bug".into()], vec![], "bug").is_err());
    }

    #[test]
    fn split_sizes_and_disjointness() {
        let d = synthetic(100, 4);
        let s = three_way_split(&d, DEFAULT_FRACTIONS, 42).unwrap();
        assert_eq!(s.planner_train.len(), 50);
        assert_eq!(s.oracle_train.len(), 25);
        assert_eq!(s.test.len(), 25);
        let mut all: Vec<&str> = s.parts().iter().flat_map(|p| p.identifiers()).collect();
        all.sort_unstable();
        let mut orig = d.identifiers();
        orig.sort_unstable();
        assert_eq!(all, orig);
    }

    #[test]
    fn split_rejects_empty_part_and_bad_fractions() {
        let d = synthetic(100, 4);
        assert!(matches!(
            three_way_split(&d, [0.5, 0.5, 0.0], 1),
            Err(Error::TooFewInstances(_))
        ));
        assert!(matches!(
            three_way_split(&d, [0.5, 0.4, 0.2], 1),
            Err(Error::InvalidFractions(_))
        ));
        let pure = synthetic(30, 1000);
        assert!(matches!(
            three_way_split(&pure, DEFAULT_FRACTIONS, 1),
            Err(Error::TooFewInstances(_))
        ));
    }

    #[test]
    fn split_is_deterministic() {
        let d = synthetic(100, 3);
        let a = three_way_split(&d, DEFAULT_FRACTIONS, 9).unwrap();
        let b = three_way_split(&d, DEFAULT_FRACTIONS, 9).unwrap();
        assert_eq!(a, b);
        let c = three_way_split(&d, DEFAULT_FRACTIONS, 10).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn family_loading() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "b.csv", "name,wmc,rfc,bug\na,1,2,0\nb,3,4,1\n");
        write(dir.path(), "a.csv", "name,rfc,loc,wmc,bug\na,1,2,3,0\nb,3,4,5,1\n");
        let fam = load_project_family(dir.path()).unwrap();
        assert_eq!(fam.len(), 2);
        assert_eq!(fam[0].name, "a");
        assert_eq!(fam[0].schema.feature_names, vec!["rfc", "wmc"]);
        assert_eq!(fam[1].schema.feature_names, vec!["rfc", "wmc"]);
        assert_eq!(fam[1].instances[1].features, vec![4.0, 3.0]);
    }

    #[test]
    fn family_errors() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "a.csv", "wmc,bug\n1,0\n");
        assert!(matches!(
            load_project_family(dir.path()),
            Err(Error::FewerThanTwoProjects(1))
        ));
        write(dir.path(), "b.csv", "rfc,bug\n1,0\n");
        assert!(matches!(
            load_project_family(dir.path()),
            Err(Error::IncompatibleSchemas)
        ));
    }
}
