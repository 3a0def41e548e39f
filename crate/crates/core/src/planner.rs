//! XTREE: a supervised decision tree over code metrics, and plans read off
//! the contrast between the leaf an instance lands in and a nearby leaf with
//! a lower defect probability.
//!
//! Planning answers three questions per test instance:
//! 1. which leaf does it fall into ([`locate_leaf`]),
//! 2. which leaf should it move to ([`select_desired_leaf`]),
//! 3. which metric ranges differ between the two ([`delta_plan`]).

use std::collections::BTreeMap;
use std::fmt;

use rand::seq::index::sample;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::dataset::{Instance, MetricSchema, ProjectDataset};
use crate::discretize::{default_min_support, mdlp_bins, Interval, GAIN_TIE_EPS};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlannerParams {
    pub max_depth: usize,
    /// Minimum instances per bin; `None` means `max(4, ceil(sqrt(n)))`.
    pub min_support: Option<usize>,
    /// Splits gaining fewer bits than this are not made.
    pub min_gain: f64,
    /// Only instances whose leaf probability reaches this value get a plan.
    pub planning_threshold: f64,
}

impl Default for PlannerParams {
    fn default() -> Self {
        PlannerParams {
            max_depth: 10,
            min_support: None,
            min_gain: 1e-3,
            planning_threshold: 0.5,
        }
    }
}

impl PlannerParams {
    pub fn validate(&self) -> Result<()> {
        if self.max_depth == 0 {
            return Err(Error::InvalidParameter("max_depth must be at least 1".into()));
        }
        if self.min_support == Some(0) {
            return Err(Error::InvalidParameter("min_support must be at least 1".into()));
        }
        if !(self.min_gain >= 0.0 && self.min_gain.is_finite()) {
            return Err(Error::InvalidParameter("min_gain must be a nonnegative number".into()));
        }
        if !(0.0..=1.0).contains(&self.planning_threshold) {
            return Err(Error::InvalidParameter("planning_threshold must lie in [0, 1]".into()));
        }
        Ok(())
    }
}

/// Child-index path from the root; the root is the empty path.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodePath(pub Vec<usize>);

impl NodePath {
    pub fn root() -> Self {
        NodePath(Vec::new())
    }

    pub fn child(&self, k: usize) -> Self {
        let mut v = self.0.clone();
        v.push(k);
        NodePath(v)
    }

    /// Number of edges between two nodes through their lowest common ancestor.
    pub fn distance(&self, other: &NodePath) -> usize {
        let common = self.0.iter().zip(&other.0).take_while(|(a, b)| a == b).count();
        self.0.len() + other.0.len() - 2 * common
    }
}

impl fmt::Display for NodePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("/");
        }
        for k in &self.0 {
            write!(f, "/{k}")?;
        }
        Ok(())
    }
}

impl std::str::FromStr for NodePath {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::UnknownNode(s.to_string());
        let rest = s.strip_prefix('/').ok_or_else(bad)?;
        if rest.is_empty() {
            return Ok(NodePath::root());
        }
        rest.split('/')
            .map(|p| p.parse::<usize>().map_err(|_| bad()))
            .collect::<Result<Vec<_>>>()
            .map(NodePath)
    }
}

impl Serialize for NodePath {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for NodePath {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeNode {
    pub path: NodePath,
    /// Feature tested on the edge from the parent (`None` at the root).
    pub feature: Option<String>,
    #[serde(skip)]
    pub feature_index: Option<usize>,
    /// Edge label: the parent's instances with the feature in this range reach the node.
    pub interval: Interval,
    pub defect_probability: f64,
    pub support: usize,
    pub defective: usize,
    pub depth: usize,
    pub children: Vec<TreeNode>,
}

impl TreeNode {
    /// Leaf with `defective` of `support` training instances defective.
    pub fn leaf(support: usize, defective: usize) -> Self {
        TreeNode {
            path: NodePath::root(),
            feature: None,
            feature_index: None,
            interval: Interval::ALL,
            defect_probability: if support == 0 {
                0.0
            } else {
                defective as f64 / support as f64
            },
            support,
            defective,
            depth: 0,
            children: Vec::new(),
        }
    }

    /// Internal node whose statistics are the sum of its children's.
    pub fn branch(children: Vec<TreeNode>) -> Self {
        let support = children.iter().map(|c| c.support).sum();
        let defective = children.iter().map(|c| c.defective).sum();
        TreeNode {
            children,
            ..TreeNode::leaf(support, defective)
        }
    }

    /// Label the edge into this node.
    pub fn on(mut self, feature: impl Into<String>, interval: Interval) -> Self {
        self.feature = Some(feature.into());
        self.interval = interval;
        self
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a TreeNode>) {
        if self.is_leaf() {
            out.push(self);
        } else {
            for c in &self.children {
                c.collect_leaves(out);
            }
        }
    }
}

/// A built XTREE: the root, the schema it was trained on, and per-feature
/// training spread used when realizing half-bounded plan targets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub root: TreeNode,
    pub schema: MetricSchema,
    pub params: PlannerParams,
    pub min_support: usize,
    pub feature_spread: Vec<f64>,
}

impl DecisionTree {
    /// Assemble a tree from hand-built nodes. Paths, depths, and feature
    /// indices are assigned here; structural invariants are checked.
    pub fn from_root(
        mut root: TreeNode,
        schema: MetricSchema,
        params: PlannerParams,
        feature_spread: Vec<f64>,
    ) -> Result<Self> {
        if feature_spread.len() != schema.len() {
            return Err(Error::SchemaMismatch(
                "feature_spread length differs from schema".into(),
            ));
        }
        root.feature = None;
        root.feature_index = None;
        root.interval = Interval::ALL;
        assign(&mut root, NodePath::root(), 0, &schema)?;
        let tree = DecisionTree {
            root,
            schema,
            params,
            min_support: params.min_support.unwrap_or(1),
            feature_spread,
        };
        tree.check_invariants()?;
        Ok(tree)
    }

    pub fn leaves(&self) -> Vec<&TreeNode> {
        let mut out = Vec::new();
        self.root.collect_leaves(&mut out);
        out
    }

    pub fn node(&self, path: &NodePath) -> Option<&TreeNode> {
        let mut node = &self.root;
        for &k in &path.0 {
            node = node.children.get(k)?;
        }
        Some(node)
    }

    /// Nodes from the root down to `path`, inclusive.
    pub fn lineage(&self, path: &NodePath) -> Option<Vec<&TreeNode>> {
        let mut node = &self.root;
        let mut out = vec![node];
        for &k in &path.0 {
            node = node.children.get(k)?;
            out.push(node);
        }
        Some(out)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let mut tree: DecisionTree = serde_json::from_str(s)?;
        let schema = tree.schema.clone();
        let path = NodePath::root();
        assign(&mut tree.root, path, 0, &schema)?;
        tree.check_invariants()?;
        Ok(tree)
    }

    /// Structural checks: child intervals tile the real line, supports and
    /// defect counts are conserved, and no path re-tests a feature.
    pub fn check_invariants(&self) -> Result<()> {
        fn walk(node: &TreeNode, used: &mut Vec<usize>) -> Result<()> {
            let bad = |msg: String| Err(Error::InvalidParameter(format!("node {}: {msg}", node.path)));
            if !(0.0..=1.0).contains(&node.defect_probability) {
                return bad("probability outside [0, 1]".into());
            }
            if node.is_leaf() {
                return Ok(());
            }
            let j = node.children[0].feature_index;
            let Some(j) = j else {
                return bad("child edge without a feature".into());
            };
            if used.contains(&j) {
                return bad(format!("feature {j} tested twice on one path"));
            }
            let mut expected_low = f64::NEG_INFINITY;
            for c in &node.children {
                if c.feature_index != Some(j) {
                    return bad("children split on different features".into());
                }
                if c.interval.low != expected_low {
                    return bad("child intervals do not tile the real line".into());
                }
                expected_low = c.interval.high;
            }
            if expected_low != f64::INFINITY {
                return bad("child intervals do not reach +inf".into());
            }
            let support: usize = node.children.iter().map(|c| c.support).sum();
            let defective: usize = node.children.iter().map(|c| c.defective).sum();
            if support != node.support || defective != node.defective {
                return bad("child supports do not sum to the parent".into());
            }
            used.push(j);
            for c in &node.children {
                walk(c, used)?;
            }
            used.pop();
            Ok(())
        }
        walk(&self.root, &mut Vec::new())
    }
}

fn assign(node: &mut TreeNode, path: NodePath, depth: usize, schema: &MetricSchema) -> Result<()> {
    if let Some(f) = &node.feature {
        node.feature_index = Some(schema.index_of(f).ok_or_else(|| Error::UnknownFeature(f.clone()))?);
    }
    node.depth = depth;
    for (k, c) in node.children.iter_mut().enumerate() {
        assign(c, path.child(k), depth + 1, schema)?;
    }
    node.path = path;
    Ok(())
}

pub(crate) struct TreeBuilder<'a> {
    rows: &'a [Instance],
    schema: &'a MetricSchema,
    params: PlannerParams,
    min_support: usize,
    /// Random feature subsampling per node (forest members only).
    subsample: Option<(usize, &'a mut ChaCha8Rng)>,
}

impl<'a> TreeBuilder<'a> {
    pub(crate) fn new(rows: &'a [Instance], schema: &'a MetricSchema, params: PlannerParams) -> Self {
        let min_support = params.min_support.unwrap_or_else(|| default_min_support(rows.len()));
        TreeBuilder {
            rows,
            schema,
            params,
            min_support,
            subsample: None,
        }
    }

    pub(crate) fn with_subsampling(mut self, max_features: usize, rng: &'a mut ChaCha8Rng) -> Self {
        self.subsample = Some((max_features, rng));
        self
    }

    pub(crate) fn build(mut self) -> DecisionTree {
        let all: Vec<usize> = (0..self.rows.len()).collect();
        let mut used = vec![false; self.schema.len()];
        let root = self.grow(&all, NodePath::root(), 0, &mut used);
        let feature_spread = (0..self.schema.len())
            .map(|j| {
                let col: Vec<f64> = self.rows.iter().map(|r| r.features[j]).collect();
                crate::dataset::population_std(&col)
            })
            .collect();
        DecisionTree {
            root,
            schema: self.schema.clone(),
            params: self.params,
            min_support: self.min_support,
            feature_spread,
        }
    }

    fn candidate_features(&mut self, used: &[bool]) -> Vec<usize> {
        let free: Vec<usize> = (0..used.len()).filter(|&j| !used[j]).collect();
        match &mut self.subsample {
            Some((k, rng)) if *k < free.len() => {
                let mut picked: Vec<usize> = sample(*rng, free.len(), *k).into_iter().map(|i| free[i]).collect();
                picked.sort_unstable();
                picked
            }
            _ => free,
        }
    }

    fn grow(&mut self, idx: &[usize], path: NodePath, depth: usize, used: &mut [bool]) -> TreeNode {
        let defective = idx.iter().filter(|&&i| self.rows[i].defective).count();
        let mut node = TreeNode {
            path: path.clone(),
            depth,
            ..TreeNode::leaf(idx.len(), defective)
        };
        if defective == 0
            || defective == idx.len()
            || depth >= self.params.max_depth
            || idx.len() < 2 * self.min_support
        {
            return node;
        }

        let labels: Vec<bool> = idx.iter().map(|&i| self.rows[i].defective).collect();
        let mut best: Option<(usize, Vec<f64>, f64)> = None;
        for j in self.candidate_features(used) {
            let values: Vec<f64> = idx.iter().map(|&i| self.rows[i].features[j]).collect();
            let bins = mdlp_bins(&values, &labels, self.min_support).expect("validated rows");
            if bins.cuts.is_empty() {
                continue;
            }
            if best.as_ref().is_none_or(|b| bins.gain > b.2 + GAIN_TIE_EPS) {
                best = Some((j, bins.cuts, bins.gain));
            }
        }
        let Some((j, cuts, gain)) = best else {
            return node;
        };
        if gain < self.params.min_gain {
            return node;
        }

        let bins = crate::discretize::FeatureBins {
            cuts,
            ..crate::discretize::FeatureBins::unsplit(self.schema.feature_names[j].clone())
        };
        let mut groups: Vec<Vec<usize>> = vec![Vec::new(); bins.len()];
        for &i in idx {
            groups[bins.bin_index(self.rows[i].features[j])].push(i);
        }
        used[j] = true;
        node.children = groups
            .iter()
            .enumerate()
            .map(|(k, g)| {
                let mut child = self.grow(g, path.child(k), depth + 1, used);
                child.feature = Some(bins.feature.clone());
                child.feature_index = Some(j);
                child.interval = bins.interval(k);
                child
            })
            .collect();
        used[j] = false;
        node
    }
}

/// Grow an XTREE on `train`.
pub fn build_tree(train: &ProjectDataset, params: PlannerParams) -> Result<DecisionTree> {
    params.validate()?;
    if train.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    Ok(TreeBuilder::new(&train.instances, &train.schema, params).build())
}

fn check_instance(tree: &DecisionTree, z: &Instance) -> Result<()> {
    if z.features.len() != tree.schema.len() {
        return Err(Error::SchemaMismatch(format!(
            "instance `{}` has {} features, tree expects {}",
            z.identifier,
            z.features.len(),
            tree.schema.len()
        )));
    }
    Ok(())
}

/// The leaf reached by following the edges whose intervals contain `z`.
pub fn locate_leaf<'t>(tree: &'t DecisionTree, z: &Instance) -> Result<&'t TreeNode> {
    check_instance(tree, z)?;
    let mut node = &tree.root;
    while !node.is_leaf() {
        let j = node.children[0].feature_index.expect("split nodes carry a feature");
        let v = z.features[j];
        node = node
            .children
            .iter()
            .find(|c| c.interval.contains(v))
            .expect("child intervals cover the real line");
    }
    Ok(node)
}

/// Nearest leaf (by edge distance) with a strictly lower defect probability.
/// Ties: lowest probability, then highest support, then leftmost.
pub fn select_desired_leaf<'t>(tree: &'t DecisionTree, current: &TreeNode) -> Result<Option<&'t TreeNode>> {
    let here = tree
        .node(&current.path)
        .ok_or_else(|| Error::UnknownNode(current.path.to_string()))?;
    if !here.is_leaf() {
        return Err(Error::NotALeaf(current.path.to_string()));
    }
    let best = tree
        .leaves()
        .into_iter()
        .enumerate()
        .filter(|(_, l)| l.defect_probability < here.defect_probability)
        .min_by(|(ia, a), (ib, b)| {
            let da = a.path.distance(&here.path);
            let db = b.path.distance(&here.path);
            da.cmp(&db)
                .then(a.defect_probability.total_cmp(&b.defect_probability))
                .then(b.support.cmp(&a.support))
                .then(ia.cmp(ib))
        })
        .map(|(_, l)| l);
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Action {
    Keep,
    MoveTo {
        interval: Interval,
    },
    /// Direct value replacement (the non-numeric case of a plan). Numeric
    /// metric trees never emit it.
    Replace {
        value: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prescription {
    pub feature: String,
    pub action: Action,
    /// Step used to enter a half-bounded target range: the feature's training
    /// standard deviation.
    pub step: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Plan {
    /// Features not listed are kept as they are.
    pub prescriptions: BTreeMap<String, Prescription>,
    pub source_leaf: NodePath,
    pub target_leaf: NodePath,
    pub expected_probability_drop: f64,
}

impl Plan {
    pub fn len(&self) -> usize {
        self.prescriptions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prescriptions.is_empty()
    }
}

/// Edges on `desired`'s root path whose (feature, interval) the current
/// path does not already share become move-to prescriptions.
pub fn delta_plan(tree: &DecisionTree, current: &TreeNode, desired: &TreeNode) -> Result<Plan> {
    let unknown = |p: &NodePath| Error::UnknownNode(p.to_string());
    let cur = tree.lineage(&current.path).ok_or_else(|| unknown(&current.path))?;
    let want = tree.lineage(&desired.path).ok_or_else(|| unknown(&desired.path))?;
    let cur_edges: BTreeMap<usize, Interval> = cur
        .iter()
        .filter_map(|n| n.feature_index.map(|j| (j, n.interval)))
        .collect();

    let mut prescriptions = BTreeMap::new();
    for n in want.iter().skip(1) {
        let (Some(j), Some(name)) = (n.feature_index, n.feature.as_ref()) else {
            continue;
        };
        if cur_edges.get(&j) == Some(&n.interval) {
            continue;
        }
        prescriptions.insert(
            name.clone(),
            Prescription {
                feature: name.clone(),
                action: Action::MoveTo { interval: n.interval },
                step: tree.feature_spread[j],
            },
        );
    }
    let source = *cur.last().unwrap();
    let target = *want.last().unwrap();
    Ok(Plan {
        prescriptions,
        source_leaf: source.path.clone(),
        target_leaf: target.path.clone(),
        expected_probability_drop: source.defect_probability - target.defect_probability,
    })
}

fn next_down(x: f64) -> f64 {
    if x.is_nan() || x == f64::NEG_INFINITY {
        return x;
    }
    if x == 0.0 {
        return -f64::from_bits(1);
    }
    let bits = x.to_bits();
    if x > 0.0 {
        f64::from_bits(bits - 1)
    } else {
        f64::from_bits(bits + 1)
    }
}

/// Concrete value inside `interval`: the midpoint when bounded, otherwise one
/// `step` in from the finite end.
pub fn realize(interval: Interval, step: f64, current: f64) -> f64 {
    let step = if step.is_finite() && step > 0.0 { step } else { 0.0 };
    match (interval.low.is_finite(), interval.high.is_finite()) {
        (true, true) => {
            let mid = interval.low + (interval.high - interval.low) / 2.0;
            if interval.contains(mid) {
                mid
            } else {
                interval.low
            }
        }
        (false, true) => {
            let v = interval.high - step;
            if v < interval.high {
                v
            } else {
                next_down(interval.high)
            }
        }
        (true, false) => interval.low + step,
        (false, false) => current,
    }
}

/// Copy of `z` with every prescription applied.
pub fn apply_plan(schema: &MetricSchema, z: &Instance, plan: &Plan) -> Result<Instance> {
    let mut out = z.clone();
    for p in plan.prescriptions.values() {
        let j = schema
            .index_of(&p.feature)
            .ok_or_else(|| Error::UnknownFeature(p.feature.clone()))?;
        if j >= out.features.len() {
            return Err(Error::UnknownFeature(p.feature.clone()));
        }
        match p.action {
            Action::Keep => {}
            Action::MoveTo { interval } => out.features[j] = realize(interval, p.step, z.features[j]),
            Action::Replace { value } => out.features[j] = value,
        }
    }
    Ok(out)
}

/// Locate, pick a better neighbour, and diff. `None` when the instance's leaf
/// is below the planning threshold or no better leaf exists.
pub fn plan_for(tree: &DecisionTree, z: &Instance) -> Result<Option<Plan>> {
    let current = locate_leaf(tree, z)?;
    if current.defect_probability < tree.params.planning_threshold {
        return Ok(None);
    }
    match select_desired_leaf(tree, current)? {
        Some(desired) => delta_plan(tree, current, desired).map(Some),
        None => Ok(None),
    }
}

/// Anything that proposes plans for test instances.
pub trait Planner: Sync {
    fn schema(&self) -> &MetricSchema;
    fn plan(&self, z: &Instance) -> Result<Option<Plan>>;
}

impl Planner for DecisionTree {
    fn schema(&self) -> &MetricSchema {
        &self.schema
    }

    fn plan(&self, z: &Instance) -> Result<Option<Plan>> {
        plan_for(self, z)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrescriptionRecord {
    pub feature: String,
    pub low: Option<f64>,
    pub high: Option<f64>,
}

/// Wire format of one plan: one JSON object per planned test instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanRecord {
    pub identifier: String,
    pub source_leaf: NodePath,
    pub target_leaf: NodePath,
    pub expected_probability_drop: f64,
    pub prescriptions: Vec<PrescriptionRecord>,
}

impl PlanRecord {
    pub fn new(identifier: impl Into<String>, plan: &Plan) -> Self {
        let finite = |v: f64| v.is_finite().then_some(v);
        PlanRecord {
            identifier: identifier.into(),
            source_leaf: plan.source_leaf.clone(),
            target_leaf: plan.target_leaf.clone(),
            expected_probability_drop: plan.expected_probability_drop,
            prescriptions: plan
                .prescriptions
                .values()
                .filter_map(|p| match p.action {
                    Action::MoveTo { interval } => Some(PrescriptionRecord {
                        feature: p.feature.clone(),
                        low: finite(interval.low),
                        high: finite(interval.high),
                    }),
                    Action::Replace { value } => Some(PrescriptionRecord {
                        feature: p.feature.clone(),
                        low: Some(value),
                        high: Some(value),
                    }),
                    Action::Keep => None,
                })
                .collect(),
        }
    }
}

/// Plans for every instance of `data` that gets one.
pub fn plan_dataset(planner: &dyn Planner, data: &ProjectDataset) -> Result<Vec<PlanRecord>> {
    let mut out = Vec::new();
    for z in &data.instances {
        if let Some(plan) = planner.plan(z)? {
            out.push(PlanRecord::new(z.identifier.clone(), &plan));
        }
    }
    Ok(out)
}
