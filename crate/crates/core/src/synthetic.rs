//! Synthetic CK-style project generator.
//!
//! Metrics are log-normal and correlated through a shared latent "size".
//! A module is defective when a weighted sum of its standardized log-metrics
//! (plus Gaussian noise) lands in the top `defect_rate` fraction. Changing the
//! weights shifts the concept; `label_noise` flips labels at random.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::dataset::{Instance, MetricSchema, ProjectDataset};
use crate::error::{Error, Result};
use crate::seeding::{derive_seed, rng_from_seed};

pub const FEATURES: [&str; 5] = ["wmc", "cbo", "rfc", "lcom", "loc"];

const LOG_BASE: [f64; 5] = [2.0, 1.8, 3.2, 2.5, 5.0];
const SIZE_LOADING: [f64; 5] = [0.25, 0.15, 0.25, 0.15, 0.3];
const OWN_SPREAD: f64 = 0.8;

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSpec {
    pub instances: usize,
    pub defect_rate: f64,
    pub weights: [f64; 5],
    /// Standard deviation of the noise added to the risk score.
    pub risk_noise: f64,
    /// Probability of flipping each label after thresholding.
    pub label_noise: f64,
    /// Added to each metric's log-mean.
    pub covariate_shift: [f64; 5],
}

impl Default for GeneratorSpec {
    fn default() -> Self {
        GeneratorSpec {
            instances: 200,
            defect_rate: 0.3,
            weights: [1.0, 0.6, 1.0, 0.2, 1.2],
            risk_noise: 0.3,
            label_noise: 0.0,
            covariate_shift: [0.0; 5],
        }
    }
}

impl GeneratorSpec {
    fn validate(&self) -> Result<()> {
        if self.instances < 4 {
            return Err(Error::InvalidParameter("need at least 4 instances".into()));
        }
        if !(self.defect_rate > 0.0 && self.defect_rate < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "defect rate {} outside (0, 1)",
                self.defect_rate
            )));
        }
        if !(0.0..0.5).contains(&self.label_noise) {
            return Err(Error::InvalidParameter(format!(
                "label noise {} outside [0, 0.5)",
                self.label_noise
            )));
        }
        if self.risk_noise.is_nan() || self.risk_noise < 0.0 {
            return Err(Error::InvalidParameter("risk noise must be non-negative".into()));
        }
        Ok(())
    }
}

pub fn ck_schema() -> MetricSchema {
    MetricSchema::new(
        FEATURES.iter().map(|s| s.to_string()).collect(),
        vec!["name".into()],
        "bug",
    )
    .expect("static schema is valid")
}

fn standard(rng: &mut ChaCha8Rng) -> f64 {
    Normal::new(0.0, 1.0).expect("unit normal").sample(rng)
}

pub fn generate_project(name: &str, spec: &GeneratorSpec, seed: u64) -> Result<ProjectDataset> {
    spec.validate()?;
    let mut rng = rng_from_seed(seed);
    let mut features = Vec::with_capacity(spec.instances);
    let mut risk = Vec::with_capacity(spec.instances);
    for _ in 0..spec.instances {
        let size = standard(&mut rng);
        let mut row = [0.0; 5];
        let mut r = 0.0;
        for k in 0..5 {
            let z = SIZE_LOADING[k] * size + OWN_SPREAD * standard(&mut rng);
            row[k] = (LOG_BASE[k] + spec.covariate_shift[k] + z).exp().round();
            r += spec.weights[k] * z;
        }
        features.push(row);
        risk.push(r + spec.risk_noise * standard(&mut rng));
    }

    let mut order: Vec<usize> = (0..spec.instances).collect();
    order.sort_by(|&a, &b| risk[b].total_cmp(&risk[a]));
    let n_def = ((spec.defect_rate * spec.instances as f64).round() as usize).clamp(1, spec.instances - 1);
    let mut defective = vec![false; spec.instances];
    for &i in &order[..n_def] {
        defective[i] = true;
    }
    for d in defective.iter_mut() {
        if rng.random::<f64>() < spec.label_noise {
            *d = !*d;
        }
    }

    let instances = features
        .into_iter()
        .zip(defective)
        .enumerate()
        .map(|(i, (row, d))| {
            let count = if d { 1 + rng.random_range(0..3u64) } else { 0 };
            let id = format!("{name}.C{i:04}");
            let mut inst = Instance::new(id.clone(), row.to_vec(), count);
            inst.id_fields = vec![id];
            inst
        })
        .collect();
    ProjectDataset::new(name, ck_schema(), instances)
}

/// A family where every non-planted project's defects are driven mostly by
/// one metric of its own, while the planted project's defects depend on all
/// of those metrics equally. The planted concept is the closest to every
/// other one. All projects share the label noise.
#[derive(Debug, Clone)]
pub struct PlantedFamily {
    pub projects: Vec<ProjectDataset>,
    pub planted: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlantOptions {
    pub projects: usize,
    pub instances: usize,
    /// Extra weight a non-planted project puts on its own metric.
    pub shift: f64,
    pub label_noise: f64,
}

impl Default for PlantOptions {
    fn default() -> Self {
        PlantOptions {
            projects: 5,
            instances: 400,
            shift: 4.0,
            label_noise: 0.05,
        }
    }
}

pub fn planted_family(opts: &PlantOptions, seed: u64) -> Result<PlantedFamily> {
    if opts.projects < 2 {
        return Err(Error::FewerThanTwoProjects(opts.projects));
    }
    let mut rng = rng_from_seed(derive_seed(seed, "planted-family", 0));
    let planted_slot = rng.random_range(0..opts.projects);
    let mut axes: Vec<usize> = (0..FEATURES.len()).collect();
    axes.shuffle(&mut rng);
    let shifted_axes: Vec<usize> = (0..opts.projects - 1).map(|i| axes[i % axes.len()]).collect();

    // the planted concept weighs every metric some shifted project leans on
    let mut weights = [0.0; 5];
    for &axis in &shifted_axes {
        weights[axis] = 1.0;
    }
    let central = GeneratorSpec {
        instances: opts.instances,
        label_noise: opts.label_noise,
        weights,
        ..GeneratorSpec::default()
    };

    let mut projects = Vec::with_capacity(opts.projects);
    let mut planted = String::new();
    let mut shifted = shifted_axes.iter();
    for slot in 0..opts.projects {
        let name = format!("proj{}", (b'a' + (slot % 26) as u8) as char);
        let mut spec = central.clone();
        if slot == planted_slot {
            planted = name.clone();
        } else if let Some(&axis) = shifted.next() {
            spec.weights[axis] += opts.shift;
        }
        projects.push(generate_project(
            &name,
            &spec,
            derive_seed(seed, "planted-project", slot as u64),
        )?);
    }
    Ok(PlantedFamily { projects, planted })
}
