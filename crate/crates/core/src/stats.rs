//! Treatment ranking and the textual results table.
//!
//! Treatments are sorted by median improvement and walked pairwise: two
//! neighbours share a rank unless a two-sided Mann–Whitney U test rejects at
//! `alpha` *and* Cliff's delta is at least `effect_threshold`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

pub const DEFAULT_ALPHA: f64 = 0.05;
/// Cliff's delta below this magnitude is "negligible".
pub const DEFAULT_EFFECT_THRESHOLD: f64 = 0.147;

/// Nearest-rank percentile of sorted data: the value at 1-based rank
/// `ceil(pct * n / 100)` (at least 1).
pub fn nearest_rank(sorted: &[f64], pct: usize) -> f64 {
    let n = sorted.len();
    let rank = (pct * n).div_ceil(100).max(1);
    sorted[rank.min(n) - 1]
}

fn sorted_copy(samples: &[f64]) -> Vec<f64> {
    let mut v = samples.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// Median and interquartile range by nearest rank.
pub fn summarize(samples: &[f64]) -> Result<(f64, f64)> {
    if samples.is_empty() {
        return Err(Error::EmptyInput);
    }
    let s = sorted_copy(samples);
    Ok((nearest_rank(&s, 50), nearest_rank(&s, 75) - nearest_rank(&s, 25)))
}

/// Cliff's delta: `(#(a > b) - #(a < b)) / (|a| |b|)`.
pub fn cliffs_delta(a: &[f64], b: &[f64]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let mut more = 0i64;
    let mut less = 0i64;
    for x in a {
        for y in b {
            if x > y {
                more += 1;
            } else if x < y {
                less += 1;
            }
        }
    }
    (more - less) as f64 / (a.len() * b.len()) as f64
}

/// Two-sided Mann–Whitney U test p-value (normal approximation with tie and
/// continuity corrections).
pub fn mann_whitney_p(a: &[f64], b: &[f64]) -> f64 {
    let (n1, n2) = (a.len(), b.len());
    if n1 == 0 || n2 == 0 {
        return 1.0;
    }
    let mut pooled: Vec<(f64, bool)> = a
        .iter()
        .map(|&v| (v, true))
        .chain(b.iter().map(|&v| (v, false)))
        .collect();
    pooled.sort_by(|x, y| x.0.total_cmp(&y.0));
    let n = pooled.len();
    let mut rank_sum_a = 0.0;
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && pooled[j + 1].0 == pooled[i].0 {
            j += 1;
        }
        let t = (j - i + 1) as f64;
        let avg_rank = (i + j) as f64 / 2.0 + 1.0;
        rank_sum_a += avg_rank * pooled[i..=j].iter().filter(|p| p.1).count() as f64;
        tie_term += t * t * t - t;
        i = j + 1;
    }
    let (n1f, n2f, nf) = (n1 as f64, n2 as f64, n as f64);
    let u = rank_sum_a - n1f * (n1f + 1.0) / 2.0;
    let mean = n1f * n2f / 2.0;
    let var = n1f * n2f / 12.0 * ((nf + 1.0) - tie_term / (nf * (nf - 1.0)));
    if var <= 0.0 {
        return 1.0;
    }
    let z = ((u - mean).abs() - 0.5).max(0.0) / var.sqrt();
    let normal = Normal::standard();
    (2.0 * (1.0 - normal.cdf(z))).min(1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreatmentSummary {
    pub treatment: String,
    pub median: f64,
    pub iqr: f64,
    pub rank: usize,
    /// 10th, 30th, 50th, 70th and 90th nearest-rank percentiles.
    pub percentiles: [f64; 5],
    pub samples: usize,
}

/// Rank treatments (1 = best). Input order does not matter.
pub fn rank_treatments(
    groups: &[(String, Vec<f64>)],
    alpha: f64,
    effect_threshold: f64,
) -> Result<Vec<TreatmentSummary>> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!("alpha {alpha} outside (0, 1)")));
    }
    if !(0.0..=1.0).contains(&effect_threshold) {
        return Err(Error::InvalidParameter(format!(
            "effect threshold {effect_threshold} outside [0, 1]"
        )));
    }
    let mut rows: Vec<(&String, Vec<f64>, f64)> = groups
        .iter()
        .map(|(name, samples)| {
            if samples.is_empty() {
                return Err(Error::EmptyGroup(name.clone()));
            }
            let s = sorted_copy(samples);
            let med = nearest_rank(&s, 50);
            Ok((name, s, med))
        })
        .collect::<Result<_>>()?;
    rows.sort_by(|a, b| b.2.total_cmp(&a.2).then_with(|| a.0.cmp(b.0)));

    let mut out: Vec<TreatmentSummary> = Vec::with_capacity(rows.len());
    for (k, (name, s, med)) in rows.iter().enumerate() {
        let rank = if k == 0 {
            1
        } else {
            let prev = &rows[k - 1].1;
            let distinct = mann_whitney_p(prev, s) < alpha && cliffs_delta(prev, s).abs() >= effect_threshold;
            out[k - 1].rank + usize::from(distinct)
        };
        out.push(TreatmentSummary {
            treatment: (*name).clone(),
            median: *med,
            iqr: nearest_rank(s, 75) - nearest_rank(s, 25),
            rank,
            percentiles: [10, 30, 50, 70, 90].map(|p| nearest_rank(s, p)),
            samples: s.len(),
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectSummary {
    pub project: String,
    pub treatments: Vec<TreatmentSummary>,
}

const BAR_WIDTH: usize = 41;
const AXIS_LOW: f64 = -100.0;
const AXIS_HIGH: f64 = 100.0;

fn column(v: f64) -> usize {
    let t = ((v - AXIS_LOW) / (AXIS_HIGH - AXIS_LOW)).clamp(0.0, 1.0);
    (t * (BAR_WIDTH - 1) as f64).round() as usize
}

/// Fixed-width quartile bar on a -100..100 axis: whiskers span the 10th–30th
/// and 70th–90th percentiles, `*` marks the median, `|` marks zero.
pub fn quartile_bar(p: &[f64; 5]) -> String {
    let mut cells = vec![' '; BAR_WIDTH];
    for (lo, hi) in [(p[0], p[1]), (p[3], p[4])] {
        for c in cells.iter_mut().take(column(hi) + 1).skip(column(lo)) {
            *c = '-';
        }
    }
    let zero = column(0.0);
    if cells[zero] == ' ' {
        cells[zero] = '|';
    }
    cells[column(p[2])] = '*';
    cells.into_iter().collect()
}

fn axis_label() -> String {
    let mut cells = vec![' '; BAR_WIDTH];
    for (text, start) in [("-100", 0), ("0", column(0.0)), ("100", BAR_WIDTH - 3)] {
        for (k, ch) in text.chars().enumerate() {
            cells[start + k] = ch;
        }
    }
    cells.into_iter().collect()
}

pub fn render_report(projects: &[ProjectSummary]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:>4}  {:<10} {:>8} {:>8}  {}",
        "rank",
        "treatment",
        "median",
        "iqr",
        axis_label()
    );
    for p in projects {
        let _ = writeln!(out, "{}", p.project);
        for t in &p.treatments {
            let _ = writeln!(
                out,
                "{:>4}  {:<10} {:>8.1} {:>8.1}  {}",
                t.rank,
                t.treatment,
                t.median,
                t.iqr,
                quartile_bar(&t.percentiles)
            );
        }
    }
    out
}

pub fn summaries_csv(projects: &[ProjectSummary]) -> String {
    let mut out = String::from("project,rank,treatment,median,iqr\n");
    for p in projects {
        for t in &p.treatments {
            let _ = writeln!(out, "{},{},{},{},{}", p.project, t.rank, t.treatment, t.median, t.iqr);
        }
    }
    out
}
