//! Supervised discretization of a numeric feature against the binary defect
//! label (entropy splits with the minimum-description-length stopping rule of
//! Fayyad and Irani).
//!
//! Bins are half-open `[low, high)` intervals that together cover the real
//! line, so every value falls in exactly one bin.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Gains closer than this are treated as ties (lowest cut wins).
pub const GAIN_TIE_EPS: f64 = 1e-12;

/// Half-open interval `[low, high)`; `low` may be `-inf` and `high` may be `+inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub low: f64,
    pub high: f64,
}

impl Interval {
    pub const ALL: Interval = Interval {
        low: f64::NEG_INFINITY,
        high: f64::INFINITY,
    };

    pub fn new(low: f64, high: f64) -> Result<Self> {
        if low.is_nan() || high.is_nan() || low >= high || low == f64::INFINITY || high == f64::NEG_INFINITY {
            return Err(Error::InvalidParameter(format!("empty interval [{low}, {high})")));
        }
        Ok(Interval { low, high })
    }

    pub fn contains(&self, value: f64) -> bool {
        self.low <= value && value < self.high
    }

    pub fn is_bounded(&self) -> bool {
        self.low.is_finite() && self.high.is_finite()
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.low.is_finite(), self.high.is_finite()) {
            (true, true) => write!(f, "[{}, {})", self.low, self.high),
            (true, false) => write!(f, "[{}, inf)", self.low),
            (false, true) => write!(f, "(-inf, {})", self.high),
            (false, false) => write!(f, "(-inf, inf)"),
        }
    }
}

fn finite_or_none(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

#[derive(Serialize, Deserialize)]
struct IntervalRepr {
    low: Option<f64>,
    high: Option<f64>,
}

// Unbounded endpoints travel as JSON nulls.
impl Serialize for Interval {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        IntervalRepr {
            low: finite_or_none(self.low),
            high: finite_or_none(self.high),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Interval {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = IntervalRepr::deserialize(d)?;
        Interval::new(r.low.unwrap_or(f64::NEG_INFINITY), r.high.unwrap_or(f64::INFINITY))
            .map_err(serde::de::Error::custom)
    }
}

/// Cut points for one feature and the entropy reduction they achieve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureBins {
    pub feature: String,
    pub cuts: Vec<f64>,
    /// Entropy reduction in bits: `H(S) - sum |B|/|S| H(B)` over the bins.
    pub gain: f64,
    /// The cut accepted at the top level of the recursion, if any.
    pub first_cut: Option<f64>,
}

impl FeatureBins {
    pub fn unsplit(feature: impl Into<String>) -> Self {
        FeatureBins {
            feature: feature.into(),
            cuts: Vec::new(),
            gain: 0.0,
            first_cut: None,
        }
    }

    pub fn with_feature(mut self, feature: impl Into<String>) -> Self {
        self.feature = feature.into();
        self
    }

    pub fn len(&self) -> usize {
        self.cuts.len() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn interval(&self, k: usize) -> Interval {
        let low = if k == 0 { f64::NEG_INFINITY } else { self.cuts[k - 1] };
        let high = self.cuts.get(k).copied().unwrap_or(f64::INFINITY);
        Interval { low, high }
    }

    pub fn intervals(&self) -> Vec<Interval> {
        (0..self.len()).map(|k| self.interval(k)).collect()
    }

    /// Index of the bin holding `value` under half-open semantics.
    pub fn bin_index(&self, value: f64) -> usize {
        self.cuts.partition_point(|&c| c <= value)
    }
}

pub fn bin_of(bins: &FeatureBins, value: f64) -> Interval {
    bins.interval(bins.bin_index(value))
}

/// Binary entropy in bits of a set with `pos` positives out of `n`.
pub(crate) fn entropy_counts(pos: usize, n: usize) -> f64 {
    if n == 0 || pos == 0 || pos == n {
        return 0.0;
    }
    let p = pos as f64 / n as f64;
    let q = 1.0 - p;
    -(p * p.log2() + q * q.log2())
}

pub fn shannon_entropy(labels: &[bool]) -> Result<f64> {
    if labels.is_empty() {
        return Err(Error::EmptyInput);
    }
    let pos = labels.iter().filter(|&&l| l).count();
    Ok(entropy_counts(pos, labels.len()))
}

/// Default per-bin support floor for a training set of `n` instances.
pub fn default_min_support(n: usize) -> usize {
    ((n as f64).sqrt().ceil() as usize).max(4)
}

struct Sorted {
    values: Vec<f64>,
    /// prefix[i] = positives among the first i sorted instances.
    prefix: Vec<usize>,
}

impl Sorted {
    fn new(values: &[f64], labels: &[bool]) -> Self {
        let mut order: Vec<usize> = (0..values.len()).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let mut prefix = Vec::with_capacity(values.len() + 1);
        prefix.push(0);
        for &i in &order {
            prefix.push(prefix.last().unwrap() + usize::from(labels[i]));
        }
        Sorted {
            values: order.iter().map(|&i| values[i]).collect(),
            prefix,
        }
    }

    fn pos(&self, lo: usize, hi: usize) -> usize {
        self.prefix[hi] - self.prefix[lo]
    }
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    split: usize,
    cut: f64,
    gain: f64,
}

fn midpoint(a: f64, b: f64) -> f64 {
    let m = a + (b - a) / 2.0;
    // Adjacent floats can round the midpoint back onto `a`.
    if m > a {
        m
    } else {
        b
    }
}

/// Information-gain-maximizing cut over `[lo, hi)` with at least `min_support`
/// instances per side. Scans ascending, so ties keep the lowest cut.
fn best_cut(s: &Sorted, lo: usize, hi: usize, min_support: usize) -> Option<Candidate> {
    let n = hi - lo;
    let pos = s.pos(lo, hi);
    let h = entropy_counts(pos, n);
    let mut best: Option<Candidate> = None;
    if n < 2 * min_support {
        return None;
    }
    for k in (lo + min_support)..=(hi - min_support) {
        if s.values[k - 1] >= s.values[k] {
            continue;
        }
        let (n1, n2) = (k - lo, hi - k);
        let (p1, p2) = (s.pos(lo, k), s.pos(k, hi));
        let gain =
            h - (n1 as f64 / n as f64) * entropy_counts(p1, n1) - (n2 as f64 / n as f64) * entropy_counts(p2, n2);
        if best.is_none_or(|b| gain > b.gain + GAIN_TIE_EPS) {
            best = Some(Candidate {
                split: k,
                cut: midpoint(s.values[k - 1], s.values[k]),
                gain,
            });
        }
    }
    best
}

fn classes(pos: usize, n: usize) -> f64 {
    match (pos, n - pos) {
        (0, _) | (_, 0) => 1.0,
        _ => 2.0,
    }
}

/// Fayyad–Irani acceptance test for splitting `[lo, hi)` at `c.split`.
fn mdl_accepts(s: &Sorted, lo: usize, hi: usize, c: &Candidate) -> bool {
    let n = hi - lo;
    let (n1, n2) = (c.split - lo, hi - c.split);
    let (pos, p1, p2) = (s.pos(lo, hi), s.pos(lo, c.split), s.pos(c.split, hi));
    let (k, k1, k2) = (classes(pos, n), classes(p1, n1), classes(p2, n2));
    let delta = (3f64.powf(k) - 2.0).log2()
        - (k * entropy_counts(pos, n) - k1 * entropy_counts(p1, n1) - k2 * entropy_counts(p2, n2));
    let nf = n as f64;
    c.gain > ((nf - 1.0).log2() + delta) / nf
}

fn split_recursive(s: &Sorted, lo: usize, hi: usize, min_support: usize, cuts: &mut Vec<f64>, first: &mut Option<f64>) {
    let pos = s.pos(lo, hi);
    if pos == 0 || pos == hi - lo {
        return;
    }
    let Some(c) = best_cut(s, lo, hi, min_support) else {
        return;
    };
    if !mdl_accepts(s, lo, hi, &c) {
        return;
    }
    if first.is_none() {
        *first = Some(c.cut);
    }
    split_recursive(s, lo, c.split, min_support, cuts, first);
    cuts.push(c.cut);
    split_recursive(s, c.split, hi, min_support, cuts, first);
}

/// Supervised MDLP discretization of one feature.
///
/// Returns zero cuts (gain 0) for pure labels, constant features, or inputs
/// too small to give two bins of `min_support` instances each.
pub fn mdlp_bins(values: &[f64], labels: &[bool], min_support: usize) -> Result<FeatureBins> {
    if values.len() != labels.len() {
        return Err(Error::InputMismatch {
            values: values.len(),
            labels: labels.len(),
        });
    }
    if let Some(v) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter(format!("non-finite feature value {v}")));
    }
    let min_support = min_support.max(1);
    let n = values.len();
    if n == 0 {
        return Ok(FeatureBins::unsplit(""));
    }
    let s = Sorted::new(values, labels);
    let mut cuts = Vec::new();
    let mut first = None;
    split_recursive(&s, 0, n, min_support, &mut cuts, &mut first);

    let mut remaining = entropy_counts(s.pos(0, n), n);
    let mut lo = 0;
    for k in 0..=cuts.len() {
        let hi = match cuts.get(k) {
            Some(&c) => s.values.partition_point(|&v| v < c),
            None => n,
        };
        remaining -= ((hi - lo) as f64 / n as f64) * entropy_counts(s.pos(lo, hi), hi - lo);
        lo = hi;
    }
    Ok(FeatureBins {
        feature: String::new(),
        cuts,
        gain: remaining.max(0.0),
        first_cut: first,
    })
}
