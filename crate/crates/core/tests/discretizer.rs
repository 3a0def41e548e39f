mod common;

use proptest::prelude::*;
use xtree::discretize::{bin_of, mdlp_bins, Interval};

fn small_problem() -> impl Strategy<Value = (Vec<f64>, Vec<bool>, usize)> {
    (1usize..=3, 2usize..=20).prop_flat_map(|(min_support, n)| {
        let n = n.max(2 * min_support);
        (
            prop::collection::vec((0i32..12).prop_map(f64::from), n),
            prop::collection::vec(any::<bool>(), n),
            Just(min_support),
        )
    })
}

#[test]
fn worked_example_matches_exhaustive_search() {
    let v = [1.0, 2.0, 3.0, 10.0, 11.0, 12.0];
    let y = [false, false, false, true, true, true];
    assert_eq!(common::exhaustive_first_cut(&v, &y, 2), Some(6.5));
    let bins = mdlp_bins(&v, &y, 2).unwrap();
    assert_eq!(bins.cuts, vec![6.5]);
    assert!((bins.gain - 1.0).abs() < 1e-12);
}

#[test]
fn bin_lookup_is_half_open() {
    let bins = mdlp_bins(
        &[1.0, 2.0, 3.0, 10.0, 11.0, 12.0],
        &[false, false, false, true, true, true],
        2,
    )
    .unwrap();
    assert_eq!(bin_of(&bins, 6.5), Interval::new(6.5, f64::INFINITY).unwrap());
    assert_eq!(bin_of(&bins, 3.0), Interval::new(f64::NEG_INFINITY, 6.5).unwrap());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn first_cut_matches_exhaustive_oracle((values, labels, min_support) in small_problem()) {
        let bins = mdlp_bins(&values, &labels, min_support).unwrap();
        prop_assert_eq!(bins.first_cut, common::exhaustive_first_cut(&values, &labels, min_support));
    }
}

proptest! {
    #[test]
    fn intervals_tile_the_line_and_respect_support(
        values in prop::collection::vec(-1e3f64..1e3, 8..120),
        seed_labels in prop::collection::vec(any::<bool>(), 120),
        min_support in 1usize..8,
    ) {
        let labels = &seed_labels[..values.len()];
        let bins = mdlp_bins(&values, labels, min_support).unwrap();
        let iv = bins.intervals();
        prop_assert_eq!(iv.len(), bins.cuts.len() + 1);
        prop_assert_eq!(iv[0].low, f64::NEG_INFINITY);
        prop_assert_eq!(iv[iv.len() - 1].high, f64::INFINITY);
        for w in iv.windows(2) {
            prop_assert_eq!(w[0].high, w[1].low);
            prop_assert!(w[0].low < w[0].high);
        }
        for i in &iv {
            let inside = values.iter().filter(|&&v| i.contains(v)).count();
            prop_assert!(inside >= min_support, "{} holds {} < {}", i, inside, min_support);
        }
        for &v in &values {
            prop_assert_eq!(iv.iter().filter(|i| i.contains(v)).count(), 1);
            prop_assert!(bin_of(&bins, v).contains(v));
        }
    }

    #[test]
    fn increasing_transform_keeps_the_partition(
        values in prop::collection::vec(0.0f64..50.0, 8..80),
        seed_labels in prop::collection::vec(any::<bool>(), 80),
        min_support in 1usize..6,
    ) {
        let labels = &seed_labels[..values.len()];
        let moved: Vec<f64> = values.iter().map(|v| 3.0 * v + v.powi(3) / 50.0 - 7.0).collect();
        let a = mdlp_bins(&values, labels, min_support).unwrap();
        let b = mdlp_bins(&moved, labels, min_support).unwrap();
        prop_assert_eq!(a.cuts.len(), b.cuts.len());
        for (v, m) in values.iter().zip(&moved) {
            prop_assert_eq!(a.bin_index(*v), b.bin_index(*m));
        }
        prop_assert!((a.gain - b.gain).abs() < 1e-12);
    }
}
