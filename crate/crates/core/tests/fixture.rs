mod common;

use folksonomy::entropy::{entropy, entropy_timeline, item_popularity, PopularityMode};
use folksonomy::ingest::write_trace;
use folksonomy::urn::generate_records;
use folksonomy::{hit_ratio, SimilarityKind, SyntheticTraceConfig, Threshold};

#[test]
fn default_generator_reproduces_frozen_fixture() {
    let mut regenerated = Vec::new();
    write_trace(
        &mut regenerated,
        &generate_records(&SyntheticTraceConfig::default()).unwrap(),
    )
    .unwrap();
    let frozen = std::fs::read(common::fixture_path()).unwrap();
    assert!(
        regenerated == frozen,
        "generator output drifted from fixtures/urn_default_seed42.tsv"
    );
}

#[test]
fn fixture_shape() {
    let s = common::fixture().summary();
    assert_eq!(
        (s.num_users, s.num_items, s.num_tags, s.num_assignments),
        (200, 300, 40, 1024)
    );
}

#[test]
fn fixture_timeline_ends_at_whole_trace_entropy() {
    let c = common::fixture();
    let points = entropy_timeline(&c, 3600, 2.0, PopularityMode::DistinctUsers).unwrap();
    let whole = entropy(&item_popularity(&c, None, PopularityMode::DistinctUsers).unwrap(), 2.0).unwrap();
    assert!((points.last().unwrap().entropy - whole).abs() < 1e-12);
    let tail = &points[points.len() / 2..];
    for w in tail.windows(2) {
        assert!(w[1].entropy >= w[0].entropy - 1e-12, "{:?} then {:?}", w[0], w[1]);
    }
}

#[test]
fn fixture_hit_ratio_falls_as_threshold_rises() {
    let c = common::fixture();
    let mut previous: Option<(usize, usize)> = None;
    for t in [0.0, 0.01, 0.05, 0.1, 0.25] {
        let r = hit_ratio(&c, SimilarityKind::UserItem, Threshold::from_f64(t).unwrap(), 3600).unwrap();
        if let Some((adds, hits)) = previous {
            assert_eq!(r.adds_total, adds);
            assert!(
                r.hits_total <= hits,
                "threshold {t}: {} hits after {hits}",
                r.hits_total
            );
        }
        previous = Some((r.adds_total, r.hits_total));
    }
}
