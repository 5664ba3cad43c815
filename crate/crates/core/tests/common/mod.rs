//! Helpers and independent reference implementations shared by the
//! integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::path::PathBuf;

use folksonomy::{
    Community, ComponentSummary, InterestGraph, ItemId, ParseMode, SimilarityKind, TagAssignment, TagId, Threshold,
    UserId,
};
use rand::Rng;

pub fn fixture_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/urn_default_seed42.tsv")
}

pub fn fixture() -> Community {
    folksonomy::read_community(fixture_path(), ParseMode::Strict).expect("fixture loads")
}

/// `n` random assignments over at most the given numbers of users, items
/// and tags.
pub fn random_assignments<R: Rng>(rng: &mut R, users: u32, items: u32, tags: u32, n: usize) -> Vec<TagAssignment> {
    (0..n)
        .map(|_| {
            TagAssignment::new(
                UserId(rng.random_range(0..users)),
                TagId(rng.random_range(0..tags)),
                ItemId(rng.random_range(0..items)),
                rng.random_range(0..1000),
            )
        })
        .collect()
}

/// Per-user item and tag sets, straight from the raw assignments.
fn sets(rows: &[TagAssignment]) -> (BTreeMap<u32, BTreeSet<u32>>, BTreeMap<u32, BTreeSet<u32>>) {
    let mut items: BTreeMap<u32, BTreeSet<u32>> = BTreeMap::new();
    let mut tags: BTreeMap<u32, BTreeSet<u32>> = BTreeMap::new();
    for a in rows {
        items.entry(a.user.0).or_default().insert(a.item.0);
        tags.entry(a.user.0).or_default().insert(a.tag.0);
    }
    (items, tags)
}

/// All-pairs edge set. Undirected edges are `(low, high)`; directed edges are
/// `(src, dst)` with the ratio taken over `src`'s library.
pub fn naive_edges(rows: &[TagAssignment], kind: SimilarityKind, t: Threshold) -> BTreeSet<(u32, u32)> {
    let (items, tags) = sets(rows);
    let mut out = BTreeSet::new();
    for (&k, ik) in &items {
        for (&j, ij) in &items {
            if k == j || (!kind.is_directed() && k > j) {
                continue;
            }
            let (shared, total) = match kind {
                SimilarityKind::UserItem => {
                    let s = ik.intersection(ij).count();
                    (s, ik.union(ij).count())
                }
                SimilarityKind::UserTag => {
                    let (tk, tj) = (&tags[&k], &tags[&j]);
                    (tk.intersection(tj).count(), tk.union(tj).count())
                }
                SimilarityKind::DirectedUserItem => (ik.intersection(ij).count(), ik.len()),
            };
            // shared/total > num/den, in integers
            if total > 0 && (shared as u128) * u128::from(t.denom()) > u128::from(t.numer()) * (total as u128) {
                out.insert((k, j));
            }
        }
    }
    out
}

pub fn graph_edges(g: &InterestGraph) -> BTreeSet<(u32, u32)> {
    g.edges().iter().map(|e| (e.src.0, e.dst.0)).collect()
}

/// Component statistics by breadth-first search, ignoring edge direction.
pub fn bfs_summary(nodes: &[UserId], edges: &BTreeSet<(u32, u32)>) -> ComponentSummary {
    let mut adj: BTreeMap<u32, Vec<u32>> = nodes.iter().map(|u| (u.0, Vec::new())).collect();
    for &(a, b) in edges {
        adj.get_mut(&a).unwrap().push(b);
        adj.get_mut(&b).unwrap().push(a);
    }
    let mut seen = BTreeSet::new();
    let mut sizes = Vec::new();
    let mut isolated = 0;
    for (&start, nbrs) in &adj {
        if nbrs.is_empty() {
            isolated += 1;
            continue;
        }
        if !seen.insert(start) {
            continue;
        }
        let mut queue = VecDeque::from([start]);
        let mut size = 0;
        while let Some(v) = queue.pop_front() {
            size += 1;
            for &w in &adj[&v] {
                if seen.insert(w) {
                    queue.push_back(w);
                }
            }
        }
        sizes.push(size);
    }
    ComponentSummary {
        components_excluding_isolated: sizes.len(),
        isolated_count: isolated,
        largest_component_size: sizes.iter().copied().max().unwrap_or(0),
        nonisolated_node_count: sizes.iter().sum(),
    }
}

/// Records of a robot posting `n` items, ten per second, from `start`.
pub fn burst_records(user: &str, n: usize, start: u64) -> Vec<folksonomy::RawRecord> {
    (0..n)
        .map(|k| folksonomy::RawRecord {
            user: user.into(),
            item: format!("spam{k}"),
            tag: "ad".into(),
            timestamp: start + k as u64 / 10,
            source_line: 0,
        })
        .collect()
}

pub fn record(user: &str, item: &str, tag: &str, timestamp: u64) -> folksonomy::RawRecord {
    folksonomy::RawRecord {
        user: user.into(),
        item: item.into(),
        tag: tag.into(),
        timestamp,
        source_line: 0,
    }
}
