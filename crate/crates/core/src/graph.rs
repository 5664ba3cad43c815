//! Interest-sharing graphs over users.
//!
//! Three similarity kinds are supported: Jaccard over libraries, Jaccard over
//! vocabularies, and directed containment `|I_k ∩ I_j| / |I_k|`. An edge exists
//! where the ratio strictly exceeds the threshold.
//!
//! Candidate pairs come from the item→users (or tag→users) inverted index, so
//! pairs that share nothing are never visited.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Community, Labels, UserId};
use crate::threshold::Threshold;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimilarityKind {
    UserItem,
    UserTag,
    DirectedUserItem,
}

impl SimilarityKind {
    pub const ALL: [SimilarityKind; 3] = [
        SimilarityKind::UserItem,
        SimilarityKind::UserTag,
        SimilarityKind::DirectedUserItem,
    ];

    pub fn is_directed(self) -> bool {
        self == SimilarityKind::DirectedUserItem
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SimilarityKind::UserItem => "user_item",
            SimilarityKind::UserTag => "user_tag",
            SimilarityKind::DirectedUserItem => "directed_user_item",
        }
    }
}

impl fmt::Display for SimilarityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SimilarityKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "user_item" | "user-item" => Ok(SimilarityKind::UserItem),
            "user_tag" | "user-tag" => Ok(SimilarityKind::UserTag),
            "directed_user_item" | "directed-user-item" => Ok(SimilarityKind::DirectedUserItem),
            other => Err(Error::InvalidConfig(format!("unknown similarity kind {other:?}"))),
        }
    }
}

/// Sorted-slice intersection size.
fn intersection_len<T: Ord>(a: &[T], b: &[T]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

/// The similarity ratio as `(numerator, denominator)`, from `k`'s side for the
/// directed kind.
pub fn similarity_ratio(c: &Community, k: UserId, j: UserId, kind: SimilarityKind) -> Result<(u64, u64)> {
    for u in [k, j] {
        if !c.contains_user(u) {
            return Err(Error::UnknownUser(u));
        }
    }
    if k == j {
        return Err(Error::SameUser(k));
    }
    let ratio = match kind {
        SimilarityKind::UserItem => {
            let (a, b) = (c.user_items(k), c.user_items(j));
            let shared = intersection_len(a, b);
            (shared, a.len() + b.len() - shared)
        }
        SimilarityKind::UserTag => {
            let (a, b) = (c.user_tags(k), c.user_tags(j));
            let shared = intersection_len(a, b);
            (shared, a.len() + b.len() - shared)
        }
        SimilarityKind::DirectedUserItem => {
            let (a, b) = (c.user_items(k), c.user_items(j));
            (intersection_len(a, b), a.len())
        }
    };
    Ok((ratio.0 as u64, ratio.1 as u64))
}

pub fn similarity(c: &Community, k: UserId, j: UserId, kind: SimilarityKind) -> Result<f64> {
    let (num, den) = similarity_ratio(c, k, j, kind)?;
    Ok(num as f64 / den as f64)
}

/// A candidate pair with a non-zero overlap. For undirected kinds `src < dst`
/// and the pair appears once; for the directed kind both orientations appear
/// and the ratio is taken from `src`'s side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Overlap {
    pub src: UserId,
    pub dst: UserId,
    pub shared: u32,
    pub total: u32,
}

impl Overlap {
    pub fn similarity(&self) -> f64 {
        f64::from(self.shared) / f64::from(self.total)
    }

    pub fn exceeds(&self, t: Threshold) -> bool {
        t.exceeded_by(u64::from(self.shared), u64::from(self.total))
    }

    /// Exact descending-similarity order, then `(src, dst)`.
    fn cmp_desc(&self, other: &Self) -> std::cmp::Ordering {
        let lhs = u64::from(other.shared) * u64::from(self.total);
        let rhs = u64::from(self.shared) * u64::from(other.total);
        lhs.cmp(&rhs).then((self.src, self.dst).cmp(&(other.src, other.dst)))
    }
}

/// Every pair of users with at least one shared item (or tag), found through
/// the inverted index. Output order is deterministic: by `src`, then `dst`.
pub fn overlaps(c: &Community, kind: SimilarityKind) -> Vec<Overlap> {
    let directed = kind.is_directed();
    let cap = c.user_capacity();
    c.users()
        .par_iter()
        .map_init(
            || (vec![0u32; cap], Vec::<UserId>::new()),
            |(counter, touched), &k| {
                let mut visit = |others: &[UserId]| {
                    for &j in others {
                        if j == k || (!directed && j < k) {
                            continue;
                        }
                        if counter[j.index()] == 0 {
                            touched.push(j);
                        }
                        counter[j.index()] += 1;
                    }
                };
                match kind {
                    SimilarityKind::UserTag => c.user_tags(k).iter().for_each(|&t| visit(c.tag_users(t))),
                    _ => c.user_items(k).iter().for_each(|&i| visit(c.item_users(i))),
                }
                touched.sort_unstable();
                let own = match kind {
                    SimilarityKind::UserTag => c.user_tags(k).len(),
                    _ => c.user_items(k).len(),
                } as u32;
                let row: Vec<Overlap> = touched
                    .iter()
                    .map(|&j| {
                        let shared = counter[j.index()];
                        let total = match kind {
                            SimilarityKind::UserItem => own + c.user_items(j).len() as u32 - shared,
                            SimilarityKind::UserTag => own + c.user_tags(j).len() as u32 - shared,
                            SimilarityKind::DirectedUserItem => own,
                        };
                        counter[j.index()] = 0;
                        Overlap {
                            src: k,
                            dst: j,
                            shared,
                            total,
                        }
                    })
                    .collect();
                touched.clear();
                row
            },
        )
        .flatten_iter()
        .collect()
}

/// A thresholded user graph. Every user of the source community is a node,
/// isolated or not.
#[derive(Debug, Clone, PartialEq)]
pub struct InterestGraph {
    kind: SimilarityKind,
    threshold: Threshold,
    nodes: Vec<UserId>,
    edges: Vec<Overlap>,
    out: Vec<Vec<UserId>>,
}

impl InterestGraph {
    /// Assembles a graph from pre-filtered edges (sorted by `(src, dst)`).
    fn from_edges(
        kind: SimilarityKind,
        threshold: Threshold,
        nodes: Vec<UserId>,
        capacity: usize,
        edges: Vec<Overlap>,
    ) -> Self {
        let mut out = vec![Vec::new(); capacity];
        for e in &edges {
            out[e.src.index()].push(e.dst);
            if !kind.is_directed() {
                out[e.dst.index()].push(e.src);
            }
        }
        for list in &mut out {
            list.sort_unstable();
        }
        Self {
            kind,
            threshold,
            nodes,
            edges,
            out,
        }
    }

    pub fn kind(&self) -> SimilarityKind {
        self.kind
    }

    pub fn threshold(&self) -> Threshold {
        self.threshold
    }

    pub fn is_directed(&self) -> bool {
        self.kind.is_directed()
    }

    pub fn nodes(&self) -> &[UserId] {
        &self.nodes
    }

    /// One past the largest node ordinal.
    pub fn capacity(&self) -> usize {
        self.out.len()
    }

    /// Edges listed once: `src < dst` for undirected kinds, oriented for the
    /// directed kind.
    pub fn edges(&self) -> &[Overlap] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Neighbors of `u` (out-neighbors for the directed kind), sorted.
    pub fn neighbors(&self, u: UserId) -> &[UserId] {
        self.out.get(u.index()).map_or(&[], Vec::as_slice)
    }

    pub fn has_edge(&self, from: UserId, to: UserId) -> bool {
        self.neighbors(from).binary_search(&to).is_ok()
    }

    /// Writes `src<TAB>dst<TAB>similarity` lines.
    pub fn write_edge_list<W: Write>(&self, mut w: W, labels: &Labels) -> io::Result<()> {
        for e in &self.edges {
            writeln!(
                w,
                "{}\t{}\t{}",
                labels.user_label(e.src),
                labels.user_label(e.dst),
                e.similarity()
            )?;
        }
        Ok(())
    }
}

/// Keeps the overlaps that exceed `threshold`.
pub fn graph_from_overlaps(
    c: &Community,
    kind: SimilarityKind,
    threshold: Threshold,
    overlaps: &[Overlap],
) -> InterestGraph {
    let edges = overlaps.iter().copied().filter(|o| o.exceeds(threshold)).collect();
    InterestGraph::from_edges(kind, threshold, c.users().to_vec(), c.user_capacity(), edges)
}

pub fn build_graph(c: &Community, kind: SimilarityKind, threshold: Threshold) -> Result<InterestGraph> {
    if c.is_empty() {
        return Err(Error::EmptyCommunity);
    }
    Ok(graph_from_overlaps(c, kind, threshold, &overlaps(c, kind)))
}

/// Overlaps sorted by exactly descending similarity, for sweeps that add
/// edges as the threshold drops.
pub(crate) fn sorted_desc(mut overlaps: Vec<Overlap>) -> Vec<Overlap> {
    overlaps.par_sort_unstable_by(Overlap::cmp_desc);
    overlaps
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ItemId, TagAssignment, TagId};

    /// Each user gets the given item list, all tagged with tag 0.
    fn libraries(libs: &[&[u32]]) -> Community {
        let mut rows = Vec::new();
        for (u, items) in libs.iter().enumerate() {
            for &i in *items {
                rows.push(TagAssignment::new(UserId(u as u32), TagId(0), ItemId(i), 1));
            }
        }
        Community::build(rows)
    }

    fn t(s: &str) -> Threshold {
        s.parse().unwrap()
    }

    #[test]
    fn jaccard_and_containment_examples() {
        // a=0, b=1, c=2, d=3
        let c = libraries(&[&[0, 1, 2], &[1, 2, 3]]);
        assert_eq!(
            similarity(&c, UserId(0), UserId(1), SimilarityKind::UserItem).unwrap(),
            0.5
        );
        let c = libraries(&[&[4, 5], &[4, 5]]);
        assert_eq!(
            similarity(&c, UserId(0), UserId(1), SimilarityKind::UserItem).unwrap(),
            1.0
        );
        let c = libraries(&[&[0, 1], &[0, 1, 2, 3]]);
        let d = SimilarityKind::DirectedUserItem;
        assert_eq!(similarity(&c, UserId(0), UserId(1), d).unwrap(), 1.0);
        assert_eq!(similarity(&c, UserId(1), UserId(0), d).unwrap(), 0.5);
    }

    #[test]
    fn similarity_errors() {
        let c = libraries(&[&[0], &[0]]);
        let k = SimilarityKind::UserItem;
        assert_eq!(similarity(&c, UserId(0), UserId(0), k), Err(Error::SameUser(UserId(0))));
        assert_eq!(
            similarity(&c, UserId(0), UserId(7), k),
            Err(Error::UnknownUser(UserId(7)))
        );
    }

    #[test]
    fn identical_single_item_libraries_connect() {
        let c = libraries(&[&[0], &[0]]);
        let g = build_graph(&c, SimilarityKind::UserItem, t("0.5")).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert!(g.has_edge(UserId(0), UserId(1)) && g.has_edge(UserId(1), UserId(0)));
    }

    #[test]
    fn disjoint_libraries_never_connect() {
        let c = libraries(&[&[0], &[1]]);
        for kind in SimilarityKind::ALL {
            let g = build_graph(&c, kind, Threshold::ZERO).unwrap();
            // tags are shared, so only the item-based kinds stay empty
            if kind != SimilarityKind::UserTag {
                assert_eq!(g.edge_count(), 0, "{kind}");
            }
        }
    }

    #[test]
    fn chain_of_thirds() {
        let c = libraries(&[&[0, 1], &[1, 2], &[2, 3]]);
        let g = build_graph(&c, SimilarityKind::UserItem, t("0.3")).unwrap();
        let pairs: Vec<_> = g.edges().iter().map(|e| (e.src.0, e.dst.0)).collect();
        assert_eq!(pairs, vec![(0, 1), (1, 2)]);
        let g = build_graph(&c, SimilarityKind::UserItem, t("1/3")).unwrap();
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn directed_edges_point_from_covered_user() {
        let c = libraries(&[&[0, 1], &[0, 1, 2, 3]]);
        let g = build_graph(&c, SimilarityKind::DirectedUserItem, t("0.75")).unwrap();
        assert!(g.has_edge(UserId(0), UserId(1)));
        assert!(!g.has_edge(UserId(1), UserId(0)));
        assert_eq!(g.neighbors(UserId(1)), &[] as &[UserId]);
    }

    #[test]
    fn empty_community_rejected() {
        let c = Community::build([]);
        assert_eq!(
            build_graph(&c, SimilarityKind::UserItem, Threshold::ZERO),
            Err(Error::EmptyCommunity)
        );
    }

    #[test]
    fn edge_list_export() {
        let mut labels = Labels::new();
        let rows = vec![
            labels.assignment("bob", "p", "x", 1),
            labels.assignment("alice", "p", "x", 1),
        ];
        let c = Community::with_labels(rows, labels);
        let g = build_graph(&c, SimilarityKind::UserItem, Threshold::ZERO).unwrap();
        let mut buf = Vec::new();
        g.write_edge_list(&mut buf, c.labels()).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "bob\talice\t1\n");
    }
}
