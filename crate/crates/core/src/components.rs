//! Connected components of interest graphs and threshold sweeps.
//!
//! Directed graphs are treated as undirected here (weak connectivity).
//! Isolated nodes are counted separately and never form a component.

use std::io::{self, Write};

use serde::Serialize;

use crate::error::Result;
use crate::graph::{overlaps, sorted_desc, InterestGraph, SimilarityKind};
use crate::model::{Community, UserId};
use crate::threshold::Threshold;

#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while self.parent[x] != root {
            let next = self.parent[x];
            self.parent[x] = root;
            x = next;
        }
        root
    }

    /// Merges the sets of `a` and `b`; returns the merged size, or `None` if
    /// they were already joined.
    pub fn union(&mut self, a: usize, b: usize) -> Option<usize> {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return None;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        Some(self.size[ra])
    }

    pub fn size_of(&mut self, x: usize) -> usize {
        let r = self.find(x);
        self.size[r]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ComponentSummary {
    pub components_excluding_isolated: usize,
    pub isolated_count: usize,
    pub largest_component_size: usize,
    pub nonisolated_node_count: usize,
}

/// Non-trivial components, largest first (ties: smallest member first). Each
/// component lists its members in ascending order.
pub fn components(g: &InterestGraph) -> Vec<Vec<UserId>> {
    let mut uf = UnionFind::new(g.capacity());
    let mut touched = vec![false; g.capacity()];
    for e in g.edges() {
        uf.union(e.src.index(), e.dst.index());
        touched[e.src.index()] = true;
        touched[e.dst.index()] = true;
    }
    let mut by_root: std::collections::BTreeMap<usize, Vec<UserId>> = Default::default();
    for &u in g.nodes() {
        if touched[u.index()] {
            by_root.entry(uf.find(u.index())).or_default().push(u);
        }
    }
    let mut comps: Vec<Vec<UserId>> = by_root.into_values().collect();
    comps.sort_by(|a, b| b.len().cmp(&a.len()).then(a[0].cmp(&b[0])));
    comps
}

pub fn largest_component(g: &InterestGraph) -> Vec<UserId> {
    components(g).into_iter().next().unwrap_or_default()
}

pub fn component_summary(g: &InterestGraph) -> ComponentSummary {
    let comps = components(g);
    let nonisolated: usize = comps.iter().map(Vec::len).sum();
    ComponentSummary {
        components_excluding_isolated: comps.len(),
        isolated_count: g.nodes().len() - nonisolated,
        largest_component_size: comps.first().map_or(0, Vec::len),
        nonisolated_node_count: nonisolated,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SweepRow {
    pub threshold: Threshold,
    #[serde(flatten)]
    pub summary: ComponentSummary,
}

/// Component summaries for each threshold, in the order given.
///
/// Pair similarities are computed once. Thresholds are then visited from
/// highest to lowest while edges are merged into a single union-find in
/// descending similarity order, so each summary reflects exactly the edges
/// with similarity strictly above its threshold.
pub fn threshold_sweep(c: &Community, kind: SimilarityKind, thresholds: &[Threshold]) -> Result<Vec<SweepRow>> {
    if thresholds.is_empty() {
        return Ok(Vec::new());
    }
    if c.is_empty() {
        return Err(crate::error::Error::EmptyCommunity);
    }
    let pairs = sorted_desc(overlaps(c, kind));
    let total_nodes = c.users().len();

    let mut order: Vec<usize> = (0..thresholds.len()).collect();
    order.sort_by(|&a, &b| thresholds[b].cmp(&thresholds[a]));

    let mut uf = UnionFind::new(c.user_capacity());
    let mut touched = vec![false; c.user_capacity()];
    let mut nonisolated = 0usize;
    let mut merges = 0usize;
    let mut largest = 0usize;
    let mut next = 0usize;
    let mut out = vec![None; thresholds.len()];

    for idx in order {
        let t = thresholds[idx];
        while next < pairs.len() && pairs[next].exceeds(t) {
            let e = pairs[next];
            for u in [e.src, e.dst] {
                if !touched[u.index()] {
                    touched[u.index()] = true;
                    nonisolated += 1;
                }
            }
            if let Some(size) = uf.union(e.src.index(), e.dst.index()) {
                merges += 1;
                largest = largest.max(size);
            }
            next += 1;
        }
        out[idx] = Some(SweepRow {
            threshold: t,
            summary: ComponentSummary {
                components_excluding_isolated: nonisolated - merges,
                isolated_count: total_nodes - nonisolated,
                largest_component_size: largest,
                nonisolated_node_count: nonisolated,
            },
        });
    }
    Ok(out.into_iter().map(|r| r.expect("every threshold visited")).collect())
}

pub const SWEEP_CSV_HEADER: &str = "threshold,components,isolated,largest,nonisolated";

pub fn write_sweep_csv<W: Write>(mut w: W, rows: &[SweepRow]) -> io::Result<()> {
    writeln!(w, "{SWEEP_CSV_HEADER}")?;
    for r in rows {
        let s = &r.summary;
        writeln!(
            w,
            "{},{},{},{},{}",
            r.threshold,
            s.components_excluding_isolated,
            s.isolated_count,
            s.largest_component_size,
            s.nonisolated_node_count
        )?;
    }
    Ok(())
}
