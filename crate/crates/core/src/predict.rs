//! Temporal replay of neighbor-based prediction.
//!
//! At each window boundary `T` the interest graph is rebuilt from every
//! assignment with `timestamp <= T`. Each item a user newly adds to their
//! library during `(T, T + granularity]` is a hit if one of the user's
//! neighbors at `T` already holds it.

use std::collections::HashSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{build_graph, SimilarityKind};
use crate::model::{Community, ItemId, UserId};
use crate::threshold::Threshold;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct WindowStats {
    /// The boundary `T`; the window covers `(T, T + granularity]`.
    pub boundary: u64,
    pub adds: usize,
    pub hits: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HitRatioReport {
    pub kind: SimilarityKind,
    pub threshold: Threshold,
    pub granularity: u64,
    pub windows_evaluated: usize,
    pub adds_total: usize,
    pub hits_total: usize,
    /// `None` when no items were added after the first boundary.
    pub hit_ratio: Option<f64>,
    pub windows: Vec<WindowStats>,
}

pub fn hit_ratio(
    c: &Community,
    kind: SimilarityKind,
    threshold: Threshold,
    granularity: u64,
) -> Result<HitRatioReport> {
    if granularity == 0 {
        return Err(Error::InvalidConfig("granularity must be > 0".into()));
    }
    let (Some(first), Some(last)) = (c.first_timestamp(), c.last_timestamp()) else {
        return Err(Error::EmptyCommunity);
    };
    if last == first {
        return Err(Error::SpanTooShort);
    }

    let assignments = c.assignments();
    let mut library: HashSet<(UserId, ItemId)> = HashSet::new();
    let mut cursor = 0usize;
    let mut windows = Vec::new();
    let mut boundary = first;
    while boundary < last {
        // everything up to T is already in the libraries
        while cursor < assignments.len() && assignments[cursor].timestamp <= boundary {
            let a = assignments[cursor];
            library.insert((a.user, a.item));
            cursor += 1;
        }
        let end = boundary.saturating_add(granularity);
        let mut adds: Vec<(UserId, ItemId)> = Vec::new();
        let mut scan = cursor;
        while scan < assignments.len() && assignments[scan].timestamp <= end {
            let a = assignments[scan];
            if library.insert((a.user, a.item)) {
                adds.push((a.user, a.item));
            }
            scan += 1;
        }
        cursor = scan;

        let mut hits = 0;
        if !adds.is_empty() {
            let snapshot = c.prefix(boundary);
            let g = build_graph(&snapshot, kind, threshold)?;
            hits = adds
                .iter()
                .filter(|&&(u, i)| {
                    g.neighbors(u)
                        .iter()
                        .any(|&v| snapshot.user_items(v).binary_search(&i).is_ok())
                })
                .count();
        }
        windows.push(WindowStats {
            boundary,
            adds: adds.len(),
            hits,
        });
        boundary = end;
    }

    let adds_total = windows.iter().map(|w| w.adds).sum();
    let hits_total = windows.iter().map(|w| w.hits).sum();
    Ok(HitRatioReport {
        kind,
        threshold,
        granularity,
        windows_evaluated: windows.len(),
        adds_total,
        hits_total,
        hit_ratio: (adds_total > 0).then(|| hits_total as f64 / adds_total as f64),
        windows,
    })
}
