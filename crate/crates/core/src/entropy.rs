//! Item-popularity entropy and neighborhood entropy.
//!
//! Popularity of an item defaults to the number of distinct users whose
//! library holds it; [`PopularityMode::Assignments`] counts raw tag
//! assignments instead.

use std::collections::HashSet;
use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::components::largest_component;
use crate::error::{Error, Result};
use crate::graph::{InterestGraph, SimilarityKind};
use crate::model::{Community, ItemId, UserId};
use crate::threshold::Threshold;

const Z_95: f64 = 1.96;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PopularityMode {
    #[default]
    DistinctUsers,
    Assignments,
}

impl FromStr for PopularityMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "distinct_users" | "users" => Ok(PopularityMode::DistinctUsers),
            "assignments" => Ok(PopularityMode::Assignments),
            other => Err(Error::InvalidConfig(format!("unknown popularity mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PopularityDistribution {
    /// `(item, count)` with every count >= 1, ascending by item.
    pub counts: Vec<(ItemId, u64)>,
    pub total: u64,
}

impl PopularityDistribution {
    /// Builds from a dense count vector indexed by item ordinal; zero entries
    /// are dropped.
    pub fn from_dense(dense: &[u64]) -> Self {
        let counts: Vec<(ItemId, u64)> = dense
            .iter()
            .enumerate()
            .filter(|(_, &n)| n > 0)
            .map(|(i, &n)| (ItemId(i as u32), n))
            .collect();
        let total = counts.iter().map(|c| c.1).sum();
        Self { counts, total }
    }

    pub fn from_counts<I: IntoIterator<Item = u64>>(counts: I) -> Self {
        let dense: Vec<u64> = counts.into_iter().collect();
        Self::from_dense(&dense)
    }

    pub fn num_items(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }
}

fn check_base(base: f64) -> Result<()> {
    if base > 1.0 && base.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!("log base must be > 1, got {base}")))
    }
}

fn entropy_of(counts: impl Iterator<Item = u64>, total: u64, base: f64) -> f64 {
    let total = total as f64;
    let sum: f64 = counts
        .map(|n| {
            let p = n as f64 / total;
            if base == 2.0 {
                p * p.log2()
            } else {
                p * p.ln()
            }
        })
        .sum();
    let h = if base == 2.0 { -sum } else { -sum / base.ln() };
    // -0.0 for a single item
    h.max(0.0)
}

/// Shannon entropy `-Σ p_i log_base p_i` of the popularity distribution.
pub fn entropy(d: &PopularityDistribution, log_base: f64) -> Result<f64> {
    check_base(log_base)?;
    if d.is_empty() {
        return Err(Error::EmptyDistribution);
    }
    Ok(entropy_of(d.counts.iter().map(|c| c.1), d.total, log_base))
}

/// Popularity over assignments with `timestamp <= until` (all when `None`).
pub fn item_popularity(c: &Community, until: Option<u64>, mode: PopularityMode) -> Result<PopularityDistribution> {
    let end = until.map_or(c.assignments().len(), |t| {
        c.assignments().partition_point(|a| a.timestamp <= t)
    });
    if end == 0 {
        return Err(match until {
            Some(t) if !c.is_empty() => Error::EmptyAfterFilter(t),
            _ => Error::EmptyCommunity,
        });
    }
    let mut dense = vec![0u64; c.item_capacity()];
    match mode {
        PopularityMode::DistinctUsers => {
            let mut seen = HashSet::new();
            for a in &c.assignments()[..end] {
                if seen.insert((a.user, a.item)) {
                    dense[a.item.index()] += 1;
                }
            }
        }
        PopularityMode::Assignments => {
            for a in &c.assignments()[..end] {
                dense[a.item.index()] += 1;
            }
        }
    }
    Ok(PopularityDistribution::from_dense(&dense))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntropyPoint {
    pub period_end: u64,
    pub entropy: f64,
    pub num_items: usize,
}

/// Period boundaries `first + k * interval` for `k = 1..=ceil(span / interval)`;
/// a single boundary at `first` when every assignment shares one timestamp.
pub fn period_boundaries(first: u64, last: u64, interval: u64) -> Vec<u64> {
    let span = last - first;
    if span == 0 {
        return vec![first];
    }
    let periods = span.div_ceil(interval);
    (1..=periods).map(|k| first + k * interval).collect()
}

pub fn entropy_timeline(
    c: &Community,
    interval: u64,
    log_base: f64,
    mode: PopularityMode,
) -> Result<Vec<EntropyPoint>> {
    check_base(log_base)?;
    if interval == 0 {
        return Err(Error::InvalidConfig("interval must be > 0".into()));
    }
    let (Some(first), Some(last)) = (c.first_timestamp(), c.last_timestamp()) else {
        return Err(Error::EmptyCommunity);
    };
    let assignments = c.assignments();
    let mut dense = vec![0u64; c.item_capacity()];
    let mut seen = HashSet::new();
    let mut num_items = 0usize;
    let mut total = 0u64;
    let mut cursor = 0usize;
    let mut out = Vec::new();
    for boundary in period_boundaries(first, last, interval) {
        while cursor < assignments.len() && assignments[cursor].timestamp <= boundary {
            let a = assignments[cursor];
            cursor += 1;
            if mode == PopularityMode::DistinctUsers && !seen.insert((a.user, a.item)) {
                continue;
            }
            if dense[a.item.index()] == 0 {
                num_items += 1;
            }
            dense[a.item.index()] += 1;
            total += 1;
        }
        let h = entropy_of(dense.iter().copied().filter(|&n| n > 0), total, log_base);
        out.push(EntropyPoint {
            period_end: boundary,
            entropy: h,
            num_items,
        });
    }
    Ok(out)
}

pub fn write_timeline_csv<W: Write>(mut w: W, points: &[EntropyPoint]) -> io::Result<()> {
    writeln!(w, "period_end,entropy,num_items")?;
    for p in points {
        writeln!(w, "{},{},{}", p.period_end, p.entropy, p.num_items)?;
    }
    Ok(())
}

/// Entropy of the pooled libraries of `users`, where an item's count is the
/// number of those users holding it. `scratch` must be zeroed and at least
/// `c.item_capacity()` long; it is left zeroed.
fn pooled_entropy(
    c: &Community,
    users: &[UserId],
    log_base: f64,
    scratch: &mut [u64],
    touched: &mut Vec<ItemId>,
) -> f64 {
    let mut total = 0u64;
    for &v in users {
        for &i in c.user_items(v) {
            if scratch[i.index()] == 0 {
                touched.push(i);
            }
            scratch[i.index()] += 1;
            total += 1;
        }
    }
    let h = entropy_of(touched.iter().map(|i| scratch[i.index()]), total, log_base);
    for i in touched.drain(..) {
        scratch[i.index()] = 0;
    }
    h
}

/// Entropy over the union of `u`'s neighbors' libraries (out-neighbors in a
/// directed graph). `u`'s own library does not contribute.
pub fn neighborhood_entropy(c: &Community, g: &InterestGraph, u: UserId, log_base: f64) -> Result<f64> {
    check_base(log_base)?;
    let neighbors = g.neighbors(u);
    if neighbors.is_empty() {
        return Err(Error::NoNeighbors(u));
    }
    let mut scratch = vec![0u64; c.item_capacity()];
    Ok(pooled_entropy(c, neighbors, log_base, &mut scratch, &mut Vec::new()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NeighborhoodMode {
    /// Neighbors taken from the interest graph.
    InterestGraph,
    /// Entropy of all libraries in the largest component pooled together.
    LargestComponentTotal,
    /// Same-size random neighbor sets drawn from the largest component.
    RandomComponent,
    /// Same-size random neighbor sets drawn from all users.
    RandomGraph,
}

impl NeighborhoodMode {
    pub const ALL: [NeighborhoodMode; 4] = [
        NeighborhoodMode::InterestGraph,
        NeighborhoodMode::LargestComponentTotal,
        NeighborhoodMode::RandomComponent,
        NeighborhoodMode::RandomGraph,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            NeighborhoodMode::InterestGraph => "interest_graph",
            NeighborhoodMode::LargestComponentTotal => "largest_component_total",
            NeighborhoodMode::RandomComponent => "random_component",
            NeighborhoodMode::RandomGraph => "random_graph",
        }
    }

    pub fn is_random(self) -> bool {
        matches!(self, NeighborhoodMode::RandomComponent | NeighborhoodMode::RandomGraph)
    }
}

impl fmt::Display for NeighborhoodMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for NeighborhoodMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        NeighborhoodMode::ALL
            .into_iter()
            .find(|m| m.as_str() == s || m.as_str().replace('_', "-") == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown neighborhood mode {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NeighborhoodEntropyReport {
    pub kind: SimilarityKind,
    pub threshold: Threshold,
    pub mode: NeighborhoodMode,
    pub mean: f64,
    /// Half-width of the normal-approximation 95% interval across users.
    pub ci95_half_width: f64,
    pub users_measured: usize,
    pub trials: usize,
    /// Mean across users for each resampling trial (random modes only).
    pub trial_means: Vec<f64>,
}

/// Mean and 95% half-width (`1.96 * s / sqrt(n)`, sample standard deviation).
pub fn mean_ci95(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, 0.0);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, Z_95 * (var / n as f64).sqrt())
}

/// Draws `k` distinct users from `pool` (sorted) excluding `skip`.
fn sample_excluding(rng: &mut ChaCha8Rng, pool: &[UserId], skip: UserId, k: usize, out: &mut Vec<UserId>) {
    out.clear();
    let hole = pool.binary_search(&skip).ok();
    let available = pool.len() - usize::from(hole.is_some());
    let k = k.min(available);
    for idx in index::sample(rng, available, k) {
        let idx = match hole {
            Some(h) if idx >= h => idx + 1,
            _ => idx,
        };
        out.push(pool[idx]);
    }
}

/// Averages neighborhood entropy over every user with at least one neighbor,
/// or computes one of the baselines.
///
/// Random modes give each measured user an independent stream derived from
/// `(seed, user)`, so results do not depend on the number of worker threads.
pub fn average_neighborhood_entropy(
    c: &Community,
    g: &InterestGraph,
    mode: NeighborhoodMode,
    trials: usize,
    seed: u64,
    log_base: f64,
) -> Result<NeighborhoodEntropyReport> {
    check_base(log_base)?;
    if mode.is_random() && trials == 0 {
        return Err(Error::InvalidConfig("random modes need trials >= 1".into()));
    }
    let measured: Vec<UserId> = g
        .nodes()
        .iter()
        .copied()
        .filter(|&u| !g.neighbors(u).is_empty())
        .collect();
    if measured.is_empty() {
        return Err(Error::Degenerate("interest graph has no edges".into()));
    }
    let report = |mean, ci, users_measured, trials, trial_means| NeighborhoodEntropyReport {
        kind: g.kind(),
        threshold: g.threshold(),
        mode,
        mean,
        ci95_half_width: ci,
        users_measured,
        trials,
        trial_means,
    };
    let cap = c.item_capacity();

    match mode {
        NeighborhoodMode::InterestGraph => {
            let values: Vec<f64> = measured
                .par_iter()
                .map_init(
                    || (vec![0u64; cap], Vec::new()),
                    |(scratch, touched), &u| pooled_entropy(c, g.neighbors(u), log_base, scratch, touched),
                )
                .collect();
            let (mean, ci) = mean_ci95(&values);
            Ok(report(mean, ci, values.len(), 0, Vec::new()))
        }
        NeighborhoodMode::LargestComponentTotal => {
            let lcc = largest_component(g);
            let mut scratch = vec![0u64; cap];
            let h = pooled_entropy(c, &lcc, log_base, &mut scratch, &mut Vec::new());
            Ok(report(h, 0.0, lcc.len(), 0, Vec::new()))
        }
        NeighborhoodMode::RandomComponent | NeighborhoodMode::RandomGraph => {
            let pool = if mode == NeighborhoodMode::RandomComponent {
                largest_component(g)
            } else {
                c.users().to_vec()
            };
            // per user: entropy for each trial
            let per_user: Vec<Vec<f64>> = measured
                .par_iter()
                .map_init(
                    || (vec![0u64; cap], Vec::new(), Vec::new()),
                    |(scratch, touched, sample), &u| {
                        let mut rng = ChaCha8Rng::seed_from_u64(seed);
                        rng.set_stream(u64::from(u.0));
                        let degree = g.neighbors(u).len();
                        (0..trials)
                            .map(|_| {
                                sample_excluding(&mut rng, &pool, u, degree, sample);
                                if sample.is_empty() {
                                    0.0
                                } else {
                                    pooled_entropy(c, sample, log_base, scratch, touched)
                                }
                            })
                            .collect()
                    },
                )
                .collect();
            let user_means: Vec<f64> = per_user.iter().map(|v| v.iter().sum::<f64>() / trials as f64).collect();
            let trial_means: Vec<f64> = (0..trials)
                .map(|t| per_user.iter().map(|v| v[t]).sum::<f64>() / per_user.len() as f64)
                .collect();
            let (mean, ci) = mean_ci95(&user_means);
            Ok(report(mean, ci, user_means.len(), trials, trial_means))
        }
    }
}

pub const NEIGHBORHOOD_CSV_HEADER: &str = "kind,threshold,mode,mean,ci95_half_width,users_measured,trials,trial_spread";

pub fn write_neighborhood_csv<W: Write>(mut w: W, reports: &[NeighborhoodEntropyReport]) -> io::Result<()> {
    writeln!(w, "{NEIGHBORHOOD_CSV_HEADER}")?;
    for r in reports {
        let spread = if r.trial_means.len() > 1 {
            let (_, ci) = mean_ci95(&r.trial_means);
            // back out the sample standard deviation
            ci / Z_95 * (r.trial_means.len() as f64).sqrt()
        } else {
            0.0
        };
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            r.kind, r.threshold, r.mode, r.mean, r.ci95_half_width, r.users_measured, r.trials, spread
        )?;
    }
    Ok(())
}
