//! Eggenberger-Pólya urn process and a synthetic tagging-trace generator
//! built on it.
//!
//! Each draw picks a color with probability proportional to its ball count
//! and returns the ball with one more of the same color. The generator gives
//! every item its own urn over the tag vocabulary, so per-item tag
//! proportions evolve by reinforcement.

use std::collections::HashSet;
use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::activity::{eval_hoerl, HoerlParams};
use crate::error::{Error, Result};
use crate::ingest::RawRecord;
use crate::model::{ItemId, TagAssignment, TagId, UserId};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UrnState {
    counts: Vec<u64>,
}

impl UrnState {
    /// At least two colors, each with at least one ball.
    pub fn new(counts: Vec<u64>) -> Result<Self> {
        if counts.len() < 2 {
            return Err(Error::InvalidConfig("an urn needs at least two colors".into()));
        }
        if counts.contains(&0) {
            return Err(Error::InvalidConfig("every urn color needs at least one ball".into()));
        }
        Ok(Self { counts })
    }

    /// `colors` colors with one ball each.
    pub fn uniform(colors: usize) -> Result<Self> {
        Self::new(vec![1; colors])
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn colors(&self) -> usize {
        self.counts.len()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn fractions(&self) -> Vec<f64> {
        let total = self.total() as f64;
        self.counts.iter().map(|&n| n as f64 / total).collect()
    }

    /// Draws a color and reinforces it.
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> usize {
        let mut ball = rng.random_range(0..self.total());
        let mut color = 0;
        while ball >= self.counts[color] {
            ball -= self.counts[color];
            color += 1;
        }
        self.counts[color] += 1;
        color
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UrnTrajectory {
    /// Color fractions after each step.
    pub fractions: Vec<Vec<f64>>,
    /// The color drawn at each step.
    pub draws: Vec<usize>,
    pub final_state: UrnState,
}

impl UrnTrajectory {
    pub fn steps(&self) -> usize {
        self.fractions.len()
    }
}

pub fn urn_run(initial: &UrnState, steps: usize, seed: u64) -> Result<UrnTrajectory> {
    if steps == 0 {
        return Err(Error::InvalidConfig("steps must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut urn = initial.clone();
    let mut fractions = Vec::with_capacity(steps);
    let mut draws = Vec::with_capacity(steps);
    for _ in 0..steps {
        draws.push(urn.step(&mut rng));
        fractions.push(urn.fractions());
    }
    Ok(UrnTrajectory {
        fractions,
        draws,
        final_state: urn,
    })
}

/// Returns the last fraction vector if every color moved by less than `tol`
/// (max minus min) over the final `window` steps, `None` otherwise.
pub fn urn_converged_fraction(traj: &UrnTrajectory, window: usize, tol: f64) -> Result<Option<Vec<f64>>> {
    converged_fraction(&traj.fractions, window, tol)
}

/// [`urn_converged_fraction`] over any sequence of fraction vectors.
pub fn converged_fraction(fractions: &[Vec<f64>], window: usize, tol: f64) -> Result<Option<Vec<f64>>> {
    let steps = fractions.len();
    if window == 0 || window > steps {
        return Err(Error::WindowTooLarge { window, steps });
    }
    let tail = &fractions[steps - window..];
    let colors = tail[0].len();
    let stable = (0..colors).all(|k| {
        let (lo, hi) = tail
            .iter()
            .map(|f| f[k])
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)));
        hi - lo < tol
    });
    Ok(stable.then(|| fractions[steps - 1].clone()))
}

pub fn write_trajectory_csv<W: Write>(mut w: W, traj: &UrnTrajectory) -> io::Result<()> {
    let colors = traj.final_state.colors();
    write!(w, "step,draw")?;
    for k in 0..colors {
        write!(w, ",fraction_{k}")?;
    }
    writeln!(w)?;
    for (step, (f, d)) in traj.fractions.iter().zip(&traj.draws).enumerate() {
        write!(w, "{},{}", step + 1, d)?;
        for x in f {
            write!(w, ",{x}")?;
        }
        writeln!(w)?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticTraceConfig {
    pub num_users: usize,
    /// Cap on distinct items; once reached, fresh picks reuse existing items.
    pub num_items: usize,
    /// The user at activity rank `r` makes `max(1, round(f(r)))` assignments.
    pub assignments_per_user: HoerlParams,
    /// Initial ball counts of every item's tag urn; one color per tag.
    pub urn_init: UrnState,
    pub copy_probability: f64,
    pub start_time: u64,
    pub time_step: u64,
    pub seed: u64,
}

impl Default for SyntheticTraceConfig {
    /// The settings behind the shipped fixture (200 users, seed 42).
    fn default() -> Self {
        Self {
            num_users: 200,
            num_items: 300,
            assignments_per_user: HoerlParams {
                a: 12.0,
                b: 1.0,
                c: -0.2,
            },
            urn_init: UrnState { counts: vec![1; 40] },
            copy_probability: 0.5,
            start_time: 1_100_000_000,
            time_step: 60,
            seed: 42,
        }
    }
}

impl SyntheticTraceConfig {
    pub fn validate(&self) -> Result<()> {
        if self.num_users == 0 {
            return Err(Error::InvalidConfig("num_users must be >= 1".into()));
        }
        if self.num_items == 0 {
            return Err(Error::InvalidConfig("num_items must be >= 1".into()));
        }
        if !(0.0..=1.0).contains(&self.copy_probability) {
            return Err(Error::InvalidConfig(format!(
                "copy_probability must be in [0, 1], got {}",
                self.copy_probability
            )));
        }
        self.assignments_per_user.validate()?;
        UrnState::new(self.urn_init.counts.clone())?;
        Ok(())
    }

    /// Assignment budget of the user at each rank `1..=num_users`.
    pub fn activity_budget(&self) -> Result<Vec<usize>> {
        (1..=self.num_users)
            .map(|r| {
                let v = eval_hoerl(&self.assignments_per_user, r as f64)?.round();
                Ok(if v >= 1.0 { v as usize } else { 1 })
            })
            .collect()
    }
}

struct ItemPool {
    holders: Vec<u32>,
    held: Vec<ItemId>,
    urns: Vec<UrnState>,
}

impl ItemPool {
    /// Uniform over items held by at least one user other than `user`.
    fn pick_copy(&self, rng: &mut ChaCha8Rng, user: &HashSet<ItemId>) -> Option<ItemId> {
        let eligible = |i: ItemId| self.holders[i.index()] > u32::from(user.contains(&i));
        if self.held.is_empty() {
            return None;
        }
        for _ in 0..32 {
            let i = self.held[rng.random_range(0..self.held.len())];
            if eligible(i) {
                return Some(i);
            }
        }
        let candidates: Vec<ItemId> = self.held.iter().copied().filter(|&i| eligible(i)).collect();
        if candidates.is_empty() {
            None
        } else {
            Some(candidates[rng.random_range(0..candidates.len())])
        }
    }
}

/// Generates a trace. Users are interleaved round-robin in rank order and
/// every event advances the clock by `time_step`.
pub fn generate_trace(cfg: &SyntheticTraceConfig) -> Result<Vec<TagAssignment>> {
    cfg.validate()?;
    let budget = cfg.activity_budget()?;
    let rounds = budget.iter().copied().max().unwrap_or(0);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut libraries: Vec<HashSet<ItemId>> = vec![HashSet::new(); cfg.num_users];
    let mut pool = ItemPool {
        holders: Vec::new(),
        held: Vec::new(),
        urns: Vec::new(),
    };
    let mut out = Vec::with_capacity(budget.iter().sum());
    let mut clock = cfg.start_time;

    for round in 0..rounds {
        for (u, &n) in budget.iter().enumerate() {
            if round >= n {
                continue;
            }
            let copy = rng.random_bool(cfg.copy_probability);
            let copied = if copy {
                pool.pick_copy(&mut rng, &libraries[u])
            } else {
                None
            };
            let item = match copied {
                Some(i) => i,
                None if pool.urns.len() < cfg.num_items => {
                    let i = ItemId(pool.urns.len() as u32);
                    pool.urns.push(cfg.urn_init.clone());
                    pool.holders.push(0);
                    i
                }
                // item cap reached: reuse any existing item
                None => ItemId(rng.random_range(0..pool.urns.len()) as u32),
            };
            if libraries[u].insert(item) {
                if pool.holders[item.index()] == 0 {
                    pool.held.push(item);
                }
                pool.holders[item.index()] += 1;
            }
            let tag = pool.urns[item.index()].step(&mut rng);
            out.push(TagAssignment::new(UserId(u as u32), TagId(tag as u32), item, clock));
            clock += cfg.time_step;
        }
    }
    Ok(out)
}

/// Labels used when writing generated traces.
pub fn synthetic_record(a: &TagAssignment, line: usize) -> RawRecord {
    RawRecord {
        user: format!("user{}", a.user.0),
        item: format!("item{}", a.item.0),
        tag: format!("tag{}", a.tag.0),
        timestamp: a.timestamp,
        source_line: line,
    }
}

pub fn generate_records(cfg: &SyntheticTraceConfig) -> Result<Vec<RawRecord>> {
    Ok(generate_trace(cfg)?
        .iter()
        .enumerate()
        .map(|(n, a)| synthetic_record(a, n + 1))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Community;

    #[test]
    fn one_step_has_two_outcomes() {
        let init = UrnState::uniform(2).unwrap();
        for seed in 0..20 {
            let t = urn_run(&init, 1, seed).unwrap();
            let f = &t.fractions[0];
            assert!(*f == vec![2.0 / 3.0, 1.0 / 3.0] || *f == vec![1.0 / 3.0, 2.0 / 3.0]);
        }
    }

    #[test]
    fn same_seed_same_trajectory() {
        let init = UrnState::new(vec![2, 1, 3]).unwrap();
        assert_eq!(urn_run(&init, 500, 7).unwrap(), urn_run(&init, 500, 7).unwrap());
        assert_ne!(
            urn_run(&init, 500, 7).unwrap().draws,
            urn_run(&init, 500, 8).unwrap().draws
        );
    }

    #[test]
    fn conservation_and_normalization() {
        let init = UrnState::new(vec![3, 1, 1, 2]).unwrap();
        let t = urn_run(&init, 1000, 3).unwrap();
        assert_eq!(t.final_state.total(), init.total() + 1000);
        for f in &t.fractions {
            assert!((f.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert_eq!(f.len(), 4);
        }
    }

    #[test]
    fn invalid_urns_rejected() {
        assert!(UrnState::new(vec![1]).is_err());
        assert!(UrnState::new(vec![1, 0]).is_err());
        assert!(urn_run(&UrnState::uniform(2).unwrap(), 0, 1).is_err());
    }

    #[test]
    fn constant_trajectory_converges() {
        let fr = vec![vec![0.25, 0.75]; 10];
        assert_eq!(converged_fraction(&fr, 10, 1e-9).unwrap(), Some(vec![0.25, 0.75]));
        assert_eq!(
            converged_fraction(&fr, 11, 0.1),
            Err(Error::WindowTooLarge { window: 11, steps: 10 })
        );
    }

    #[test]
    fn long_run_converges() {
        let t = urn_run(&UrnState::uniform(2).unwrap(), 100_000, 11).unwrap();
        assert!(urn_converged_fraction(&t, 1000, 0.01).unwrap().is_some());
        // the first few steps swing by a third or more
        let early = UrnTrajectory {
            fractions: t.fractions[..10].to_vec(),
            draws: Vec::new(),
            final_state: t.final_state.clone(),
        };
        assert_eq!(urn_converged_fraction(&early, 10, 0.01).unwrap(), None);
    }

    fn small(num_users: usize, a: f64, copy: f64) -> SyntheticTraceConfig {
        SyntheticTraceConfig {
            num_users,
            num_items: 1000,
            assignments_per_user: HoerlParams { a, b: 1.0, c: 0.0 },
            urn_init: UrnState::uniform(5).unwrap(),
            copy_probability: copy,
            start_time: 0,
            time_step: 1,
            seed: 1,
        }
    }

    #[test]
    fn flat_activity_counts() {
        let trace = generate_trace(&small(4, 3.0, 0.5)).unwrap();
        assert_eq!(trace.len(), 12);
        let c = Community::build(trace);
        assert_eq!(c.summary().num_users, 4);
    }

    #[test]
    fn lone_user_never_copies() {
        let trace = generate_trace(&small(1, 50.0, 1.0)).unwrap();
        let items: HashSet<_> = trace.iter().map(|a| a.item).collect();
        assert_eq!(items.len(), 50);
    }

    #[test]
    fn item_cap_is_respected() {
        let mut cfg = small(3, 40.0, 0.0);
        cfg.num_items = 10;
        let trace = generate_trace(&cfg).unwrap();
        assert!(trace.iter().all(|a| a.item.0 < 10));
        assert_eq!(trace.len(), 120);
    }

    #[test]
    fn generation_is_deterministic() {
        let cfg = SyntheticTraceConfig::default();
        assert_eq!(generate_trace(&cfg).unwrap(), generate_trace(&cfg).unwrap());
        let other = SyntheticTraceConfig {
            seed: 43,
            ..cfg.clone()
        };
        assert_ne!(generate_trace(&cfg).unwrap(), generate_trace(&other).unwrap());
    }

    #[test]
    fn config_validation() {
        let mut cfg = small(0, 1.0, 0.5);
        assert!(generate_trace(&cfg).is_err());
        cfg.num_users = 2;
        cfg.copy_probability = 1.5;
        assert!(generate_trace(&cfg).is_err());
    }
}
