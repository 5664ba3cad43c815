use std::collections::BTreeMap;

use folksonomy::urn::converged_fraction;
use folksonomy::{generate_trace, urn_converged_fraction, urn_run, HoerlParams, SyntheticTraceConfig, UrnState};

/// Exact probability of one draw sequence from an urn starting at `init`.
fn sequence_probability(init: &[u64], draws: &[usize]) -> f64 {
    let mut counts = init.to_vec();
    let mut p = 1.0;
    for &d in draws {
        let total: u64 = counts.iter().sum();
        p *= counts[d] as f64 / total as f64;
        counts[d] += 1;
    }
    p
}

#[test]
fn draw_sequences_are_exchangeable() {
    let init = [2, 1];
    let n = 6;
    let mut by_count: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for mask in 0u32..1 << n {
        let draws: Vec<usize> = (0..n).map(|k| ((mask >> k) & 1) as usize).collect();
        let ones = draws.iter().filter(|&&d| d == 1).count();
        by_count
            .entry(ones)
            .or_default()
            .push(sequence_probability(&init, &draws));
    }
    let mut total = 0.0;
    for probs in by_count.values() {
        // every ordering of the same multiset is equally likely
        for p in probs {
            assert!((p - probs[0]).abs() < 1e-15);
        }
        total += probs.iter().sum::<f64>();
    }
    assert!((total - 1.0).abs() < 1e-12);
}

#[test]
fn monte_carlo_matches_enumeration() {
    const RUNS: u64 = 100_000;
    const TOL: f64 = 0.02;
    let init = UrnState::new(vec![1, 1]).unwrap();
    let n = 5usize;

    let mut exact = vec![0.0; n + 1];
    for mask in 0u32..1 << n {
        let draws: Vec<usize> = (0..n).map(|k| ((mask >> k) & 1) as usize).collect();
        let ones = draws.iter().sum::<usize>();
        exact[ones] += sequence_probability(init.counts(), &draws);
    }
    // a {1,1} urn puts equal mass on every count
    for p in &exact {
        assert!((p - 1.0 / (n as f64 + 1.0)).abs() < 1e-12);
    }

    let mut seen = vec![0u64; n + 1];
    for seed in 0..RUNS {
        let traj = urn_run(&init, n, seed).unwrap();
        seen[traj.draws.iter().filter(|&&d| d == 1).count()] += 1;
    }
    for (k, (&s, &p)) in seen.iter().zip(&exact).enumerate() {
        let freq = s as f64 / RUNS as f64;
        assert!((freq - p).abs() < TOL, "count {k}: {freq} vs {p}");
    }
}

#[test]
fn two_step_sequences_match_monte_carlo() {
    const RUNS: u64 = 100_000;
    const TOL: f64 = 0.02;
    let init = UrnState::new(vec![1, 1]).unwrap();
    let mut seen: BTreeMap<Vec<usize>, u64> = BTreeMap::new();
    for seed in 0..RUNS {
        *seen.entry(urn_run(&init, 2, seed).unwrap().draws).or_default() += 1;
    }
    assert_eq!(seen.len(), 4);
    for (draws, count) in &seen {
        let p = sequence_probability(init.counts(), draws);
        let freq = *count as f64 / RUNS as f64;
        assert!((freq - p).abs() < TOL, "{draws:?}: {freq} vs {p}");
    }
}

#[test]
fn hundred_thousand_steps_settle_within_one_percent() {
    let init = UrnState::new(vec![1, 1]).unwrap();
    for seed in 0..5 {
        let traj = urn_run(&init, 100_000, seed).unwrap();
        assert!(
            urn_converged_fraction(&traj, 1000, 0.01).unwrap().is_some(),
            "seed {seed}"
        );
    }
}

#[test]
fn long_runs_settle() {
    let init = UrnState::new(vec![1, 1]).unwrap();
    for seed in 0..20 {
        let traj = urn_run(&init, 10_000, seed).unwrap();
        let settled = urn_converged_fraction(&traj, 1000, 0.02).unwrap();
        let limit = settled.unwrap_or_else(|| panic!("seed {seed} did not settle"));
        assert_eq!(limit, traj.final_state.fractions());
        assert_eq!(traj.final_state.total(), 10_002);
    }
}

#[test]
fn generated_item_tags_follow_an_urn() {
    // one item, so every assignment draws from the same two-color urn
    let cfg = SyntheticTraceConfig {
        num_users: 100,
        num_items: 1,
        assignments_per_user: HoerlParams::new(100.0, 1.0, 0.0).unwrap(),
        urn_init: UrnState::uniform(2).unwrap(),
        ..SyntheticTraceConfig::default()
    };
    let trace = generate_trace(&cfg).unwrap();
    assert_eq!(trace.len(), 10_000);
    let mut counts = [1u64, 1];
    let fractions: Vec<Vec<f64>> = trace
        .iter()
        .map(|a| {
            counts[a.tag.index()] += 1;
            let total = (counts[0] + counts[1]) as f64;
            vec![counts[0] as f64 / total, counts[1] as f64 / total]
        })
        .collect();
    let limit = converged_fraction(&fractions, 1000, 0.02)
        .unwrap()
        .expect("tag shares settle");
    assert!((limit[0] + limit[1] - 1.0).abs() < 1e-12);
}

#[test]
fn generator_is_deterministic_per_seed() {
    let cfg = SyntheticTraceConfig::default();
    assert_eq!(generate_trace(&cfg).unwrap(), generate_trace(&cfg).unwrap());
    let other = SyntheticTraceConfig {
        seed: 43,
        ..cfg.clone()
    };
    assert_ne!(generate_trace(&cfg).unwrap(), generate_trace(&other).unwrap());
}
