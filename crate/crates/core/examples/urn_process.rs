//! A two-color Pólya urn settles on a random limit fraction.
//!
//!     cargo run --release --example urn_process

use folksonomy::{urn_converged_fraction, urn_run, UrnState};

fn main() -> folksonomy::Result<()> {
    let init = UrnState::new(vec![1, 1])?;
    let mut finals = Vec::new();
    for seed in 0..200 {
        let traj = urn_run(&init, 10_000, seed)?;
        finals.push(traj.final_state.fractions()[0]);
        if seed < 5 {
            let settled = urn_converged_fraction(&traj, 1000, 0.01)?;
            println!(
                "seed {seed}: final {:.4}, settled within 0.01 over the last 1000 draws: {}",
                finals[seed as usize],
                settled.is_some()
            );
        }
    }
    let n = finals.len() as f64;
    let mean = finals.iter().sum::<f64>() / n;
    let var = finals.iter().map(|f| (f - mean).powi(2)).sum::<f64>() / (n - 1.0);
    println!("over {n} seeds: mean {mean:.4} (uniform limit 0.5), variance {var:.4} (1/12 = 0.0833)");
    Ok(())
}
