//! Generate a synthetic trace and write it as TSV.
//!
//!     cargo run --example generate_trace [seed] > trace.tsv

use folksonomy::ingest::write_trace;
use folksonomy::urn::generate_records;
use folksonomy::SyntheticTraceConfig;

fn main() -> folksonomy::Result<()> {
    let seed = std::env::args().nth(1).map_or(42, |s| s.parse().expect("seed"));
    let cfg = SyntheticTraceConfig {
        seed,
        ..SyntheticTraceConfig::default()
    };
    let budget = cfg.activity_budget()?;
    eprintln!(
        "{} users, budgets {}..={} assignments, {} in total",
        cfg.num_users,
        budget.iter().min().unwrap(),
        budget.iter().max().unwrap(),
        budget.iter().sum::<usize>()
    );
    let records = generate_records(&cfg)?;
    write_trace(std::io::stdout().lock(), &records).expect("stdout");
    Ok(())
}
