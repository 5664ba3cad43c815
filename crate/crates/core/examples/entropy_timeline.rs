//! Item-popularity entropy of a growing trace.
//!
//!     cargo run --example entropy_timeline [trace.tsv] [interval_seconds]

use folksonomy::entropy::{write_timeline_csv, PopularityDistribution};
use folksonomy::{entropy, entropy_timeline, item_popularity, read_community, ParseMode, PopularityMode};

fn main() -> folksonomy::Result<()> {
    let mut args = std::env::args().skip(1);
    let path = args
        .next()
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/urn_default_seed42.tsv").into());
    let interval: u64 = args.next().map_or(3600, |s| s.parse().expect("interval in seconds"));

    let uniform = PopularityDistribution::from_counts([5, 5, 5, 5]);
    let skewed = PopularityDistribution::from_counts([2, 1, 1]);
    println!(
        "uniform over 4: {} bits, {{2,1,1}}: {} bits",
        entropy(&uniform, 2.0)?,
        entropy(&skewed, 2.0)?
    );

    let c = read_community(&path, ParseMode::Strict)?;
    let whole = item_popularity(&c, None, PopularityMode::DistinctUsers)?;
    println!(
        "whole trace: {:.4} bits over {} items",
        entropy(&whole, 2.0)?,
        whole.num_items()
    );

    let points = entropy_timeline(&c, interval, 2.0, PopularityMode::DistinctUsers)?;
    write_timeline_csv(std::io::stdout().lock(), &points).expect("stdout");
    Ok(())
}
