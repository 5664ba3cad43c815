//! How often a user's next item is already held by a neighbor.
//!
//!     cargo run --release --example hit_ratio [trace.tsv]

use folksonomy::{hit_ratio, read_community, ParseMode, SimilarityKind};

fn main() -> folksonomy::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/urn_default_seed42.tsv").into());
    let c = read_community(&path, ParseMode::Strict)?;

    for kind in SimilarityKind::ALL {
        for granularity in [600, 3600, 6 * 3600, 86_400] {
            let r = hit_ratio(&c, kind, "0.01".parse()?, granularity)?;
            let ratio = r.hit_ratio.map_or("n/a".into(), |h| format!("{h:.4}"));
            println!(
                "{kind:<20} {granularity:>6}s: {ratio} ({} of {} adds over {} windows)",
                r.hits_total, r.adds_total, r.windows_evaluated
            );
        }
    }
    Ok(())
}
