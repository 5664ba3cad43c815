//! Neighborhood entropy against the component and random baselines.
//!
//!     cargo run --release --example neighborhood_entropy [trace.tsv]

use folksonomy::entropy::write_neighborhood_csv;
use folksonomy::{
    average_neighborhood_entropy, build_graph, read_community, NeighborhoodMode, ParseMode, SimilarityKind,
};

fn main() -> folksonomy::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/urn_default_seed42.tsv").into());
    let c = read_community(&path, ParseMode::Strict)?;

    let mut reports = Vec::new();
    for t in ["0.02", "0.05", "0.1"] {
        let g = build_graph(&c, SimilarityKind::UserItem, t.parse()?)?;
        for mode in NeighborhoodMode::ALL {
            reports.push(average_neighborhood_entropy(&c, &g, mode, 30, 7, 2.0)?);
        }
    }
    write_neighborhood_csv(std::io::stdout().lock(), &reports).expect("stdout");
    Ok(())
}
