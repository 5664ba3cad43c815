//! Build interest graphs and sweep the similarity threshold.
//!
//!     cargo run --release --example interest_graph_sweep [trace.tsv]

use folksonomy::components::{largest_component, write_sweep_csv};
use folksonomy::{
    build_graph, component_summary, read_community, threshold_sweep, ParseMode, SimilarityKind, Threshold,
};

fn main() -> folksonomy::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/urn_default_seed42.tsv").into());
    let c = read_community(&path, ParseMode::Strict)?;

    let t: Threshold = "0.1".parse()?;
    for kind in SimilarityKind::ALL {
        let g = build_graph(&c, kind, t)?;
        let s = component_summary(&g);
        println!(
            "{kind} at {t}: {} edges, {} components, {} isolated, largest {} (first member {})",
            g.edge_count(),
            s.components_excluding_isolated,
            s.isolated_count,
            s.largest_component_size,
            largest_component(&g)
                .first()
                .map_or("-".into(), |&u| c.labels().user_label(u)),
        );
    }

    let ladder = Threshold::ladder("0.01".parse()?, "0.99".parse()?, "0.01".parse()?)?;
    for kind in [SimilarityKind::UserItem, SimilarityKind::UserTag] {
        println!("\n{kind}");
        let rows = threshold_sweep(&c, kind, &ladder)?;
        // print every tenth row
        let every_tenth: Vec<_> = rows.iter().step_by(10).copied().collect();
        write_sweep_csv(std::io::stdout().lock(), &every_tenth).expect("stdout");
    }
    Ok(())
}
