//! Apply the cleaning rules to a small hand-made trace and print the report.
//!
//!     cargo run --example clean_trace

use folksonomy::ingest::{clean_records, intern_records, parse_str, write_trace, CleaningConfig, ParseMode};
use folksonomy::Community;

fn main() -> folksonomy::Result<()> {
    let mut text = String::from(
        "# user\titem\ttag\ttimestamp\n\
         alice\tpaper1\tgraphs\t1000\n\
         alice\tpaper2\tentropy\t1100\n\
         bob\tpaper1\tno-tag\t1200\n\
         bob\tpaper3\tbibtex-import\t1300\n\
         carol\tpaper2\tentropy\t50\n\
         carol\tpaper4\turns\t1400\n",
    );
    // a robot posting five records within four seconds
    for k in 0..5 {
        text.push_str(&format!("bot\tspam{k}\tbuy\t{}\n", 2000 + k));
    }

    let parsed = parse_str(&text, ParseMode::Strict)?;
    let config = CleaningConfig {
        burst_count: 5,
        burst_window: 10,
        min_timestamp: Some(100),
        ..CleaningConfig::default()
    };
    let (kept, report) = clean_records(&parsed.records, &config)?;
    println!("{report:#?}");

    let (assignments, labels) = intern_records(&kept);
    let c = Community::with_labels(assignments, labels);
    let users: Vec<_> = c.users().iter().map(|&u| c.labels().user_label(u)).collect();
    println!("kept users: {}", users.join(", "));
    write_trace(std::io::stdout().lock(), &kept).expect("stdout");
    Ok(())
}
