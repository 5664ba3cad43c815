//! Load a trace and walk the six indexes of the community.
//!
//!     cargo run --example community [trace.tsv]

use folksonomy::{read_community, ParseMode};

fn main() -> folksonomy::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/urn_default_seed42.tsv").into());
    let c = read_community(&path, ParseMode::Strict)?;
    let s = c.summary();
    println!(
        "{} users, {} items, {} tags, {} assignments",
        s.num_users, s.num_items, s.num_tags, s.num_assignments
    );

    let labels = c.labels();
    let u = c.users()[0];
    let (items, tags) = c.user_view(u)?;
    println!(
        "{} holds {} items under {} tags",
        labels.user_label(u),
        items.len(),
        tags.len()
    );

    let i = items[0];
    let (holders, item_tags) = c.item_view(i);
    println!(
        "{} is held by {} users and carries {} tags",
        labels.item_label(i),
        holders.len(),
        item_tags.len()
    );

    let t = item_tags[0];
    let (taggers, tagged) = c.tag_view(t);
    println!(
        "{} was used by {} users on {} items",
        labels.tag_label(t),
        taggers.len(),
        tagged.len()
    );

    if let (Some(first), Some(last)) = (c.first_timestamp(), c.last_timestamp()) {
        let mid = first + (last - first) / 2;
        println!(
            "{} assignments by the midpoint {mid}",
            c.prefix(mid).summary().num_assignments
        );
    }
    Ok(())
}
