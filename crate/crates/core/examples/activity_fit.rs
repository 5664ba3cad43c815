//! Rank distributions of user activity and their Hoerl fits.
//!
//!     cargo run --example activity_fit [trace.tsv]

use folksonomy::activity::user_metric;
use folksonomy::{
    correlation_r2, eval_hoerl, fit_hoerl, fit_hoerl_points, rank_distribution, read_community, ActivityMetric,
    HoerlParams, ParseMode,
};

fn main() -> folksonomy::Result<()> {
    // A noiseless curve refits to its own parameters.
    let truth = HoerlParams::new(9767.13, 0.9979, -0.4754)?;
    let xs: Vec<f64> = (1..=1000).map(f64::from).collect();
    let ys: Vec<f64> = xs.iter().map(|&x| eval_hoerl(&truth, x)).collect::<Result<_, _>>()?;
    let fit = fit_hoerl_points(&xs, &ys)?;
    println!("synthetic curve: {:?} r2_log={:.6}", fit.params, fit.r2_log);

    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/urn_default_seed42.tsv").into());
    let c = read_community(&path, ParseMode::Strict)?;
    for metric in ActivityMetric::ALL {
        let dist = rank_distribution(&c, metric)?;
        let head: Vec<u64> = dist.points.iter().take(5).map(|p| p.value).collect();
        match fit_hoerl(&dist) {
            Ok(f) => println!(
                "{metric}: top {head:?}, fit a={:.3} b={:.5} c={:.4} r2_log={:.4}",
                f.params.a, f.params.b, f.params.c, f.r2_log
            ),
            Err(e) => println!("{metric}: top {head:?}, no fit ({e})"),
        }
    }

    let lib: Vec<f64> = user_metric(&c, ActivityMetric::LibrarySize)
        .iter()
        .map(|&(_, v)| v as f64)
        .collect();
    let voc: Vec<f64> = user_metric(&c, ActivityMetric::VocabularySize)
        .iter()
        .map(|&(_, v)| v as f64)
        .collect();
    println!("library vs vocabulary r2 = {:.4}", correlation_r2(&lib, &voc)?);
    Ok(())
}
