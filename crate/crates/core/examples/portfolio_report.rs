//! Full portfolio analysis from a CSV file: fit table and test results.
//!
//! `cargo run --release --example portfolio_report [path.csv]` (defaults to
//! the bundled four-tariff table).

use claimfreq::gof::McMode;
use claimfreq::portfolio::{analyze_portfolio, parse_portfolio_csv, Locale};

const BUNDLED: &str = include_str!("../data/table1.csv");

fn main() -> claimfreq::Result<()> {
    let text = match std::env::args().nth(1) {
        Some(path) => std::fs::read_to_string(path)?,
        None => BUNDLED.to_string(),
    };
    let histories = parse_portfolio_csv(&text, Locale::En)?;
    println!("tariff  years   mean%    sd%   alpha    beta     T_n   p-value");
    for r in analyze_portfolio(&histories, 10_000, 42, McMode::ReEstimate) {
        match r {
            Ok(t) => println!(
                "{:<6} {:>6} {:>7.2} {:>6.2} {:>7} {:>7} {:>7.3} {:>8.2}%",
                t.fit.tariff,
                t.fit.inputs.len(),
                t.fit.mean_pct,
                t.fit.sd_pct,
                t.fit.alpha_display,
                t.fit.beta_display,
                t.tn,
                100.0 * t.p_value
            ),
            Err(e) => println!("{e}"),
        }
    }
    Ok(())
}
