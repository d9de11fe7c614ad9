//! Density overlay and Q-Q figure written as SVG plus CSV sidecars.
//!
//! `cargo run --example figures [output-dir]`, default `figures/`.

use std::path::{Path, PathBuf};

use claimfreq::distributions::BetaParams;
use claimfreq::estimation::{empirical_proportions, fit_beta_mom};
use claimfreq::gof::compute_tn;
use claimfreq::plot::{density_figure, qq_figure, Figure};
use claimfreq::portfolio::{parse_portfolio_csv, Locale};

fn save(dir: &Path, stem: &str, fig: &Figure) -> std::io::Result<()> {
    std::fs::write(dir.join(format!("{stem}.svg")), fig.to_svg())?;
    std::fs::write(dir.join(format!("{stem}.csv")), fig.to_csv())?;
    println!("wrote {}/{stem}.svg and .csv", dir.display());
    Ok(())
}

fn main() -> claimfreq::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "figures".into()));
    std::fs::create_dir_all(&dir)?;

    let shapes = [(1.2, 1.6), (2.2, 2.6), (12.0, 2.6), (12.0, 55.0)];
    let curves = shapes
        .iter()
        .map(|&(a, b)| Ok((format!("alpha = {a}, beta = {b}"), BetaParams::new(a, b)?)))
        .collect::<claimfreq::Result<Vec<_>>>()?;
    save(&dir, "beta_shapes", &density_figure(&curves, 400)?)?;

    let histories = parse_portfolio_csv(include_str!("../data/table1.csv"), Locale::En)?;
    let a = &histories[0];
    let sample = empirical_proportions(&a.years)?;
    let qq = compute_tn(&sample, fit_beta_mom(&sample)?)?;
    let fig = qq_figure(&a.tariff_id, &qq, None, Locale::De);
    save(&dir, "qq_tariff_a", &fig)?;

    // the sidecar alone is enough to redraw the figure
    let csv = std::fs::read_to_string(dir.join("qq_tariff_a.csv"))?;
    assert_eq!(Figure::from_csv(&csv)?.to_svg(), fig.to_svg());
    Ok(())
}
