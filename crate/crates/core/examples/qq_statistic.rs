//! The Q-Q correlation statistic T_n = -ln(1 - rho) for one tariff.

use claimfreq::estimation::{empirical_proportions, fit_beta_mom, PortfolioYear};
use claimfreq::gof::compute_tn;

fn main() -> claimfreq::Result<()> {
    let history = [
        PortfolioYear::new(2011, 21984, 695)?,
        PortfolioYear::new(2012, 24250, 870)?,
        PortfolioYear::new(2013, 26378, 921)?,
        PortfolioYear::new(2014, 29306, 1102)?,
        PortfolioYear::new(2015, 33751, 1192)?,
    ];
    let sample = empirical_proportions(&history)?;
    let fit = fit_beta_mom(&sample)?;
    let qq = compute_tn(&sample, fit)?;
    println!("  k   fitted quantile   observed");
    for (k, (q, o)) in qq.quantiles.iter().zip(&qq.sorted_obs).enumerate() {
        println!("  {}   {:.6}          {:.6}", k + 1, q, o);
    }
    println!("rho = {:.6}, T_n = {:.3}", qq.rho, qq.tn);
    Ok(())
}
