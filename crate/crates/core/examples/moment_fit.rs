//! Method-of-moments Beta fit for one tariff, and what happens with
//! samples that admit no fit.

use claimfreq::estimation::{empirical_proportions, fit_beta_mom, fit_from_moments, PortfolioYear};

fn main() -> claimfreq::Result<()> {
    let history = [
        PortfolioYear::new(2011, 4276, 149)?,
        PortfolioYear::new(2012, 3387, 131)?,
        PortfolioYear::new(2013, 2723, 75)?,
        PortfolioYear::new(2014, 2177, 71)?,
        PortfolioYear::new(2015, 1767, 44)?,
    ];
    let sample = empirical_proportions(&history)?;
    for (y, p) in history.iter().zip(sample.proportions()) {
        println!(
            "{}: {:>5} of {:>5} contracts affected, p = {:.4}",
            y.year, y.affected, y.contracts, p
        );
    }
    let fit = fit_beta_mom(&sample)?;
    println!(
        "mean {:.4}, sd {:.4} -> alpha = {:.4}, beta = {:.4}",
        sample.mean(),
        sample.sd().unwrap_or(0.0),
        fit.alpha(),
        fit.beta()
    );
    if let Some(mode) = fit.mode() {
        println!("most likely proportion {:.4}", mode);
    }

    println!("\nsamples without a Beta fit:");
    for (mean, var) in [(0.3, 0.0), (0.5, 0.3), (0.0, 0.01)] {
        match fit_from_moments(mean, var) {
            Ok(p) => println!("  mean {mean}, variance {var}: {p:?}"),
            Err(e) => println!("  mean {mean}, variance {var}: {e}"),
        }
    }
    Ok(())
}
