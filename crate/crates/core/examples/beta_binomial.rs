//! Beta-Binomial count of affected contracts: pmf, moments and the
//! overdispersion relative to a plain Binomial count.

use claimfreq::distributions::{
    beta_binomial_moments, beta_binomial_pmf, beta_moments, binomial_conditional_moments,
    proportion_variance_inflation, sample_beta_binomial, BetaBinomialParams, BetaParams, RngSeed,
};

fn main() -> claimfreq::Result<()> {
    let small = BetaBinomialParams::new(10, BetaParams::new(2.2, 2.6)?)?;
    println!("M = 10, alpha = 2.2, beta = 2.6");
    for k in 0..=10 {
        let p = beta_binomial_pmf(k, small);
        println!(
            "  P(A = {k:2}) = {p:.6} {}",
            "#".repeat((p * 200.0) as usize)
        );
    }

    // tariff A's fit applied to its first year
    let params = BetaParams::new(572.0, 14007.0)?;
    let bb = BetaBinomialParams::new(8805, params)?;
    let m = beta_binomial_moments(bb);
    let xi = beta_moments(params);
    let binom = binomial_conditional_moments(8805, xi.mean)?;
    println!("\nM = 8805 contracts, Beta(572, 14007) proportion");
    println!("  mean count           {:.2}", m.mean);
    println!("  Beta-Binomial sd     {:.2}", m.variance.sqrt());
    println!("  Binomial sd          {:.2}", binom.variance.sqrt());
    println!(
        "  proportion variance inflation 1 + (alpha+beta)/M = {:.3}",
        proportion_variance_inflation(bb)
    );

    let draws = sample_beta_binomial(bb, RngSeed::new(2024, 0), 10);
    println!("  ten simulated years: {draws:?}");
    Ok(())
}
