//! Log-gamma, the regularized incomplete beta function and its inverse,
//! including the very large shapes that claim frequency fits produce.

use claimfreq::specfun::{beta_quantile, ln_beta, ln_gamma, reg_inc_beta, ToleranceConfig};

fn main() -> claimfreq::Result<()> {
    for x in [0.5, 1.5, 10.0, 1234.5] {
        println!("ln Gamma({x}) = {:.15}", ln_gamma(x)?);
    }
    println!("ln B(572, 14007) = {:.10}", ln_beta(572.0, 14007.0)?);

    let (a, b) = (572.0, 14007.0);
    println!("\nBeta({a}, {b}):");
    let tol = ToleranceConfig::default();
    for k in 1..=5 {
        let u = k as f64 / 6.0;
        let x = beta_quantile(u, a, b, tol)?;
        let back = reg_inc_beta(x, a, b)?;
        println!(
            "  Q({u:.4}) = {x:.8}   I_x = {back:.12}   |I_x - u| = {:.1e}",
            (back - u).abs()
        );
    }

    // a looser tolerance needs fewer iterations
    let rough = ToleranceConfig::new(1e-6, 50)?;
    println!(
        "\nmedian of Beta(2.2, 2.6) at 1e-6: {:.6}",
        beta_quantile(0.5, 2.2, 2.6, rough)?
    );
    Ok(())
}
