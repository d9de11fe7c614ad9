//! Claim frequency modelling with Beta-distributed affectedness proportions.
//!
//! The fraction of contracts in a portfolio that are hit by a claim in a
//! given year is modelled as a Beta(α, β) variable ξ. Given ξ = p, the number
//! of affected contracts out of M is Binomial(M, p), so the unconditional count
//! is Beta-Binomial. The crate covers the full workflow:
//!
//! - [`specfun`]: log-gamma, log-beta, the regularized incomplete beta function
//!   and its inverse.
//! - [`distributions`]: Beta and Beta-Binomial laws, moments and seeded samplers.
//! - [`estimation`]: empirical proportions and method-of-moments Beta fits.
//! - [`gof`]: Q-Q correlation statistic `T = -ln(1 - ρ)` and its Monte-Carlo test.
//! - [`portfolio`]: CSV ingestion and per-tariff reports.
//! - [`plot`]: SVG figures with CSV sidecars.
//! - [`cli`]: the `fit`, `gof` and `plot` commands behind the `claimfreq` binary.
//!
//! ```
//! use claimfreq::estimation::{empirical_proportions, fit_beta_mom, PortfolioYear};
//! use claimfreq::gof::compute_tn;
//!
//! let history = [
//!     PortfolioYear::new(2011, 8805, 327).unwrap(),
//!     PortfolioYear::new(2012, 12754, 523).unwrap(),
//!     PortfolioYear::new(2013, 16185, 644).unwrap(),
//!     PortfolioYear::new(2014, 20675, 831).unwrap(),
//!     PortfolioYear::new(2015, 26567, 1009).unwrap(),
//! ];
//! let sample = empirical_proportions(&history).unwrap();
//! let params = fit_beta_mom(&sample).unwrap();
//! assert_eq!(params.alpha().round(), 572.0);
//! let qq = compute_tn(&sample, params).unwrap();
//! assert!((qq.tn - 3.663).abs() < 5e-4);
//! ```

pub mod cli;
pub mod distributions;
mod error;
pub mod estimation;
pub mod gof;
pub mod plot;
pub mod portfolio;
pub mod specfun;

pub use error::{Error, Result};
