//! Empirical affectedness proportions and method-of-moments Beta fits.

use serde::Serialize;

use crate::distributions::BetaParams;
use crate::error::{Error, Result};

/// One observation year: contracts in force and contracts affected by a claim.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PortfolioYear {
    pub year: i32,
    pub contracts: u64,
    pub affected: u64,
}

impl PortfolioYear {
    pub fn new(year: i32, contracts: u64, affected: u64) -> Result<Self> {
        if contracts == 0 {
            return Err(Error::Input(format!(
                "year {year}: contracts must be at least 1"
            )));
        }
        if affected > contracts {
            return Err(Error::Input(format!(
                "year {year}: affected ({affected}) exceeds contracts ({contracts})"
            )));
        }
        Ok(Self {
            year,
            contracts,
            affected,
        })
    }

    /// `A / M`.
    pub fn proportion(&self) -> f64 {
        self.affected as f64 / self.contracts as f64
    }
}

/// Observed proportions with their mean and (n-1)-divisor variance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProportionSample {
    proportions: Vec<f64>,
    mean: f64,
    variance: Option<f64>,
}

impl ProportionSample {
    /// Builds a sample from raw proportions, input order preserved.
    pub fn from_proportions(proportions: Vec<f64>) -> Result<Self> {
        if proportions.is_empty() {
            return Err(Error::Input("empty sample".into()));
        }
        if let Some(bad) = proportions.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::domain("proportions must lie in [0, 1]", *bad));
        }
        let n = proportions.len() as f64;
        if proportions.iter().all(|&p| p == proportions[0]) {
            // summing would leave a rounding residue instead of exactly zero
            let variance = (proportions.len() >= 2).then_some(0.0);
            return Ok(Self {
                mean: proportions[0],
                proportions,
                variance,
            });
        }
        let mean = proportions.iter().sum::<f64>() / n;
        let variance = (proportions.len() >= 2).then(|| {
            proportions
                .iter()
                .map(|p| (p - mean) * (p - mean))
                .sum::<f64>()
                / (n - 1.0)
        });
        Ok(Self {
            proportions,
            mean,
            variance,
        })
    }

    pub fn proportions(&self) -> &[f64] {
        &self.proportions
    }

    pub fn n(&self) -> usize {
        self.proportions.len()
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Sample variance with divisor `n - 1`; `None` for a single observation.
    pub fn variance(&self) -> Option<f64> {
        self.variance
    }

    pub fn sd(&self) -> Option<f64> {
        self.variance.map(f64::sqrt)
    }
}

/// `p̂_i = A_i / M_i` for every year, in input order.
pub fn empirical_proportions(history: &[PortfolioYear]) -> Result<ProportionSample> {
    if history.is_empty() {
        return Err(Error::Input("empty history".into()));
    }
    for y in history {
        // rows built outside `PortfolioYear::new` still have to satisfy it
        PortfolioYear::new(y.year, y.contracts, y.affected)?;
    }
    ProportionSample::from_proportions(history.iter().map(PortfolioYear::proportion).collect())
}

/// Method-of-moments fit:
/// `α̂ = μ(μ - μ² - σ²)/σ²`, `β̂ = α̂(1 - μ)/μ`.
pub fn fit_beta_mom(sample: &ProportionSample) -> Result<BetaParams> {
    let variance = sample.variance().ok_or(Error::SampleTooSmall {
        needed: 2,
        got: sample.n(),
    })?;
    fit_from_moments(sample.mean(), variance)
}

/// The moment equations applied to a given mean and variance.
pub fn fit_from_moments(mean: f64, variance: f64) -> Result<BetaParams> {
    if !(mean > 0.0 && mean < 1.0) {
        return Err(Error::BoundaryMean { mean });
    }
    if variance <= 0.0 {
        return Err(Error::DegenerateSample);
    }
    let bound = mean * (1.0 - mean);
    if variance >= bound {
        return Err(Error::InfeasibleMoments {
            mean,
            variance,
            bound,
        });
    }
    let alpha = mean * (mean - mean * mean - variance) / variance;
    let beta = alpha * (1.0 - mean) / mean;
    if !(alpha > 0.0 && beta > 0.0) {
        // rounding right at the feasibility boundary
        return Err(Error::InfeasibleMoments {
            mean,
            variance,
            bound,
        });
    }
    BetaParams::new(alpha, beta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn tariff(rows: &[(u64, u64)]) -> Vec<PortfolioYear> {
        rows.iter()
            .enumerate()
            .map(|(i, &(m, a))| PortfolioYear::new(2011 + i as i32, m, a).unwrap())
            .collect()
    }

    fn tariff_a() -> Vec<PortfolioYear> {
        tariff(&[
            (8805, 327),
            (12754, 523),
            (16185, 644),
            (20675, 831),
            (26567, 1009),
        ])
    }

    fn pct2(x: f64) -> f64 {
        (x * 10_000.0 + 0.5).floor() / 100.0
    }

    #[test]
    fn tariff_a_proportions() {
        let s = empirical_proportions(&tariff_a()).unwrap();
        let shown: Vec<f64> = s.proportions().iter().map(|&p| pct2(p)).collect();
        assert_eq!(shown, vec![3.71, 4.10, 3.98, 4.02, 3.80]);
        assert_eq!(s.n(), 5);
    }

    #[test]
    fn tariff_c_summary() {
        let s = empirical_proportions(&tariff(&[
            (1094, 42),
            (836, 23),
            (656, 26),
            (523, 13),
            (435, 9),
        ]))
        .unwrap();
        assert_eq!(pct2(s.mean()), 3.02);
        assert_eq!(pct2(s.sd().unwrap()), 0.84);
    }

    #[test]
    fn single_year_has_no_variance() {
        let s = empirical_proportions(&tariff(&[(10, 0)])).unwrap();
        assert_eq!(s.proportions(), &[0.0]);
        assert_eq!(s.variance(), None);
        assert!(matches!(
            fit_beta_mom(&s),
            Err(Error::SampleTooSmall { .. })
        ));
    }

    #[test]
    fn history_errors() {
        assert!(empirical_proportions(&[]).is_err());
        let bad = PortfolioYear {
            year: 2011,
            contracts: 0,
            affected: 0,
        };
        assert!(empirical_proportions(&[bad]).is_err());
        assert!(PortfolioYear::new(2011, 10, 11).is_err());
    }

    #[test]
    fn fit_tariffs_a_and_b() {
        let p = fit_beta_mom(&empirical_proportions(&tariff_a()).unwrap()).unwrap();
        assert_eq!((p.alpha().round(), p.beta().round()), (572.0, 14007.0));
        let b = tariff(&[(4276, 149), (3387, 131), (2723, 75), (2177, 71), (1767, 44)]);
        let p = fit_beta_mom(&empirical_proportions(&b).unwrap()).unwrap();
        assert_eq!((p.alpha().round(), p.beta().round()), (32.0, 967.0));
    }

    #[test]
    fn uniform_moments_give_unit_shapes() {
        let p = fit_from_moments(0.5, 1.0 / 12.0).unwrap();
        assert_relative_eq!(p.alpha(), 1.0, max_relative = 1e-12);
        assert_relative_eq!(p.beta(), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn fit_errors_name_the_violation() {
        assert_eq!(fit_from_moments(0.3, 0.0), Err(Error::DegenerateSample));
        assert!(matches!(
            fit_from_moments(0.5, 0.25),
            Err(Error::InfeasibleMoments { .. })
        ));
        assert!(matches!(
            fit_from_moments(0.0, 0.01),
            Err(Error::BoundaryMean { .. })
        ));
        assert!(matches!(
            fit_from_moments(1.0, 0.01),
            Err(Error::BoundaryMean { .. })
        ));
        let flat = ProportionSample::from_proportions(vec![0.04, 0.04]).unwrap();
        assert_eq!(fit_beta_mom(&flat), Err(Error::DegenerateSample));
        let flat = empirical_proportions(&tariff(&[(100, 5), (200, 10), (300, 15)])).unwrap();
        assert_eq!((flat.mean(), flat.variance()), (0.05, Some(0.0)));
    }

    #[test]
    fn zero_claim_year_is_allowed() {
        let s = empirical_proportions(&tariff(&[(100, 0), (100, 5), (100, 3)])).unwrap();
        assert_eq!(s.proportions()[0], 0.0);
        assert!(fit_beta_mom(&s).is_ok());
    }

    #[test]
    fn fitted_mean_equals_sample_mean() {
        let s = empirical_proportions(&tariff_a()).unwrap();
        let p = fit_beta_mom(&s).unwrap();
        let m = p.alpha() / (p.alpha() + p.beta());
        assert!((m - s.mean()).abs() <= 1e-12);
    }

    #[test]
    fn alpha_vanishes_towards_the_feasibility_bound() {
        let mean = 0.2;
        let bound = mean * (1.0 - mean);
        let mut last = f64::INFINITY;
        for frac in [0.5, 0.9, 0.99, 0.999999] {
            let a = fit_from_moments(mean, frac * bound).unwrap().alpha();
            assert!(a < last && a > 0.0);
            last = a;
        }
        assert!(fit_from_moments(mean, bound).is_err());
    }
}
