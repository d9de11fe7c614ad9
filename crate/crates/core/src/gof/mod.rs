//! Q-Q correlation statistic and its Monte-Carlo significance test.
//!
//! The ordered observations are paired with Beta quantiles at the plotting
//! positions `k/(n+1)`; `ρ` is their Pearson correlation and the statistic is
//! `T = -ln(1 - ρ)`. Large `T` means the points sit close to a straight line,
//! so the test rejects in the lower tail.

mod monte_carlo;

pub use monte_carlo::{
    lower_tail_p_value, mc_test, McConfig, McMode, McTestResult, TnSummary, DEFAULT_REPLICATES,
    MIN_REPLICATES,
};

use serde::Serialize;

use crate::distributions::BetaParams;
use crate::error::{Error, Result};
use crate::estimation::ProportionSample;
use crate::specfun::{beta_quantile, ToleranceConfig};

/// Smallest sample for which the statistic is computed.
pub const MIN_QQ_SAMPLE: usize = 3;

/// Result of pairing a sample with its fitted quantiles.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QQResult {
    pub sorted_obs: Vec<f64>,
    pub quantiles: Vec<f64>,
    pub rho: f64,
    /// `-ln(1 - ρ)`; `+∞` (serialized as `null`) when `ρ = 1`.
    pub tn: f64,
    /// Set when `ρ` is exactly one and `tn` is the infinity sentinel.
    pub perfect_fit: bool,
}

/// `Q(k/(n+1); α, β)` for `k = 1..=n`.
pub fn qq_quantiles(p: BetaParams, n: usize) -> Result<Vec<f64>> {
    qq_quantiles_with(p, n, ToleranceConfig::default())
}

pub fn qq_quantiles_with(p: BetaParams, n: usize, tol: ToleranceConfig) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::SampleTooSmall { needed: 1, got: 0 });
    }
    let denom = (n + 1) as f64;
    (1..=n)
        .map(|k| beta_quantile(k as f64 / denom, p.alpha(), p.beta(), tol))
        .collect()
}

/// Pearson correlation of two equally long sequences.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::Input(format!(
            "correlation of sequences with lengths {} and {}",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 2 {
        return Err(Error::SampleTooSmall {
            needed: 2,
            got: x.len(),
        });
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::UndefinedCorrelation);
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// `-ln(1 - ρ)`, with `+∞` for `ρ = 1`.
pub fn tn_from_rho(rho: f64) -> f64 {
    if rho >= 1.0 {
        f64::INFINITY
    } else {
        -(-rho).ln_1p()
    }
}

/// Q-Q statistic of `sample` against the Beta law `p`.
pub fn compute_tn(sample: &ProportionSample, p: BetaParams) -> Result<QQResult> {
    let quantiles = qq_quantiles(p, sample.n().max(1))?;
    qq_against(sample.proportions(), quantiles)
}

pub(crate) fn qq_against(obs: &[f64], quantiles: Vec<f64>) -> Result<QQResult> {
    if obs.len() < MIN_QQ_SAMPLE {
        return Err(Error::SampleTooSmall {
            needed: MIN_QQ_SAMPLE,
            got: obs.len(),
        });
    }
    if let Some(bad) = obs.iter().find(|v| !v.is_finite()) {
        return Err(Error::domain("observations must be finite", *bad));
    }
    let mut sorted_obs = obs.to_vec();
    sorted_obs.sort_by(f64::total_cmp);
    let rho = pearson(&sorted_obs, &quantiles)?;
    let tn = tn_from_rho(rho);
    Ok(QQResult {
        sorted_obs,
        quantiles,
        rho,
        tn,
        perfect_fit: tn.is_infinite(),
    })
}

#[cfg(test)]
#[allow(clippy::excessive_precision, clippy::inconsistent_digit_grouping)]
mod tests {
    use super::*;
    use crate::estimation::{empirical_proportions, fit_beta_mom, PortfolioYear};

    fn bp(a: f64, b: f64) -> BetaParams {
        BetaParams::new(a, b).unwrap()
    }

    #[test]
    fn uniform_quantiles() {
        let q = qq_quantiles(bp(1.0, 1.0), 4).unwrap();
        for (got, want) in q.iter().zip([0.2, 0.4, 0.6, 0.8]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn square_root_quantiles() {
        let q = qq_quantiles(bp(2.0, 1.0), 3).unwrap();
        for (got, want) in q
            .iter()
            .zip([0.25f64.sqrt(), 0.5f64.sqrt(), 0.75f64.sqrt()])
        {
            assert!((got - want).abs() < 1e-11);
        }
    }

    #[test]
    fn tariff_a_quantiles_straddle_the_mean() {
        let q = qq_quantiles(bp(572.0, 14007.0), 5).unwrap();
        assert!(q.windows(2).all(|w| w[0] < w[1]));
        assert!(q[0] < 0.0392 && q[4] > 0.0392);
    }

    #[test]
    fn tariff_a_statistic() {
        let rows = [
            (8805, 327),
            (12754, 523),
            (16185, 644),
            (20675, 831),
            (26567, 1009),
        ];
        let years: Vec<_> = rows
            .iter()
            .enumerate()
            .map(|(i, &(m, a))| PortfolioYear::new(2011 + i as i32, m, a).unwrap())
            .collect();
        let s = empirical_proportions(&years).unwrap();
        let qq = compute_tn(&s, fit_beta_mom(&s).unwrap()).unwrap();
        // 50-digit reference
        assert!(
            (qq.tn - 3.663_197_214_609_183_641_1).abs() < 1e-9,
            "{}",
            qq.tn
        );
        assert!((qq.tn - 3.663).abs() < 0.005);
    }

    #[test]
    fn perfect_fit_gives_infinity_sentinel() {
        let q = qq_quantiles(bp(2.0, 5.0), 5).unwrap();
        let s = ProportionSample::from_proportions(q.iter().rev().copied().collect()).unwrap();
        let r = compute_tn(&s, bp(2.0, 5.0)).unwrap();
        assert_eq!(r.rho, 1.0);
        assert!(r.perfect_fit);
        assert_eq!(r.tn, f64::INFINITY);
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains("\"tn\":null"));
    }

    #[test]
    fn zero_correlation_gives_zero_statistic() {
        // compute_tn sorts its input, so exercise the correlation directly
        assert_eq!(tn_from_rho(0.0), 0.0);
        let r = pearson(&[1.0, 2.0, 2.0, 1.0], &[0.2, 0.4, 0.6, 0.8]).unwrap();
        assert!(r.abs() < 1e-15);
        assert!(tn_from_rho(r).abs() < 1e-15);
    }

    #[test]
    fn constant_sample_is_rejected() {
        let s = ProportionSample::from_proportions(vec![0.03; 5]).unwrap();
        assert_eq!(
            compute_tn(&s, bp(2.0, 50.0)),
            Err(Error::UndefinedCorrelation)
        );
    }

    #[test]
    fn too_small_sample_is_rejected() {
        let s = ProportionSample::from_proportions(vec![0.03, 0.04]).unwrap();
        assert!(matches!(
            compute_tn(&s, bp(2.0, 50.0)),
            Err(Error::SampleTooSmall { .. })
        ));
    }

    #[test]
    fn statistic_is_monotone_in_rho() {
        let grid: Vec<f64> = (-99..100).map(|i| i as f64 / 100.0).collect();
        for w in grid.windows(2) {
            assert!(tn_from_rho(w[0]) < tn_from_rho(w[1]));
        }
        assert!(tn_from_rho(-0.5) < 0.0 && tn_from_rho(0.5) > 0.0);
    }
}
