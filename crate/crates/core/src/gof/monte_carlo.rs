use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{compute_tn, qq_against, qq_quantiles, QQResult};
use crate::distributions::{BetaParams, RngSeed};
use crate::error::{Error, Result};
use crate::estimation::{fit_beta_mom, ProportionSample};

pub const DEFAULT_REPLICATES: usize = 10_000;
pub const MIN_REPLICATES: usize = 100;

/// How replicate statistics are computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum McMode {
    /// Refit `(α, β)` on every simulated sample (parametric bootstrap).
    #[default]
    ReEstimate,
    /// Compare every simulated sample with the quantiles of the original fit.
    FixedParams,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McConfig {
    pub replicates: usize,
    pub seed: RngSeed,
    pub mode: McMode,
}

impl McConfig {
    pub fn new(replicates: usize, seed: RngSeed) -> Self {
        Self {
            replicates,
            seed,
            mode: McMode::ReEstimate,
        }
    }

    pub fn with_mode(mut self, mode: McMode) -> Self {
        self.mode = mode;
        self
    }
}

/// Five-number summary of the simulated statistics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TnSummary {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McTestResult {
    pub fitted: BetaParams,
    pub qq: QQResult,
    pub tn_observed: f64,
    pub replicates: usize,
    pub seed: RngSeed,
    pub mode: McMode,
    /// `(1 + #{T_r <= T_obs}) / (N + 1)`.
    pub p_value: f64,
    /// Simulated samples discarded for infeasible or degenerate moments.
    pub redraws: u64,
    pub tn_simulated_summary: TnSummary,
    /// One statistic per replicate, in replicate order.
    #[serde(skip)]
    pub tn_simulated: Vec<f64>,
}

/// Monte-Carlo test of the Beta hypothesis for `sample`.
///
/// Replicate `r` draws from `config.seed.substream(r)`, so the outcome does
/// not depend on how replicates are scheduled across threads. A simulated
/// sample whose moments admit no Beta fit (or that is constant) is redrawn
/// from the same stream; at most `10 N` redraws are allowed in total.
pub fn mc_test(sample: &ProportionSample, config: &McConfig) -> Result<McTestResult> {
    let n_rep = config.replicates;
    if n_rep < MIN_REPLICATES {
        return Err(Error::Input(format!(
            "at least {MIN_REPLICATES} replicates required, got {n_rep}"
        )));
    }
    let fitted = fit_beta_mom(sample)?;
    let qq = compute_tn(sample, fitted)?;
    let tn_observed = qq.tn;
    let n = sample.n();
    let redraw_limit = 10 * n_rep as u64;
    let fixed_quantiles = match config.mode {
        McMode::FixedParams => Some(qq.quantiles.clone()),
        McMode::ReEstimate => None,
    };

    let outcomes: Vec<(f64, u64)> = (0..n_rep as u64)
        .into_par_iter()
        .map(|r| {
            replicate(
                fitted,
                n,
                config.seed.substream(r),
                fixed_quantiles.as_deref(),
                redraw_limit,
            )
        })
        .collect::<Result<_>>()?;

    let redraws: u64 = outcomes.iter().map(|o| o.1).sum();
    if redraws > redraw_limit {
        return Err(Error::Simulation {
            redraws,
            limit: redraw_limit,
        });
    }
    let tn_simulated: Vec<f64> = outcomes.into_iter().map(|o| o.0).collect();
    let p_value = lower_tail_p_value(&tn_simulated, tn_observed);

    Ok(McTestResult {
        fitted,
        qq,
        tn_observed,
        replicates: n_rep,
        seed: config.seed,
        mode: config.mode,
        p_value,
        redraws,
        tn_simulated_summary: summarize(&tn_simulated),
        tn_simulated,
    })
}

fn replicate(
    fitted: BetaParams,
    n: usize,
    seed: RngSeed,
    fixed_quantiles: Option<&[f64]>,
    redraw_limit: u64,
) -> Result<(f64, u64)> {
    let mut rng = seed.rng();
    let mut redraws = 0u64;
    loop {
        let draws: Vec<f64> = (0..n).map(|_| rng.beta(fitted)).collect();
        let attempt = match fixed_quantiles {
            Some(q) => qq_against(&draws, q.to_vec()),
            None => ProportionSample::from_proportions(draws.clone())
                .and_then(|s| fit_beta_mom(&s))
                .and_then(|p| qq_against(&draws, qq_quantiles(p, n)?)),
        };
        match attempt {
            Ok(qq) => return Ok((qq.tn, redraws)),
            Err(
                Error::DegenerateSample
                | Error::InfeasibleMoments { .. }
                | Error::BoundaryMean { .. }
                | Error::UndefinedCorrelation,
            ) => {
                redraws += 1;
                if redraws > redraw_limit {
                    return Err(Error::Simulation {
                        redraws,
                        limit: redraw_limit,
                    });
                }
            }
            Err(e) => return Err(e),
        }
    }
}

/// `(1 + #{t <= observed}) / (N + 1)`; an infinite observation gives 1.
pub fn lower_tail_p_value(simulated: &[f64], observed: f64) -> f64 {
    let at_most = simulated.iter().filter(|&&t| t <= observed).count();
    (1 + at_most) as f64 / (simulated.len() + 1) as f64
}

fn summarize(values: &[f64]) -> TnSummary {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let at = |prob: f64| {
        // linear interpolation between order statistics (Hyndman–Fan type 7)
        let h = (sorted.len() - 1) as f64 * prob;
        let lo = h.floor() as usize;
        let hi = h.ceil() as usize;
        if lo == hi || sorted[lo] == sorted[hi] {
            sorted[lo]
        } else {
            sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
        }
    };
    TnSummary {
        min: sorted[0],
        q1: at(0.25),
        median: at(0.5),
        q3: at(0.75),
        max: sorted[sorted.len() - 1],
    }
}
