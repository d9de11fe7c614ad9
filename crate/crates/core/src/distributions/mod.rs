//! The Beta law of the affectedness proportion and the Beta-Binomial law of
//! the yearly number of affected contracts.

mod sampling;

pub use sampling::{sample_beta, sample_beta_binomial, RngSeed, StreamRng};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun;

/// Shape parameters `(α, β)` of a Beta distribution, both strictly positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBetaParams")]
pub struct BetaParams {
    alpha: f64,
    beta: f64,
}

#[derive(Deserialize)]
struct RawBetaParams {
    alpha: f64,
    beta: f64,
}

impl TryFrom<RawBetaParams> for BetaParams {
    type Error = Error;

    fn try_from(raw: RawBetaParams) -> Result<Self> {
        BetaParams::new(raw.alpha, raw.beta)
    }
}

impl BetaParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::domain("alpha must be positive and finite", alpha));
        }
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::domain("beta must be positive and finite", beta));
        }
        Ok(Self { alpha, beta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Mode `(α-1)/(α+β-2)`, defined for `α, β > 1`.
    pub fn mode(&self) -> Option<f64> {
        (self.alpha > 1.0 && self.beta > 1.0)
            .then(|| (self.alpha - 1.0) / (self.alpha + self.beta - 2.0))
    }
}

/// Mean and variance pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Moments {
    pub mean: f64,
    pub variance: f64,
}

/// Number of contracts `M` together with the Beta mixing law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BetaBinomialParams {
    m: u64,
    params: BetaParams,
}

impl BetaBinomialParams {
    pub fn new(m: u64, params: BetaParams) -> Result<Self> {
        if m == 0 {
            return Err(Error::domain("contract count must be at least 1", 0.0));
        }
        Ok(Self { m, params })
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn params(&self) -> BetaParams {
        self.params
    }
}

/// Beta density at `x ∈ (0, 1)`.
pub fn beta_pdf(x: f64, p: BetaParams) -> Result<f64> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::domain("beta_pdf requires 0 < x < 1", x));
    }
    Ok(specfun::beta_density_unchecked(x, p.alpha, p.beta))
}

/// Cumulative distribution function, `I_x(α, β)`.
pub fn beta_cdf(x: f64, p: BetaParams) -> Result<f64> {
    specfun::reg_inc_beta(x, p.alpha, p.beta)
}

pub fn beta_moments(p: BetaParams) -> Moments {
    let s = p.alpha + p.beta;
    Moments {
        mean: p.alpha / s,
        variance: p.alpha * p.beta / (s * s * (s + 1.0)),
    }
}

/// `P(A = k)` for the Beta-Binomial count, evaluated in log space.
///
/// Returns exactly zero outside the support `0..=M`.
pub fn beta_binomial_pmf(k: i64, bb: BetaBinomialParams) -> f64 {
    if k < 0 || k as u64 > bb.m {
        return 0.0;
    }
    beta_binomial_ln_pmf(k as u64, bb).exp()
}

pub(crate) fn beta_binomial_ln_pmf(k: u64, bb: BetaBinomialParams) -> f64 {
    let m = bb.m as f64;
    let k = k as f64;
    let (a, b) = (bb.params.alpha, bb.params.beta);
    // ln C(M, k) = -ln(M + 1) - ln B(k + 1, M - k + 1)
    let ln_choose = -(m + 1.0).ln() - specfun::ln_beta_unchecked(k + 1.0, m - k + 1.0);
    ln_choose + specfun::ln_beta_ratio(a, b, k, m - k)
}

/// Mean `Mα/(α+β)` and variance `Mαβ(α+β+M)/((α+β)²(α+β+1))` of the count.
pub fn beta_binomial_moments(bb: BetaBinomialParams) -> Moments {
    let m = bb.m as f64;
    let (a, b) = (bb.params.alpha, bb.params.beta);
    let s = a + b;
    Moments {
        mean: m * a / s,
        variance: m * a * b * (s + m) / (s * s * (s + 1.0)),
    }
}

/// The same variance written as `M² Var(ξ) (1 + (α+β)/M)`.
pub fn beta_binomial_variance_overdispersed(bb: BetaBinomialParams) -> f64 {
    let m = bb.m as f64;
    let var_xi = beta_moments(bb.params).variance;
    m * m * var_xi * (1.0 + (bb.params.alpha + bb.params.beta) / m)
}

/// Variance of the empirical proportion `A/M` relative to `Var(ξ)`, i.e. the
/// overdispersion factor `1 + (α+β)/M`.
pub fn proportion_variance_inflation(bb: BetaBinomialParams) -> f64 {
    1.0 + (bb.params.alpha + bb.params.beta) / bb.m as f64
}

/// Moments of the count given the realised proportion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConditionalMoments {
    pub mean: f64,
    pub variance: f64,
    /// `1/(4M)`, an upper bound for `Var(A/M | ξ = p)`.
    pub phat_var_bound: f64,
}

/// `(Mp, Mp(1-p), 1/(4M))` for a Binomial(M, p) count.
pub fn binomial_conditional_moments(m: u64, p: f64) -> Result<ConditionalMoments> {
    if m == 0 {
        return Err(Error::domain("contract count must be at least 1", 0.0));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::domain("proportion must lie in [0, 1]", p));
    }
    let m = m as f64;
    Ok(ConditionalMoments {
        mean: m * p,
        variance: m * p * (1.0 - p),
        phat_var_bound: 0.25 / m,
    })
}
