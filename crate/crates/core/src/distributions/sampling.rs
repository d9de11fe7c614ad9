use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{BetaBinomialParams, BetaParams};

/// Seed and substream index of a reproducible random stream.
///
/// The generator is ChaCha8 keyed with `ChaCha8Rng::seed_from_u64(seed)`
/// and positioned on ChaCha stream `stream`. Both the key expansion and the
/// cipher are fixed algorithms, so a given `(seed, stream)` produces the same
/// bits on every platform. Distinct streams of one seed are independent.
///
/// Layout of the variate algorithms built on top (version 1):
/// - uniforms use the top 53 bits of one `u64`, shifted to the open interval;
/// - normals use the Marsaglia polar method, the second value is discarded;
/// - gamma variates use Marsaglia–Tsang, with the `U^{1/a}` boost for `a < 1`;
/// - Beta variates are `X/(X+Y)` of two gammas, combined in log space;
/// - binomials use Knuth's order-statistic split down to `n <= 64`, then
///   sequential inversion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngSeed {
    pub seed: u64,
    pub stream: u64,
}

impl RngSeed {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    pub fn rng(&self) -> StreamRng {
        let mut inner = ChaCha8Rng::seed_from_u64(self.seed);
        inner.set_stream(self.stream);
        StreamRng { inner }
    }

    /// Stream for sub-task `index` below this one. The upper 32 bits of the
    /// stream id hold `self.stream`, the lower 32 bits the index.
    ///
    /// Panics if either part does not fit in 32 bits.
    pub fn substream(&self, index: u64) -> RngSeed {
        assert!(
            self.stream < 1 << 32,
            "parent stream {} too large for nesting",
            self.stream
        );
        assert!(index < 1 << 32, "substream index {index} too large");
        RngSeed {
            seed: self.seed,
            stream: ((self.stream + 1) << 32) | index,
        }
    }
}

/// A positioned random stream with the variate generators used by the crate.
#[derive(Debug, Clone)]
pub struct StreamRng {
    inner: ChaCha8Rng,
}

impl StreamRng {
    /// Uniform on the open interval (0, 1).
    pub fn uniform(&mut self) -> f64 {
        const SCALE: f64 = 1.0 / (1u64 << 53) as f64;
        ((self.inner.next_u64() >> 11) as f64 + 0.5) * SCALE
    }

    pub fn standard_normal(&mut self) -> f64 {
        loop {
            let u = 2.0 * self.uniform() - 1.0;
            let v = 2.0 * self.uniform() - 1.0;
            let s = u * u + v * v;
            if s < 1.0 && s > 0.0 {
                return u * (-2.0 * s.ln() / s).sqrt();
            }
        }
    }

    /// Logarithm of a Gamma(shape, 1) variate.
    fn ln_gamma_variate(&mut self, shape: f64) -> f64 {
        if shape < 1.0 {
            let boost = self.uniform().ln() / shape;
            return self.ln_gamma_variate(shape + 1.0) + boost;
        }
        let d = shape - 1.0 / 3.0;
        let c = 1.0 / (9.0 * d).sqrt();
        loop {
            let x = self.standard_normal();
            let v = 1.0 + c * x;
            if v <= 0.0 {
                continue;
            }
            let v = v * v * v;
            let u = self.uniform();
            let x2 = x * x;
            if u < 1.0 - 0.0331 * x2 * x2 || u.ln() < 0.5 * x2 + d * (1.0 - v + v.ln()) {
                return d.ln() + v.ln();
            }
        }
    }

    /// Beta(α, β) variate, always strictly inside (0, 1).
    pub fn beta(&mut self, p: BetaParams) -> f64 {
        self.beta_raw(p.alpha(), p.beta())
    }

    fn beta_raw(&mut self, a: f64, b: f64) -> f64 {
        let lx = self.ln_gamma_variate(a);
        let ly = self.ln_gamma_variate(b);
        let x = 1.0 / (1.0 + (ly - lx).exp());
        x.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0)
    }

    /// Exact Binomial(n, p) variate.
    pub fn binomial(&mut self, n: u64, p: f64) -> u64 {
        let mut n = n;
        let mut p = p.clamp(0.0, 1.0);
        let mut acc = 0;
        loop {
            if p == 0.0 || n == 0 {
                return acc;
            }
            if p == 1.0 {
                return acc + n;
            }
            if n <= 64 {
                return acc + self.binomial_inversion(n, p);
            }
            // a-th smallest of n uniforms is Beta(a, n + 1 - a)
            let a = 1 + n / 2;
            let b = n + 1 - a;
            let x = self.beta_raw(a as f64, b as f64);
            if x >= p {
                n = a - 1;
                p /= x;
            } else {
                acc += a;
                n = b - 1;
                p = (p - x) / (1.0 - x);
            }
        }
    }

    fn binomial_inversion(&mut self, n: u64, p: f64) -> u64 {
        if p > 0.5 {
            return n - self.binomial_inversion(n, 1.0 - p);
        }
        let q = 1.0 - p;
        let ratio = p / q;
        let mut f = q.powi(n as i32);
        let mut u = self.uniform();
        let mut k = 0;
        while u >= f {
            if k == n {
                break;
            }
            u -= f;
            f *= ratio * (n - k) as f64 / (k + 1) as f64;
            k += 1;
        }
        k
    }

    /// Beta-Binomial draw: fresh proportion, then a binomial count.
    pub fn beta_binomial(&mut self, bb: BetaBinomialParams) -> u64 {
        let p = self.beta(bb.params());
        self.binomial(bb.m(), p)
    }
}

/// `count` independent Beta variates from the stream `seed`.
pub fn sample_beta(p: BetaParams, seed: RngSeed, count: usize) -> Vec<f64> {
    let mut rng = seed.rng();
    (0..count).map(|_| rng.beta(p)).collect()
}

/// `count` independent Beta-Binomial counts from the stream `seed`.
pub fn sample_beta_binomial(bb: BetaBinomialParams, seed: RngSeed, count: usize) -> Vec<u64> {
    let mut rng = seed.rng();
    (0..count).map(|_| rng.beta_binomial(bb)).collect()
}
