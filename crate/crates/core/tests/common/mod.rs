//! Oracles shared by the integration tests. They rely on nothing from the
//! crate beyond what is noted, so agreement with them is meaningful.

#![allow(dead_code)]

use claimfreq::portfolio::{parse_portfolio_csv, Locale, TariffHistory};

pub const TABLE1: &str = include_str!("../../data/table1.csv");
pub const TABLE1_DE: &str = include_str!("../../data/table1_de.csv");

pub fn table1() -> Vec<TariffHistory> {
    parse_portfolio_csv(TABLE1, Locale::En).expect("reference table parses")
}

/// Gauss-Legendre nodes and weights on [-1, 1], by Newton iteration on P_n.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut rule = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let step = p1 / dp;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        rule.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    rule
}

/// Composite Gauss-Legendre integral of `f` over `[a, b]`.
pub fn integrate(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    panels: usize,
    rule: &[(f64, f64)],
) -> f64 {
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for i in 0..panels {
        let lo = a + i as f64 * h;
        let mid = lo + 0.5 * h;
        total += rule
            .iter()
            .map(|&(x, w)| w * f(mid + 0.5 * h * x))
            .sum::<f64>()
            * 0.5
            * h;
    }
    total
}

/// `∫_0^1 p^(a-1) (1-p)^(b-1) dp` by quadrature after the substitutions
/// `p = s^g` on the left half and `1 - p = s^g` on the right, which make the
/// integrand smooth for any `a, b >= 0.5`.
pub fn beta_integral(a: f64, b: f64) -> f64 {
    let rule = gauss_legendre(24);
    let ga = (8.0 / a).ceil().max(1.0);
    let gb = (8.0 / b).ceil().max(1.0);
    let half = 0.5f64;
    let left = |s: f64| {
        let p = s.powf(ga);
        ga * s.powf(ga * a - 1.0) * (1.0 - p).powf(b - 1.0)
    };
    let right = |s: f64| {
        let q = s.powf(gb);
        gb * s.powf(gb * b - 1.0) * (1.0 - q).powf(a - 1.0)
    };
    integrate(&left, 0.0, half.powf(1.0 / ga), 64, &rule)
        + integrate(&right, 0.0, half.powf(1.0 / gb), 64, &rule)
}

/// `C(m, k)` by exact integer arithmetic (fine for `m <= 60`).
pub fn choose(m: u64, k: u64) -> f64 {
    let k = k.min(m - k);
    let mut c: u128 = 1;
    for i in 0..k {
        c = c * (m - i) as u128 / (i + 1) as u128;
    }
    c as f64
}

/// Beta-Binomial probability as the mixture integral
/// `C(M,k) ∫ p^k (1-p)^(M-k) f_B(p) dp`, normalised by quadrature as well.
pub fn beta_binomial_pmf_quadrature(k: u64, m: u64, a: f64, b: f64) -> f64 {
    choose(m, k) * beta_integral(a + k as f64, b + (m - k) as f64) / beta_integral(a, b)
}

/// Quantile by plain bisection on the crate's cdf until the bracket is
/// narrower than `width`.
pub fn bisect_quantile(u: f64, a: f64, b: f64, width: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while hi - lo > width {
        let mid = 0.5 * (lo + hi);
        if claimfreq::specfun::reg_inc_beta(mid, a, b).unwrap() < u {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Pearson correlation written out from the textbook definition.
pub fn direct_correlation(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (sx, sy): (f64, f64) = (x.iter().sum(), y.iter().sum());
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let sxx: f64 = x.iter().map(|a| a * a).sum();
    let syy: f64 = y.iter().map(|b| b * b).sum();
    (n * sxy - sx * sy) / ((n * sxx - sx * sx).sqrt() * (n * syy - sy * sy).sqrt())
}

/// Two-sided one-sample Kolmogorov-Smirnov test against Uniform(0, 1);
/// returns `(D, p-value)` using the asymptotic law with Stephens' correction.
pub fn ks_uniform(values: &[f64]) -> (f64, f64) {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    let d = v
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let i = i as f64;
            ((i + 1.0) / n - x).max(x - i / n)
        })
        .fold(0.0, f64::max);
    let sn = n.sqrt();
    let lambda = (sn + 0.12 + 0.11 / sn) * d;
    if lambda < 0.2 {
        return (d, 1.0);
    }
    let mut p = 0.0;
    for j in 1..=200 {
        let j = j as f64;
        let sign = if j as i64 % 2 == 1 { 1.0 } else { -1.0 };
        p += sign * 2.0 * (-2.0 * j * j * lambda * lambda).exp();
    }
    (d, p.clamp(0.0, 1.0))
}

pub fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let (l, h) = (lo.ln(), hi.ln());
    (0..points)
        .map(|i| (l + (h - l) * i as f64 / (points - 1) as f64).exp())
        .collect()
}
