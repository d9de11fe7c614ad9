//! Special functions: log-gamma, log-beta, the regularized incomplete beta
//! function and its inverse.
//!
//! Everything here is a pure function of its arguments. Large shape
//! parameters (hundreds to tens of thousands) are the normal case for claim
//! frequency fits, so the log-beta and the `x^a (1-x)^b / B(a,b)` prefactor are
//! assembled from Stirling remainders instead of differencing large log-gamma
//! values, which would otherwise lose ten or more digits.

use crate::error::{Error, Result};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Above this argument log-gamma switches to the Stirling series.
const STIRLING_MIN: f64 = 10.0;

/// Tolerances for the quantile root finder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceConfig {
    /// Target for `|I_x(a, b) - u|`.
    pub abs_tol: f64,
    pub max_iter: usize,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            max_iter: 200,
        }
    }
}

impl ToleranceConfig {
    pub fn new(abs_tol: f64, max_iter: usize) -> Result<Self> {
        if !(abs_tol > 0.0 && abs_tol.is_finite()) {
            return Err(Error::domain(
                "abs_tol must be positive and finite",
                abs_tol,
            ));
        }
        if max_iter == 0 {
            return Err(Error::domain("max_iter must be at least 1", 0.0));
        }
        Ok(Self { abs_tol, max_iter })
    }
}

fn check_positive(what: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(what, v))
    }
}

/// Natural log of the gamma function for `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    check_positive("ln_gamma requires a positive finite argument", x)?;
    Ok(ln_gamma_unchecked(x))
}

pub(crate) fn ln_gamma_unchecked(x: f64) -> f64 {
    if x == 1.0 || x == 2.0 {
        return 0.0;
    }
    if x >= STIRLING_MIN {
        return ln_gamma_stirling(x);
    }
    // Shift up with Γ(x) = Γ(x + k) / (x (x+1) ... (x+k-1)).
    let mut z = x;
    let mut prod = 1.0;
    while z < STIRLING_MIN {
        prod *= z;
        z += 1.0;
    }
    ln_gamma_stirling(z) - prod.ln()
}

fn ln_gamma_stirling(x: f64) -> f64 {
    (x - 0.5) * x.ln() - x + LN_SQRT_2PI + stirling_remainder(x)
}

/// `ln Γ(x) - [(x - 1/2) ln x - x + ln √(2π)]` for `x >= 10`.
fn stirling_remainder(x: f64) -> f64 {
    // B_{2k} / (2k (2k-1)) for k = 1..8
    const C: [f64; 8] = [
        1.0 / 12.0,
        -1.0 / 360.0,
        1.0 / 1260.0,
        -1.0 / 1680.0,
        1.0 / 1188.0,
        -691.0 / 360_360.0,
        1.0 / 156.0,
        -3617.0 / 122_400.0,
    ];
    let r = 1.0 / x;
    let r2 = r * r;
    let mut acc = 0.0;
    for c in C.iter().rev() {
        acc = acc * r2 + c;
    }
    acc * r
}

/// `ln Γ(b + a) - ln Γ(b)` without cancellation when `b` is large.
pub(crate) fn ln_gamma_ratio(b: f64, a: f64) -> f64 {
    if b >= STIRLING_MIN {
        (b - 0.5) * (a / b).ln_1p() + a * (b + a).ln() - a + stirling_remainder(b + a)
            - stirling_remainder(b)
    } else {
        ln_gamma_unchecked(b + a) - ln_gamma_unchecked(b)
    }
}

/// `ln Γ(z + h) - ln Γ(z) - h ln z` for `h >= 0`.
fn ln_rising_excess(z: f64, h: f64) -> f64 {
    if h == 0.0 {
        0.0
    } else if z >= STIRLING_MIN {
        (z + h - 0.5) * (h / z).ln_1p() - h + stirling_remainder(z + h) - stirling_remainder(z)
    } else {
        ln_gamma_unchecked(z + h) - ln_gamma_unchecked(z) - h * z.ln()
    }
}

/// `ln B(a + k, b + l) - ln B(a, b)` for `k, l >= 0`.
///
/// The leading `k ln(a/(a+b)) + l ln(b/(a+b))` is formed from the shares
/// directly, so nothing of size `ln Γ(a + b)` is ever subtracted.
pub(crate) fn ln_beta_ratio(a: f64, b: f64, k: f64, l: f64) -> f64 {
    let s = a + b;
    let lead = if a <= b {
        let x0 = a / s;
        k * x0.ln() + l * (-x0).ln_1p()
    } else {
        let y0 = b / s;
        k * (-y0).ln_1p() + l * y0.ln()
    };
    lead + ln_rising_excess(a, k) + ln_rising_excess(b, l) - ln_rising_excess(s, k + l)
}

/// `ln B(a, b) = ln Γ(a) + ln Γ(b) - ln Γ(a + b)`.
pub fn ln_beta(a: f64, b: f64) -> Result<f64> {
    check_positive("ln_beta requires alpha > 0", a)?;
    check_positive("ln_beta requires beta > 0", b)?;
    Ok(ln_beta_unchecked(a, b))
}

pub(crate) fn ln_beta_unchecked(a: f64, b: f64) -> f64 {
    let (small, large) = if a <= b { (a, b) } else { (b, a) };
    if small >= STIRLING_MIN {
        let s = a + b;
        let x0 = a / s;
        let y0 = b / s;
        // a ln x0 + b ln y0 with the smaller share taken through ln_1p
        let core = if a <= b {
            a * x0.ln() + b * (-x0).ln_1p()
        } else {
            a * (-y0).ln_1p() + b * y0.ln()
        };
        LN_SQRT_2PI - 0.5 * (a * b / s).ln() + core + stirling_remainder(a) + stirling_remainder(b)
            - stirling_remainder(s)
    } else if large >= STIRLING_MIN {
        ln_gamma_unchecked(small) - ln_gamma_ratio(large, small)
    } else {
        ln_gamma_unchecked(a) + ln_gamma_unchecked(b) - ln_gamma_unchecked(a + b)
    }
}

/// `t - ln(1 + t)` for `t > -1`.
fn log1pmx(t: f64) -> f64 {
    if t.abs() < 0.1 {
        // Σ_{k>=2} (-1)^k t^k / k
        let mut term = t * t;
        let mut sum = 0.0;
        let mut k = 2.0;
        while k < 40.0 {
            let add = term / k;
            sum += add;
            if add.abs() <= 1e-18 * sum.abs() {
                break;
            }
            term *= -t;
            k += 1.0;
        }
        sum
    } else {
        t - t.ln_1p()
    }
}

/// `ln[x^a y^b / B(a, b)]` with `y = 1 - x` supplied by the caller.
pub(crate) fn ln_power_terms(x: f64, y: f64, a: f64, b: f64) -> f64 {
    if a >= STIRLING_MIN && b >= STIRLING_MIN {
        let s = a + b;
        let x0 = a / s;
        let y0 = b / s;
        let d = if x <= 0.5 { x - x0 } else { y0 - y };
        let dev = a * log1pmx(d / x0) + b * log1pmx(-d / y0);
        -dev + 0.5 * (a * b / s).ln() - LN_SQRT_2PI - stirling_remainder(a) - stirling_remainder(b)
            + stirling_remainder(s)
    } else {
        let ln_x = if x <= 0.5 { x.ln() } else { (-y).ln_1p() };
        let ln_y = if y <= 0.5 { y.ln() } else { (-x).ln_1p() };
        a * ln_x + b * ln_y - ln_beta_unchecked(a, b)
    }
}

/// Beta density `x^{a-1} (1-x)^{b-1} / B(a, b)` on the open interval.
pub(crate) fn beta_density_unchecked(x: f64, a: f64, b: f64) -> f64 {
    let y = 1.0 - x;
    (ln_power_terms(x, y, a, b)).exp() / (x * y)
}

fn check_shapes(a: f64, b: f64) -> Result<()> {
    check_positive("alpha must be positive and finite", a)?;
    check_positive("beta must be positive and finite", b)
}

/// Regularized incomplete beta function `I_x(a, b)`.
pub fn reg_inc_beta(x: f64, a: f64, b: f64) -> Result<f64> {
    check_shapes(a, b)?;
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::domain("reg_inc_beta requires 0 <= x <= 1", x));
    }
    reg_inc_beta_unchecked(x, a, b)
}

pub(crate) fn reg_inc_beta_unchecked(x: f64, a: f64, b: f64) -> Result<f64> {
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == 1.0 {
        return Ok(1.0);
    }
    let y = 1.0 - x;
    if x > (a + 1.0) / (a + b + 2.0) {
        let upper = inc_beta_lower_tail(y, x, b, a)?;
        Ok((1.0 - upper).clamp(0.0, 1.0))
    } else {
        Ok(inc_beta_lower_tail(x, y, a, b)?.clamp(0.0, 1.0))
    }
}

/// Continued fraction expansion, valid (and fast) for `x <= (a+1)/(a+b+2)`.
fn inc_beta_lower_tail(x: f64, y: f64, a: f64, b: f64) -> Result<f64> {
    const TINY: f64 = 1e-300;
    const EPS: f64 = 1e-16;
    // Convergence takes O(sqrt(max(a, b))) terms.
    let max_terms = 1000 + (20.0 * a.max(b).sqrt()) as usize;

    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    let mut converged = false;
    for m in 1..=max_terms {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() <= EPS {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Convergence {
            iterations: max_terms,
            lo: x,
            hi: x,
        });
    }
    Ok((ln_power_terms(x, y, a, b)).exp() * h / a)
}

/// Quantile function of Beta(a, b): the `x` with `I_x(a, b) = u`.
///
/// Newton iteration on the cdf, kept inside a shrinking bracket and falling
/// back to bisection whenever a step would leave it. If the bracket closes
/// down to adjacent floating-point numbers before the residual reaches
/// `abs_tol`, the endpoint with the smaller residual is returned since no
/// representable `x` does better.
pub fn beta_quantile(u: f64, a: f64, b: f64, tol: ToleranceConfig) -> Result<f64> {
    check_shapes(a, b)?;
    if !(u > 0.0 && u < 1.0) {
        return Err(Error::domain("beta_quantile requires 0 < u < 1", u));
    }
    let mut lo = 0.0_f64;
    let mut hi = 1.0_f64;
    let mut lo_res = -u;
    let mut hi_res = 1.0 - u;
    let mut x = initial_guess(u, a, b);
    if !(x > 0.0 && x < 1.0) {
        x = 0.5;
    }
    for _ in 0..tol.max_iter {
        let f = reg_inc_beta_unchecked(x, a, b)? - u;
        if f.abs() <= tol.abs_tol {
            return Ok(x);
        }
        if f < 0.0 {
            lo = x;
            lo_res = f;
        } else {
            hi = x;
            hi_res = f;
        }
        let pdf = beta_density_unchecked(x, a, b);
        let mut next = x - f / pdf;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if next == x {
            return Ok(x);
        }
        if next <= lo || next >= hi {
            // bracket is down to neighbouring floats
            return Ok(if lo_res.abs() <= hi_res.abs() && lo > 0.0 {
                lo
            } else if hi < 1.0 {
                hi
            } else {
                lo
            });
        }
        x = next;
    }
    Err(Error::Convergence {
        iterations: tol.max_iter,
        lo,
        hi,
    })
}

/// Starting point for the quantile iteration (Majumder–Bhattacharjee AS 109).
fn initial_guess(u: f64, a: f64, b: f64) -> f64 {
    let (p, swap) = if u <= 0.5 {
        (u, false)
    } else {
        (1.0 - u, true)
    };
    let (pp, qq) = if swap { (b, a) } else { (a, b) };
    let r = (-2.0 * p.ln()).sqrt();
    // upper-tail normal quantile of p, crude rational approximation
    let y = r - (2.30753 + 0.27061 * r) / (1.0 + (0.99229 + 0.04481 * r) * r);
    let x = if pp > 1.0 && qq > 1.0 {
        let r = (y * y - 3.0) / 6.0;
        let s = 1.0 / (pp + pp - 1.0);
        let t = 1.0 / (qq + qq - 1.0);
        let h = 2.0 / (s + t);
        let w = y * (h + r).sqrt() / h - (t - s) * (r + 5.0 / 6.0 - 2.0 / (3.0 * h));
        pp / (pp + qq * (w + w).exp())
    } else {
        let ln_b = ln_beta_unchecked(pp, qq);
        let r = qq + qq;
        let t = 1.0 / (9.0 * qq);
        let t = r * (1.0 - t + y * t.sqrt()).powi(3);
        if t <= 0.0 {
            1.0 - (((-p).ln_1p() + qq.ln() + ln_b) / qq).exp()
        } else {
            let t = (4.0 * pp + r - 2.0) / t;
            if t <= 1.0 {
                (((p * pp).ln() + ln_b) / pp).exp()
            } else {
                1.0 - 2.0 / (t + 1.0)
            }
        }
    };
    let x = if swap { 1.0 - x } else { x };
    x.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0)
}
