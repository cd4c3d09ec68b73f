//! Modified Bessel functions `I_n`, `K_n` of integer order and non-negative
//! real argument.
//!
//! Algorithm split:
//!
//! * `I_n`: ascending power series when `x <= 20` or `x <= 2n`; otherwise the
//!   ratio `I_{n+1}/I_n` from its continued fraction combined with the
//!   Wronskian `I_n K_{n+1} + I_{n+1} K_n = 1/x`.
//! * `K_0`, `K_1`: logarithmic series for `x <= 2`, Steed's continued fraction
//!   (Temme's form) for `2 < x <= 40`, Hankel asymptotic expansion beyond.
//! * `K_n`: upward recurrence from `K_0`, `K_1`, which is the stable direction.
//!
//! The scaled variants `e^{-x} I_n(x)` and `e^{x} K_n(x)` and the `log_*`
//! variants never overflow for the arguments used by the rest of the crate.

use crate::error::{domain, Result};
use serde::Serialize;
use std::f64::consts::PI;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const SERIES_EPS: f64 = 1e-17;
const MAX_SERIES_TERMS: usize = 4000;
const MAX_CF_ITER: usize = 200_000;

/// All four values for one `(n, x)` pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BesselEval {
    pub order: u32,
    pub argument: f64,
    pub value_i: f64,
    pub value_k: f64,
    pub deriv_i: f64,
    pub deriv_k: f64,
    /// `true` when the `I` pair carries `e^{-x}` and the `K` pair `e^{x}`.
    pub scaled: bool,
}

fn check_nonneg(x: f64) -> Result<()> {
    if x.is_nan() || x < 0.0 {
        return domain(format!("Bessel argument must be >= 0, got {x}"));
    }
    Ok(())
}

fn check_pos(x: f64) -> Result<()> {
    if x.is_nan() || x <= 0.0 {
        return domain(format!("K_n needs a positive argument, got {x}"));
    }
    Ok(())
}

fn use_series_i(n: u32, x: f64) -> bool {
    x <= 20.0 || (x <= 2.0 * f64::from(n) && x <= 500.0)
}

/// `sum_k (x^2/4)^k / (k! (n+1)_k)`, the series for `I_n` without its
/// `(x/2)^n / n!` prefactor.
fn i_series_sum(n: u32, x: f64) -> f64 {
    let t = 0.25 * x * x;
    let nf = f64::from(n);
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..MAX_SERIES_TERMS {
        let kf = k as f64;
        term *= t / (kf * (nf + kf));
        sum += term;
        if term < SERIES_EPS * sum {
            break;
        }
    }
    sum
}

fn ln_factorial(n: u32) -> f64 {
    (2..=n).map(|k| f64::from(k).ln()).sum()
}

/// `ln((x/2)^n / n!)`.
fn ln_series_prefactor(n: u32, x: f64) -> f64 {
    if n == 0 {
        0.0
    } else {
        f64::from(n) * (0.5 * x).ln() - ln_factorial(n)
    }
}

/// `(x/2)^n / n!` by direct product; `None` when it leaves the normal range.
fn series_prefactor(n: u32, x: f64) -> Option<f64> {
    let half = 0.5 * x;
    let mut p = 1.0;
    for k in 1..=n {
        p *= half / f64::from(k);
    }
    (p.is_normal() || n == 0).then_some(p)
}

/// `I_{n+1}(x) / I_n(x)` for `x > 0` from the continued fraction
/// `1 / (2(n+1)/x + 1 / (2(n+2)/x + ...))`, modified Lentz.
pub(crate) fn ratio_i(n: u32, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let xi = 1.0 / x;
    let mut b = 2.0 * (f64::from(n) + 1.0) * xi;
    let mut f = b;
    let mut c = b;
    let mut d = 0.0;
    for _ in 0..MAX_CF_ITER {
        b += 2.0 * xi;
        d += b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + 1.0 / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    1.0 / f
}

/// `(e^x K_0(x), e^x K_1(x))` for `x > 0`.
fn k01_scaled(x: f64) -> (f64, f64) {
    if x <= 2.0 {
        k01_series(x)
    } else if x <= 40.0 {
        k01_steed(x)
    } else {
        (k_hankel(0, x), k_hankel(1, x))
    }
}

fn k01_series(x: f64) -> (f64, f64) {
    let t = 0.25 * x * x;
    let lnh = (0.5 * x).ln();
    // K0 = -(ln(x/2) + gamma) I0 + sum_k t^k/(k!)^2 H_k
    let mut i0 = 1.0;
    let mut term0 = 1.0;
    let mut harm = 0.0;
    let mut s0 = 0.0;
    // K1 = 1/x + ln(x/2) I1 - (x/4) sum_k (psi(k+1) + psi(k+2)) t^k/(k!(k+1)!)
    let mut term1 = 1.0;
    let mut i1s = 1.0;
    let mut s1 = -2.0 * EULER_GAMMA + 1.0;
    for k in 1..200 {
        let kf = k as f64;
        term0 *= t / (kf * kf);
        harm += 1.0 / kf;
        i0 += term0;
        s0 += term0 * harm;
        term1 *= t / (kf * (kf + 1.0));
        i1s += term1;
        // psi(k+1) + psi(k+2) = -2 gamma + 2 H_k + 1/(k+1)
        s1 += term1 * (-2.0 * EULER_GAMMA + 2.0 * harm + 1.0 / (kf + 1.0));
        if term0 < SERIES_EPS * i0 && term1 < SERIES_EPS * i1s {
            break;
        }
    }
    let i1 = 0.5 * x * i1s;
    let k0 = -(lnh + EULER_GAMMA) * i0 + s0;
    let k1 = 1.0 / x + lnh * i1 - 0.25 * x * s1;
    let e = x.exp();
    (k0 * e, k1 * e)
}

/// Steed's continued fraction for `K_0`, `K_1` (order zero in Temme's form),
/// accurate for `x >= 2`.
fn k01_steed(x: f64) -> (f64, f64) {
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut h = d;
    let mut delh = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let a1 = 0.25;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 2..MAX_CF_ITER {
        let fi = i as f64;
        a -= 2.0 * (fi - 1.0);
        c = -a * c / fi;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh *= b * d - 1.0;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < 1e-17 {
            break;
        }
    }
    h *= a1;
    let k0 = (PI / (2.0 * x)).sqrt() / s;
    let k1 = k0 * (x + 0.5 - h) / x;
    (k0, k1)
}

/// Hankel expansion of `e^x K_n(x)`; only used for `n <= 1`, `x > 40`.
fn k_hankel(n: u32, x: f64) -> f64 {
    let mu = 4.0 * f64::from(n) * f64::from(n);
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..60 {
        let odd = (2 * k - 1) as f64;
        term *= (mu - odd * odd) / (k as f64 * 8.0 * x);
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    (PI / (2.0 * x)).sqrt() * sum
}

/// `e^x K_n(x)` and `e^x K_{n+1}(x)` by upward recurrence.
fn k_scaled_pair(n: u32, x: f64) -> (f64, f64) {
    let (mut km, mut k) = k01_scaled(x);
    if n == 0 {
        return (km, k);
    }
    for j in 1..=n {
        let kp = km + 2.0 * f64::from(j) / x * k;
        km = k;
        k = kp;
    }
    (km, k)
}

fn i_scaled_unchecked(n: u32, x: f64) -> f64 {
    if x == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    if use_series_i(n, x) {
        let sum = i_series_sum(n, x);
        match series_prefactor(n, x) {
            Some(p) => p * (-x).exp() * sum,
            None => (ln_series_prefactor(n, x) + sum.ln() - x).exp(),
        }
    } else {
        let (kn, kn1) = k_scaled_pair(n, x);
        let r = ratio_i(n, x);
        1.0 / (x * (kn1 + r * kn))
    }
}

fn ln_i_unchecked(n: u32, x: f64) -> f64 {
    if x == 0.0 {
        return if n == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    if use_series_i(n, x) {
        ln_series_prefactor(n, x) + i_series_sum(n, x).ln()
    } else {
        i_scaled_unchecked(n, x).ln() + x
    }
}

fn ln_k_unchecked(n: u32, x: f64) -> f64 {
    let (k0, k1) = k01_scaled(x);
    let mut acc = k0.ln() - x;
    if n == 0 {
        return acc;
    }
    let mut rho = k1 / k0;
    acc += rho.ln();
    for j in 1..n {
        rho = 1.0 / rho + 2.0 * f64::from(j) / x;
        acc += rho.ln();
    }
    acc
}

/// `I_n(x)`.
pub fn besseli(n: u32, x: f64) -> Result<f64> {
    check_nonneg(x)?;
    if x == 0.0 {
        return Ok(if n == 0 { 1.0 } else { 0.0 });
    }
    if use_series_i(n, x) {
        let sum = i_series_sum(n, x);
        return Ok(match series_prefactor(n, x) {
            Some(p) => p * sum,
            None => (ln_series_prefactor(n, x) + sum.ln()).exp(),
        });
    }
    Ok(i_scaled_unchecked(n, x) * x.exp())
}

/// `K_n(x)`, `x > 0`.
pub fn besselk(n: u32, x: f64) -> Result<f64> {
    check_pos(x)?;
    let (k, _) = k_scaled_pair(n, x);
    if k.is_finite() {
        Ok(k * (-x).exp())
    } else {
        Ok(ln_k_unchecked(n, x).exp())
    }
}

/// `e^{-x} I_n(x)`.
pub fn besseli_scaled(n: u32, x: f64) -> Result<f64> {
    check_nonneg(x)?;
    Ok(i_scaled_unchecked(n, x))
}

/// `e^{x} K_n(x)`, `x > 0`.
pub fn besselk_scaled(n: u32, x: f64) -> Result<f64> {
    check_pos(x)?;
    let (k, _) = k_scaled_pair(n, x);
    if k.is_finite() {
        Ok(k)
    } else {
        Ok((ln_k_unchecked(n, x) + x).exp())
    }
}

/// `ln I_n(x)`; `-inf` at the origin for `n >= 1`.
pub fn log_besseli(n: u32, x: f64) -> Result<f64> {
    check_nonneg(x)?;
    Ok(ln_i_unchecked(n, x))
}

/// `ln K_n(x)`, `x > 0`.
pub fn log_besselk(n: u32, x: f64) -> Result<f64> {
    check_pos(x)?;
    Ok(ln_k_unchecked(n, x))
}

/// `(I_n'(x), K_n'(x))` from `I_n' = I_{n-1} - (n/x) I_n` and
/// `K_n' = -K_{n-1} - (n/x) K_n` (`I_0' = I_1`, `K_0' = -K_1`).
pub fn bessel_derivs(n: u32, x: f64) -> Result<(f64, f64)> {
    check_pos(x)?;
    if n == 0 {
        return Ok((besseli(1, x)?, -besselk(1, x)?));
    }
    let nx = f64::from(n) / x;
    let di = besseli(n - 1, x)? - nx * besseli(n, x)?;
    let dk = -besselk(n - 1, x)? - nx * besselk(n, x)?;
    Ok((di, dk))
}

/// `I_n'(x) / I_n(x) = n/x + I_{n+1}(x)/I_n(x)`, cancellation free.
pub fn log_deriv_i(n: u32, x: f64) -> Result<f64> {
    check_pos(x)?;
    Ok(f64::from(n) / x + ratio_i(n, x))
}

/// `K_n'(x) / K_n(x)`, always negative.
pub fn log_deriv_k(n: u32, x: f64) -> Result<f64> {
    check_pos(x)?;
    let (k0, k1) = k01_scaled(x);
    let mut rho = k1 / k0;
    if n == 0 {
        return Ok(-rho);
    }
    for j in 1..n {
        rho = 1.0 / rho + 2.0 * f64::from(j) / x;
    }
    // K_n' / K_n = -K_{n-1}/K_n - n/x
    Ok(-1.0 / rho - f64::from(n) / x)
}

/// Evaluates the `I`/`K` pair and derivatives, optionally scaled.
pub fn bessel_eval(n: u32, x: f64, scaled: bool) -> Result<BesselEval> {
    check_pos(x)?;
    let (value_i, value_k, deriv_i, deriv_k) = if scaled {
        let vi = besseli_scaled(n, x)?;
        let vk = besselk_scaled(n, x)?;
        (vi, vk, vi * log_deriv_i(n, x)?, vk * log_deriv_k(n, x)?)
    } else {
        let (di, dk) = bessel_derivs(n, x)?;
        (besseli(n, x)?, besselk(n, x)?, di, dk)
    };
    Ok(BesselEval {
        order: n,
        argument: x,
        value_i,
        value_k,
        deriv_i,
        deriv_k,
        scaled,
    })
}
