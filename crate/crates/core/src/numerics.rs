//! Small floating-point helpers shared by the closed-form modules.

/// `e^a - e^b` evaluated as `e^a * (1 - e^{b-a})` so that nearly equal
/// exponents do not cancel catastrophically.
pub(crate) fn diff_exp(a: f64, b: f64) -> f64 {
    -a.exp() * (b - a).exp_m1()
}

/// `(a / b)^k` through the logarithm, which neither overflows nor underflows
/// prematurely for large `k`.
pub(crate) fn pow_ratio(a: f64, b: f64, k: f64) -> f64 {
    (k * (a / b).ln()).exp()
}

/// `|a - b| / max(|b|, floor)`.
pub fn rel_diff(a: f64, b: f64, floor: f64) -> f64 {
    (a - b).abs() / b.abs().max(floor)
}

/// `n + 1` equally spaced points from `a` to `b` with exact endpoints.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    let h = (b - a) / n as f64;
    (0..=n)
        .map(|i| if i == n { b } else { a + i as f64 * h })
        .collect()
}
