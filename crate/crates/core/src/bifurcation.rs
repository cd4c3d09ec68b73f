//! Bifurcation function and the explicit bifurcation points `P_l = L1 / L2`.
//!
//! With `q = (R0/R)^{2l}`, the named factors are
//!
//! * necrosis (I) `= (1 - q) / (1 + q)`,
//! * necrosis (II) `= 2 / ((R/R0)^{l+1} + (R0/R)^{l-1})`,
//! * `L1 = (l/R) necrosis_I (G^{-1}(l^2-1)/R^2 - chi (Q_l(R) + sigma_s'(R)))`,
//! * `L2 = sigma_s(R) - A + Q_l'(R) - (l/R) necrosis_I Q_l(R) - necrosis_II Q_l'(R0)`.
//!
//! Sign bookkeeping: the bifurcation function is evaluated in the grouped
//! form `F(P) = P (A - sigma_s(R) - Q_l'(R)) + l D1 R^{l-1} - l D2 R^{-l-1}`,
//! and algebraically `F(P) = L1 - P L2`; both are computed and compared.
//! For `l = 0` the harmonic part reduces to a constant, so
//! `F(P) = P (A - sigma_s(R) - Q_0'(R))` and `L2 = sigma_s(R) - A + Q_0'(R)`.

use crate::bessel::ratio_i;
use crate::error::{domain, Error, Result};
use crate::export::{Cell, Table};
use crate::linear_modes::{
    build_mode, g_beta_eval, harmonic_coefficients, harmonic_eval, ModeSolution,
};
use crate::nondim::ModelParams;
use crate::numerics::pow_ratio;
use crate::steady_state::{build_steady_state, sigma_eval, SteadyState};
use rayon::prelude::*;
use serde::Serialize;

/// Relative tolerance between the two evaluations of `F(P)`.
pub const DUAL_PATH_TOL: f64 = 1e-10;
/// `|L2| < DEGENERATE_RATIO * |L1|` is reported as a degenerate denominator.
pub const DEGENERATE_RATIO: f64 = 1e-14;
/// Highest mode accepted by [`monotonicity_scan`].
pub const SCAN_L_MAX: u32 = 32;

/// Zeroth and first-order curvature of the circle `r = R + eps cos(l theta)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvatureLinearization {
    pub l: u32,
    pub radius: f64,
    /// `1 / R`
    pub kappa0: f64,
    /// Coefficient of `cos(l theta)` in `-(R1 + R1_thth) / R^2`: `(l^2 - 1) / R^2`.
    pub kappa1_coeff: f64,
}

pub fn curvature_linearization(l: u32, r: f64) -> Result<CurvatureLinearization> {
    if !(r > 0.0 && r.is_finite()) {
        return domain(format!("curvature needs R > 0, got {r}"));
    }
    let lf = f64::from(l);
    Ok(CurvatureLinearization {
        l,
        radius: r,
        kappa0: 1.0 / r,
        kappa1_coeff: (lf * lf - 1.0) / (r * r),
    })
}

/// Curvature of the polar curve `r(theta) = R + eps cos(l theta)` from
/// `(r^2 + 2 r_th^2 - r r_thth) / (r^2 + r_th^2)^{3/2}`.
pub fn exact_curvature(l: u32, r: f64, perturb_eps: f64, theta: f64) -> f64 {
    let lf = f64::from(l);
    let rr = r + perturb_eps * (lf * theta).cos();
    let rt = -perturb_eps * lf * (lf * theta).sin();
    let rtt = -perturb_eps * lf * lf * (lf * theta).cos();
    (rr * rr + 2.0 * rt * rt - rr * rtt) / (rr * rr + rt * rt).powf(1.5)
}

/// `max_theta |kappa - kappa0 - eps kappa1 cos(l theta)|` on `n_theta` angles.
pub fn curvature_remainder(l: u32, r: f64, perturb_eps: f64, n_theta: usize) -> Result<f64> {
    let lin = curvature_linearization(l, r)?;
    let lf = f64::from(l);
    Ok((0..n_theta)
        .map(|j| {
            let th = 2.0 * std::f64::consts::PI * j as f64 / n_theta as f64;
            let approx = lin.kappa0 + perturb_eps * lin.kappa1_coeff * (lf * th).cos();
            (exact_curvature(l, r, perturb_eps, th) - approx).abs()
        })
        .fold(0.0, f64::max))
}

/// Named pieces of `L1` and `L2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BifurcationTerms {
    pub necrosis_i: f64,
    pub necrosis_ii: f64,
    /// `G^{-1} (l^2 - 1) / R^2`
    pub surface_tension: f64,
    /// `chi (Q_l(R) + sigma_s'(R))`
    pub chemotaxis: f64,
    /// `sigma_s(R)`
    pub nutrient_at_boundary: f64,
    /// `A`
    pub apoptosis_term: f64,
    /// `Lambda = Q_l'(R) - (l/R) necrosis_I Q_l(R) - necrosis_II Q_l'(R0)`
    pub lambda_term: f64,
    /// `Q_l'(R)`
    pub lambda_q_prime: f64,
    /// `-(l/R) necrosis_I Q_l(R)`
    pub lambda_necrosis_i: f64,
    /// `-necrosis_II Q_l'(R0)` (zero for `l = 0`)
    pub lambda_necrosis_ii: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BifurcationResult {
    pub l: u32,
    pub p_l: f64,
    pub l1: f64,
    pub l2: f64,
    pub terms: BifurcationTerms,
    /// `l = 1`: the surface-tension contribution vanishes identically.
    pub translation_mode: bool,
}

/// `(necrosis_I, necrosis_II)` for mode `l`, in log form so that large `l`
/// and small `R0` neither overflow nor underflow prematurely.
pub fn necrosis_factors(l: u32, r0: f64, r: f64) -> (f64, f64) {
    let lf = f64::from(l);
    let q = pow_ratio(r0, r, 2.0 * lf);
    let n1 = (1.0 - q) / (1.0 + q);
    let ln_a = (r / r0).ln();
    let n2 = 2.0 / (((lf + 1.0) * ln_a).exp() + ((1.0 - lf) * ln_a).exp());
    (n1, n2)
}

fn terms_for(s: &SteadyState, m: &ModeSolution) -> Result<(f64, f64, BifurcationTerms)> {
    let p = &s.params;
    let l = m.l;
    let lf = f64::from(l);
    let (n1, n2) = necrosis_factors(l, p.r0, p.r);
    let (sr, dsr, _) = sigma_eval(s, p.r)?;
    let (q, dq) = m.q_eval(p.r)?;
    let (_, dq0) = m.q_eval(p.r0)?;
    let surface_tension = p.g_inv * (lf * lf - 1.0) / (p.r * p.r);
    let chemotaxis = p.chi * (q + dsr);
    let lambda_necrosis_i = -lf / p.r * n1 * q;
    let lambda_necrosis_ii = if l == 0 { 0.0 } else { -n2 * dq0 };
    let lambda_term = dq + lambda_necrosis_i + lambda_necrosis_ii;
    let l1 = lf / p.r * n1 * (surface_tension - chemotaxis);
    let l2 = sr - s.apopt + lambda_term;
    Ok((
        l1,
        l2,
        BifurcationTerms {
            necrosis_i: n1,
            necrosis_ii: n2,
            surface_tension,
            chemotaxis,
            nutrient_at_boundary: sr,
            apoptosis_term: s.apopt,
            lambda_term,
            lambda_q_prime: dq,
            lambda_necrosis_i,
            lambda_necrosis_ii,
        },
    ))
}

/// `(L1, L2)` for mode `l`.
pub fn l1_l2(s: &SteadyState, l: u32) -> Result<(f64, f64)> {
    let m = build_mode(s, l)?;
    let (l1, l2, _) = terms_for(s, &m)?;
    Ok((l1, l2))
}

/// `L2` regrouped through `G_beta`: `sigma_s(R) - A - (sigma_s'' + beta
/// sigma_s')(R) f(l)` with `f(l) = G'(R) - (l/R) necrosis_I G(R) -
/// necrosis_II G'(R0)`.
pub fn l2_via_g(s: &SteadyState, l: u32) -> Result<f64> {
    let p = &s.params;
    let m = build_mode(s, l)?;
    let lf = f64::from(l);
    let (n1, n2) = necrosis_factors(l, p.r0, p.r);
    let (g, dg) = g_beta_eval(&m, p.r)?;
    let (_, dg0) = g_beta_eval(&m, p.r0)?;
    let n2_term = if l == 0 { 0.0 } else { n2 * dg0 };
    let f = dg - lf / p.r * n1 * g - n2_term;
    let (sr, _, _) = sigma_eval(s, p.r)?;
    Ok(sr - s.apopt - m.forcing() * f)
}

/// Both evaluations of the bifurcation function: the grouped form with the
/// harmonic coefficients, and `L1 - P L2`.
pub fn bifurcation_function_paths(s: &SteadyState, l: u32, prolif: f64) -> Result<(f64, f64)> {
    let p = &s.params;
    let m = build_mode(s, l)?;
    let (sr, _, _) = sigma_eval(s, p.r)?;
    let (_, dq) = m.q_eval(p.r)?;
    let mut grouped = prolif * (s.apopt - sr - dq);
    if l > 0 {
        let (d1, d2) = harmonic_coefficients(&m, prolif)?;
        grouped += harmonic_eval(d1, d2, l, p.r).1;
    }
    let (l1, l2, _) = terms_for(s, &m)?;
    Ok((grouped, l1 - prolif * l2))
}

/// Disagreement of the two evaluations of `F(P)`, relative to the largest
/// of `|L1|`, `|P L2|` and `|F(P)|`. Returns `(F(P), relative gap)`.
pub fn dual_path_gap(s: &SteadyState, l: u32, prolif: f64) -> Result<(f64, f64)> {
    let (grouped, split) = bifurcation_function_paths(s, l, prolif)?;
    let (l1, l2) = l1_l2(s, l)?;
    let scale = l1.abs().max((prolif * l2).abs()).max(grouped.abs());
    let gap = (grouped - split).abs();
    Ok((grouped, if scale > 0.0 { gap / scale } else { gap }))
}

/// `F(P)`, cross-checked against `L1 - P L2` to [`DUAL_PATH_TOL`].
pub fn bifurcation_function(s: &SteadyState, l: u32, prolif: f64) -> Result<f64> {
    let (value, gap) = dual_path_gap(s, l, prolif)?;
    if gap > DUAL_PATH_TOL {
        return Err(Error::Numeric(format!(
            "bifurcation function paths disagree for l = {l}: relative gap {gap:e}"
        )));
    }
    Ok(value)
}

/// `P_l = L1 / L2` with its term decomposition (`P_0 = 0`).
pub fn bifurcation_point(s: &SteadyState, l: u32) -> Result<BifurcationResult> {
    let m = build_mode(s, l)?;
    let (l1, l2, terms) = terms_for(s, &m)?;
    let p_l = if l == 0 {
        0.0
    } else {
        if l2 == 0.0 || l2.abs() < DEGENERATE_RATIO * l1.abs() {
            return Err(Error::DegenerateDenominator { l, l1, l2 });
        }
        l1 / l2
    };
    Ok(BifurcationResult {
        l,
        p_l,
        l1,
        l2,
        terms,
        translation_mode: l == 1,
    })
}

/// `beta -> inf, R0 -> 0` bifurcation point
/// `G^{-1}(l^3 - l)/R^3 / (1 - (2/R) I1/I0 - (I1/I0)(I_l'/I_l - l/R))`, all at `R`.
pub fn limit_bifurcation_point(l: u32, r: f64, g_inv: f64) -> Result<f64> {
    if !(r > 0.0 && r.is_finite()) {
        return domain(format!("limit needs R > 0, got {r}"));
    }
    let lf = f64::from(l);
    let num = g_inv * (lf * lf * lf - lf) / (r * r * r);
    if num == 0.0 {
        return Ok(0.0);
    }
    let rho = ratio_i(0, r);
    // I_l'/I_l - l/R = I_{l+1}/I_l
    let den = 1.0 - 2.0 / r * rho - rho * ratio_i(l, r);
    if den.abs() < DEGENERATE_RATIO * num.abs() || den == 0.0 {
        return Err(Error::DegenerateDenominator {
            l,
            l1: num,
            l2: den,
        });
    }
    Ok(num / den)
}

/// `{P_l}` over a mode range for one chemotaxis value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChiSeries {
    pub chi: f64,
    pub results: Vec<BifurcationResult>,
    /// `true` when `P_l` is strictly increasing over the whole range.
    pub monotone: bool,
    /// First `l` with `P_{l} <= P_{l-1}`.
    pub first_descent: Option<u32>,
}

fn first_descent(ls: &[u32], values: &[f64]) -> Option<u32> {
    values
        .windows(2)
        .position(|w| !(w[1] > w[0]))
        .map(|k| ls[k + 1])
}

/// Bifurcation points for every `chi` in `chi_values` over `l_range`
/// (inclusive), computed in parallel and returned sorted by `chi`.
pub fn monotonicity_scan(
    p: &ModelParams,
    l_range: (u32, u32),
    chi_values: &[f64],
) -> Result<Vec<ChiSeries>> {
    let (lo, hi) = l_range;
    if !(2 <= lo && lo <= hi && hi <= SCAN_L_MAX) {
        return domain(format!(
            "mode range must satisfy 2 <= l_lo <= l_hi <= {SCAN_L_MAX}, got ({lo}, {hi})"
        ));
    }
    if chi_values.is_empty() {
        return domain("chi list is empty");
    }
    let ls: Vec<u32> = (lo..=hi).collect();
    let mut out = chi_values
        .par_iter()
        .map(|&chi| {
            let params = ModelParams { chi, ..*p };
            params.validate()?;
            let s = build_steady_state(&params)?;
            let results = ls
                .iter()
                .map(|&l| bifurcation_point(&s, l))
                .collect::<Result<Vec<_>>>()?;
            let values: Vec<f64> = results.iter().map(|r| r.p_l).collect();
            let descent = first_descent(&ls, &values);
            Ok(ChiSeries {
                chi,
                results,
                monotone: descent.is_none(),
                first_descent: descent,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    out.sort_by(|a, b| a.chi.total_cmp(&b.chi));
    Ok(out)
}

/// Limiting bifurcation points over `l_range` and whether they increase.
pub fn limit_curve(l_range: (u32, u32), r: f64, g_inv: f64) -> Result<(Vec<f64>, bool)> {
    let ls: Vec<u32> = (l_range.0..=l_range.1).collect();
    let values = ls
        .iter()
        .map(|&l| limit_bifurcation_point(l, r, g_inv))
        .collect::<Result<Vec<_>>>()?;
    let monotone = first_descent(&ls, &values).is_none();
    Ok((values, monotone))
}

/// Regime of the chemotaxis scan: `beta = 1e4`, `R0 = 1`.
pub const CHEMOTAXIS_SCAN_BETA: f64 = 1e4;
pub const CHEMOTAXIS_SCAN_R0: f64 = 1.0;
/// Chemotaxis values of the preset scan.
pub const CHEMOTAXIS_SCAN_CHIS: [f64; 4] = [1.0, 10.0, 50.0, 100.0];
/// Mode range of the preset scan.
pub const CHEMOTAXIS_SCAN_MODES: (u32, u32) = (2, 16);
/// `(R, G^{-1})` recorded by the extended scan (`G^{-1}` down to `1e-4`):
/// the first configuration where `{P_l}` increases at `chi = 1`, loses
/// monotonicity at `chi = 100`, and the limiting curve increases.
pub const RECORDED_SCAN_CONFIG: (f64, f64) = (1.5, 1e-3);

/// One `(R, G^{-1})` candidate of [`chemotaxis_switch_scan`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SwitchCandidate {
    pub radius: f64,
    pub g_inv: f64,
    pub monotone_low_chi: bool,
    pub monotone_high_chi: bool,
    pub limit_monotone: bool,
    /// All three conditions hold.
    pub reproduces: bool,
}

/// Scans `(R, G^{-1})` in the given order (each `G^{-1}` over all radii) and reports every
/// candidate; the first reproducing one is the configuration to record.
pub fn chemotaxis_switch_scan(
    base: &ModelParams,
    radii: &[f64],
    g_invs: &[f64],
    l_range: (u32, u32),
    chi_low: f64,
    chi_high: f64,
) -> Result<Vec<SwitchCandidate>> {
    let mut out = Vec::new();
    for &g_inv in g_invs {
        for &radius in radii {
            let p = ModelParams {
                g_inv,
                ..base.with_radius(radius)?
            };
            let series = monotonicity_scan(&p, l_range, &[chi_low, chi_high])?;
            let (_, limit_monotone) = limit_curve(l_range, radius, g_inv)?;
            let (lo, hi) = (series[0].monotone, series[1].monotone);
            out.push(SwitchCandidate {
                radius,
                g_inv,
                monotone_low_chi: lo,
                monotone_high_chi: hi,
                limit_monotone,
                reproduces: lo && !hi && limit_monotone,
            });
        }
    }
    Ok(out)
}

/// Parameters of the chemotaxis scan at `(R, G^{-1})`; the inner nutrient
/// value is not part of the regime and is taken from the demo set.
pub fn chemotaxis_scan_params(radius: f64, g_inv: f64) -> Result<ModelParams> {
    let demo = ModelParams::demo();
    ModelParams::new(
        CHEMOTAXIS_SCAN_BETA,
        demo.sigma_ul,
        CHEMOTAXIS_SCAN_R0,
        radius,
        demo.chi,
        g_inv,
        demo.prolif,
    )
}

/// `L2` over `l = 1..=16` on one thin shell `R0 = R - shell_eps`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShellRecord {
    pub shell_eps: f64,
    /// `sigma_s(R) - A` on this shell.
    pub margin: f64,
    pub l2: Vec<f64>,
    pub positive: bool,
    pub increasing: bool,
    /// First `l` at which positivity or monotonicity fails.
    pub violation: Option<u32>,
}

/// Modes examined by [`l2_positivity_check`].
pub const SHELL_L_MAX: u32 = 16;

/// For each `shell_eps`, sets `R0 = R - shell_eps`, verifies the assumption
/// `sigma_s(R) - A > 0`, and records whether `L2` is positive and increasing
/// over `l = 1..=16`.
pub fn l2_positivity_check(p: &ModelParams, eps_values: &[f64]) -> Result<Vec<ShellRecord>> {
    eps_values
        .iter()
        .map(|&shell_eps| {
            if !(shell_eps > 0.0 && shell_eps < p.r) {
                return domain(format!("shell width must lie in (0, R), got {shell_eps}"));
            }
            let params = p.with_r0(p.r - shell_eps)?;
            let s = build_steady_state(&params)?;
            let margin = s.nutrient_apoptosis_margin();
            if !(margin > 0.0) {
                return Err(Error::AssumptionViolated { margin });
            }
            let l2 = (1..=SHELL_L_MAX)
                .map(|l| l1_l2(&s, l).map(|(_, l2)| l2))
                .collect::<Result<Vec<_>>>()?;
            let bad_sign = l2.iter().position(|&v| !(v > 0.0)).map(|k| k as u32 + 1);
            let bad_order = l2
                .windows(2)
                .position(|w| !(w[1] > w[0]))
                .map(|k| k as u32 + 2);
            let violation = match (bad_sign, bad_order) {
                (Some(a), Some(b)) => Some(a.min(b)),
                (a, b) => a.or(b),
            };
            Ok(ShellRecord {
                shell_eps,
                margin,
                positive: bad_sign.is_none(),
                increasing: bad_order.is_none(),
                violation,
                l2,
            })
        })
        .collect()
}

/// How fast `L2` approaches `sigma_s(R) - A` as the shell thins.
///
/// The margin `sigma_s(R) - A` itself vanishes like `shell_eps`, so the
/// meaningful measure is the relative deviation `|L2 / margin - 1|`, which
/// decays linearly; the absolute deviation decays quadratically.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShellExpansion {
    /// Shell widths in decreasing order.
    pub shell_eps: Vec<f64>,
    pub margins: Vec<f64>,
    /// `max_l |L2 - margin|`.
    pub abs_err: Vec<f64>,
    /// `max_l |L2 / margin - 1|`.
    pub rel_err: Vec<f64>,
    /// `ln(rel_err_k / rel_err_{k+1}) / ln(eps_k / eps_{k+1})`.
    pub rel_orders: Vec<f64>,
    /// `max_l |extrapolated L2 / margin - 1|` from a linear extrapolation to
    /// zero width through the two thinnest shells.
    pub extrapolated_dev: f64,
}

/// Expansion check of `L2 = sigma_s(R) - A + O(shell_eps)` over
/// `l = 1..=16` for at least two shell widths.
pub fn l2_margin_expansion(p: &ModelParams, eps_values: &[f64]) -> Result<ShellExpansion> {
    if eps_values.len() < 2 {
        return domain("expansion check needs at least two shell widths");
    }
    let mut eps: Vec<f64> = eps_values.to_vec();
    eps.sort_by(|a, b| b.total_cmp(a));
    if eps.windows(2).any(|w| !(w[0] > w[1])) {
        return domain("shell widths must be distinct");
    }
    let records = l2_positivity_check(p, &eps)?;
    let ratios: Vec<Vec<f64>> = records
        .iter()
        .map(|r| r.l2.iter().map(|v| v / r.margin).collect())
        .collect();
    let abs_err = records
        .iter()
        .map(|r| {
            r.l2.iter()
                .map(|v| (v - r.margin).abs())
                .fold(0.0, f64::max)
        })
        .collect();
    let rel_err: Vec<f64> = ratios
        .iter()
        .map(|row| row.iter().map(|v| (v - 1.0).abs()).fold(0.0, f64::max))
        .collect();
    let rel_orders = rel_err
        .windows(2)
        .zip(eps.windows(2))
        .map(|(e, w)| (e[0] / e[1]).ln() / (w[0] / w[1]).ln())
        .collect();
    let k = eps.len() - 1;
    let (e1, e2) = (eps[k - 1], eps[k]);
    let extrapolated_dev = ratios[k - 1]
        .iter()
        .zip(&ratios[k])
        .map(|(r1, r2)| (r2 + (r2 - r1) * e2 / (e1 - e2) - 1.0).abs())
        .fold(0.0, f64::max);
    Ok(ShellExpansion {
        margins: records.iter().map(|r| r.margin).collect(),
        shell_eps: eps,
        abs_err,
        rel_err,
        rel_orders,
        extrapolated_dev,
    })
}

/// Table with columns `l, chi, P_l, L1, L2, necrosis_I, necrosis_II,
/// surface_tension, chemotaxis_term, monotone_flag`, rows sorted by
/// `(chi, l)`.
pub fn bifurcation_table(series: &[ChiSeries]) -> Table {
    let mut table = Table::new(&[
        "l",
        "chi",
        "P_l",
        "L1",
        "L2",
        "necrosis_I",
        "necrosis_II",
        "surface_tension",
        "chemotaxis_term",
        "monotone_flag",
    ]);
    let mut sorted: Vec<&ChiSeries> = series.iter().collect();
    sorted.sort_by(|a, b| a.chi.total_cmp(&b.chi));
    for s in sorted {
        let mut rows: Vec<&BifurcationResult> = s.results.iter().collect();
        rows.sort_by_key(|r| r.l);
        for r in rows {
            table.push(vec![
                r.l.into(),
                s.chi.into(),
                r.p_l.into(),
                r.l1.into(),
                r.l2.into(),
                r.terms.necrosis_i.into(),
                r.terms.necrosis_ii.into(),
                r.terms.surface_tension.into(),
                r.terms.chemotaxis.into(),
                Cell::Bool(s.monotone),
            ]);
        }
    }
    table
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rel_diff;

    fn demo() -> SteadyState {
        build_steady_state(&ModelParams::demo()).unwrap()
    }

    #[test]
    fn curvature_coefficients() {
        assert_eq!(curvature_linearization(1, 2.0).unwrap().kappa1_coeff, 0.0);
        assert_eq!(curvature_linearization(0, 2.0).unwrap().kappa1_coeff, -0.25);
        let c = curvature_linearization(3, 2.0).unwrap();
        assert_eq!(c.kappa0 * c.radius, 1.0);
        assert!(curvature_linearization(2, 0.0).is_err());
        assert!((exact_curvature(4, 2.0, 0.0, 0.3) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn mode_zero_is_trivial() {
        let s = demo();
        let b = bifurcation_point(&s, 0).unwrap();
        assert_eq!(b.p_l, 0.0);
        assert_eq!(b.l1, 0.0);
        let (grouped, split) = bifurcation_function_paths(&s, 0, 2.0).unwrap();
        assert!(rel_diff(grouped, split, 1e-300) < 1e-12);
    }

    #[test]
    fn translation_mode_without_chemotaxis() {
        let p = ModelParams {
            chi: 0.0,
            ..ModelParams::demo()
        };
        let s = build_steady_state(&p).unwrap();
        let b = bifurcation_point(&s, 1).unwrap();
        assert!(b.translation_mode);
        assert_eq!(b.terms.surface_tension, 0.0);
        assert_eq!(b.p_l, 0.0);
    }

    #[test]
    fn root_of_bifurcation_function() {
        let s = demo();
        for l in 2..8 {
            let b = bifurcation_point(&s, l).unwrap();
            let f = bifurcation_function(&s, l, b.p_l).unwrap();
            assert!(f.abs() < 1e-10 * b.l1.abs(), "l = {l}: F = {f:e}");
            assert!(rel_diff(b.l2, l2_via_g(&s, l).unwrap(), 1e-300) < 1e-12);
        }
    }

    #[test]
    fn limit_point_trivial_modes() {
        assert_eq!(limit_bifurcation_point(0, 2.0, 1.0).unwrap(), 0.0);
        assert_eq!(limit_bifurcation_point(1, 2.0, 1.0).unwrap(), 0.0);
        assert!(limit_bifurcation_point(2, 2.0, 1.0).unwrap() > 0.0);
    }

    #[test]
    fn scan_validates_inputs_and_sorts() {
        let p = ModelParams::demo();
        assert!(monotonicity_scan(&p, (1, 5), &[1.0]).is_err());
        assert!(monotonicity_scan(&p, (2, 40), &[1.0]).is_err());
        assert!(monotonicity_scan(&p, (2, 5), &[]).is_err());
        let out = monotonicity_scan(&p, (2, 6), &[5.0, 0.0, 1.0]).unwrap();
        let chis: Vec<f64> = out.iter().map(|s| s.chi).collect();
        assert_eq!(chis, vec![0.0, 1.0, 5.0]);
        let t = bifurcation_table(&out);
        assert_eq!(t.rows.len(), 15);
    }

    #[test]
    fn shell_expansion_is_linear_in_width() {
        let p = ModelParams::new(1.0, 0.0, 1.0, 2.0, 1.0, 1.0, 1.0).unwrap();
        let e = l2_margin_expansion(&p, &[0.1, 0.2, 0.05]).unwrap();
        assert_eq!(e.shell_eps, vec![0.2, 0.1, 0.05]);
        assert!(e.rel_err.windows(2).all(|w| w[1] < w[0]));
        assert!(e.rel_orders.iter().all(|&o| (0.8..=1.3).contains(&o)));
        assert!(e.extrapolated_dev < 1e-2);
        assert!(l2_margin_expansion(&p, &[0.1]).is_err());
        assert!(l2_margin_expansion(&p, &[0.1, 0.1]).is_err());
    }

    #[test]
    fn shell_check_reports_violated_assumption() {
        // Weak supply with a rich core: the nutrient decreases outward, so its
        // boundary value lies below its area average, which is A.
        let p = ModelParams::new(0.01, 0.9, 0.5, 2.0, 1.0, 1.0, 1.0).unwrap();
        let out = l2_positivity_check(&p, &[1.0]);
        assert!(
            matches!(out, Err(Error::AssumptionViolated { .. })),
            "{out:?}"
        );
    }
}
