//! Radially symmetric steady state on the annulus `R0 <= r <= R`.
//!
//! The nutrient solves `sigma'' + sigma'/r - sigma = 0` with `sigma(R0) =
//! sigma_ul` and `sigma'(R) = beta (1 - sigma(R))`, so `sigma = A1 I0 + A2 K0
//! = sigma_ul E + F`. Every quotient shares one denominator, which is
//! evaluated once. Products such as `K0(R0) I0(r)` are formed from logarithms
//! and divided by `I0(R) K0(R0)` before subtracting, so nothing overflows and
//! the differences `I0(R) K0(r) - K0(R) I0(r)` are computed with `expm1`.
//!
//! The pressure is `p = -(P - chi) sigma + C1 + C2 ln r + P A r^2 / 4` with
//! the apoptosis rate `A = 2 (R sigma'(R) - R0 sigma'(R0)) / (R^2 - R0^2)`
//! fixed by the flux balance.

use crate::bessel::{besseli, besselk, log_besseli, log_besselk, log_deriv_k, ratio_i};
use crate::error::{domain, Error, Result};
use crate::export::{Cell, Table};
use crate::nondim::{ApoptosisSource, ModelParams};
use crate::numerics::{diff_exp, linspace};
use roots::{find_root_brent, SimpleConvergency};
use serde::Serialize;

/// Relative slack allowed when checking that `r` lies in `[R0, R]`.
const RADIUS_SLACK: f64 = 1e-12;
/// Relative mismatch tolerated between a prescribed apoptosis rate and the
/// rate implied by the geometry.
const PRESCRIBED_APOPT_TOL: f64 = 1e-8;
/// Sample count for the bracket scan in [`solve_radius`].
const RADIUS_SCAN_POINTS: usize = 64;

/// Logarithms of the order-0/1 Bessel data at one radius.
#[derive(Debug, Clone, Copy)]
struct Log0 {
    ln_i0: f64,
    ln_k0: f64,
    /// `I1 / I0`
    ratio_i: f64,
    /// `K1 / K0`
    ratio_k: f64,
}

impl Log0 {
    fn at(x: f64) -> Result<Self> {
        Ok(Log0 {
            ln_i0: log_besseli(0, x)?,
            ln_k0: log_besselk(0, x)?,
            ratio_i: ratio_i(0, x),
            ratio_k: -log_deriv_k(0, x)?,
        })
    }
}

/// Normalized nutrient quotients for fixed `(beta, sigma_ul, R0, R)`. All
/// numerators and the denominator are divided by `I0(R) K0(R0)`.
#[derive(Debug, Clone, Copy)]
struct Nutrient {
    beta: f64,
    sigma_ul: f64,
    r0: f64,
    r: f64,
    at_r0: Log0,
    at_r: Log0,
    /// `ln(I0(R) K0(R0))`
    norm: f64,
    /// Shared denominator divided by `exp(norm)`.
    den: f64,
}

/// `(E, F, E', F')` at one radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EfEval {
    pub e: f64,
    pub f: f64,
    pub e_prime: f64,
    pub f_prime: f64,
}

impl Nutrient {
    fn new(beta: f64, sigma_ul: f64, r0: f64, r: f64) -> Result<Self> {
        if !(r0 > 0.0 && r > r0) {
            return domain(format!("need 0 < R0 < R, got R0 = {r0}, R = {r}"));
        }
        let at_r0 = Log0::at(r0)?;
        let at_r = Log0::at(r)?;
        let norm = at_r.ln_i0 + at_r0.ln_k0;
        // I1(R) K0(R0) + K1(R) I0(R0) + beta (I0(R) K0(R0) - K0(R) I0(R0))
        let den = at_r.ratio_i + (at_r.ln_k0 + at_r.ratio_k.ln() + at_r0.ln_i0 - norm).exp()
            - beta * (at_r.ln_k0 + at_r0.ln_i0 - norm).exp_m1();
        if !(den > 0.0 && den.is_finite()) {
            return Err(Error::Numeric(format!(
                "steady-state denominator is not positive ({den:e})"
            )));
        }
        Ok(Nutrient {
            beta,
            sigma_ul,
            r0,
            r,
            at_r0,
            at_r,
            norm,
            den,
        })
    }

    fn ef(&self, x: f64) -> Result<EfEval> {
        let (a, b, n, beta) = (&self.at_r0, &self.at_r, self.norm, self.beta);
        let c = Log0::at(x)?;
        // K0(x) / K0(R0) and I0(x) / I0(R)
        let k_rel = (c.ln_k0 - a.ln_k0).exp();
        let i_rel = (c.ln_i0 - b.ln_i0).exp();
        // K1(R) I0(x), K0(R) I0(x), I0(R0) K0(x), all over I0(R) K0(R0)
        let k1r_i0x = (b.ln_k0 + b.ratio_k.ln() + c.ln_i0 - n).exp();
        let k0r_i0x_ln = b.ln_k0 + c.ln_i0 - n;
        let i0r0_k0x_ln = a.ln_i0 + c.ln_k0 - n;

        let num_e = b.ratio_i * k_rel + k1r_i0x + beta * diff_exp(c.ln_k0 - a.ln_k0, k0r_i0x_ln);
        let num_f = beta * diff_exp(c.ln_i0 - b.ln_i0, i0r0_k0x_ln);
        let d_num_e = -b.ratio_i * k_rel * c.ratio_k + k1r_i0x * c.ratio_i
            - beta * (k_rel * c.ratio_k + k0r_i0x_ln.exp() * c.ratio_i);
        let d_num_f = beta * (i_rel * c.ratio_i + i0r0_k0x_ln.exp() * c.ratio_k);
        Ok(EfEval {
            e: num_e / self.den,
            f: num_f / self.den,
            e_prime: d_num_e / self.den,
            f_prime: d_num_f / self.den,
        })
    }

    /// `(sigma, sigma')`.
    fn sigma(&self, x: f64) -> Result<(f64, f64)> {
        let ef = self.ef(x)?;
        Ok((
            self.sigma_ul * ef.e + ef.f,
            self.sigma_ul * ef.e_prime + ef.f_prime,
        ))
    }

    fn apoptosis(&self) -> Result<f64> {
        let (_, d0) = self.sigma(self.r0)?;
        let (_, d1) = self.sigma(self.r)?;
        Ok(2.0 * (self.r * d1 - self.r0 * d0) / (self.r * self.r - self.r0 * self.r0))
    }
}

/// Closed-form steady state for one parameter bundle. Immutable once built.
#[derive(Debug, Clone, Copy)]
pub struct SteadyState {
    pub params: ModelParams,
    /// Coefficient of `I0` in the nutrient.
    pub a1: f64,
    /// Coefficient of `K0` in the nutrient.
    pub a2: f64,
    /// Constant term of the pressure.
    pub c1: f64,
    /// Coefficient of `ln r` in the pressure.
    pub c2: f64,
    /// Apoptosis rate implied by the flux balance.
    pub apopt: f64,
    /// Shared denominator `K0(R0)(I1(R) + beta I0(R)) + I0(R0)(K1(R) - beta K0(R))`.
    pub denom: f64,
    nut: Nutrient,
}

/// Scalar summary of a steady state, for reports.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SteadySummary {
    pub a1: f64,
    pub a2: f64,
    pub c1: f64,
    pub c2: f64,
    pub apopt: f64,
    pub denom: f64,
    pub sigma_at_r: f64,
    pub sigma_prime_at_r: f64,
}

/// Builds the steady state. A geometry-derived apoptosis rate is always
/// computed; if the bundle carries a prescribed rate that disagrees with the
/// geometry, the radius has to be solved for first (see [`solve_radius`]).
pub fn build_steady_state(p: &ModelParams) -> Result<SteadyState> {
    p.validate()?;
    let nut = Nutrient::new(p.beta, p.sigma_ul, p.r0, p.r)?;
    let apopt = nut.apoptosis()?;
    if p.apopt_source == ApoptosisSource::Prescribed
        && (apopt - p.apopt).abs() > PRESCRIBED_APOPT_TOL * apopt.abs().max(1.0)
    {
        return domain(format!(
            "prescribed apoptosis {} does not match the geometry (R = {} gives {}); \
             solve for the radius first",
            p.apopt, p.r, apopt
        ));
    }

    let (r0, r, beta, su) = (p.r0, p.r, p.beta, p.sigma_ul);
    let (i0r, i1r, k0r, k1r) = (
        besseli(0, r)?,
        besseli(1, r)?,
        besselk(0, r)?,
        besselk(1, r)?,
    );
    let (i0r0, k0r0) = (besseli(0, r0)?, besselk(0, r0)?);
    let denom = k0r0 * (i1r + beta * i0r) + i0r0 * (k1r - beta * k0r);
    let a1 = (su * (k1r - beta * k0r) + beta * k0r0) / denom;
    let a2 = (su * (i1r + beta * i0r) - beta * i0r0) / denom;

    let mut s = SteadyState {
        params: ModelParams { apopt, ..*p },
        a1,
        a2,
        c1: 0.0,
        c2: 0.0,
        apopt,
        denom,
        nut,
    };
    s.set_pressure_constants();
    Ok(s)
}

impl SteadyState {
    fn set_pressure_constants(&mut self) {
        let p = &self.params;
        let (r0, r) = (p.r0, p.r);
        let pa = p.prolif * self.apopt;
        let (_, d0) = self.nut.sigma(r0).expect("R0 is in range");
        let (sr, _) = self.nut.sigma(r).expect("R is in range");
        self.c2 = p.prolif * d0 * r0 - pa * r0 * r0 / 2.0;
        self.c1 = p.g_inv / r + (p.prolif - p.chi) * sr - self.c2 * r.ln() - pa * r * r / 4.0;
    }

    /// The same steady state with a different proliferation rate (only the
    /// pressure depends on it).
    pub fn with_prolif(&self, prolif: f64) -> SteadyState {
        let mut s = *self;
        s.params.prolif = prolif;
        s.set_pressure_constants();
        s
    }

    fn check_radius(&self, r: f64) -> Result<()> {
        let (r0, rr) = (self.params.r0, self.params.r);
        let slack = RADIUS_SLACK * rr;
        if !(r >= r0 - slack && r <= rr + slack) {
            return domain(format!("radius {r} outside [{r0}, {rr}]"));
        }
        Ok(())
    }

    /// `sigma(R) - A`, the quantity assumed positive in the thin-shell
    /// analysis of `L2`.
    pub fn nutrient_apoptosis_margin(&self) -> f64 {
        self.nut.sigma(self.params.r).expect("R is in range").0 - self.apopt
    }

    /// `(A1 I0(r) + A2 K0(r), A1 I1(r) - A2 K1(r))`, the coefficient form of
    /// the nutrient, kept as an independent evaluation path.
    pub fn sigma_from_coefficients(&self, r: f64) -> Result<(f64, f64)> {
        self.check_radius(r)?;
        Ok((
            self.a1 * besseli(0, r)? + self.a2 * besselk(0, r)?,
            self.a1 * besseli(1, r)? - self.a2 * besselk(1, r)?,
        ))
    }

    /// `sigma''(r)` from `I1' = I0 - I1/r` and `K1' = -K0 - K1/r`, i.e.
    /// without the ODE identity.
    pub fn sigma_second_direct(&self, r: f64) -> Result<f64> {
        self.check_radius(r)?;
        let (di1, dk1) = crate::bessel::bessel_derivs(1, r)?;
        Ok(self.a1 * di1 - self.a2 * dk1)
    }

    pub fn summary(&self) -> SteadySummary {
        let (s, d) = self.nut.sigma(self.params.r).expect("R is in range");
        SteadySummary {
            a1: self.a1,
            a2: self.a2,
            c1: self.c1,
            c2: self.c2,
            apopt: self.apopt,
            denom: self.denom,
            sigma_at_r: s,
            sigma_prime_at_r: d,
        }
    }
}

/// `(sigma, sigma', sigma'')` at `r`; the second derivative comes from the
/// ODE, `sigma'' = sigma - sigma'/r`.
pub fn sigma_eval(s: &SteadyState, r: f64) -> Result<(f64, f64, f64)> {
    s.check_radius(r)?;
    let (v, d) = s.nut.sigma(r)?;
    Ok((v, d, v - d / r))
}

/// `(E, F, E', F')` at `r`, with `sigma = sigma_ul E + F`.
pub fn ef_eval(s: &SteadyState, r: f64) -> Result<(f64, f64, f64, f64)> {
    s.check_radius(r)?;
    let ef = s.nut.ef(r)?;
    Ok((ef.e, ef.f, ef.e_prime, ef.f_prime))
}

/// `(p, p')` at `r`.
pub fn pressure_eval(s: &SteadyState, r: f64) -> Result<(f64, f64)> {
    s.check_radius(r)?;
    let p = &s.params;
    let pa = p.prolif * s.apopt;
    let (sig, dsig) = s.nut.sigma(r)?;
    let value = -(p.prolif - p.chi) * sig + s.c1 + s.c2 * r.ln() + pa * r * r / 4.0;
    let deriv = -(p.prolif - p.chi) * dsig + s.c2 / r + pa * r / 2.0;
    Ok((value, deriv))
}

/// Apoptosis rate that balances the flux for outer radius `r` (all other
/// parameters from `p`). Non-negative because `r sigma'(r)` is nondecreasing.
pub fn apoptosis_of_radius(p: &ModelParams, r: f64) -> Result<f64> {
    if !(r > p.r0) {
        return domain(format!(
            "apoptosis needs R > R0, got R = {r}, R0 = {}",
            p.r0
        ));
    }
    Nutrient::new(p.beta, p.sigma_ul, p.r0, r)?.apoptosis()
}

/// Outer radius in `bracket` whose flux-balance apoptosis rate equals
/// `apopt_target`. The bracket is scanned first and Brent's method is run on
/// the first sub-interval with a sign change.
pub fn solve_radius(p: &ModelParams, apopt_target: f64, bracket: (f64, f64)) -> Result<f64> {
    let (lo, hi) = if bracket.0 <= bracket.1 {
        bracket
    } else {
        (bracket.1, bracket.0)
    };
    if !(lo > p.r0) {
        return domain(format!(
            "radius bracket [{lo}, {hi}] must lie above R0 = {}",
            p.r0
        ));
    }
    let grid = linspace(lo, hi, RADIUS_SCAN_POINTS);
    let values = grid
        .iter()
        .map(|&r| apoptosis_of_radius(p, r))
        .collect::<Result<Vec<_>>>()?;
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let g = |a: f64| a - apopt_target;

    for (k, (&v, &r)) in values.iter().zip(&grid).enumerate() {
        if g(v) == 0.0 {
            return Ok(r);
        }
        if k + 1 < grid.len() && g(v) * g(values[k + 1]) < 0.0 {
            let f = |x: f64| apoptosis_of_radius(p, x).map(g).unwrap_or(f64::NAN);
            let mut conv = SimpleConvergency {
                eps: 1e-15,
                max_iter: 200,
            };
            let root = find_root_brent(r, grid[k + 1], f, &mut conv)
                .map_err(|e| Error::Numeric(format!("radius root search failed: {e:?}")))?;
            let residual = g(apoptosis_of_radius(p, root)?);
            if residual.abs() > 1e-10 {
                return Err(Error::Numeric(format!(
                    "radius root residual {residual:e} exceeds 1e-10"
                )));
            }
            return Ok(root);
        }
    }
    Err(Error::NoRoot {
        target: apopt_target,
        min,
        max,
    })
}

/// Closed-form profiles in the limits `beta -> 0`, `beta -> inf` and
/// `beta -> inf, R0 -> 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SteadyLimits {
    /// `E` as `beta -> 0` (finite `R0`).
    pub e0: f64,
    /// `E` as `beta -> inf` (finite `R0`).
    pub e_inf: f64,
    /// `F` as `beta -> inf` (finite `R0`).
    pub f_inf: f64,
    /// `I0(r) / I0(R)`.
    pub sigma: f64,
    /// `I1(r) / I0(R)`.
    pub sigma_prime: f64,
}

/// Limit profiles at `0 < r <= R`. `e0`, `e_inf`, `f_inf` use the bundle's
/// `R0`; `sigma`, `sigma_prime` are the `R0 -> 0`, `beta -> inf` nutrient.
pub fn steady_limits(p: &ModelParams, r: f64) -> Result<SteadyLimits> {
    if !(r > 0.0 && r <= p.r * (1.0 + RADIUS_SLACK)) {
        return domain(format!("limit profile needs 0 < r <= R = {}, got {r}", p.r));
    }
    let a = Log0::at(p.r0)?;
    let b = Log0::at(p.r)?;
    let c = Log0::at(r)?;
    let n = b.ln_i0 + a.ln_k0;

    let k1r = b.ln_k0 + b.ratio_k.ln();
    // I1(R) K0(x) + K1(R) I0(x), over I0(R) K0(R0)
    let e0_num = b.ratio_i * (c.ln_k0 - a.ln_k0).exp() + (k1r + c.ln_i0 - n).exp();
    let e0_den = b.ratio_i + (k1r + a.ln_i0 - n).exp();
    let inf_den = -(b.ln_k0 + a.ln_i0 - n).exp_m1();
    let e_inf = diff_exp(c.ln_k0 - a.ln_k0, b.ln_k0 + c.ln_i0 - n) / inf_den;
    let f_inf = diff_exp(c.ln_i0 - b.ln_i0, a.ln_i0 + c.ln_k0 - n) / inf_den;
    let sigma = (c.ln_i0 - b.ln_i0).exp();
    Ok(SteadyLimits {
        e0: e0_num / e0_den,
        e_inf,
        f_inf,
        sigma,
        sigma_prime: sigma * c.ratio_i,
    })
}

/// Apoptosis rate in the `beta -> inf, R0 -> 0` limit, `(2/R) I1(R)/I0(R)`.
pub fn limit_apoptosis(r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return domain(format!("limit apoptosis needs R > 0, got {r}"));
    }
    Ok(2.0 / r * ratio_i(0, r))
}

/// Two readings of the limiting pressure: one with `I1(R)` in the
/// denominator and the one obtained by differentiating the nutrient limit.
/// Both use `A = (2/R) I1(R)/I0(R)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PressureLimitCandidates {
    pub p_i1_denominator: f64,
    pub p_consistent: f64,
    pub dp_i1_denominator: f64,
    pub dp_consistent: f64,
}

/// Evaluates both limiting-pressure candidates at `0 < r <= R`.
pub fn pressure_limit_candidates(p: &ModelParams, r: f64) -> Result<PressureLimitCandidates> {
    let lim = steady_limits(p, r)?;
    let big_r = p.r;
    let apopt = limit_apoptosis(big_r)?;
    let pa = p.prolif * apopt;
    let pc = p.prolif - p.chi;
    let i0_over_i1r = (log_besseli(0, r)? - log_besseli(1, big_r)?).exp();
    let base = p.g_inv / big_r - pa / 4.0 * (big_r * big_r - r * r);
    Ok(PressureLimitCandidates {
        p_i1_denominator: base + pc * (1.0 - i0_over_i1r),
        p_consistent: base + pc * (1.0 - lim.sigma),
        dp_i1_denominator: pa / 2.0 * r - pc * i0_over_i1r,
        dp_consistent: pa / 2.0 * r - pc * lim.sigma_prime,
    })
}

/// Profile table on `n + 1` equally spaced radii: `r, sigma, sigma_prime, p,
/// p_prime, E, F`, optionally followed by `sigma_limit, sigma_prime_limit`.
pub fn profile_table(s: &SteadyState, n: usize, with_limit: bool) -> Result<Table> {
    let mut headers = vec!["r", "sigma", "sigma_prime", "p", "p_prime", "E", "F"];
    if with_limit {
        headers.extend(["sigma_limit", "sigma_prime_limit"]);
    }
    let mut table = Table::new(&headers);
    for r in linspace(s.params.r0, s.params.r, n.max(1)) {
        let (sig, dsig, _) = sigma_eval(s, r)?;
        let (pv, dp) = pressure_eval(s, r)?;
        let (e, f, _, _) = ef_eval(s, r)?;
        let mut row: Vec<Cell> = vec![
            r.into(),
            sig.into(),
            dsig.into(),
            pv.into(),
            dp.into(),
            e.into(),
            f.into(),
        ];
        if with_limit {
            let lim = steady_limits(&s.params, r)?;
            row.push(lim.sigma.into());
            row.push(lim.sigma_prime.into());
        }
        table.push(row);
    }
    Ok(table)
}
