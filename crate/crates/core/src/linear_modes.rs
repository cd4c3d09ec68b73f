//! Radial factors of the linearized perturbation for boundary mode
//! `R1 = cos(l theta)`.
//!
//! The nutrient perturbation is `Q_l(r) cos(l theta)` with
//! `r^2 Q'' + r Q' - (r^2 + l^2) Q = 0`, `Q(R0) = 0` and
//! `sigma_s''(R) + Q'(R) = -beta (sigma_s'(R) + Q(R))`. Its solution is
//! `Q_l = B1 I_l + B2 K_l = -(sigma_s''(R) + beta sigma_s'(R)) G_beta`, and
//! both forms are evaluated independently.
//!
//! `G_beta = (K_l(R0) I_l(r) - I_l(R0) K_l(r)) / den` is evaluated after
//! dividing numerator and denominator by `K_l(R0) I_l(R)`, using logarithms of
//! the Bessel values, so `K_l(R0) ~ R0^{-l}` never overflows.

use crate::bessel::{
    besseli, besselk, log_besseli, log_besselk, log_deriv_i, log_deriv_k, ratio_i,
};
use crate::error::{domain, Error, Result};
use crate::export::{Cell, Table};
use crate::numerics::{diff_exp, linspace, pow_ratio};
use crate::steady_state::{pressure_eval, sigma_eval, SteadyState};
use serde::Serialize;

const RADIUS_SLACK: f64 = 1e-12;

/// Logarithmic order-`l` Bessel data at one radius.
#[derive(Debug, Clone, Copy)]
struct LogL {
    ln_i: f64,
    ln_k: f64,
    /// `I_l' / I_l`
    psi_i: f64,
    /// `K_l' / K_l` (negative)
    psi_k: f64,
}

impl LogL {
    fn at(l: u32, x: f64) -> Result<Self> {
        Ok(LogL {
            ln_i: log_besseli(l, x)?,
            ln_k: log_besselk(l, x)?,
            psi_i: log_deriv_i(l, x)?,
            psi_k: log_deriv_k(l, x)?,
        })
    }
}

/// Radial mode `l` attached to a steady state.
#[derive(Debug, Clone, Copy)]
pub struct ModeSolution {
    pub l: u32,
    /// Coefficient of `I_l` (may overflow to infinity for very high `l` and
    /// tiny `R0`; the `G_beta` path is unaffected).
    pub b1: f64,
    /// Coefficient of `K_l`.
    pub b2: f64,
    /// Harmonic pressure coefficient of `r^l`, set by [`ModeSolution::with_harmonics`].
    pub d1: Option<f64>,
    /// Harmonic pressure coefficient of `r^{-l}`.
    pub d2: Option<f64>,
    pub steady: SteadyState,
    at_r0: LogL,
    at_r: LogL,
    /// `ln(K_l(R0) I_l(R))`
    norm: f64,
    /// `K_l(R0) I_l'(R) - I_l(R0) K_l'(R)` over `exp(norm)`.
    dnum_r: f64,
    /// `K_l(R0) I_l(R) - I_l(R0) K_l(R)` over `exp(norm)`.
    num_r: f64,
    /// `sigma_s''(R) + beta sigma_s'(R)`.
    forcing: f64,
}

/// `G_beta` together with the two limiting quotients `G_0`, `G_inf`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GVariants {
    pub g: f64,
    pub g_prime: f64,
    pub g0: f64,
    pub g_inf: f64,
}

/// Builds the radial factor for mode `l`.
pub fn build_mode(s: &SteadyState, l: u32) -> Result<ModeSolution> {
    let p = &s.params;
    let at_r0 = LogL::at(l, p.r0)?;
    let at_r = LogL::at(l, p.r)?;
    let norm = at_r0.ln_k + at_r.ln_i;
    let cross_ln = at_r0.ln_i + at_r.ln_k - norm;
    let num_r = -cross_ln.exp_m1();
    let dnum_r = at_r.psi_i - cross_ln.exp() * at_r.psi_k;
    let den = dnum_r + p.beta * num_r;
    if !(den > 0.0 && den.is_finite()) {
        return Err(Error::Numeric(format!(
            "mode {l}: G_beta denominator is not positive ({den:e})"
        )));
    }
    let (_, ds, dds) = sigma_eval(s, p.r)?;
    let forcing = dds + p.beta * ds;
    // B = (sigma'' + beta sigma') / (I_l(R0)(K_l' + beta K_l)(R) - K_l(R0)(I_l' + beta I_l)(R))
    //   = -forcing / (den * K_l(R0) I_l(R))
    let b1 = -forcing * (-at_r.ln_i).exp() / den;
    let b2 = forcing * (at_r0.ln_i - norm).exp() / den;
    Ok(ModeSolution {
        l,
        b1,
        b2,
        d1: None,
        d2: None,
        steady: *s,
        at_r0,
        at_r,
        norm,
        dnum_r,
        num_r,
        forcing,
    })
}

impl ModeSolution {
    fn check_radius(&self, r: f64) -> Result<()> {
        let (r0, rr) = (self.steady.params.r0, self.steady.params.r);
        let slack = RADIUS_SLACK * rr;
        if !(r >= r0 - slack && r <= rr + slack) {
            return domain(format!("radius {r} outside [{r0}, {rr}]"));
        }
        Ok(())
    }

    /// Normalized `(num(r), num'(r))` of `G_beta`.
    fn numerators(&self, r: f64) -> Result<(f64, f64)> {
        let c = LogL::at(self.l, r)?;
        let i_rel = c.ln_i - self.at_r.ln_i;
        let cross = self.at_r0.ln_i + c.ln_k - self.norm;
        let num = diff_exp(i_rel, cross);
        let dnum = i_rel.exp() * c.psi_i - cross.exp() * c.psi_k;
        Ok((num, dnum))
    }

    /// `sigma_s''(R) + beta sigma_s'(R)`, the forcing of the mode equation.
    pub fn forcing(&self) -> f64 {
        self.forcing
    }

    /// `G_beta`, `G_beta'`, `G_0` and `G_inf` at `r`.
    pub fn g_variants(&self, r: f64) -> Result<GVariants> {
        self.check_radius(r)?;
        let (num, dnum) = self.numerators(r)?;
        let den = self.dnum_r + self.steady.params.beta * self.num_r;
        Ok(GVariants {
            g: num / den,
            g_prime: dnum / den,
            g0: num / self.dnum_r,
            g_inf: num / self.num_r,
        })
    }

    /// `(Q_l, Q_l')` through `G_beta`.
    pub fn q_eval(&self, r: f64) -> Result<(f64, f64)> {
        let g = self.g_variants(r)?;
        Ok((-self.forcing * g.g, -self.forcing * g.g_prime))
    }

    /// `(Q_l, Q_l')` through `B1 I_l + B2 K_l` with plain Bessel values.
    pub fn q_eval_coefficients(&self, r: f64) -> Result<(f64, f64)> {
        self.check_radius(r)?;
        let (di, dk) = crate::bessel::bessel_derivs(self.l, r)?;
        Ok((
            self.b1 * besseli(self.l, r)? + self.b2 * besselk(self.l, r)?,
            self.b1 * di + self.b2 * dk,
        ))
    }

    /// The same mode with `D1`, `D2` filled in for proliferation rate `prolif`.
    pub fn with_harmonics(&self, prolif: f64) -> Result<ModeSolution> {
        let (d1, d2) = harmonic_coefficients(self, prolif)?;
        Ok(ModeSolution {
            d1: Some(d1),
            d2: Some(d2),
            ..*self
        })
    }
}

/// `(G_beta(r), G_beta'(r))`.
pub fn g_beta_eval(m: &ModeSolution, r: f64) -> Result<(f64, f64)> {
    let g = m.g_variants(r)?;
    Ok((g.g, g.g_prime))
}

/// `a_l(r) = G_beta'(r; l) / G_beta(r; l) - l / r` for `l = 1..=l_max`.
pub fn a_l_sequence(s: &SteadyState, r: f64, l_max: u32) -> Result<Vec<f64>> {
    let r0 = s.params.r0;
    if !(r > r0) {
        return domain(format!("a_l needs r > R0 = {r0}, got {r}"));
    }
    if l_max < 1 {
        return domain("a_l needs l_max >= 1");
    }
    (1..=l_max)
        .map(|l| {
            let m = build_mode(s, l)?;
            let (num, dnum) = {
                m.check_radius(r)?;
                m.numerators(r)?
            };
            Ok(dnum / num - f64::from(l) / r)
        })
        .collect()
}

/// `b_l = G_beta'(.; l)` at `R0` and at `R`, for `l = 1..=l_max`.
pub fn b_l_sequence(s: &SteadyState, l_max: u32) -> Result<(Vec<f64>, Vec<f64>)> {
    if l_max < 1 {
        return domain("b_l needs l_max >= 1");
    }
    let mut at_r0 = Vec::with_capacity(l_max as usize);
    let mut at_r = Vec::with_capacity(l_max as usize);
    for l in 1..=l_max {
        let m = build_mode(s, l)?;
        at_r0.push(g_beta_eval(&m, s.params.r0)?.1);
        at_r.push(g_beta_eval(&m, s.params.r)?.1);
    }
    Ok((at_r0, at_r))
}

/// Right-hand side of the outer harmonic condition,
/// `G^{-1}(l^2 - 1)/R^2 - p_s'(R) + (P - chi) Q_l(R)`.
fn outer_pressure_data(m: &ModeSolution, prolif: f64) -> Result<f64> {
    let s = m.steady.with_prolif(prolif);
    let p = &s.params;
    let l = f64::from(m.l);
    let (_, dp) = pressure_eval(&s, p.r)?;
    let (q, _) = m.q_eval(p.r)?;
    Ok(p.g_inv * (l * l - 1.0) / (p.r * p.r) - dp + (prolif - p.chi) * q)
}

/// `(D1, D2)` solving `l (D1 R0^{l-1} - D2 R0^{-(l+1)}) = P Q_l'(R0)` and
/// `D1 R^l + D2 R^{-l} = G^{-1}(l^2-1)/R^2 - p_s'(R) + (P - chi) Q_l(R)`.
pub fn harmonic_coefficients(m: &ModeSolution, prolif: f64) -> Result<(f64, f64)> {
    if m.l == 0 {
        return Err(Error::Misuse(
            "harmonic coefficients are defined for l >= 1; use l0_mode".into(),
        ));
    }
    let p = &m.steady.params;
    let (r0, r) = (p.r0, p.r);
    let l = f64::from(m.l);
    let (_, dq0) = m.q_eval(r0)?;
    let t = prolif / l * dq0;
    let s = outer_pressure_data(m, prolif)?;
    let q = pow_ratio(r0, r, 2.0 * l);
    // R0^{l+1} R^{-2l} = R0 (R0/R)^l R^{-l}
    let r_neg_l = (-l * r.ln()).exp();
    let d1 = (r0 * pow_ratio(r0, r, l) * r_neg_l * t + r_neg_l * s) / (1.0 + q);
    // R^l (R0/R)^{2l} = R0^{2l} R^{-l}
    let d2 = (-r0.powf(l + 1.0) * t + (2.0 * l * r0.ln() - l * r.ln()).exp() * s) / (1.0 + q);
    Ok((d1, d2))
}

/// `(D1 r^l + D2 r^{-l}, l (D1 r^{l-1} - D2 r^{-(l+1)}))`.
pub fn harmonic_eval(d1: f64, d2: f64, l: u32, r: f64) -> (f64, f64) {
    let lf = f64::from(l);
    let rp = r.powf(lf);
    let rm = r.powf(-lf);
    (d1 * rp + d2 * rm, lf * (d1 * rp - d2 * rm) / r)
}

/// `R0 -> 0` limit of `D1 r^l + D2 r^{-l}` and of its radial derivative:
/// the outer data times `(r/R)^l` (and times `l/r` for the derivative).
pub fn harmonic_limit(m: &ModeSolution, prolif: f64, r: f64) -> Result<(f64, f64)> {
    let s = outer_pressure_data(m, prolif)?;
    let lf = f64::from(m.l);
    let v = s * pow_ratio(r, m.steady.params.r, lf);
    Ok((v, v * lf / r))
}

/// `l = 0`: `p_1 = -G^{-1}/R^2 - p_s'(R)` and `dp_1/dr = -(P - chi) Q_0'(R)`.
pub fn l0_mode(m: &ModeSolution, prolif: f64) -> Result<(f64, f64)> {
    if m.l != 0 {
        return Err(Error::Misuse(format!(
            "l0_mode called with l = {}; use harmonic_coefficients",
            m.l
        )));
    }
    let s = m.steady.with_prolif(prolif);
    let p = &s.params;
    let (_, dp) = pressure_eval(&s, p.r)?;
    let (_, dq) = m.q_eval(p.r)?;
    Ok((-p.g_inv / (p.r * p.r) - dp, -(prolif - p.chi) * dq))
}

/// `beta -> inf, R0 -> 0` limits `Q = -(I1(R)/I0(R)) I_l(r)/I_l(R)` and its
/// derivative, for `l >= 2` and `0 < r <= R`.
pub fn mode_limits(l: u32, r_outer: f64, r: f64) -> Result<(f64, f64)> {
    if l < 2 {
        return domain(format!("mode limit holds for l >= 2, got l = {l}"));
    }
    if !(r > 0.0 && r <= r_outer * (1.0 + RADIUS_SLACK)) {
        return domain(format!("mode limit needs 0 < r <= R = {r_outer}, got {r}"));
    }
    let q = -ratio_i(0, r_outer) * (log_besseli(l, r)? - log_besseli(l, r_outer)?).exp();
    Ok((q, q * log_deriv_i(l, r)?))
}

/// Mode table with columns `l, r, Q, Q_prime, G, G_prime, a_l, b_l` on
/// `n + 1` radii per mode; `a_l` is `nan` at `R0`, where `G_beta` vanishes.
pub fn mode_table(s: &SteadyState, ls: &[u32], n: usize) -> Result<Table> {
    let mut table = Table::new(&["l", "r", "Q", "Q_prime", "G", "G_prime", "a_l", "b_l"]);
    for &l in ls {
        let m = build_mode(s, l)?;
        for r in linspace(s.params.r0, s.params.r, n.max(1)) {
            let g = m.g_variants(r)?;
            let a = if r > s.params.r0 {
                g.g_prime / g.g - f64::from(l) / r
            } else {
                f64::NAN
            };
            let row: Vec<Cell> = vec![
                l.into(),
                r.into(),
                (-m.forcing * g.g).into(),
                (-m.forcing * g.g_prime).into(),
                g.g.into(),
                g.g_prime.into(),
                a.into(),
                g.g_prime.into(),
            ];
            table.push(row);
        }
    }
    Ok(table)
}
