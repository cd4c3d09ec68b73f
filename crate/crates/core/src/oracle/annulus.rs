//! Two-dimensional check of the first-order expansion
//! `sigma = sigma_s + eps Q_l cos(l theta) + O(eps^2)` on the perturbed domain
//! `R0 < r < R + eps cos(l theta)`.
//!
//! The domain is mapped to `rho in [0, 1]` through `r = R0 + rho S(theta)`
//! with `S = R - R0 + eps cos(l theta)`, discretized with second-order
//! central differences, and solved by defect correction preconditioned with
//! the unperturbed (`eps = 0`) operator. That operator has constant
//! coefficients in `theta`, so it is inverted exactly by an FFT in `theta`
//! followed by one tridiagonal solve in `rho` per wavenumber.

use super::tridiag::Tridiag;
use crate::error::{Error, Result};
use crate::linear_modes::{build_mode, ModeSolution};
use crate::nondim::ModelParams;
use crate::steady_state::{build_steady_state, sigma_eval, SteadyState};
use rayon::prelude::*;
use rustfft::{num_complex::Complex64, FftPlanner};
use serde::Serialize;
use std::f64::consts::PI;

/// Iteration cap for the defect correction.
pub const MAX_ITERATIONS: usize = 400;
/// Stopping tolerance on the max-norm of the correction.
pub const CORRECTION_TOL: f64 = 1e-14;
/// The error at `eps = 0` must stay below this fraction of the smallest
/// measured perturbation error, otherwise the grid is too coarse to resolve
/// the expansion error.
pub const FLOOR_FRACTION: f64 = 0.1;

/// Discrete nutrient on the perturbed annulus. Storage is row-major in
/// `rho` (`n_r + 1` rows including both boundaries) with `n_theta`
/// periodic columns; the column `theta = 2 pi` is identified with
/// `theta = 0` and not stored.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnnulusField {
    pub l: u32,
    pub perturb_eps: f64,
    pub n_r: usize,
    pub n_theta: usize,
    pub rho: Vec<f64>,
    pub theta: Vec<f64>,
    /// Physical radius of every node.
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
    pub iterations: usize,
}

impl AnnulusField {
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n_theta + j]
    }
}

/// Errors of the zeroth- and first-order approximations at one `eps`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExpansionRow {
    pub perturb_eps: f64,
    /// `max |sigma - sigma_s - eps Q_l cos(l theta)|`.
    pub err_first_order: f64,
    /// `max |sigma - sigma_s|`.
    pub err_zeroth_order: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpansionReport {
    pub l: u32,
    pub n_r: usize,
    pub n_theta: usize,
    /// Error of the discrete solution at `eps = 0`.
    pub discretization_floor: f64,
    pub rows: Vec<ExpansionRow>,
    /// `err(eps_k) / err(eps_{k+1})` for consecutive rows.
    pub ratios: Vec<f64>,
    pub zeroth_order_ratios: Vec<f64>,
}

struct Geometry {
    r0: f64,
    radius: f64,
    eps: f64,
    l: f64,
}

impl Geometry {
    /// `(S, S', S'')` at `theta`.
    fn s(&self, theta: f64) -> (f64, f64, f64) {
        let lt = self.l * theta;
        (
            self.radius - self.r0 + self.eps * lt.cos(),
            -self.eps * self.l * lt.sin(),
            -self.eps * self.l * self.l * lt.cos(),
        )
    }
}

/// Stencil coefficients of `a v_rr + b v_r + c v_tt + d v_rt - v` at one
/// node, in mapped coordinates.
#[derive(Clone, Copy)]
struct Coeffs {
    a: f64,
    b: f64,
    c: f64,
    d: f64,
}

fn coeffs(g: &Geometry, rho: f64, theta: f64) -> Coeffs {
    let (s, s1, s2) = g.s(theta);
    let r = g.r0 + rho * s;
    let rt = -rho * s1 / s;
    let rtt = rho * (2.0 * s1 * s1 - s * s2) / (s * s);
    let r2 = r * r;
    Coeffs {
        a: 1.0 / (s * s) + rt * rt / r2,
        b: 1.0 / (s * r) + rtt / r2,
        c: 1.0 / r2,
        d: 2.0 * rt / r2,
    }
}

struct Problem {
    geom: Geometry,
    sigma_ul: f64,
    n_r: usize,
    n_t: usize,
    h: f64,
    dt: f64,
    coef: Vec<Coeffs>,
    /// Per column: `(v_rho = p0 + p1 v + p2 v_theta)` on the outer boundary.
    robin: Vec<(f64, f64, f64)>,
}

impl Problem {
    fn new(p: &ModelParams, l: u32, eps: f64, n_r: usize, n_t: usize) -> Self {
        let geom = Geometry {
            r0: p.r0,
            radius: p.r,
            eps,
            l: f64::from(l),
        };
        let h = 1.0 / n_r as f64;
        let dt = 2.0 * PI / n_t as f64;
        let mut coef = Vec::with_capacity((n_r + 1) * n_t);
        for i in 0..=n_r {
            let rho = i as f64 * h;
            for j in 0..n_t {
                coef.push(coeffs(&geom, rho, j as f64 * dt));
            }
        }
        let robin = (0..n_t)
            .map(|j| {
                let (s, s1, _) = geom.s(j as f64 * dt);
                let rs = geom.r0 + s;
                let w = (1.0 + s1 * s1 / (rs * rs)).sqrt();
                let cc = (1.0 + s1 * s1 / (rs * rs)) / s;
                let bw = p.beta * w / cc;
                (bw, -bw, s1 / (rs * rs) / cc)
            })
            .collect();
        Problem {
            geom,
            sigma_ul: p.sigma_ul,
            n_r,
            n_t,
            h,
            dt,
            coef,
            robin,
        }
    }

    fn ghost(&self, v: &[f64]) -> Vec<f64> {
        let (n, nt) = (self.n_r, self.n_t);
        (0..nt)
            .map(|j| {
                let jp = (j + 1) % nt;
                let jm = (j + nt - 1) % nt;
                let vt = (v[n * nt + jp] - v[n * nt + jm]) / (2.0 * self.dt);
                let (p0, p1, p2) = self.robin[j];
                let vr = p0 + p1 * v[n * nt + j] + p2 * vt;
                v[(n - 1) * nt + j] + 2.0 * self.h * vr
            })
            .collect()
    }

    /// Residual of the discrete equations; row 0 holds the Dirichlet
    /// residual.
    fn residual(&self, v: &[f64]) -> Vec<f64> {
        let (n, nt, h, dt) = (self.n_r, self.n_t, self.h, self.dt);
        let ghost = self.ghost(v);
        let mut out = vec![0.0; v.len()];
        out.par_chunks_mut(nt).enumerate().for_each(|(i, row)| {
            if i == 0 {
                for (j, o) in row.iter_mut().enumerate() {
                    *o = v[j] - self.sigma_ul;
                }
                return;
            }
            let get = |ii: usize, jj: usize| -> f64 {
                if ii == n + 1 {
                    ghost[jj]
                } else {
                    v[ii * nt + jj]
                }
            };
            for (j, o) in row.iter_mut().enumerate() {
                let jp = (j + 1) % nt;
                let jm = (j + nt - 1) % nt;
                let k = self.coef[i * nt + j];
                let c0 = get(i, j);
                let vrr = (get(i + 1, j) - 2.0 * c0 + get(i - 1, j)) / (h * h);
                let vr = (get(i + 1, j) - get(i - 1, j)) / (2.0 * h);
                let vtt = (get(i, jp) - 2.0 * c0 + get(i, jm)) / (dt * dt);
                let vrt = (get(i + 1, jp) - get(i + 1, jm) - get(i - 1, jp) + get(i - 1, jm))
                    / (4.0 * h * dt);
                *o = k.a * vrr + k.b * vr + k.c * vtt + k.d * vrt - c0;
            }
        });
        out
    }
}

/// Exact inverse of the unperturbed operator with homogeneous boundary
/// conditions.
struct Preconditioner {
    n_r: usize,
    n_t: usize,
    factors: Vec<Tridiag>,
    fft: std::sync::Arc<dyn rustfft::Fft<f64>>,
    ifft: std::sync::Arc<dyn rustfft::Fft<f64>>,
}

impl Preconditioner {
    fn new(p: &ModelParams, n_r: usize, n_t: usize) -> Result<Self> {
        let s0 = p.r - p.r0;
        let h = 1.0 / n_r as f64;
        let dt = 2.0 * PI / n_t as f64;
        let mut factors = Vec::with_capacity(n_t);
        for k in 0..n_t {
            let lam = (2.0 * (2.0 * PI * k as f64 / n_t as f64).cos() - 2.0) / (dt * dt);
            let mut lo = vec![0.0; n_r];
            let mut di = vec![0.0; n_r];
            let mut up = vec![0.0; n_r];
            // unknowns are rows 1..=n_r
            for idx in 0..n_r {
                let i = idx + 1;
                let r = p.r0 + i as f64 * h * s0;
                let a = 1.0 / (s0 * s0);
                let b = 1.0 / (s0 * r);
                let c = 1.0 / (r * r);
                lo[idx] = a / (h * h) - b / (2.0 * h);
                di[idx] = -2.0 * a / (h * h) + c * lam - 1.0;
                up[idx] = a / (h * h) + b / (2.0 * h);
            }
            let last = n_r - 1;
            lo[last] += up[last];
            di[last] -= up[last] * 2.0 * h * p.beta * s0;
            up[last] = 0.0;
            lo[0] = 0.0;
            factors.push(Tridiag::factor(&lo, &di, &up)?);
        }
        let mut planner = FftPlanner::new();
        Ok(Preconditioner {
            n_r,
            n_t,
            factors,
            fft: planner.plan_fft_forward(n_t),
            ifft: planner.plan_fft_inverse(n_t),
        })
    }

    fn apply(&self, res: &[f64]) -> Vec<f64> {
        let (n, nt) = (self.n_r, self.n_t);
        // Row 0: Dirichlet residual is corrected directly.
        let mut spec: Vec<Complex64> = res[nt..].iter().map(|&x| Complex64::new(x, 0.0)).collect();
        spec.par_chunks_mut(nt)
            .for_each(|row| self.fft.process(row));
        // Solve along rho for every wavenumber.
        let cols: Vec<(Vec<f64>, Vec<f64>)> = (0..nt)
            .into_par_iter()
            .map(|k| {
                let mut re: Vec<f64> = (0..n).map(|i| spec[i * nt + k].re).collect();
                let mut im: Vec<f64> = (0..n).map(|i| spec[i * nt + k].im).collect();
                self.factors[k].solve_in_place(&mut re);
                self.factors[k].solve_in_place(&mut im);
                (re, im)
            })
            .collect();
        for (k, (re, im)) in cols.iter().enumerate() {
            for i in 0..n {
                spec[i * nt + k] = Complex64::new(re[i], im[i]);
            }
        }
        spec.par_chunks_mut(nt)
            .for_each(|row| self.ifft.process(row));
        let scale = 1.0 / nt as f64;
        let mut out = Vec::with_capacity((n + 1) * nt);
        out.extend_from_slice(&res[..nt]);
        out.extend(spec.iter().map(|c| c.re * scale));
        out
    }
}

fn validate(p: &ModelParams, l: u32, eps: f64, n_r: usize, n_t: usize) -> Result<()> {
    p.validate()?;
    if l < 2 {
        return Err(Error::Domain(format!(
            "expansion check needs a shape mode l >= 2, got {l}"
        )));
    }
    if n_r < 8 || n_t < 4 * l as usize {
        return Err(Error::Domain(format!(
            "grid ({n_r}, {n_t}) too coarse for mode {l}"
        )));
    }
    if !eps.is_finite() || eps.abs() >= 0.5 * (p.r - p.r0) {
        return Err(Error::Domain(format!(
            "perturbation amplitude {eps} must be below half the rim width"
        )));
    }
    Ok(())
}

/// Solves the nutrient problem on the perturbed annulus.
pub fn solve_annulus(
    p: &ModelParams,
    l: u32,
    perturb_eps: f64,
    grid: (usize, usize),
) -> Result<AnnulusField> {
    let (n_r, n_t) = grid;
    validate(p, l, perturb_eps, n_r, n_t)?;
    let prob = Problem::new(p, l, perturb_eps, n_r, n_t);
    let pre = Preconditioner::new(p, n_r, n_t)?;
    let mut v = vec![p.sigma_ul; (n_r + 1) * n_t];
    let mut iterations = 0;
    loop {
        let res = prob.residual(&v);
        let delta = pre.apply(&res);
        let size = delta.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if !size.is_finite() {
            return Err(Error::Numeric("annulus iteration diverged".into()));
        }
        for (x, d) in v.iter_mut().zip(&delta) {
            *x -= d;
        }
        iterations += 1;
        if size <= CORRECTION_TOL * (1.0 + p.sigma_ul.abs().max(1.0)) {
            break;
        }
        if iterations >= MAX_ITERATIONS {
            return Err(Error::Numeric(format!(
                "annulus iteration did not converge (last correction {size:e})"
            )));
        }
    }
    let rho: Vec<f64> = (0..=n_r).map(|i| i as f64 * prob.h).collect();
    let theta: Vec<f64> = (0..n_t).map(|j| j as f64 * prob.dt).collect();
    let mut radii = Vec::with_capacity(v.len());
    for &rh in &rho {
        for &t in &theta {
            radii.push(prob.geom.r0 + rh * prob.geom.s(t).0);
        }
    }
    Ok(AnnulusField {
        l,
        perturb_eps,
        n_r,
        n_theta: n_t,
        rho,
        theta,
        radii,
        values: v,
        iterations,
    })
}

fn field_errors(field: &AnnulusField, s: &SteadyState, m: &ModeSolution) -> Result<(f64, f64)> {
    let nt = field.n_theta;
    let limit = s.params.r * (1.0 + 1e-12);
    let l = f64::from(field.l);
    let per_node: Vec<Result<(f64, f64)>> = (0..field.values.len())
        .into_par_iter()
        .map(|idx| {
            let r = field.radii[idx];
            if r > limit {
                return Ok((0.0, 0.0));
            }
            let r = r.min(s.params.r);
            let theta = field.theta[idx % nt];
            let base = field.values[idx] - sigma_eval(s, r)?.0;
            let corr = field.perturb_eps * m.q_eval(r)?.0 * (l * theta).cos();
            Ok(((base - corr).abs(), base.abs()))
        })
        .collect();
    let mut e1: f64 = 0.0;
    let mut e0: f64 = 0.0;
    for item in per_node {
        let (a, b) = item?;
        e1 = e1.max(a);
        e0 = e0.max(b);
    }
    Ok((e1, e0))
}

/// Solves at every amplitude in `eps_list` (and at zero for the
/// discretization floor) and reports the expansion errors, measured at the
/// nodes lying inside the unperturbed disc where both approximations are
/// defined.
pub fn expansion_check_2d(
    p: &ModelParams,
    l: u32,
    eps_list: &[f64],
    grid: (usize, usize),
) -> Result<ExpansionReport> {
    if eps_list.is_empty() || eps_list.contains(&0.0) {
        return Err(Error::Domain(
            "amplitude list must be non-empty and non-zero".into(),
        ));
    }
    let s = build_steady_state(p)?;
    let m = build_mode(&s, l)?;
    let base = solve_annulus(p, l, 0.0, grid)?;
    let (floor, _) = field_errors(&base, &s, &m)?;
    let mut rows = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        let f = solve_annulus(p, l, eps, grid)?;
        let (e1, e0) = field_errors(&f, &s, &m)?;
        rows.push(ExpansionRow {
            perturb_eps: eps,
            err_first_order: e1,
            err_zeroth_order: e0,
        });
    }
    let smallest = rows
        .iter()
        .map(|r| r.err_first_order)
        .fold(f64::INFINITY, f64::min);
    if floor > FLOOR_FRACTION * smallest {
        return Err(Error::InconclusiveResolution(format!(
            "discretization floor {floor:e} is not below {FLOOR_FRACTION} x the smallest \
             expansion error {smallest:e} on grid {grid:?}; refine the grid"
        )));
    }
    let ratios = rows
        .windows(2)
        .map(|w| w[0].err_first_order / w[1].err_first_order)
        .collect();
    let zeroth_order_ratios = rows
        .windows(2)
        .map(|w| w[0].err_zeroth_order / w[1].err_zeroth_order)
        .collect();
    Ok(ExpansionReport {
        l,
        n_r: grid.0,
        n_theta: grid.1,
        discretization_floor: floor,
        rows,
        ratios,
        zeroth_order_ratios,
    })
}
