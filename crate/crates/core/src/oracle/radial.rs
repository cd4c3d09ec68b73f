//! Second-order finite-difference solvers for the radial boundary-value
//! problems, independent of the closed forms except for boundary data.
//!
//! Every problem has the form `u'' + u'/r - c(r) u = f(r)` on `[R0, R]`,
//! discretized with central differences either on a grid uniform in `r` or
//! on one uniform in `s = ln r`, where the equation reads
//! `u_ss - r^2 c u = r^2 f`. The nutrient and the modes use the uniform
//! grid; the pressure, whose solution carries a `ln r` component that is
//! steep near a small inner radius, uses the logarithmic one. Derivative
//! conditions are imposed through a ghost node so the scheme stays second
//! order up to the boundary.

use super::tridiag::solve_tridiagonal;
use crate::error::{Error, Result};
use crate::export::{Cell, Table};
use crate::linear_modes::build_mode;
use crate::nondim::ModelParams;
use crate::numerics::linspace;
use crate::steady_state::{build_steady_state, pressure_eval, sigma_eval, SteadyState};
use serde::Serialize;

/// Smallest grid accepted by the solvers.
pub const MIN_GRID: usize = 16;

/// Boundary condition `u' + alpha u = g` (Neumann when `alpha = 0`) or a
/// prescribed value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bc {
    Dirichlet(f64),
    Robin { alpha: f64, g: f64 },
}

/// Node placement of a radial grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Grid {
    /// `r_i = R0 + i (R - R0)/n`.
    Uniform,
    /// `r_i = R0 (R/R0)^{i/n}`.
    Log,
}

impl Grid {
    /// `n + 1` nodes with exact endpoints.
    pub fn nodes(self, r0: f64, r: f64, n: usize) -> Vec<f64> {
        match self {
            Grid::Uniform => linspace(r0, r, n),
            Grid::Log => log_grid(r0, r, n),
        }
    }

    /// Spacing in `r` (uniform) or in `ln r` (log).
    pub fn spacing(self, r0: f64, r: f64, n: usize) -> f64 {
        match self {
            Grid::Uniform => (r - r0) / n as f64,
            Grid::Log => log_spacing(r0, r, n),
        }
    }
}

/// A solution on `n + 1` grid nodes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialProfile {
    pub r_values: Vec<f64>,
    pub values: Vec<f64>,
    pub grid: Grid,
    /// Spacing in `r`, or in `ln r` on a log grid.
    pub grid_spacing: f64,
    /// Observed order from the solutions on `n/4`, `n/2`, `n` intervals
    /// (`n`, `2n`, `4n` when `n` is small or not divisible by 4). The coarse
    /// triple keeps the differences well above round-off on fine grids.
    pub convergence_order: Option<f64>,
}

/// Pressure profile plus the third (redundant) boundary condition measured on
/// the discrete solution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PressureProfile {
    pub profile: RadialProfile,
    /// `|p'(R) - chi sigma'(R)|` with a second-order one-sided difference.
    pub consistency_residual: f64,
    /// Observed order of the residual between `n/2` and `n` intervals
    /// (`n` and `2n` on grids too small to halve).
    pub residual_order: Option<f64>,
}

fn check_grid(n: usize) -> Result<()> {
    if n < MIN_GRID {
        return Err(Error::Domain(format!(
            "grid needs at least {MIN_GRID} intervals, got {n}"
        )));
    }
    Ok(())
}

fn log_spacing(r0: f64, r: f64, n: usize) -> f64 {
    (r / r0).ln() / n as f64
}

/// `n + 1` radii equally spaced in `ln r`, with exact endpoints.
pub fn log_grid(r0: f64, r: f64, n: usize) -> Vec<f64> {
    let h = log_spacing(r0, r, n);
    (0..=n)
        .map(|i| match i {
            0 => r0,
            i if i == n => r,
            i => r0 * (i as f64 * h).exp(),
        })
        .collect()
}

/// Solves `u'' + u'/r - c(r) u = f(r)` on `n` intervals; `f` receives the
/// radius and the node index.
#[allow(clippy::too_many_arguments)]
pub fn solve_radial_bvp(
    grid: Grid,
    r0: f64,
    r: f64,
    n: usize,
    c: impl Fn(f64) -> f64,
    f: impl Fn(f64, usize) -> f64,
    left: Bc,
    right: Bc,
) -> Result<Vec<f64>> {
    check_grid(n)?;
    let h = grid.spacing(r0, r, n);
    let xs = grid.nodes(r0, r, n);
    let mut lo = vec![0.0; n + 1];
    let mut di = vec![0.0; n + 1];
    let mut up = vec![0.0; n + 1];
    let mut rhs = vec![0.0; n + 1];
    for (i, &x) in xs.iter().enumerate() {
        match grid {
            Grid::Uniform => {
                lo[i] = 1.0 / (h * h) - 1.0 / (2.0 * x * h);
                di[i] = -2.0 / (h * h) - c(x);
                up[i] = 1.0 / (h * h) + 1.0 / (2.0 * x * h);
                rhs[i] = f(x, i);
            }
            Grid::Log => {
                lo[i] = 1.0 / (h * h);
                di[i] = -2.0 / (h * h) - x * x * c(x);
                up[i] = 1.0 / (h * h);
                rhs[i] = x * x * f(x, i);
            }
        }
    }
    // On the log grid u_s = r u', so u' + alpha u = g becomes
    // u_s + (r alpha) u = r g.
    let metric = |x: f64| if grid == Grid::Log { x } else { 1.0 };
    match left {
        Bc::Dirichlet(v) => {
            lo[0] = 0.0;
            di[0] = 1.0;
            up[0] = 0.0;
            rhs[0] = v;
        }
        Bc::Robin { alpha, g } => {
            let (alpha, g) = (metric(r0) * alpha, metric(r0) * g);
            // u_{-1} = u_1 - 2h (g - alpha u_0)
            di[0] += 2.0 * h * alpha * lo[0];
            up[0] += lo[0];
            rhs[0] += 2.0 * h * g * lo[0];
            lo[0] = 0.0;
        }
    }
    match right {
        Bc::Dirichlet(v) => {
            lo[n] = 0.0;
            di[n] = 1.0;
            up[n] = 0.0;
            rhs[n] = v;
        }
        Bc::Robin { alpha, g } => {
            let (alpha, g) = (metric(r) * alpha, metric(r) * g);
            // u_{n+1} = u_{n-1} + 2h (g - alpha u_n)
            lo[n] += up[n];
            di[n] -= 2.0 * h * alpha * up[n];
            rhs[n] -= 2.0 * h * g * up[n];
            up[n] = 0.0;
        }
    }
    solve_tridiagonal(&lo, &di, &up, &rhs)
}

/// Observed order `log2(|u_n - u_2n| / |u_2n - u_4n|)` at the coarse nodes.
pub fn richardson_order(u_n: &[f64], u_2n: &[f64], u_4n: &[f64]) -> Option<f64> {
    let n = u_n.len() - 1;
    let d1 = (0..=n)
        .map(|i| (u_n[i] - u_2n[2 * i]).abs())
        .fold(0.0, f64::max);
    let d2 = (0..=n)
        .map(|i| (u_2n[2 * i] - u_4n[4 * i]).abs())
        .fold(0.0, f64::max);
    if d1 > 0.0 && d2 > 0.0 {
        Some((d1 / d2).log2())
    } else {
        None
    }
}

/// Grid sizes `(coarse, medium, fine)` used for the order estimate at `n`.
pub fn order_grids(n: usize) -> (usize, usize, usize) {
    if n.is_multiple_of(4) && n / 4 >= MIN_GRID {
        (n / 4, n / 2, n)
    } else {
        (n, 2 * n, 4 * n)
    }
}

fn order_of(
    n: usize,
    u_n: &[f64],
    solve: impl Fn(usize) -> Result<Vec<f64>>,
) -> Result<Option<f64>> {
    let (a, b, c) = order_grids(n);
    let get = |m: usize| if m == n { Ok(u_n.to_vec()) } else { solve(m) };
    Ok(richardson_order(&get(a)?, &get(b)?, &get(c)?))
}

fn profile_from(
    grid: Grid,
    r0: f64,
    r: f64,
    n: usize,
    solve: impl Fn(usize) -> Result<Vec<f64>>,
) -> Result<RadialProfile> {
    let values = solve(n)?;
    Ok(RadialProfile {
        r_values: grid.nodes(r0, r, n),
        convergence_order: order_of(n, &values, solve)?,
        values,
        grid,
        grid_spacing: grid.spacing(r0, r, n),
    })
}

/// Grid used by the pressure solver.
pub const PRESSURE_GRID: Grid = Grid::Log;

fn sigma_values(p: &ModelParams, grid: Grid, n: usize) -> Result<Vec<f64>> {
    solve_radial_bvp(
        grid,
        p.r0,
        p.r,
        n,
        |_| 1.0,
        |_, _| 0.0,
        Bc::Dirichlet(p.sigma_ul),
        Bc::Robin {
            alpha: p.beta,
            g: p.beta,
        },
    )
}

/// Nutrient: `sigma'' + sigma'/r - sigma = 0`, `sigma(R0) = sigma_ul`,
/// `sigma'(R) = beta (1 - sigma(R))`.
pub fn solve_sigma_bvp(p: &ModelParams, n: usize) -> Result<RadialProfile> {
    p.validate()?;
    profile_from(Grid::Uniform, p.r0, p.r, n, |m| {
        sigma_values(p, Grid::Uniform, m)
    })
}

/// Mode `l`: `Q'' + Q'/r - (1 + l^2/r^2) Q = 0`, `Q(R0) = 0`,
/// `Q'(R) + beta Q(R) = -(sigma_s''(R) + beta sigma_s'(R))`, the right-hand
/// side taken from the closed-form steady state as boundary data.
pub fn solve_q_bvp(p: &ModelParams, l: u32, n: usize) -> Result<RadialProfile> {
    let s = build_steady_state(p)?;
    let (_, ds, dds) = sigma_eval(&s, p.r)?;
    let l2 = f64::from(l) * f64::from(l);
    profile_from(Grid::Uniform, p.r0, p.r, n, |m| {
        solve_radial_bvp(
            Grid::Uniform,
            p.r0,
            p.r,
            m,
            |x| 1.0 + l2 / (x * x),
            |_, _| 0.0,
            Bc::Dirichlet(0.0),
            Bc::Robin {
                alpha: p.beta,
                g: -(dds + p.beta * ds),
            },
        )
    })
}

fn pressure_values(p: &ModelParams, s: &SteadyState, n: usize) -> Result<(Vec<f64>, f64)> {
    let sigma = sigma_values(p, PRESSURE_GRID, n)?;
    let (_, ds0, _) = sigma_eval(s, p.r0)?;
    let (_, dsr, _) = sigma_eval(s, p.r)?;
    let pa = p.prolif * s.apopt;
    let u = solve_radial_bvp(
        PRESSURE_GRID,
        p.r0,
        p.r,
        n,
        |_| 0.0,
        |_, i| pa - (p.prolif - p.chi) * sigma[i],
        Bc::Robin {
            alpha: 0.0,
            g: p.chi * ds0,
        },
        Bc::Dirichlet(p.g_inv / p.r),
    )?;
    let h = PRESSURE_GRID.spacing(p.r0, p.r, n);
    let mut dp = (3.0 * u[n] - 4.0 * u[n - 1] + u[n - 2]) / (2.0 * h);
    if PRESSURE_GRID == Grid::Log {
        dp /= p.r;
    }
    Ok((u, (dp - p.chi * dsr).abs()))
}

/// Pressure: `-(p'' + p'/r) = (P - chi) sigma - P A` with `sigma` from the
/// nutrient oracle on the same grid, `p'(R0) = chi sigma'(R0)` and
/// `p(R) = G^{-1}/R`. The apoptosis rate is taken from `s`, so a perturbed
/// rate shows up in the consistency residual.
pub fn solve_pressure_bvp(p: &ModelParams, s: &SteadyState, n: usize) -> Result<PressureProfile> {
    p.validate()?;
    let (values, residual) = pressure_values(p, s, n)?;
    let (_, _, fine) = order_grids(n);
    let half = if fine == n { n / 2 } else { 2 * n };
    let (_, res_half) = pressure_values(p, s, half)?;
    let (lo, hi) = if half < n {
        (res_half, residual)
    } else {
        (residual, res_half)
    };
    let residual_order = if lo > 0.0 && hi > 0.0 {
        Some((lo / hi).log2())
    } else {
        None
    };
    Ok(PressureProfile {
        profile: RadialProfile {
            r_values: PRESSURE_GRID.nodes(p.r0, p.r, n),
            convergence_order: order_of(n, &values, |m| Ok(pressure_values(p, s, m)?.0))?,
            values,
            grid: PRESSURE_GRID,
            grid_spacing: PRESSURE_GRID.spacing(p.r0, p.r, n),
        },
        consistency_residual: residual,
        residual_order,
    })
}

/// `max |fd - exact| / max |exact|` over the profile nodes.
pub fn max_rel_err(profile: &RadialProfile, exact: impl Fn(f64) -> Result<f64>) -> Result<f64> {
    let mut num: f64 = 0.0;
    let mut den: f64 = 0.0;
    for (&r, &v) in profile.r_values.iter().zip(&profile.values) {
        let e = exact(r)?;
        num = num.max((v - e).abs());
        den = den.max(e.abs());
    }
    Ok(if den > 0.0 { num / den } else { num })
}

/// One oracle comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleRow {
    pub quantity: String,
    pub grid_n: usize,
    pub max_rel_err: f64,
    pub conv_order: Option<f64>,
}

/// Compares the closed-form nutrient, pressure and the listed modes with
/// their finite-difference solutions on `n` intervals.
pub fn oracle_agreement(p: &ModelParams, ls: &[u32], n: usize) -> Result<Vec<OracleRow>> {
    let s = build_steady_state(p)?;
    let mut rows = Vec::new();

    let sig = solve_sigma_bvp(p, n)?;
    rows.push(OracleRow {
        quantity: "sigma".into(),
        grid_n: n,
        max_rel_err: max_rel_err(&sig, |r| Ok(sigma_eval(&s, r)?.0))?,
        conv_order: sig.convergence_order,
    });

    let pr = solve_pressure_bvp(p, &s, n)?;
    rows.push(OracleRow {
        quantity: "pressure".into(),
        grid_n: n,
        max_rel_err: max_rel_err(&pr.profile, |r| Ok(pressure_eval(&s, r)?.0))?,
        conv_order: pr.profile.convergence_order,
    });

    for &l in ls {
        let m = build_mode(&s, l)?;
        let q = solve_q_bvp(p, l, n)?;
        rows.push(OracleRow {
            quantity: format!("Q_{l}"),
            grid_n: n,
            max_rel_err: max_rel_err(&q, |r| Ok(m.q_eval(r)?.0))?,
            conv_order: q.convergence_order,
        });
    }
    Ok(rows)
}

/// Table with columns `quantity, grid_n, max_rel_err, conv_order`.
pub fn oracle_table(rows: &[OracleRow]) -> Table {
    let mut t = Table::new(&["quantity", "grid_n", "max_rel_err", "conv_order"]);
    for r in rows {
        t.push(vec![
            Cell::Text(r.quantity.clone()),
            r.grid_n.into(),
            r.max_rel_err.into(),
            r.conv_order.unwrap_or(f64::NAN).into(),
        ]);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_endpoints_are_exact() {
        let p = ModelParams::demo();
        let prof = solve_sigma_bvp(&p, 32).unwrap();
        assert_eq!(prof.r_values[0], p.r0);
        assert_eq!(*prof.r_values.last().unwrap(), p.r);
        assert_eq!(prof.values[0], p.sigma_ul);
    }

    #[test]
    fn zero_data_gives_zero_solution() {
        let p = ModelParams::new(0.0, 0.0, 0.5, 2.0, 1.0, 1.0, 1.0).unwrap();
        let prof = solve_sigma_bvp(&p, 64).unwrap();
        assert!(prof.values.iter().all(|&v| v == 0.0));
        assert_eq!(prof.convergence_order, None);
    }

    #[test]
    fn rejects_tiny_grid() {
        assert!(solve_sigma_bvp(&ModelParams::demo(), 8).is_err());
    }

    #[test]
    fn mode_inner_boundary_row_is_exact() {
        let prof = solve_q_bvp(&ModelParams::demo(), 3, 64).unwrap();
        assert_eq!(prof.values[0], 0.0);
    }
}
