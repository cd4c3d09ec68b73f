//! Invariant suites over the closed forms and oracles, each returning a
//! pass/fail record with its worst observed deviation.

use crate::bessel::{bessel_derivs, besseli, besselk};
use crate::bifurcation::{
    bifurcation_point, dual_path_gap, l2_margin_expansion, l2_positivity_check,
    limit_bifurcation_point, necrosis_factors, DUAL_PATH_TOL,
};
use crate::error::{Error, Result};
use crate::linear_modes::{a_l_sequence, b_l_sequence, build_mode};
use crate::nondim::ModelParams;
use crate::numerics::linspace;
use crate::oracle::{expansion_check_2d, oracle_agreement};
use crate::steady_state::{build_steady_state, ef_eval, sigma_eval};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

/// Relative tolerance of the Bessel identities.
pub const BESSEL_TOL: f64 = 1e-11;
/// Absolute slack for sign and bound assertions.
pub const SIGN_SLACK: f64 = 1e-12;
/// Oracle agreement tolerance at the finest grid.
pub const ORACLE_TOL: f64 = 1e-6;
/// Accepted range of observed convergence orders.
pub const ORDER_RANGE: (f64, f64) = (1.7, 2.3);
/// Limit-regime relative tolerance.
pub const LIMIT_TOL: f64 = 1e-3;
/// Accepted range of `e(eps) / e(eps/2)` in the two-dimensional check.
pub const EXPANSION_RATIO_RANGE: (f64, f64) = (3.0, 5.0);
/// Accepted range of the zeroth-order ratio.
pub const ZEROTH_RATIO_RANGE: (f64, f64) = (1.5, 2.5);
/// Largest discretization error accepted at zero amplitude.
pub const EXPANSION_FLOOR_TOL: f64 = 1e-6;
/// Accepted range of the observed order of `|L2 / margin - 1|` in the
/// shell width.
pub const SHELL_ORDER_RANGE: (f64, f64) = (0.7, 1.3);
/// Largest accepted deviation of the extrapolated `L2 / margin` from 1.
pub const SHELL_EXTRAPOLATION_TOL: f64 = 1e-2;

/// All suite names, in run order.
pub const SUITES: [&str; 10] = [
    "bessel",
    "lemma3.1",
    "lemma4.2",
    "lemma4.3",
    "lemma4.4",
    "lemma4.6",
    "bifurcation",
    "limits",
    "oracle",
    "expansion2d",
];

/// Settings shared by the suites.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Geometry for the fixed-parameter suites (`beta` is replaced by each
    /// entry of `betas`).
    pub base: ModelParams,
    pub betas: Vec<f64>,
    /// Mode for the `G_beta` bounds.
    pub l: u32,
    pub grid_points: usize,
    pub oracle_n: usize,
    pub oracle_draws: usize,
    pub oracle_modes: Vec<u32>,
    pub random_draws: usize,
    pub sequence_draws: usize,
    pub dual_path_draws: usize,
    pub grid_2d: (usize, usize),
    pub eps_2d: Vec<f64>,
    /// Shell widths as fractions of `R` for the thin-shell suite.
    pub shell_fractions: Vec<f64>,
    /// Injected fault: the Bessel identity tolerance is made negative so
    /// that suite must fail.
    pub negative: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            seed: 20_240_917,
            base: ModelParams::demo(),
            betas: vec![0.1, 1.0, 10.0],
            l: 2,
            grid_points: 1001,
            oracle_n: 4096,
            oracle_draws: 20,
            oracle_modes: vec![0, 2, 5],
            random_draws: 200,
            sequence_draws: 10,
            dual_path_draws: 100,
            grid_2d: (512, 256),
            eps_2d: vec![0.02, 0.01],
            shell_fractions: vec![0.1, 0.05, 0.025, 0.01],
            negative: false,
        }
    }
}

/// Outcome of one suite.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub name: String,
    pub passed: bool,
    pub checks: usize,
    pub violations: usize,
    /// Worst deviation in the suite's own metric.
    pub worst: f64,
    pub tolerance: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub passed: bool,
    pub suites: Vec<SuiteReport>,
}

/// Tally of comparisons; a check fails when `deviation > tol` or when the
/// underlying boolean condition is false.
struct Tally {
    name: &'static str,
    tol: f64,
    checks: usize,
    violations: usize,
    worst: f64,
    notes: Vec<String>,
}

impl Tally {
    fn new(name: &'static str, tol: f64) -> Self {
        Tally {
            name,
            tol,
            checks: 0,
            violations: 0,
            worst: 0.0,
            notes: Vec::new(),
        }
    }

    fn note_failure(&mut self, what: impl FnOnce() -> String) {
        self.violations += 1;
        if self.notes.len() < 5 {
            self.notes.push(what());
        }
    }

    /// Deviation checked against the suite tolerance.
    fn deviation(&mut self, dev: f64, what: impl FnOnce() -> String) {
        self.checks += 1;
        if dev.is_nan() || dev > self.worst {
            self.worst = dev;
        }
        if !(dev <= self.tol) {
            self.note_failure(what);
        }
    }

    /// Deviation against an explicit bound, independent of the suite
    /// tolerance.
    fn bounded(&mut self, dev: f64, bound: f64, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !(dev <= bound) {
            self.note_failure(what);
        }
    }

    fn condition(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.note_failure(what);
        }
    }

    fn error(&mut self, e: &Error) {
        self.checks += 1;
        let msg = e.to_string();
        self.note_failure(|| format!("error: {msg}"));
    }

    fn finish(self) -> SuiteReport {
        SuiteReport {
            name: self.name.to_string(),
            passed: self.violations == 0 && self.checks > 0,
            checks: self.checks,
            violations: self.violations,
            worst: self.worst,
            tolerance: self.tol,
            detail: if self.notes.is_empty() {
                String::new()
            } else {
                self.notes.join("; ")
            },
        }
    }
}

/// Deterministic RNG for one suite.
pub fn suite_rng(seed: u64, suite: &str) -> ChaCha8Rng {
    let salt = suite.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3)
    });
    ChaCha8Rng::seed_from_u64(seed ^ salt)
}

/// A random valid parameter set with the apoptosis rate fixed by the
/// geometry.
pub fn random_params(rng: &mut impl Rng) -> ModelParams {
    let beta = 10f64.powf(rng.gen_range(-1.0..=1.0));
    let sigma_ul = rng.gen_range(0.0..0.95);
    let r0 = rng.gen_range(0.2..1.5);
    let r = r0 + rng.gen_range(0.5..2.5);
    let chi = rng.gen_range(0.0..10.0);
    let g_inv = rng.gen_range(0.1..2.0);
    let prolif = rng.gen_range(0.5..5.0);
    ModelParams::new(beta, sigma_ul, r0, r, chi, g_inv, prolif)
        .expect("random draw ranges always give valid parameters")
}

fn rel_dev(residual: f64, scale: f64) -> f64 {
    let scale = scale.abs();
    if scale > 0.0 {
        residual.abs() / scale
    } else {
        residual.abs()
    }
}

fn run_bessel(opts: &VerifyOptions) -> SuiteReport {
    let tol = if opts.negative { -1.0 } else { BESSEL_TOL };
    let mut t = Tally::new("bessel", tol);
    let mut rng = suite_rng(opts.seed, "bessel");
    for _ in 0..200 {
        let n: u32 = rng.gen_range(0..=16);
        let x = 10f64.powf(rng.gen_range(-3.0..=50f64.log10()));
        let res: Result<()> = (|| {
            let (i_n, i_p, k_n, k_p) = (
                besseli(n, x)?,
                besseli(n + 1, x)?,
                besselk(n, x)?,
                besselk(n + 1, x)?,
            );
            let (di, dk) = bessel_derivs(n, x)?;
            t.condition(i_n > 0.0 && k_n > 0.0 && di > 0.0 && dk < 0.0, || {
                format!("sign failure at n = {n}, x = {x}")
            });
            let w = x * (i_n * k_p + i_p * k_n) - 1.0;
            t.deviation(w.abs(), || format!("Wronskian at n = {n}, x = {x}: {w:e}"));
            if n == 0 {
                t.deviation(rel_dev(di - i_p, i_p), || format!("I0' = I1 at x = {x}"));
                t.deviation(rel_dev(dk + k_p, k_p), || format!("K0' = -K1 at x = {x}"));
            } else {
                let nf = f64::from(n);
                let (i_m, k_m) = (besseli(n - 1, x)?, besselk(n - 1, x)?);
                let ri = i_p - i_m + 2.0 * nf / x * i_n;
                t.deviation(rel_dev(ri, i_m.abs().max(i_p.abs())), || {
                    format!("I recurrence at n = {n}, x = {x}: {ri:e}")
                });
                let rk = k_p - k_m - 2.0 * nf / x * k_n;
                t.deviation(rel_dev(rk, k_p.abs()), || {
                    format!("K recurrence at n = {n}, x = {x}: {rk:e}")
                });
                let hi = 0.5 * (i_m + i_p);
                t.deviation(rel_dev(di - hi, hi), || {
                    format!("I derivative forms at n = {n}, x = {x}")
                });
                let hk = -0.5 * (k_m + k_p);
                t.deviation(rel_dev(dk - hk, hk), || {
                    format!("K derivative forms at n = {n}, x = {x}")
                });
            }
            Ok(())
        })();
        if let Err(e) = res {
            t.error(&e);
        }
    }
    t.finish()
}

fn run_lemma31(opts: &VerifyOptions) -> SuiteReport {
    let mut t = Tally::new("lemma3.1", SIGN_SLACK);
    for &beta in &opts.betas {
        let res: Result<()> = (|| {
            let p = opts.base.with_beta(beta)?;
            let s = build_steady_state(&p)?;
            for r in linspace(p.r0, p.r, opts.grid_points - 1) {
                let (e, f, de, df) = ef_eval(&s, r)?;
                for (v, what) in [
                    (-e, "E >= 0"),
                    (e - 1.0, "E <= 1"),
                    (-f, "F >= 0"),
                    (f - 1.0, "F <= 1"),
                    (de, "E' <= 0"),
                    (-df, "F' >= 0"),
                ] {
                    t.deviation(v.max(0.0), || {
                        format!("{what} fails at beta = {beta}, r = {r}: {v:e}")
                    });
                }
            }
            Ok(())
        })();
        if let Err(e) = res {
            t.error(&e);
        }
    }
    let mut rng = suite_rng(opts.seed, "lemma3.1");
    for _ in 0..opts.random_draws {
        let p = random_params(&mut rng);
        let res: Result<()> = (|| {
            let s = build_steady_state(&p)?;
            t.deviation((-s.apopt).max(0.0), || format!("A < 0 for {p:?}"));
            for r in linspace(p.r0, p.r, opts.grid_points - 1) {
                let v = sigma_eval(&s, r)?.0;
                t.deviation((-v).max(v - 1.0).max(0.0), || {
                    format!("sigma = {v} outside [0, 1] at r = {r}")
                });
            }
            Ok(())
        })();
        if let Err(e) = res {
            t.error(&e);
        }
    }
    t.finish()
}

fn run_lemma42(opts: &VerifyOptions) -> SuiteReport {
    let mut t = Tally::new("lemma4.2", SIGN_SLACK);
    let l = opts.l;
    for &beta in &opts.betas {
        let res: Result<()> = (|| {
            let p = opts.base.with_beta(beta)?;
            let s = build_steady_state(&p)?;
            let m = build_mode(&s, l)?;
            for r in linspace(p.r0, p.r, opts.grid_points - 1) {
                let g = m.g_variants(r)?;
                let cap = g.g0.min((r / p.r).powi(l as i32) / beta);
                t.deviation((-g.g).max(0.0), || {
                    format!("G < 0 at beta = {beta}, r = {r}")
                });
                t.deviation((-g.g_prime).max(0.0), || {
                    format!("G' < 0 at beta = {beta}, r = {r}")
                });
                t.deviation((g.g - cap).max(0.0) / cap.abs().max(1.0), || {
                    format!(
                        "G above its bound at beta = {beta}, r = {r}: {} > {cap}",
                        g.g
                    )
                });
            }
            Ok(())
        })();
        if let Err(e) = res {
            t.error(&e);
        }
    }
    t.finish()
}

const SEQ_L_MAX: u32 = 16;

fn strictly(values: &[f64], increasing: bool) -> Option<usize> {
    values
        .windows(2)
        .position(|w| {
            if increasing {
                !(w[1] > w[0])
            } else {
                !(w[1] < w[0])
            }
        })
        .map(|k| k + 2)
}

fn run_lemma43(opts: &VerifyOptions) -> SuiteReport {
    let mut t = Tally::new("lemma4.3", 0.0);
    let mut rng = suite_rng(opts.seed, "lemma4.3");
    for _ in 0..opts.sequence_draws {
        let p = random_params(&mut rng);
        let res: Result<()> = (|| {
            let s = build_steady_state(&p)?;
            for k in 1..=5 {
                let r = p.r0 + f64::from(k) / 6.0 * (p.r - p.r0);
                let a = a_l_sequence(&s, r, SEQ_L_MAX)?;
                t.condition(a.iter().all(|&v| v > 0.0), || {
                    format!("a_l <= 0 at r = {r} for {p:?}")
                });
                let bad = strictly(&a, false);
                t.condition(bad.is_none(), || {
                    format!("a_l not decreasing at l = {bad:?}, r = {r}")
                });
            }
            Ok(())
        })();
        if let Err(e) = res {
            t.error(&e);
        }
    }
    t.finish()
}

fn run_lemma44(opts: &VerifyOptions) -> SuiteReport {
    let mut t = Tally::new("lemma4.4", 1e-12);
    let mut rng = suite_rng(opts.seed, "lemma4.4");
    for _ in 0..opts.sequence_draws {
        let p = random_params(&mut rng);
        let res: Result<()> = (|| {
            let s = build_steady_state(&p)?;
            let (at_r0, at_r) = b_l_sequence(&s, SEQ_L_MAX)?;
            t.condition(at_r0.iter().chain(&at_r).all(|&v| v > 0.0), || {
                format!("b_l <= 0 for {p:?}")
            });
            let bad = strictly(&at_r0, false);
            t.condition(bad.is_none(), || {
                format!("b_l(R0) not decreasing at l = {bad:?} for {p:?}")
            });
            let bad = strictly(&at_r, true);
            t.condition(bad.is_none(), || {
                format!("b_l(R) not increasing at l = {bad:?} for {p:?}")
            });
            for (idx, &b) in at_r.iter().enumerate() {
                let l = idx as u32 + 1;
                let g = build_mode(&s, l)?.g_variants(p.r)?.g;
                let id = b - (1.0 - p.beta * g);
                t.deviation(id.abs(), || {
                    format!("b_l(R) = 1 - beta G(R) fails at l = {l}: {id:e}")
                });
            }
            Ok(())
        })();
        if let Err(e) = res {
            t.error(&e);
        }
    }
    t.finish()
}

/// Parameters of the thin-shell suite: `R = 2` with a positive
/// nutrient-apoptosis margin for every shell width used.
pub fn shell_params() -> ModelParams {
    ModelParams::new(1.0, 0.0, 1.0, 2.0, 1.0, 1.0, 1.0).expect("fixed parameters are valid")
}

fn run_lemma46(opts: &VerifyOptions) -> SuiteReport {
    let mut t = Tally::new("lemma4.6", SHELL_EXTRAPOLATION_TOL);
    let p = shell_params();
    let eps: Vec<f64> = opts.shell_fractions.iter().map(|f| f * p.r).collect();
    let res: Result<()> = (|| {
        let thinnest = eps.iter().copied().fold(f64::INFINITY, f64::min);
        let rec = l2_positivity_check(&p, &[thinnest])?;
        t.condition(rec[0].positive && rec[0].increasing, || {
            format!(
                "L2 not positive and increasing at shell width {thinnest} (first failure l = {:?})",
                rec[0].violation
            )
        });
        let ex = l2_margin_expansion(&p, &eps)?;
        let bad = ex.rel_err.windows(2).any(|w| !(w[1] < w[0]));
        t.condition(!bad, || {
            format!("|L2/margin - 1| not decreasing: {:?}", ex.rel_err)
        });
        for &o in &ex.rel_orders {
            t.condition(
                (SHELL_ORDER_RANGE.0..=SHELL_ORDER_RANGE.1).contains(&o),
                || format!("observed order {o} of |L2/margin - 1| is not linear"),
            );
        }
        t.deviation(ex.extrapolated_dev, || {
            format!(
                "extrapolated L2/margin deviates from 1 by {:e}",
                ex.extrapolated_dev
            )
        });
        Ok(())
    })();
    if let Err(e) = res {
        t.error(&e);
    }
    t.finish()
}

fn run_bifurcation(opts: &VerifyOptions) -> SuiteReport {
    let mut t = Tally::new("bifurcation", DUAL_PATH_TOL);
    let mut rng = suite_rng(opts.seed, "bifurcation");
    for _ in 0..opts.dual_path_draws {
        let p = random_params(&mut rng);
        let l: u32 = rng.gen_range(0..=16);
        let prolif = rng.gen_range(0.1..10.0);
        let res: Result<()> = (|| {
            let s = build_steady_state(&p)?;
            let p0 = bifurcation_point(&s, 0)?.p_l;
            t.bounded(p0.abs(), 1e-12, || format!("P_0 = {p0:e} for {p:?}"));
            let (_, gap) = dual_path_gap(&s.with_prolif(prolif), l, prolif)?;
            t.deviation(gap, || {
                format!("dual-path gap {gap:e} at l = {l}, P = {prolif}")
            });
            let factors: Vec<(f64, f64)> =
                (1..=32).map(|l| necrosis_factors(l, p.r0, p.r)).collect();
            let n1: Vec<f64> = factors.iter().map(|f| f.0).collect();
            let n2: Vec<f64> = factors.iter().map(|f| f.1).collect();
            // necrosis (I) saturates at 1 in floating point; its complement
            // 2q/(1+q) carries the strict ordering.
            let comp: Vec<f64> = (1..=32)
                .map(|l| {
                    let q = (2.0 * f64::from(l) * (p.r0 / p.r).ln()).exp();
                    2.0 * q / (1.0 + q)
                })
                .collect();
            t.condition(
                n1.iter().all(|&v| v > 0.0 && v <= 1.0) && n1.windows(2).all(|w| w[1] >= w[0]),
                || format!("necrosis (I) not in (0,1] and non-decreasing for {p:?}"),
            );
            t.condition(strictly(&comp, false).is_none(), || {
                format!("1 - necrosis (I) not strictly decreasing for {p:?}")
            });
            t.condition(
                n2.iter().all(|&v| v > 0.0 && v < 1.0) && strictly(&n2, false).is_none(),
                || format!("necrosis (II) not in (0,1) and strictly decreasing for {p:?}"),
            );
            Ok(())
        })();
        if let Err(e) = res {
            t.error(&e);
        }
    }
    t.finish()
}

/// Near-limit parameters: `beta = 1e6`, `R0 = 1e-4`, `R = 2`, with the
/// inner nutrient value equal to the limiting profile at `R0`.
pub fn limit_regime_params(chi: f64) -> Result<ModelParams> {
    let (r0, r) = (1e-4, 2.0);
    let sigma_ul = besseli(0, r0)? / besseli(0, r)?;
    ModelParams::new(1e6, sigma_ul, r0, r, chi, 1.0, 1.0)
}

fn run_limits(_opts: &VerifyOptions) -> SuiteReport {
    let mut t = Tally::new("limits", LIMIT_TOL);
    let res: Result<()> = (|| {
        let p = limit_regime_params(1.0)?;
        let s = build_steady_state(&p)?;
        let (_, dsr, _) = sigma_eval(&s, p.r)?;
        for l in 2..=8 {
            let got = bifurcation_point(&s, l)?.p_l;
            let lim = limit_bifurcation_point(l, p.r, p.g_inv)?;
            let dev = (got - lim).abs() / lim.abs();
            t.deviation(dev, || format!("P_{l} = {got} vs limit {lim}"));
            let q = build_mode(&s, l)?.q_eval(p.r)?.0;
            t.deviation((q + dsr).abs(), || {
                format!("|Q_{l}(R) + sigma'(R)| = {:e}", (q + dsr).abs())
            });
        }
        Ok(())
    })();
    if let Err(e) = res {
        t.error(&e);
    }
    t.finish()
}

fn run_oracle(opts: &VerifyOptions) -> SuiteReport {
    let mut t = Tally::new("oracle", ORACLE_TOL);
    let mut rng = suite_rng(opts.seed, "oracle");
    let draws: Vec<ModelParams> = (0..opts.oracle_draws)
        .map(|_| random_params(&mut rng))
        .collect();
    let results: Vec<Result<Vec<crate::oracle::OracleRow>>> = draws
        .par_iter()
        .map(|p| oracle_agreement(p, &opts.oracle_modes, opts.oracle_n))
        .collect();
    for (p, res) in draws.iter().zip(results) {
        match res {
            Ok(rows) => {
                for row in rows {
                    t.deviation(row.max_rel_err, || {
                        format!(
                            "{} relative error {:e} for {p:?}",
                            row.quantity, row.max_rel_err
                        )
                    });
                    let ok = row
                        .conv_order
                        .is_some_and(|o| (ORDER_RANGE.0..=ORDER_RANGE.1).contains(&o));
                    t.condition(ok, || {
                        format!("{} order {:?} for {p:?}", row.quantity, row.conv_order)
                    });
                }
            }
            Err(e) => t.error(&e),
        }
    }
    t.finish()
}

fn run_expansion2d(opts: &VerifyOptions) -> SuiteReport {
    let mut t = Tally::new("expansion2d", EXPANSION_FLOOR_TOL);
    match expansion_check_2d(&opts.base, opts.l.max(2), &opts.eps_2d, opts.grid_2d) {
        Ok(rep) => {
            t.deviation(rep.discretization_floor, || {
                format!("discretization floor {:e}", rep.discretization_floor)
            });
            for &ratio in &rep.ratios {
                t.condition(
                    (EXPANSION_RATIO_RANGE.0..=EXPANSION_RATIO_RANGE.1).contains(&ratio),
                    || format!("first-order error ratio {ratio}"),
                );
            }
            for &ratio in &rep.zeroth_order_ratios {
                t.condition(
                    (ZEROTH_RATIO_RANGE.0..=ZEROTH_RATIO_RANGE.1).contains(&ratio),
                    || format!("zeroth-order error ratio {ratio}"),
                );
            }
        }
        Err(e) => t.error(&e),
    }
    t.finish()
}

fn runner(name: &str) -> Option<fn(&VerifyOptions) -> SuiteReport> {
    Some(match name {
        "bessel" => run_bessel,
        "lemma3.1" => run_lemma31,
        "lemma4.2" => run_lemma42,
        "lemma4.3" => run_lemma43,
        "lemma4.4" => run_lemma44,
        "lemma4.6" => run_lemma46,
        "bifurcation" => run_bifurcation,
        "limits" => run_limits,
        "oracle" => run_oracle,
        "expansion2d" => run_expansion2d,
        _ => return None,
    })
}

/// Runs the named suites (all of them when `names` is empty) in parallel
/// and reports them in [`SUITES`] order. The injected-fault mode always
/// adds the Bessel suite.
pub fn run_suites(names: &[String], opts: &VerifyOptions) -> Result<VerifyReport> {
    let mut selected: Vec<&str> = if names.is_empty() {
        SUITES.to_vec()
    } else {
        let mut v = Vec::new();
        for n in names {
            let known = SUITES.iter().find(|s| **s == n.as_str()).ok_or_else(|| {
                Error::Domain(format!("unknown suite '{n}'; known: {}", SUITES.join(", ")))
            })?;
            v.push(*known);
        }
        v
    };
    if opts.negative && !selected.contains(&"bessel") {
        selected.push("bessel");
    }
    selected.sort_by_key(|s| SUITES.iter().position(|k| k == s));
    selected.dedup();
    if opts.betas.is_empty() || opts.betas.iter().any(|b| !(*b > 0.0 && b.is_finite())) {
        return Err(Error::Domain(
            "beta list must be non-empty and positive".into(),
        ));
    }
    if opts.grid_points < 2 {
        return Err(Error::Domain("grid needs at least two points".into()));
    }
    let suites: Vec<SuiteReport> = selected
        .par_iter()
        .map(|name| runner(name).expect("suite names are validated")(opts))
        .collect();
    Ok(VerifyReport {
        passed: suites.iter().all(|s| s.passed),
        suites,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite_is_rejected() {
        let err = run_suites(&["nope".into()], &VerifyOptions::default()).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
    }

    #[test]
    fn negative_mode_fails_the_bessel_suite() {
        let opts = VerifyOptions {
            negative: true,
            ..VerifyOptions::default()
        };
        let rep = run_suites(&["lemma4.2".into()], &opts).unwrap();
        assert_eq!(rep.suites.len(), 2);
        assert!(!rep.passed);
        assert!(
            rep.suites
                .iter()
                .find(|s| s.name == "lemma4.2")
                .unwrap()
                .passed
        );
        assert!(
            !rep.suites
                .iter()
                .find(|s| s.name == "bessel")
                .unwrap()
                .passed
        );
    }

    #[test]
    fn random_draws_are_reproducible() {
        let a = random_params(&mut suite_rng(1, "x"));
        let b = random_params(&mut suite_rng(1, "x"));
        let c = random_params(&mut suite_rng(1, "y"));
        assert_eq!(a, b);
        assert_ne!(a, c);
    }
}
