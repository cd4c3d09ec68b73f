//! Acceptance criteria 1-10. Each criterion prints one PASS/FAIL line; the
//! binary exits non-zero when any criterion fails.
//!
//! Tolerances are pinned here as literals and cross-checked against the
//! library constants, so loosening a library constant fails the run.

use necrobifurc::bifurcation::{
    bifurcation_point, chemotaxis_scan_params, chemotaxis_switch_scan, l2_margin_expansion,
    l2_positivity_check, limit_bifurcation_point, limit_curve, monotonicity_scan,
    CHEMOTAXIS_SCAN_BETA, CHEMOTAXIS_SCAN_R0, DUAL_PATH_TOL, RECORDED_SCAN_CONFIG,
};
use necrobifurc::linear_modes::build_mode;
use necrobifurc::nondim::ModelParams;
use necrobifurc::oracle::expansion_check_2d;
use necrobifurc::steady_state::{build_steady_state, sigma_eval};
use necrobifurc::verify::{self, run_suites, shell_params, SuiteReport, VerifyOptions};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome {
            pass,
            detail: detail.into(),
        }
    }
}

fn suite(name: &str) -> SuiteReport {
    let rep = run_suites(&[name.to_string()], &VerifyOptions::default()).expect("suite runs");
    rep.suites.into_iter().next().expect("one suite")
}

fn suite_outcome(s: &SuiteReport, pinned: bool) -> Outcome {
    Outcome::new(
        s.passed && pinned,
        format!(
            "{} checks, {} violations, worst {:.3e} (tol {:.0e}){}{}",
            s.checks,
            s.violations,
            s.worst,
            s.tolerance,
            if pinned {
                ""
            } else {
                "; library tolerance differs from the pinned value"
            },
            if s.detail.is_empty() {
                String::new()
            } else {
                format!("; {}", s.detail)
            }
        ),
    )
}

/// Bessel identities at 200 samples, relative 1e-11.
fn c01() -> Outcome {
    let s = suite("bessel");
    suite_outcome(&s, verify::BESSEL_TOL == 1e-11 && s.checks >= 200)
}

/// Oracle agreement at n = 4096 for 20 random sets and l in {0, 2, 5}.
fn c02() -> Outcome {
    let o = VerifyOptions::default();
    let pinned = verify::ORACLE_TOL == 1e-6
        && verify::ORDER_RANGE == (1.7, 2.3)
        && o.oracle_n == 4096
        && o.oracle_draws == 20
        && o.oracle_modes == vec![0, 2, 5];
    suite_outcome(&suite("oracle"), pinned)
}

/// E/F bounds and signs for beta in {0.1, 1, 10}; sigma in [0, 1] and
/// A >= 0 on 200 draws, slack 1e-12.
fn c03() -> Outcome {
    let o = VerifyOptions::default();
    let pinned = verify::SIGN_SLACK == 1e-12
        && o.betas == vec![0.1, 1.0, 10.0]
        && o.grid_points == 1001
        && o.random_draws == 200;
    suite_outcome(&suite("lemma3.1"), pinned)
}

/// G_beta bounds for beta in {0.1, 1, 10}, l = 2.
fn c04() -> Outcome {
    let o = VerifyOptions::default();
    let pinned = verify::SIGN_SLACK == 1e-12 && o.betas == vec![0.1, 1.0, 10.0] && o.l == 2;
    suite_outcome(&suite("lemma4.2"), pinned)
}

/// a_l and b_l sequences for l = 1..16 at 5 radii on 10 random sets.
fn c05() -> Outcome {
    let a = suite("lemma4.3");
    let b = suite("lemma4.4");
    let pinned = VerifyOptions::default().sequence_draws == 10;
    Outcome::new(
        a.passed && b.passed && pinned,
        format!(
            "a_l: {} checks, {} violations; b_l: {} checks, {} violations{}{}",
            a.checks,
            a.violations,
            b.checks,
            b.violations,
            if a.detail.is_empty() {
                String::new()
            } else {
                format!("; {}", a.detail)
            },
            if b.detail.is_empty() {
                String::new()
            } else {
                format!("; {}", b.detail)
            }
        ),
    )
}

/// P_0 = 0, dual-path agreement on 100 draws, necrosis factor ordering.
fn c06() -> Outcome {
    let pinned = DUAL_PATH_TOL == 1e-10 && VerifyOptions::default().dual_path_draws == 100;
    suite_outcome(&suite("bifurcation"), pinned)
}

/// Limit recovery at beta = 1e6, R0 = 1e-4, R = 2, G^{-1} = 1.
fn c07() -> Outcome {
    const TOL: f64 = 1e-3;
    let mut worst_p: f64 = 0.0;
    let mut worst_q: f64 = 0.0;
    for chi in [0.0, 1.0, 10.0] {
        let p = verify::limit_regime_params(chi).expect("valid");
        assert_eq!((p.beta, p.r0, p.r, p.g_inv), (1e6, 1e-4, 2.0, 1.0));
        let s = build_steady_state(&p).expect("steady state");
        let (_, dsr, _) = sigma_eval(&s, p.r).expect("sigma");
        for l in 2..=8 {
            let got = bifurcation_point(&s, l).expect("point").p_l;
            let lim = limit_bifurcation_point(l, p.r, p.g_inv).expect("limit");
            worst_p = worst_p.max((got - lim).abs() / lim.abs());
            let q = build_mode(&s, l).expect("mode").q_eval(p.r).expect("Q").0;
            worst_q = worst_q.max((q + dsr).abs());
        }
    }
    Outcome::new(
        worst_p <= TOL && worst_q <= TOL,
        format!("max relative P_l deviation {worst_p:.3e}, max |Q_l(R) + sigma'(R)| {worst_q:.3e} (tol {TOL:.0e}) over chi in {{0, 1, 10}}"),
    )
}

/// Chemotaxis breaks monotonicity of {P_l}, l = 2..16, on the stated
/// (R, G^{-1}) grid with beta = 1e4, R0 = 1.
fn c08() -> Outcome {
    let base = chemotaxis_scan_params(2.0, 1.0).expect("valid");
    assert_eq!((base.beta, base.r0), (1e4, 1.0));
    assert_eq!((CHEMOTAXIS_SCAN_BETA, CHEMOTAXIS_SCAN_R0), (1e4, 1.0));
    let cands = chemotaxis_switch_scan(
        &base,
        &[1.5, 2.0, 3.0, 5.0],
        &[0.1, 1.0],
        (2, 16),
        1.0,
        100.0,
    )
    .expect("scan");
    match cands.iter().find(|c| c.reproduces) {
        Some(c) => Outcome::new(
            true,
            format!("reproduced at R = {}, G^-1 = {}", c.radius, c.g_inv),
        ),
        None => {
            let high_monotone = cands.iter().filter(|c| c.monotone_high_chi).count();
            Outcome::new(
                false,
                format!(
                    "no (R, G^-1) on the stated grid loses monotonicity at chi = 100 \
                     ({high_monotone}/{} candidates stay monotone); reproduced on the extended \
                     grid at (R, G^-1) = {:?}, see the companion check",
                    cands.len(),
                    RECORDED_SCAN_CONFIG
                ),
            )
        }
    }
}

/// Companion of criterion 8 on the extended grid: the recorded
/// configuration is the first one found and reproduces the claim at
/// chi = 1 and chi = 100.
fn c08_extended() -> Outcome {
    let base = chemotaxis_scan_params(2.0, 1.0).expect("valid");
    let cands = chemotaxis_switch_scan(
        &base,
        &[1.5, 2.0, 3.0, 5.0],
        &[0.1, 1.0, 1e-2, 1e-3, 1e-4],
        (2, 16),
        1.0,
        100.0,
    )
    .expect("scan");
    let first = cands
        .iter()
        .find(|c| c.reproduces)
        .map(|c| (c.radius, c.g_inv));
    let (r, g) = RECORDED_SCAN_CONFIG;
    let p = chemotaxis_scan_params(r, g).expect("valid");
    let series = monotonicity_scan(&p, (2, 16), &[1.0, 100.0]).expect("scan");
    let (_, limit_ok) = limit_curve((2, 16), r, g).expect("limit");
    Outcome::new(
        first == Some(RECORDED_SCAN_CONFIG) && series[0].monotone && !series[1].monotone && limit_ok,
        format!(
            "first reproducing configuration {first:?}, recorded {:?}; chi = 100 first descent at l = {:?}",
            RECORDED_SCAN_CONFIG, series[1].first_descent
        ),
    )
}

/// Thin-shell positivity and monotonicity of L2, and L2 -> sigma_s(R) - A
/// with error decreasing linearly in the shell width.
fn c09() -> Outcome {
    let p: ModelParams = shell_params();
    assert_eq!(p.r, 2.0);
    let eps: Vec<f64> = [0.1, 0.05, 0.025, 0.01].iter().map(|f| f * p.r).collect();
    let recs = l2_positivity_check(&p, &eps).expect("assumption holds");
    let margins_ok = recs.iter().all(|r| r.margin > 0.0);
    let thinnest = recs.last().expect("records");
    let ex = l2_margin_expansion(&p, &eps).expect("expansion");
    let decreasing = ex.rel_err.windows(2).all(|w| w[1] < w[0]);
    let linear = ex.rel_orders.iter().all(|o| (0.7..=1.3).contains(o));
    let extrapolated = ex.extrapolated_dev <= 1e-2;
    let pinned = verify::SHELL_ORDER_RANGE == (0.7, 1.3) && verify::SHELL_EXTRAPOLATION_TOL == 1e-2;
    Outcome::new(
        margins_ok && thinnest.positive && thinnest.increasing && decreasing && linear && extrapolated && pinned,
        format!(
            "L2 positive {} and increasing {} at shell width {}; |L2/margin - 1| = {:.3?}, observed orders {:.3?}, extrapolated deviation {:.2e}",
            thinnest.positive, thinnest.increasing, thinnest.shell_eps, ex.rel_err, ex.rel_orders, ex.extrapolated_dev
        ),
    )
}

/// Two-dimensional expansion check: e(0.02)/e(0.01) in [3, 5] on 512 x 256
/// for l = 2.
fn c10() -> Outcome {
    match expansion_check_2d(&ModelParams::demo(), 2, &[0.02, 0.01], (512, 256)) {
        Ok(rep) => {
            let ratio = rep.ratios[0];
            Outcome::new(
                (3.0..=5.0).contains(&ratio) && verify::EXPANSION_RATIO_RANGE == (3.0, 5.0),
                format!(
                    "ratio {ratio:.4}, zeroth-order ratio {:.4}, floor {:.2e}",
                    rep.zeroth_order_ratios[0], rep.discretization_floor
                ),
            )
        }
        Err(e) => Outcome::new(false, format!("error: {e}")),
    }
}

/// `(id, name, runtime budget, check)`.
type Criterion = (&'static str, &'static str, Duration, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 11] = [
        ("1", "bessel identities", Duration::from_secs(1), c01),
        ("2", "oracle agreement", Duration::from_secs(30), c02),
        (
            "3",
            "nutrient bounds and apoptosis sign",
            Duration::from_secs(300),
            c03,
        ),
        ("4", "G_beta bounds", Duration::from_secs(300), c04),
        ("5", "a_l / b_l sequences", Duration::from_secs(300), c05),
        ("6", "bifurcation identities", Duration::from_secs(300), c06),
        ("7", "limit recovery", Duration::from_secs(300), c07),
        (
            "8",
            "chemotaxis monotonicity (stated grid)",
            Duration::from_secs(300),
            c08,
        ),
        (
            "8x",
            "chemotaxis monotonicity (extended grid)",
            Duration::from_secs(300),
            c08_extended,
        ),
        ("9", "thin-shell L2", Duration::from_secs(300), c09),
        ("10", "2-D expansion order", Duration::from_secs(120), c10),
    ];
    let total = Instant::now();
    let mut failed = Vec::new();
    for (id, name, budget, run) in criteria {
        let start = Instant::now();
        let outcome =
            catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Outcome::new(false, "panicked"));
        let elapsed = start.elapsed();
        let within = elapsed <= budget;
        let pass = outcome.pass && within;
        println!(
            "criterion {id:>3} {name:<42} {} [{:.2?}{}] {}",
            if pass { "PASS" } else { "FAIL" },
            elapsed,
            if within {
                String::new()
            } else {
                format!(" over budget {budget:?}")
            },
            outcome.detail
        );
        if !pass {
            failed.push(id);
        }
    }
    println!(
        "acceptance: {} criteria, {} failed {:?}, total {:.2?}",
        criteria.len(),
        failed.len(),
        failed,
        total.elapsed()
    );
    if !failed.is_empty() {
        std::process::exit(1);
    }
}
