//! `necrobifurc` command-line front end.
//!
//! Exit codes: 0 success, 1 verification failure, 2 configuration error,
//! 3 I/O error. Every artifact is computed before anything is written, so a
//! configuration error never leaves partial output behind.

// `!(a > b)` is deliberate: NaN must fail a check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod output;
mod sweep;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use config::{check_l_range, check_modes, ParamsSection, RunConfig};
use necrobifurc::bifurcation::{
    chemotaxis_scan_params, limit_bifurcation_point, CHEMOTAXIS_SCAN_CHIS, CHEMOTAXIS_SCAN_MODES,
    RECORDED_SCAN_CONFIG,
};
use necrobifurc::export::{Cell, Table};
use necrobifurc::linear_modes::{mode_limits, mode_table};
use necrobifurc::nondim::ModelParams;
use necrobifurc::numerics::linspace;
use necrobifurc::steady_state::{
    build_steady_state, limit_apoptosis, pressure_limit_candidates, profile_table, steady_limits,
};
use necrobifurc::verify::{run_suites, VerifyOptions};
use output::{Artifact, IoFailure, Plot};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, Parser)]
#[command(
    name = "necrobifurc",
    version,
    about = "Steady states, perturbation modes and bifurcation points of a necrotic-core tumor model"
)]
struct Cli {
    /// TOML run configuration; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory receiving the CSV / JSON / gnuplot files (created if missing).
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Worker threads for sweeps and verification suites.
    #[arg(long, global = true, env = "NECROBIFURC_JOBS")]
    jobs: Option<usize>,
    /// Seed for randomized parameter draws.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Also write a gnuplot script next to each CSV file.
    #[arg(long, global = true)]
    gnuplot: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Steady-state profiles and a coefficient summary.
    Steady {
        #[command(flatten)]
        params: ParamArgs,
        /// Number of radial intervals.
        #[arg(long)]
        n: Option<usize>,
        /// Add the beta -> inf, R0 -> 0 limit profile columns.
        #[arg(long)]
        limit: bool,
    },
    /// Radial mode profiles Q_l, G_beta, a_l, b_l.
    Modes {
        #[command(flatten)]
        params: ParamArgs,
        /// Comma-separated mode numbers.
        #[arg(long, value_delimiter = ',')]
        l: Option<Vec<u32>>,
        #[arg(long)]
        n: Option<usize>,
    },
    /// Bifurcation points over mode and chemotaxis grids.
    Bifurcate {
        #[command(flatten)]
        params: ParamArgs,
        /// Comma-separated chemotaxis values.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        chi: Option<Vec<f64>>,
        #[arg(long)]
        l_min: Option<u32>,
        #[arg(long)]
        l_max: Option<u32>,
        /// Named preset; `fig4` is the chemotaxis switch scan at beta = 1e4, R0 = 1.
        #[arg(long)]
        preset: Option<String>,
    },
    /// Closed-form limit profiles and limiting bifurcation points.
    Limits {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        l_min: Option<u32>,
        #[arg(long)]
        l_max: Option<u32>,
        #[arg(long)]
        n: Option<usize>,
    },
    /// Runs the verification suites and writes a JSON report.
    Verify {
        /// Suites to run (comma-separated or repeated); all when omitted.
        #[arg(long = "suite", value_delimiter = ',')]
        suites: Vec<String>,
        /// Nutrient supply rates for the fixed-geometry suites.
        #[arg(long = "beta", value_delimiter = ',', allow_hyphen_values = true)]
        betas: Option<Vec<f64>>,
        /// Mode for the G_beta bounds.
        #[arg(long)]
        l: Option<u32>,
        /// Grid intervals for the finite-difference oracle.
        #[arg(long)]
        oracle_n: Option<usize>,
        /// Flip the Bessel tolerance so the harness must report a failure.
        #[arg(long)]
        self_test_negative: bool,
    },
}

#[derive(Debug, Clone, Args)]
struct ParamArgs {
    /// Nutrient supply rate through the boundary (extent of angiogenesis).
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<f64>,
    /// Nutrient level on the necrotic-core boundary, in [0, 1).
    #[arg(long, allow_hyphen_values = true)]
    sigma_ul: Option<f64>,
    /// Necrotic-core radius.
    #[arg(long, allow_hyphen_values = true)]
    r0: Option<f64>,
    /// Outer radius.
    #[arg(long = "radius", allow_hyphen_values = true)]
    r: Option<f64>,
    /// Chemotaxis coefficient of the steady state.
    #[arg(
        long = "chi-sigma",
        id = "chi_sigma",
        value_name = "CHI",
        allow_hyphen_values = true
    )]
    chi: Option<f64>,
    /// Inverse strength of cell-cell adhesion.
    #[arg(long, allow_hyphen_values = true)]
    g_inv: Option<f64>,
    /// Proliferation rate.
    #[arg(long, allow_hyphen_values = true)]
    prolif: Option<f64>,
    /// Prescribed apoptosis rate; the outer radius is then solved for.
    #[arg(long, allow_hyphen_values = true)]
    apopt: Option<f64>,
}

impl ParamArgs {
    fn section(&self) -> ParamsSection {
        ParamsSection {
            beta: self.beta,
            sigma_ul: self.sigma_ul,
            r0: self.r0,
            r: self.r,
            chi: self.chi,
            g_inv: self.g_inv,
            prolif: self.prolif,
            apopt: self.apopt,
            radius_search_max: None,
        }
    }
}

/// What a command produced: files to write, a JSON report to print, and
/// whether verification passed.
struct Outcome {
    artifacts: Vec<Artifact>,
    passed: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            if is_io_failure(&e) {
                ExitCode::from(3)
            } else {
                ExitCode::from(2)
            }
        }
    }
}

fn is_io_failure(e: &anyhow::Error) -> bool {
    e.chain().any(|c| {
        c.downcast_ref::<IoFailure>().is_some()
            || matches!(
                c.downcast_ref::<necrobifurc::Error>(),
                Some(necrobifurc::Error::Io(_))
            )
    })
}

fn run(cli: Cli) -> Result<bool> {
    let cfg = RunConfig::load(cli.config.as_deref())?;
    let jobs = cli.jobs.or(cfg.jobs);
    if let Some(n) = jobs {
        if n == 0 {
            bail!("--jobs must be at least 1");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("cannot configure the worker pool")?;
    }
    let out_dir = cli
        .out_dir
        .clone()
        .or(cfg.out_dir.clone())
        .unwrap_or_else(|| PathBuf::from("."));
    let gnuplot = cli.gnuplot || cfg.gnuplot.unwrap_or(false);
    let seed = cli.seed.or(cfg.seed);

    let outcome = match cli.command {
        Command::Steady { params, n, limit } => {
            let p = cfg
                .params
                .overlay(&params.section())
                .resolve(&ModelParams::demo())?;
            cmd_steady(
                &p,
                n.or(cfg.steady.n).unwrap_or(200),
                limit || cfg.steady.limit.unwrap_or(false),
            )?
        }
        Command::Modes { params, l, n } => {
            let p = cfg
                .params
                .overlay(&params.section())
                .resolve(&ModelParams::demo())?;
            let ls = l
                .or(cfg.modes.l.clone())
                .unwrap_or_else(|| vec![0, 1, 2, 3, 4, 5]);
            cmd_modes(&p, &ls, n.or(cfg.modes.n).unwrap_or(100))?
        }
        Command::Bifurcate {
            params,
            chi,
            l_min,
            l_max,
            preset,
        } => {
            let preset = preset.or(cfg.bifurcate.preset.clone());
            let fig4 = match preset.as_deref() {
                None => false,
                Some("fig4") => true,
                Some(other) => bail!("unknown preset '{other}'; known: fig4"),
            };
            let (base, default_chi, default_range) = if fig4 {
                let (r, g) = RECORDED_SCAN_CONFIG;
                (
                    chemotaxis_scan_params(r, g)?,
                    CHEMOTAXIS_SCAN_CHIS.to_vec(),
                    CHEMOTAXIS_SCAN_MODES,
                )
            } else {
                let base = ModelParams::demo();
                (base, Vec::new(), (0, 16))
            };
            let p = cfg.params.overlay(&params.section()).resolve(&base)?;
            let chis = chi.or(cfg.bifurcate.chi.clone()).unwrap_or(if fig4 {
                default_chi
            } else {
                vec![p.chi]
            });
            let range = check_l_range(
                l_min.or(cfg.bifurcate.l_min).unwrap_or(default_range.0),
                l_max.or(cfg.bifurcate.l_max).unwrap_or(default_range.1),
            )?;
            cmd_bifurcate(&p, &chis, range, fig4)?
        }
        Command::Limits {
            params,
            l_min,
            l_max,
            n,
        } => {
            let p = cfg
                .params
                .overlay(&params.section())
                .resolve(&ModelParams::demo())?;
            let range = check_l_range(
                l_min.or(cfg.limits.l_min).unwrap_or(2),
                l_max.or(cfg.limits.l_max).unwrap_or(16),
            )?;
            cmd_limits(&p, range, n.or(cfg.limits.n).unwrap_or(200))?
        }
        Command::Verify {
            suites,
            betas,
            l,
            oracle_n,
            self_test_negative,
        } => {
            let base = cfg.params.resolve(&ModelParams::demo())?;
            let defaults = VerifyOptions::default();
            let l = l.or(cfg.verify.l).unwrap_or(defaults.l);
            check_modes(&[l])?;
            let opts = VerifyOptions {
                seed: seed.unwrap_or(defaults.seed),
                base,
                betas: betas
                    .or(cfg.verify.betas.clone())
                    .unwrap_or(defaults.betas.clone()),
                l,
                oracle_n: oracle_n
                    .or(cfg.verify.oracle_n)
                    .unwrap_or(defaults.oracle_n),
                grid_2d: cfg.verify.grid_2d.unwrap_or(defaults.grid_2d),
                negative: self_test_negative,
                ..defaults
            };
            let names = if suites.is_empty() {
                cfg.verify.suites.clone().unwrap_or_default()
            } else {
                suites
            };
            cmd_verify(&names, &opts)?
        }
    };

    output::write_all(&out_dir, &outcome.artifacts, gnuplot)?;
    Ok(outcome.passed)
}

fn cmd_steady(p: &ModelParams, n: usize, limit: bool) -> Result<Outcome> {
    if n == 0 {
        bail!("steady profile needs at least one interval");
    }
    let s = build_steady_state(p)?;
    let profile = profile_table(&s, n, limit)?;
    let sum = s.summary();
    let mut summary = Table::new(&[
        "beta",
        "sigma_ul",
        "R0",
        "R",
        "chi",
        "g_inv",
        "prolif",
        "A1",
        "A2",
        "C1",
        "C2",
        "apopt",
        "denom",
        "sigma_at_R",
        "sigma_prime_at_R",
        "margin",
    ]);
    summary.push(vec![
        p.beta.into(),
        p.sigma_ul.into(),
        p.r0.into(),
        p.r.into(),
        p.chi.into(),
        p.g_inv.into(),
        p.prolif.into(),
        sum.a1.into(),
        sum.a2.into(),
        sum.c1.into(),
        sum.c2.into(),
        sum.apopt.into(),
        sum.denom.into(),
        sum.sigma_at_r.into(),
        sum.sigma_prime_at_r.into(),
        s.nutrient_apoptosis_margin().into(),
    ]);
    let mut columns = vec!["sigma", "p"];
    if limit {
        columns.push("sigma_limit");
    }
    Ok(Outcome {
        artifacts: vec![
            Artifact::csv(
                "steady_profile.csv",
                profile,
                Some(Plot::lines("r", &columns)),
            ),
            Artifact::csv("steady_summary.csv", summary, None),
        ],
        passed: true,
    })
}

fn cmd_modes(p: &ModelParams, ls: &[u32], n: usize) -> Result<Outcome> {
    check_modes(ls)?;
    if n == 0 {
        bail!("mode profile needs at least one interval");
    }
    let mut ls = ls.to_vec();
    ls.sort_unstable();
    ls.dedup();
    let s = build_steady_state(p)?;
    let table = mode_table(&s, &ls, n)?;
    Ok(Outcome {
        artifacts: vec![Artifact::csv(
            "modes.csv",
            table,
            Some(Plot::grouped("r", "Q", "l")),
        )],
        passed: true,
    })
}

fn cmd_bifurcate(p: &ModelParams, chis: &[f64], range: (u32, u32), fig4: bool) -> Result<Outcome> {
    if chis.is_empty() {
        bail!("chi list is empty");
    }
    let rows = sweep::sweep(p, chis, range)?;
    for r in rows.iter().filter(|r| r.degenerate) {
        eprintln!(
            "warning: degenerate denominator at chi = {}, l = {}",
            r.chi, r.l
        );
    }
    let mut artifacts = vec![Artifact::csv(
        "bifurcation.csv",
        sweep::table(&rows),
        Some(Plot::grouped("l", "P_l", "chi")),
    )];
    if fig4 {
        artifacts.push(Artifact::csv(
            "bifurcation_limit.csv",
            limit_table(p, (range.0, range.1))?,
            Some(Plot::lines("l", &["P_limit"])),
        ));
    }
    Ok(Outcome {
        artifacts,
        passed: true,
    })
}

/// `l, P_limit, monotone_flag` with the flag computed over `l >= 2`.
fn limit_table(p: &ModelParams, range: (u32, u32)) -> Result<Table> {
    let ls: Vec<u32> = (range.0..=range.1).collect();
    let values = ls
        .iter()
        .map(|&l| limit_bifurcation_point(l, p.r, p.g_inv).unwrap_or(f64::NAN))
        .collect::<Vec<_>>();
    let monotone = sweep::strictly_increasing(
        ls.iter()
            .zip(&values)
            .filter(|(&l, _)| l >= 2)
            .map(|(_, &v)| v),
    );
    let mut t = Table::new(&["l", "P_limit", "monotone_flag"]);
    for (&l, &v) in ls.iter().zip(&values) {
        t.push(vec![l.into(), v.into(), Cell::Bool(monotone)]);
    }
    Ok(t)
}

fn cmd_limits(p: &ModelParams, range: (u32, u32), n: usize) -> Result<Outcome> {
    if n == 0 {
        bail!("limit profile needs at least one interval");
    }
    let apopt = limit_apoptosis(p.r)?;
    let mut headers = vec![
        "r",
        "sigma_limit",
        "sigma_prime_limit",
        "p_limit",
        "p_prime_limit",
        "apopt_limit",
    ];
    let mode_ls: Vec<u32> = (range.0.max(2)..=range.1).collect();
    let q_names: Vec<String> = mode_ls.iter().map(|l| format!("Q_{l}_limit")).collect();
    headers.extend(q_names.iter().map(String::as_str));
    let mut profile = Table::new(&headers);
    for r in linspace(p.r0, p.r, n) {
        let lim = steady_limits(p, r)?;
        let pres = pressure_limit_candidates(p, r)?;
        let mut row: Vec<Cell> = vec![
            r.into(),
            lim.sigma.into(),
            lim.sigma_prime.into(),
            pres.p_consistent.into(),
            pres.dp_consistent.into(),
            apopt.into(),
        ];
        for &l in &mode_ls {
            row.push(mode_limits(l, p.r, r)?.0.into());
        }
        profile.push(row);
    }
    Ok(Outcome {
        artifacts: vec![
            Artifact::csv(
                "limits_profile.csv",
                profile,
                Some(Plot::lines("r", &["sigma_limit", "p_limit"])),
            ),
            Artifact::csv(
                "limits_modes.csv",
                limit_table(p, range)?,
                Some(Plot::lines("l", &["P_limit"])),
            ),
        ],
        passed: true,
    })
}

fn cmd_verify(names: &[String], opts: &VerifyOptions) -> Result<Outcome> {
    let report = run_suites(names, opts)?;
    let json = serde_json::to_string_pretty(&report).context("cannot serialize the report")?;
    println!("{json}");
    for s in &report.suites {
        eprintln!(
            "{:<12} {} checks={} violations={} worst={:.3e} tol={:.1e} {}",
            s.name,
            if s.passed { "PASS" } else { "FAIL" },
            s.checks,
            s.violations,
            s.worst,
            s.tolerance,
            s.detail
        );
    }
    Ok(Outcome {
        artifacts: vec![Artifact::text("verify_report.json", json + "\n")],
        passed: report.passed,
    })
}
