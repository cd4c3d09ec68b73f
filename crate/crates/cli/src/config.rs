//! Declarative run configuration: a TOML file with one table per subcommand.
//! Every field is optional; command-line flags override file values.

use anyhow::{bail, Context, Result};
use necrobifurc::nondim::ModelParams;
use necrobifurc::steady_state::solve_radius;
use serde::Deserialize;
use std::path::{Path, PathBuf};

/// Largest mode number accepted anywhere on the command line.
pub const L_MAX: u32 = 64;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub out_dir: Option<PathBuf>,
    pub gnuplot: Option<bool>,
    pub params: ParamsSection,
    pub steady: SteadySection,
    pub modes: ModesSection,
    pub bifurcate: BifurcateSection,
    pub limits: LimitsSection,
    pub verify: VerifySection,
}

/// Dimensionless parameters; unset values come from the demonstration set.
/// When `apopt` is given the outer radius is solved for inside
/// `(r0, radius_search_max]` instead of being taken from `r`.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ParamsSection {
    pub beta: Option<f64>,
    pub sigma_ul: Option<f64>,
    pub r0: Option<f64>,
    pub r: Option<f64>,
    pub chi: Option<f64>,
    pub g_inv: Option<f64>,
    pub prolif: Option<f64>,
    pub apopt: Option<f64>,
    pub radius_search_max: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SteadySection {
    pub n: Option<usize>,
    pub limit: Option<bool>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModesSection {
    pub l: Option<Vec<u32>>,
    pub n: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BifurcateSection {
    pub chi: Option<Vec<f64>>,
    pub l_min: Option<u32>,
    pub l_max: Option<u32>,
    pub preset: Option<String>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LimitsSection {
    pub l_min: Option<u32>,
    pub l_max: Option<u32>,
    pub n: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifySection {
    pub suites: Option<Vec<String>>,
    pub betas: Option<Vec<f64>>,
    pub l: Option<u32>,
    pub oracle_n: Option<usize>,
    pub grid_2d: Option<(usize, usize)>,
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(RunConfig::default());
        };
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config file {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("malformed config file {}", path.display()))
    }
}

impl ParamsSection {
    /// Flag values win over file values.
    pub fn overlay(&self, flags: &ParamsSection) -> ParamsSection {
        ParamsSection {
            beta: flags.beta.or(self.beta),
            sigma_ul: flags.sigma_ul.or(self.sigma_ul),
            r0: flags.r0.or(self.r0),
            r: flags.r.or(self.r),
            chi: flags.chi.or(self.chi),
            g_inv: flags.g_inv.or(self.g_inv),
            prolif: flags.prolif.or(self.prolif),
            apopt: flags.apopt.or(self.apopt),
            radius_search_max: flags.radius_search_max.or(self.radius_search_max),
        }
    }

    /// Builds and validates the parameter bundle over `base`.
    pub fn resolve(&self, base: &ModelParams) -> Result<ModelParams> {
        let p = ModelParams::new(
            self.beta.unwrap_or(base.beta),
            self.sigma_ul.unwrap_or(base.sigma_ul),
            self.r0.unwrap_or(base.r0),
            self.r.unwrap_or(base.r),
            self.chi.unwrap_or(base.chi),
            self.g_inv.unwrap_or(base.g_inv),
            self.prolif.unwrap_or(base.prolif),
        )
        .context("invalid parameters")?;
        let Some(apopt) = self.apopt else {
            return Ok(p);
        };
        let hi = self.radius_search_max.unwrap_or(50.0 * p.r0.max(1.0));
        if !(hi > p.r0) {
            bail!("radius_search_max = {hi} must exceed r0 = {}", p.r0);
        }
        let lo = p.r0 * (1.0 + 1e-9) + 1e-12;
        let radius = solve_radius(&p, apopt, (lo, hi))
            .with_context(|| format!("no outer radius balances apoptosis rate {apopt}"))?;
        Ok(p.with_prescribed_apoptosis(apopt).with_radius(radius)?)
    }
}

/// Inclusive mode range inside `[0, L_MAX]`.
pub fn check_l_range(lo: u32, hi: u32) -> Result<(u32, u32)> {
    if lo > hi || hi > L_MAX {
        bail!("mode range must satisfy 0 <= l_min <= l_max <= {L_MAX}, got ({lo}, {hi})");
    }
    Ok((lo, hi))
}

pub fn check_modes(ls: &[u32]) -> Result<()> {
    if ls.is_empty() {
        bail!("mode list is empty");
    }
    if let Some(l) = ls.iter().find(|&&l| l > L_MAX) {
        bail!("mode {l} exceeds the maximum {L_MAX}");
    }
    Ok(())
}
