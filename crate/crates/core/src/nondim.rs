//! Dimensional inputs, the dimensionless parameter bundle, and the scaling
//! between them.
//!
//! Lengths are scaled by the diffusion length `L = sqrt(D / lambda)`, time by
//! the intrinsic taxis rate `lambda_chi = chi_bar * sigma_inf / L^2`, and
//! pressure by `lambda_chi * L^2 / mu`.

use crate::error::{domain, Result};
use crate::steady_state::apoptosis_of_radius;
use serde::{Deserialize, Serialize};

/// Diffusion time over taxis time when the taxis time is taken as one hour.
pub const EPS_RATIO_ONE_HOUR: f64 = 1.0 / 60.0;
/// Diffusion time over taxis time with the 1.25 h migration estimate
/// (150 um spheroid diameter at 2 um/min).
pub const EPS_RATIO_MIGRATION_ESTIMATE: f64 = 1.0 / 75.0;
/// Above this `eps = lambda_chi / lambda` the quasi-steady nutrient
/// assumption is flagged.
pub const QUASI_STEADY_WARN: f64 = 0.1;

/// Model parameters before scaling. Units are the caller's responsibility.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimensionalParams {
    /// Nutrient diffusivity (length^2 / time).
    pub diffusivity: f64,
    /// Nutrient consumption rate (1 / time).
    pub lambda: f64,
    /// Mitosis rate (1 / time).
    pub lambda_m: f64,
    /// Apoptosis rate (1 / time).
    pub lambda_a: f64,
    /// Cell mobility.
    pub mu: f64,
    /// Adhesion (surface tension) coefficient.
    pub gamma: f64,
    /// Taxis coefficient.
    pub chi_sigma: f64,
    /// Characteristic taxis coefficient used for the time scale.
    pub chi_bar: f64,
    /// Far-field nutrient level.
    pub sigma_inf: f64,
    /// Nutrient level on the necrotic boundary.
    pub sigma_n: f64,
    /// Nutrient supply rate across the outer boundary (1 / length).
    pub beta: f64,
    /// Necrotic-core radius (length).
    pub r0: f64,
    /// Outer tumor radius (length).
    pub r: f64,
}

/// Where the apoptosis rate stored in [`ModelParams`] came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ApoptosisSource {
    /// Computed from the geometry by the steady-state flux balance.
    Geometry,
    /// Supplied by the caller (e.g. `lambda_A / lambda_M`); the radius must be
    /// solved for before a steady state can be built.
    Prescribed,
}

/// Dimensionless parameter bundle shared by every analysis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Nutrient supply rate `beta`.
    pub beta: f64,
    /// Necrotic-boundary nutrient level, in `[0, 1)`.
    pub sigma_ul: f64,
    /// Necrotic-core radius.
    pub r0: f64,
    /// Outer radius.
    pub r: f64,
    /// Chemotaxis coefficient.
    pub chi: f64,
    /// Surface-tension strength `G^{-1}`.
    pub g_inv: f64,
    /// Proliferation rate `P`.
    pub prolif: f64,
    /// Apoptosis rate `A`.
    pub apopt: f64,
    pub apopt_source: ApoptosisSource,
}

impl ModelParams {
    /// Builds a bundle whose apoptosis rate is derived from the geometry.
    pub fn new(
        beta: f64,
        sigma_ul: f64,
        r0: f64,
        r: f64,
        chi: f64,
        g_inv: f64,
        prolif: f64,
    ) -> Result<Self> {
        let mut p = ModelParams {
            beta,
            sigma_ul,
            r0,
            r,
            chi,
            g_inv,
            prolif,
            apopt: 0.0,
            apopt_source: ApoptosisSource::Geometry,
        };
        p.validate()?;
        p.apopt = apoptosis_of_radius(&p, r)?;
        Ok(p)
    }

    /// The demonstration set `beta = 1, sigma_ul = 0.5, R0 = 0.5, R = 2,
    /// chi = 1, G^{-1} = 1, P = 1`.
    pub fn demo() -> Self {
        Self::new(1.0, 0.5, 0.5, 2.0, 1.0, 1.0, 1.0).expect("demo parameters are valid")
    }

    /// Checks the bundle invariants (the apoptosis value is not checked).
    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.beta,
            self.sigma_ul,
            self.r0,
            self.r,
            self.chi,
            self.g_inv,
            self.prolif,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            return domain("parameters must be finite");
        }
        if self.r0 <= 0.0 {
            return domain(format!("R0 must be positive, got {}", self.r0));
        }
        if self.r <= self.r0 {
            return domain(format!(
                "outer radius R = {} must exceed R0 = {}",
                self.r, self.r0
            ));
        }
        if self.beta < 0.0 {
            return domain(format!("beta must be non-negative, got {}", self.beta));
        }
        if !(0.0..1.0).contains(&self.sigma_ul) {
            return domain(format!(
                "sigma_ul must lie in [0, 1), got {}",
                self.sigma_ul
            ));
        }
        if self.g_inv < 0.0 {
            return domain(format!("G^-1 must be non-negative, got {}", self.g_inv));
        }
        if self.chi < 0.0 {
            return domain(format!("chi must be non-negative, got {}", self.chi));
        }
        Ok(())
    }

    /// Same parameters with a new outer radius; a geometry-derived apoptosis
    /// rate is recomputed.
    pub fn with_radius(&self, r: f64) -> Result<Self> {
        let mut p = ModelParams { r, ..*self };
        p.validate()?;
        if p.apopt_source == ApoptosisSource::Geometry {
            p.apopt = apoptosis_of_radius(&p, r)?;
        }
        Ok(p)
    }

    /// Same parameters with a new inner radius (apoptosis re-derived when it
    /// comes from the geometry).
    pub fn with_r0(&self, r0: f64) -> Result<Self> {
        let mut p = ModelParams { r0, ..*self };
        p.validate()?;
        if p.apopt_source == ApoptosisSource::Geometry {
            p.apopt = apoptosis_of_radius(&p, p.r)?;
        }
        Ok(p)
    }

    /// Same parameters with a new supply rate.
    pub fn with_beta(&self, beta: f64) -> Result<Self> {
        let mut p = ModelParams { beta, ..*self };
        p.validate()?;
        if p.apopt_source == ApoptosisSource::Geometry {
            p.apopt = apoptosis_of_radius(&p, p.r)?;
        }
        Ok(p)
    }

    /// Marks the apoptosis rate as prescribed by the caller.
    pub fn with_prescribed_apoptosis(&self, apopt: f64) -> Self {
        ModelParams {
            apopt,
            apopt_source: ApoptosisSource::Prescribed,
            ..*self
        }
    }
}

/// Scale factors and time-scale diagnostics produced alongside the bundle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Diagnostics {
    /// Diffusion length `L`.
    pub length_scale: f64,
    /// Intrinsic taxis rate `lambda_chi`.
    pub lambda_chi: f64,
    /// Characteristic pressure.
    pub pressure_scale: f64,
    /// `lambda_chi / lambda`, the coefficient of the nutrient time derivative.
    pub eps: f64,
    /// `true` when `eps >= 0.1`, i.e. the quasi-steady nutrient assumption is
    /// questionable.
    pub quasi_steady_warning: bool,
    /// Reference ratio with a one-hour taxis time.
    pub eps_ratio_one_hour: f64,
    /// Reference ratio with the 1.25 h migration estimate.
    pub eps_ratio_migration_estimate: f64,
}

/// Scales dimensional inputs. The apoptosis rate `lambda_A / lambda_M` is
/// returned as prescribed; the outer radius is carried over so callers can
/// either keep it or solve for the radius matching the prescribed rate.
pub fn nondimensionalize(d: &DimensionalParams) -> Result<(ModelParams, Diagnostics)> {
    let positive = [
        ("diffusivity", d.diffusivity),
        ("lambda", d.lambda),
        ("lambda_m", d.lambda_m),
        ("lambda_a", d.lambda_a),
        ("mu", d.mu),
        ("gamma", d.gamma),
        ("chi_bar", d.chi_bar),
        ("sigma_inf", d.sigma_inf),
        ("beta", d.beta),
        ("r0", d.r0),
        ("r", d.r),
    ];
    for (name, v) in positive {
        if !(v.is_finite() && v > 0.0) {
            return domain(format!("{name} must be positive and finite, got {v}"));
        }
    }
    if !(d.chi_sigma.is_finite() && d.chi_sigma >= 0.0) {
        return domain(format!(
            "chi_sigma must be non-negative, got {}",
            d.chi_sigma
        ));
    }
    if !(d.sigma_n >= 0.0 && d.sigma_n < d.sigma_inf) {
        return domain(format!(
            "need 0 <= sigma_n < sigma_inf, got sigma_n = {}, sigma_inf = {}",
            d.sigma_n, d.sigma_inf
        ));
    }

    let l = (d.diffusivity / d.lambda).sqrt();
    let lambda_chi = d.chi_bar * d.sigma_inf / (l * l);
    let pressure_scale = lambda_chi * l * l / d.mu;
    let eps = lambda_chi / d.lambda;

    let base = ModelParams {
        beta: l * d.beta,
        sigma_ul: d.sigma_n / d.sigma_inf,
        r0: d.r0 / l,
        r: d.r / l,
        chi: d.chi_sigma / d.chi_bar,
        g_inv: d.mu * d.gamma / (lambda_chi * l * l * l),
        prolif: d.lambda_m / lambda_chi,
        apopt: 0.0,
        apopt_source: ApoptosisSource::Geometry,
    };
    base.validate()?;
    let params = base.with_prescribed_apoptosis(d.lambda_a / d.lambda_m);
    let diag = Diagnostics {
        length_scale: l,
        lambda_chi,
        pressure_scale,
        eps,
        quasi_steady_warning: eps >= QUASI_STEADY_WARN,
        eps_ratio_one_hour: EPS_RATIO_ONE_HOUR,
        eps_ratio_migration_estimate: EPS_RATIO_MIGRATION_ESTIMATE,
    };
    Ok((params, diag))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Time in minutes: consumption once per minute, taxis once per hour.
    fn physiological() -> DimensionalParams {
        DimensionalParams {
            diffusivity: 1.0,
            lambda: 1.0,
            lambda_m: 1.0 / 60.0,
            lambda_a: 0.2 / 60.0,
            mu: 1.0,
            gamma: 1.0,
            chi_sigma: 1.0,
            chi_bar: 1.0 / 60.0,
            sigma_inf: 1.0,
            sigma_n: 0.5,
            beta: 1.0,
            r0: 0.5,
            r: 2.0,
        }
    }

    #[test]
    fn unit_length_when_rates_match() {
        let (p, diag) = nondimensionalize(&physiological()).unwrap();
        assert_eq!(diag.length_scale, 1.0);
        assert_eq!(p.beta, 1.0);
        assert_eq!(p.r, 2.0);
    }

    #[test]
    fn quasi_steady_ratio() {
        let (_, diag) = nondimensionalize(&physiological()).unwrap();
        assert!((diag.eps - 1.0 / 60.0).abs() < 1e-15);
        assert!((diag.eps - 0.017).abs() < 1e-3);
        assert!(!diag.quasi_steady_warning);
        assert!(diag.eps_ratio_migration_estimate < diag.eps_ratio_one_hour);

        let fast = DimensionalParams {
            chi_bar: 0.5,
            ..physiological()
        };
        assert!(nondimensionalize(&fast).unwrap().1.quasi_steady_warning);
    }

    #[test]
    fn mobility_and_adhesion_trade_off() {
        let base = physiological();
        let (p, _) = nondimensionalize(&base).unwrap();
        for c in [0.1, 3.0, 250.0] {
            let scaled = DimensionalParams {
                mu: base.mu * c,
                gamma: base.gamma / c,
                ..base
            };
            let (q, _) = nondimensionalize(&scaled).unwrap();
            assert!((q.g_inv - p.g_inv).abs() <= 1e-14 * p.g_inv);
        }
    }

    #[test]
    fn prescribed_apoptosis_is_rate_ratio() {
        let (p, _) = nondimensionalize(&physiological()).unwrap();
        assert_eq!(p.apopt_source, ApoptosisSource::Prescribed);
        assert!((p.apopt - 0.2).abs() < 1e-15);
        assert!((p.prolif - 1.0).abs() < 1e-14);
        assert_eq!(p.sigma_ul, 0.5);
    }

    #[test]
    fn rejects_bad_inputs() {
        let bad = DimensionalParams {
            diffusivity: -1.0,
            ..physiological()
        };
        assert!(nondimensionalize(&bad).is_err());
        let bad = DimensionalParams {
            sigma_n: 2.0,
            ..physiological()
        };
        assert!(nondimensionalize(&bad).is_err());
        let bad = DimensionalParams {
            r: 0.4,
            ..physiological()
        };
        assert!(nondimensionalize(&bad).is_err());
        assert!(ModelParams::new(1.0, 0.5, 1.0, 1.0, 0.0, 1.0, 1.0).is_err());
        assert!(ModelParams::new(1.0, 1.0, 0.5, 1.0, 0.0, 1.0, 1.0).is_err());
    }
}
