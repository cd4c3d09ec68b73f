use necrobifurc::nondim::{nondimensionalize, ApoptosisSource, DimensionalParams};
use necrobifurc::steady_state::{build_steady_state, solve_radius};

/// Times in minutes: consumption once per minute, taxis once per hour.
fn physiological() -> DimensionalParams {
    DimensionalParams {
        diffusivity: 1.0,
        lambda: 1.0,
        lambda_m: 1.0 / 60.0,
        lambda_a: 0.2 / 60.0,
        mu: 1.0,
        gamma: 1.0,
        chi_sigma: 1.0 / 60.0,
        chi_bar: 1.0 / 60.0,
        sigma_inf: 1.0,
        sigma_n: 0.5,
        beta: 1.0,
        r0: 0.5,
        r: 2.0,
    }
}

#[test]
fn minute_over_hour_ratio() {
    let (p, diag) = nondimensionalize(&physiological()).unwrap();
    assert!((diag.eps - 0.017).abs() < 1e-3);
    assert!(!diag.quasi_steady_warning);
    assert_eq!(p.chi, 1.0);
}

#[test]
fn common_rescaling_of_diffusion_and_consumption() {
    let base = physiological();
    let (p, d) = nondimensionalize(&base).unwrap();
    let c = 4.0;
    let scaled = DimensionalParams {
        diffusivity: base.diffusivity * c,
        lambda: base.lambda * c,
        ..base
    };
    let (q, e) = nondimensionalize(&scaled).unwrap();
    // The diffusion length is unchanged, so every dimensionless parameter is
    // too; only the nutrient time-scale ratio shrinks by the factor.
    assert_eq!(p, q);
    assert_eq!(d.length_scale, e.length_scale);
    assert!((e.eps * c - d.eps).abs() < 1e-15);
}

#[test]
fn prescribed_apoptosis_pipeline() {
    let (p, _) = nondimensionalize(&physiological()).unwrap();
    assert_eq!(p.apopt_source, ApoptosisSource::Prescribed);
    // The carried-over radius does not balance the prescribed rate, so the
    // radius is solved for first.
    let r = solve_radius(&p, p.apopt, (p.r0 * 1.01, 20.0)).unwrap();
    let fixed = p.with_radius(r).unwrap();
    let s = build_steady_state(&fixed).unwrap();
    assert!((s.apopt - p.apopt).abs() < 1e-10);
}
