use necrobifurc::nondim::ModelParams;
use necrobifurc::oracle::radial::richardson_order;
use necrobifurc::oracle::{
    expansion_check_2d, oracle_agreement, oracle_table, solve_annulus, solve_pressure_bvp,
    solve_sigma_bvp,
};
use necrobifurc::steady_state::{build_steady_state, sigma_eval};
use necrobifurc::verify::{random_params, suite_rng};
use necrobifurc::Error;

#[test]
fn consistency_residual_detects_a_wrong_apoptosis_rate() {
    let p = ModelParams::demo();
    let s = build_steady_state(&p).unwrap();
    let good = solve_pressure_bvp(&p, &s, 1024).unwrap();
    assert!(
        good.consistency_residual < 1e-5,
        "{:e}",
        good.consistency_residual
    );
    let order = good.residual_order.unwrap();
    assert!((1.5..2.5).contains(&order), "{order}");

    // Shifting A by 0.1 leaves a flux mismatch of order P dA (R^2 - R0^2) / (2R).
    let mut wrong = s;
    wrong.apopt += 0.1;
    let bad = solve_pressure_bvp(&p, &wrong, 1024).unwrap();
    let expected = p.prolif * 0.1 * (p.r * p.r - p.r0 * p.r0) / (2.0 * p.r);
    assert!(
        (bad.consistency_residual - expected).abs() < 0.01 * expected,
        "{} vs {expected}",
        bad.consistency_residual
    );
}

#[test]
fn nutrient_oracle_is_second_order() {
    let p = ModelParams::demo();
    let prof = solve_sigma_bvp(&p, 1024).unwrap();
    let order = prof.convergence_order.unwrap();
    assert!((1.7..=2.3).contains(&order), "{order}");

    let u = |n: usize| solve_sigma_bvp(&p, n).unwrap().values;
    let order = richardson_order(&u(64), &u(128), &u(256)).unwrap();
    assert!((1.9..=2.1).contains(&order), "{order}");
}

#[test]
fn oracle_is_exact_for_the_trivial_state() {
    let p = ModelParams::new(0.0, 0.0, 0.5, 2.0, 1.0, 1.0, 1.0).unwrap();
    let prof = solve_sigma_bvp(&p, 128).unwrap();
    assert!(prof.values.iter().all(|&v| v == 0.0));
    assert!(prof.convergence_order.is_none());
}

#[test]
fn agreement_on_random_draws() {
    let mut rng = suite_rng(3, "oracle-tests");
    for _ in 0..3 {
        let p = random_params(&mut rng);
        let rows = oracle_agreement(&p, &[0, 2, 5], 4096).unwrap();
        assert_eq!(rows.len(), 5);
        for row in &rows {
            assert!(row.max_rel_err < 1e-6, "{p:?}: {row:?}");
            let order = row.conv_order.unwrap();
            assert!((1.7..=2.3).contains(&order), "{p:?}: {row:?}");
        }
        let t = oracle_table(&rows);
        assert_eq!(
            t.headers,
            ["quantity", "grid_n", "max_rel_err", "conv_order"]
        );
    }
}

#[test]
fn unperturbed_annulus_reproduces_the_radial_solution() {
    let p = ModelParams::demo();
    let s = build_steady_state(&p).unwrap();
    let f = solve_annulus(&p, 2, 0.0, (128, 16)).unwrap();
    let mut err: f64 = 0.0;
    for i in 0..=f.n_r {
        let (exact, _, _) = sigma_eval(&s, f.radii[i * f.n_theta]).unwrap();
        for j in 0..f.n_theta {
            err = err.max((f.at(i, j) - exact).abs());
        }
    }
    assert!(err < 1e-5, "{err:e}");
}

#[test]
fn coarse_two_dimensional_grid_is_inconclusive() {
    let p = ModelParams::demo();
    let out = expansion_check_2d(&p, 2, &[0.02, 0.01], (16, 16));
    assert!(
        matches!(out, Err(Error::InconclusiveResolution(_))),
        "{out:?}"
    );
}
