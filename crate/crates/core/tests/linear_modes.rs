use necrobifurc::linear_modes::{
    a_l_sequence, b_l_sequence, build_mode, g_beta_eval, harmonic_coefficients, harmonic_eval,
    harmonic_limit, l0_mode, mode_limits, mode_table,
};
use necrobifurc::nondim::ModelParams;
use necrobifurc::numerics::{linspace, rel_diff};
use necrobifurc::oracle::{max_rel_err, solve_q_bvp};
use necrobifurc::steady_state::{build_steady_state, pressure_eval, sigma_eval, SteadyState};
use necrobifurc::verify::limit_regime_params;
use necrobifurc::Error;

fn demo() -> SteadyState {
    build_steady_state(&ModelParams::demo()).unwrap()
}

#[test]
fn g_variants_at_the_boundaries() {
    let s = demo();
    let p = s.params;
    for l in [1, 2, 6, 20] {
        let m = build_mode(&s, l).unwrap();
        let at_r = m.g_variants(p.r).unwrap();
        assert!((at_r.g_inf - 1.0).abs() < 1e-14, "l = {l}");
        assert!((at_r.g_prime + p.beta * at_r.g - 1.0).abs() < 1e-14);
        let at_r0 = m.g_variants(p.r0).unwrap();
        assert_eq!(at_r0.g, 0.0);
        assert!(at_r0.g_prime > 0.0);
    }
}

#[test]
fn a_l_matches_finite_difference_log_derivative() {
    let s = demo();
    let r = 1.2;
    let h = 1e-5;
    let a = a_l_sequence(&s, r, 8).unwrap();
    for (k, &al) in a.iter().enumerate() {
        let l = k as u32 + 1;
        let m = build_mode(&s, l).unwrap();
        let ln_g = |x: f64| g_beta_eval(&m, x).unwrap().0.ln();
        let fd = (ln_g(r + h) - ln_g(r - h)) / (2.0 * h) - f64::from(l) / r;
        assert!((al - fd).abs() < 1e-7, "l = {l}: {al} vs {fd}");
    }
    assert!(a.windows(2).all(|w| w[1] < w[0]) && a.iter().all(|&v| v > 0.0));
}

#[test]
fn b_l_sequences_are_monotone() {
    let s = demo();
    let (at_r0, at_r) = b_l_sequence(&s, 16).unwrap();
    assert!(at_r0.windows(2).all(|w| w[1] < w[0]));
    assert!(at_r.windows(2).all(|w| w[1] > w[0]));
    // b_l(R) = 1 - beta G(R)
    for (k, &b) in at_r.iter().enumerate() {
        let m = build_mode(&s, k as u32 + 1).unwrap();
        let (g, _) = g_beta_eval(&m, s.params.r).unwrap();
        assert!((b - (1.0 - s.params.beta * g)).abs() < 1e-14);
    }
}

#[test]
fn two_evaluation_paths_agree() {
    let s = demo();
    for l in [0, 2, 5, 9] {
        let m = build_mode(&s, l).unwrap();
        for r in linspace(s.params.r0, s.params.r, 6) {
            let (q, dq) = m.q_eval(r).unwrap();
            let (qc, dqc) = m.q_eval_coefficients(r).unwrap();
            assert!(
                (q - qc).abs() < 1e-12 * q.abs().max(1e-3),
                "l = {l}, r = {r}"
            );
            assert!((dq - dqc).abs() < 1e-12 * dq.abs().max(1e-3));
        }
    }
}

#[test]
fn mode_matches_finite_difference_oracle() {
    let s = demo();
    for l in [0, 2, 5] {
        let m = build_mode(&s, l).unwrap();
        let prof = solve_q_bvp(&s.params, l, 4096).unwrap();
        let err = max_rel_err(&prof, |r| Ok(m.q_eval(r)?.0)).unwrap();
        assert!(err < 1e-6, "l = {l}: {err:e}");
    }
}

#[test]
fn limit_regime_recovers_mode_limits() {
    let p = limit_regime_params(1.0).unwrap();
    let s = build_steady_state(&p).unwrap();
    let (_, dsr, _) = sigma_eval(&s, p.r).unwrap();
    for l in 2..=8 {
        let m = build_mode(&s, l).unwrap();
        for r in [0.5, 1.0, 2.0] {
            let (q, dq) = m.q_eval(r).unwrap();
            let (ql, dql) = mode_limits(l, p.r, r).unwrap();
            assert!(rel_diff(q, ql, 1e-300) < 1e-3, "l = {l}, r = {r}");
            assert!(rel_diff(dq, dql, 1e-300) < 1e-3);
        }
        let (qr, _) = m.q_eval(p.r).unwrap();
        assert!((qr + dsr).abs() < 1e-3);
    }
    assert!(mode_limits(1, 2.0, 1.0).is_err());
}

#[test]
fn harmonic_coefficients_satisfy_both_conditions() {
    let s = demo();
    let p = s.params;
    for l in [1, 2, 7] {
        let m = build_mode(&s, l).unwrap().with_harmonics(1.3).unwrap();
        let (d1, d2) = (m.d1.unwrap(), m.d2.unwrap());
        let (_, dp0) = harmonic_eval(d1, d2, l, p.r0);
        let (_, dq0) = m.q_eval(p.r0).unwrap();
        assert!(rel_diff(dp0, 1.3 * dq0, 1e-12) < 1e-12);

        let s13 = s.with_prolif(1.3);
        let lf = f64::from(l);
        let (_, dps) = pressure_eval(&s13, p.r).unwrap();
        let (q, _) = m.q_eval(p.r).unwrap();
        let want = p.g_inv * (lf * lf - 1.0) / (p.r * p.r) - dps + (1.3 - p.chi) * q;
        let (pr, _) = harmonic_eval(d1, d2, l, p.r);
        assert!(rel_diff(pr, want, 1e-12) < 1e-12);
    }
}

#[test]
fn harmonic_part_tends_to_outer_data_as_core_vanishes() {
    let p = ModelParams::demo().with_r0(1e-6).unwrap();
    let s = build_steady_state(&p).unwrap();
    for l in [2, 4] {
        let m = build_mode(&s, l).unwrap();
        let (d1, d2) = harmonic_coefficients(&m, p.prolif).unwrap();
        for r in [0.5, 1.0, 2.0] {
            let (v, dv) = harmonic_eval(d1, d2, l, r);
            let (vl, dvl) = harmonic_limit(&m, p.prolif, r).unwrap();
            assert!(rel_diff(v, vl, 1e-12) < 1e-4, "l = {l}, r = {r}");
            assert!(rel_diff(dv, dvl, 1e-12) < 1e-4);
        }
    }
}

#[test]
fn radially_symmetric_mode_has_its_own_path() {
    let s = demo();
    let p = s.params;
    let m0 = build_mode(&s, 0).unwrap();
    assert!(matches!(
        harmonic_coefficients(&m0, 1.0),
        Err(Error::Misuse(_))
    ));
    let (p1, dp1) = l0_mode(&m0, p.prolif).unwrap();
    let (_, dps) = pressure_eval(&s, p.r).unwrap();
    assert_eq!(p1, -p.g_inv / (p.r * p.r) - dps);
    let (_, dq) = m0.q_eval(p.r).unwrap();
    assert_eq!(dp1, -(p.prolif - p.chi) * dq);
    let m2 = build_mode(&s, 2).unwrap();
    assert!(matches!(l0_mode(&m2, 1.0), Err(Error::Misuse(_))));
}

#[test]
fn mode_table_shape() {
    let s = demo();
    let t = mode_table(&s, &[0, 3], 4).unwrap();
    assert_eq!(
        t.headers,
        ["l", "r", "Q", "Q_prime", "G", "G_prime", "a_l", "b_l"]
    );
    assert_eq!(t.rows.len(), 10);
}
