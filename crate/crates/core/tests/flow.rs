use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use vaisman_core::flow::{
    self, advance_to, flow_rhs, leafwise_defect, ma_rhs, ma_rhs_extended, reference_form, rk4_step,
    run, FlowConfig, FlowOutcome, FlowState,
};
use vaisman_core::transverse::{ddbar, ricci};
use vaisman_core::{Error, GridSpec, HermitianField, RealField};

fn torus(n: usize, res: usize) -> Arc<GridSpec> {
    Arc::new(GridSpec::uniform(n, res, 2.0 * PI).unwrap())
}

fn bump(spec: &Arc<GridSpec>, eps: f64) -> HermitianField {
    HermitianField::from_fn(spec, true, |c, m| {
        m[0] = Complex64::new(1.0 + eps * c[0].cos(), 0.0)
    })
    .unwrap()
}

fn flat_state(spec: &Arc<GridSpec>) -> FlowState {
    FlowState::new(
        HermitianField::identity(spec),
        HermitianField::zeros(spec, true),
    )
    .unwrap()
}

#[test]
fn reference_form_examples() {
    let s = torus(1, 128);
    let st = flat_state(&s);
    assert_eq!(
        reference_form(&st, 3.0).unwrap(),
        HermitianField::identity(&s)
    );

    let psi = RealField::from_fn(&s, true, |c| 0.2 * c[0].cos());
    let chi = ddbar(&psi).unwrap();
    let st = FlowState::new(HermitianField::identity(&s), chi).unwrap();
    let expect =
        HermitianField::diagonal(&RealField::from_fn(&s, true, |c| 1.0 - 0.05 * c[0].cos()));
    assert!(
        reference_form(&st, 1.0)
            .unwrap()
            .sup_distance(&expect)
            .unwrap()
            < 1e-6
    );

    // Dyadic χ and t make the linearity identity exact.
    let s8 = torus(1, 8);
    let chi = HermitianField::diagonal(&RealField::from_fn(&s8, true, |c| {
        (c[0] * 4.0).round() / 8.0
    }));
    let mut st = flat_state(&s8);
    st.chi = chi.clone();
    let diff = reference_form(&st, 0.5)
        .unwrap()
        .sub(&reference_form(&st, 0.25).unwrap())
        .unwrap();
    assert_eq!(diff, chi.scale(0.25));
}

#[test]
fn ma_rhs_examples() {
    let cfg = FlowConfig::default();
    let s = torus(1, 64);
    assert!(ma_rhs(&flat_state(&s), &cfg).unwrap().sup_norm() < 1e-12);

    let s2 = torus(2, 8);
    let mut st = flat_state(&s2);
    st.chi = HermitianField::identity(&s2);
    st.t = 1.0;
    let rhs = ma_rhs(&st, &cfg).unwrap();
    assert!(rhs.values().iter().all(|&r| (r - 4f64.ln()).abs() < 1e-14));

    let st = FlowState::new(bump(&s, 0.1), HermitianField::zeros(&s, true)).unwrap();
    let exact = RealField::from_fn(&s, true, |c| (1.0 + 0.1 * c[0].cos()).ln());
    assert!(ma_rhs(&st, &cfg).unwrap().sub(&exact).unwrap().sup_norm() < 1e-6);
}

fn leaf_spec() -> Arc<GridSpec> {
    Arc::new(
        GridSpec::new(
            1,
            vec![8, 8],
            vec![2.0 * PI; 2],
            Some([128, 8]),
            Some([2.0 * PI; 2]),
        )
        .unwrap(),
    )
}

#[test]
fn extended_rhs_examples() {
    let cfg = FlowConfig {
        extended: true,
        ..Default::default()
    };
    let s = leaf_spec();
    let flat = flat_state(&s);
    assert!(ma_rhs_extended(&flat, &cfg).unwrap().sup_norm() < 1e-12);

    let leaf_mode = RealField::from_fn(&s, false, |c| c[2].sin());
    let st = FlowState::with_phi(
        HermitianField::identity(&s),
        HermitianField::zeros(&s, true),
        leaf_mode,
    )
    .unwrap();
    let expect = RealField::from_fn(&s, false, |c| -0.5 * c[2].sin());
    assert!(
        ma_rhs_extended(&st, &cfg)
            .unwrap()
            .sub(&expect)
            .unwrap()
            .sup_norm()
            < 1e-6
    );
    assert!((leafwise_defect(&st).unwrap() - 1.0).abs() < 1e-6);

    let basic = RealField::from_fn(&s, true, |c| 0.1 * c[0].cos() * c[1].sin()).to_full();
    let g0 = bump(&s, 0.1);
    let st = FlowState::with_phi(g0, HermitianField::zeros(&s, true), basic).unwrap();
    let a = ma_rhs_extended(&st, &cfg).unwrap();
    let b = ma_rhs(&st, &cfg).unwrap();
    assert!(a.sub(&b).unwrap().sup_norm() < 1e-12);
    assert_eq!(leafwise_defect(&flat).unwrap(), 0.0);
}

#[test]
fn extended_flow_needs_leaf_axes() {
    let cfg = FlowConfig {
        extended: true,
        ..Default::default()
    };
    let s = torus(1, 16);
    assert!(matches!(
        flow_rhs(&flat_state(&s), &cfg),
        Err(Error::InvalidConfig(_))
    ));
}

#[test]
fn rk4_examples() {
    let s = torus(1, 8);
    let one = RealField::constant(&s, true, 1.0);
    let out = rk4_step(&one, 0.0, 0.1, None, |_, y| Ok(y.scale(-1.0))).unwrap();
    assert!(out.values().iter().all(|&v| (v - 0.9048375).abs() < 1e-7));

    let zero = RealField::zeros(&s, true);
    let out = rk4_step(&zero, 0.0, 0.125, None, |_, _| {
        Ok(RealField::constant(&s, true, 2.0))
    })
    .unwrap();
    assert!(out.values().iter().all(|&v| v == 0.25));
}

#[test]
fn flat_data_is_a_fixed_point() {
    let s = torus(1, 32);
    let cfg = FlowConfig::default();
    let mut st = flat_state(&s);
    for _ in 0..100 {
        st = flow::step(&st, &cfg).unwrap().0;
    }
    assert!(st.phi.sup_norm() < 1e-10);

    let report = run(&flat_state(&s), &cfg).unwrap();
    assert_eq!(report.outcome, FlowOutcome::Converged);
    assert_eq!(report.steps, 0);
    assert_eq!(report.final_t, 0.0);
}

#[test]
fn rhs_is_gauge_invariant_bitwise() {
    let s = torus(1, 32);
    let cfg = FlowConfig::default();
    let quantize = |v: f64| (v * 1024.0).round() / 1024.0;
    let phi = RealField::from_fn(&s, true, |c| quantize(0.05 * c[0].cos()));
    let shifted = phi.shift(0.5);
    let g0 = bump(&s, 0.1);
    let zero = HermitianField::zeros(&s, true);
    let a = FlowState::with_phi(g0.clone(), zero.clone(), phi).unwrap();
    let b = FlowState::with_phi(g0, zero, shifted).unwrap();
    assert_eq!(ma_rhs(&a, &cfg).unwrap(), ma_rhs(&b, &cfg).unwrap());
}

#[test]
fn bump_relaxes_with_monotone_ricci() {
    let s = torus(1, 32);
    let cfg = FlowConfig {
        ricci_tolerance: 1e-5,
        max_steps: 20_000,
        ..Default::default()
    };
    let st = FlowState::new(bump(&s, 0.1), HermitianField::zeros(&s, true)).unwrap();
    let report = run(&st, &cfg).unwrap();
    assert_eq!(report.outcome, FlowOutcome::Converged);
    let tail = &report.history[report.history.len() / 5..];
    assert!(tail.windows(2).all(|w| w[1].ricci_sup <= w[0].ricci_sup));
    let det = report.final_state.metric(&cfg).unwrap().det();
    assert!(det.max_value() - det.min_value() < 1e-4);
}

#[test]
fn rescaled_flow_matches_unrescaled_after_time_change() {
    let s = torus(1, 32);
    let psi = RealField::from_fn(&s, true, |c| 0.2 * c[0].cos());
    let chi = ddbar(&psi).unwrap();
    let st = FlowState::new(bump(&s, 0.1), chi).unwrap();
    let plain = FlowConfig::default();
    let resc = FlowConfig {
        rescaled: true,
        ..Default::default()
    };
    let (mut a, mut b) = (st.clone(), st);
    for t in [0.1, 0.3] {
        let s_time = f64::exp(t) - 1.0;
        a = advance_to(&a, &plain, s_time).unwrap();
        b = advance_to(&b, &resc, t).unwrap();
        let ga = a.metric(&plain).unwrap();
        let gb = b.metric(&resc).unwrap().scale(f64::exp(t));
        assert!(ga.sup_distance(&gb).unwrap() < 1e-8, "t = {t}");
    }
}

#[test]
fn positivity_loss_is_reported() {
    let s = torus(1, 16);
    let phi = RealField::from_fn(&s, true, |c| -8.0 * c[0].cos());
    let st = FlowState::with_phi(
        HermitianField::identity(&s),
        HermitianField::zeros(&s, true),
        phi,
    )
    .unwrap();
    let err = flow::step(&st, &FlowConfig::default()).unwrap_err();
    assert!(matches!(err, Error::PositivityLost { .. }));
    let report = run(&st, &FlowConfig::default());
    assert!(matches!(report, Err(Error::PositivityLost { .. })));
}

#[test]
fn ricci_residual_uses_class_constant() {
    let s = torus(1, 16);
    let st = flat_state(&s);
    let cfg = FlowConfig {
        class_k: -1,
        ..Default::default()
    };
    let mut st2 = st.clone();
    flow::initialize(&mut st2, &cfg).unwrap();
    // Ric(δ) + δ = δ, so the residual is 1.
    assert!((st2.diagnostics.ricci_sup - 1.0).abs() < 1e-14);
    assert!(ricci(&HermitianField::identity(&s)).unwrap().sup_norm() == 0.0);
}

#[test]
fn history_csv_has_fixed_header() {
    let s = torus(1, 16);
    let st = FlowState::new(bump(&s, 0.05), HermitianField::zeros(&s, true)).unwrap();
    let cfg = FlowConfig {
        max_steps: 3,
        ..Default::default()
    };
    let report = run(&st, &cfg).unwrap();
    assert_eq!(report.outcome, FlowOutcome::NotConverged);
    let mut buf = Vec::new();
    flow::write_history(&report.history, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(text.lines().next().unwrap(), flow::HISTORY_HEADER);
    assert_eq!(text.lines().count(), 5);
    assert!(report.summary_json().unwrap().contains("not_converged"));
}
