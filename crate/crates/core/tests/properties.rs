use std::f64::consts::PI;
use std::sync::Arc;

use approx::{abs_diff_eq, assert_abs_diff_eq};
use num_complex::Complex64;
use proptest::prelude::*;
use vaisman_core::einstein::{
    assemble_full_ricci, frame_trace, homothety_blocks, ke_homothety, quasi_einstein_fit,
    scalar_curvature_relation, weyl_ricci_residual,
};
use vaisman_core::flow::{ma_rhs, FlowConfig, FlowState};
use vaisman_core::grid::{fd_derivative, integrate, wirtinger};
use vaisman_core::transverse::{ddbar, ricci};
use vaisman_core::vaisman::{Potential, VaismanChart};
use vaisman_core::{GridSpec, HermitianField, RealField, Snapshot};

/// Trigonometric polynomial `Σ a cos(k·x + φ)` on the transverse axes.
#[derive(Clone, Debug)]
struct Modes(Vec<(f64, i32, i32, f64)>);

impl Modes {
    fn field(&self, s: &Arc<GridSpec>) -> RealField {
        RealField::from_fn(s, true, |c| {
            self.0
                .iter()
                .map(|&(a, k1, k2, ph)| a * (k1 as f64 * c[0] + k2 as f64 * c[1] + ph).cos())
                .sum()
        })
    }
}

fn modes(amp: f64) -> impl Strategy<Value = Modes> {
    prop::collection::vec((-amp..amp, -3i32..=3, -3i32..=3, 0.0..2.0 * PI), 1..4).prop_map(Modes)
}

fn torus(res: usize) -> Arc<GridSpec> {
    Arc::new(GridSpec::uniform(1, res, 2.0 * PI).unwrap())
}

fn chart_spec(res: usize) -> Arc<GridSpec> {
    Arc::new(
        GridSpec::uniform(1, res, 2.0 * PI)
            .unwrap()
            .with_leaf(8, 2.0 * PI)
            .unwrap(),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn ddbar_is_linear_and_hermitian(f in modes(1.0), g in modes(1.0), a in -2.0..2.0f64, b in -2.0..2.0f64) {
        let s = torus(16);
        let (f, g) = (f.field(&s), g.field(&s));
        let lhs = ddbar(&f.scale(a).add(&g.scale(b)).unwrap()).unwrap();
        let rhs = ddbar(&f).unwrap().combine(a, &ddbar(&g).unwrap(), b).unwrap();
        prop_assert!(lhs.sup_distance(&rhs).unwrap() < 1e-10);
        prop_assert!(lhs.hermiticity_defect() < 1e-14);
    }

    #[test]
    fn wirtinger_derivatives_are_conjugate_for_real_input(f in modes(1.0)) {
        let s = torus(16);
        let f = f.field(&s);
        let dz = wirtinger(&f, 0, false).unwrap();
        let dzb = wirtinger(&f, 0, true).unwrap();
        for (a, b) in dz.values().iter().zip(dzb.values()) {
            prop_assert!((a.conj() - b).norm() < 1e-13);
        }
    }

    #[test]
    fn derivatives_integrate_to_zero(f in modes(1.0), axis in 0usize..2) {
        let s = torus(16);
        let d = fd_derivative(&f.field(&s), axis, 1).unwrap();
        prop_assert!(integrate(&d).abs() < 1e-11);
        let d2 = fd_derivative(&f.field(&s), axis, 2).unwrap();
        prop_assert!(integrate(&d2).abs() < 1e-10);
    }

    #[test]
    fn ricci_is_scale_invariant(f in modes(0.05), c in 0.2..5.0f64) {
        let s = torus(16);
        let g = HermitianField::identity(&s).add(&ddbar(&f.field(&s)).unwrap()).unwrap();
        let gc = g.scale(c);
        let ld = g.log_det().unwrap().shift(c.ln());
        prop_assert!(gc.log_det().unwrap().sub(&ld).unwrap().sup_norm() < 1e-12);
        prop_assert!(ricci(&gc).unwrap().sup_distance(&ricci(&g).unwrap()).unwrap() < 1e-9);
    }

    #[test]
    fn stencil_order_survives_refinement(k in 1i32..=3, ph in 0.0..2.0 * PI) {
        let errs: Vec<f64> = [32usize, 64].iter().map(|&r| {
            let s = torus(r);
            let f = RealField::from_fn(&s, true, |c| (k as f64 * c[0] + ph).sin());
            let exact = RealField::from_fn(&s, true, |c| k as f64 * (k as f64 * c[0] + ph).cos());
            fd_derivative(&f, 0, 1).unwrap().sub(&exact).unwrap().sup_norm()
        }).collect();
        prop_assert!((errs[0] / errs[1]).log2() >= 3.5, "{errs:?}");
    }

    #[test]
    fn monge_ampere_rhs_is_gauge_invariant(f in modes(0.05), c in -3.0..3.0f64) {
        let s = torus(16);
        let phi = f.field(&s);
        let g0 = HermitianField::identity(&s);
        let zero = HermitianField::zeros(&s, true);
        let cfg = FlowConfig::default();
        let a = ma_rhs(&FlowState::with_phi(g0.clone(), zero.clone(), phi.clone()).unwrap(), &cfg).unwrap();
        let b = ma_rhs(&FlowState::with_phi(g0, zero, phi.shift(c)).unwrap(), &cfg).unwrap();
        prop_assert!(a.sub(&b).unwrap().sup_norm() < 1e-12);
    }

    #[test]
    fn charts_from_random_potentials_are_consistent(f in modes(0.08)) {
        let s = chart_spec(16);
        let chart = VaismanChart::from_potential(Potential::flat(f.field(&s)).unwrap()).unwrap();
        let inv = chart.invariants().unwrap();
        prop_assert!(inv.failure().is_none(), "{inv:?}");
        prop_assert!(inv.j_square <= 1e-10);
        prop_assert!(chart.residuals().unwrap().r2 == 0.0);
    }

    #[test]
    fn q_homothety_composes(a in 0.1..4.0f64, b in 0.1..4.0f64) {
        let s = chart_spec(8);
        let chart = VaismanChart::flat(&s).unwrap();
        let frame = chart.frame().unwrap();
        let ab = chart.q_homothety(a).unwrap().q_homothetic(b, chart.theta(), chart.theta_c()).unwrap();
        let direct = chart.q_homothety(a * b).unwrap();
        let d = ab.transverse_block(&frame).unwrap().sup_distance(&direct.transverse_block(&frame).unwrap()).unwrap();
        // round-off relative to the size of the transverse block
        prop_assert!(d < 1e-12 * (a * b).max(1.0), "{d}");
        prop_assert!(direct.symmetry_defect() == 0.0);
    }

    #[test]
    fn ke_inputs_fit_with_zero_alpha(kappa in -2.0..4.0f64, f in modes(0.05), n in 1usize..=2) {
        let s = Arc::new(GridSpec::uniform(n, 8, 2.0 * PI).unwrap());
        let g = HermitianField::identity(&s).add(&ddbar(&f.field(&s)).unwrap()).unwrap();
        let ric = assemble_full_ricci(&g.scale(kappa), &g, n).unwrap();
        let fit = quasi_einstein_fit(&ric, &g, n).unwrap();
        prop_assert!(abs_diff_eq!(fit.alpha, n as f64 / 2.0 - kappa + 0.5, epsilon = 1e-8));
        prop_assert!(abs_diff_eq!(fit.lambda, kappa - 0.5, epsilon = 1e-8));
        prop_assert!(fit.constraints_ok(n) && fit.residual < 1e-12);

        let s_rel = scalar_curvature_relation(fit.lambda, n);
        let tr = frame_trace(&ric, &g).unwrap();
        prop_assert!(tr.values().iter().all(|&v| (v - s_rel).abs() < 1e-8));

        // Einstein–Weyl exactly when (λ, α, β) = (n/2, 0, −n/2).
        let weyl = weyl_ricci_residual(&ric, &g, n).unwrap();
        let half = n as f64 / 2.0;
        let is_ew_fit = (fit.lambda - half).abs() < 1e-8 && fit.alpha.abs() < 1e-8 && (fit.beta + half).abs() < 1e-8;
        prop_assert_eq!(weyl <= 1e-10, is_ew_fit);
    }

    #[test]
    fn homothety_lands_on_normal_form(lambda in -0.45..5.0f64, n in 1usize..=3) {
        let s = Arc::new(GridSpec::uniform(n, 8, 2.0 * PI).unwrap());
        let g = HermitianField::identity(&s).scale(1.3);
        let a = ke_homothety(lambda, n).unwrap();
        prop_assert!(a > 0.0);
        let (ric, gt) = homothety_blocks(&g.scale(lambda + 0.5), &g, a, n).unwrap();
        prop_assert!(ric.q_block.combine(1.0, &gt, -(n as f64) / 2.0).unwrap().sup_norm() < 1e-8);
    }

    #[test]
    fn snapshots_round_trip_bitwise(vals in prop::collection::vec(-1e6..1e6f64, 64)) {
        let s = torus(8);
        let f = RealField::from_values(s, true, vals).unwrap();
        let text = Snapshot::from_real(&f).to_json().unwrap();
        prop_assert_eq!(Snapshot::from_json(&text).unwrap().to_real().unwrap(), f);
    }
}

#[test]
fn weyl_residual_of_flat_input_is_one() {
    let s = torus(8);
    let g = HermitianField::identity(&s);
    let ric = assemble_full_ricci(&ricci(&g).unwrap(), &g, 1).unwrap();
    assert_abs_diff_eq!(
        weyl_ricci_residual(&ric, &g, 1).unwrap(),
        1.0,
        epsilon = 1e-14
    );
    let z = HermitianField::from_fn(&s, true, |_, m| m[0] = Complex64::new(2.0, 0.0)).unwrap();
    assert_abs_diff_eq!(z.log_det().unwrap().mean(), 2f64.ln(), epsilon = 1e-15);
}
