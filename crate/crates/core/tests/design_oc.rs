use anneal_topo::design::{apply_update, decode_alphas, init_design, EPS_ALPHA, EPS_RHO};
use anneal_topo::error::OcError;
use anneal_topo::model::build_benchmark;
use anneal_topo::oc::{oc_update, run_oc, OcParams};
use anneal_topo::qubo::{make_layout, BitAssignment};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn replay_reproduces_the_design(
        n in 1usize..12,
        rho0 in 0.05f64..=1.0,
        steps in prop::collection::vec(prop::collection::vec(1e-6f64..1.3, 12), 0..25),
    ) {
        let mut s = init_design(n, rho0, 1.1).unwrap();
        for a in &steps {
            s = apply_update(&s, &a[..n]);
            prop_assert!(s.rho.iter().all(|&r| (EPS_RHO..=1.0).contains(&r)));
        }
        prop_assert_eq!(s.replay(), s.rho.clone());
        prop_assert_eq!(s.iteration, steps.len());
    }

    #[test]
    fn cap_latch_is_permanent(seq in prop::collection::vec(0.5f64..1.5, 1..30)) {
        let mut s = init_design(1, 0.7, 1.1).unwrap();
        let mut latched = false;
        for a in seq {
            let before = s.rho[0] * a;
            s = apply_update(&s, &[a]);
            latched |= before > 1.0;
            prop_assert_eq!(s.theta[0] == 1.0, latched);
        }
    }

    #[test]
    fn decoded_updaters_stay_in_range(n_q in 1usize..=3, bits in prop::collection::vec(0u8..=1, 4 * 3 + 1)) {
        let l = make_layout(4, n_q, 1).unwrap();
        let s = init_design(4, 0.4, 1.1).unwrap();
        let b = BitAssignment(bits[..l.n_qubits()].to_vec());
        let a = decode_alphas(&b, &l, &s).unwrap();
        for (e, &x) in a.iter().enumerate() {
            prop_assert!((EPS_ALPHA..=1.1).contains(&x));
            let all_on = l.element_qubits(e).all(|i| b[i] == 1);
            prop_assert_eq!(x == 1.1, all_on);
        }
    }

    #[test]
    fn oc_meets_the_volume_target(
        rho in prop::collection::vec(0.1f64..=1.0, 8),
        sens in prop::collection::vec(0.01f64..10.0, 8),
        vols in prop::collection::vec(0.5f64..2.0, 8),
        target in 0.2f64..0.8,
    ) {
        let p = OcParams::default();
        let x = oc_update(&rho, &sens, &vols, target, &p).unwrap();
        let v0: f64 = vols.iter().sum();
        let ratio = x.iter().zip(&vols).map(|(r, v)| r * v).sum::<f64>() / v0;
        let lo: f64 = rho.iter().zip(&vols).map(|(r, v)| (r - p.move_limit).max(EPS_RHO) * v).sum::<f64>() / v0;
        let hi: f64 = rho.iter().zip(&vols).map(|(r, v)| (r + p.move_limit).min(1.0) * v).sum::<f64>() / v0;
        if (lo..=hi).contains(&target) {
            prop_assert!((ratio - target).abs() <= 1e-6, "{ratio} vs {target}");
        }
        for (a, b) in x.iter().zip(&rho) {
            prop_assert!((EPS_RHO..=1.0).contains(a));
            prop_assert!((a - b).abs() <= p.move_limit + 1e-12);
        }
    }

    #[test]
    fn oc_is_invariant_to_sensitivity_scale(
        sens in prop::collection::vec(0.01f64..10.0, 6),
        scale in 1e-3f64..1e6,
    ) {
        let rho = [0.5; 6];
        let vols = [1.0; 6];
        let a = oc_update(&rho, &sens, &vols, 0.5, &OcParams::default()).unwrap();
        let scaled: Vec<f64> = sens.iter().map(|s| s * scale).collect();
        let b = oc_update(&rho, &scaled, &vols, 0.5, &OcParams::default()).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() <= 1e-5);
        }
    }
}

#[test]
fn oc_rejects_negative_sensitivities() {
    let err = oc_update(&[0.5], &[-1.0], &[1.0], 0.5, &OcParams::default()).unwrap_err();
    assert!(matches!(err, OcError::InvalidInput(_)));
}

#[test]
fn oc_runs_keep_the_volume_on_trusses() {
    for name in ["truss6", "truss21", "truss29"] {
        let p = build_benchmark(name).unwrap();
        let r = run_oc(&p, &OcParams::default(), p.v_target).unwrap();
        assert!(r.converged, "{name}");
        assert!((r.final_volume_ratio - p.v_target).abs() <= 1e-5, "{name}: {}", r.final_volume_ratio);
        assert!(r.history.windows(2).all(|w| w[1].iteration == w[0].iteration + 1));
        assert!(r.history.iter().all(|h| h.energy.is_none()));
    }
}

#[test]
fn oc_truss6_prefers_the_two_bar_path() {
    let p = build_benchmark("truss6").unwrap();
    let r = run_oc(&p, &OcParams::default(), p.v_target).unwrap();
    let rho = &r.final_state.rho;
    // members 0 and 5 carry the load to the supports
    let heavy = rho[0].min(rho[5]);
    let light = rho[1].max(rho[2]).max(rho[3]).max(rho[4]);
    assert!(heavy > light, "{rho:?}");
}
