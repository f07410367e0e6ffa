mod common;

use std::time::Duration;

use anneal_topo::design::volume_ratio;
use anneal_topo::fem::{total_compliance, FemModel};
use anneal_topo::model::{build_benchmark, parse_problem};
use anneal_topo::qubo::{build_qubo, make_layout, PenaltyConfig};
use anneal_topo::solvers::{exchange_response, read_exchange, solve_exhaustive, SolverChoice};
use anneal_topo::{init_design, run_annealing_optimization, DesignState, RunConfig};

#[test]
fn records_describe_the_analyzed_design() {
    let p = build_benchmark("truss21").unwrap();
    let cfg = RunConfig::for_benchmark("truss21").unwrap();
    let r = run_annealing_optimization(&p, &cfg).unwrap();
    let model = FemModel::new(&p);
    let vols = p.element_volumes();
    let v0: f64 = vols.iter().sum();
    let mut rho = vec![cfg.rho0; p.n_elements()];
    for (rec, next) in r.history.iter().zip(&r.designs) {
        let (sys, u) = model.solve(&rho).unwrap();
        assert_eq!(rec.objective, total_compliance(&sys, &u));
        let vol = rho.iter().zip(&vols).map(|(a, b)| a * b).sum::<f64>() / v0;
        assert!((rec.volume_ratio - vol).abs() <= 1e-14);
        rho = next.clone();
    }
    assert_eq!(rho, r.final_state.rho);
    assert_eq!(r.final_state.replay(), r.final_state.rho);
    assert_eq!(r.iterations, r.history.len());
}

#[test]
fn recorded_energies_are_exhaustive_minima() {
    let p = build_benchmark("truss6").unwrap();
    let cfg = RunConfig::for_benchmark("truss6").unwrap().exhaustive();
    let r = run_annealing_optimization(&p, &cfg).unwrap();
    let model = FemModel::new(&p);
    let layout = make_layout(6, 1, 1).unwrap();
    let pen = PenaltyConfig { lambda: cfg.lambda, theta_s: cfg.theta_s, v_target: cfg.v_target };
    let mut state: DesignState = init_design(6, cfg.rho0, cfg.theta_e).unwrap();
    for (k, rec) in r.history.iter().enumerate() {
        let (_, u) = model.solve(&state.rho).unwrap();
        let se = model.strain_energies(&state.rho, &u);
        let q = build_qubo(&p, &state, &se, &pen, &layout).unwrap();
        let brute = (0..128u64)
            .map(|v| q.evaluate(&anneal_topo::BitAssignment::from_integer(v, 7)))
            .fold(f64::INFINITY, f64::min);
        assert!((rec.energy.unwrap() - brute).abs() <= 1e-12 * brute.abs().max(1.0));
        // rebuild the next state from the recorded updaters
        state = anneal_topo::apply_update(&state, &r.final_state.alpha_log[k]);
        assert_eq!(state.rho, r.designs[k]);
    }
}

#[test]
fn sa_and_exhaustive_agree_on_truss6() {
    let p = build_benchmark("truss6").unwrap();
    let base = RunConfig::for_benchmark("truss6").unwrap();
    let ex = run_annealing_optimization(&p, &base.clone().exhaustive()).unwrap();
    let sa = run_annealing_optimization(&p, &base).unwrap();
    assert_eq!(ex.final_state.rho, sa.final_state.rho);
    assert_eq!(volume_ratio(&sa.final_state, &p), sa.final_volume_ratio);
}

#[test]
fn iteration_cap_stops_without_convergence() {
    let p = build_benchmark("truss6").unwrap();
    let mut cfg = RunConfig::for_benchmark("truss6").unwrap().exhaustive();
    cfg.max_iterations = 3;
    let r = run_annealing_optimization(&p, &cfg).unwrap();
    assert_eq!(r.history.len(), 3);
    assert!(!r.converged);
    assert_eq!(r.designs.len(), 3);
}

#[test]
fn single_element_saturates() {
    let p = parse_problem(
        r#"{"kind": "truss", "material": {"E": 2e11, "nu": 0.3},
            "truss": {"nodes": [[0, 0], [1, 0]], "members": [[0, 1, 0.5]]},
            "supports": [[0, 0], [0, 1], [1, 1]], "loads": [[1, [1000, 0]]], "v_target": 1.0}"#,
    )
    .unwrap();
    let cfg = RunConfig::for_problem(&p).exhaustive();
    let r = run_annealing_optimization(&p, &cfg).unwrap();
    assert!(r.converged);
    assert_eq!(r.final_state.rho, vec![1.0]);
    assert_eq!(r.final_state.theta, vec![1.0]);
    assert_eq!(r.final_volume_ratio, 1.0);
}

#[test]
fn invalid_configuration_is_rejected_before_any_work() {
    let p = build_benchmark("truss6").unwrap();
    for cfg in [
        RunConfig { lambda: 0.0, ..RunConfig::for_benchmark("truss6").unwrap() },
        RunConfig { n_q: 0, ..RunConfig::for_benchmark("truss6").unwrap() },
        RunConfig { rho0: 1.5, ..RunConfig::for_benchmark("truss6").unwrap() },
        RunConfig { window: 0, ..RunConfig::for_benchmark("truss6").unwrap() },
    ] {
        let f = run_annealing_optimization(&p, &cfg).unwrap_err();
        assert!(f.error.is_validation(), "{}", f.error);
        assert!(f.history.is_empty());
    }
}

#[test]
fn failure_keeps_completed_iterations() {
    let (endpoint, h) = common::spawn_stub(2, |body| {
        let q = read_exchange(body).unwrap();
        let best = solve_exhaustive(&q).unwrap();
        Some((200, exchange_response(&best.bits, best.energy)))
    });
    let p = build_benchmark("truss6").unwrap();
    let cfg = RunConfig::for_benchmark("truss6")
        .unwrap()
        .with_solver(SolverChoice::Remote { endpoint, timeout: Duration::from_secs(2) });
    let handle = std::thread::spawn(move || run_annealing_optimization(&p, &cfg));
    h.join().unwrap();
    let f = handle.join().unwrap().unwrap_err();
    assert_eq!(f.history.len(), 2);
    assert!(!f.error.is_validation());
}
