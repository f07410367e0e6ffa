mod common;

use std::time::Duration;

use anneal_topo::error::SolverError;
use anneal_topo::qubo::{BitAssignment, QuboProblem};
use anneal_topo::solvers::{
    exchange_response, read_exchange, solve_exhaustive, solve_exhaustive_capped, solve_remote, solve_sa,
    SaParams, SolverChoice,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_qubo(n: usize, seed: u64) -> QuboProblem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let linear: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mut quad = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            quad.push((i, j, rng.gen_range(-1.0..1.0)));
        }
    }
    QuboProblem::from_terms(n, rng.gen_range(-1.0..1.0), linear, quad).unwrap()
}

/// Brute-force minimum, written without Gray codes or incremental updates.
fn brute_min(q: &QuboProblem) -> f64 {
    let n = q.n_qubits();
    (0..1u64 << n)
        .map(|v| q.evaluate(&BitAssignment::from_integer(v, n)))
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn exhaustive_matches_brute_force() {
    for seed in 0..10 {
        let q = random_qubo(12, seed);
        let out = solve_exhaustive(&q).unwrap();
        assert_eq!(out.energy, q.evaluate(&out.bits));
        assert!((out.energy - brute_min(&q)).abs() <= 1e-12);
    }
}

#[test]
fn sa_finds_the_exhaustive_minimum() {
    let mut hits = 0;
    for seed in 0..100 {
        let q = random_qubo(16, 1000 + seed);
        let exact = solve_exhaustive(&q).unwrap();
        let sa = solve_sa(&q, &SaParams { seed, ..Default::default() }).unwrap();
        assert_eq!(sa.energy, q.evaluate(&sa.bits));
        if (sa.energy - exact.energy).abs() <= 1e-9 * exact.energy.abs().max(1.0) {
            hits += 1;
        }
    }
    assert!(hits >= 95, "SA matched exhaustive on {hits}/100 instances");
}

#[test]
fn sa_is_deterministic_for_a_seed() {
    let q = random_qubo(30, 7);
    let p = SaParams { seed: 42, sweeps: 300, ..Default::default() };
    let a = solve_sa(&q, &p).unwrap();
    let b = solve_sa(&q, &p).unwrap();
    assert_eq!(a.bits, b.bits);
    assert_eq!(a.energy.to_bits(), b.energy.to_bits());
}

#[test]
fn sa_rejects_bad_parameters() {
    let q = random_qubo(4, 0);
    for p in [
        SaParams { sweeps: 0, ..Default::default() },
        SaParams { restarts: 0, ..Default::default() },
        SaParams { cooling: 1.0, ..Default::default() },
        SaParams { initial_temperature: Some(-1.0), ..Default::default() },
    ] {
        assert!(matches!(solve_sa(&q, &p), Err(SolverError::InvalidParameter(_))));
    }
}

#[test]
fn exhaustive_ties_go_to_lowest_integer() {
    let q = QuboProblem::from_terms(2, 0.0, vec![-1.0, -1.0], [(0, 1, 1.0)]).unwrap();
    let out = solve_exhaustive(&q).unwrap();
    assert_eq!(out.bits.to_integer(), 1);
    assert_eq!(out.energy, -1.0);
    let flat = QuboProblem::from_terms(5, 2.0, vec![0.0; 5], []).unwrap();
    assert_eq!(solve_exhaustive(&flat).unwrap().bits.to_integer(), 0);
}

#[test]
fn exhaustive_cap_is_enforced() {
    let q = QuboProblem::from_terms(25, 0.0, vec![0.0; 25], []).unwrap();
    assert!(matches!(solve_exhaustive(&q), Err(SolverError::TooLarge { n: 25, cap: 24 })));
    assert!(matches!(solve_exhaustive_capped(&random_qubo(10, 1), 8), Err(SolverError::TooLarge { .. })));
}

#[test]
fn solver_choice_seed_override() {
    let q = random_qubo(20, 3);
    let choice = SolverChoice::Sa(SaParams { sweeps: 200, ..Default::default() });
    let a = choice.solve(&q, Some(9)).unwrap();
    let b = solve_sa(&q, &SaParams { sweeps: 200, seed: 9, ..Default::default() }).unwrap();
    assert_eq!(a.bits, b.bits);
}

#[test]
fn remote_echo_solver() {
    let q = random_qubo(10, 21);
    let (url, h) = common::spawn_stub(1, |body| {
        let q = read_exchange(body).unwrap();
        let best = solve_exhaustive(&q).unwrap();
        Some((200, exchange_response(&best.bits, best.energy)))
    });
    let out = solve_remote(&q, &url, Duration::from_secs(5)).unwrap();
    h.join().unwrap();
    assert!((out.energy - brute_min(&q)).abs() <= 1e-12);
    assert_eq!(out.energy, q.evaluate(&out.bits));
}

#[test]
fn remote_energy_is_recomputed_locally() {
    let q = random_qubo(6, 22);
    let (url, h) = common::spawn_stub(1, |_| Some((200, exchange_response(&[1, 0, 1, 0, 0, 1], -1e9))));
    let out = solve_remote(&q, &url, Duration::from_secs(5)).unwrap();
    h.join().unwrap();
    assert_eq!(out.bits.0, vec![1, 0, 1, 0, 0, 1]);
    assert_eq!(out.energy, q.evaluate(&out.bits));
}

#[test]
fn remote_rejects_malformed_answers() {
    let q = random_qubo(4, 23);
    for reply in ["not json", r#"{"bits": [1, 0], "energy": 0}"#, r#"{"bits": [1, 0, 2, 0], "energy": 0}"#] {
        let text = reply.to_string();
        let (url, h) = common::spawn_stub(1, move |_| Some((200, text.clone())));
        let err = solve_remote(&q, &url, Duration::from_secs(5)).unwrap_err();
        h.join().unwrap();
        assert!(matches!(err, SolverError::MalformedResponse(_)), "{reply}: {err}");
    }
}

#[test]
fn remote_http_error_is_a_network_error() {
    let q = random_qubo(4, 24);
    let (url, h) = common::spawn_stub(1, |_| Some((500, "{}".into())));
    let err = solve_remote(&q, &url, Duration::from_secs(5)).unwrap_err();
    h.join().unwrap();
    assert!(matches!(err, SolverError::Network { .. }), "{err}");
}

#[test]
fn remote_unreachable_endpoint() {
    let port = std::net::TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
    let q = random_qubo(4, 25);
    let err = solve_remote(&q, &format!("http://127.0.0.1:{port}/solve"), Duration::from_secs(2)).unwrap_err();
    assert!(matches!(err, SolverError::Network { .. }), "{err}");
}

#[test]
fn remote_timeout() {
    let q = random_qubo(4, 26);
    let (url, h) = common::spawn_stub(1, |_| None);
    let err = solve_remote(&q, &url, Duration::from_millis(300)).unwrap_err();
    assert!(matches!(err, SolverError::Timeout(_)), "{err}");
    h.join().unwrap();
}
