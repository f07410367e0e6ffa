use anneal_topo::design::init_design;
use anneal_topo::model::{build_benchmark, Geometry, LoadCase, MaterialParams, PointLoad, Problem, ProblemKind, Supports, TrussModel, BENCHMARKS};
use anneal_topo::qubo::{build_qubo, direct_cost, make_layout, BitAssignment, PenaltyConfig, QuboProblem, VariableMap};
use anneal_topo::solvers::{delta_energy, read_exchange, solve_exhaustive, write_exchange};
use anneal_topo::DesignState;
use proptest::prelude::*;

fn lattice_problem(cols: usize, rows: usize, areas: &[f64]) -> Problem {
    let mut t = TrussModel::lattice(cols, rows, 1.0);
    for (m, a) in t.members.iter_mut().zip(areas.iter().cycle()) {
        m.area = *a;
    }
    let mut supports = Supports::default();
    supports.fix_node(0, 2);
    supports.fix_node(cols * (rows - 1), 2);
    Problem {
        name: None,
        kind: ProblemKind::Truss,
        geometry: Geometry::Truss(t),
        material: MaterialParams::new(2e11, 0.3),
        loads: LoadCase { point_loads: vec![PointLoad { node: cols - 1, force: [0.0, -1e3, 0.0] }] },
        supports,
        v_target: 0.5,
    }
}

/// Penalized cost computed from its unexpanded definition.
fn oracle_cost(p: &Problem, s: &DesignState, se: &[f64], cfg: &PenaltyConfig, l: &VariableMap, bits: &[u8]) -> f64 {
    let Geometry::Truss(t) = &p.geometry else { unreachable!() };
    let vol: Vec<f64> = t.members.iter().zip(t.lengths()).map(|(m, len)| m.area * len).collect();
    let v0: f64 = vol.iter().sum();
    let w: f64 = (1..=l.n_q).map(|k| k as f64).sum();
    let ws: f64 = (1..=l.n_s).map(|k| k as f64).sum();
    let mut work = 0.0;
    let mut volume = 0.0;
    for e in 0..l.n_elem {
        let xi_e: f64 = (0..l.n_q).map(|k| (k + 1) as f64 * bits[e * l.n_q + k] as f64).sum::<f64>() / w;
        work += s.theta[e] * xi_e * se[e];
        volume += s.theta[e] * xi_e * s.rho[e] * vol[e] / v0;
    }
    let base = l.n_elem * l.n_q;
    let xi_s: f64 = (0..l.n_s).map(|k| (k + 1) as f64 * bits[base + k] as f64).sum::<f64>() / ws;
    let g = volume - (cfg.v_target - cfg.theta_s * xi_s);
    -work + cfg.lambda * g * g
}

#[derive(Debug, Clone)]
struct Case {
    cols: usize,
    rows: usize,
    areas: Vec<f64>,
    rho: Vec<f64>,
    theta: Vec<f64>,
    se: Vec<f64>,
    n_q: usize,
    n_s: usize,
    cfg: PenaltyConfig,
    bits: Vec<u8>,
}

fn arb_case() -> impl Strategy<Value = Case> {
    (2usize..=4, 2usize..=3, 1usize..=3, 1usize..=3).prop_flat_map(|(cols, rows, n_q, n_s)| {
        let n = TrussModel::lattice(cols, rows, 1.0).members.len();
        let nbits = n * n_q + n_s;
        (
            prop::collection::vec(0.01f64..2.0, n),
            prop::collection::vec(1e-6f64..=1.0, n),
            prop::collection::vec(prop_oneof![Just(1.0), 1.0f64..1.3], n),
            prop::collection::vec(0.0f64..1e3, n),
            (0.0f64..1e4, 1e-3f64..0.1, 0.05f64..=1.0),
            prop::collection::vec(0u8..=1, nbits),
        )
            .prop_map(move |(areas, rho, theta, se, (lambda, theta_s, v_target), bits)| Case {
                cols,
                rows,
                areas,
                rho,
                theta,
                se,
                n_q,
                n_s,
                cfg: PenaltyConfig { lambda, theta_s, v_target },
                bits,
            })
    })
}

fn setup(c: &Case) -> (Problem, DesignState, VariableMap, QuboProblem) {
    let p = lattice_problem(c.cols, c.rows, &c.areas);
    let mut s = init_design(p.n_elements(), 0.5, 1.1).unwrap();
    s.rho = c.rho.clone();
    s.theta = c.theta.clone();
    let l = make_layout(p.n_elements(), c.n_q, c.n_s).unwrap();
    let q = build_qubo(&p, &s, &c.se, &c.cfg, &l).unwrap();
    (p, s, l, q)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn expansion_matches_direct_cost(c in arb_case()) {
        let (p, s, l, q) = setup(&c);
        let oracle = oracle_cost(&p, &s, &c.se, &c.cfg, &l, &c.bits);
        let energy = q.evaluate(&c.bits);
        prop_assert!((energy - oracle).abs() <= 1e-9 * oracle.abs().max(1.0), "{energy} vs {oracle}");
        let lib = direct_cost(&p, &s, &c.se, &c.cfg, &l, &BitAssignment(c.bits.clone())).unwrap();
        prop_assert!((lib - oracle).abs() <= 1e-9 * oracle.abs().max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn flip_delta_matches_reevaluation(c in arb_case(), pick in any::<prop::sample::Index>()) {
        let (_, _, _, q) = setup(&c);
        let i = pick.index(c.bits.len());
        let bits = BitAssignment(c.bits.clone());
        let d = delta_energy(&q, &bits, i).unwrap();
        let mut flipped = c.bits.clone();
        flipped[i] ^= 1;
        let exact = q.evaluate(&flipped) - q.evaluate(&c.bits);
        prop_assert!((d - exact).abs() <= 1e-9 * q.evaluate(&c.bits).abs().max(1.0));
    }

    #[test]
    fn exchange_round_trip_preserves_energies(c in arb_case()) {
        let (_, _, _, q) = setup(&c);
        let mut buf = Vec::new();
        write_exchange(&q, &mut buf).unwrap();
        let back = read_exchange(std::str::from_utf8(&buf).unwrap()).unwrap();
        prop_assert_eq!(back.n_qubits(), q.n_qubits());
        let a = q.evaluate(&c.bits);
        let b = back.evaluate(&c.bits);
        prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0));
    }

    #[test]
    fn integer_encoding_round_trips(v in 0u64..(1 << 20), n in 20usize..40) {
        let b = BitAssignment::from_integer(v, n);
        prop_assert_eq!(b.len(), n);
        prop_assert_eq!(b.to_integer(), v);
    }
}

#[test]
fn benchmark_qubit_counts() {
    let counts: Vec<usize> = BENCHMARKS
        .iter()
        .map(|b| make_layout(build_benchmark(b).unwrap().n_elements(), 1, 1).unwrap().n_qubits())
        .collect();
    assert_eq!(counts, [7, 22, 30, 51, 3201, 8001, 6001]);
}

#[test]
fn layout_counts_with_more_qubits() {
    let l = make_layout(10, 3, 2).unwrap();
    assert_eq!(l.n_qubits(), 32);
    assert_eq!(l.element_qubits(4), 12..15);
    assert_eq!(l.slack_qubits(), 30..32);
}

#[test]
fn materialized_pairs_cover_every_coupling() {
    let p = build_benchmark("truss6").unwrap();
    let s = init_design(6, 0.35, 1.1).unwrap();
    let l = make_layout(6, 1, 1).unwrap();
    let cfg = PenaltyConfig { lambda: 5.0, theta_s: 0.02, v_target: 0.35 };
    let q = build_qubo(&p, &s, &[1.0; 6], &cfg, &l).unwrap();
    assert_eq!(q.quadratic_terms().count(), 21);
    assert_eq!(q.n_quadratic_terms(), 21);
    let explicit = QuboProblem::from_terms(7, q.offset(), q.linear().to_vec(), q.quadratic_terms()).unwrap();
    for v in 0..128u64 {
        let b = BitAssignment::from_integer(v, 7);
        assert!((explicit.evaluate(&b) - q.evaluate(&b)).abs() <= 1e-12);
    }
}

#[test]
fn lambda_zero_selects_every_positive_energy_element() {
    let p = build_benchmark("truss6").unwrap();
    let s = init_design(6, 0.35, 1.1).unwrap();
    let l = make_layout(6, 1, 1).unwrap();
    let se = [3.0, 0.0, 1.0, 2.0, 0.5, 4.0];
    let cfg = PenaltyConfig { lambda: 0.0, theta_s: 0.02, v_target: 0.35 };
    let q = build_qubo(&p, &s, &se, &cfg, &l).unwrap();
    let best = solve_exhaustive(&q).unwrap();
    assert_eq!(&best.bits[..6], &[1, 0, 1, 1, 1, 1]);
    // slack is free, so the lowest integer wins the tie
    assert_eq!(best.bits[6], 0);
}

#[test]
fn large_penalty_ground_state_tracks_the_volume_target() {
    let p = build_benchmark("truss6").unwrap();
    let s = init_design(6, 0.35, 1.1).unwrap();
    let l = make_layout(6, 2, 2).unwrap();
    let se = [3.0, 0.1, 1.0, 2.0, 0.5, 4.0];
    let cfg = PenaltyConfig { lambda: 1e6, theta_s: 0.02, v_target: 0.35 };
    let q = build_qubo(&p, &s, &se, &cfg, &l).unwrap();
    let best = solve_exhaustive(&q).unwrap();
    let g2 = |bits: &[u8]| {
        direct_cost(&p, &s, &[0.0; 6], &PenaltyConfig { lambda: 1.0, ..cfg }, &l, &BitAssignment(bits.to_vec())).unwrap()
    };
    let min_g2 = (0..1u64 << 14).map(|v| g2(&BitAssignment::from_integer(v, 14))).fold(f64::INFINITY, f64::min);
    // the work term can buy at most Σ Θ·SE of penalty
    let max_work: f64 = se.iter().map(|x| 1.1 * x).sum();
    assert!(g2(&best.bits) <= min_g2 + max_work / cfg.lambda + 1e-12);
}
