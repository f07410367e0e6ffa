//! Builds the first-iteration QUBO of the six-member truss, checks the
//! expanded form against the penalized cost on every bit string and prints
//! the ground state.
//!
//!     cargo run --release --example qubo_expansion

use anneal_topo::design::init_design;
use anneal_topo::fem::FemModel;
use anneal_topo::model::build_benchmark;
use anneal_topo::qubo::{build_qubo, direct_cost, make_layout, BitAssignment, PenaltyConfig};
use anneal_topo::RunConfig;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let problem = build_benchmark("truss6")?;
    let cfg = RunConfig::for_benchmark("truss6").unwrap();
    let state = init_design(problem.n_elements(), cfg.rho0, cfg.theta_e)?;

    let model = FemModel::new(&problem);
    let (_, u) = model.solve(&state.rho)?;
    let se = model.strain_energies(&state.rho, &u);
    println!("strain energies: {:?}", se.iter().map(|s| format!("{s:.4e}")).collect::<Vec<_>>());

    let layout = make_layout(problem.n_elements(), 1, 1)?;
    let penalty = PenaltyConfig { lambda: cfg.lambda, theta_s: cfg.theta_s, v_target: cfg.v_target };
    let qubo = build_qubo(&problem, &state, &se, &penalty, &layout)?;
    println!("{} qubits, {} couplings, offset {}", qubo.n_qubits(), qubo.n_quadratic_terms(), qubo.offset());
    println!("linear: {:.5?}", qubo.linear());

    let n = qubo.n_qubits();
    let mut worst: f64 = 0.0;
    let mut best = (f64::INFINITY, 0u64);
    for v in 0..1u64 << n {
        let bits = BitAssignment::from_integer(v, n);
        let expanded = qubo.evaluate(&bits);
        let direct = direct_cost(&problem, &state, &se, &penalty, &layout, &bits)?;
        worst = worst.max((expanded - direct).abs());
        if expanded < best.0 {
            best = (expanded, v);
        }
    }
    println!("largest |expanded - direct| over {} states: {worst:.2e}", 1u64 << n);
    let bits = BitAssignment::from_integer(best.1, n);
    println!("ground state {:?} with energy {:.6e}", bits.0, best.0);
    Ok(())
}
