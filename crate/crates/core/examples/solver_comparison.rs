//! Simulated annealing against exhaustive search on the first-iteration
//! QUBO of the 21-member truss (22 qubits).
//!
//!     cargo run --release --example solver_comparison

use anneal_topo::design::init_design;
use anneal_topo::fem::FemModel;
use anneal_topo::model::build_benchmark;
use anneal_topo::qubo::{build_qubo, make_layout, PenaltyConfig};
use anneal_topo::solvers::{solve_exhaustive, solve_sa, SaParams};
use anneal_topo::RunConfig;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let problem = build_benchmark("truss21")?;
    let cfg = RunConfig::for_benchmark("truss21").unwrap();
    let state = init_design(problem.n_elements(), cfg.rho0, cfg.theta_e)?;
    let model = FemModel::new(&problem);
    let (_, u) = model.solve(&state.rho)?;
    let se = model.strain_energies(&state.rho, &u);
    let layout = make_layout(problem.n_elements(), 1, 1)?;
    let penalty = PenaltyConfig { lambda: cfg.lambda, theta_s: cfg.theta_s, v_target: cfg.v_target };
    let qubo = build_qubo(&problem, &state, &se, &penalty, &layout)?;

    let exact = solve_exhaustive(&qubo)?;
    println!("exhaustive: energy {:.9e} in {:.3} s ({} states)", exact.energy, exact.search_time_s, exact.samples);

    for sweeps in [20, 100, 500, 2000] {
        let mut hits = 0;
        let mut time = 0.0;
        for seed in 0..20 {
            let out = solve_sa(&qubo, &SaParams { sweeps, seed, ..Default::default() })?;
            time += out.search_time_s;
            if (out.energy - exact.energy).abs() <= 1e-9 * exact.energy.abs() {
                hits += 1;
            }
        }
        println!("sa {sweeps:>4} sweeps: ground state in {hits:>2}/20 seeds, mean {:.4} s", time / 20.0);
    }
    Ok(())
}
