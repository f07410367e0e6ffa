//! Six-member truss driven to the two-bar design with the exhaustive solver.
//!
//!     cargo run --release --example truss_two_bar

use anneal_topo::model::build_benchmark;
use anneal_topo::{run_annealing_optimization, RunConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let problem = build_benchmark("truss6")?;
    let config = RunConfig::for_benchmark("truss6").unwrap().exhaustive();
    let result = run_annealing_optimization(&problem, &config)?;

    println!("iter  compliance     volume  energy        capped  floor");
    for r in &result.history {
        println!(
            "{:>4}  {:<13.6e}  {:.4}  {:<12.5e}  {:>6}  {:>5}",
            r.iteration,
            r.objective,
            r.volume_ratio,
            r.energy.unwrap_or(f64::NAN),
            r.n_cap,
            r.n_floor
        );
    }
    println!();
    for (m, rho) in result.final_state.rho.iter().enumerate() {
        let bar = "#".repeat((rho * 40.0).round() as usize);
        println!("member {m}: {rho:<10.3e} {bar}");
    }
    println!(
        "\nconverged: {} after {} iterations, compliance {:.6e}, volume ratio {:.4} (target {})",
        result.converged, result.iterations, result.final_objective, result.final_volume_ratio, config.v_target
    );
    Ok(())
}
