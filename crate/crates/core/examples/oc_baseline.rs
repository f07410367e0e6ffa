//! Annealing-driven optimization next to the optimality-criteria baseline on
//! the truss and coat-hanger benchmarks.
//!
//!     cargo run --release --example oc_baseline

use anneal_topo::model::build_benchmark;
use anneal_topo::{run_annealing_optimization, run_oc, OcParams, RunConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!("{:<12} {:>13} {:>6} {:>7} {:>13} {:>6} {:>7}", "benchmark", "anneal", "iters", "volume", "oc", "iters", "volume");
    for name in ["truss6", "truss21", "truss29", "coat_hanger"] {
        let problem = build_benchmark(name)?;
        let cfg = RunConfig::for_benchmark(name).unwrap();
        let a = run_annealing_optimization(&problem, &cfg)?;
        let o = run_oc(&problem, &OcParams::default(), cfg.v_target)?;
        println!(
            "{:<12} {:>13.5e} {:>6} {:>7.4} {:>13.5e} {:>6} {:>7.4}",
            name, a.final_objective, a.iterations, a.final_volume_ratio, o.final_objective, o.iterations, o.final_volume_ratio
        );
    }
    Ok(())
}
