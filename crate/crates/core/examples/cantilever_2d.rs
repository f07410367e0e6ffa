//! 80×40 plane-strain cantilever (3201 qubits) with simulated annealing.
//! Writes a result bundle and prints the final layout.
//!
//!     cargo run --release --example cantilever_2d [out_dir]

use std::path::PathBuf;

use anneal_topo::model::{build_benchmark, Geometry};
use anneal_topo::output::{write_bundle, RunSummary};
use anneal_topo::{run_annealing_optimization, RunConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args().nth(1).map_or_else(|| PathBuf::from("target/examples/cantilever"), PathBuf::from);
    let problem = build_benchmark("cantilever_80x40")?;
    let cfg = RunConfig::for_benchmark("cantilever_80x40").unwrap();
    let result = run_annealing_optimization(&problem, &cfg)?;
    for r in &result.history {
        println!(
            "iter {:>3}  compliance {:.5e}  volume {:.4}  sa {:.2} s  fem {:.2} s",
            r.iteration, r.objective, r.volume_ratio, r.solver_time_s, r.fem_time_s
        );
    }

    let Geometry::Grid(mesh) = &problem.geometry else { unreachable!() };
    let [nx, ny, _] = mesh.counts;
    // two cells per character in each direction
    for j in (0..ny).step_by(2).rev() {
        let row: String = (0..nx)
            .step_by(2)
            .map(|i| {
                let r = result.final_state.rho[mesh.cell_index(i, j, 0)];
                match r {
                    r if r > 0.75 => '#',
                    r if r > 0.4 => '+',
                    r if r > 0.1 => '.',
                    _ => ' ',
                }
            })
            .collect();
        println!("|{row}");
    }

    let summary = RunSummary::new("cantilever_80x40", &problem, &result, cfg.v_target, Some(cfg.seed));
    let files = write_bundle(&out, &problem, &result, &summary)?;
    println!(
        "compliance {:.5e}, volume {:.4}, {} topology files in {}",
        result.final_objective,
        result.final_volume_ratio,
        files.len(),
        out.display()
    );
    Ok(())
}
