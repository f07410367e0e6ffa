//! 20×20×20 hexahedral cube (8001 qubits). Takes a minute or two in release
//! mode; the VTK snapshots open in ParaView.
//!
//!     cargo run --release --example cube_3d [out_dir]

use std::path::PathBuf;

use anneal_topo::model::{build_benchmark, Geometry};
use anneal_topo::output::{write_bundle, RunSummary};
use anneal_topo::{run_annealing_optimization, RunConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args().nth(1).map_or_else(|| PathBuf::from("target/examples/cube"), PathBuf::from);
    let problem = build_benchmark("cube_20")?;
    let cfg = RunConfig::for_benchmark("cube_20").unwrap();
    let result = run_annealing_optimization(&problem, &cfg)?;
    for r in &result.history {
        println!(
            "iter {:>3}  compliance {:.5e}  volume {:.4}  capped {:>4}  floor {:>4}  sa {:.2} s  fem {:.2} s",
            r.iteration, r.objective, r.volume_ratio, r.n_cap, r.n_floor, r.solver_time_s, r.fem_time_s
        );
    }

    // solid fraction of each horizontal layer, bottom (clamped) to top (loaded)
    let Geometry::Grid(mesh) = &problem.geometry else { unreachable!() };
    let [nx, ny, nz] = mesh.counts;
    for k in 0..nz {
        let solid = (0..ny)
            .flat_map(|j| (0..nx).map(move |i| (i, j)))
            .filter(|&(i, j)| result.final_state.rho[mesh.cell_index(i, j, k)] > 0.5)
            .count();
        println!("layer {k:>2}: {solid:>3} solid cells {}", "#".repeat(solid / 4));
    }

    let summary = RunSummary::new("cube_20", &problem, &result, cfg.v_target, Some(cfg.seed));
    write_bundle(&out, &problem, &result, &summary)?;
    println!(
        "converged {} in {} iterations, compliance {:.5e}, volume {:.4}, TFS {:.1} s -> {}",
        result.converged,
        result.iterations,
        result.final_objective,
        result.final_volume_ratio,
        result.tfs_s,
        out.display()
    );
    Ok(())
}
