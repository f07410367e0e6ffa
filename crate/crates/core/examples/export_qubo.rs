//! Writes a benchmark problem file and its first-iteration QUBO in the
//! exchange format, then reads the QUBO back and solves it.
//!
//!     cargo run --release --example export_qubo [benchmark] [out_dir]

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::PathBuf;

use anneal_topo::design::init_design;
use anneal_topo::fem::FemModel;
use anneal_topo::model::{build_benchmark, save_problem};
use anneal_topo::qubo::{build_qubo, make_layout, PenaltyConfig};
use anneal_topo::solvers::{read_exchange, solve_exhaustive, solve_sa, write_exchange, SaParams};
use anneal_topo::RunConfig;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "truss21".into());
    let out = args.next().map_or_else(|| PathBuf::from("target/examples/export"), PathBuf::from);
    fs::create_dir_all(&out)?;

    let problem = build_benchmark(&name)?;
    let cfg = RunConfig::for_benchmark(&name).unwrap();
    let problem_file = out.join(format!("{name}.problem.json"));
    save_problem(&problem, &problem_file)?;

    let state = init_design(problem.n_elements(), cfg.rho0, cfg.theta_e)?;
    let model = FemModel::new(&problem);
    let (_, u) = model.solve(&state.rho)?;
    let se = model.strain_energies(&state.rho, &u);
    let layout = make_layout(problem.n_elements(), cfg.n_q, cfg.n_s)?;
    let penalty = PenaltyConfig { lambda: cfg.lambda, theta_s: cfg.theta_s, v_target: cfg.v_target };
    let qubo = build_qubo(&problem, &state, &se, &penalty, &layout)?;

    let qubo_file = out.join(format!("{name}.qubo.json"));
    write_exchange(&qubo, BufWriter::new(File::create(&qubo_file)?))?;
    println!("{} ({} bytes)", problem_file.display(), fs::metadata(&problem_file)?.len());
    println!("{} ({} bytes)", qubo_file.display(), fs::metadata(&qubo_file)?.len());

    let back = read_exchange(&fs::read_to_string(&qubo_file)?)?;
    println!("{} qubits, {} couplings", back.n_qubits(), back.n_quadratic_terms());
    let best = if back.n_qubits() <= 24 { solve_exhaustive(&back)? } else { solve_sa(&back, &SaParams::default())? };
    println!("ground state energy {:.9e}, original QUBO gives {:.9e}", best.energy, qubo.evaluate(&best.bits));
    Ok(())
}
