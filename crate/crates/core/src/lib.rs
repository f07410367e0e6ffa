//! Topology optimization where each design update is the ground state of a
//! QUBO: a finite element solve supplies strain energies, the penalized
//! update problem is encoded over binary variables, and a simulated
//! annealer (or exhaustive search, or a remote sampler) picks per-element
//! multiplicative updaters.
//!
//! ```no_run
//! use anneal_topo::{build_benchmark, run_annealing_optimization, RunConfig};
//!
//! let problem = build_benchmark("truss6").unwrap();
//! let config = RunConfig::for_benchmark("truss6").unwrap().exhaustive();
//! let result = run_annealing_optimization(&problem, &config).unwrap();
//! println!("compliance {:.4e} after {} iterations", result.final_objective, result.iterations);
//! ```

pub mod cli;
pub mod design;
pub mod driver;
pub mod error;
pub mod fem;
pub mod model;
pub mod oc;
pub mod output;
pub mod qubo;
pub mod solvers;

pub use design::{apply_update, decode_alphas, init_design, volume_ratio, DesignState};
pub use driver::{
    check_convergence, run_annealing_optimization, tfs, IterationRecord, RunConfig, RunFailure, RunResult,
    TfsMode,
};
pub use error::{Error, Result};
pub use model::{build_benchmark, load_problem, Problem};
pub use oc::{oc_update, run_oc, OcParams};
pub use qubo::{build_qubo, direct_cost, evaluate, make_layout, BitAssignment, PenaltyConfig, QuboProblem};
pub use solvers::{solve_exhaustive, solve_remote, solve_sa, SaParams, SolveOutcome, SolverChoice};
