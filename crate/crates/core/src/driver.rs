//! The annealing-driven optimization loop.

use std::fmt;
use std::time::Instant;

use crate::design::{apply_update, decode_alphas, init_design, volume_ratio, DesignState};
use crate::error::Error;
use crate::fem::{total_compliance, FemModel};
use crate::model::{benchmark_parameters, Problem};
use crate::qubo::{build_qubo, make_layout, PenaltyConfig};
use crate::solvers::{SaParams, SolverChoice, EXHAUSTIVE_CAP};

/// Guard for the relative-change denominator.
pub const CONVERGENCE_EPS: f64 = 1e-30;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub lambda: f64,
    pub theta_e: f64,
    pub theta_s: f64,
    pub n_q: usize,
    pub n_s: usize,
    pub rho0: f64,
    pub v_target: f64,
    pub tolerance: f64,
    pub window: usize,
    pub max_iterations: usize,
    pub solver: SolverChoice,
    pub seed: u64,
}

impl RunConfig {
    /// Generic defaults for a user problem: `ρ₀ = v_target`.
    pub fn for_problem(problem: &Problem) -> Self {
        Self {
            lambda: 5.0,
            theta_e: 1.1,
            theta_s: 0.02,
            n_q: 1,
            n_s: 1,
            rho0: problem.v_target,
            v_target: problem.v_target,
            tolerance: 0.01,
            window: 5,
            max_iterations: 200,
            solver: SolverChoice::Sa(SaParams::default()),
            seed: 0,
        }
    }

    /// Reference parameter set of a canned benchmark.
    pub fn for_benchmark(name: &str) -> Option<Self> {
        let p = benchmark_parameters(name)?;
        Some(Self {
            lambda: p.lambda,
            theta_e: p.theta_e,
            theta_s: p.theta_s,
            n_q: 1,
            n_s: 1,
            rho0: p.rho0,
            v_target: p.rho0,
            tolerance: 0.01,
            window: 5,
            max_iterations: 200,
            solver: SolverChoice::Sa(SaParams::default()),
            seed: 0,
        })
    }

    pub fn with_solver(mut self, solver: SolverChoice) -> Self {
        self.solver = solver;
        self
    }

    pub fn exhaustive(self) -> Self {
        self.with_solver(SolverChoice::Exhaustive { cap: EXHAUSTIVE_CAP })
    }

    pub fn validate(&self) -> Result<(), Error> {
        let bad = |m: String| Err(Error::Config(m));
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return bad(format!("lambda must be positive, got {}", self.lambda));
        }
        if !(self.theta_e > 0.0 && self.theta_s > 0.0) {
            return bad(format!("theta and theta_s must be positive, got {} and {}", self.theta_e, self.theta_s));
        }
        if self.n_q == 0 || self.n_s == 0 {
            return bad("nq and ns must be at least 1".into());
        }
        if !(self.rho0 > 0.0 && self.rho0 <= 1.0) {
            return bad(format!("rho0 must lie in (0, 1], got {}", self.rho0));
        }
        if !(self.v_target > 0.0 && self.v_target <= 1.0) {
            return bad(format!("v_target must lie in (0, 1], got {}", self.v_target));
        }
        if self.window == 0 || !(self.tolerance > 0.0) {
            return bad("convergence window must be >= 1 and tolerance > 0".into());
        }
        if let SolverChoice::Sa(p) = &self.solver {
            p.validate()?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    /// Compliance `FᵀU` of the design analyzed in this iteration.
    pub objective: f64,
    pub volume_ratio: f64,
    /// QUBO energy of the chosen bits; `None` for OC runs.
    pub energy: Option<f64>,
    pub solver_time_s: f64,
    pub fem_time_s: f64,
    pub n_cap: usize,
    pub n_floor: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    /// `anneal` or `oc`.
    pub method: String,
    pub solver: String,
    pub n_qubits: Option<usize>,
    pub history: Vec<IterationRecord>,
    /// Design after each iteration.
    pub designs: Vec<Vec<f64>>,
    pub final_state: DesignState,
    pub final_objective: f64,
    pub final_volume_ratio: f64,
    pub converged: bool,
    /// I_N.
    pub iterations: usize,
    /// Sum of measured search times (`t_s·I_N`).
    pub tfs_s: f64,
}

/// A failed run with the iterations completed before the failure.
#[derive(Debug)]
pub struct RunFailure {
    pub error: Error,
    pub history: Vec<IterationRecord>,
}

impl fmt::Display for RunFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (after {} iterations)", self.error, self.history.len())
    }
}

impl std::error::Error for RunFailure {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.error)
    }
}

/// True iff the last `window` relative changes are all below `tolerance`.
pub fn check_convergence(history: &[f64], tolerance: f64, window: usize) -> bool {
    if history.len() < window + 1 {
        return false;
    }
    history[history.len() - window - 1..]
        .windows(2)
        .all(|w| (w[1] - w[0]).abs() / w[0].abs().max(CONVERGENCE_EPS) < tolerance)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TfsMode {
    /// `t_a·R·I_N`.
    Qa,
    /// `t_s·I_N`.
    Sa,
}

pub fn tfs(mode: TfsMode, t_per: f64, repeats: u64, iterations: u64) -> f64 {
    match mode {
        TfsMode::Qa => t_per * repeats as f64 * iterations as f64,
        TfsMode::Sa => t_per * iterations as f64,
    }
}

/// Seed of the solver call in `iteration`; distinct iterations get
/// unrelated streams.
pub fn iteration_seed(seed: u64, iteration: usize) -> u64 {
    let mut z = seed ^ (iteration as u64).wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Runs the annealing loop: FEM solve, strain energies, QUBO build, ground
/// state search, decode, update. Stops when the objective settles or after
/// `max_iterations`.
pub fn run_annealing_optimization(problem: &Problem, config: &RunConfig) -> Result<RunResult, RunFailure> {
    let mut history: Vec<IterationRecord> = Vec::new();
    let fail = |e: Error, h: &Vec<IterationRecord>| RunFailure { error: e, history: h.clone() };
    config.validate().map_err(|e| fail(e, &history))?;

    let model = FemModel::new(problem);
    let n = problem.n_elements();
    let layout = make_layout(n, config.n_q, config.n_s).map_err(|e| fail(e.into(), &history))?;
    let penalty = PenaltyConfig {
        lambda: config.lambda,
        theta_s: config.theta_s,
        v_target: config.v_target,
    };
    let mut state = init_design(n, config.rho0, config.theta_e).map_err(|e| fail(e, &history))?;
    let mut designs = Vec::new();
    let mut objectives = Vec::new();
    let mut converged = false;

    for it in 0..config.max_iterations {
        let fem_start = Instant::now();
        let (system, u) = model.solve(&state.rho).map_err(|e| fail(e.into(), &history))?;
        let objective = total_compliance(&system, &u);
        let se = model.strain_energies(&state.rho, &u);
        let fem_time = fem_start.elapsed().as_secs_f64();

        let qubo = build_qubo(problem, &state, &se, &penalty, &layout).map_err(|e| fail(e.into(), &history))?;
        let outcome = config
            .solver
            .solve(&qubo, Some(iteration_seed(config.seed, it)))
            .map_err(|e| fail(e.into(), &history))?;
        let alpha = decode_alphas(&outcome.bits, &layout, &state).map_err(|e| fail(e.into(), &history))?;

        history.push(IterationRecord {
            iteration: it + 1,
            objective,
            volume_ratio: volume_ratio(&state, problem),
            energy: Some(outcome.energy),
            solver_time_s: outcome.search_time_s,
            fem_time_s: fem_time,
            n_cap: state.n_capped(),
            n_floor: state.n_at_floor(),
        });
        objectives.push(objective);
        state = apply_update(&state, &alpha);
        designs.push(state.rho.clone());
        if check_convergence(&objectives, config.tolerance, config.window) {
            converged = true;
            break;
        }
    }

    let (system, u) = model.solve(&state.rho).map_err(|e| fail(e.into(), &history))?;
    let iterations = history.len();
    Ok(RunResult {
        method: "anneal".into(),
        solver: config.solver.name().into(),
        n_qubits: Some(layout.n_qubits()),
        final_objective: total_compliance(&system, &u),
        final_volume_ratio: volume_ratio(&state, problem),
        tfs_s: history.iter().map(|r| r.solver_time_s).sum(),
        history,
        designs,
        final_state: state,
        converged,
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn convergence_examples() {
        assert!(check_convergence(&[10.0, 10.05, 10.02, 10.03, 10.01, 10.04], 0.01, 5));
        assert!(!check_convergence(&[10.0, 12.0, 12.01, 12.02, 12.03, 12.04], 0.01, 5));
        assert!(!check_convergence(&[1.0, 1.0, 1.0], 0.01, 5));
        assert!(check_convergence(&[0.0, 0.0], 0.01, 1));
    }

    #[test]
    fn tfs_examples() {
        assert_eq!(tfs(TfsMode::Qa, 20e-6, 200, 16), 0.064);
        assert_eq!(tfs(TfsMode::Qa, 20e-6, 250, 15), 0.075);
        assert_eq!(tfs(TfsMode::Sa, 0.0, 1, 12), 0.0);
    }

    #[test]
    fn zero_iterations() {
        let p = crate::model::build_benchmark("truss6").unwrap();
        let mut c = RunConfig::for_benchmark("truss6").unwrap().exhaustive();
        c.max_iterations = 0;
        let r = run_annealing_optimization(&p, &c).unwrap();
        assert!(r.history.is_empty());
        assert!(!r.converged);
        assert_eq!(r.iterations, 0);
    }

    #[test]
    fn iteration_seeds_differ() {
        assert_ne!(iteration_seed(1, 0), iteration_seed(1, 1));
        assert_ne!(iteration_seed(1, 0), iteration_seed(2, 0));
    }
}
