use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{EnergyTracker, SolveOutcome};
use crate::error::SolverError;
use crate::qubo::{BitAssignment, QuboProblem};

#[derive(Debug, Clone, PartialEq)]
pub struct SaParams {
    pub sweeps: usize,
    pub restarts: usize,
    /// `None` picks the 90th percentile of |ΔE| over a 100-flip probe.
    pub initial_temperature: Option<f64>,
    pub cooling: f64,
    pub seed: u64,
}

impl Default for SaParams {
    fn default() -> Self {
        Self {
            sweeps: 2000,
            restarts: 10,
            initial_temperature: None,
            cooling: 0.98,
            seed: 0,
        }
    }
}

impl SaParams {
    pub fn validate(&self) -> Result<(), SolverError> {
        if self.sweeps == 0 {
            return Err(SolverError::InvalidParameter("sweeps must be at least 1".into()));
        }
        if self.restarts == 0 {
            return Err(SolverError::InvalidParameter("restarts must be at least 1".into()));
        }
        if !(self.cooling > 0.0 && self.cooling < 1.0) {
            return Err(SolverError::InvalidParameter(format!(
                "cooling factor must lie in (0, 1), got {}",
                self.cooling
            )));
        }
        if let Some(t) = self.initial_temperature {
            if !(t > 0.0 && t.is_finite()) {
                return Err(SolverError::InvalidParameter(format!(
                    "initial temperature must be positive, got {t}"
                )));
            }
        }
        Ok(())
    }
}

const PROBE_FLIPS: usize = 100;
const PROBE_STREAM: u64 = u64::MAX;
const RESYNC_EVERY: usize = 16;

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn probe_temperature(qubo: &QuboProblem, seed: u64) -> f64 {
    let n = qubo.n_qubits();
    let mut rng = rng_for(seed, PROBE_STREAM);
    let bits = (0..n).map(|_| rng.gen_range(0..2u8)).collect();
    let mut t = EnergyTracker::new(qubo, bits);
    let mut deltas: Vec<f64> = (0..PROBE_FLIPS)
        .map(|_| t.flip(rng.gen_range(0..n)).abs())
        .collect();
    deltas.sort_by(f64::total_cmp);
    let p90 = deltas[(0.9 * (PROBE_FLIPS - 1) as f64).round() as usize];
    if p90 > 0.0 && p90.is_finite() {
        p90
    } else {
        1.0
    }
}

/// Simulated annealing with single-flip Metropolis sweeps and geometric
/// cooling. Restarts run in parallel on independent streams derived from
/// `(seed, restart)`, so the result does not depend on scheduling.
pub fn solve_sa(qubo: &QuboProblem, params: &SaParams) -> Result<SolveOutcome, SolverError> {
    params.validate()?;
    let n = qubo.n_qubits();
    let start = Instant::now();
    if n == 0 {
        return Ok(SolveOutcome {
            bits: BitAssignment::zeros(0),
            energy: qubo.offset(),
            samples: params.restarts as u64,
            search_time_s: start.elapsed().as_secs_f64(),
        });
    }
    let t0 = params
        .initial_temperature
        .unwrap_or_else(|| probe_temperature(qubo, params.seed));

    let runs: Vec<(Vec<u8>, f64)> = (0..params.restarts)
        .into_par_iter()
        .map(|r| anneal(qubo, params, t0, r as u64))
        .collect();

    let (bits, energy) = runs
        .into_iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("restarts >= 1");
    Ok(SolveOutcome {
        bits: BitAssignment(bits),
        energy,
        samples: params.restarts as u64,
        search_time_s: start.elapsed().as_secs_f64(),
    })
}

fn anneal(qubo: &QuboProblem, params: &SaParams, t0: f64, restart: u64) -> (Vec<u8>, f64) {
    let n = qubo.n_qubits();
    let mut rng = rng_for(params.seed, restart);
    let init = (0..n).map(|_| rng.gen_range(0..2u8)).collect();
    let mut state = EnergyTracker::new(qubo, init);
    let mut best_bits = state.bits().to_vec();
    let mut best = qubo.evaluate(&best_bits);
    let mut temp = t0;
    for sweep in 0..params.sweeps {
        let beta = 1.0 / temp;
        for i in 0..n {
            let d = state.delta(i);
            let accept = d <= 0.0 || {
                let x = d * beta;
                x < 50.0 && rng.gen::<f64>() < (-x).exp()
            };
            if accept {
                state.flip_with_delta(i, d);
            }
        }
        if (sweep + 1) % RESYNC_EVERY == 0 {
            state.resync();
        }
        if state.energy() < best {
            let exact = qubo.evaluate(state.bits());
            if exact < best {
                best = exact;
                best_bits.copy_from_slice(state.bits());
            }
        }
        temp *= params.cooling;
    }
    (best_bits, best)
}
