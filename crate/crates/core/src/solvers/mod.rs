//! Ground-state search for [`QuboProblem`]s.

mod exchange;
mod exhaustive;
mod remote;
mod sa;

use std::time::Duration;

pub use exchange::{exchange_response, read_exchange, write_exchange, ExchangeResponse};
pub use exhaustive::{solve_exhaustive, solve_exhaustive_capped, EXHAUSTIVE_CAP};
pub use remote::solve_remote;
pub use sa::{solve_sa, SaParams};

use crate::error::SolverError;
use crate::qubo::{BitAssignment, QuboProblem};

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOutcome {
    pub bits: BitAssignment,
    /// Always `qubo.evaluate(bits)`.
    pub energy: f64,
    pub samples: u64,
    /// Wall time spent searching, seconds.
    pub search_time_s: f64,
}

/// Energy of a bit vector maintained under single flips.
///
/// Besides the energy it tracks `S = Σ w_i q_i` for the low-rank part, so
/// a flip costs O(explicit degree) plus O(1).
#[derive(Debug, Clone)]
pub struct EnergyTracker<'a> {
    qubo: &'a QuboProblem,
    bits: Vec<u8>,
    weighted_sum: f64,
    energy: f64,
}

impl<'a> EnergyTracker<'a> {
    pub fn new(qubo: &'a QuboProblem, bits: Vec<u8>) -> Self {
        let mut t = Self {
            qubo,
            bits,
            weighted_sum: 0.0,
            energy: 0.0,
        };
        t.resync();
        t
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    /// Recomputes the tracked quantities from scratch.
    pub fn resync(&mut self) {
        self.energy = self.qubo.evaluate(&self.bits);
        self.weighted_sum = match self.qubo.low_rank() {
            Some(lr) => self
                .bits
                .iter()
                .zip(&lr.weights)
                .filter(|(&b, _)| b != 0)
                .map(|(_, w)| w)
                .sum(),
            None => 0.0,
        };
    }

    #[inline]
    pub fn delta(&self, i: usize) -> f64 {
        let q = self.qubo;
        let mut field = q.linear()[i];
        for &(j, v) in q.neighbours(i) {
            if self.bits[j] != 0 {
                field += v;
            }
        }
        if let Some(lr) = q.low_rank() {
            let w = lr.weights[i];
            let others = self.weighted_sum - if self.bits[i] != 0 { w } else { 0.0 };
            field += lr.scale * w * others;
        }
        if self.bits[i] != 0 {
            -field
        } else {
            field
        }
    }

    #[inline]
    pub fn flip_with_delta(&mut self, i: usize, delta: f64) {
        if let Some(lr) = self.qubo.low_rank() {
            let w = lr.weights[i];
            self.weighted_sum += if self.bits[i] != 0 { -w } else { w };
        }
        self.bits[i] ^= 1;
        self.energy += delta;
    }

    pub fn flip(&mut self, i: usize) -> f64 {
        let d = self.delta(i);
        self.flip_with_delta(i, d);
        d
    }
}

/// `evaluate(bits with i flipped) − evaluate(bits)`.
pub fn delta_energy(qubo: &QuboProblem, bits: &BitAssignment, flip: usize) -> Result<f64, SolverError> {
    if bits.len() != qubo.n_qubits() {
        return Err(SolverError::InvalidParameter(format!(
            "bit assignment has {} entries, QUBO has {} qubits",
            bits.len(),
            qubo.n_qubits()
        )));
    }
    if flip >= bits.len() {
        return Err(SolverError::InvalidParameter(format!(
            "flip index {flip} out of range for {} qubits",
            bits.len()
        )));
    }
    Ok(EnergyTracker::new(qubo, bits.0.clone()).delta(flip))
}

/// Solver selection used by the optimization driver.
#[derive(Debug, Clone, PartialEq)]
pub enum SolverChoice {
    Exhaustive { cap: usize },
    Sa(SaParams),
    Remote { endpoint: String, timeout: Duration },
}

impl SolverChoice {
    pub fn name(&self) -> &'static str {
        match self {
            SolverChoice::Exhaustive { .. } => "exhaustive",
            SolverChoice::Sa(_) => "sa",
            SolverChoice::Remote { .. } => "remote",
        }
    }

    /// Runs the solver; `seed` replaces the SA seed when given.
    pub fn solve(&self, qubo: &QuboProblem, seed: Option<u64>) -> Result<SolveOutcome, SolverError> {
        match self {
            SolverChoice::Exhaustive { cap } => solve_exhaustive_capped(qubo, *cap),
            SolverChoice::Sa(p) => {
                let mut p = p.clone();
                if let Some(s) = seed {
                    p.seed = s;
                }
                solve_sa(qubo, &p)
            }
            SolverChoice::Remote { endpoint, timeout } => solve_remote(qubo, endpoint, *timeout),
        }
    }
}
