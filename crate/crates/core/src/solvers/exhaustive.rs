use std::time::Instant;

use super::{EnergyTracker, SolveOutcome};
use crate::error::SolverError;
use crate::qubo::{BitAssignment, QuboProblem};

/// Default qubit limit for enumeration.
pub const EXHAUSTIVE_CAP: usize = 24;

const COMPACT_AT: usize = 4096;

pub fn solve_exhaustive(qubo: &QuboProblem) -> Result<SolveOutcome, SolverError> {
    solve_exhaustive_capped(qubo, EXHAUSTIVE_CAP)
}

/// Gray-code enumeration of all `2^n` assignments. Every assignment within
/// a small tolerance of the running minimum is kept and re-evaluated
/// exactly at the end; exact ties go to the lowest integer value.
pub fn solve_exhaustive_capped(qubo: &QuboProblem, cap: usize) -> Result<SolveOutcome, SolverError> {
    let n = qubo.n_qubits();
    if n > cap || n > 62 {
        return Err(SolverError::TooLarge { n, cap });
    }
    let start = Instant::now();
    let tol = |e: f64| 1e-9 * e.abs().max(1.0);

    let mut tracker = EnergyTracker::new(qubo, vec![0; n]);
    let mut code: u64 = 0;
    let mut best = tracker.energy();
    let mut candidates: Vec<u64> = vec![0];
    let total: u64 = 1 << n;
    for t in 1..total {
        let i = t.trailing_zeros() as usize;
        tracker.flip(i);
        code ^= 1 << i;
        let e = tracker.energy();
        if e < best - tol(best) {
            best = e;
            candidates.retain(|&c| exact(qubo, c, n) <= e + tol(e));
            candidates.push(code);
        } else if e <= best + tol(best) {
            best = best.min(e);
            candidates.push(code);
            if candidates.len() >= COMPACT_AT {
                compact(qubo, &mut candidates, n);
            }
        }
        if t % 65_536 == 0 {
            tracker.resync();
        }
    }
    let (code, energy) = pick(qubo, &candidates, n);
    Ok(SolveOutcome {
        bits: BitAssignment::from_integer(code, n),
        energy,
        samples: total,
        search_time_s: start.elapsed().as_secs_f64(),
    })
}

fn exact(qubo: &QuboProblem, code: u64, n: usize) -> f64 {
    qubo.evaluate(&BitAssignment::from_integer(code, n))
}

fn pick(qubo: &QuboProblem, candidates: &[u64], n: usize) -> (u64, f64) {
    let mut best: Option<(u64, f64)> = None;
    for &c in candidates {
        let e = exact(qubo, c, n);
        best = match best {
            Some((bc, be)) if be < e || (be == e && bc < c) => Some((bc, be)),
            _ => Some((c, e)),
        };
    }
    best.expect("at least one candidate")
}

/// Keeps, for every distinct exact energy, only the lowest code.
fn compact(qubo: &QuboProblem, candidates: &mut Vec<u64>, n: usize) {
    let mut scored: Vec<(f64, u64)> = candidates.iter().map(|&c| (exact(qubo, c, n), c)).collect();
    scored.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    scored.dedup_by(|b, a| a.0 == b.0);
    *candidates = scored.into_iter().map(|(_, c)| c).collect();
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_qubit_instance() {
        let q = QuboProblem::from_terms(2, 5.0, vec![-6.1875, -0.198], [(0, 1, 0.11)]).unwrap();
        let out = solve_exhaustive(&q).unwrap();
        assert_eq!(out.bits.0, vec![1, 1]);
        assert!((out.energy - -1.2755).abs() < 1e-12);
        assert_eq!(out.samples, 4);
    }

    #[test]
    fn zero_qubo_picks_all_zero() {
        let q = QuboProblem::from_terms(14, 2.5, vec![0.0; 14], []).unwrap();
        let out = solve_exhaustive(&q).unwrap();
        assert_eq!(out.bits.0, vec![0; 14]);
        assert_eq!(out.energy, 2.5);
    }

    #[test]
    fn single_positive_linear() {
        let q = QuboProblem::from_terms(1, 0.0, vec![3.0], []).unwrap();
        assert_eq!(solve_exhaustive(&q).unwrap().bits.0, vec![0]);
    }

    #[test]
    fn tie_goes_to_lowest_integer() {
        // q0 and q1 each lower the energy by 1 but not together
        let q = QuboProblem::from_terms(2, 0.0, vec![-1.0, -1.0], [(0, 1, 2.0)]).unwrap();
        let out = solve_exhaustive(&q).unwrap();
        assert_eq!(out.bits.0, vec![1, 0]);
    }

    #[test]
    fn cap_enforced() {
        let q = QuboProblem::from_terms(5, 0.0, vec![0.0; 5], []).unwrap();
        assert!(matches!(
            solve_exhaustive_capped(&q, 4),
            Err(SolverError::TooLarge { n: 5, cap: 4 })
        ));
    }
}
