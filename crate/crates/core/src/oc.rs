//! Optimality-criteria baseline with linear stiffness interpolation.

use std::time::Instant;

use crate::design::{volume_ratio_of, DesignState, EPS_RHO};
use crate::driver::{check_convergence, IterationRecord, RunFailure, RunResult};
use crate::error::{Error, OcError};
use crate::fem::{total_compliance, FemModel};
use crate::model::Problem;

#[derive(Debug, Clone, PartialEq)]
pub struct OcParams {
    pub move_limit: f64,
    pub eta: f64,
    /// Absolute tolerance on the volume ratio in the multiplier bisection.
    pub bisection_tol: f64,
    pub max_iterations: usize,
    pub convergence_tol: f64,
    pub window: usize,
}

impl Default for OcParams {
    fn default() -> Self {
        Self {
            move_limit: 0.2,
            eta: 0.5,
            bisection_tol: 1e-6,
            max_iterations: 200,
            convergence_tol: 0.01,
            window: 5,
        }
    }
}

impl OcParams {
    pub fn validate(&self) -> Result<(), OcError> {
        if !(self.move_limit > 0.0 && self.move_limit < 1.0) {
            return Err(OcError::InvalidInput(format!("move limit must lie in (0, 1), got {}", self.move_limit)));
        }
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return Err(OcError::InvalidInput(format!("eta must lie in (0, 1], got {}", self.eta)));
        }
        if !(self.bisection_tol > 0.0) {
            return Err(OcError::InvalidInput("bisection tolerance must be positive".into()));
        }
        if self.window == 0 || !(self.convergence_tol > 0.0) {
            return Err(OcError::InvalidInput("convergence window and tolerance must be positive".into()));
        }
        Ok(())
    }
}

fn candidate(rho: &[f64], sens: &[f64], volumes: &[f64], lam: f64, p: &OcParams) -> Vec<f64> {
    rho.iter()
        .zip(sens)
        .zip(volumes)
        .map(|((&r, &s), &v)| {
            let lo = EPS_RHO.max(r - p.move_limit);
            let hi = 1.0f64.min(r + p.move_limit);
            let b = (s / (lam * v)).max(0.0);
            (r * b.powf(p.eta)).clamp(lo, hi)
        })
        .collect()
}

/// One OC step: `ρ′ = clamp(ρ·(sens/(λ_v·v_e))^η)` within the move limit,
/// with `λ_v` bisected in log space to meet `v_target`. When the move
/// limits make the target unreachable, the closest bound design is returned.
pub fn oc_update(
    rho: &[f64],
    sens: &[f64],
    volumes: &[f64],
    v_target: f64,
    params: &OcParams,
) -> Result<Vec<f64>, OcError> {
    params.validate()?;
    let n = rho.len();
    if sens.len() != n || volumes.len() != n {
        return Err(OcError::InvalidInput(format!(
            "length mismatch: rho {n}, sensitivities {}, volumes {}",
            sens.len(),
            volumes.len()
        )));
    }
    if let Some(s) = sens.iter().find(|s| !(**s >= 0.0 && s.is_finite())) {
        return Err(OcError::InvalidInput(format!("sensitivity {s} is not a finite nonnegative value")));
    }
    let ratio = |x: &[f64]| volume_ratio_of(x, volumes);
    let tol = params.bisection_tol;

    let scaled: Vec<f64> = sens.iter().zip(volumes).map(|(s, v)| s / v).filter(|&x| x > 0.0).collect();
    if scaled.is_empty() {
        let x = candidate(rho, sens, volumes, 1.0, params);
        let vol = ratio(&x);
        if (vol - v_target).abs() <= tol {
            return Ok(x);
        }
        return Err(OcError::NonBracketing { target: v_target, volume: vol });
    }
    let mid = scaled.iter().sum::<f64>() / scaled.len() as f64;

    // volume is nonincreasing in λ
    let mut lo = mid;
    let mut hi = mid;
    let mut expansions = 0;
    while ratio(&candidate(rho, sens, volumes, lo, params)) < v_target {
        lo /= 10.0;
        expansions += 1;
        if expansions > 400 || lo == 0.0 {
            return Ok(candidate(rho, sens, volumes, lo.max(f64::MIN_POSITIVE), params));
        }
    }
    expansions = 0;
    while ratio(&candidate(rho, sens, volumes, hi, params)) > v_target {
        hi *= 10.0;
        expansions += 1;
        if expansions > 400 || !hi.is_finite() {
            return Ok(candidate(rho, sens, volumes, f64::MAX, params));
        }
    }
    let mut best = candidate(rho, sens, volumes, hi, params);
    for _ in 0..200 {
        let lam = (0.5 * (lo.ln() + hi.ln())).exp();
        let x = candidate(rho, sens, volumes, lam, params);
        let vol = ratio(&x);
        best = x;
        if (vol - v_target).abs() <= tol {
            break;
        }
        if vol > v_target {
            lo = lam;
        } else {
            hi = lam;
        }
        if hi / lo - 1.0 < 1e-14 {
            break;
        }
    }
    Ok(best)
}

/// OC loop: FEM solve, sensitivities `U_eᵀK⁰_eU_e`, update, until the
/// objective settles or `max_iterations` is reached. Starts from the
/// uniform design `ρ = v_target`.
pub fn run_oc(problem: &Problem, params: &OcParams, v_target: f64) -> Result<RunResult, RunFailure> {
    let mut history = Vec::new();
    let fail = |e: Error, h: &Vec<IterationRecord>| RunFailure { error: e, history: h.clone() };
    params.validate().map_err(|e| fail(e.into(), &history))?;
    if !(v_target > 0.0 && v_target <= 1.0) {
        return Err(fail(Error::Config(format!("v_target must lie in (0, 1], got {v_target}")), &history));
    }
    let model = FemModel::new(problem);
    let volumes = problem.element_volumes();
    let n = volumes.len();
    let mut rho = vec![v_target; n];
    let mut designs = Vec::new();
    let mut objectives = Vec::new();
    let mut converged = false;

    for it in 0..params.max_iterations {
        let fem_start = Instant::now();
        let (system, u) = model.solve(&rho).map_err(|e| fail(e.into(), &history))?;
        let objective = total_compliance(&system, &u);
        let sens = model.unit_strain_energies(&u);
        let fem_time = fem_start.elapsed().as_secs_f64();
        let start = Instant::now();
        let next = oc_update(&rho, &sens, &volumes, v_target, params).map_err(|e| fail(e.into(), &history))?;
        let update_time = start.elapsed().as_secs_f64();
        history.push(IterationRecord {
            iteration: it + 1,
            objective,
            volume_ratio: volume_ratio_of(&rho, &volumes),
            energy: None,
            solver_time_s: update_time,
            fem_time_s: fem_time,
            n_cap: rho.iter().filter(|&&r| r >= 1.0).count(),
            n_floor: rho.iter().filter(|&&r| r <= EPS_RHO).count(),
        });
        objectives.push(objective);
        rho = next;
        designs.push(rho.clone());
        if check_convergence(&objectives, params.convergence_tol, params.window) {
            converged = true;
            break;
        }
    }
    let (system, u) = model.solve(&rho).map_err(|e| fail(e.into(), &history))?;
    let final_objective = total_compliance(&system, &u);
    let tfs_s = history.iter().map(|r| r.solver_time_s).sum();
    let iterations = history.len();
    Ok(RunResult {
        method: "oc".into(),
        solver: "oc".into(),
        n_qubits: None,
        final_volume_ratio: volume_ratio_of(&rho, &volumes),
        final_objective,
        final_state: DesignState {
            rho,
            theta: vec![1.0; n],
            rho0: v_target,
            iteration: iterations,
            alpha_log: Vec::new(),
        },
        history,
        designs,
        converged,
        iterations,
        tfs_s,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_fixed_point() {
        let x = oc_update(&[0.5; 4], &[2.0; 4], &[1.0; 4], 0.5, &OcParams::default()).unwrap();
        for v in x {
            assert!((v - 0.5).abs() < 1e-6);
        }
    }

    #[test]
    fn zero_sensitivity_element_shrinks() {
        let p = OcParams { move_limit: 0.99, ..Default::default() };
        let x = oc_update(&[0.5, 0.5], &[1.0, 0.0], &[1.0, 1.0], 0.5, &p).unwrap();
        assert_eq!(x[1], EPS_RHO);
        assert!(x[0] > 0.5);
    }

    #[test]
    fn all_zero_sensitivities_cannot_bracket() {
        let err = oc_update(&[0.5, 0.5], &[0.0, 0.0], &[1.0, 1.0], 0.5, &OcParams::default()).unwrap_err();
        assert!(matches!(err, OcError::NonBracketing { .. }));
    }

    #[test]
    fn scale_invariance() {
        let rho = [0.3, 0.6, 0.45, 0.2];
        let sens = [0.4, 2.0, 1.1, 0.05];
        let vol = [1.0, 2.0, 1.5, 0.5];
        let a = oc_update(&rho, &sens, &vol, 0.4, &OcParams::default()).unwrap();
        let scaled: Vec<f64> = sens.iter().map(|s| s * 1e6).collect();
        let b = oc_update(&rho, &scaled, &vol, 0.4, &OcParams::default()).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-5);
        }
    }

    #[test]
    fn single_bar_converges_to_target() {
        let p = crate::model::parse_problem(
            r#"{"kind": "truss", "material": {"E": 2e11, "nu": 0.3},
                "truss": {"nodes": [[0, 0], [1, 0]], "members": [[0, 1, 0.5]]},
                "supports": [[0, 0], [0, 1], [1, 1]], "loads": [[1, [1000, 0]]], "v_target": 0.35}"#,
        )
        .unwrap();
        let r = run_oc(&p, &OcParams::default(), 0.35).unwrap();
        assert!((r.final_state.rho[0] - 0.35).abs() < 1e-6);
        assert!(r.converged);
    }
}
