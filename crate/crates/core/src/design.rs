//! Design state and the multiplicative updater scheme.

use crate::error::{Error, QuboError};
use crate::model::Problem;
use crate::qubo::{xi, BitAssignment, VariableMap};

/// Lower bound on design variables.
pub const EPS_RHO: f64 = 1e-6;
/// Lower bound on decoded updaters.
pub const EPS_ALPHA: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct DesignState {
    pub rho: Vec<f64>,
    /// Per-element cap Θ_e; latched to 1 once the element saturates.
    pub theta: Vec<f64>,
    pub rho0: f64,
    pub iteration: usize,
    pub alpha_log: Vec<Vec<f64>>,
}

pub fn init_design(n_elem: usize, rho0: f64, theta: f64) -> Result<DesignState, Error> {
    if !(rho0 > 0.0 && rho0 <= 1.0) {
        return Err(Error::Config(format!("rho0 must lie in (0, 1], got {rho0}")));
    }
    if !(theta > 0.0 && theta.is_finite()) {
        return Err(Error::Config(format!("theta must be positive, got {theta}")));
    }
    Ok(DesignState {
        rho: vec![rho0; n_elem],
        theta: vec![theta; n_elem],
        rho0,
        iteration: 0,
        alpha_log: Vec::new(),
    })
}

impl DesignState {
    pub fn n_elements(&self) -> usize {
        self.rho.len()
    }

    /// Elements whose cap has latched to 1.
    pub fn n_capped(&self) -> usize {
        self.theta.iter().filter(|&&t| t == 1.0).count()
    }

    pub fn n_at_floor(&self) -> usize {
        self.rho.iter().filter(|&&r| r <= EPS_RHO).count()
    }

    /// Rebuilds ρ from ρ₀ and the updater log, clamping after every step.
    pub fn replay(&self) -> Vec<f64> {
        let mut rho = vec![self.rho0; self.rho.len()];
        for alpha in &self.alpha_log {
            for (r, a) in rho.iter_mut().zip(alpha) {
                *r = clamp_step(*r * a);
            }
        }
        rho
    }
}

fn clamp_step(v: f64) -> f64 {
    v.clamp(EPS_RHO, 1.0)
}

/// Updaters `α_e = max(Θ_e·ξ(q_e), ε_α)`.
pub fn decode_alphas(
    bits: &BitAssignment,
    layout: &VariableMap,
    state: &DesignState,
) -> Result<Vec<f64>, QuboError> {
    if bits.len() != layout.n_qubits() {
        return Err(QuboError::SizeMismatch {
            what: "bit assignment",
            expected: layout.n_qubits(),
            got: bits.len(),
        });
    }
    if layout.n_elem != state.n_elements() {
        return Err(QuboError::SizeMismatch {
            what: "layout elements",
            expected: state.n_elements(),
            got: layout.n_elem,
        });
    }
    Ok((0..layout.n_elem)
        .map(|e| {
            let group: Vec<u8> = layout.element_qubits(e).map(|i| bits[i]).collect();
            (state.theta[e] * xi(&group, &layout.weights)).max(EPS_ALPHA)
        })
        .collect())
}

/// Applies `ρ′ = α·ρ` with the upper cap (latching Θ_e = 1) and the floor.
pub fn apply_update(state: &DesignState, alpha: &[f64]) -> DesignState {
    let mut next = state.clone();
    for e in 0..next.rho.len() {
        let r = state.rho[e] * alpha[e];
        if r > 1.0 {
            next.theta[e] = 1.0;
        }
        next.rho[e] = clamp_step(r);
    }
    next.iteration += 1;
    next.alpha_log.push(alpha.to_vec());
    next
}

/// `Σ ρ_e·V⁰_e / V₀`.
pub fn volume_ratio(state: &DesignState, problem: &Problem) -> f64 {
    volume_ratio_of(&state.rho, &problem.element_volumes())
}

pub(crate) fn volume_ratio_of(rho: &[f64], volumes: &[f64]) -> f64 {
    let v0: f64 = volumes.iter().sum();
    rho.iter().zip(volumes).map(|(r, v)| r * v).sum::<f64>() / v0
}
