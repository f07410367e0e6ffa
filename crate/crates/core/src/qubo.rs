//! QUBO encoding of one design update.
//!
//! Each element owns `n_q` qubits whose normalized weighted sum ξ scales its
//! cap Θ_e into an updater; `n_s` slack qubits turn the volume inequality
//! into an equality inside the quadratic penalty.
//!
//! Every pair coupling produced by [`build_qubo`] has the form
//! `2λ·a_i·a_j`, so the builder stores a rank-one factor instead of the
//! `O(N_q²)` pair list. [`QuboProblem::quadratic_terms`] expands it on demand.

use std::ops::{Deref, Range};

use crate::design::DesignState;
use crate::error::QuboError;
use crate::model::Problem;

/// Qubit numbering: element `e` owns `e·n_q .. (e+1)·n_q`, slack qubits follow.
#[derive(Debug, Clone, PartialEq)]
pub struct VariableMap {
    pub n_elem: usize,
    pub n_q: usize,
    pub n_s: usize,
    /// Element qubit weights `w_k = k`.
    pub weights: Vec<f64>,
    pub slack_weights: Vec<f64>,
}

pub fn make_layout(n_elem: usize, n_q: usize, n_s: usize) -> Result<VariableMap, QuboError> {
    if n_q == 0 || n_s == 0 {
        return Err(QuboError::InvalidParameter(format!(
            "n_q and n_s must be at least 1 (got n_q = {n_q}, n_s = {n_s})"
        )));
    }
    let w = |n: usize| (1..=n).map(|k| k as f64).collect();
    Ok(VariableMap {
        n_elem,
        n_q,
        n_s,
        weights: w(n_q),
        slack_weights: w(n_s),
    })
}

impl VariableMap {
    pub fn n_qubits(&self) -> usize {
        self.n_elem * self.n_q + self.n_s
    }

    pub fn element_qubit(&self, element: usize, k: usize) -> usize {
        element * self.n_q + k
    }

    pub fn element_qubits(&self, element: usize) -> Range<usize> {
        element * self.n_q..(element + 1) * self.n_q
    }

    pub fn slack_qubits(&self) -> Range<usize> {
        self.n_elem * self.n_q..self.n_qubits()
    }

    pub fn weight_sum(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn slack_weight_sum(&self) -> f64 {
        self.slack_weights.iter().sum()
    }
}

/// `ξ = Σ w_k q_k / Σ w_k`.
pub fn xi(bits: &[u8], weights: &[f64]) -> f64 {
    let total: f64 = weights.iter().sum();
    bits.iter().zip(weights).map(|(&b, w)| b as f64 * w).sum::<f64>() / total
}

/// A solver answer: one 0/1 entry per qubit.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct BitAssignment(pub Vec<u8>);

impl BitAssignment {
    pub fn zeros(n: usize) -> Self {
        Self(vec![0; n])
    }

    /// Bit `i` of `value` becomes qubit `i`.
    pub fn from_integer(value: u64, n: usize) -> Self {
        Self((0..n).map(|i| ((value >> i) & 1) as u8).collect())
    }

    pub fn to_integer(&self) -> u64 {
        self.0
            .iter()
            .enumerate()
            .map(|(i, &b)| (b as u64) << i)
            .sum()
    }
}

impl From<Vec<u8>> for BitAssignment {
    fn from(v: Vec<u8>) -> Self {
        Self(v)
    }
}

impl Deref for BitAssignment {
    type Target = [u8];
    fn deref(&self) -> &[u8] {
        &self.0
    }
}

/// `Q_ij += scale·w_i·w_j` for every pair `i < j`.
#[derive(Debug, Clone, PartialEq)]
pub struct LowRank {
    pub scale: f64,
    pub weights: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuboProblem {
    linear: Vec<f64>,
    /// Explicit couplings, both directions, sorted by neighbour.
    adjacency: Vec<Vec<(usize, f64)>>,
    low_rank: Option<LowRank>,
    offset: f64,
    layout: Option<VariableMap>,
}

impl QuboProblem {
    /// Builds a QUBO from explicit terms. Duplicate pairs are summed; pairs
    /// must satisfy `i < j < n`.
    pub fn from_terms(
        n: usize,
        offset: f64,
        linear: Vec<f64>,
        quadratic: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self, QuboError> {
        if linear.len() != n {
            return Err(QuboError::SizeMismatch {
                what: "linear coefficients",
                expected: n,
                got: linear.len(),
            });
        }
        if !offset.is_finite() {
            return Err(QuboError::InvalidParameter("offset is not finite".into()));
        }
        if let Some(i) = linear.iter().position(|v| !v.is_finite()) {
            return Err(QuboError::NonFinite(i));
        }
        let mut adjacency: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for (i, j, v) in quadratic {
            if !(i < j && j < n) {
                return Err(QuboError::InvalidParameter(format!(
                    "quadratic term ({i}, {j}) must satisfy i < j < {n}"
                )));
            }
            if !v.is_finite() {
                return Err(QuboError::NonFinite(i));
            }
            adjacency[i].push((j, v));
            adjacency[j].push((i, v));
        }
        for adj in &mut adjacency {
            adj.sort_by_key(|&(k, _)| k);
            let mut merged: Vec<(usize, f64)> = Vec::with_capacity(adj.len());
            for &(k, v) in adj.iter() {
                match merged.last_mut() {
                    Some(last) if last.0 == k => last.1 += v,
                    _ => merged.push((k, v)),
                }
            }
            *adj = merged;
        }
        Ok(Self {
            linear,
            adjacency,
            low_rank: None,
            offset,
            layout: None,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.linear.len()
    }

    pub fn linear(&self) -> &[f64] {
        &self.linear
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn layout(&self) -> Option<&VariableMap> {
        self.layout.as_ref()
    }

    pub fn low_rank(&self) -> Option<&LowRank> {
        self.low_rank.as_ref()
    }

    /// Explicit neighbours of qubit `i` (excluding the low-rank part).
    pub fn neighbours(&self, i: usize) -> &[(usize, f64)] {
        &self.adjacency[i]
    }

    /// Coefficient of `q_i·q_j`, `i ≠ j`.
    pub fn quadratic(&self, i: usize, j: usize) -> f64 {
        let explicit = self.adjacency[i]
            .binary_search_by_key(&j, |&(k, _)| k)
            .map_or(0.0, |p| self.adjacency[i][p].1);
        let lr = self
            .low_rank
            .as_ref()
            .map_or(0.0, |l| l.scale * l.weights[i] * l.weights[j]);
        explicit + lr
    }

    /// All pair terms `(i, j, Q_ij)` with `i < j` and `Q_ij ≠ 0`, row by row.
    pub fn quadratic_terms(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let n = self.n_qubits();
        (0..n).flat_map(move |i| {
            let row: Box<dyn Iterator<Item = (usize, usize, f64)>> = match &self.low_rank {
                None => Box::new(
                    self.adjacency[i]
                        .iter()
                        .filter(move |&&(j, _)| j > i)
                        .map(move |&(j, v)| (i, j, v)),
                ),
                Some(_) => Box::new((i + 1..n).map(move |j| (i, j, self.quadratic(i, j)))),
            };
            row.filter(|&(_, _, v)| v != 0.0)
        })
    }

    pub fn n_quadratic_terms(&self) -> usize {
        self.quadratic_terms().count()
    }

    /// `offset + Σ linear_i q_i + Σ_{i<j} Q_ij q_i q_j`.
    pub fn evaluate(&self, bits: &[u8]) -> f64 {
        let mut e = self.offset;
        for (i, &b) in bits.iter().enumerate() {
            if b == 0 {
                continue;
            }
            e += self.linear[i];
            for &(j, v) in &self.adjacency[i] {
                if j > i && bits[j] != 0 {
                    e += v;
                }
            }
        }
        if let Some(lr) = &self.low_rank {
            let mut s = 0.0;
            let mut sq = 0.0;
            for (&b, &w) in bits.iter().zip(&lr.weights) {
                if b != 0 {
                    s += w;
                    sq += w * w;
                }
            }
            e += lr.scale * 0.5 * (s * s - sq);
        }
        e
    }
}

/// Checked `evaluate` for a [`BitAssignment`].
pub fn evaluate(qubo: &QuboProblem, bits: &BitAssignment) -> Result<f64, QuboError> {
    if bits.len() != qubo.n_qubits() {
        return Err(QuboError::SizeMismatch {
            what: "bit assignment",
            expected: qubo.n_qubits(),
            got: bits.len(),
        });
    }
    Ok(qubo.evaluate(bits))
}

/// Penalty configuration of one QUBO build.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PenaltyConfig {
    pub lambda: f64,
    pub theta_s: f64,
    pub v_target: f64,
}

fn check_sizes(
    state: &DesignState,
    se: &[f64],
    layout: &VariableMap,
    n_elem: usize,
) -> Result<(), QuboError> {
    for (what, got) in [
        ("design state", state.n_elements()),
        ("strain energies", se.len()),
        ("layout elements", layout.n_elem),
    ] {
        if got != n_elem {
            return Err(QuboError::SizeMismatch {
                what,
                expected: n_elem,
                got,
            });
        }
    }
    Ok(())
}

/// Expanded QUBO of the penalized update problem.
pub fn build_qubo(
    problem: &Problem,
    state: &DesignState,
    se: &[f64],
    config: &PenaltyConfig,
    layout: &VariableMap,
) -> Result<QuboProblem, QuboError> {
    let volumes = problem.element_volumes();
    check_sizes(state, se, layout, volumes.len())?;
    if !(config.lambda >= 0.0 && config.lambda.is_finite()) {
        return Err(QuboError::InvalidParameter(format!(
            "lambda must be nonnegative, got {}",
            config.lambda
        )));
    }
    if !(config.theta_s > 0.0 && config.theta_s.is_finite()) {
        return Err(QuboError::InvalidParameter(format!(
            "theta_s must be positive, got {}",
            config.theta_s
        )));
    }
    let v0: f64 = volumes.iter().sum();
    let lambda = config.lambda;
    let v = config.v_target;
    let big_w = layout.weight_sum();
    let big_ws = layout.slack_weight_sum();
    let n = layout.n_qubits();

    let mut linear = vec![0.0; n];
    let mut a = vec![0.0; n];
    for e in 0..layout.n_elem {
        let phi = state.theta[e] * (state.rho[e] * volumes[e] / v0);
        for (k, &w) in layout.weights.iter().enumerate() {
            let omega = w / big_w;
            let q = layout.element_qubit(e, k);
            let ak = phi * omega;
            a[q] = ak;
            linear[q] = -state.theta[e] * omega * se[e] + lambda * ak * ak - 2.0 * lambda * v * ak;
        }
    }
    for (k, q) in layout.slack_qubits().enumerate() {
        let ak = config.theta_s * layout.slack_weights[k] / big_ws;
        a[q] = ak;
        linear[q] = lambda * ak * ak - 2.0 * lambda * v * ak;
    }
    if let Some(i) = linear.iter().position(|x| !x.is_finite()) {
        return Err(QuboError::NonFinite(i));
    }
    Ok(QuboProblem {
        linear,
        adjacency: vec![Vec::new(); n],
        low_rank: (lambda != 0.0).then_some(LowRank {
            scale: 2.0 * lambda,
            weights: a,
        }),
        offset: lambda * v * v,
        layout: Some(layout.clone()),
    })
}

/// Unexpanded penalized cost for `bits`:
/// `−Σ Θ_e ξ_e SE_e + λ(Σ Θ_e ξ_e V_e/V₀ − (v_target − Θ_s ξ_s))²`.
pub fn direct_cost(
    problem: &Problem,
    state: &DesignState,
    se: &[f64],
    config: &PenaltyConfig,
    layout: &VariableMap,
    bits: &BitAssignment,
) -> Result<f64, QuboError> {
    let volumes = problem.element_volumes();
    check_sizes(state, se, layout, volumes.len())?;
    if bits.len() != layout.n_qubits() {
        return Err(QuboError::SizeMismatch {
            what: "bit assignment",
            expected: layout.n_qubits(),
            got: bits.len(),
        });
    }
    let v0: f64 = volumes.iter().sum();
    let mut work = 0.0;
    let mut volume = 0.0;
    for e in 0..layout.n_elem {
        let group = &bits[layout.element_qubits(e)];
        let alpha = state.theta[e] * xi(group, &layout.weights);
        work += alpha * se[e];
        volume += alpha * state.rho[e] * volumes[e] / v0;
    }
    let slack = config.theta_s * xi(&bits[layout.slack_qubits()], &layout.slack_weights);
    let g = volume - (config.v_target - slack);
    Ok(-work + config.lambda * g * g)
}
