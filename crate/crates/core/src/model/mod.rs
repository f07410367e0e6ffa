//! Problem definitions: geometry, material, boundary conditions and the
//! volume target.
//!
//! A [`Problem`] is immutable once built. Elements are indexed densely from
//! zero: truss members in file order, or the *active* cells of a grid in
//! lexicographic cell order (x fastest).

mod benchmarks;
mod schema;
mod validate;

use std::collections::BTreeSet;

pub use benchmarks::{benchmark_parameters, build_benchmark, BenchmarkParameters, BENCHMARKS};
pub use schema::{load_problem, parse_problem, problem_to_string, save_problem};
pub use validate::Violation;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialParams {
    pub youngs_modulus: f64,
    pub poisson_ratio: f64,
}

impl MaterialParams {
    pub fn new(youngs_modulus: f64, poisson_ratio: f64) -> Self {
        Self {
            youngs_modulus,
            poisson_ratio,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProblemKind {
    Truss,
    PlaneStrain,
    Solid,
}

impl ProblemKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ProblemKind::Truss => "truss",
            ProblemKind::PlaneStrain => "plane_strain",
            ProblemKind::Solid => "solid",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Member {
    pub nodes: [usize; 2],
    /// Initial cross-sectional area A⁰, m².
    pub area: f64,
}

/// Pin-jointed bar structure in 2D or 3D. 2D nodes carry `z = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrussModel {
    pub dim: usize,
    pub nodes: Vec<[f64; 3]>,
    pub members: Vec<Member>,
}

impl TrussModel {
    pub fn member_length(&self, member: usize) -> f64 {
        let [a, b] = self.members[member].nodes;
        let (pa, pb) = (self.nodes[a], self.nodes[b]);
        ((pb[0] - pa[0]).powi(2) + (pb[1] - pa[1]).powi(2) + (pb[2] - pa[2]).powi(2)).sqrt()
    }

    pub fn lengths(&self) -> Vec<f64> {
        (0..self.members.len()).map(|m| self.member_length(m)).collect()
    }

    /// Ground structure on a `cols × rows` node lattice with unit spacing:
    /// every cell edge plus both cell diagonals.
    pub fn lattice(cols: usize, rows: usize, area: f64) -> Self {
        let id = |i: usize, j: usize| i + cols * j;
        let mut nodes = Vec::with_capacity(cols * rows);
        for j in 0..rows {
            for i in 0..cols {
                nodes.push([i as f64, j as f64, 0.0]);
            }
        }
        let mut members = Vec::new();
        let mut push = |a: usize, b: usize| members.push(Member { nodes: [a, b], area });
        for j in 0..rows {
            for i in 0..cols.saturating_sub(1) {
                push(id(i, j), id(i + 1, j));
            }
        }
        for i in 0..cols {
            for j in 0..rows.saturating_sub(1) {
                push(id(i, j), id(i, j + 1));
            }
        }
        for j in 0..rows.saturating_sub(1) {
            for i in 0..cols.saturating_sub(1) {
                push(id(i, j), id(i + 1, j + 1));
                push(id(i + 1, j), id(i, j + 1));
            }
        }
        Self {
            dim: 2,
            nodes,
            members,
        }
    }
}

/// Structured grid of bilinear quads (2D, unit thickness) or trilinear hexes
/// (3D). For 2D grids `counts[2] == 1` and `element_size[2] == 1.0`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridMesh {
    pub dim: usize,
    pub counts: [usize; 3],
    pub element_size: [f64; 3],
    /// One flag per cell, x fastest then y then z.
    pub active: Vec<bool>,
}

impl GridMesh {
    pub fn new_2d(counts: [usize; 2], size: [f64; 2]) -> Self {
        let n = counts[0] * counts[1];
        Self {
            dim: 2,
            counts: [counts[0], counts[1], 1],
            element_size: [size[0], size[1], 1.0],
            active: vec![true; n],
        }
    }

    pub fn new_3d(counts: [usize; 3], size: [f64; 3]) -> Self {
        let n = counts[0] * counts[1] * counts[2];
        Self {
            dim: 3,
            counts,
            element_size: size,
            active: vec![true; n],
        }
    }

    pub fn n_cells(&self) -> usize {
        self.counts[0] * self.counts[1] * self.counts[2]
    }

    /// Node lattice dimensions.
    pub fn node_counts(&self) -> [usize; 3] {
        if self.dim == 2 {
            [self.counts[0] + 1, self.counts[1] + 1, 1]
        } else {
            [self.counts[0] + 1, self.counts[1] + 1, self.counts[2] + 1]
        }
    }

    pub fn n_nodes(&self) -> usize {
        let c = self.node_counts();
        c[0] * c[1] * c[2]
    }

    pub fn cell_index(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.counts[0] * (j + self.counts[1] * k)
    }

    pub fn cell_ijk(&self, cell: usize) -> [usize; 3] {
        let i = cell % self.counts[0];
        let j = (cell / self.counts[0]) % self.counts[1];
        let k = cell / (self.counts[0] * self.counts[1]);
        [i, j, k]
    }

    pub fn node_index(&self, i: usize, j: usize, k: usize) -> usize {
        let c = self.node_counts();
        i + c[0] * (j + c[1] * k)
    }

    pub fn node_ijk(&self, node: usize) -> [usize; 3] {
        let c = self.node_counts();
        [node % c[0], (node / c[0]) % c[1], node / (c[0] * c[1])]
    }

    pub fn node_coords(&self, node: usize) -> [f64; 3] {
        let [i, j, k] = self.node_ijk(node);
        [
            i as f64 * self.element_size[0],
            j as f64 * self.element_size[1],
            if self.dim == 3 {
                k as f64 * self.element_size[2]
            } else {
                0.0
            },
        ]
    }

    /// Corner nodes of a cell in counter-clockwise order (bottom face first in 3D).
    pub fn cell_nodes(&self, cell: usize) -> Vec<usize> {
        let [i, j, k] = self.cell_ijk(cell);
        let face = |k| {
            [
                self.node_index(i, j, k),
                self.node_index(i + 1, j, k),
                self.node_index(i + 1, j + 1, k),
                self.node_index(i, j + 1, k),
            ]
        };
        if self.dim == 2 {
            face(0).to_vec()
        } else {
            let mut v = face(k).to_vec();
            v.extend_from_slice(&face(k + 1));
            v
        }
    }

    pub fn cell_volume(&self) -> f64 {
        self.element_size.iter().product()
    }

    pub fn active_cells(&self) -> Vec<usize> {
        (0..self.n_cells()).filter(|&c| self.active[c]).collect()
    }

    /// Nodes that belong to at least one active cell.
    pub fn active_nodes(&self) -> Vec<bool> {
        let mut used = vec![false; self.n_nodes()];
        for c in self.active_cells() {
            for n in self.cell_nodes(c) {
                used[n] = true;
            }
        }
        used
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Geometry {
    Truss(TrussModel),
    Grid(GridMesh),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointLoad {
    pub node: usize,
    /// Force in N; unused trailing components are zero.
    pub force: [f64; 3],
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct LoadCase {
    pub point_loads: Vec<PointLoad>,
}

/// Fixed (node, axis) pairs; axis 0 = x, 1 = y, 2 = z.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Supports {
    pub fixed_dofs: BTreeSet<(usize, usize)>,
}

impl Supports {
    pub fn fix_node(&mut self, node: usize, dim: usize) {
        for axis in 0..dim {
            self.fixed_dofs.insert((node, axis));
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    pub name: Option<String>,
    pub kind: ProblemKind,
    pub geometry: Geometry,
    pub material: MaterialParams,
    pub loads: LoadCase,
    pub supports: Supports,
    /// Target volume ratio V̄ relative to the fully solid volume V₀.
    pub v_target: f64,
}

impl Problem {
    pub fn dim(&self) -> usize {
        match &self.geometry {
            Geometry::Truss(t) => t.dim,
            Geometry::Grid(g) => g.dim,
        }
    }

    pub fn n_nodes(&self) -> usize {
        match &self.geometry {
            Geometry::Truss(t) => t.nodes.len(),
            Geometry::Grid(g) => g.n_nodes(),
        }
    }

    pub fn n_elements(&self) -> usize {
        match &self.geometry {
            Geometry::Truss(t) => t.members.len(),
            Geometry::Grid(g) => g.active.iter().filter(|&&a| a).count(),
        }
    }

    pub fn node_coords(&self, node: usize) -> [f64; 3] {
        match &self.geometry {
            Geometry::Truss(t) => t.nodes[node],
            Geometry::Grid(g) => g.node_coords(node),
        }
    }

    /// Node lists per element (2 for bars, 4 for quads, 8 for hexes).
    pub fn element_nodes(&self) -> Vec<Vec<usize>> {
        match &self.geometry {
            Geometry::Truss(t) => t.members.iter().map(|m| m.nodes.to_vec()).collect(),
            Geometry::Grid(g) => g.active_cells().into_iter().map(|c| g.cell_nodes(c)).collect(),
        }
    }

    /// Fully solid element volumes V⁰_e (A⁰·L for bars, cell volume for grids).
    pub fn element_volumes(&self) -> Vec<f64> {
        match &self.geometry {
            Geometry::Truss(t) => t
                .members
                .iter()
                .enumerate()
                .map(|(m, member)| member.area * t.member_length(m))
                .collect(),
            Geometry::Grid(g) => vec![g.cell_volume(); self.n_elements()],
        }
    }

    /// V₀, the sum of the solid element volumes.
    pub fn initial_volume(&self) -> f64 {
        self.element_volumes().iter().sum()
    }

    /// Nodes that carry stiffness (all truss nodes, nodes of active cells).
    pub fn used_nodes(&self) -> Vec<bool> {
        match &self.geometry {
            Geometry::Truss(t) => {
                let mut used = vec![false; t.nodes.len()];
                for m in &t.members {
                    for &n in &m.nodes {
                        if n < used.len() {
                            used[n] = true;
                        }
                    }
                }
                used
            }
            Geometry::Grid(g) => g.active_nodes(),
        }
    }

    /// All invariant violations; empty when the problem is valid.
    pub fn validate(&self) -> Vec<Violation> {
        validate::validate(self)
    }

    /// Returns the problem if valid, otherwise every violation.
    pub fn validated(self) -> Result<Self, crate::error::ModelError> {
        let v = self.validate();
        if v.is_empty() {
            Ok(self)
        } else {
            Err(crate::error::ModelError::Invalid(v))
        }
    }

    /// Same problem with every point load multiplied by `factor`.
    pub fn with_load_scale(mut self, factor: f64) -> Self {
        for l in &mut self.loads.point_loads {
            for f in &mut l.force {
                *f *= factor;
            }
        }
        self
    }
}

/// Free-standing form of [`Problem::validate`].
pub fn validate(problem: &Problem) -> Vec<Violation> {
    problem.validate()
}
