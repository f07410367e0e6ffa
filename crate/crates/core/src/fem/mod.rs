//! Linear static finite element analysis with design-variable scaled
//! stiffness `K_e(ρ_e) = ρ_e·K⁰_e`.
//!
//! Supports are applied by eliminating fixed dofs, so the reduced system is
//! SPD whenever every `ρ_e > 0` and the supports remove all rigid-body
//! modes. Nodes that touch no element carry no dofs.

mod element;
mod solve;

use std::sync::{Arc, OnceLock};

use faer::sparse::{SparseColMat, SymbolicSparseColMat};
use nalgebra::DMatrix;
use rayon::prelude::*;

pub use element::{bar_stiffness, elasticity_matrix, hex8_stiffness, quad4_stiffness};
pub use solve::{solve_displacements, solve_reduced, DIRECT_SOLVE_LIMIT};

use crate::error::FemError;
use crate::model::{Geometry, Problem, ProblemKind};

/// Dense element stiffness with its global (unreduced) dof map.
#[derive(Debug, Clone)]
pub struct ElementStiffness {
    pub element: usize,
    pub matrix: DMatrix<f64>,
    /// Global dof index `node·dim + axis` for each matrix row.
    pub dofs: Vec<usize>,
}

/// Reduced equilibrium system `K_eff·U = F` over the free dofs. Only the
/// upper triangle of `K_eff` is stored.
#[derive(Debug, Clone)]
pub struct GlobalSystem {
    pub stiffness: SparseColMat<usize, f64>,
    pub load: Vec<f64>,
    layout: Arc<DofLayout>,
}

#[derive(Debug)]
struct DofLayout {
    n_full: usize,
    /// Reduced index → global dof.
    free: Vec<usize>,
    symbolic: OnceLock<faer::sparse::linalg::solvers::SymbolicLlt<usize>>,
}

impl GlobalSystem {
    pub fn n_free(&self) -> usize {
        self.layout.free.len()
    }

    pub fn n_full(&self) -> usize {
        self.layout.n_full
    }

    /// Global dof of each reduced unknown.
    pub fn free_dofs(&self) -> &[usize] {
        &self.layout.free
    }

    /// Scatters a reduced vector into a full-length vector (zeros at fixed dofs).
    pub fn expand(&self, reduced: &[f64]) -> Vec<f64> {
        let mut full = vec![0.0; self.layout.n_full];
        for (r, &g) in self.layout.free.iter().enumerate() {
            full[g] = reduced[r];
        }
        full
    }

    pub fn restrict(&self, full: &[f64]) -> Vec<f64> {
        self.layout.free.iter().map(|&g| full[g]).collect()
    }

    /// `y = K_eff·x` from the stored upper triangle.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let k = self.stiffness.as_ref();
        let mut y = vec![0.0; x.len()];
        for col in 0..k.ncols() {
            let rows = k.row_idx_of_col_raw(col);
            let vals = k.val_of_col(col);
            for (&row, &v) in rows.iter().zip(vals) {
                y[row] += v * x[col];
                if row != col {
                    y[col] += v * x[row];
                }
            }
        }
        y
    }

    /// Dense symmetric copy; intended for small systems and tests.
    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.n_free();
        let k = self.stiffness.as_ref();
        let mut d = DMatrix::zeros(n, n);
        for col in 0..n {
            for (&row, &v) in k.row_idx_of_col_raw(col).iter().zip(k.val_of_col(col)) {
                d[(row, col)] += v;
                if row != col {
                    d[(col, row)] += v;
                }
            }
        }
        d
    }

    pub(crate) fn cached_symbolic(
        &self,
    ) -> &OnceLock<faer::sparse::linalg::solvers::SymbolicLlt<usize>> {
        &self.layout.symbolic
    }
}

/// Precomputed element matrices, dof maps and the sparsity pattern of a
/// problem; reused across design iterations.
pub struct FemModel {
    dim: usize,
    n_elements: usize,
    elem_dofs: Vec<Vec<usize>>,
    base_matrices: Vec<DMatrix<f64>>,
    /// Index into `base_matrices` per element (grids share one matrix).
    base_of: Vec<usize>,
    full_load: Vec<f64>,
    reduced_of: Vec<Option<usize>>,
    layout: Arc<DofLayout>,
    pattern: SymbolicSparseColMat<usize>,
    /// Per element: (row-major local entry, position in the value array).
    scatter: Vec<Vec<(u32, u32)>>,
}

impl FemModel {
    pub fn new(problem: &Problem) -> Self {
        let dim = problem.dim();
        let n_nodes = problem.n_nodes();
        let n_full = n_nodes * dim;
        let element_nodes = problem.element_nodes();
        let n_elements = element_nodes.len();

        let (base_matrices, base_of) = match &problem.geometry {
            Geometry::Truss(t) => {
                let mats: Vec<DMatrix<f64>> = t
                    .members
                    .iter()
                    .map(|m| {
                        bar_stiffness(
                            t.nodes[m.nodes[0]],
                            t.nodes[m.nodes[1]],
                            dim,
                            problem.material.youngs_modulus,
                            m.area,
                        )
                    })
                    .collect();
                let idx = (0..mats.len()).collect();
                (mats, idx)
            }
            Geometry::Grid(g) => {
                let h = g.element_size;
                let k = if problem.kind == ProblemKind::PlaneStrain || g.dim == 2 {
                    let c = elasticity_matrix(problem.material, ProblemKind::PlaneStrain);
                    quad4_stiffness(&[[0.0, 0.0], [h[0], 0.0], [h[0], h[1]], [0.0, h[1]]], &c)
                } else {
                    let c = elasticity_matrix(problem.material, ProblemKind::Solid);
                    let mut coords = [[0.0; 3]; 8];
                    for (a, corner) in coords.iter_mut().enumerate() {
                        let [i, j, k] = [[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0], [0, 0, 1], [1, 0, 1], [1, 1, 1], [0, 1, 1]][a];
                        *corner = [i as f64 * h[0], j as f64 * h[1], k as f64 * h[2]];
                    }
                    hex8_stiffness(&coords, &c)
                };
                (vec![k], vec![0; n_elements])
            }
        };

        let elem_dofs: Vec<Vec<usize>> = element_nodes
            .iter()
            .map(|nodes| {
                nodes
                    .iter()
                    .flat_map(|&n| (0..dim).map(move |a| n * dim + a))
                    .collect()
            })
            .collect();

        let used = problem.used_nodes();
        let mut reduced_of = vec![None; n_full];
        let mut free = Vec::new();
        for node in 0..n_nodes {
            if !used[node] {
                continue;
            }
            for axis in 0..dim {
                if !problem.supports.fixed_dofs.contains(&(node, axis)) {
                    reduced_of[node * dim + axis] = Some(free.len());
                    free.push(node * dim + axis);
                }
            }
        }

        let mut full_load = vec![0.0; n_full];
        for l in &problem.loads.point_loads {
            for axis in 0..dim {
                full_load[l.node * dim + axis] += l.force[axis];
            }
        }

        let n_free = free.len();
        // upper-triangle pattern, column by column
        let mut columns: Vec<Vec<usize>> = vec![Vec::new(); n_free];
        for dofs in &elem_dofs {
            for &da in dofs {
                let Some(r) = reduced_of[da] else { continue };
                for &db in dofs {
                    let Some(c) = reduced_of[db] else { continue };
                    if r <= c {
                        columns[c].push(r);
                    }
                }
            }
        }
        let mut col_ptr = Vec::with_capacity(n_free + 1);
        let mut row_idx = Vec::new();
        col_ptr.push(0usize);
        for col in &mut columns {
            col.sort_unstable();
            col.dedup();
            row_idx.extend_from_slice(col);
            col_ptr.push(row_idx.len());
        }
        let scatter = elem_dofs
            .iter()
            .map(|dofs| {
                let n = dofs.len();
                let mut s = Vec::new();
                for (a, &da) in dofs.iter().enumerate() {
                    let Some(r) = reduced_of[da] else { continue };
                    for (b, &db) in dofs.iter().enumerate() {
                        let Some(c) = reduced_of[db] else { continue };
                        if r <= c {
                            let start = col_ptr[c];
                            let off = row_idx[start..col_ptr[c + 1]]
                                .binary_search(&r)
                                .expect("entry present in pattern");
                            s.push(((a * n + b) as u32, (start + off) as u32));
                        }
                    }
                }
                s
            })
            .collect();
        let pattern = SymbolicSparseColMat::new_checked(n_free, n_free, col_ptr, None, row_idx);

        Self {
            dim,
            n_elements,
            elem_dofs,
            base_matrices,
            base_of,
            full_load,
            reduced_of,
            layout: Arc::new(DofLayout {
                n_full,
                free,
                symbolic: OnceLock::new(),
            }),
            pattern,
            scatter,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_elements(&self) -> usize {
        self.n_elements
    }

    pub fn n_free(&self) -> usize {
        self.layout.free.len()
    }

    pub fn element_dofs(&self, element: usize) -> &[usize] {
        &self.elem_dofs[element]
    }

    /// Unscaled element stiffness K⁰_e.
    pub fn base_stiffness(&self, element: usize) -> &DMatrix<f64> {
        &self.base_matrices[self.base_of[element]]
    }

    pub fn element_stiffness(&self, element: usize, rho_e: f64) -> ElementStiffness {
        ElementStiffness {
            element,
            matrix: self.base_stiffness(element) * rho_e,
            dofs: self.elem_dofs[element].clone(),
        }
    }

    /// Full-length nodal load vector.
    pub fn full_load(&self) -> &[f64] {
        &self.full_load
    }

    pub fn is_free(&self, dof: usize) -> bool {
        self.reduced_of[dof].is_some()
    }

    fn check_design(&self, rho: &[f64]) -> Result<(), FemError> {
        if rho.len() != self.n_elements {
            return Err(FemError::SizeMismatch {
                expected: self.n_elements,
                got: rho.len(),
            });
        }
        if let Some((e, &v)) = rho
            .iter()
            .enumerate()
            .find(|(_, &v)| !(v > 0.0 && v <= 1.0))
        {
            return Err(FemError::InvalidDesign { element: e, value: v });
        }
        Ok(())
    }

    /// Assembles the reduced stiffness for design `rho`. Element
    /// contributions are summed in element order, so the result does not
    /// depend on thread scheduling.
    pub fn assemble(&self, rho: &[f64]) -> Result<GlobalSystem, FemError> {
        self.check_design(rho)?;
        let mut values = vec![0.0; self.pattern.compute_nnz()];
        for (e, entries) in self.scatter.iter().enumerate() {
            let k = self.base_stiffness(e);
            let n = k.nrows();
            let r = rho[e];
            for &(local, pos) in entries {
                let local = local as usize;
                values[pos as usize] += r * k[(local / n, local % n)];
            }
        }
        let stiffness = SparseColMat::new(self.pattern.clone(), values);
        let load = self.layout.free.iter().map(|&g| self.full_load[g]).collect();
        Ok(GlobalSystem {
            stiffness,
            load,
            layout: Arc::clone(&self.layout),
        })
    }

    /// `U_eᵀ·K⁰_e·U_e` per element (strain energy at ρ_e = 1).
    pub fn unit_strain_energies(&self, u: &[f64]) -> Vec<f64> {
        (0..self.n_elements)
            .into_par_iter()
            .map(|e| {
                let k = self.base_stiffness(e);
                let dofs = &self.elem_dofs[e];
                let ue: Vec<f64> = dofs.iter().map(|&d| u[d]).collect();
                let mut s = 0.0;
                for a in 0..ue.len() {
                    let mut row = 0.0;
                    for b in 0..ue.len() {
                        row += k[(a, b)] * ue[b];
                    }
                    s += ue[a] * row;
                }
                s.max(0.0)
            })
            .collect()
    }

    /// `SE_e = U_eᵀ·K_e(ρ_e)·U_e` with the current design scaling.
    pub fn strain_energies(&self, rho: &[f64], u: &[f64]) -> Vec<f64> {
        self.unit_strain_energies(u)
            .into_iter()
            .zip(rho)
            .map(|(s, r)| s * r)
            .collect()
    }

    /// Assemble and solve in one call; returns the full displacement vector.
    pub fn solve(&self, rho: &[f64]) -> Result<(GlobalSystem, Vec<f64>), FemError> {
        let system = self.assemble(rho)?;
        let u = solve_displacements(&system)?;
        Ok((system, u))
    }
}

/// Scaled stiffness of one element of `problem`.
pub fn element_stiffness(problem: &Problem, element: usize, rho_e: f64) -> ElementStiffness {
    FemModel::new(problem).element_stiffness(element, rho_e)
}

pub fn assemble(problem: &Problem, rho: &[f64]) -> Result<GlobalSystem, FemError> {
    FemModel::new(problem).assemble(rho)
}

pub fn elemental_strain_energy(problem: &Problem, rho: &[f64], u: &[f64]) -> Vec<f64> {
    FemModel::new(problem).strain_energies(rho, u)
}

/// Compliance `FᵀU`.
pub fn total_compliance(system: &GlobalSystem, u: &[f64]) -> f64 {
    system
        .free_dofs()
        .iter()
        .zip(&system.load)
        .map(|(&g, f)| f * u[g])
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{
        LoadCase, MaterialParams, Member, PointLoad, Supports, TrussModel,
    };

    fn bar_chain(areas: &[f64], load: f64) -> Problem {
        let n = areas.len() + 1;
        let nodes = (0..n).map(|i| [i as f64, 0.0, 0.0]).collect();
        let members = areas
            .iter()
            .enumerate()
            .map(|(i, &a)| Member { nodes: [i, i + 1], area: a })
            .collect();
        let mut supports = Supports::default();
        supports.fix_node(0, 2);
        for i in 1..n {
            supports.fixed_dofs.insert((i, 1));
        }
        Problem {
            name: None,
            kind: ProblemKind::Truss,
            geometry: Geometry::Truss(TrussModel { dim: 2, nodes, members }),
            material: MaterialParams::new(2e11, 0.3),
            loads: LoadCase {
                point_loads: vec![PointLoad { node: n - 1, force: [load, 0.0, 0.0] }],
            },
            supports,
            v_target: 1.0,
        }
    }

    #[test]
    fn single_bar_system_is_scalar() {
        let p = bar_chain(&[0.5], 1000.0);
        let sys = assemble(&p, &[1.0]).unwrap();
        assert_eq!(sys.n_free(), 1);
        assert_eq!(sys.to_dense()[(0, 0)], 1e11);
    }

    #[test]
    fn two_bar_chain_matrix() {
        // hand assembly: k1 = E·A1/L, k2 = E·A2/L → [[k1+k2, -k2], [-k2, k2]]
        let p = bar_chain(&[0.5, 0.25], 1000.0);
        let k = assemble(&p, &[1.0, 1.0]).unwrap().to_dense();
        let (k1, k2) = (1e11, 5e10);
        assert_eq!(k[(0, 0)], k1 + k2);
        assert_eq!(k[(0, 1)], -k2);
        assert_eq!(k[(1, 0)], -k2);
        assert_eq!(k[(1, 1)], k2);
    }

    #[test]
    fn scaled_element_stiffness() {
        let p = bar_chain(&[0.5], 1000.0);
        let k = element_stiffness(&p, 0, 0.35);
        assert!((k.matrix[(0, 0)] - 3.5e10).abs() < 1e-4);
        assert_eq!(k.dofs, vec![0, 1, 2, 3]);
    }

    #[test]
    fn design_length_mismatch() {
        let p = bar_chain(&[0.5], 1000.0);
        assert!(matches!(
            assemble(&p, &[1.0, 1.0]),
            Err(FemError::SizeMismatch { .. })
        ));
        assert!(matches!(
            assemble(&p, &[0.0]),
            Err(FemError::InvalidDesign { .. })
        ));
    }

    #[test]
    fn statically_determinate_zero_force_member() {
        // member between the two pinned nodes of truss6 carries nothing
        let p = crate::model::build_benchmark("truss6").unwrap();
        let model = FemModel::new(&p);
        let (_, u) = model.solve(&[0.35; 6]).unwrap();
        let se = model.strain_energies(&[0.35; 6], &u);
        // member 2 joins nodes 0 and 2, both fully fixed
        assert_eq!(se[2], 0.0);
    }
}
